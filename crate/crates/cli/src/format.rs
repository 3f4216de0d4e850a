//! Text format for module presentations.
//!
//! ```text
//! # comment
//! name E(1/2)
//! rank 1
//! precision 8
//! m 1 1: (1/2)*b
//! ```
//!
//! Entries are 1-based `m i j` with `a·e_j = Σ_i m_ij e_i`; omitted entries
//! are zero.

use abmod::module::AbModule;
use abmod::series::{parse_series, Series};
use abmod::{AbError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleFile {
    pub name: Option<String>,
    pub module: AbModule,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> AbError {
    AbError::ParseError { line, col, msg: msg.into() }
}

fn header_value(rest: &str, line: usize, col: usize, what: &str) -> Result<usize> {
    rest.trim().parse().map_err(|_| err(line, col, format!("`{what}` needs a non-negative integer")))
}

pub fn parse_module(text: &str) -> Result<ModuleFile> {
    let mut name = None;
    let mut rank: Option<usize> = None;
    let mut prec: Option<usize> = None;
    let mut entries: Vec<(usize, usize, usize, usize, &str)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        let (word, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_col = indent + word.len() + 2;
        match word {
            "name" => name = Some(rest.trim().to_string()),
            "rank" => {
                let p = header_value(rest, line, rest_col, "rank")?;
                if p == 0 {
                    return Err(err(line, rest_col, "rank must be at least 1"));
                }
                rank = Some(p);
            }
            "precision" => {
                let w = header_value(rest, line, rest_col, "precision")?;
                if w == 0 {
                    return Err(err(line, rest_col, "precision must be at least 1"));
                }
                prec = Some(w);
            }
            "m" => {
                let Some((idx, expr)) = rest.split_once(':') else {
                    return Err(err(line, indent + 1, "entry needs `m <i> <j>: <series>`"));
                };
                let ij: Vec<&str> = idx.split_whitespace().collect();
                let [i, j] = ij.as_slice() else {
                    return Err(err(line, rest_col, "entry needs two indices"));
                };
                let parse_idx = |t: &str| t.parse::<usize>().ok().filter(|&v| v >= 1);
                let (Some(i), Some(j)) = (parse_idx(i), parse_idx(j)) else {
                    return Err(err(line, rest_col, "indices are 1-based positive integers"));
                };
                let expr_col = indent + word.len() + 1 + idx.len() + 2;
                entries.push((line, expr_col, i, j, expr));
            }
            other => return Err(err(line, indent + 1, format!("unknown directive `{other}`"))),
        }
    }
    let p = rank.ok_or_else(|| err(0, 0, "missing `rank` line"))?;
    let w = prec.ok_or_else(|| err(0, 0, "missing `precision` line"))?;
    let mut m = vec![vec![Series::zero(w); p]; p];
    let mut seen = vec![vec![false; p]; p];
    for (line, col, i, j, expr) in entries {
        if i > p || j > p {
            return Err(err(line, col, format!("entry ({i}, {j}) outside rank {p}")));
        }
        if std::mem::replace(&mut seen[i - 1][j - 1], true) {
            return Err(err(line, col, format!("entry ({i}, {j}) given twice")));
        }
        let lead = expr.len() - expr.trim_start().len();
        m[i - 1][j - 1] = parse_series(expr.trim(), w).map_err(|e| match e {
            AbError::ParseError { col: c, msg, .. } => err(line, col + lead + c - 1, msg),
            other => other,
        })?;
    }
    Ok(ModuleFile { name, module: AbModule::from_entries(&m)? })
}

pub fn emit_module(file: &ModuleFile) -> String {
    let e = &file.module;
    let mut out = String::new();
    if let Some(n) = &file.name {
        out.push_str(&format!("name {n}\n"));
    }
    out.push_str(&format!("rank {}\nprecision {}\n", e.rank(), e.precision()));
    for i in 0..e.rank() {
        for j in 0..e.rank() {
            let s = e.entry(i, j);
            if !s.is_zero() {
                out.push_str(&format!("m {} {}: {}\n", i + 1, j + 1, s.to_expr()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use abmod::catalog::{make_e_lambda, FamilySpec};
    use abmod::Scalar;

    #[test]
    fn reads_rank_one_example() {
        let f = parse_module("rank 1\nprecision 8\nm 1 1: (1/2)*b\n").unwrap();
        assert_eq!(f.module, make_e_lambda(&Scalar::from_ratio(1, 2), 8));
        assert_eq!(f.name, None);
    }

    #[test]
    fn malformed_coefficient_position() {
        let text = "rank 1\nprecision 4\nm 1 1: 1//2\n";
        match parse_module(text) {
            Err(AbError::ParseError { line, col, .. }) => assert_eq!((line, col), (3, 10)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn catalog_round_trip() {
        for t in ["E(1/2)", "E(0;2)", "E(1/3,1)", "E(1/2,2;3)", "J(4;-1)", "F(3;0;1/2)", "rand(3;5)", "E(3+i)"] {
            let spec = FamilySpec::parse(t).unwrap();
            let file = ModuleFile { name: Some(t.into()), module: spec.build(9).unwrap() };
            let text = emit_module(&file);
            let back = parse_module(&text).unwrap();
            assert_eq!(back, file, "{t}");
            assert_eq!(emit_module(&back), text);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# E_0\n\nrank 1  # one\nprecision 3\n";
        let f = parse_module(text).unwrap();
        assert!(f.module.matrix().is_zero());
    }

    #[test]
    fn structural_errors() {
        for text in [
            "precision 3\n",
            "rank 1\n",
            "rank 0\nprecision 2\n",
            "rank 1\nprecision 2\nm 2 1: b\n",
            "rank 1\nprecision 2\nm 1 1: b\nm 1 1: b\n",
            "rank 1\nprecision 2\nm 0 1: b\n",
            "rank 1\nprecision 2\nmatrix\n",
            "rank 1\nprecision 2\nm 1 1 b\n",
        ] {
            assert!(matches!(parse_module(text), Err(AbError::ParseError { .. })), "{text:?}");
        }
    }
}
