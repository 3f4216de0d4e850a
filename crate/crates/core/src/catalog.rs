//! Named families of regular (a,b)-modules and a seeded random generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AbError, Result};
use crate::module::AbModule;
use crate::scalar::Scalar;
use crate::series::{parse_series, Series};

fn module(entries: Vec<Vec<Series>>) -> AbModule {
    AbModule::from_entries(&entries).expect("square family")
}

fn lin(c: &Scalar, w: usize) -> Series {
    Series::monomial(c.clone(), 1, w)
}

/// `E_λ`: `a·e = λ·b·e`.
pub fn make_e_lambda(lambda: &Scalar, w: usize) -> AbModule {
    module(vec![vec![lin(lambda, w)]])
}

/// `E_λ(n)`: `a·x = (λ+n)·b·x + b^{n+1}·y`, `a·y = λ·b·y`.
pub fn make_e_lambda_n(lambda: &Scalar, n: usize, w: usize) -> Result<AbModule> {
    let top = lambda + &Scalar::from_int(n as i64);
    Ok(module(vec![
        vec![lin(&top, w), Series::zero(w)],
        vec![Series::monomial(Scalar::one(), n + 1, w), lin(lambda, w)],
    ]))
}

/// `E_{λ,μ}`: `a·y = μ·b·y`, `a·t = y + (λ−1)·b·t`.
pub fn make_e_lambda_mu(lambda: &Scalar, mu: &Scalar, w: usize) -> AbModule {
    let l1 = lambda - &Scalar::one();
    module(vec![vec![lin(mu, w), Series::one(w)], vec![Series::zero(w), lin(&l1, w)]])
}

/// `E_{λ,λ−n}(α)`: `a·y = (λ−n)·b·y`, `a·t = y + (λ−1)·b·t + α·b^n·y`.
pub fn make_e_lambda_mu_alpha(lambda: &Scalar, n: usize, alpha: &Scalar, w: usize) -> Result<AbModule> {
    if n < 1 {
        return Err(AbError::BadParameter("E(l,n;alpha) needs n ≥ 1".into()));
    }
    if alpha.is_zero() {
        return Err(AbError::BadParameter("E(l,n;alpha) needs alpha ≠ 0".into()));
    }
    let mu = lambda - &Scalar::from_int(n as i64);
    let l1 = lambda - &Scalar::one();
    let corner = Series::one(w).add(&Series::monomial(alpha.clone(), n, w));
    Ok(module(vec![vec![lin(&mu, w), corner], vec![Series::zero(w), lin(&l1, w)]]))
}

/// `J_k(λ)`: `a·e_j = (λ+j−1)·b·e_j + e_{j+1}` with `e_{k+1} = 0`.
pub fn make_j_k(lambda: &Scalar, k: usize, w: usize) -> Result<AbModule> {
    if k < 1 {
        return Err(AbError::BadParameter("J(k;l) needs k ≥ 1".into()));
    }
    let mut entries = vec![vec![Series::zero(w); k]; k];
    for j in 0..k {
        entries[j][j] = lin(&(lambda + &Scalar::from_int(j as i64)), w);
        if j + 1 < k {
            entries[j + 1][j] = Series::one(w);
        }
    }
    Ok(module(entries))
}

/// `F_ρ`: `J_k(λ)` with `ρ^k·b^k·e_1` added to `a·e_k`.
pub fn make_f_rho(lambda: &Scalar, k: usize, rho: &Scalar, w: usize) -> Result<AbModule> {
    if k < 2 {
        return Err(AbError::BadParameter("F(k;l;rho) needs k ≥ 2".into()));
    }
    if rho.is_zero() {
        return Err(AbError::BadParameter("F(k;l;rho) needs rho ≠ 0".into()));
    }
    let j = make_j_k(lambda, k, w)?;
    let mut m = j.matrix().clone();
    let mut rk = Scalar::one();
    for _ in 0..k {
        rk = &rk * rho;
    }
    if k < w {
        m.coeff_mut(k)[(0, k - 1)] += &rk;
    }
    AbModule::new(m)
}

/// Upper-triangular extension of `E_{λ_1}, …, E_{λ_p}` with sparse random
/// polynomial cocycles; the same seed always gives the same module.
pub fn random_regular(rank: usize, seed: u64, w: usize) -> Result<AbModule> {
    if rank < 1 {
        return Err(AbError::BadParameter("rand(rank;seed) needs rank ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deg = (w / 2).clamp(1, 4);
    let dens = [1i64, 2, 3, 6];
    let mut entries = vec![vec![Series::zero(w); rank]; rank];
    for (j, row) in entries.iter_mut().enumerate() {
        let d = dens[rng.gen_range(0..dens.len())];
        let num = rng.gen_range(-2 * d..=2 * d);
        row[j] = lin(&Scalar::from_ratio(num, d), w);
    }
    for i in 0..rank {
        for j in i + 1..rank {
            if rng.gen_bool(0.4) {
                continue;
            }
            let mut coeffs = vec![Scalar::zero(); w];
            for c in coeffs.iter_mut().take(deg.min(w)) {
                if rng.gen_bool(0.5) {
                    *c = Scalar::from_int(rng.gen_range(-2..=2));
                }
            }
            entries[i][j] = Series::from_coeffs(coeffs, w);
        }
    }
    Ok(module(entries))
}

/// A named family with its parameters, as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    ELambda(Scalar),
    ELambdaN(Scalar, usize),
    ELambdaMu(Scalar, Scalar),
    ELambdaMuAlpha(Scalar, usize, Scalar),
    JK(usize, Scalar),
    FRho(usize, Scalar, Scalar),
    Random(usize, u64),
}

fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = parse_series(text.trim(), 4)?;
    if s.coeffs().iter().skip(1).any(|c| !c.is_zero()) {
        return Err(AbError::BadParameter(format!("`{text}` is not a constant")));
    }
    Ok(s.coeff(0).clone())
}

fn parse_count(text: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| AbError::BadParameter(format!("`{text}` is not a non-negative integer")))
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<FamilySpec> {
        let text = text.trim();
        let bad = || AbError::BadParameter(format!("unknown family `{text}`"));
        let open = text.find('(').ok_or_else(bad)?;
        if !text.ends_with(')') {
            return Err(bad());
        }
        let name = &text[..open];
        let inner = &text[open + 1..text.len() - 1];
        let groups: Vec<&str> = inner.split(';').collect();
        match (name, groups.as_slice()) {
            ("E", [g]) => {
                let parts: Vec<&str> = g.split(',').collect();
                match parts.as_slice() {
                    [l] => Ok(FamilySpec::ELambda(parse_scalar(l)?)),
                    [l, m] => Ok(FamilySpec::ELambdaMu(parse_scalar(l)?, parse_scalar(m)?)),
                    _ => Err(bad()),
                }
            }
            ("E", [g, h]) => {
                let parts: Vec<&str> = g.split(',').collect();
                match parts.as_slice() {
                    [l] => Ok(FamilySpec::ELambdaN(parse_scalar(l)?, parse_count(h)?)),
                    [l, n] => Ok(FamilySpec::ELambdaMuAlpha(parse_scalar(l)?, parse_count(n)?, parse_scalar(h)?)),
                    _ => Err(bad()),
                }
            }
            ("J", [k, l]) => Ok(FamilySpec::JK(parse_count(k)?, parse_scalar(l)?)),
            ("F", [k, l, r]) => Ok(FamilySpec::FRho(parse_count(k)?, parse_scalar(l)?, parse_scalar(r)?)),
            ("rand", [p, s]) => Ok(FamilySpec::Random(
                parse_count(p)?,
                s.trim().parse().map_err(|_| AbError::BadParameter(format!("bad seed `{s}`")))?,
            )),
            _ => Err(bad()),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            FamilySpec::ELambda(_) => 1,
            FamilySpec::ELambdaN(..) | FamilySpec::ELambdaMu(..) | FamilySpec::ELambdaMuAlpha(..) => 2,
            FamilySpec::JK(k, _) | FamilySpec::FRho(k, ..) => *k,
            FamilySpec::Random(p, _) => *p,
        }
    }

    /// Smallest precision at which the defining relations are fully visible.
    pub fn min_precision(&self) -> usize {
        match self {
            FamilySpec::ELambda(_) | FamilySpec::ELambdaMu(..) | FamilySpec::JK(..) => 2,
            FamilySpec::Random(..) => 5,
            FamilySpec::ELambdaN(_, n) => n + 2,
            FamilySpec::ELambdaMuAlpha(_, n, _) => n + 1,
            FamilySpec::FRho(k, ..) => k + 1,
        }
    }

    pub fn build(&self, w: usize) -> Result<AbModule> {
        match self {
            FamilySpec::ELambda(l) => Ok(make_e_lambda(l, w)),
            FamilySpec::ELambdaN(l, n) => make_e_lambda_n(l, *n, w),
            FamilySpec::ELambdaMu(l, m) => Ok(make_e_lambda_mu(l, m, w)),
            FamilySpec::ELambdaMuAlpha(l, n, a) => make_e_lambda_mu_alpha(l, *n, a, w),
            FamilySpec::JK(k, l) => make_j_k(l, *k, w),
            FamilySpec::FRho(k, l, r) => make_f_rho(l, *k, r, w),
            FamilySpec::Random(p, s) => random_regular(*p, *s, w),
        }
    }
}

impl std::fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilySpec::ELambda(l) => write!(f, "E({l})"),
            FamilySpec::ELambdaN(l, n) => write!(f, "E({l};{n})"),
            FamilySpec::ELambdaMu(l, m) => write!(f, "E({l},{m})"),
            FamilySpec::ELambdaMuAlpha(l, n, a) => write!(f, "E({l},{n};{a})"),
            FamilySpec::JK(k, l) => write!(f, "J({k};{l})"),
            FamilySpec::FRho(k, l, r) => write!(f, "F({k};{l};{r})"),
            FamilySpec::Random(p, s) => write!(f, "rand({p};{s})"),
        }
    }
}

