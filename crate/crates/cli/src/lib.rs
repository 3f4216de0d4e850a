//! Command-line front end: argument parsing, input resolution and reports.

pub mod format;
pub mod report;

use std::path::Path;

use abmod::catalog::FamilySpec;
use abmod::functors::{self, ClassPolicy};
use abmod::invariants::{self as inv, working_precision};
use abmod::module::AbModule;
use abmod::truncation;
use abmod::{AbError, Scalar};
use clap::{Parser, Subcommand};

use format::{emit_module, parse_module, ModuleFile};
use report::{list, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "abmod", version, about = "Exact computations with (a,b)-modules")]
pub struct Cli {
    /// Working precision W (default depends on the rank).
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    /// Compare truncations modulo b^N instead of full modules.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Module arguments are either a file path or a family such as `J(3;0)`.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Invariants of a module.
    Info { module: String },
    Dual { module: String },
    /// Twist by E_m.
    Twist {
        module: String,
        #[arg(allow_negative_numbers = true)]
        m: String,
    },
    /// The saturation by b^{-1}a.
    Saturate { module: String },
    /// The biggest simple-pole submodule.
    Eb { module: String },
    Hom { source: String, target: String },
    Ext { source: String, target: String },
    /// Jordan-Hölder exponents.
    Jh { module: String },
    /// Rank-2 normal form.
    Classify2 { module: String },
    /// The finite-dimensional quotient modulo b^N.
    Truncate { module: String, n: usize },
    Iso { first: String, second: String },
    /// Finite-determination experiment.
    Fd { module: String },
    /// Emit a catalog module in the file format.
    Catalog { name: String },
}

#[derive(Debug)]
pub enum CliError {
    Ab(AbError),
    Usage(String),
}

impl From<AbError> for CliError {
    fn from(e: AbError) -> Self {
        CliError::Ab(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Ab(AbError::ParseError { .. } | AbError::BadParameter(_)) => EXIT_PARSE,
            CliError::Ab(AbError::UnsupportedSpectrum(_)) => EXIT_UNSUPPORTED,
            CliError::Ab(_) => EXIT_COMPUTATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Ab(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A resolved module argument.
#[derive(Clone, Debug)]
enum Source {
    File(ModuleFile),
    Family(FamilySpec),
}

impl Source {
    fn resolve(arg: &str) -> CliResult<Source> {
        if Path::new(arg).is_file() {
            let text = std::fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read `{arg}`: {e}")))?;
            return Ok(Source::File(parse_module(&text)?));
        }
        if !arg.contains('(') {
            return Err(CliError::Usage(format!("`{arg}` is neither a file nor a family")));
        }
        Ok(Source::Family(FamilySpec::parse(arg)?))
    }

    fn rank(&self) -> usize {
        match self {
            Source::File(f) => f.module.rank(),
            Source::Family(s) => s.rank(),
        }
    }

    fn name(&self) -> Option<String> {
        match self {
            Source::File(f) => f.name.clone(),
            Source::Family(s) => Some(s.to_string()),
        }
    }

    fn build(&self, w: usize) -> CliResult<AbModule> {
        match self {
            Source::File(f) if w > f.module.precision() => Err(CliError::Usage(format!(
                "requested precision {w} exceeds the file precision {}",
                f.module.precision()
            ))),
            Source::File(f) => Ok(f.module.truncate(w)),
            Source::Family(s) => Ok(s.build(w)?),
        }
    }
}

struct Inputs {
    sources: Vec<Source>,
    precision: usize,
    /// Precision can be raised when every input is a family and none was requested.
    raisable: bool,
}

impl Inputs {
    fn new(args: &[&str], requested: Option<usize>) -> CliResult<Inputs> {
        let sources = args.iter().map(|a| Source::resolve(a)).collect::<CliResult<Vec<_>>>()?;
        let file_prec = sources
            .iter()
            .filter_map(|s| match s {
                Source::File(f) => Some(f.module.precision()),
                Source::Family(_) => None,
            })
            .min();
        let default = || {
            sources
                .iter()
                .map(|s| match s {
                    Source::Family(f) => working_precision(s.rank(), f.min_precision()),
                    Source::File(_) => 0,
                })
                .max()
                .unwrap_or(0)
        };
        let precision = match (requested, file_prec) {
            (Some(w), _) => w,
            (None, Some(w)) => w,
            (None, None) => default(),
        };
        if precision == 0 {
            return Err(CliError::Usage("precision must be positive".into()));
        }
        let raisable = requested.is_none() && file_prec.is_none();
        Ok(Inputs { sources, precision, raisable })
    }

    fn modules(&self, w: usize) -> CliResult<Vec<AbModule>> {
        self.sources.iter().map(|s| s.build(w)).collect()
    }
}

/// Run `body` on the inputs; on exhausted precision retry once at twice the
/// precision when the inputs allow it.
fn with_raise(
    inputs: &Inputs,
    report: &mut Report,
    body: impl Fn(&[AbModule], usize, &mut Report) -> CliResult<()>,
) -> CliResult<()> {
    let w = inputs.precision;
    let mut first = Report::new(report.verbose());
    match body(&inputs.modules(w)?, w, &mut first) {
        Err(CliError::Ab(AbError::PrecisionExhausted(msg))) if inputs.raisable => {
            let w2 = 2 * w;
            report.kv("precision_raised", w2);
            report.note(format!("precision {w} was not enough: {msg}"));
            body(&inputs.modules(w2)?, w2, report)
        }
        r => {
            report.raw(&first.render());
            r
        }
    }
}

fn sorted(mut v: Vec<Scalar>) -> Vec<Scalar> {
    v.sort_by(Scalar::lex_cmp);
    v
}

fn emit(report: &mut Report, name: Option<String>, module: AbModule) {
    report.raw(&emit_module(&ModuleFile { name, module }));
}

fn info(e: &AbModule, w: usize, r: &mut Report) -> CliResult<()> {
    r.kv("rank", e.rank());
    r.kv("precision", w);
    r.kv("simple_pole", e.is_simple_pole());
    let regular = inv::is_regular(e)?;
    r.kv("regular", regular);
    if !regular {
        return Err(AbError::NotRegular("b^{-1}a generates no finite lattice".into()).into());
    }
    r.kv("delta", inv::delta_index(e)?);
    r.kv("or", inv::regularity_order(e)?);
    let sat = inv::saturate(e)?;
    r.kv("spectrum", list(&sorted(inv::spectrum(&sat.saturated)?)));
    let table = inv::width_table(e)?;
    r.kv("width", table.width());
    for c in &table.classes {
        r.note(format!("class {}: exponents from {} to {}, width {}", c.class, c.min, c.max, c.width));
    }
    r.kv("alpha", inv::alpha_invariant(e)?);
    r.kv("n0", inv::n0_bound(e)?);
    r.kv("geometric", inv::is_geometric(e)?);
    Ok(())
}

fn execute(cli: &Cli, report: &mut Report) -> CliResult<()> {
    let inputs = |args: &[&str]| Inputs::new(args, cli.precision);
    match &cli.command {
        Command::Info { module } => with_raise(&inputs(&[module])?, report, |m, w, r| info(&m[0], w, r)),
        Command::Dual { module } => {
            let inp = inputs(&[module])?;
            let name = inp.sources[0].name().map(|n| format!("dual {n}"));
            with_raise(&inp, report, |m, _, r| {
                emit(r, name.clone(), functors::dual(&m[0]));
                Ok(())
            })
        }
        Command::Twist { module, m: shift } => {
            let c = abmod::series::parse_series(shift, 1)?.coeff(0).clone();
            let inp = inputs(&[module])?;
            let name = inp.sources[0].name().map(|n| format!("twist {n} by {c}"));
            with_raise(&inp, report, |m, _, r| {
                emit(r, name.clone(), functors::twist(&m[0], &c));
                Ok(())
            })
        }
        Command::Saturate { module } => {
            let inp = inputs(&[module])?;
            let name = inp.sources[0].name().map(|n| format!("saturation of {n}"));
            with_raise(&inp, report, |m, _, r| {
                let sat = inv::saturate(&m[0])?;
                r.note(format!("contained in b^-{} E", sat.steps));
                emit(r, name.clone(), sat.saturated);
                Ok(())
            })
        }
        Command::Eb { module } => {
            let inp = inputs(&[module])?;
            let name = inp.sources[0].name().map(|n| format!("E^b of {n}"));
            with_raise(&inp, report, |m, _, r| {
                let (sp, lat) = inv::biggest_simple_pole(&m[0])?;
                for g in lat.generators() {
                    let coords: Vec<String> = g.iter().map(|s| s.to_expr()).collect();
                    r.note(format!("generator [{}] in frame {}", coords.join(", "), lat.shift()));
                }
                emit(r, name.clone(), sp);
                Ok(())
            })
        }
        Command::Hom { source, target } => {
            let inp = inputs(&[source, target])?;
            let name = match (inp.sources[0].name(), inp.sources[1].name()) {
                (Some(a), Some(b)) => Some(format!("hom {a} {b}")),
                _ => None,
            };
            with_raise(&inp, report, |m, _, r| {
                emit(r, name.clone(), functors::hom_ab(&m[0], &m[1]));
                Ok(())
            })
        }
        Command::Ext { source, target } => with_raise(&inputs(&[source, target])?, report, |m, _, r| {
            let d = functors::ext_dims(&m[0], &m[1])?;
            r.kv("ext0", d.d0);
            r.kv("ext1", d.d1);
            r.note(format!("stable at truncation levels {}", list(&d.levels)));
            Ok(())
        }),
        Command::Jh { module } => with_raise(&inputs(&[module])?, report, |m, _, r| {
            let jh = functors::jordan_holder(&m[0], &ClassPolicy::Smallest)?;
            r.kv("jh", list(&jh.exponents));
            r.note(format!("exponent sum {}", jh.sum()));
            Ok(())
        }),
        Command::Classify2 { module } => {
            let inp = inputs(&[module])?;
            if inp.sources[0].rank() != 2 {
                return Err(CliError::Usage("classify2 needs a rank-2 module".into()));
            }
            with_raise(&inp, report, |m, _, r| {
                r.kv("class2", functors::classify_rank2(&m[0])?);
                Ok(())
            })
        }
        Command::Truncate { module, n } => with_raise(&inputs(&[module])?, report, |m, _, r| {
            let q = truncation::truncate(&m[0], *n)?;
            r.kv("rank", q.rank);
            r.kv("trunc", q.n);
            r.note("basis b^k e_i listed as k·rank + i; entries are columns of a and b");
            for (tag, mat) in [("a", &q.a), ("b", &q.b)] {
                for i in 0..q.dim {
                    for j in 0..q.dim {
                        if !mat[(i, j)].is_zero() {
                            r.kv(&format!("{tag} {} {}", i + 1, j + 1), &mat[(i, j)]);
                        }
                    }
                }
            }
            Ok(())
        }),
        Command::Iso { first, second } => {
            let inp = inputs(&[first, second])?;
            if inp.sources[0].rank() != inp.sources[1].rank() {
                report.kv("iso", "absent");
                report.note("ranks differ");
                return Ok(());
            }
            with_raise(&inp, report, |m, w, r| {
                let found = match cli.trunc {
                    Some(n) => {
                        let (q1, q2) = (truncation::truncate(&m[0], n)?, truncation::truncate(&m[1], n)?);
                        r.note(format!("compared modulo b^{n}"));
                        truncation::quotient_iso(&q1, &q2).is_some()
                    }
                    None => {
                        r.note(format!("intertwiner searched to precision {w}"));
                        truncation::module_iso(&m[0], &m[1], w)?.is_some()
                    }
                };
                r.kv("iso", if found { "found" } else { "absent" });
                Ok(())
            })
        }
        Command::Fd { module } => {
            let mut inp = inputs(&[module])?;
            if inp.raisable {
                let probe = inp.modules(inp.precision)?.remove(0);
                let n0 = usize::try_from(inv::n0_bound(&probe)?).unwrap_or(0);
                inp.precision = inp.precision.max(2 * truncation::fd_precision(n0, probe.rank()));
            }
            let e = inp.modules(inp.precision)?.remove(0);
            let rep = truncation::verify_fd(&e, cli.trials, cli.seed)?;
            report.kv("n0", rep.n0);
            report.kv("precision", rep.precision);
            report.kv("fd_trials", rep.trials);
            report.kv("fd_failures", rep.failures.len());
            for f in &rep.failures {
                let iso = if f.isomorphic { "isomorphic" } else { "not isomorphic" };
                report.note(format!("trial {}: {} ({iso})", f.trial, f.reason));
            }
            Ok(())
        }
        Command::Catalog { name } => {
            let spec = FamilySpec::parse(name)?;
            let w = cli.precision.unwrap_or_else(|| working_precision(spec.rank(), spec.min_precision()));
            emit(report, Some(spec.to_string()), spec.build(w)?);
            Ok(())
        }
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    let mut report = Report::new(cli.verbose);
    match execute(&cli, &mut report) {
        Ok(()) => Outcome { code: EXIT_OK, stdout: report.render(), stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: report.render(), stderr: format!("error: {e}\n") },
    }
}
