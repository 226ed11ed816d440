//! `l0linf` command-line front end.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage error,
//! 3 unreadable or malformed input / unwritable output, 4 domain error
//! (for example an unreachable transfer constant or a violated constraint).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use l0linf::homs::{enorm_bound_check, interpolation_check_with_tol, PairHom};
use l0linf::kcalc::{k_curve_csv, log_grid, m_curve_csv, optimal_decomposition, optimal_decomposition_matrix};
use l0linf::matmodel::TraceMatrix;
use l0linf::orbits::{counterexample_with_weight, korbit_norm, pointwise_constant, CounterexampleSpec};
use l0linf::stepfn::{Rearrange, SingularFunction, StepFunction};
use l0linf::suite::run_suite;
use l0linf::symnorm::DeltaNorm;
use l0linf::transfer;

/// Relative slack of `check-interp`, overridable through the environment.
const INTERP_RTOL: f64 = 1e-9;
const INTERP_RTOL_ENV: &str = "L0LINF_INTERP_RTOL";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Domain(l0linf::Error),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Config(_) => 3,
            CliError::Domain(l0linf::Error::InvalidInput(_) | l0linf::Error::Json(_)) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<l0linf::Error> for CliError {
    fn from(e: l0linf::Error) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "l0linf",
    version,
    about = "Singular values, K-functionals and orbits for (L0, Linf)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Singular value function of a step function or matrix.
    Mu {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K_u and M_t on a log grid, as CSV.
    Kcurve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        u_min: f64,
        #[arg(long, default_value_t = 1e3)]
        u_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// K-curve CSV; printed to stdout when absent.
        #[arg(long)]
        out_k: Option<PathBuf>,
        /// M-curve CSV; printed to stdout when absent.
        #[arg(long)]
        out_m: Option<PathBuf>,
    },
    /// Optimal L0 + Linf splitting at a given u.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolation inequality and E-norm bounds for a homomorphism.
    CheckInterp {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Norm keys such as `Lp:0.5`, `L0`, `F`; all built-ins when absent.
        #[arg(long = "norm")]
        norms: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K-orbit norm of X with respect to A and the pointwise constant.
    Korbit {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair with identical K-curves that is not in the orbit ball.
    Counterexample {
        #[arg(long)]
        tau1: f64,
        #[arg(long)]
        tau2: f64,
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        k2: f64,
        /// Trace weight; derived from tau1, tau2 when absent.
        #[arg(long)]
        w: Option<f64>,
        /// Pair `{"A": .., "X": ..}` as matrix JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving `k_A.csv` and `k_X.csv`.
        #[arg(long)]
        curves_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Plan, build and verify an orbit transfer taking A to X.
    Transfer {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "X")]
        x: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Every module's property battery with a JSON summary.
    VerifySuite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Result of a subcommand before anything touches the filesystem.
#[derive(Default)]
struct Outcome {
    stdout: String,
    files: Vec<(PathBuf, String)>,
    ok: bool,
}

impl Outcome {
    fn ok() -> Self {
        Outcome {
            ok: true,
            ..Default::default()
        }
    }

    /// Sends `body` to `path`, or to stdout when no path was given.
    fn emit(&mut self, path: Option<PathBuf>, body: String) {
        match path {
            Some(p) => self.files.push((p, body)),
            None => {
                self.stdout.push_str(&body);
                if !body.ends_with('\n') {
                    self.stdout.push('\n');
                }
            }
        }
    }
}

enum Input {
    Step(StepFunction),
    Matrix(TraceMatrix),
}

impl Input {
    fn singular_function(&self) -> l0linf::Result<SingularFunction> {
        match self {
            Input::Step(f) => f.singular_function(),
            Input::Matrix(x) => x.singular_function(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Matrix JSON carries `re`; anything else is read as a step function.
fn read_input(path: &Path) -> Result<Input, CliError> {
    let value: serde_json::Value = parse(path)?;
    let bad = |e: serde_json::Error| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if value.get("re").is_some() {
        serde_json::from_value(value).map(Input::Matrix).map_err(bad)
    } else {
        serde_json::from_value(value).map(Input::Step).map_err(bad)
    }
}

fn read_matrix(path: &Path) -> Result<TraceMatrix, CliError> {
    parse(path)
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn interp_rtol() -> Result<f64, CliError> {
    match std::env::var(INTERP_RTOL_ENV) {
        Err(_) => Ok(INTERP_RTOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
            _ => Err(CliError::Config(format!(
                "{INTERP_RTOL_ENV}={s:?} is not a nonnegative number"
            ))),
        },
    }
}

/// JSON has no infinity; unbounded values become `null`.
fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut out = Outcome::ok();
    match cli.command {
        Command::Mu { input, out: path } => {
            let mu = read_input(&input)?.singular_function()?;
            out.emit(path, mu.as_step().to_json());
        }
        Command::Kcurve {
            input,
            u_min,
            u_max,
            points,
            out_k,
            out_m,
        } => {
            let mu = read_input(&input)?.singular_function()?;
            let grid = log_grid(u_min, u_max, points)?;
            out.emit(out_k, k_curve_csv(&mu, &grid));
            out.emit(out_m, m_curve_csv(&mu, &grid));
        }
        Command::Decompose { input, u, out: path } => {
            let body = match read_input(&input)? {
                Input::Step(f) => {
                    let d = optimal_decomposition(&f, u)?;
                    json!({ "u": u, "value": d.value, "g": d.g, "h": d.h })
                }
                Input::Matrix(x) => {
                    let d = optimal_decomposition_matrix(&x, u)?;
                    json!({ "u": u, "value": d.value, "g": d.g, "h": d.h })
                }
            };
            out.emit(path, pretty(&body));
        }
        Command::CheckInterp {
            hom,
            input,
            norms,
            out: path,
        } => {
            let t: PairHom = parse(&hom)?;
            let x = read_matrix(&input)?;
            let norms = if norms.is_empty() {
                DeltaNorm::builtins()
            } else {
                norms
                    .iter()
                    .map(|k| DeltaNorm::from_key(k))
                    .collect::<l0linf::Result<_>>()?
            };
            let interp = interpolation_check_with_tol(&t, &x, interp_rtol()?)?;
            let enorm = norms
                .iter()
                .map(|e| enorm_bound_check(&t, &x, e))
                .collect::<l0linf::Result<Vec<_>>>()?;
            out.ok = interp.holds && enorm.iter().all(|r| r.holds);
            out.emit(
                path,
                pretty(&json!({ "interpolation": interp, "enorm": enorm, "all_pass": out.ok })),
            );
        }
        Command::Korbit { x, a, out: path } => {
            let (x, a) = (read_input(&x)?, read_input(&a)?);
            let (mu_x, mu_a) = (x.singular_function()?, a.singular_function()?);
            let ko = korbit_norm(&mu_x, &mu_a)?;
            let pc = pointwise_constant(&mu_x, &mu_a)?;
            let body = json!({
                "korbit_norm": finite_or_null(ko),
                "korbit_bounded": ko.is_finite(),
                "pointwise_constant": pc,
            });
            out.emit(path, pretty(&body));
        }
        Command::Counterexample {
            tau1,
            tau2,
            k1,
            k2,
            w,
            out: path,
            curves_dir,
            points,
        } => {
            let spec = CounterexampleSpec::new(tau1, tau2, k1, k2)?;
            let ce = counterexample_with_weight(&spec, w)?;
            out.ok = ce.report.certified();
            out.stdout.push_str(&format!("{}\n", ce.report));
            if let Some(dir) = curves_dir {
                let total = tau1 + tau2;
                let grid = log_grid(1e-3 * total / k1, 1e3 * total / k1, points)?;
                out.files
                    .push((dir.join("k_A.csv"), k_curve_csv(&ce.a.mu_of()?, &grid)));
                out.files
                    .push((dir.join("k_X.csv"), k_curve_csv(&ce.x.mu_of()?, &grid)));
            }
            if let Some(p) = path {
                out.files.push((p, pretty(&json!({ "A": ce.a, "X": ce.x }))));
            }
        }
        Command::Transfer { a, x, out: path, seed } => {
            let (a, x) = (read_matrix(&a)?, read_matrix(&x)?);
            let plan = transfer::plan(&a, &x)?;
            let hom = transfer::build(&plan, &a, &x)?;
            let report = transfer::verify_with_seed(&hom, &a, &x, &plan, seed)?;
            out.ok = report.all_pass;
            out.stdout.push_str(&format!(
                "C = {}, pointwise constant = {}, M0 = {}, M1 = {}, checks {}\n",
                report.c,
                report.pointwise_constant,
                report.m0,
                report.m1,
                if report.all_pass { "passed" } else { "FAILED" }
            ));
            for c in report.checks.iter().filter(|c| !c.pass) {
                out.stdout.push_str(&format!(
                    "  failed {}: {} (tolerance {})\n",
                    c.name, c.value, c.tolerance
                ));
            }
            out.files
                .push((path, pretty(&json!({ "plan": plan, "hom": hom, "report": report }))));
        }
        Command::VerifySuite { seed, out: path } => {
            let report = run_suite(seed);
            out.ok = report.all_pass;
            out.emit(path, report.to_json());
        }
    }
    Ok(out)
}

/// Writes through a sibling temporary file so readers never see partial output.
fn write_atomic(path: &Path, body: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, body).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli).and_then(|o| {
        for (path, body) in &o.files {
            write_atomic(path, body)?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(o.stdout.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(3);
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
