//! Argument parsing and dispatch for the `windowgap` binary.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use windowgap::asymptotics::{default_grid, sandwich_report, sweep, SweepResult, UpperPoint, Verdict};
use windowgap::chain::{build_chain, ConstantChain};
use windowgap::fd::{fd_ground_state, GridSpec};
use windowgap::lemmas::{lemma1, lemma2, lemma3_gap, lemma4_constant_with_beta};
use windowgap::modematch::{DEFAULT_MAX_MODES, DEFAULT_TOL};
use windowgap::varbound::optimize_trial;
use windowgap::{solve_ground_state, Error, ErrorClass, Geometry, GeometryConfig, SolveOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Worker threads for sweeps; unset or 0 means one per core.
pub const THREADS_ENV: &str = "WINDOWGAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "windowgap", version, about = "Bound states of Dirichlet strips coupled through a window")]
pub struct Cli {
    /// Plain-text geometry file with `d1`, `d2`, `a` entries; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Add a version and timestamp header to the output.
    #[arg(long, global = true)]
    pub metadata: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub d1: Option<f64>,
    /// Width of the second strip; 0 or absent selects the half-strip.
    #[arg(long)]
    pub d2: Option<f64>,
    /// Window half-width.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_MODES)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Ground state by mode matching.
    Solve {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Gap over a list of windows, as CSV.
    Sweep {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated, increasing; defaults to 0.02 sqrt(2)^k, k = 0..6.
        #[arg(long, value_delimiter = ',')]
        a_values: Option<Vec<f64>>,
    },
    /// Optimized trial-function bound.
    BoundUpper {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Evaluate at several windows and emit an array.
        #[arg(long, value_delimiter = ',')]
        a_values: Option<Vec<f64>>,
    },
    /// Constants of the lower bound.
    BoundLowerConstants {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        a_max: f64,
    },
    /// One-dimensional inequality oracles.
    Lemma {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long, default_value_t = PI / 8.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 0.05)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Grid cells.
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Finite-difference cross-check with Richardson extrapolation in `h`.
    OracleFd {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, default_value_t = 1.0 / 160.0)]
        h: f64,
        /// Half-length of the truncated domain.
        #[arg(long = "X", alias = "x-extent", default_value_t = 6.0)]
        x_extent: f64,
    },
    /// Power-law fit of a sweep CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Two-sided quartic check from a sweep, upper bounds and the constant chain.
    Sandwich {
        #[arg(long)]
        sweep: PathBuf,
        /// JSON from `bound-upper`, a single object or an array.
        #[arg(long)]
        upper: PathBuf,
        /// JSON from `bound-lower-constants`.
        #[arg(long)]
        chain: PathBuf,
    },
}

/// Validated run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Resolved geometry for the commands that take one.
    pub geometry: Option<Geometry>,
    pub output: Option<PathBuf>,
    pub metadata: bool,
    pub threads: usize,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Validation => EXIT_VALIDATION,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: message.into(),
    }
}

fn resolve_geometry(config: Option<&PathBuf>, args: &GeometryArgs, fallback_a: Option<f64>) -> Result<Geometry, Failure> {
    let mut cfg = match config {
        Some(p) => GeometryConfig::from_file(p)?,
        None => GeometryConfig::default(),
    };
    cfg.d1 = args.d1.or(cfg.d1);
    cfg.d2 = args.d2.or(cfg.d2);
    cfg.a = args.a.or(cfg.a).or(fallback_a);
    let d1 = cfg.d1.ok_or_else(|| invalid("missing d1 (flag --d1 or config key)"))?;
    let a = cfg.a.ok_or_else(|| invalid("missing a (flag --a or config key)"))?;
    Ok(Geometry::new(d1, cfg.d2.unwrap_or(0.0), a)?)
}

fn threads_from_env() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{THREADS_ENV} must be a nonnegative integer, got `{v}`"))),
        _ => Ok(0),
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, Failure> {
        let geometry = match &cli.command {
            Command::Solve { geometry, .. } | Command::OracleFd { geometry, .. } => {
                Some(resolve_geometry(cli.config.as_ref(), geometry, None)?)
            }
            Command::Sweep { geometry, a_values, .. } | Command::BoundUpper { geometry, a_values } => {
                let first = a_values.as_ref().and_then(|v| v.first().copied());
                let fallback = first.or_else(|| default_grid().first().copied());
                Some(resolve_geometry(cli.config.as_ref(), geometry, fallback)?)
            }
            _ => None,
        };
        Ok(RunConfig {
            command: cli.command,
            geometry,
            output: cli.output,
            metadata: cli.metadata,
            threads: threads_from_env()?,
        })
    }
}

enum Payload {
    Json(Value),
    Csv(SweepResult),
}

struct Outcome {
    payload: Payload,
    code: i32,
}

impl Outcome {
    fn ok(v: Value) -> Self {
        Outcome {
            payload: Payload::Json(v),
            code: EXIT_OK,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn upper_points(v: &Value) -> Result<Vec<UpperPoint>, Failure> {
    let items = match v {
        Value::Array(items) => items.clone(),
        other => vec![other.clone()],
    };
    items
        .iter()
        .map(|item| serde_json::from_value::<UpperPoint>(item.clone()).map_err(|e| invalid(format!("upper bound entry: {e}"))))
        .collect()
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let geometry = || cfg.geometry.ok_or_else(|| invalid("this command needs a geometry"));
    match &cfg.command {
        Command::Solve { solver, .. } => {
            let g = geometry()?;
            match solve_ground_state(&g, solver.tol, solver.n_max)? {
                SolveOutcome::Bound(r) => Ok(Outcome::ok(json!({
                    "E": r.energy,
                    "gap": r.gap,
                    "residual": r.residual,
                    "n_modes": r.n_modes,
                    "truncation_error": r.truncation_error,
                }))),
                SolveOutcome::Unresolved(why) => Ok(Outcome {
                    payload: Payload::Json(json!({ "E": null, "gap": null, "unresolved": to_value(&why) })),
                    code: EXIT_NUMERICAL,
                }),
            }
        }
        Command::Sweep { solver, a_values, .. } => {
            let g = geometry()?;
            let grid = a_values.clone().unwrap_or_else(default_grid);
            let s = sweep(&g, &grid, solver.tol, solver.n_max, cfg.threads)?;
            Ok(Outcome {
                payload: Payload::Csv(s),
                code: EXIT_OK,
            })
        }
        Command::BoundUpper { a_values, .. } => {
            let g = geometry()?;
            let one = |g: &Geometry| -> Result<Value, Failure> {
                let b = optimize_trial(g)?;
                Ok(json!({
                    "a": g.a(),
                    "value": b.value,
                    "kappa": b.params.kappa,
                    "eta": b.params.eta,
                    "closed_form_value": b.closed_form_value,
                    "variant": to_value(&b.variant),
                }))
            };
            Ok(Outcome::ok(match a_values {
                Some(list) => Value::Array(
                    list.iter()
                        .map(|a| one(&g.with_window(*a)?))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => one(&g)?,
            }))
        }
        Command::BoundLowerConstants { d, a_max } => Ok(Outcome::ok(to_value(&build_chain(*d, *a_max)?))),
        Command::Lemma {
            which,
            m,
            alpha,
            b,
            d,
            a,
            beta,
            n,
        } => {
            let (v, pass) = match which {
                1 => {
                    let r = lemma1(*m, *alpha, *n)?;
                    (to_value(&r), (r.ratio - 1.0).abs() < 0.01)
                }
                2 => {
                    let r = lemma2(*b, *n)?;
                    (to_value(&r), (r.ratio - 1.0).abs() < 0.005)
                }
                3 => {
                    let r = lemma3_gap(*d, *n)?;
                    let thr = (PI / d).powi(2);
                    let v = json!({
                        "numeric": r.minimum,
                        "closed_form": thr,
                        "ratio": r.minimum / thr,
                        "epsilon2": r.epsilon2,
                        "constraint_overlap": r.constraint_overlap,
                        "reaches_stated_bound": r.reaches_stated_bound,
                        "route": to_value(&r.route),
                    });
                    (v, r.epsilon2 > 0.0)
                }
                _ => {
                    let r = lemma4_constant_with_beta(*m, *d, *a, *n, *beta)?;
                    (to_value(&r), r.numeric >= r.closed_form)
                }
            };
            Ok(Outcome {
                payload: Payload::Json(v),
                code: if pass { EXIT_OK } else { EXIT_CHECK_FAILED },
            })
        }
        Command::OracleFd { h, x_extent, .. } => {
            let r = fd_ground_state(&GridSpec::new(geometry()?, *h, *x_extent)?)?;
            Ok(Outcome::ok(json!({
                "E": r.energy,
                "h": r.h,
                "X": r.x_extent,
                "coarse": r.coarse.energy,
                "fine": r.fine.energy,
            })))
        }
        Command::Fit { input } => {
            let file = fs::File::open(input).map_err(|e| invalid(format!("{}: {e}", input.display())))?;
            let s = SweepResult::read_csv(file)?;
            match s.fit {
                Some(f) => Ok(Outcome::ok(to_value(&f))),
                None => Ok(Outcome {
                    payload: Payload::Json(json!({ "fit": null, "reason": "fewer than two resolved rows" })),
                    code: EXIT_NUMERICAL,
                }),
            }
        }
        Command::Sandwich { sweep, upper, chain } => {
            let file = fs::File::open(sweep).map_err(|e| invalid(format!("{}: {e}", sweep.display())))?;
            let s = SweepResult::read_csv(file)?;
            let upper = upper_points(&read_json(upper)?)?;
            let chain: ConstantChain =
                serde_json::from_value(read_json(chain)?).map_err(|e| invalid(format!("constant chain: {e}")))?;
            let rep = sandwich_report(&s, &upper, &chain)?;
            let code = if rep.verdict == Verdict::Pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Ok(Outcome {
                payload: Payload::Json(to_value(&rep)),
                code,
            })
        }
    }
}

fn metadata() -> (String, u64) {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    (env!("CARGO_PKG_VERSION").to_string(), stamp)
}

fn render(payload: Payload, with_metadata: bool) -> Result<Vec<u8>, Failure> {
    let mut out = Vec::new();
    match payload {
        Payload::Json(v) => {
            let v = if with_metadata {
                let (version, stamp) = metadata();
                json!({ "metadata": { "version": version, "timestamp": stamp }, "result": v })
            } else {
                v
            };
            serde_json::to_writer(&mut out, &v).expect("in-memory write");
            out.push(b'\n');
        }
        Payload::Csv(s) => {
            if with_metadata {
                let (version, stamp) = metadata();
                writeln!(out, "# windowgap {version} timestamp {stamp}").expect("in-memory write");
            }
            s.write_csv(&mut out)?;
        }
    }
    Ok(out)
}

/// Runs one command and writes its output; returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = dispatch(cfg).and_then(|o| Ok((render(o.payload, cfg.metadata)?, o.code)));
    let (bytes, code) = match result {
        Ok(v) => v,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let written = match &cfg.output {
        Some(p) => fs::write(p, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_VALIDATION;
    }
    code
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(cfg) => run(&cfg),
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("windowgap").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        fs::write(&path, "d1 = 1\nd2 = 1\na = 0.2\n").unwrap();
        let cfg = RunConfig::from_cli(parse(&["solve", "--config", path.to_str().unwrap(), "--a", "0.3"])).unwrap();
        let g = cfg.geometry.unwrap();
        assert_eq!((g.d1(), g.d2(), g.a()), (1.0, 1.0, 0.3));
    }

    #[test]
    fn missing_geometry_is_a_validation_error() {
        let err = RunConfig::from_cli(parse(&["solve", "--d1", "1"])).unwrap_err();
        assert_eq!(err.code, EXIT_VALIDATION);
        let err = RunConfig::from_cli(parse(&["solve", "--d1", "1", "--a", "2"])).unwrap_err();
        assert_eq!(err.code, EXIT_VALIDATION);
    }

    #[test]
    fn unknown_flag_and_bad_lemma() {
        assert_eq!(main_with_args(["windowgap", "solve", "--bogus"]), EXIT_VALIDATION);
        assert_eq!(main_with_args(["windowgap", "lemma", "--which", "5"]), EXIT_VALIDATION);
    }

    #[test]
    fn sweep_geometry_falls_back_to_the_first_window() {
        let cfg = RunConfig::from_cli(parse(&["sweep", "--d1", "1", "--a-values", "0.1,0.2"])).unwrap();
        assert_eq!(cfg.geometry.unwrap().a(), 0.1);
    }

    #[test]
    fn upper_points_accept_object_or_array() {
        let one = upper_points(&json!({"a": 0.1, "value": -0.01, "kappa": 1.0})).unwrap();
        assert_eq!(one, vec![UpperPoint { a: 0.1, value: -0.01 }]);
        let many = upper_points(&json!([{"a": 0.1, "value": -0.01}, {"a": 0.2, "value": -0.1}])).unwrap();
        assert_eq!(many.len(), 2);
        assert!(upper_points(&json!({"value": 1.0})).is_err());
    }
}
