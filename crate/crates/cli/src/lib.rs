//! Command-line front end: scenario configs in, density curves, verdicts
//! and reports out.
//!
//! Exit codes: 0 pass, 1 negative verdict, 2 configuration error,
//! 3 numerical failure, 4 inconclusive.

pub mod commands;
pub mod config_io;
pub mod scenario;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::{run_command, Failure, RunContext, Status};
use config_io::{load_config, load_measure_arg, ConfigError, MeasureConfig, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "logunimodal", version, about = "Densities of free multiplicative Brownian motion and log-unimodality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density curves of the free multiplicative Brownian motion started at a measure.
    Density(Common),
    /// Log-unimodality, Pick and strong checks of the measure itself.
    Check {
        #[command(flatten)]
        common: Common,
        /// Candidate mode for the Pick check (default: detected mode).
        #[arg(long)]
        c: Option<f64>,
    },
    /// Solution counts of the Θ_R equation over a sweep of R.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Explicit R values in (0, pi).
        #[arg(long = "r-values", value_delimiter = ',')]
        r_values: Option<Vec<f64>>,
        #[arg(long = "r-count")]
        r_count: Option<usize>,
        /// r samples per count.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Truncated atomic counterexample with gap certificates.
    Counterexample {
        #[command(flatten)]
        common: Common,
        /// Number of atoms when no measure is given.
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// 1-based gap index (default: first certified gap).
        #[arg(long)]
        k: Option<usize>,
        /// Skip the density curves.
        #[arg(long = "no-curve")]
        no_curve: bool,
    },
    /// Pick inequality for x dμ(x) on a half-plane grid.
    Pick {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Run a scenario file or a built-in scenario (theorem42, short_uniform, theorem45).
    Scenario {
        scenario: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario configuration (TOML, or JSON as echoed in reports).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Measure file or inline table, e.g. 'kind="named", family="gamma", params={p=2, theta=1}'.
    #[arg(long)]
    pub measure: Option<String>,
    /// Comma-separated times.
    #[arg(long = "t", value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Search window `lo,hi` in r.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub window: Option<Vec<f64>>,
    /// Comma-separated checks (mass, mean, symmetry, logunimodal, pick, theta_sweep, support, strong).
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long = "tol-root")]
    pub tol_root: Option<f64>,
    #[arg(long = "tol-quad")]
    pub tol_quad: Option<f64>,
    /// Accepted for compatibility; every run is deterministic.
    #[arg(long)]
    pub seedless: bool,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

impl Common {
    fn config(&self, default_measure: Option<MeasureConfig>) -> Result<ScenarioConfig, ConfigError> {
        let mut cfg = match (&self.config, &self.measure) {
            (Some(path), _) => load_config(path)?,
            (None, Some(m)) => ScenarioConfig::new(load_measure_arg(m)?),
            (None, None) => match default_measure {
                Some(m) => ScenarioConfig::new(m),
                None => return Err(ConfigError::Parse("either --config or --measure is required".into())),
            },
        };
        if self.config.is_some() {
            if let Some(m) = &self.measure {
                cfg.measure = load_measure_arg(m)?;
            }
        }
        if let Some(t) = &self.t {
            cfg.times = t.clone();
        }
        if let Some(p) = self.points {
            cfg.grid.points = p;
        }
        if let Some(w) = &self.window {
            match w.as_slice() {
                [lo, hi] => cfg.grid.window = Some([*lo, *hi]),
                _ => return Err(ConfigError::Parse("--window expects `lo,hi`".into())),
            }
        }
        if let Some(c) = &self.checks {
            let list = format!("checks = [{}]", c.iter().map(|s| format!("\"{}\"", s.trim())).collect::<Vec<_>>().join(", "));
            #[derive(serde::Deserialize)]
            struct Checks {
                checks: Vec<config_io::Check>,
            }
            cfg.checks = toml::from_str::<Checks>(&list).map_err(|e| ConfigError::Parse(format!("--checks: {e}")))?.checks;
        }
        if self.tol_root.is_some() {
            cfg.tolerances.tol_root = self.tol_root;
        }
        if self.tol_quad.is_some() {
            cfg.tolerances.tol_quad = self.tol_quad;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(name: &str, cfg: Result<ScenarioConfig, ConfigError>, out: &Path, timing: bool) -> i32 {
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Status::ConfigError.exit_code();
        }
    };
    let ctx = RunContext { out_dir: out.to_path_buf() };
    let start = Instant::now();
    match run_command(name, &cfg, &ctx) {
        Ok(mut report) => {
            if timing {
                report.timing = Some(start.elapsed().as_secs_f64());
            }
            let path = match &cfg.outputs.report_path {
                Some(p) => PathBuf::from(p),
                None => out.join(format!("{name}_report.json")),
            };
            if let Err(e) = scenario::write_report(&report, &path) {
                eprintln!("error: {e}");
                return Status::NumericFailure.exit_code();
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{name}: {:?} (exit {}), report {}", report.status, report.exit_code, path.display());
            report.exit_code
        }
        Err(f) => {
            eprintln!("error: {f}");
            if let Failure::Numeric { .. } = f {
                let t = cfg.tolerances.effective().unwrap_or_default();
                eprintln!("tolerances: tol_root={:e}, tol_quad={:e}, tol_tail={:e}", t.tol_root, t.tol_quad, t.tol_tail);
            }
            f.status().exit_code()
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::ConfigError.exit_code() } else { 0 };
        }
    };
    match cli.command {
        Command::Density(common) => execute("density", common.config(None), &common.out, common.timing),
        Command::Check { common, c } => {
            let cfg = common.config(None).map(|mut cfg| {
                cfg.pick.c = c.or(cfg.pick.c);
                cfg
            });
            execute("check", cfg, &common.out, common.timing)
        }
        Command::Sweep { common, alpha, beta, r_values, r_count, grid } => {
            let cfg = common.config(None).and_then(|mut cfg| {
                cfg.sweep.alpha = alpha.or(cfg.sweep.alpha);
                cfg.sweep.beta = beta.or(cfg.sweep.beta);
                if r_values.is_some() {
                    cfg.sweep.r_values = r_values;
                }
                cfg.sweep.r_count = r_count.unwrap_or(cfg.sweep.r_count);
                cfg.sweep.grid = grid.unwrap_or(cfg.sweep.grid);
                cfg.validate()?;
                Ok(cfg)
            });
            execute("sweep", cfg, &common.out, common.timing)
        }
        Command::Counterexample { common, n, k, no_curve } => {
            let cfg = common.config(Some(MeasureConfig::Example48 { n, inverted: false })).map(|mut cfg| {
                cfg.certificate.k = k.or(cfg.certificate.k);
                cfg.certificate.curve = cfg.certificate.curve && !no_curve;
                cfg
            });
            execute("counterexample", cfg, &common.out, common.timing)
        }
        Command::Pick { common, c } => {
            let cfg = common.config(None).map(|mut cfg| {
                cfg.pick.c = c.or(cfg.pick.c);
                cfg
            });
            execute("pick", cfg, &common.out, common.timing)
        }
        Command::Scenario { scenario: arg, out, timing } => {
            let s = match scenario::load_scenario(&arg) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Status::ConfigError.exit_code();
                }
            };
            let start = Instant::now();
            match scenario::run_scenario(&s, &RunContext { out_dir: out.clone() }) {
                Ok(r) => {
                    for run in &r.runs {
                        let note = run.error.as_deref().unwrap_or("");
                        println!(
                            "{} run {} {}: {:?}, expected {:?}, {} {note}",
                            s.name,
                            run.index,
                            run.command,
                            run.status,
                            run.expect,
                            if run.matched { "ok" } else { "MISMATCH" }
                        );
                    }
                    if timing {
                        println!("{}: {:.1}s", s.name, start.elapsed().as_secs_f64());
                    }
                    println!("{}: {:?} (exit {})", s.name, r.status, r.exit_code);
                    r.exit_code
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Status::NumericFailure.exit_code()
                }
            }
        }
    }
}
