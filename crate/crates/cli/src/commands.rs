//! The subcommands. Each takes a validated configuration and returns a
//! report; the caller writes it and maps the status to an exit code.

use std::path::{Path, PathBuf};

use logunimodal::analytic::{HalfPlaneGrid, ImSpacing};
use logunimodal::criteria::{
    case2_gap_check, d_bound, default_r_sweep, first_gap_certificate, gap_certificate, theta_sweep,
};
use logunimodal::unimodality::{
    is_log_unimodal, is_log_unimodal_curve, lambda_strong_check, pick_inequality_check, ModeReport, PickReport,
    Verdict,
};
use logunimodal::zhong::GridSpec;
use logunimodal::{DensityCurve, Error, Family, GridDensity, MeasureSpec, Tolerances, ZhongContext};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config_io::{
    curve_csv, num, table_csv, write_atomic, Check, ConfigError, ResolvedMeasure, ScenarioConfig, SCHEMA_VERSION,
};

/// Relative tolerance of the mean identity check.
pub const MEAN_REL_TOL: f64 = 1e-3;
/// Sup-norm tolerance of the evenness check on log-pushforwards.
pub const SYMMETRY_TOL: f64 = 1e-3;
/// Violating points listed in a Pick report.
const LISTED_VIOLATIONS: usize = 10;

/// Outcome of a run, ordered by how it combines: a numeric failure
/// dominates a negative verdict, which dominates an inconclusive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Inconclusive,
    Negative,
    ConfigError,
    NumericFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Negative => 1,
            Status::ConfigError => 2,
            Status::NumericFailure => 3,
            Status::Inconclusive => 4,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 1,
            Status::Negative => 2,
            Status::ConfigError => 3,
            Status::NumericFailure => 4,
        }
    }

    pub fn combine(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    fn of(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Negative
        }
    }

    fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Unimodal => Status::Pass,
            Verdict::NotUnimodal => Status::Negative,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

/// Failure that ends a command early.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Numeric { op: String, error: Error },
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Numeric { op, error } => write!(f, "{op} failed: {error}"),
        }
    }
}

impl Failure {
    pub fn status(&self) -> Status {
        match self {
            Failure::Config(_) => Status::ConfigError,
            Failure::Numeric { .. } => Status::NumericFailure,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn numeric<T>(op: &str, r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|error| Failure::Numeric { op: op.to_string(), error })
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    /// The configuration as run; feeding it back reproduces the report.
    pub inputs: ScenarioConfig,
    pub tolerances: Tolerances<f64>,
    pub status: Status,
    pub exit_code: i32,
    pub results: Value,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    /// Wall-clock seconds; recorded only on request so that reports stay
    /// byte-identical across runs.
    pub timing: Option<f64>,
}

/// Where a command writes its files.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
}

struct Run<'a> {
    cfg: &'a ScenarioConfig,
    ctx: &'a RunContext,
    tol: Tolerances<f64>,
    measure: ResolvedMeasure,
    warnings: Vec<String>,
    files: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a ScenarioConfig, ctx: &'a RunContext) -> Result<Self, Failure> {
        cfg.validate()?;
        let tol = cfg.tolerances.effective()?;
        let measure = cfg.measure.resolve(&tol)?;
        Ok(Self { cfg, ctx, tol, measure, warnings: Vec::new(), files: Vec::new() })
    }

    fn nu(&self) -> &MeasureSpec<f64> {
        &self.measure.spec
    }

    /// Configured CSV path, with `_t<t>` inserted when several times share it.
    fn csv_path(&self, command: &str, t: Option<f64>) -> PathBuf {
        let tag = t.map(|t| format!("_t{t}")).unwrap_or_default();
        match &self.cfg.outputs.csv_path {
            Some(p) if self.cfg.times.len() <= 1 || t.is_none() => PathBuf::from(p),
            Some(p) => {
                let p = Path::new(p);
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                p.with_file_name(format!("{stem}{tag}.csv"))
            }
            None => self.ctx.out_dir.join(format!("{command}{tag}.csv")),
        }
    }

    fn write(&mut self, path: PathBuf, contents: &str) -> Result<(), Failure> {
        write_atomic(&path, contents)?;
        self.files.push(path.display().to_string());
        Ok(())
    }

    fn curve(&self, t: f64) -> Result<DensityCurve<f64>, Failure> {
        let zc = numeric("zhong context", ZhongContext::new(self.nu().clone(), t, self.tol))?;
        let spec = GridSpec { points: self.cfg.grid.points, window: self.cfg.grid.window.map(|[a, b]| (a, b)) };
        numeric("density_curve", zc.density_curve(&spec))
    }

    fn pick_grid(&self) -> Result<HalfPlaneGrid<f64>, Failure> {
        let p = &self.cfg.pick;
        HalfPlaneGrid::new((p.re[0], p.re[1], p.points[0]), (p.im[0], p.im[1], p.points[1]), ImSpacing::Log)
            .map_err(|e| Failure::Config(ConfigError::Invariant(format!("pick grid: {e}"))))
    }

    fn finish(self, command: &str, status: Status, results: Value) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: self.cfg.clone(),
            tolerances: self.tol,
            status,
            exit_code: status.exit_code(),
            results,
            warnings: self.warnings,
            files: self.files,
            timing: None,
        }
    }
}

fn mode_json(r: &ModeReport<f64>) -> Value {
    json!({
        "verdict": r.verdict,
        "modes": r.modes,
        "num_local_maxima": r.num_local_maxima,
        "max_level_crossings": r.max_level_crossings,
        "resolution": r.resolution,
        "hysteresis": r.tolerance,
    })
}

fn pick_json(r: &PickReport<f64>) -> Value {
    let listed: Vec<Value> = r
        .violations
        .iter()
        .take(LISTED_VIOLATIONS)
        .map(|(z, v)| json!({ "re": z.re, "im": z.im, "value": v }))
        .collect();
    json!({
        "holds": r.holds,
        "evidence": r.evidence,
        "mode": r.mode,
        "violation_count": r.violations.len(),
        "violations": listed,
        "extreme_value": r.extreme_value,
        "extreme_point": { "re": r.extreme_point.re, "im": r.extreme_point.im },
        "scale": r.scale,
        "tol_pick": r.tol_pick,
        "points": r.points,
    })
}

fn curve_summary(curve: &DensityCurve<f64>) -> Value {
    let m = curve.metadata();
    let support: Vec<[f64; 2]> = curve.support().intervals().iter().map(|&(a, b)| [a, b]).collect();
    json!({
        "points": curve.x().len(),
        "support": support,
        "components": support.len(),
        "window": [m.window.0, m.window.1],
        "v_components": m.v_components,
        "merged_gaps": m.merged_gaps,
        "lambda_monotone": m.lambda_monotone,
        "underresolved": m.underresolved,
        "empty_v_set": m.empty_v_set,
    })
}

fn checks_or(cfg: &ScenarioConfig, default: &[Check]) -> Vec<Check> {
    let mut c = if cfg.checks.is_empty() { default.to_vec() } else { cfg.checks.clone() };
    c.sort();
    c.dedup();
    c
}

/// Density curves for every `t`, written as CSV, with the requested checks.
pub fn cmd_density(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    cfg.require_times()?;
    let mut run = Run::new(cfg, ctx)?;
    let checks = checks_or(cfg, &[Check::Mass, Check::Mean, Check::Support, Check::Logunimodal]);
    let nu_mean = if run.nu().has_finite_mean() { Some(numeric("mean", run.nu().mean(&run.tol))?) } else { None };
    let symmetric = numeric("symmetry", run.nu().is_mult_symmetric(1e-6, run.tol.tol_tail))?;
    let mut status = Status::Pass;
    let mut per_t = Vec::new();
    for &t in &cfg.times {
        let curve = run.curve(t)?;
        let path = run.csv_path("density", Some(t));
        run.write(path.clone(), &curve_csv(&curve))?;
        let mut res = serde_json::Map::new();
        res.insert("t".into(), json!(t));
        res.insert("csv".into(), json!(path.display().to_string()));
        res.insert("curve".into(), curve_summary(&curve));
        let integral = curve.integral();
        res.insert("integral".into(), json!(integral));
        res.insert("mean".into(), json!(curve.mean()));
        let mut mode = None;
        for &check in &checks {
            let (key, value, st) = match check {
                Check::Mass => {
                    let ok = (integral - 1.0).abs() <= run.tol.tol_int;
                    ("mass", json!({ "integral": integral, "tol": run.tol.tol_int, "pass": ok }), Status::of(ok))
                }
                Check::Mean => match nu_mean {
                    Some(m) => {
                        let expect = (t / 2.0).exp() * m;
                        let rel = (curve.mean() / expect - 1.0).abs();
                        let ok = rel <= MEAN_REL_TOL;
                        let v = json!({ "mean": curve.mean(), "expected": expect, "relative_error": rel, "tol": MEAN_REL_TOL, "pass": ok });
                        ("mean", v, Status::of(ok))
                    }
                    None => ("mean", json!({ "applicable": false, "reason": "measure has no finite mean" }), Status::Pass),
                },
                Check::Symmetry => {
                    if symmetric {
                        let d = curve.log_pushforward().evenness_defect();
                        let ok = d <= SYMMETRY_TOL;
                        ("symmetry", json!({ "evenness_defect": d, "tol": SYMMETRY_TOL, "pass": ok }), Status::of(ok))
                    } else {
                        ("symmetry", json!({ "applicable": false, "reason": "measure is not multiplicatively symmetric" }), Status::Pass)
                    }
                }
                Check::Support => ("support", json!({ "components": curve.support().len() }), Status::Pass),
                Check::Logunimodal => {
                    if curve.support().is_empty() {
                        run.warnings.push(format!("t={t}: empty support, log-unimodality not assessed"));
                        ("logunimodal", json!({ "verdict": "inconclusive", "reason": "empty support" }), Status::Inconclusive)
                    } else {
                        let r = numeric("count_modes", is_log_unimodal_curve(&curve, cfg.mode_eps))?;
                        mode = r.modes.first().copied();
                        ("logunimodal", mode_json(&r), Status::of_verdict(r.verdict))
                    }
                }
                Check::Pick => {
                    let grid = numeric("curve grid", GridDensity::normalized(curve.x().to_vec(), curve.q().to_vec()))?;
                    let c = match cfg.pick.c.or(mode) {
                        Some(c) => c,
                        None => {
                            let r = numeric("count_modes", is_log_unimodal_curve(&curve, cfg.mode_eps))?;
                            r.modes.first().copied().unwrap_or(1.0)
                        }
                    };
                    let r = numeric("pick_inequality_check", pick_inequality_check(&MeasureSpec::Grid(grid), c, &run.pick_grid()?, &run.tol))?;
                    ("pick", pick_json(&r), Status::of(r.holds))
                }
                Check::ThetaSweep => {
                    let rs = cfg.sweep.r_values.clone().unwrap_or_else(|| default_r_sweep(cfg.sweep.r_count));
                    let window = cfg.sweep.window.map(|[a, b]| (a, b));
                    let s = numeric("theta_sweep", theta_sweep(run.nu(), t, Some(rs), window, cfg.sweep.grid, &run.tol))?;
                    let v = json!({ "max_count": s.max_count, "verdict": s.verdict, "boundary": s.boundary.iter().any(|&b| b) });
                    ("theta_sweep", v, Status::of(s.verdict))
                }
                Check::Strong => {
                    run.warnings.push("the strong check applies to the `check` command only".into());
                    continue;
                }
            };
            status = status.combine(st);
            res.insert(key.into(), value);
        }
        per_t.push(Value::Object(res));
    }
    let results = json!({ "measure_mean": nu_mean, "multiplicatively_symmetric": symmetric, "runs": per_t });
    Ok(run.finish("density", status, results))
}

/// Log-unimodality of the measure itself, its Pick certificate and, for
/// the λ_b family, strong log-unimodality.
pub fn cmd_check(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    let mut run = Run::new(cfg, ctx)?;
    let checks = checks_or(cfg, &[Check::Logunimodal, Check::Pick, Check::Strong]);
    let lambda_b = match cfg.measure.family() {
        Some(Family::Lambda { b }) => Some(b),
        _ => None,
    };
    let mut status = Status::Pass;
    let mut res = serde_json::Map::new();
    let needs_mode = checks.contains(&Check::Logunimodal) || (checks.contains(&Check::Pick) && cfg.pick.c.is_none());
    let mode_report = if needs_mode { Some(numeric("is_log_unimodal", is_log_unimodal(run.nu(), cfg.mode_eps, &run.tol))?) } else { None };
    for &check in &checks {
        match check {
            Check::Logunimodal => {
                let r = mode_report.as_ref().expect("computed above");
                status = status.combine(Status::of_verdict(r.verdict));
                res.insert("logunimodal".into(), mode_json(r));
            }
            Check::Pick => {
                let c = match cfg.pick.c {
                    Some(c) => c,
                    None => *mode_report.as_ref().and_then(|r| r.modes.first()).ok_or_else(|| {
                        Failure::Numeric { op: "pick_inequality_check".into(), error: Error::DegenerateInput("no mode detected".into()) }
                    })?,
                };
                let r = numeric("pick_inequality_check", pick_inequality_check(run.nu(), c, &run.pick_grid()?, &run.tol))?;
                status = status.combine(Status::of(r.holds));
                res.insert("pick".into(), pick_json(&r));
            }
            Check::Strong => match lambda_b {
                Some(b) => {
                    let r = numeric("lambda_strong_check", lambda_strong_check(b))?;
                    status = status.combine(Status::of(r.strongly_log_unimodal));
                    res.insert("strong".into(), serde_json::to_value(r).expect("plain data"));
                }
                None => {
                    if !cfg.checks.is_empty() {
                        run.warnings.push("strong check skipped: measure is not a lambda family".into());
                    }
                }
            },
            other => run.warnings.push(format!("check `{}` does not apply to the `check` command", check_name(other))),
        }
    }
    Ok(run.finish("check", status, Value::Object(res)))
}

fn check_name(c: Check) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

/// Solution counts of `Θ_R(r) = 1/t` over an `R` sweep, with the bound
/// `D_{α,β}` when the support bounds satisfy its hypothesis.
pub fn cmd_sweep(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    cfg.require_times()?;
    let mut run = Run::new(cfg, ctx)?;
    let (lo, hi) = run.nu().support_hull();
    let alpha = cfg.sweep.alpha.or((lo > 0.0).then_some(lo));
    let beta = cfg.sweep.beta.or(hi.is_finite().then_some(hi));
    let mut bound = Value::Null;
    let mut d = None;
    if let (Some(a), Some(b)) = (alpha, beta) {
        if a < b {
            match d_bound(a, b) {
                Ok(v) => {
                    d = Some(v);
                    bound = json!({ "alpha": a, "beta": b, "d": v });
                }
                Err(e) => {
                    run.warnings.push(format!("D bound unavailable for alpha={a}, beta={b}: {e}"));
                    bound = json!({ "alpha": a, "beta": b, "d": null, "reason": e.to_string() });
                }
            }
        }
    }
    let rs = cfg.sweep.r_values.clone().unwrap_or_else(|| default_r_sweep(cfg.sweep.r_count));
    if let Some(bad) = rs.iter().find(|r| !(**r > 0.0 && **r < std::f64::consts::PI)) {
        return Err(ConfigError::Invariant(format!("sweep.r_values: {bad} is not in (0, pi)")).into());
    }
    let window = cfg.sweep.window.map(|[a, b]| (a, b));
    let mut status = Status::Pass;
    let mut rows = Vec::new();
    let mut per_t = Vec::new();
    for &t in &cfg.times {
        let s = numeric("theta_sweep", theta_sweep(run.nu(), t, Some(rs.clone()), window, cfg.sweep.grid, &run.tol))?;
        for i in 0..s.parameters.len() {
            rows.push(vec![
                num(t),
                num(s.parameters[i]),
                s.counts[i].to_string(),
                s.conservative_counts[i].to_string(),
                s.boundary[i].to_string(),
            ]);
        }
        let gap = match (alpha, beta) {
            (Some(a), Some(b)) if a <= b => {
                let g = numeric("case2_gap_check", case2_gap_check(run.nu(), (a, b), t, cfg.sweep.gap_samples, &run.tol))?;
                serde_json::to_value(g).expect("plain data")
            }
            _ => Value::Null,
        };
        status = status.combine(Status::of(s.verdict));
        per_t.push(json!({
            "t": t,
            "t_at_least_d": d.map(|d| t >= d),
            "max_count": s.max_count,
            "log_unimodal": s.verdict,
            "tangencies": s.boundary.iter().filter(|&&b| b).count(),
            "counts": s.counts,
            "locations": s.locations,
            "gap_check": gap,
        }));
    }
    let path = run.csv_path("sweep", None);
    run.write(path, &table_csv(&["t", "R", "count", "conservative_count", "boundary"], &rows))?;
    let results = json!({ "bound": bound, "r_values": rs, "runs": per_t });
    Ok(run.finish("sweep", status, results))
}

/// Gap certificates `f(b_k) < 1/t` for an atomic measure, with the density
/// curve's support components. Passes when every `t` has a certificate and
/// every computed curve is not log-unimodal.
pub fn cmd_counterexample(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    cfg.require_times()?;
    let mut run = Run::new(cfg, ctx)?;
    if run.nu().point_masses().is_none() {
        return Err(ConfigError::Invariant("counterexample: measure must be atomic".into()).into());
    }
    let mut status = Status::Pass;
    let mut per_t = Vec::new();
    for &t in &cfg.times {
        let cert = match cfg.certificate.k {
            Some(k) => Some(numeric("gap_certificate", gap_certificate(run.nu(), t, k, &run.tol))?),
            None => numeric("gap_certificate", first_gap_certificate(run.nu(), t, &run.tol))?,
        };
        let certified = cert.is_some_and(|c| c.below);
        status = status.combine(Status::of(certified));
        let mut entry = json!({ "t": t, "certificate": cert, "certified": certified });
        if cfg.certificate.curve {
            let curve = run.curve(t)?;
            let path = run.csv_path("counterexample", Some(t));
            run.write(path.clone(), &curve_csv(&curve))?;
            let r = numeric("count_modes", is_log_unimodal_curve(&curve, cfg.mode_eps))?;
            status = status.combine(Status::of(r.verdict == Verdict::NotUnimodal));
            entry["csv"] = json!(path.display().to_string());
            entry["curve"] = curve_summary(&curve);
            entry["logunimodal"] = mode_json(&r);
        }
        per_t.push(entry);
    }
    let results = json!({ "construction": run.measure.counterexample, "runs": per_t });
    Ok(run.finish("counterexample", status, results))
}

/// The Pick inequality for `x dμ(x)` at a candidate mode.
pub fn cmd_pick(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    let run = Run::new(cfg, ctx)?;
    let c = match cfg.pick.c {
        Some(c) => c,
        None => match run.nu().point_masses() {
            Some(a) if a.len() == 1 => a[0].location,
            Some(_) => return Err(ConfigError::Invariant("pick.c is required for atomic measures".into()).into()),
            None => {
                let r = numeric("is_log_unimodal", is_log_unimodal(run.nu(), cfg.mode_eps, &run.tol))?;
                r.modes[0]
            }
        },
    };
    let r = numeric("pick_inequality_check", pick_inequality_check(run.nu(), c, &run.pick_grid()?, &run.tol))?;
    let status = Status::of(r.holds);
    Ok(run.finish("pick", status, json!({ "pick": pick_json(&r) })))
}

pub fn run_command(command: &str, cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Report, Failure> {
    match command {
        "density" => cmd_density(cfg, ctx),
        "check" => cmd_check(cfg, ctx),
        "sweep" => cmd_sweep(cfg, ctx),
        "counterexample" => cmd_counterexample(cfg, ctx),
        "pick" => cmd_pick(cfg, ctx),
        other => Err(ConfigError::Parse(format!("unknown command `{other}`")).into()),
    }
}
