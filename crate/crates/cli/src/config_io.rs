//! Scenario and measure files in, CSV curves and JSON reports out.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use logunimodal::criteria::{build_counterexample, CounterexampleRule, CounterexampleSpec};
use logunimodal::{DensityCurve, Family, GridDensity, MeasureSpec, Tolerances};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version of the configuration and report schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

fn io_err(path: &Path, e: std::io::Error) -> ConfigError {
    ConfigError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Measure description as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Named {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// `[weight, location]` pairs; weights must sum to 1.
    Atomic { atoms: Vec<[f64; 2]> },
    /// Density samples on strictly increasing abscissae.
    Grid { x: Vec<f64>, f: Vec<f64> },
    /// `w_n ∝ n⁻⁶` at `a_n = n⁻⁴`, truncated to `n` atoms.
    Example48 {
        #[serde(default = "default_truncation")]
        n: usize,
        #[serde(default)]
        inverted: bool,
    },
    /// Raw weights at strictly decreasing locations, renormalised.
    Counterexample { weights: Vec<f64>, locations: Vec<f64> },
}

fn default_truncation() -> usize {
    30
}

const FAMILIES: &[(&str, &[&str])] = &[
    ("dirac", &["c"]),
    ("lambda", &["b"]),
    ("half_normal", &["t"]),
    ("gamma", &["p", "theta"]),
    ("beta", &["p", "q"]),
    ("marchenko_pastur", &[]),
    ("marchenko_pastur_inverse", &[]),
    ("boolean_stable", &["alpha"]),
    ("uniform", &["alpha", "beta"]),
    ("lognormal", &["m", "s"]),
];

fn family_from(name: &str, params: &BTreeMap<String, f64>) -> Result<Family<f64>, ConfigError> {
    let (_, keys) = FAMILIES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| {
            let known: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
            ConfigError::Parse(format!("measure.family: unknown family `{name}` (known: {})", known.join(", ")))
        })?;
    if let Some(extra) = params.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(ConfigError::Parse(format!(
            "measure.params.{extra}: not a parameter of `{name}` (expected: {})",
            keys.join(", ")
        )));
    }
    let get = |k: &str| {
        params
            .get(k)
            .copied()
            .ok_or_else(|| ConfigError::Parse(format!("measure.params.{k}: required by `{name}`")))
    };
    Ok(match name {
        "dirac" => Family::Dirac { c: get("c")? },
        "lambda" => Family::Lambda { b: get("b")? },
        "half_normal" => Family::HalfNormal { t: get("t")? },
        "gamma" => Family::Gamma { p: get("p")?, theta: get("theta")? },
        "beta" => Family::Beta { p: get("p")?, q: get("q")? },
        "marchenko_pastur" => Family::MarchenkoPastur,
        "marchenko_pastur_inverse" => Family::MarchenkoPasturInverse,
        "boolean_stable" => Family::BooleanStable { alpha: get("alpha")? },
        "uniform" => Family::UniformInterval { alpha: get("alpha")?, beta: get("beta")? },
        "lognormal" => Family::LogNormal { m: get("m")?, s: get("s")? },
        _ => unreachable!("family list checked above"),
    })
}

/// A validated measure together with the description it came from.
#[derive(Debug, Clone)]
pub struct ResolvedMeasure {
    pub spec: MeasureSpec<f64>,
    pub counterexample: Option<CounterexampleSpec<f64>>,
}

impl MeasureConfig {
    pub fn resolve(&self, tol: &Tolerances<f64>) -> Result<ResolvedMeasure, ConfigError> {
        let inv = |e: logunimodal::Error| ConfigError::Invariant(format!("measure: {e}"));
        let plain = |spec| Ok(ResolvedMeasure { spec, counterexample: None });
        match self {
            MeasureConfig::Named { family, params } => plain(MeasureSpec::named(family_from(family, params)?).map_err(inv)?),
            MeasureConfig::Atomic { atoms } => {
                let total: f64 = atoms.iter().map(|a| a[0]).sum();
                if (total - 1.0).abs() > tol.tol_mass {
                    return Err(ConfigError::Invariant(format!(
                        "measure.atoms: mass {total} differs from 1 by more than tol_mass = {:e}",
                        tol.tol_mass
                    )));
                }
                let pairs: Vec<(f64, f64)> = atoms.iter().map(|a| (a[0], a[1])).collect();
                plain(MeasureSpec::atomic(&pairs, tol.tol_mass).map_err(inv)?)
            }
            MeasureConfig::Grid { x, f } => {
                plain(MeasureSpec::Grid(GridDensity::new(x.clone(), f.clone(), tol.tol_mass).map_err(inv)?))
            }
            MeasureConfig::Example48 { n, inverted } => {
                let (spec, info) = build_counterexample(*n, CounterexampleRule::Example48).map_err(inv)?;
                let spec = if *inverted { spec.invert(tol.tol_tail).map_err(inv)? } else { spec };
                Ok(ResolvedMeasure { spec, counterexample: Some(info) })
            }
            MeasureConfig::Counterexample { weights, locations } => {
                let rule = CounterexampleRule::Explicit { weights: weights.clone(), locations: locations.clone() };
                let (spec, info) = build_counterexample(weights.len(), rule).map_err(inv)?;
                Ok(ResolvedMeasure { spec, counterexample: Some(info) })
            }
        }
    }

    /// The closed-form family, if any.
    pub fn family(&self) -> Option<Family<f64>> {
        match self {
            MeasureConfig::Named { family, params } => family_from(family, params).ok(),
            _ => None,
        }
    }
}

/// Parses a measure file: the measure keys at top level.
pub fn parse_measure(text: &str) -> Result<MeasureConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// `--measure` accepts a path or an inline TOML table body such as
/// `kind = "named", family = "gamma", params = { p = 2, theta = 1 }`.
pub fn load_measure_arg(arg: &str) -> Result<MeasureConfig, ConfigError> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_measure(&fs::read_to_string(path).map_err(|e| io_err(path, e))?);
    }
    let wrapped = format!("measure = {{ {arg} }}");
    #[derive(Deserialize)]
    struct Inline {
        measure: MeasureConfig,
    }
    toml::from_str::<Inline>(&wrapped)
        .map(|i| i.measure)
        .map_err(|e| ConfigError::Parse(format!("--measure is neither a file nor an inline table: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

fn default_points() -> usize {
    2048
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: default_points(), window: None }
    }
}

/// Overrides of the default tolerance set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_quad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_int: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hysteresis: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_quad_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bracket_expansions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_boundary_iterations: Option<usize>,
}

impl ToleranceOverrides {
    pub fn effective(&self) -> Result<Tolerances<f64>, ConfigError> {
        let mut t = Tolerances::default();
        let pos = |name: &str, v: Option<f64>, slot: &mut f64| -> Result<(), ConfigError> {
            if let Some(v) = v {
                if !(v > 0.0 && v < 1.0) {
                    return Err(ConfigError::Invariant(format!("tolerances.{name}: {v} is not in (0, 1)")));
                }
                *slot = v;
            }
            Ok(())
        };
        pos("tol_mass", self.tol_mass, &mut t.tol_mass)?;
        pos("tol_quad", self.tol_quad, &mut t.tol_quad)?;
        pos("tol_tail", self.tol_tail, &mut t.tol_tail)?;
        pos("tol_root", self.tol_root, &mut t.tol_root)?;
        pos("tol_int", self.tol_int, &mut t.tol_int)?;
        pos("hysteresis", self.hysteresis, &mut t.hysteresis)?;
        let count = |name: &str, v: Option<usize>, slot: &mut usize| -> Result<(), ConfigError> {
            if let Some(v) = v {
                if v == 0 {
                    return Err(ConfigError::Invariant(format!("tolerances.{name}: must be positive")));
                }
                *slot = v;
            }
            Ok(())
        };
        count("max_quad_depth", self.max_quad_depth, &mut t.max_quad_depth)?;
        count("max_bracket_expansions", self.max_bracket_expansions, &mut t.max_bracket_expansions)?;
        count("max_boundary_iterations", self.max_boundary_iterations, &mut t.max_boundary_iterations)?;
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Mass,
    Mean,
    Symmetry,
    Logunimodal,
    Pick,
    ThetaSweep,
    Support,
    Strong,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
}

/// Parameters of the `Θ_R` solution count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Explicit `R` values; default is a clustered sweep of `r_count` values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<f64>>,
    #[serde(default = "default_r_count")]
    pub r_count: usize,
    /// Samples of `r` per count.
    #[serde(default = "default_count_grid")]
    pub grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// `R` samples per axis in the uniform lower bound check.
    #[serde(default = "default_gap_samples")]
    pub gap_samples: usize,
}

fn default_r_count() -> usize {
    64
}
fn default_count_grid() -> usize {
    4096
}
fn default_gap_samples() -> usize {
    32
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            beta: None,
            r_values: None,
            r_count: default_r_count(),
            grid: default_count_grid(),
            window: None,
            gap_samples: default_gap_samples(),
        }
    }
}

/// Half-plane grid for the Pick checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickConfig {
    /// Candidate mode; default is the detected mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_re")]
    pub re: [f64; 2],
    #[serde(default = "default_im")]
    pub im: [f64; 2],
    #[serde(default = "default_pick_points")]
    pub points: [usize; 2],
}

fn default_re() -> [f64; 2] {
    [-10.0, 10.0]
}
fn default_im() -> [f64; 2] {
    [1e-3, 10.0]
}
fn default_pick_points() -> [usize; 2] {
    [64, 64]
}

impl Default for PickConfig {
    fn default() -> Self {
        Self { c: None, re: default_re(), im: default_im(), points: default_pick_points() }
    }
}

/// Gap certificates for atomic measures.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// 1-based gap index; default is the first gap with a certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Also compute the density curve and its support components.
    #[serde(default = "yes")]
    pub curve: bool,
}

fn yes() -> bool {
    true
}

/// One run of a subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    /// Checks to run; empty means the command's default set.
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub outputs: OutputConfig,
    /// Relative hysteresis of the mode counter.
    #[serde(default = "default_mode_eps")]
    pub mode_eps: f64,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub pick: PickConfig,
    #[serde(default)]
    pub certificate: CertificateConfig,
}

fn default_mode_eps() -> f64 {
    1e-4
}

impl ScenarioConfig {
    pub fn new(measure: MeasureConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: None,
            measure,
            times: Vec::new(),
            grid: GridConfig { points: default_points(), window: None },
            checks: Vec::new(),
            tolerances: ToleranceOverrides::default(),
            outputs: OutputConfig::default(),
            mode_eps: default_mode_eps(),
            sweep: SweepConfig::default(),
            pick: PickConfig::default(),
            certificate: CertificateConfig { k: None, curve: true },
        }
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Parse(format!(
                "schema_version: {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if let Some(t) = self.times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(ConfigError::Invariant(format!("times: {t} is not a positive finite number")));
        }
        if self.grid.points < 64 {
            return Err(ConfigError::Invariant(format!("grid.points: {} < 64", self.grid.points)));
        }
        for (name, w) in [("grid.window", self.grid.window), ("sweep.window", self.sweep.window)] {
            if let Some([lo, hi]) = w {
                if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(ConfigError::Invariant(format!("{name}: [{lo}, {hi}] is not a positive interval")));
                }
            }
        }
        if !(self.mode_eps > 0.0 && self.mode_eps < 0.1) {
            return Err(ConfigError::Invariant(format!("mode_eps: {} is not in (0, 0.1)", self.mode_eps)));
        }
        if self.sweep.grid < 16 || self.sweep.r_count < 1 {
            return Err(ConfigError::Invariant("sweep: grid >= 16 and r_count >= 1 required".into()));
        }
        self.tolerances.effective()?;
        Ok(())
    }

    pub fn require_times(&self) -> Result<(), ConfigError> {
        if self.times.is_empty() {
            Err(ConfigError::Invariant("times: at least one t > 0 is required".into()))
        } else {
            Ok(())
        }
    }
}

/// Reads a scenario: TOML, or JSON when the extension is `.json` (the
/// `inputs` echo of a report is itself a valid JSON scenario).
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let cfg: ScenarioConfig = if is_json {
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?
    } else {
        parse_config(&text).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })?
    };
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Formats every float with 17 significant digits.
struct Digits17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats.
pub fn to_json<S: Serialize>(value: &S) -> Result<String, ConfigError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| ConfigError::Parse(format!("serialising report: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ConfigError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub const CURVE_HEADER: &str = "x,q,xq";

/// `x,q,xq` rows; header only when the curve has empty support.
pub fn curve_csv(curve: &DensityCurve<f64>) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    if curve.support().is_empty() {
        return out;
    }
    for (&x, &q) in curve.x().iter().zip(curve.q()) {
        out.push_str(&format!("{x:.16e},{q:.16e},{:.16e}\n", x * q));
    }
    out
}

pub fn write_curve_csv(curve: &DensityCurve<f64>, path: &Path) -> Result<(), ConfigError> {
    write_atomic(path, &curve_csv(curve))
}

/// Reads the `x` and `q` columns of a curve CSV back into a grid density.
pub fn read_curve_csv(path: &Path, tol: &Tolerances<f64>) -> Result<GridDensity<f64>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(ConfigError::Parse(format!("{}: expected header `{CURVE_HEADER}`", path.display())));
    }
    let (mut x, mut f) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| ConfigError::Parse(format!("{}:{}: {e}", path.display(), i + 2)))
        };
        if cols.len() != 3 {
            return Err(ConfigError::Parse(format!("{}:{}: expected 3 columns", path.display(), i + 2)));
        }
        x.push(num(cols[0])?);
        f.push(num(cols[1])?);
    }
    GridDensity::new(x, f, tol.tol_int).map_err(|e| ConfigError::Invariant(format!("{}: {e}", path.display())))
}

/// Plain CSV from a header and rows of already formatted cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_measure() {
        let m = parse_measure("kind = \"named\"\nfamily = \"gamma\"\nparams = { p = 2, theta = 1 }").unwrap();
        assert_eq!(m.family(), Some(Family::Gamma { p: 2.0, theta: 1.0 }));
    }

    #[test]
    fn atomic_mass_is_checked() {
        let m = parse_measure("kind = \"atomic\"\natoms = [[0.5, 1.0], [0.4, 2.0]]").unwrap();
        let e = m.resolve(&Tolerances::default()).unwrap_err();
        assert!(matches!(e, ConfigError::Invariant(ref s) if s.contains("mass")), "{e}");
    }

    #[test]
    fn lambda_parameter_domain() {
        let m = parse_measure("kind = \"named\"\nfamily = \"lambda\"\nparams = { b = 4 }").unwrap();
        let e = m.resolve(&Tolerances::default()).unwrap_err();
        assert!(matches!(e, ConfigError::Invariant(ref s) if s.contains("(0, pi)")), "{e}");
    }

    #[test]
    fn unknown_fields_are_errors() {
        assert!(parse_measure("kind = \"atomic\"\natoms = [[1.0, 1.0]]\nextra = 1").is_err());
        let e = parse_measure("kind = \"named\"\nfamily = \"gamma\"\nparams = { p = 2, theta = 1, k = 3 }")
            .unwrap()
            .resolve(&Tolerances::default())
            .unwrap_err();
        assert!(e.to_string().contains("measure.params.k"));
        let cfg = "schema_version = 1\ntimes = [1.0]\nbogus = true\n[measure]\nkind = \"named\"\nfamily = \"dirac\"\nparams = { c = 1 }";
        assert!(parse_config(cfg).is_err());
    }

    #[test]
    fn schema_version_is_enforced() {
        let cfg = "schema_version = 2\n[measure]\nkind = \"named\"\nfamily = \"dirac\"\nparams = { c = 1 }";
        assert!(matches!(parse_config(cfg), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn inline_measure() {
        let m = load_measure_arg("kind = \"named\", family = \"lambda\", params = { b = 1.0 }").unwrap();
        assert_eq!(m.family(), Some(Family::Lambda { b: 1.0 }));
        assert!(load_measure_arg("not a measure").is_err());
    }

    #[test]
    fn measure_round_trip() {
        let cases = [
            MeasureConfig::Named { family: "gamma".into(), params: [("p".into(), 2.5), ("theta".into(), 0.1)].into() },
            MeasureConfig::Atomic { atoms: vec![[0.25, 0.1], [0.75, 3.0]] },
            MeasureConfig::Grid { x: vec![1.0, 1.5, 2.0], f: vec![1.0 / 3.0, 1.0, 1.0 / 3.0 + 0.1] },
            MeasureConfig::Example48 { n: 12, inverted: true },
        ];
        for m in cases {
            let text = toml::to_string(&m).unwrap();
            assert_eq!(parse_measure(&text).unwrap(), m, "{text}");
            let json = to_json(&m).unwrap();
            assert_eq!(serde_json::from_str::<MeasureConfig>(&json).unwrap(), m);
        }
    }

    #[test]
    fn seventeen_digits() {
        let s = to_json(&vec![0.1f64, 1.0 / 3.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
    }
}
