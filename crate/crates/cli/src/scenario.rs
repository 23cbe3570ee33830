//! Bundles of runs with expected outcomes, including the built-in ones.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::{run_command, Report, RunContext, Status};
use crate::config_io::{to_json, write_atomic, ConfigError, ScenarioConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Negative,
    Inconclusive,
}

impl Expect {
    fn status(self) -> Status {
        match self {
            Expect::Pass => Status::Pass,
            Expect::Negative => Status::Negative,
            Expect::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub run: Vec<RunSpec>,
}

pub const THEOREM42: &str = r#"
schema_version = 1
name = "theorem42"
description = "A multiplicatively symmetric, strongly log-unimodal lambda_b stays log-unimodal under the free multiplicative Brownian motion"

[[run]]
command = "density"
expect = "pass"
[run.config]
schema_version = 1
times = [0.25, 1.0, 4.0]
checks = ["mass", "symmetry", "logunimodal", "support"]
[run.config.measure]
kind = "named"
family = "lambda"
params = { b = 1.5707963267948966 }
"#;

pub const SHORT_UNIFORM: &str = r#"
schema_version = 1
name = "short_uniform"
description = "Uniform law on a short interval: at t above the bound D every equation has at most two solutions"

[[run]]
command = "sweep"
expect = "pass"
[run.config]
schema_version = 1
times = [22.0]
[run.config.measure]
kind = "named"
family = "uniform"
params = { alpha = 1.0, beta = 1.1 }

[[run]]
command = "density"
expect = "pass"
[run.config]
schema_version = 1
times = [22.0]
checks = ["mass", "logunimodal"]
[run.config.measure]
kind = "named"
family = "uniform"
params = { alpha = 1.0, beta = 1.1 }
"#;

pub const THEOREM45: &str = r#"
schema_version = 1
name = "theorem45"
description = "Atoms at n^-4 with weights proportional to n^-6: the support splits and log-unimodality fails for every t"

[[run]]
command = "counterexample"
expect = "pass"
[run.config]
schema_version = 1
times = [0.5, 1.0, 2.0]
[run.config.measure]
kind = "example48"
n = 30

[[run]]
command = "density"
expect = "negative"
[run.config]
schema_version = 1
times = [0.5, 1.0, 2.0]
checks = ["mass", "support", "logunimodal"]
[run.config.measure]
kind = "example48"
n = 30
"#;

pub const BUILTINS: &[(&str, &str)] = &[("theorem42", THEOREM42), ("short_uniform", SHORT_UNIFORM), ("theorem45", THEOREM45)];

pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let s: Scenario = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if s.schema_version != SCHEMA_VERSION {
        return Err(ConfigError::Parse(format!("schema_version: {} is not supported", s.schema_version)));
    }
    if s.run.is_empty() {
        return Err(ConfigError::Invariant("run: a scenario needs at least one run".into()));
    }
    for (i, r) in s.run.iter().enumerate() {
        r.config.validate().map_err(|e| ConfigError::Invariant(format!("run[{i}]: {e}")))?;
    }
    Ok(s)
}

/// A built-in name or a path to a scenario file.
pub fn load_scenario(arg: &str) -> Result<Scenario, ConfigError> {
    if let Some((_, text)) = BUILTINS.iter().find(|(n, _)| *n == arg) {
        return parse_scenario(text);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: arg.to_string(),
        message: format!("{e} (built-in scenarios: {})", BUILTINS.iter().map(|b| b.0).collect::<Vec<_>>().join(", ")),
    })?;
    parse_scenario(&text)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub index: usize,
    pub command: String,
    pub status: Status,
    pub expect: Option<Expect>,
    pub matched: bool,
    pub report: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub status: Status,
    pub exit_code: i32,
    pub runs: Vec<RunOutcome>,
}

/// Runs every entry in order, writing each report as soon as it is ready.
/// A run that fails stops the scenario; the summary written so far is kept.
/// With expectations the scenario passes when all are met and is negative
/// otherwise; runs without one contribute their own status.
pub fn run_scenario(s: &Scenario, ctx: &RunContext) -> Result<ScenarioReport, ConfigError> {
    let base = ctx.out_dir.join(&s.name);
    let mut runs = Vec::new();
    let mut status = Status::Pass;
    for (i, spec) in s.run.iter().enumerate() {
        let dir = base.join(format!("{:02}_{}", i + 1, spec.command));
        let sub = RunContext { out_dir: dir.clone() };
        let outcome = run_command(&spec.command, &spec.config, &sub);
        let (st, report_path, error) = match outcome {
            Ok(report) => {
                let path = dir.join("report.json");
                write_report(&report, &path)?;
                (report.status, Some(path.display().to_string()), None)
            }
            Err(f) => (f.status(), None, Some(f.to_string())),
        };
        let matched = spec.expect.map(|e| e.status() == st).unwrap_or(true);
        let contribution = match (spec.expect, st) {
            (_, Status::ConfigError | Status::NumericFailure) => st,
            (Some(_), _) => Status::of_match(matched),
            (None, st) => st,
        };
        status = status.combine(contribution);
        let stop = error.is_some();
        runs.push(RunOutcome { index: i + 1, command: spec.command.clone(), status: st, expect: spec.expect, matched, report: report_path, error });
        let summary = ScenarioReport { schema_version: SCHEMA_VERSION, scenario: s.clone(), status, exit_code: status.exit_code(), runs: runs.clone() };
        write_atomic(&base.join("scenario_report.json"), &to_json(&summary)?)?;
        if stop {
            break;
        }
    }
    Ok(ScenarioReport { schema_version: SCHEMA_VERSION, scenario: s.clone(), status, exit_code: status.exit_code(), runs })
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), ConfigError> {
    write_atomic(path, &to_json(report)?)
}

impl Status {
    fn of_match(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Negative
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for (name, text) in BUILTINS {
            let s = parse_scenario(text).unwrap();
            assert_eq!(&s.name, name);
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_scenario("/nonexistent/scenario.toml"), Err(ConfigError::Io { .. })));
    }
}
