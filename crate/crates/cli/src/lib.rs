//! Library side of the `hardy` command-line tool: run configuration,
//! sequence files, report assembly and seeded fuzzing.

mod error;
mod fuzz;
mod io;

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hardy_core::{
    check_condition, classical_weight, copson_constant, copson_pair, copson_verify, copson_weight, cp_lower_constant,
    fkp_weight, hardy_weight, muckenhoupt_constant, power_weight, stability_report, verify_identity,
    verify_inequality, Exponent, Exponent64, FamilyParams, Power, Tabulated, VerificationReport64,
    WeightPair64, DEFAULT_ABS_TOL,
};
use serde::Serialize;
use serde_json::{json, Value};

pub use error::{CliError, ErrorRecord, Result};
pub use fuzz::{fuzz, FuzzSummary, GENERATOR};
pub use io::{load_sequence, load_sequence_file, save_sequence, SequenceFile, SCHEMA_VERSION};

/// Bracket width requested for `c₁(p)` by `constants`.
pub const C1_TOL: f64 = 1e-9;
/// Largest `r` in the Muckenhoupt supremum reported by `constants`.
pub const MUCKENHOUPT_R_MAX: usize = 10_000;
/// Explicit tail terms past `r_max` before the integral bracket.
pub const MUCKENHOUPT_TAIL_ORDER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    GenWeights,
    Stability,
    Constants,
    CompareWeights,
    Fuzz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::GenWeights => "gen-weights",
            Command::Stability => "stability",
            Command::Constants => "constants",
            Command::CompareWeights => "compare-weights",
            Command::Fuzz => "fuzz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `v(n) = n^α`, `φ(n) = n^β`
    Power,
    /// `v(n) = (n-1)^α`, Gamma-ratio `φ`, requires α < 0
    Copson,
    /// `v ≡ 1`, `φ(n) = n^{(p-1)/p}`
    Fkp,
    /// `((p-1)/p)^p / n^p` against the `fkp` pair
    Classical,
    /// tabulated `v` and `phi` arrays from the input file
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub family: Family,
    pub alpha: f64,
    pub beta: f64,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub support_max: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<Exponent64> {
        let p = Exponent::new(self.p)?;
        if self.trials == 0 {
            return Err(CliError::Config("--trials must be at least 1".into()));
        }
        if self.support_max == 0 {
            return Err(CliError::Config("--support-max must be at least 1".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", self.tol)));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(CliError::Config("--alpha and --beta must be finite".into()));
        }
        Ok(p)
    }

    pub fn writes_csv(&self) -> bool {
        self.output_path
            .as_deref()
            .and_then(Path::extension)
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    }

    fn input(&self) -> Result<&Path> {
        self.input_path
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("`{}` needs --input", self.command.name())))
    }
}

/// A check that did not hold within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub value: f64,
    pub threshold: f64,
}

impl Violation {
    fn new(check: &str, index: Option<usize>, value: f64, threshold: f64) -> Self {
        Self {
            check: check.to_string(),
            index,
            value,
            threshold,
        }
    }
}

/// Output of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Report text, JSON or CSV.
    pub document: String,
    pub violations: Vec<Violation>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

struct Table {
    headers: Vec<&'static str>,
    rows: Vec<(usize, Vec<f64>)>,
}

impl Table {
    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(|e| CliError::Encode(e.to_string()))?;
        for (n, values) in &self.rows {
            let mut record = vec![n.to_string()];
            record.extend(values.iter().map(|v| v.to_string()));
            w.write_record(&record).map_err(|e| CliError::Encode(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(n, values)| {
                let mut obj = serde_json::Map::new();
                obj.insert(self.headers[0].to_string(), json!(n));
                for (h, v) in self.headers[1..].iter().zip(values) {
                    obj.insert(h.to_string(), json!(v));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.headers, "rows": rows })
    }
}

enum Results {
    Json(Value),
    Table(Table, Value),
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Encode(e.to_string()))
}

/// Assembles the report document.
pub fn report_document(config: &RunConfig, results: Value, violations: &[Violation]) -> Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": config.command.name(),
        "config": to_value(config)?,
        "results": results,
        "violations": to_value(&violations)?,
    });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Error record in the report envelope, for failed runs.
pub fn error_document(command: &str, err: &CliError) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "error": { "kind": err.kind(), "message": err.to_string() },
    });
    serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
}

/// The pair whose generated weight is checked for `family`, for families
/// that are identities. `custom` needs the tables from the input file.
fn identity_pair(config: &RunConfig, p: Exponent64, tables: Option<&SequenceFile>) -> Result<WeightPair64> {
    match config.family {
        Family::Power => Ok(FamilyParams::new(p, config.alpha, config.beta)?.pair()),
        Family::Fkp | Family::Classical => Ok(WeightPair64::new(Power::new(0.0), Power::new(p.conjugate_ratio()), p)),
        Family::Custom => {
            let file = tables.ok_or_else(|| CliError::Config("family `custom` needs --input with v and phi".into()))?;
            match (&file.v, &file.phi) {
                (Some(v), Some(phi)) => Ok(WeightPair64::new(Tabulated::new(v.clone()), Tabulated::new(phi.clone()), p)),
                _ => Err(CliError::Config("family `custom` needs `v` and `phi` arrays in the input file".into())),
            }
        }
        Family::Copson => Err(CliError::Config("family `copson` has no identity pair; use copson checks".into())),
    }
}

pub(crate) fn identity_violations(report: &VerificationReport64, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let scale = report.scale();
    if report.residual.abs() > tol * scale {
        out.push(Violation::new("identity_residual", None, report.residual, tol * scale));
    }
    for t in &report.per_index {
        if t.remainder < -DEFAULT_ABS_TOL * scale {
            out.push(Violation::new("remainder_nonnegative", Some(t.n), t.remainder, -DEFAULT_ABS_TOL * scale));
        }
    }
    out
}

fn run_verify(config: &RunConfig, p: Exponent64) -> Result<(Results, Vec<Violation>)> {
    let (u, file) = load_sequence_file(config.input()?)?;
    match config.family {
        Family::Copson => {
            let report = copson_verify(&u, p, config.alpha)?;
            let threshold = -config.tol * report.scale();
            let violations = if report.residual < threshold {
                vec![Violation::new("copson_slack", None, report.residual, threshold)]
            } else {
                Vec::new()
            };
            Ok((Results::Json(json!({ "mode": "inequality", "report": to_value(&report)? })), violations))
        }
        Family::Classical => {
            let pair = identity_pair(config, p, None)?;
            let w = |n: usize| classical_weight(p, n);
            let mut violations = Vec::new();
            for s in check_condition(&pair, w, 1, u.horizon())? {
                if !s.holds(DEFAULT_ABS_TOL) {
                    violations.push(Violation::new("supersolution_condition", Some(s.n), s.slack, -DEFAULT_ABS_TOL * s.scale));
                }
            }
            let report = verify_inequality(&u, &pair, w)?;
            if !report.inequality_holds(config.tol) {
                violations.push(Violation::new("inequality", None, report.residual, -config.tol * report.scale()));
            }
            Ok((Results::Json(json!({ "mode": "inequality", "report": to_value(&report)? })), violations))
        }
        _ => {
            let pair = identity_pair(config, p, Some(&file))?;
            let report = verify_identity(&u, &pair)?;
            let violations = identity_violations(&report, config.tol);
            Ok((
                Results::Json(json!({
                    "mode": "identity",
                    "pair": pair.describe(),
                    "relative_residual": report.relative_residual(),
                    "report": to_value(&report)?,
                })),
                violations,
            ))
        }
    }
}

fn run_gen_weights(config: &RunConfig, p: Exponent64) -> Result<(Results, Vec<Violation>)> {
    let last = config.support_max;
    let table = match config.family {
        Family::Power => {
            let fp = FamilyParams::new(p, config.alpha, config.beta)?;
            Table {
                headers: vec!["n", "w"],
                rows: (1..=last).map(|n| (n, vec![power_weight(&fp, n)])).collect(),
            }
        }
        Family::Fkp => Table {
            headers: vec!["n", "w"],
            rows: (1..=last).map(|n| (n, vec![fkp_weight(p, n)])).collect(),
        },
        Family::Classical => Table {
            headers: vec!["n", "w"],
            rows: (1..=last).map(|n| (n, vec![classical_weight(p, n)])).collect(),
        },
        Family::Copson => {
            let pair = copson_pair(p, config.alpha, last + 1)?;
            let mut rows = Vec::with_capacity(last);
            for n in 1..=last {
                rows.push((n, vec![hardy_weight(&pair, n)?, copson_weight(p, config.alpha, n)]));
            }
            Table {
                headers: vec!["n", "w", "closed_form"],
                rows,
            }
        }
        Family::Custom => {
            let (_, file) = load_sequence_file(config.input()?)?;
            let pair = identity_pair(config, p, Some(&file))?;
            let mut rows = Vec::with_capacity(last);
            for n in 1..=last {
                rows.push((n, vec![hardy_weight(&pair, n)?]));
            }
            Table {
                headers: vec!["n", "w"],
                rows,
            }
        }
    };
    let negative: Vec<usize> = table.rows.iter().filter(|(_, v)| v[0] < 0.0).map(|(n, _)| *n).collect();
    let extra = json!({ "negative_weights": negative });
    Ok((Results::Table(table, extra), Vec::new()))
}

fn run_stability(config: &RunConfig, p: Exponent64) -> Result<(Results, Vec<Violation>)> {
    let u = load_sequence(config.input()?)?;
    let report = stability_report(&u, p)?;
    let threshold = -config.tol * (report.deficit + 1.0);
    let mut violations = Vec::new();
    if report.margin < threshold {
        violations.push(Violation::new("stability_margin", None, report.margin, threshold));
    }
    Ok((Results::Json(to_value(&report)?), violations))
}

fn run_constants(config: &RunConfig, p: Exponent64) -> Result<(Results, Vec<Violation>)> {
    let mut violations = Vec::new();
    let c1 = if p.get() >= 2.0 {
        let est = cp_lower_constant(p, C1_TOL)?;
        if !(est.lower > 0.0 && est.upper <= 1.0 + C1_TOL) {
            violations.push(Violation::new("c1_in_unit_interval", None, est.value, 1.0));
        }
        to_value(&est)?
    } else {
        Value::Null
    };
    let muck = muckenhoupt_constant(p, MUCKENHOUPT_R_MAX, MUCKENHOUPT_TAIL_ORDER)?;
    if !muck.within_bound(config.tol) {
        violations.push(Violation::new(
            "muckenhoupt_bound",
            Some(muck.r_at_sup),
            muck.sup_upper,
            muck.bound + config.tol,
        ));
    }
    let copson = if config.alpha < 0.0 {
        json!(copson_constant(p, config.alpha))
    } else {
        Value::Null
    };
    Ok((
        Results::Json(json!({
            "c1": c1,
            "muckenhoupt": to_value(&muck)?,
            "muckenhoupt_r_max": MUCKENHOUPT_R_MAX,
            "muckenhoupt_tail_order": MUCKENHOUPT_TAIL_ORDER,
            "copson_constant": copson,
            "hardy_constant": p.hardy_constant(),
        })),
        violations,
    ))
}

fn run_compare(config: &RunConfig, p: Exponent64) -> Result<(Results, Vec<Violation>)> {
    let fp = FamilyParams::new(p, config.alpha, config.beta)?;
    let mut violations = Vec::new();
    let rows: Vec<(usize, Vec<f64>)> = (1..=config.support_max)
        .map(|n| {
            let (h, f, w) = (classical_weight(p, n), fkp_weight(p, n), power_weight(&fp, n));
            if f <= h {
                violations.push(Violation::new("fkp_dominates_classical", Some(n), f - h, 0.0));
            }
            (n, vec![h, f, w, f - h, w - h])
        })
        .collect();
    let table = Table {
        headers: vec!["n", "classical", "fkp", "power", "fkp_gap", "power_gap"],
        rows,
    };
    Ok((Results::Table(table, Value::Null), violations))
}

/// Runs one command. Module errors are returned as `Err`; violated checks
/// are reported in the outcome.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let p = config.validate()?;
    log::info!("running {} with p = {}", config.command.name(), config.p);
    let (results, violations) = match config.command {
        Command::Verify => run_verify(config, p)?,
        Command::GenWeights => run_gen_weights(config, p)?,
        Command::Stability => run_stability(config, p)?,
        Command::Constants => run_constants(config, p)?,
        Command::CompareWeights => run_compare(config, p)?,
        Command::Fuzz => {
            let tables = match &config.input_path {
                Some(path) => Some(load_sequence_file(path)?.1),
                None => None,
            };
            let summary = fuzz(config, p, tables.as_ref())?;
            let violations = summary.violations.clone();
            (Results::Json(to_value(&summary)?), violations)
        }
    };
    for v in &violations {
        log::warn!("violation: {} = {} (threshold {})", v.check, v.value, v.threshold);
    }
    let document = match results {
        Results::Table(table, _) if config.writes_csv() => table.to_csv()?,
        Results::Table(table, extra) => {
            let mut value = table.to_json();
            if let (Value::Object(map), Value::Object(more)) = (&mut value, extra) {
                map.extend(more);
            }
            report_document(config, value, &violations)?
        }
        Results::Json(value) => report_document(config, value, &violations)?,
    };
    Ok(Outcome { document, violations })
}

pub(crate) fn identity_pair_for_fuzz(config: &RunConfig, p: Exponent64, tables: Option<&SequenceFile>) -> Result<WeightPair64> {
    identity_pair(config, p, tables)
}

