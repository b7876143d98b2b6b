//! Named, seeded experiments over the library with self-checking output.
//!
//! A scenario is a function of a [`Context`] that returns spectra, tables,
//! plot series and pass/fail checks. Every output row is formatted with the
//! shortest round-trip representation of its floats, so identical inputs give
//! identical bytes.

mod builtin;
pub mod corpus;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("config: {0}")]
    Schema(String),
    #[error("{scenario}: {message}")]
    Compute { scenario: String, message: String },
}

pub const DEFAULT_SEED: u64 = 0x6b6b;

/// Parameters shared by the catalog; each scenario accepts a subset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Finite group name: Z2..Z12, D3..D6 or S3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// U(1) weight of the associated bundle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge: Option<i64>,
    /// Base sizes (cycle lengths or grid sides).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Flux or degree values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<Vec<i64>>,
    /// Explicit voltages as group element indices, one per base edge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voltages: Option<Vec<usize>>,
    /// Fiber scale σ, or a schedule of them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    /// Field strengths b for chart cross-checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<f64>>,
    /// Limit holonomy angle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Length of a refinement or approximation schedule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Number of eigenvalues followed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,
    /// Number of random instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    /// Upper bound on random instance size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    /// Finite-difference step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

impl Params {
    fn keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// SVG plots, on by default.
    pub plots: Option<bool>,
}

/// One scenario per file, in TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Catalog entry to run.
    pub scenario: String,
    /// Label used in output rows and paths; defaults to `scenario`.
    pub name: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Params,
    /// Overrides for check tolerances, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<OutputConfig>,
}

impl ScenarioConfig {
    pub fn builtin(name: &str) -> Self {
        Self {
            scenario: name.to_string(),
            name: None,
            seed: None,
            params: Params::default(),
            tolerances: BTreeMap::new(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.scenario)
    }

    /// Catalog membership, accepted parameters and known tolerance keys.
    pub fn validate(&self) -> Result<&'static ScenarioInfo, ScenarioError> {
        let info = find(&self.scenario).ok_or_else(|| ScenarioError::Schema(format!("unknown scenario `{}`", self.scenario)))?;
        for k in self.params.keys() {
            if !info.params.contains(&k.as_str()) {
                return Err(ScenarioError::Schema(format!("scenario `{}` does not take parameter `{k}`", info.name)));
            }
        }
        for (k, v) in &self.tolerances {
            if !info.checks.contains(&k.as_str()) {
                return Err(ScenarioError::Schema(format!("scenario `{}` has no check `{k}`", info.name)));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(ScenarioError::Schema(format!("tolerance `{k}` must be finite and nonnegative")));
            }
        }
        if let Some(name) = &self.name {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(ScenarioError::Schema("name must be nonempty [A-Za-z0-9_-]".into()));
            }
        }
        Ok(info)
    }
}

/// What a scenario function sees.
pub struct Context<'a> {
    pub params: &'a Params,
    pub seed: u64,
    tolerances: &'a BTreeMap<String, f64>,
}

impl Context<'_> {
    pub fn tol(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutput {
    pub scenario: String,
    pub seed: u64,
    pub spectra: Vec<SpectrumRow>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub plots: Vec<Plot>,
}

/// Shortest round-trip decimal; `inf`, `-inf` and `NaN` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        format!("{x}")
    }
}

impl ScenarioOutput {
    fn new(scenario: &str, seed: u64) -> Self {
        Self { scenario: scenario.to_string(), seed, spectra: Vec::new(), tables: Vec::new(), checks: Vec::new(), plots: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub(crate) fn push_spectrum(&mut self, i: usize, values: &[f64], residuals: &[f64]) {
        for (j, v) in values.iter().enumerate() {
            let r = residuals.get(j).copied().unwrap_or(0.0);
            self.spectra.push(SpectrumRow { i, j: j + 1, lambda: *v, residual: r });
        }
    }

    /// Passes when `value ≤ tolerance`.
    pub(crate) fn check_le(&mut self, name: &str, value: f64, tolerance: f64, detail: impl Into<String>) {
        let passed = value <= tolerance;
        self.checks.push(Check { name: name.into(), passed, value, tolerance, detail: detail.into() });
    }

    /// Passes when `value ≥ threshold`.
    pub(crate) fn check_ge(&mut self, name: &str, value: f64, threshold: f64, detail: impl Into<String>) {
        let passed = value >= threshold;
        self.checks.push(Check { name: name.into(), passed, value, tolerance: threshold, detail: detail.into() });
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let value = if passed { 0.0 } else { 1.0 };
        self.checks.push(Check { name: name.into(), passed, value, tolerance: 0.0, detail: detail.into() });
    }

    pub(crate) fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows });
    }

    /// `scenario,i,j,lambda,residual`.
    pub fn spectrum_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "i", "j", "lambda", "residual"]).expect("in-memory write");
        for r in &self.spectra {
            w.write_record([self.scenario.clone(), r.i.to_string(), r.j.to_string(), fmt_f64(r.lambda), fmt_f64(r.residual)])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn table_csv(table: &Table) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for r in &table.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// `scenario,check,passed,value,tolerance,detail`.
    pub fn checks_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "check", "passed", "value", "tolerance", "detail"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                self.scenario.clone(),
                c.name.clone(),
                c.passed.to_string(),
                fmt_f64(c.value),
                fmt_f64(c.tolerance),
                c.detail.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Summary document; non-finite floats become strings.
    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { json!(fmt_f64(x)) };
        json!({
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "value": num(c.value),
                "tolerance": num(c.tolerance),
                "detail": c.detail,
            })).collect::<Vec<_>>(),
            "tables": self.tables.iter().map(|t| json!({"name": t.name, "header": t.header, "rows": t.rows.len()})).collect::<Vec<_>>(),
            "spectrum_rows": self.spectra.len(),
        })
    }
}

type Runner = fn(&Context, &mut ScenarioOutput) -> Result<(), String>;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub doc: &'static str,
    pub tags: &'static [&'static str],
    pub params: &'static [&'static str],
    pub checks: &'static [&'static str],
    run: Runner,
}

pub fn catalog() -> &'static [ScenarioInfo] {
    builtin::CATALOG
}

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    catalog().iter().find(|s| s.name == name)
}

/// Catalog entries carrying `tag`, or all of them.
pub fn list(tag: Option<&str>) -> Vec<&'static ScenarioInfo> {
    catalog().iter().filter(|s| tag.is_none_or(|t| s.tags.contains(&t))).collect()
}

/// Validate and run one config; `seed` overrides the config seed.
pub fn run(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<ScenarioOutput, ScenarioError> {
    let info = cfg.validate()?;
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let ctx = Context { params: &cfg.params, seed, tolerances: &cfg.tolerances };
    let mut out = ScenarioOutput::new(cfg.label(), seed);
    (info.run)(&ctx, &mut out).map_err(|message| ScenarioError::Compute { scenario: cfg.label().to_string(), message })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_well_formed() {
        assert!(catalog().len() >= 8);
        let mut names: Vec<_> = catalog().iter().map(|s| s.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), catalog().len());
        assert!(!list(Some("convergence")).is_empty());
        assert!(list(Some("no-such-tag")).is_empty());
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let bad = r#"{"scenario": "voltage-c6", "colour": 3}"#;
        assert!(matches!(ScenarioConfig::from_json(bad), Err(ScenarioError::Schema(_))));
        let bad = r#"{"scenario": "voltage-c6", "params": {"alpha": 0.3}}"#;
        assert!(matches!(ScenarioConfig::from_json(bad), Err(ScenarioError::Schema(_))));
        let bad = r#"{"scenario": "nope"}"#;
        assert!(matches!(ScenarioConfig::from_json(bad), Err(ScenarioError::Schema(_))));
        let ok = r#"{"scenario": "voltage-c6", "params": {"sigma": [0.5]}, "tolerances": {"decomposition": 1e-9}}"#;
        assert!(ScenarioConfig::from_json(ok).is_ok());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0, -2.5e-17, 3.0e300] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
