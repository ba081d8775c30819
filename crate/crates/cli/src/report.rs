//! JSON report and plain-text table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use disparity::{
    Aggregation, BootstrapOptions, BootstrapSummary, DecompositionEstimate, Estimator, OutcomeFamily,
    Proposition, QuantitySummary, Scale,
};

const DEGENERATE: &str = "initial disparity is at its null value, so the proportion is undefined";
const TOO_FEW: &str = "fewer than 2 bootstrap replicates gave a finite value";

#[derive(Debug, Serialize)]
pub struct Report {
    pub input: InputSummary,
    pub bootstrap: Option<BootstrapOptions>,
    pub runs: Vec<RunReport>,
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    /// As written in the config.
    pub path: String,
    pub rows: usize,
    pub columns: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub aggregation: Aggregation,
    pub conditioning_value_x: Option<f64>,
    pub interactions: bool,
    pub max_levels: usize,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub label: String,
    pub proposition: Proposition,
    pub estimator: Estimator,
    pub outcome_family: OutcomeFamily,
    pub status: &'static str,
    pub error: Option<String>,
    pub estimate: Option<EstimateReport>,
    pub bootstrap: Option<BootstrapReport>,
    pub bootstrap_error: Option<String>,
    pub metadata: Metadata,
    pub warnings: Vec<Value>,
    /// JSON path of each null numeric field and why it is null.
    pub null_reasons: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub scale: Scale,
    pub initial: Option<f64>,
    pub residual: Option<f64>,
    pub reduction: Option<f64>,
    pub proportion_reduced: Option<f64>,
    pub coefficients: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize)]
pub struct QuantityReport {
    pub estimate: Option<f64>,
    pub se: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub used: usize,
}

#[derive(Debug, Serialize)]
pub struct BootstrapReport {
    pub replicates: usize,
    pub seed: u64,
    pub stratified: bool,
    pub failed: usize,
    pub failure_reasons: BTreeMap<String, usize>,
    pub initial: QuantityReport,
    pub residual: QuantityReport,
    pub reduction: QuantityReport,
    pub proportion_reduced: QuantityReport,
}

struct Nulls<'a>(&'a mut BTreeMap<String, String>);

impl Nulls<'_> {
    fn num(&mut self, path: &str, v: f64, reason: &str) -> Option<f64> {
        if v.is_finite() {
            Some(v)
        } else {
            self.0.insert(path.to_string(), reason.to_string());
            None
        }
    }

    fn quantity(&mut self, path: &str, q: &QuantitySummary, estimate_reason: &str) -> QuantityReport {
        let spread = if q.used < 2 { TOO_FEW } else { "non-finite value" };
        QuantityReport {
            estimate: self.num(&format!("{path}.estimate"), q.estimate, estimate_reason),
            se: self.num(&format!("{path}.se"), q.se, spread),
            lower: self.num(&format!("{path}.lower"), q.lower, spread),
            upper: self.num(&format!("{path}.upper"), q.upper, spread),
            used: q.used,
        }
    }
}

pub struct RunOutcome {
    pub estimate: Result<DecompositionEstimate, String>,
    pub bootstrap: Option<Result<BootstrapSummary, String>>,
}

impl RunReport {
    pub fn new(
        label: String,
        spec: &disparity::AnalysisSpec,
        outcome: RunOutcome,
    ) -> RunReport {
        let mut null_reasons = BTreeMap::new();
        let mut nulls = Nulls(&mut null_reasons);
        let mut warnings = Vec::new();
        let (status, error, estimate) = match &outcome.estimate {
            Ok(e) => {
                warnings.extend(e.warnings.iter().map(|w| serde_json::to_value(w).expect("warning serializes")));
                let other = "non-finite value";
                let rep = EstimateReport {
                    scale: e.scale,
                    initial: nulls.num("estimate.initial", e.initial, other),
                    residual: nulls.num("estimate.residual", e.residual, other),
                    reduction: nulls.num("estimate.reduction", e.reduction, other),
                    proportion_reduced: nulls.num("estimate.proportion_reduced", e.proportion_reduced, DEGENERATE),
                    coefficients: e.coefficients.clone(),
                };
                ("ok", None, Some(rep))
            }
            Err(msg) => ("error", Some(msg.clone()), None),
        };
        let (bootstrap, bootstrap_error) = match outcome.bootstrap {
            Some(Ok(b)) => {
                if b.failed > 0 {
                    warnings.push(json!({
                        "kind": "bootstrap_failures",
                        "failed": b.failed,
                        "total": b.replicates,
                    }));
                }
                let rep = BootstrapReport {
                    replicates: b.replicates,
                    seed: b.seed,
                    stratified: b.stratified,
                    failed: b.failed,
                    initial: nulls.quantity("bootstrap.initial", &b.initial, "non-finite value"),
                    residual: nulls.quantity("bootstrap.residual", &b.residual, "non-finite value"),
                    reduction: nulls.quantity("bootstrap.reduction", &b.reduction, "non-finite value"),
                    proportion_reduced: nulls.quantity("bootstrap.proportion_reduced", &b.proportion_reduced, DEGENERATE),
                    failure_reasons: b.failure_reasons,
                };
                (Some(rep), None)
            }
            Some(Err(msg)) => (None, Some(msg)),
            None => (None, None),
        };
        RunReport {
            label,
            proposition: spec.proposition,
            estimator: spec.estimator,
            outcome_family: spec.outcome_family,
            status,
            error,
            estimate,
            bootstrap,
            bootstrap_error,
            metadata: Metadata {
                aggregation: spec.options.aggregation,
                conditioning_value_x: spec.conditioning_value_x,
                interactions: spec.options.interactions,
                max_levels: spec.options.max_levels,
            },
            warnings,
            null_reasons,
        }
    }
}

/// `round(100 * p)` as an integer string.
pub fn percent(p: Option<f64>) -> String {
    match p {
        Some(p) => format!("{}", (100.0 * p).round() as i64),
        None => "NA".to_string(),
    }
}

fn cell(v: Option<f64>, se: Option<f64>) -> String {
    match (v, se) {
        (Some(v), Some(se)) => format!("{v:.2} ({se:.2})"),
        (Some(v), None) => format!("{v:.2}"),
        (None, _) => "NA".to_string(),
    }
}

/// Rows initial / residual / % reduction, one column per run.
pub fn table(report: &Report) -> String {
    let runs = &report.runs;
    let rows: [(&str, Vec<String>); 3] = [
        (
            "Initial disparity",
            runs.iter()
                .map(|r| match &r.estimate {
                    Some(e) => cell(e.initial, r.bootstrap.as_ref().and_then(|b| b.initial.se)),
                    None => "error".into(),
                })
                .collect(),
        ),
        (
            "Residual disparity",
            runs.iter()
                .map(|r| match &r.estimate {
                    Some(e) => cell(e.residual, r.bootstrap.as_ref().and_then(|b| b.residual.se)),
                    None => "error".into(),
                })
                .collect(),
        ),
        (
            "% reduction",
            runs.iter()
                .map(|r| match &r.estimate {
                    Some(e) => percent(e.proportion_reduced),
                    None => "error".into(),
                })
                .collect(),
        ),
    ];
    let head = rows.iter().map(|(h, _)| h.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..runs.len())
        .map(|j| {
            rows.iter()
                .map(|(_, v)| v[j].len())
                .chain(std::iter::once(runs[j].label.len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{:head$}", "");
    for (r, w) in runs.iter().zip(&widths) {
        let _ = write!(out, "  {:>w$}", r.label);
    }
    out.push('\n');
    for (h, values) in &rows {
        let _ = write!(out, "{h:head$}");
        for (v, w) in values.iter().zip(&widths) {
            let _ = write!(out, "  {v:>w$}");
        }
        out.push('\n');
    }
    let mut notes = Vec::new();
    for r in runs {
        if let Some(e) = &r.error {
            notes.push(format!("{}: error: {e}", r.label));
        }
        if let Some(e) = &r.bootstrap_error {
            notes.push(format!("{}: bootstrap failed: {e}", r.label));
        }
        if r.estimate.as_ref().is_some_and(|e| e.scale == Scale::Ratio) {
            notes.push(format!("{}: ratio scale (rare binary outcome)", r.label));
        }
        for w in &r.warnings {
            if w["kind"] != "aggregation_convention" && w["kind"] != "conditional_initial" {
                notes.push(format!("{}: warning: {w}", r.label));
            }
        }
    }
    if runs.iter().any(|r| r.bootstrap.is_some()) {
        notes.push("bootstrap standard errors in parentheses".into());
    }
    for n in notes {
        out.push_str(&n);
        out.push('\n');
    }
    out
}
