//! Batch configuration: one dataset, many decomposition runs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;
use toml::Spanned;

use disparity::data::{add_missing_indicators, first_principal_component, load_csv, quantile_bins, standardize, Role};
use disparity::{
    Aggregation, AnalysisSpec, Bindings, BootstrapOptions, Dataset, Estimator, OutcomeFamily, Proposition,
    SpecOptions,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Input,
    pub roles: Roles,
    #[serde(default)]
    pub preprocess: Preprocess,
    /// Omit to skip the bootstrap.
    pub bootstrap: Option<BootstrapOptions>,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default = "default_max_levels")]
    pub max_levels: usize,
    pub runs: Vec<Spanned<Run>>,
}

fn default_max_levels() -> usize {
    disparity::spec::DEFAULT_MAX_LEVELS
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    /// CSV path, relative to the config file.
    pub path: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roles {
    pub outcome: String,
    pub group: String,
    pub early: Vec<String>,
    pub target: String,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default)]
    pub confounder: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preprocess {
    /// Columns z-scored, then filled with 0 where missing, each gaining a
    /// `<name>_miss` indicator covariate.
    #[serde(default)]
    pub missing_indicators: Vec<String>,
    #[serde(default)]
    pub pca: Vec<PcaStep>,
    #[serde(default)]
    pub discretize: Vec<DiscretizeStep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaStep {
    /// Name of the new score column.
    pub name: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizeStep {
    pub column: String,
    pub bins: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub json: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    /// Column heading in the table; defaults to the proposition.
    pub label: Option<String>,
    pub proposition: Proposition,
    pub estimator: Estimator,
    #[serde(default)]
    pub outcome_family: OutcomeFamily,
    #[serde(default)]
    pub conditioning_value_x: Option<f64>,
    #[serde(default)]
    pub interactions: bool,
    /// Overrides the config-wide aggregation.
    pub aggregation: Option<Aggregation>,
}

impl Run {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.proposition.to_string())
    }
}

/// A parsed config plus the directory its relative paths resolve against.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
    pub line_starts: Vec<usize>,
}

impl Loaded {
    pub fn read(path: &Path) -> anyhow::Result<Loaded> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        if config.runs.is_empty() {
            bail!("{}: at least one [[runs]] entry is required", path.display());
        }
        let line_starts = std::iter::once(0)
            .chain(text.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        Ok(Loaded {
            config,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            line_starts,
        })
    }

    /// 1-based line of a byte offset.
    pub fn line_of(&self, offset: usize) -> usize {
        self.line_starts.partition_point(|&s| s <= offset)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn bindings(&self) -> Bindings {
        let r = &self.config.roles;
        let mut covariates = r.covariates.clone();
        for name in &self.config.preprocess.missing_indicators {
            covariates.push(format!("{name}{}", disparity::data::INDICATOR_SUFFIX));
        }
        Bindings {
            outcome: r.outcome.clone(),
            group: r.group.clone(),
            covariates,
            early: r.early.clone(),
            target: r.target.clone(),
            confounder: r.confounder.clone(),
        }
    }

    pub fn spec(&self, run: &Run) -> AnalysisSpec {
        AnalysisSpec {
            proposition: run.proposition,
            estimator: run.estimator,
            outcome_family: run.outcome_family,
            bindings: self.bindings(),
            conditioning_value_x: run.conditioning_value_x,
            options: SpecOptions {
                interactions: run.interactions,
                aggregation: run.aggregation.unwrap_or(self.config.aggregation),
                max_levels: self.config.max_levels,
            },
        }
    }

    /// Checks every run's structural rules before anything is computed.
    pub fn validate(&self) -> anyhow::Result<()> {
        let mut problems = Vec::new();
        for (i, run) in self.config.runs.iter().enumerate() {
            if let Err(e) = self.spec(run.get_ref()).validate() {
                problems.push(format!(
                    "run {} (line {}): {e}",
                    i + 1,
                    self.line_of(run.span().start)
                ));
            }
        }
        if let Some(b) = &self.config.bootstrap {
            if b.replicates < 2 {
                problems.push(format!("bootstrap: replicates must be at least 2, got {}", b.replicates));
            }
        }
        if !problems.is_empty() {
            bail!("invalid config:\n  {}", problems.join("\n  "));
        }
        Ok(())
    }

    /// Loads the CSV, applies preprocessing once on the full sample and
    /// declares roles.
    pub fn dataset(&self) -> anyhow::Result<Dataset> {
        let path = self.resolve(&self.config.input.path);
        let mut d = load_csv(&path, &Default::default()).with_context(|| format!("loading {}", path.display()))?;
        let pre = &self.config.preprocess;
        for name in &pre.missing_indicators {
            d = standardize(&d, name)?;
        }
        if !pre.missing_indicators.is_empty() {
            d = add_missing_indicators(&d, &pre.missing_indicators, 0.0)?;
        }
        for step in &pre.pca {
            let pc = first_principal_component(&d, &step.columns)
                .with_context(|| format!("principal component `{}`", step.name))?;
            d = d.with_column(&step.name, pc.scores.into_iter().map(Some).collect())?;
        }
        for step in &pre.discretize {
            d = quantile_bins(&d, &step.column, step.bins)?;
        }
        let r = &self.config.roles;
        d = d
            .with_role(Role::Outcome, &[&r.outcome])?
            .with_role(Role::Group, &[&r.group])?
            .with_role(Role::Early, &r.early)?
            .with_role(Role::Target, &[&r.target])?;
        if !r.covariates.is_empty() {
            d = d.with_role(Role::Covariate, &r.covariates)?;
        }
        if let Some(l) = &r.confounder {
            d = d.with_role(Role::ConfounderL, &[l])?;
        }
        Ok(d)
    }
}
