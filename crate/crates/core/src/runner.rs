use crate::data::Dataset;
use crate::error::Result;
use crate::estimate::DecompositionEstimate;
use crate::oaxaca::proposition_via_oaxaca;
use crate::parametric::{
    decompose_logistic_rare, decompose_product_coefficients, decompose_successive_linear,
    decompose_successive_multix,
};
use crate::plugin::{plugin_mu, plugin_mu_timedep};
use crate::spec::{AnalysisSpec, Estimator, OutcomeFamily};

/// Validates `spec` and dispatches to the estimator it names.
///
/// Time-dependent propositions go to the confounder-aware plug-in; the
/// interaction flag routes P1-P4 through Oaxaca-Blinder terms.
pub fn decompose(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    spec.validate()?;
    if spec.proposition.is_time_dependent() {
        return plugin_mu_timedep(d, spec);
    }
    if spec.estimator == Estimator::Plugin {
        return plugin_mu(d, spec);
    }
    if spec.options.interactions {
        return proposition_via_oaxaca(d, spec);
    }
    if spec.outcome_family == OutcomeFamily::RareBinary {
        return decompose_logistic_rare(d, spec);
    }
    match spec.estimator {
        Estimator::Successive if spec.bindings.early.len() == 1 => decompose_successive_linear(d, spec),
        Estimator::Successive => decompose_successive_multix(d, spec),
        _ => decompose_product_coefficients(d, spec),
    }
}
