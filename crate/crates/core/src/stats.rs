//! Sign tests on estimate ensembles.
//!
//! A deterministic ensemble (zero spread) is compared against the `eps_zero`
//! dead band. Otherwise a one-sided one-sample Student-t test decides.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::types::EstimateEnsemble;

/// One-sided p-value for H1: true mean > 0. `None` for a deterministic ensemble.
pub fn p_value_positive(ens: &EstimateEnsemble) -> Option<f64> {
    if ens.std == 0.0 || ens.len() < 2 {
        return None;
    }
    let n = ens.len() as f64;
    let t = ens.mean / (ens.std / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("n >= 2 gives a valid t distribution");
    Some(1.0 - dist.cdf(t))
}

/// One-sided p-value for H1: true mean < 0. `None` for a deterministic ensemble.
pub fn p_value_negative(ens: &EstimateEnsemble) -> Option<f64> {
    p_value_positive(&ens.scaled(-1.0))
}

/// Whether the ensemble mean is confidently above zero.
pub fn significantly_positive(ens: &EstimateEnsemble, alpha: f64, eps_zero: f64) -> bool {
    match p_value_positive(ens) {
        Some(p) => p < alpha,
        None => ens.mean > eps_zero,
    }
}

/// Whether the ensemble mean is confidently below zero.
pub fn significantly_negative(ens: &EstimateEnsemble, alpha: f64, eps_zero: f64) -> bool {
    significantly_positive(&ens.scaled(-1.0), alpha, eps_zero)
}
