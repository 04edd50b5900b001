//! Feature-wise decomposition of target information into MI, synergy and
//! redundancy.
//!
//! For each feature `F_i` the candidates `F_j` are visited in descending order
//! of `I(F_i; F_j)`. A candidate whose θ against the current surviving set is
//! confidently negative is removed, and `-θ` is booked as its redundancy
//! contribution. What survives is the max-synergy set.

use std::collections::BTreeMap;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimators::{
    group, ksg_null_spread, target, EstimatorConfig, EstimatorKind, MiEngine, Var,
};
use crate::stats::{significantly_negative, significantly_positive};
use crate::types::{
    Dataset, DatasetFingerprint, EstimateEnsemble, FeatureEnsembles, FeatureSubset,
    PidfFeatureResult, PidfReport, Unit,
};

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Dead band (nats) inside which a deterministic estimate counts as zero.
pub const DEFAULT_EPS_ZERO: f64 = 0.01;
pub const DEFAULT_SUBSET_CAP: usize = 15;
/// Two subset scores closer than this are treated as tied maxima.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidfConfig {
    pub estimator: EstimatorConfig,
    pub alpha: f64,
    pub eps_zero: f64,
    pub unit: Unit,
}

impl PidfConfig {
    pub fn new(estimator: EstimatorConfig) -> Self {
        PidfConfig {
            estimator,
            alpha: DEFAULT_ALPHA,
            eps_zero: DEFAULT_EPS_ZERO,
            unit: Unit::Nats,
        }
    }

    /// Like [`PidfConfig::new`], with the dead band from [`default_eps_zero`].
    pub fn for_data(data: &Dataset, estimator: EstimatorConfig) -> Self {
        let eps_zero = default_eps_zero(data, &estimator, DEFAULT_ALPHA);
        PidfConfig {
            eps_zero,
            ..PidfConfig::new(estimator)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.eps_zero >= 0.0 && self.eps_zero.is_finite()) {
            return Err(Error::Config(format!(
                "eps-zero must be a finite non-negative number, got {}",
                self.eps_zero
            )));
        }
        self.estimator.validate()
    }
}

/// Dead band suited to the estimator's noise.
///
/// The plug-in estimators use [`DEFAULT_EPS_ZERO`]. KSG is deterministic but
/// far noisier, so its band is the one-sided `1 - alpha` normal quantile of
/// its measured spread on independent data of the same length, and never
/// less than [`DEFAULT_EPS_ZERO`]. MINE is tested by t-test and keeps the
/// default.
pub fn default_eps_zero(data: &Dataset, estimator: &EstimatorConfig, alpha: f64) -> f64 {
    match estimator.kind {
        EstimatorKind::Ksg { k } => {
            let z = Normal::new(0.0, 1.0)
                .expect("standard normal")
                .inverse_cdf(1.0 - alpha);
            let spread = ksg_null_spread(data.n_samples(), k, estimator.base_seed);
            (z * spread).max(DEFAULT_EPS_ZERO)
        }
        _ => DEFAULT_EPS_ZERO,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Redundant,
    NotRedundant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEvaluation {
    pub feature: usize,
    pub candidate: usize,
    /// Surviving set at the time of evaluation, minus the feature and candidate.
    pub context: FeatureSubset,
    pub theta: EstimateEnsemble,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTrace {
    pub feature: usize,
    /// Candidates in visiting order.
    pub candidate_order: Vec<usize>,
    /// Mean `I(F_i; F_j)` for each entry of `candidate_order`.
    pub pairwise_mi: Vec<f64>,
    pub evaluations: Vec<ThetaEvaluation>,
    /// Candidates removed from the surviving set, in removal order.
    pub removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidfTrace {
    pub features: Vec<FeatureTrace>,
}

/// Redundant iff θ is confidently below zero.
pub fn is_redundant(theta: &EstimateEnsemble, alpha: f64, eps_zero: f64) -> Verdict {
    if significantly_negative(theta, alpha, eps_zero) {
        Verdict::Redundant
    } else {
        Verdict::NotRedundant
    }
}

/// `I(Y; F_i ∪ S) - I(Y; S)` per seed.
fn conditional_gain(engine: &MiEngine, i: usize, s: &FeatureSubset) -> Result<EstimateEnsemble> {
    let with = engine.mi(&target(), &group(&s.with(i)))?;
    let without = engine.mi(&target(), &group(s))?;
    Ok(with.sub(&without))
}

fn theta_with(
    engine: &MiEngine,
    i: usize,
    j: usize,
    context: &FeatureSubset,
) -> Result<EstimateEnsemble> {
    let after = conditional_gain(engine, i, &context.with(j))?;
    let before = conditional_gain(engine, i, context)?;
    Ok(after.sub(&before))
}

/// Change in `F_i`'s conditional information about the target when `F_j`
/// joins `context`; negative values mean `F_j` is redundant with `F_i`.
pub fn theta(
    data: &Dataset,
    i: usize,
    j: usize,
    context: &FeatureSubset,
    cfg: &EstimatorConfig,
) -> Result<EstimateEnsemble> {
    let n_features = data.n_features();
    for index in [i, j].into_iter().chain(context.iter()) {
        if index >= n_features {
            return Err(Error::IndexOutOfRange { index, n_features });
        }
    }
    if i == j || context.contains(i) || context.contains(j) {
        return Err(Error::Config(format!(
            "theta needs distinct features and a context without them (i={i}, j={j}, context={context})"
        )));
    }
    theta_with(&MiEngine::new(data, cfg)?, i, j, context)
}

fn analyse_feature(
    engine: &MiEngine,
    i: usize,
    cfg: &PidfConfig,
) -> Result<(PidfFeatureResult, FeatureTrace)> {
    let n = engine.data().n_features();
    let fi = [Var::Feature(i)];
    let mi = engine
        .mi(&target(), &fi)
        .map_err(|e| e.context(format!("I(Y; F{i})")))?;

    let mut ranked = Vec::with_capacity(n.saturating_sub(1));
    for j in (0..n).filter(|&j| j != i) {
        let pair = engine
            .mi(&fi, &[Var::Feature(j)])
            .map_err(|e| e.context(format!("I(F{i}; F{j})")))?;
        ranked.push((j, pair));
    }
    ranked.sort_by(|a, b| b.1.mean.total_cmp(&a.1.mean).then(a.0.cmp(&b.0)));

    let redundant_set = FeatureSubset::from_sorted_unchecked({
        let mut r: Vec<usize> = ranked
            .iter()
            .filter(|(_, pair)| significantly_positive(pair, cfg.alpha, cfg.eps_zero))
            .map(|(j, _)| *j)
            .collect();
        r.sort_unstable();
        r
    });

    let seeds = mi.seeds.clone();
    let mut surviving = FeatureSubset::full(n).without(i);
    let mut contributions = BTreeMap::new();
    let mut fwr = EstimateEnsemble::constant(0.0, seeds.clone());
    let mut evaluations = Vec::with_capacity(ranked.len());
    let mut removed = Vec::new();
    for (j, _) in &ranked {
        let j = *j;
        let context = surviving.without(j);
        let th = theta_with(engine, i, j, &context)
            .map_err(|e| e.context(format!("theta for feature F{i}, candidate F{j}")))?;
        let verdict = is_redundant(&th, cfg.alpha, cfg.eps_zero);
        debug!(
            "F{i} vs F{j} in {context}: theta {:.6} -> {verdict:?}",
            th.mean
        );
        if verdict == Verdict::Redundant {
            contributions.insert(j, (-th.mean).max(0.0));
            fwr = fwr.sub(&th);
            surviving = context.clone();
            removed.push(j);
        }
        evaluations.push(ThetaEvaluation {
            feature: i,
            candidate: j,
            context,
            theta: th,
            verdict,
        });
    }

    let fws = conditional_gain(engine, i, &surviving)
        .map_err(|e| e.context(format!("synergy of F{i}")))?
        .sub(&mi);
    let oci = mi.add(&fws).sub(&fwr);
    let fwr_total = contributions.values().fold(0.0, |acc, v| acc + v);
    let result = PidfFeatureResult {
        feature: i,
        mi: mi.mean,
        fws: fws.mean,
        fwr_total,
        fwr_contributions: contributions,
        max_synergy_set: surviving,
        redundant_set,
        mci: mi.mean + fws.mean,
        oci: mi.mean + fws.mean - fwr_total,
        fws_within_noise: fws.mean < 0.0 && fws.mean.abs() < 2.0 * fws.std,
        ensembles: FeatureEnsembles { mi, fws, fwr, oci },
    };
    let trace = FeatureTrace {
        feature: i,
        pairwise_mi: ranked.iter().map(|(_, p)| p.mean).collect(),
        candidate_order: ranked.into_iter().map(|(j, _)| j).collect(),
        evaluations,
        removed,
    };
    Ok((result, trace))
}

/// Runs the decomposition for every feature against a prepared engine.
pub fn run_pidf_with(engine: &MiEngine, cfg: &PidfConfig) -> Result<(PidfReport, PidfTrace)> {
    cfg.validate()?;
    let data = engine.data();
    let per_feature = (0..data.n_features())
        .into_par_iter()
        .map(|i| analyse_feature(engine, i, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (features, traces): (Vec<_>, Vec<_>) = per_feature.into_iter().unzip();
    let est = engine.config();
    let report = PidfReport {
        features,
        estimator: est.clone(),
        repetitions: est.repetitions,
        alpha: cfg.alpha,
        eps_zero: cfg.eps_zero,
        unit: Unit::Nats,
        dataset: DatasetFingerprint::of(data, est.base_seed),
    };
    Ok((report.in_units(cfg.unit), PidfTrace { features: traces }))
}

/// Decomposes every feature of `data`. Values are reported in `cfg.unit`.
pub fn run_pidf(data: &Dataset, cfg: &PidfConfig) -> Result<(PidfReport, PidfTrace)> {
    cfg.validate()?;
    let engine = MiEngine::new(data, &cfg.estimator)?;
    run_pidf_with(&engine, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceFws {
    /// Maximal interaction information, in nats.
    pub value: f64,
    /// Every subset reaching the maximum (within [`TIE_TOLERANCE`]), in
    /// enumeration order.
    pub maximizers: Vec<FeatureSubset>,
}

/// Maximises `I(Y; F_i; P)` over every subset `P` of the other features,
/// the empty set included.
pub fn brute_force_fws(
    data: &Dataset,
    i: usize,
    cfg: &EstimatorConfig,
    cap: usize,
) -> Result<BruteForceFws> {
    let n = data.n_features();
    if i >= n {
        return Err(Error::IndexOutOfRange {
            index: i,
            n_features: n,
        });
    }
    if n > cap {
        return Err(Error::CapExceeded { features: n, cap });
    }
    let engine = MiEngine::new(data, cfg)?;
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mi = engine.mi(&target(), &[Var::Feature(i)])?.mean;
    let scores = (0u64..1 << others.len())
        .into_par_iter()
        .map(|mask| {
            let subset = FeatureSubset::from_sorted_unchecked(
                others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect(),
            );
            let ii = conditional_gain(&engine, i, &subset)?.mean - mi;
            Ok((subset, ii))
        })
        .collect::<Result<Vec<_>>>()?;
    let value = scores
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers = scores
        .into_iter()
        .filter(|(_, s)| *s >= value - TIE_TOLERANCE)
        .map(|(p, _)| p)
        .collect();
    Ok(BruteForceFws { value, maximizers })
}
