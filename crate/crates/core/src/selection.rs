//! Turning a decomposition report into a selected feature subset.
//!
//! Features with information left over after removing their redundancy enter
//! first. The rest are visited by descending maximal information and enter
//! only if none of their redundant partners is already in.

use serde::{Deserialize, Serialize};

use crate::stats::significantly_positive;
use crate::types::{FeatureSubset, PidfReport, Rationale, SelectionResult, Unit};

pub fn select_features(report: &PidfReport, alpha: f64, eps_zero: f64) -> SelectionResult {
    // Thresholds are in nats, so compare in nats.
    let report = report.in_units(Unit::Nats);
    let n = report.features.len();
    let mut rationale: Vec<Option<Rationale>> = vec![None; n];
    let mut selected: Vec<usize> = Vec::new();

    for f in &report.features {
        if significantly_positive(&f.ensembles.oci, alpha, eps_zero) {
            rationale[f.feature] = Some(Rationale::NonRedundant);
            selected.push(f.feature);
        }
    }

    let mut rest: Vec<_> = report
        .features
        .iter()
        .filter(|f| rationale[f.feature].is_none())
        .collect();
    rest.sort_by(|a, b| b.mci.total_cmp(&a.mci).then(a.feature.cmp(&b.feature)));
    for f in rest {
        let blocking: Vec<usize> = f
            .redundant_set
            .iter()
            .filter(|j| selected.contains(j))
            .collect();
        if blocking.is_empty() {
            rationale[f.feature] = Some(Rationale::RankedAndCompatible);
            selected.push(f.feature);
        } else {
            rationale[f.feature] = Some(Rationale::RejectedRedundant { blocking });
        }
    }

    selected.sort_unstable();
    SelectionResult {
        selected: FeatureSubset::from_sorted_unchecked(selected),
        rationale: rationale
            .into_iter()
            .map(|r| r.expect("every feature is visited in one of the two phases"))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn as_tuple(self) -> (usize, usize, usize, usize) {
        (self.tp, self.fp, self.tn, self.fn_)
    }
}

/// Expected selection as a list of slots. A slot is filled by selecting any
/// one of its members; members of a slot are interchangeable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub n_features: usize,
    pub slots: Vec<FeatureSubset>,
}

impl GroundTruth {
    /// Every listed feature is its own slot.
    pub fn exact(truth: &FeatureSubset, n_features: usize) -> Self {
        GroundTruth {
            n_features,
            slots: truth
                .iter()
                .map(|i| FeatureSubset::from_sorted_unchecked(vec![i]))
                .collect(),
        }
    }
}

/// TP counts filled slots; a selected feature that fills no new slot is a FP;
/// unfilled slots are FN; TN is what remains of the feature count.
pub fn confusion_counts(selection: &SelectionResult, truth: &GroundTruth) -> Confusion {
    let mut filled = vec![false; truth.slots.len()];
    let mut c = Confusion::default();
    for i in selection.selected.iter() {
        match (0..truth.slots.len()).find(|&s| !filled[s] && truth.slots[s].contains(i)) {
            Some(s) => {
                filled[s] = true;
                c.tp += 1;
            }
            None => c.fp += 1,
        }
    }
    c.fn_ = filled.iter().filter(|f| !**f).count();
    c.tn = truth.n_features.saturating_sub(c.tp + c.fp + c.fn_);
    c
}
