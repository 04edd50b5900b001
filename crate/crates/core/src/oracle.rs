//! Brute-force reference computations over an explicit joint distribution.
//!
//! Nothing here goes through the estimator layer. Mutual information is
//! computed directly as `sum p(a,b) ln(p(a,b) / (p(a) p(b)))` over a sorted
//! outcome map, and every subset quantity comes from exhaustive enumeration.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pidf::TIE_TOLERANCE;
use crate::types::{Dataset, FeatureSubset};

pub const ORACLE_CAP: usize = 15;
pub const THEOREM_CAP: usize = 10;

/// Probability of every observed outcome tuple `(f_0, .., f_{n-1}, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    n_features: usize,
    probs: BTreeMap<Vec<u32>, f64>,
}

impl JointTable {
    /// Empirical distribution of the rows of a discrete dataset.
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        let mut cols = Vec::with_capacity(data.n_features() + 1);
        for col in data.features().iter().chain(std::iter::once(data.target())) {
            cols.push(col.codes().ok_or_else(|| Error::ContinuousColumn {
                column: col.name().to_string(),
                what: "the oracle",
            })?);
        }
        let n = data.n_samples();
        let rows = (0..n).map(|r| (cols.iter().map(|c| c[r]).collect(), 1.0));
        Ok(Self::from_weights(data.n_features(), rows))
    }

    /// Normalised table from (outcome, non-negative weight) pairs; the last
    /// entry of each outcome is the target.
    pub fn from_weights(
        n_features: usize,
        outcomes: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Self {
        let mut probs: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (tuple, w) in outcomes {
            assert_eq!(tuple.len(), n_features + 1, "outcome arity");
            assert!(w >= 0.0 && w.is_finite(), "weights must be non-negative");
            if w > 0.0 {
                *probs.entry(tuple).or_insert(0.0) += w;
            }
        }
        let total: f64 = probs.values().sum();
        assert!(total > 0.0, "a joint table needs positive total weight");
        for p in probs.values_mut() {
            *p /= total;
        }
        JointTable { n_features, probs }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Column index of the target within outcome tuples.
    pub fn target(&self) -> usize {
        self.n_features
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    fn marginal(&self, cols: &[usize]) -> BTreeMap<Vec<u32>, f64> {
        let mut m = BTreeMap::new();
        for (tuple, p) in &self.probs {
            let key: Vec<u32> = cols.iter().map(|&c| tuple[c]).collect();
            *m.entry(key).or_insert(0.0) += p;
        }
        m
    }

    pub fn entropy(&self, cols: &[usize]) -> f64 {
        self.marginal(cols)
            .values()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Mutual information (nats) between two column groups.
    pub fn mi(&self, left: &[usize], right: &[usize]) -> f64 {
        if left.is_empty() || right.is_empty() {
            return 0.0;
        }
        let pl = self.marginal(left);
        let pr = self.marginal(right);
        let mut both: Vec<usize> = left.to_vec();
        both.extend_from_slice(right);
        let pj = self.marginal(&both);
        pj.iter()
            .map(|(key, &p)| {
                let (a, b) = key.split_at(left.len());
                p * (p / (pl[a] * pr[b])).ln()
            })
            .sum()
    }
}

/// Mutual information between two column groups of a discrete table.
pub fn oracle_mi(table: &JointTable, left: &[usize], right: &[usize]) -> f64 {
    table.mi(left, right)
}

fn mask_cols(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// `I(Y; S)` for every feature subset `S`, indexed by bit mask.
fn target_information(table: &JointTable) -> Vec<f64> {
    let y = [table.target()];
    (0..1u64 << table.n_features())
        .map(|mask| table.mi(&y, &mask_cols(mask)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFeature {
    pub feature: usize,
    pub mi: f64,
    /// Maximal interaction information over all subsets of the others.
    pub fws: f64,
    /// `fws - II(Y; F_i; all others)`.
    pub fwr: f64,
    pub mci: f64,
    /// `I(Y; F) - I(Y; F without F_i)`.
    pub oci: f64,
    pub maximizers: Vec<FeatureSubset>,
}

/// Definitional per-feature quantities by exhaustive subset search.
pub fn oracle_pidf(table: &JointTable) -> Result<Vec<OracleFeature>> {
    let n = table.n_features();
    if n > ORACLE_CAP {
        return Err(Error::CapExceeded {
            features: n,
            cap: ORACLE_CAP,
        });
    }
    let iy = target_information(table);
    let full = (1u64 << n) - 1;
    Ok((0..n)
        .map(|i| {
            let bit = 1u64 << i;
            let rest = full & !bit;
            let mi = iy[bit as usize];
            let ii = |p: u64| iy[(p | bit) as usize] - mi - iy[p as usize];
            // Enumerate every submask of `rest`, the empty set included.
            let mut scores = Vec::new();
            let mut p = rest;
            loop {
                scores.push((p, ii(p)));
                if p == 0 {
                    break;
                }
                p = (p - 1) & rest;
            }
            scores.sort_by_key(|(m, _)| *m);
            let fws = scores
                .iter()
                .map(|(_, s)| *s)
                .fold(f64::NEG_INFINITY, f64::max);
            let maximizers = scores
                .iter()
                .filter(|(_, s)| *s >= fws - TIE_TOLERANCE)
                .map(|(m, _)| FeatureSubset::from_sorted_unchecked(mask_cols(*m)))
                .collect();
            let fwr = fws - ii(rest);
            OracleFeature {
                feature: i,
                mi,
                fws,
                fwr,
                mci: mi + fws,
                oci: iy[full as usize] - iy[rest as usize],
                maximizers,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    /// max over features of |MCI - FWR - OCI|.
    pub max_identity_residual: f64,
    pub triples: usize,
    /// Triples with θ above `2 H(F_i) - I(F_i; F_j)`.
    pub upper_violations: usize,
    /// Triples with θ below `-I(F_i; F_j)` although the pairwise-redundancy
    /// assumption holds for them.
    pub lower_violations: usize,
    /// Triples where `I(F_i; ctx) + I(F_i; F_j) < I(F_i; ctx ∪ F_j)`.
    pub assumption_failures: usize,
    /// Lower-bound breaches among the triples where the assumption fails.
    pub lower_breaches_without_assumption: usize,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.max_identity_residual < 1e-9
            && self.upper_violations == 0
            && self.lower_violations == 0
    }
}

/// Checks the OCI identity and the θ bounds on every `(i, j, context)` triple.
pub fn check_theorems(table: &JointTable) -> Result<TheoremReport> {
    let n = table.n_features();
    if n > THEOREM_CAP {
        return Err(Error::CapExceeded {
            features: n,
            cap: THEOREM_CAP,
        });
    }
    let max_identity_residual = oracle_pidf(table)?
        .iter()
        .map(|f| (f.mci - f.fwr - f.oci).abs())
        .fold(0.0, f64::max);

    let iy = target_information(table);
    let mut feature_info: HashMap<(usize, u64), f64> = HashMap::new();
    let mut fi_mi = |i: usize, mask: u64| -> f64 {
        *feature_info
            .entry((i, mask))
            .or_insert_with(|| table.mi(&[i], &mask_cols(mask)))
    };
    let gain = |i: usize, ctx: u64| iy[(ctx | 1 << i) as usize] - iy[ctx as usize];

    let tol = 1e-9;
    let mut report = TheoremReport {
        max_identity_residual,
        triples: 0,
        upper_violations: 0,
        lower_violations: 0,
        assumption_failures: 0,
        lower_breaches_without_assumption: 0,
    };
    let full = (1u64 << n) - 1;
    for i in 0..n {
        let h_i = table.entropy(&[i]);
        for j in (0..n).filter(|&j| j != i) {
            let pair = fi_mi(i, 1 << j);
            let others = full & !(1 << i) & !(1 << j);
            let mut ctx = others;
            loop {
                report.triples += 1;
                let theta = gain(i, ctx | 1 << j) - gain(i, ctx);
                if theta > 2.0 * h_i - pair + tol {
                    report.upper_violations += 1;
                }
                let holds = fi_mi(i, ctx) + pair >= fi_mi(i, ctx | 1 << j) - tol;
                let breached = theta < -pair - tol;
                match (holds, breached) {
                    (true, true) => report.lower_violations += 1,
                    (false, true) => {
                        report.assumption_failures += 1;
                        report.lower_breaches_without_assumption += 1;
                    }
                    (false, false) => report.assumption_failures += 1,
                    (true, false) => {}
                }
                if ctx == 0 {
                    break;
                }
                ctx = (ctx - 1) & others;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn table(n: usize, rows: &[&[u32]]) -> JointTable {
        JointTable::from_weights(n, rows.iter().map(|r| (r.to_vec(), 1.0)))
    }

    #[test]
    fn fair_coin_self_information() {
        let t = table(1, &[&[0, 0], &[1, 1]]);
        assert!((oracle_mi(&t, &[0], &[0]) - LN_2).abs() < 1e-15);
        assert!((oracle_mi(&t, &[0], &[1]) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn xor_full_determination() {
        let t = table(2, &[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        assert!(oracle_mi(&t, &[2], &[0]).abs() < 1e-15);
        assert!((oracle_mi(&t, &[2], &[0, 1]) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn independent_noise_feature_is_inert() {
        // Y = F0, F1 independent noise.
        let t = table(2, &[&[0, 0, 0], &[0, 1, 0], &[1, 0, 1], &[1, 1, 1]]);
        let f = &oracle_pidf(&t).unwrap()[1];
        assert!(f.mi.abs() < 1e-15 && f.fws.abs() < 1e-15 && f.fwr.abs() < 1e-15);
    }

    #[test]
    fn lower_bound_needs_the_assumption() {
        // F0 = F1 xor F2 and Y = F0: F1 and F2 jointly determine F0 although
        // each alone says nothing about it.
        let mut rows = Vec::new();
        for a in 0..2u32 {
            for b in 0..2u32 {
                rows.push(vec![a ^ b, a, b, a ^ b]);
            }
        }
        let t = JointTable::from_weights(3, rows.into_iter().map(|r| (r, 1.0)));
        let rep = check_theorems(&t).unwrap();
        assert_eq!(rep.upper_violations, 0);
        assert_eq!(rep.lower_violations, 0);
        assert!(rep.assumption_failures > 0);
        assert!(rep.lower_breaches_without_assumption > 0);
    }

    #[test]
    fn caps() {
        let t = JointTable::from_weights(11, [(vec![0; 12], 1.0)]);
        assert!(matches!(
            check_theorems(&t),
            Err(Error::CapExceeded { cap: 10, .. })
        ));
        let t = JointTable::from_weights(16, [(vec![0; 17], 1.0)]);
        assert!(matches!(
            oracle_pidf(&t),
            Err(Error::CapExceeded { cap: 15, .. })
        ));
    }
}
