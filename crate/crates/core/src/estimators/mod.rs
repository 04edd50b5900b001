//! Mutual information estimators over groups of columns.
//!
//! A group is a set of [`Var`]s (feature columns and/or the target). Every
//! estimator is driven through an [`MiEngine`], which prepares the column data
//! once, derives one seed per repetition and caches ensembles by query so the
//! decomposition can ask for the same term many times.

mod binned;
mod discrete;
mod ksg;
pub mod mine;

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dataset, EstimateEnsemble, FeatureSubset};

pub use mine::{MineConfig, MineState};

pub(crate) use discrete::DiscreteColumns;

/// One variable of a joint group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Feature(usize),
    Target,
}

impl Var {
    /// Column slot in prepared storage: features first, the target last.
    fn slot(self, n_features: usize) -> usize {
        match self {
            Var::Feature(i) => i,
            Var::Target => n_features,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Feature(i) => write!(f, "F{i}"),
            Var::Target => write!(f, "Y"),
        }
    }
}

/// Canonical (sorted, deduplicated) group built from a feature subset.
pub fn group(subset: &FeatureSubset) -> Vec<Var> {
    subset.iter().map(Var::Feature).collect()
}

pub fn target() -> Vec<Var> {
    vec![Var::Target]
}

fn canonical(vars: &[Var]) -> Vec<Var> {
    let mut v = vars.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EstimatorKind {
    /// Plug-in estimate from empirical joint frequencies.
    ExactDiscrete,
    /// Equal-frequency binning of continuous columns, then plug-in.
    Binned { bins: usize },
    /// Kraskov-Stoegbauer-Grassberger k-nearest-neighbour estimator.
    Ksg { k: usize },
    /// Neural Donsker-Varadhan lower bound.
    Mine(MineConfig),
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::ExactDiscrete => "exact",
            EstimatorKind::Binned { .. } => "binned",
            EstimatorKind::Ksg { .. } => "ksg",
            EstimatorKind::Mine(_) => "mine",
        }
    }

    /// Whether repeated runs with different seeds give identical estimates.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, EstimatorKind::Mine(_))
    }
}

pub const DEFAULT_REPETITIONS: usize = 5;
pub const DEFAULT_BINS: usize = 8;
pub const DEFAULT_KSG_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub repetitions: usize,
    pub base_seed: u64,
}

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorConfig {
            kind,
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
        }
    }

    pub fn exact() -> Self {
        Self::new(EstimatorKind::ExactDiscrete)
    }

    pub fn ksg(k: usize) -> Self {
        Self::new(EstimatorKind::Ksg { k })
    }

    pub fn binned(bins: usize) -> Self {
        Self::new(EstimatorKind::Binned { bins })
    }

    pub fn mine(cfg: MineConfig) -> Self {
        Self::new(EstimatorKind::Mine(cfg))
    }

    /// Exact plug-in when every column is discrete, KSG with k = 3 otherwise.
    pub fn default_for(data: &Dataset) -> Self {
        if data.all_discrete() {
            Self::exact()
        } else {
            Self::ksg(DEFAULT_KSG_K)
        }
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repetitions as u64)
            .map(|r| self.base_seed.wrapping_add(r))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        match &self.kind {
            EstimatorKind::Binned { bins } if *bins < 2 => Err(Error::Config(
                "binned estimator needs at least 2 bins".into(),
            )),
            EstimatorKind::Ksg { k } if *k == 0 => Err(Error::Config("KSG needs k >= 1".into())),
            EstimatorKind::Mine(m) => m.validate(),
            _ => Ok(()),
        }
    }
}

/// SplitMix64 finalizer; stable across platforms and toolchains.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn query_seed(seed: u64, left: &[Var], right: &[Var]) -> u64 {
    let mut h = mix64(seed);
    for (side, vars) in [(1u64, left), (2u64, right)] {
        h = mix64(h ^ side);
        for v in vars {
            let code = match v {
                Var::Feature(i) => *i as u64 + 1,
                Var::Target => 0,
            };
            h = mix64(h ^ code);
        }
    }
    h
}

enum Prepared {
    Discrete(DiscreteColumns),
    Continuous(Vec<Vec<f64>>),
}

type QueryKey = (Vec<Var>, Vec<Var>);

/// Cached, seeded front end to one estimator over one dataset.
pub struct MiEngine<'a> {
    data: &'a Dataset,
    cfg: EstimatorConfig,
    prepared: Prepared,
    cache: Mutex<HashMap<QueryKey, EstimateEnsemble>>,
}

impl<'a> MiEngine<'a> {
    pub fn new(data: &'a Dataset, cfg: &EstimatorConfig) -> Result<Self> {
        cfg.validate()?;
        let prepared = match &cfg.kind {
            EstimatorKind::ExactDiscrete => {
                Prepared::Discrete(DiscreteColumns::from_dataset(data, "the exact estimator")?)
            }
            EstimatorKind::Binned { bins } => Prepared::Discrete(binned::bin_dataset(data, *bins)),
            EstimatorKind::Ksg { .. } | EstimatorKind::Mine(_) => {
                Prepared::Continuous(ksg::standardized_columns(data))
            }
        };
        if let EstimatorKind::Mine(m) = &cfg.kind {
            if m.batch_size > data.n_samples() {
                return Err(Error::BatchTooLarge {
                    batch: m.batch_size,
                    n_samples: data.n_samples(),
                });
            }
        }
        Ok(MiEngine {
            data,
            cfg: cfg.clone(),
            prepared,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    fn check(&self, vars: &[Var]) -> Result<()> {
        let n_features = self.data.n_features();
        for v in vars {
            if let Var::Feature(index) = *v {
                if index >= n_features {
                    return Err(Error::IndexOutOfRange { index, n_features });
                }
            }
        }
        Ok(())
    }

    /// Ensemble of I(left; right), one estimate per repetition seed.
    pub fn mi(&self, left: &[Var], right: &[Var]) -> Result<EstimateEnsemble> {
        self.check(left)?;
        self.check(right)?;
        let (a, b) = (canonical(left), canonical(right));
        if a.is_empty() || b.is_empty() {
            return Ok(EstimateEnsemble::constant(0.0, self.cfg.seeds()));
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let ensemble = self.compute(&key.0, &key.1)?;
        self.cache.lock().unwrap().insert(key, ensemble.clone());
        Ok(ensemble)
    }

    fn compute(&self, left: &[Var], right: &[Var]) -> Result<EstimateEnsemble> {
        let seeds = self.cfg.seeds();
        let nf = self.data.n_features();
        let slots = |vars: &[Var]| vars.iter().map(|v| v.slot(nf)).collect::<Vec<_>>();
        let (ls, rs) = (slots(left), slots(right));
        match (&self.cfg.kind, &self.prepared) {
            (
                EstimatorKind::ExactDiscrete | EstimatorKind::Binned { .. },
                Prepared::Discrete(d),
            ) => Ok(EstimateEnsemble::constant(d.mi(&ls, &rs), seeds)),
            (EstimatorKind::Ksg { k }, Prepared::Continuous(cols)) => {
                let pick = |s: &[usize]| s.iter().map(|&i| cols[i].as_slice()).collect::<Vec<_>>();
                let value = ksg::ksg_mi(&pick(&ls), &pick(&rs), *k);
                Ok(EstimateEnsemble::constant(value, seeds))
            }
            (EstimatorKind::Mine(m), Prepared::Continuous(cols)) => {
                let pick = |s: &[usize]| s.iter().map(|&i| cols[i].as_slice()).collect::<Vec<_>>();
                let estimates = seeds
                    .par_iter()
                    .map(|&s| mine::mine_mi(&pick(&ls), &pick(&rs), m, query_seed(s, left, right)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(EstimateEnsemble::new(estimates, seeds))
            }
            _ => unreachable!("prepared storage always matches the estimator kind"),
        }
    }

    /// Plug-in entropy of a group; only for the discrete estimators.
    pub fn entropy(&self, vars: &[Var]) -> Result<EstimateEnsemble> {
        self.check(vars)?;
        let nf = self.data.n_features();
        match &self.prepared {
            Prepared::Discrete(d) => {
                let slots: Vec<usize> = canonical(vars).iter().map(|v| v.slot(nf)).collect();
                Ok(EstimateEnsemble::constant(
                    d.entropy(&slots),
                    self.cfg.seeds(),
                ))
            }
            Prepared::Continuous(_) => Err(Error::Config(format!(
                "entropy is only defined for discrete estimators, not `{}`",
                self.cfg.kind.name()
            ))),
        }
    }
}

/// Independent pairs drawn when measuring the KSG null spread.
pub const NULL_DRAWS: usize = 30;

/// Standard deviation of KSG estimates between independent Gaussian columns
/// of length `n_samples`, over [`NULL_DRAWS`] seeded draws.
pub fn ksg_null_spread(n_samples: usize, k: usize, seed: u64) -> f64 {
    ksg::null_spread(
        n_samples,
        k.min(n_samples.saturating_sub(1)).max(1),
        NULL_DRAWS,
        seed,
    )
}

/// Ensemble estimate of I(left; right).
///
/// An empty group on either side yields exactly zero.
pub fn estimate_mi(
    data: &Dataset,
    left: &[Var],
    right: &[Var],
    cfg: &EstimatorConfig,
) -> Result<EstimateEnsemble> {
    MiEngine::new(data, cfg)?.mi(left, right)
}

/// Plug-in Shannon entropy (nats) of a group of discrete columns.
pub fn estimate_entropy(
    data: &Dataset,
    group: &[Var],
    cfg: &EstimatorConfig,
) -> Result<EstimateEnsemble> {
    if !matches!(cfg.kind, EstimatorKind::ExactDiscrete) {
        return Err(Error::Config(
            "entropy estimation requires the exact estimator".into(),
        ));
    }
    MiEngine::new(data, cfg)?.entropy(group)
}
