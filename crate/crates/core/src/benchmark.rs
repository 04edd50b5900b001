//! Selection accuracy over seeded synthetic datasets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{generate, ground_truth, DatasetId, GeneratorSpec};
use crate::error::Result;
use crate::estimators::EstimatorConfig;
use crate::pidf::{default_eps_zero, run_pidf, PidfConfig};
use crate::selection::{confusion_counts, select_features, Confusion};

/// Reference (TP, FP, TN, FN) for each benchmark dataset.
pub fn expected_confusion(id: DatasetId) -> Option<Confusion> {
    let (tp, fp, tn, fn_) = match id {
        DatasetId::Rvq => (2, 0, 1, 0),
        DatasetId::Svq => (2, 0, 0, 0),
        DatasetId::Msq => (1, 0, 2, 0),
        DatasetId::Wt => (2, 0, 1, 0),
        DatasetId::Terc1 => (3, 0, 3, 0),
        DatasetId::Terc2 => (3, 0, 3, 0),
        DatasetId::Ubr => (1, 0, 3, 0),
        DatasetId::Sg => (3, 0, 0, 0),
        DatasetId::Dupsum => return None,
    };
    Some(Confusion { tp, fp, tn, fn_ })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub selected: Vec<usize>,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: DatasetId,
    pub outcomes: Vec<SeedOutcome>,
    /// Mean (TP, FP, TN, FN) over seeds.
    pub mean: [f64; 4],
    pub expected: Option<Confusion>,
    /// Seeds whose counts equal `expected`.
    pub matching: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_samples: usize,
    pub seeds: Vec<u64>,
    /// `None` picks exact for discrete data and KSG otherwise.
    pub estimator: Option<EstimatorConfig>,
    pub alpha: f64,
    /// `None` uses [`default_eps_zero`] for the chosen estimator.
    pub eps_zero: Option<f64>,
}

impl BenchConfig {
    pub fn new(seeds: Vec<u64>) -> Self {
        BenchConfig {
            n_samples: crate::datasets::DEFAULT_SAMPLES,
            seeds,
            estimator: None,
            alpha: crate::pidf::DEFAULT_ALPHA,
            eps_zero: None,
        }
    }
}

fn run_one(id: DatasetId, seed: u64, cfg: &BenchConfig) -> Result<SeedOutcome> {
    let data = generate(&GeneratorSpec::new(id, cfg.n_samples, seed))?;
    let estimator = cfg
        .estimator
        .clone()
        .unwrap_or_else(|| EstimatorConfig::default_for(&data))
        .with_seed(seed);
    let eps_zero = cfg
        .eps_zero
        .unwrap_or_else(|| default_eps_zero(&data, &estimator, cfg.alpha));
    let pidf = PidfConfig {
        alpha: cfg.alpha,
        eps_zero,
        ..PidfConfig::new(estimator)
    };
    let (report, _) = run_pidf(&data, &pidf)?;
    let selection = select_features(&report, cfg.alpha, eps_zero);
    Ok(SeedOutcome {
        seed,
        selected: selection.selected.indices().to_vec(),
        confusion: confusion_counts(&selection, &ground_truth(id)),
    })
}

pub fn bench_dataset(id: DatasetId, cfg: &BenchConfig) -> Result<BenchRow> {
    let outcomes = cfg
        .seeds
        .par_iter()
        .map(|&s| run_one(id, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let k = outcomes.len().max(1) as f64;
    let mut mean = [0.0; 4];
    for o in &outcomes {
        let (tp, fp, tn, fn_) = o.confusion.as_tuple();
        for (m, v) in mean.iter_mut().zip([tp, fp, tn, fn_]) {
            *m += v as f64 / k;
        }
    }
    let expected = expected_confusion(id);
    let matching = outcomes
        .iter()
        .filter(|o| Some(o.confusion) == expected)
        .count();
    Ok(BenchRow {
        id,
        outcomes,
        mean,
        expected,
        matching,
    })
}

pub fn run_benchmark(ids: &[DatasetId], cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    ids.iter().map(|&id| bench_dataset(id, cfg)).collect()
}
