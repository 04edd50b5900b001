//! Seeded synthetic benchmark datasets.
//!
//! Every latent variable draws from its own ChaCha8 stream (same 64-bit
//! seed, distinct stream id), so a generator's columns never depend on how
//! many values another column consumed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::GroundTruth;
use crate::types::{Column, Dataset, FeatureSubset};

pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetId {
    /// Y = F0 + 2 F1 with F2 a copy of F1.
    Rvq,
    /// Y = F0 xor F1.
    Svq,
    /// Y = F0 = F1 + F2.
    Msq,
    /// Continuous: two noisy views of one latent plus a correcting column.
    Wt,
    /// Parity-style target on three bits, F0 copied three times.
    Terc1,
    /// Same target, every informative bit copied once.
    Terc2,
    /// Continuous ancestors, descendants and relatives of the target.
    Ubr,
    /// Two synergistic genes and one redundant marker of a binary label.
    Sg,
    /// Y = F0 + F1 with F2 = F0 and F3 = F1.
    Dupsum,
}

impl DatasetId {
    pub const ALL: [DatasetId; 9] = [
        DatasetId::Rvq,
        DatasetId::Svq,
        DatasetId::Msq,
        DatasetId::Wt,
        DatasetId::Terc1,
        DatasetId::Terc2,
        DatasetId::Ubr,
        DatasetId::Sg,
        DatasetId::Dupsum,
    ];

    /// The eight datasets of the selection benchmark.
    pub const BENCHMARK: [DatasetId; 8] = [
        DatasetId::Rvq,
        DatasetId::Svq,
        DatasetId::Msq,
        DatasetId::Wt,
        DatasetId::Terc1,
        DatasetId::Terc2,
        DatasetId::Ubr,
        DatasetId::Sg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::Rvq => "rvq",
            DatasetId::Svq => "svq",
            DatasetId::Msq => "msq",
            DatasetId::Wt => "wt",
            DatasetId::Terc1 => "terc1",
            DatasetId::Terc2 => "terc2",
            DatasetId::Ubr => "ubr",
            DatasetId::Sg => "sg",
            DatasetId::Dupsum => "dupsum",
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, DatasetId::Wt | DatasetId::Ubr)
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect();
        DatasetId::ALL
            .into_iter()
            .find(|id| id.name() == key || (key == "umfibr" && *id == DatasetId::Ubr))
            .ok_or_else(|| Error::UnknownDataset(s.to_string()))
    }
}

/// Which bits the TERC target compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TercRule {
    /// Y = 0 iff F0 = F1 = F2.
    #[default]
    AllEqual,
    /// Y = 0 iff F1 = F2.
    LastPair,
}

impl FromStr for TercRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "all_equal" => Ok(TercRule::AllEqual),
            "last_pair" => Ok(TercRule::LastPair),
            other => Err(Error::Config(format!(
                "unknown TERC rule `{other}` (expected all_equal or last_pair)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: DatasetId,
    pub n_samples: usize,
    pub seed: u64,
    pub terc_rule: TercRule,
}

impl GeneratorSpec {
    pub fn new(id: DatasetId, n_samples: usize, seed: u64) -> Self {
        GeneratorSpec {
            id,
            n_samples,
            seed,
            terc_rule: TercRule::default(),
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn bits(seed: u64, id: u64, n: usize) -> Vec<u32> {
    let mut rng = stream(seed, id);
    (0..n).map(|_| rng.random_bool(0.5) as u32).collect()
}

fn normals(seed: u64, id: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, id);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn uniforms(seed: u64, id: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = stream(seed, id);
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn named(features: Vec<(Vec<u32>, u32)>, target: (Vec<u32>, u32)) -> Result<Dataset> {
    let cols = features
        .into_iter()
        .enumerate()
        .map(|(k, (codes, card))| Column::discrete(format!("f{k}"), codes, card))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(cols, Column::discrete("target", target.0, target.1)?)
}

fn named_continuous(features: Vec<Vec<f64>>, target: Vec<f64>) -> Result<Dataset> {
    let cols = features
        .into_iter()
        .enumerate()
        .map(|(k, v)| Column::continuous(format!("f{k}"), v))
        .collect();
    Dataset::new(cols, Column::continuous("target", target))
}

fn terc_target(f0: &[u32], f1: &[u32], f2: &[u32], rule: TercRule) -> Vec<u32> {
    (0..f0.len())
        .map(|r| {
            let zero = match rule {
                TercRule::AllEqual => f0[r] == f1[r] && f1[r] == f2[r],
                TercRule::LastPair => f1[r] == f2[r],
            };
            u32::from(!zero)
        })
        .collect()
}

/// Discrete columns from binary inputs `f0, f1, f2` following `id`'s rules.
fn from_bits(
    id: DatasetId,
    a: Vec<u32>,
    b: Vec<u32>,
    c: Vec<u32>,
    rule: TercRule,
) -> Result<Dataset> {
    match id {
        DatasetId::Rvq => {
            let y = a.iter().zip(&b).map(|(x, z)| x + 2 * z).collect();
            named(vec![(a, 2), (b.clone(), 2), (b, 2)], (y, 4))
        }
        DatasetId::Svq => {
            let y = a.iter().zip(&b).map(|(x, z)| x ^ z).collect();
            named(vec![(a, 2), (b, 2)], (y, 2))
        }
        DatasetId::Msq => {
            let sum: Vec<u32> = a.iter().zip(&b).map(|(x, z)| x + z).collect();
            named(vec![(sum.clone(), 3), (a, 2), (b, 2)], (sum, 3))
        }
        DatasetId::Terc1 => {
            let y = terc_target(&a, &b, &c, rule);
            named(
                vec![
                    (a.clone(), 2),
                    (b, 2),
                    (c, 2),
                    (a.clone(), 2),
                    (a.clone(), 2),
                    (a, 2),
                ],
                (y, 2),
            )
        }
        DatasetId::Terc2 => {
            let y = terc_target(&a, &b, &c, rule);
            named(
                vec![
                    (a.clone(), 2),
                    (b.clone(), 2),
                    (c.clone(), 2),
                    (a, 2),
                    (b, 2),
                    (c, 2),
                ],
                (y, 2),
            )
        }
        DatasetId::Dupsum => {
            let y = a.iter().zip(&b).map(|(x, z)| x + z).collect();
            named(vec![(a.clone(), 2), (b.clone(), 2), (a, 2), (b, 2)], (y, 3))
        }
        _ => unreachable!("not a bit-driven dataset"),
    }
}

fn sg(labels: Vec<u32>, pair_draw: &[f64], marker_draw: &[f64]) -> Result<Dataset> {
    let n = labels.len();
    let (mut g0, mut g1, mut g2) = (vec![0; n], vec![0; n], vec![0; n]);
    for r in 0..n {
        let healthy = labels[r] == 0;
        let both = if healthy { 0.95 } else { 0.05 };
        let u = pair_draw[r];
        // 11 with probability `both`, otherwise 00, 01, 10 equally likely.
        let (a, b) = if u < both {
            (1, 1)
        } else {
            match ((u - both) / (1.0 - both) * 3.0) as u32 {
                0 => (0, 0),
                1 => (0, 1),
                _ => (1, 0),
            }
        };
        g0[r] = a;
        g1[r] = b;
        let p = if healthy { 0.2 } else { 0.8 };
        g2[r] = u32::from(marker_draw[r] < p);
    }
    named(vec![(g0, 2), (g1, 2), (g2, 2)], (labels, 2))
}

/// Draws `spec.n_samples` rows of the requested dataset.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    let n = spec.n_samples;
    if n == 0 {
        return Err(Error::Config(
            "a generated dataset needs at least one sample".into(),
        ));
    }
    let s = spec.seed;
    match spec.id {
        DatasetId::Rvq
        | DatasetId::Svq
        | DatasetId::Terc1
        | DatasetId::Terc2
        | DatasetId::Dupsum => from_bits(
            spec.id,
            bits(s, 0, n),
            bits(s, 1, n),
            bits(s, 2, n),
            spec.terc_rule,
        ),
        DatasetId::Msq => from_bits(
            spec.id,
            bits(s, 1, n),
            bits(s, 2, n),
            vec![],
            spec.terc_rule,
        ),
        DatasetId::Wt => {
            let (e1, e2, e3) = (normals(s, 0, n), normals(s, 1, n), normals(s, 2, n));
            let f2 = normals(s, 3, n);
            let f0 = (0..n).map(|r| e1[r] + 0.1 * f2[r]).collect();
            let f1 = (0..n)
                .map(|r| 0.8 * e1[r] + 0.2 * e2[r] + 0.01 * f2[r])
                .collect();
            let y = (0..n).map(|r| e1[r].sin() + 0.1 * e3[r]).collect();
            named_continuous(vec![f0, f1, f2], y)
        }
        DatasetId::Ubr => {
            let e1 = uniforms(s, 0, n, -1.0, 1.0);
            let e2 = uniforms(s, 1, n, -0.5, 0.5);
            let e3: Vec<f64> = {
                let mut rng = stream(s, 2);
                (0..n).map(|_| Exp1.sample(&mut rng)).collect()
            };
            let e4 = normals(s, 3, n);
            let f0 = normals(s, 4, n);
            let y: Vec<f64> = (0..n).map(|r| e4[r] + e2[r]).collect();
            let f1 = (0..n).map(|r| 3.0 * f0[r] + e1[r]).collect();
            let f2 = (0..n).map(|r| e4[r] + f0[r]).collect();
            let f3 = (0..n).map(|r| y[r] + e3[r]).collect();
            named_continuous(vec![f0, f1, f2, f3], y)
        }
        DatasetId::Sg => {
            let labels = bits(s, 0, n);
            let pair = uniforms(s, 1, n, 0.0, 1.0);
            let marker = uniforms(s, 2, n, 0.0, 1.0);
            sg(labels, &pair, &marker)
        }
    }
}

/// Every outcome of a discrete dataset with rows repeated in proportion to
/// their probability, so that plug-in estimates equal population values.
/// `None` for the continuous datasets.
pub fn population(id: DatasetId, rule: TercRule) -> Option<Dataset> {
    let grid = |k: usize| -> Vec<Vec<u32>> {
        (0..k)
            .map(|b| (0..1u32 << k).map(|r| (r >> (k - 1 - b)) & 1).collect())
            .collect()
    };
    let data = match id {
        DatasetId::Wt | DatasetId::Ubr => return None,
        DatasetId::Rvq | DatasetId::Svq | DatasetId::Msq | DatasetId::Dupsum => {
            let mut g = grid(2).into_iter();
            let (a, b) = (g.next().unwrap(), g.next().unwrap());
            from_bits(id, a, b, vec![0; 4], rule)
        }
        DatasetId::Terc1 | DatasetId::Terc2 => {
            let mut g = grid(3).into_iter();
            let (a, b, c) = (g.next().unwrap(), g.next().unwrap(), g.next().unwrap());
            from_bits(id, a, b, c, rule)
        }
        DatasetId::Sg => {
            // Probabilities are multiples of 1/600: label 1/2, pair 57/60 or
            // 1/60 each, marker 1/5 or 4/5.
            let mut labels = Vec::new();
            let mut pair = Vec::new();
            let mut marker = Vec::new();
            for y in 0..2u32 {
                let (both, weights) = if y == 0 {
                    (0.95, [57, 1, 1, 1])
                } else {
                    (0.05, [3, 19, 19, 19])
                };
                for (k, &w) in weights.iter().enumerate() {
                    // A draw inside the k-th probability band of `sg`.
                    let u = if k == 0 {
                        both / 2.0
                    } else {
                        both + (1.0 - both) * ((k - 1) as f64 + 0.5) / 3.0
                    };
                    for m in 0..5 {
                        // Markers: draws 0.1 .. 0.9 cover the 1/5 bands.
                        let v = 0.1 + 0.2 * m as f64;
                        for _ in 0..w {
                            labels.push(y);
                            pair.push(u);
                            marker.push(v);
                        }
                    }
                }
            }
            sg(labels, &pair, &marker)
        }
    };
    Some(data.expect("population tables are well formed"))
}

/// Appends an exact copy of feature `index`.
pub fn duplicate_feature(data: &Dataset, index: usize) -> Result<Dataset> {
    if index >= data.n_features() {
        return Err(Error::IndexOutOfRange {
            index,
            n_features: data.n_features(),
        });
    }
    let source = data.feature(index);
    let names = data.feature_names();
    let base = format!("{}_dup", source.name());
    let mut name = base.clone();
    let mut k = 2;
    while names.contains(&name) || name == data.target().name() {
        name = format!("{base}{k}");
        k += 1;
    }
    data.with_appended(source.renamed(name))
}

/// Which features an ideal selector keeps for each benchmark dataset.
pub fn ground_truth(id: DatasetId) -> GroundTruth {
    let (n, slots): (usize, Vec<Vec<usize>>) = match id {
        DatasetId::Rvq => (3, vec![vec![0], vec![1, 2]]),
        DatasetId::Svq => (2, vec![vec![0], vec![1]]),
        DatasetId::Msq => (3, vec![vec![0]]),
        DatasetId::Wt => (3, vec![vec![0], vec![2]]),
        DatasetId::Terc1 => (6, vec![vec![0, 3, 4, 5], vec![1], vec![2]]),
        DatasetId::Terc2 => (6, vec![vec![0, 3], vec![1, 4], vec![2, 5]]),
        DatasetId::Ubr => (4, vec![vec![3]]),
        DatasetId::Sg => (3, vec![vec![0], vec![1], vec![2]]),
        DatasetId::Dupsum => (4, vec![vec![0, 2], vec![1, 3]]),
    };
    GroundTruth {
        n_features: n,
        slots: slots
            .into_iter()
            .map(|s| FeatureSubset::new(s, n).expect("registry indices are in range"))
            .collect(),
    }
}
