//! Neural mutual information estimation via the Donsker-Varadhan bound.
//!
//! The statistics network is a one-hidden-layer ReLU perceptron over the
//! concatenated (left, right) sample. Each step draws a minibatch of paired
//! rows for the joint term and re-pairs the right-hand side within the batch
//! for the product-of-marginals term, then takes one Adam ascent step on
//!
//! ```text
//! mean T(joint) - log mean exp T(marginal)
//! ```
//!
//! The reported estimate is the bound averaged over the final
//! `tail_fraction` of iterations.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineConfig {
    pub batch_size: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub hidden: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub tail_fraction: f64,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            batch_size: 1000,
            iterations: 20_000,
            learning_rate: 1e-4,
            hidden: 50,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            tail_fraction: 0.05,
        }
    }
}

impl MineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("MINE needs at least one iteration".into()));
        }
        if self.batch_size < 2 {
            return Err(Error::Config("MINE batch size must be at least 2".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("MINE hidden width must be positive".into()));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(Error::Config(
                "MINE tail fraction must lie in (0, 1]".into(),
            ));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Config("MINE learning rate must be positive".into()));
        }
        Ok(())
    }

    fn tail_len(&self) -> usize {
        ((self.iterations as f64 * self.tail_fraction).ceil() as usize).clamp(1, self.iterations)
    }
}

/// Row-major sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    dim: usize,
    data: Vec<f64>,
}

impl Batch {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim));
        Batch { dim, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }
}

/// Statistics network plus Adam moments.
///
/// Parameters live in one flat vector: `W1 (hidden x dim) | b1 | w2 | b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MineState {
    dim: usize,
    hidden: usize,
    params: Vec<f64>,
    m: Vec<f64>,
    v: Vec<f64>,
    step: usize,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
}

impl MineState {
    /// Uniform fan-in initialisation, `U(-1/sqrt(fan_in), 1/sqrt(fan_in))` per layer.
    pub fn new(dim: usize, cfg: &MineConfig, seed: u64) -> Self {
        let hidden = cfg.hidden;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_params = hidden * dim + 2 * hidden + 1;
        let mut params = Vec::with_capacity(n_params);
        let b_in = 1.0 / (dim as f64).sqrt();
        let b_hidden = 1.0 / (hidden as f64).sqrt();
        for _ in 0..hidden * dim + hidden {
            params.push(rng.random_range(-b_in..b_in));
        }
        for _ in 0..hidden + 1 {
            params.push(rng.random_range(-b_hidden..b_hidden));
        }
        MineState {
            dim,
            hidden,
            params,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            learning_rate: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            epsilon: cfg.epsilon,
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let w1 = self.hidden * self.dim;
        (w1, w1 + self.hidden, w1 + 2 * self.hidden)
    }

    fn output(&self, x: &[f64]) -> f64 {
        let (b1, w2, b2) = self.offsets();
        let mut out = self.params[b2];
        for k in 0..self.hidden {
            let w = &self.params[k * self.dim..(k + 1) * self.dim];
            let pre = self.params[b1 + k] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            if pre > 0.0 {
                out += self.params[w2 + k] * pre;
            }
        }
        out
    }

    /// Adds `weight * dT(x)/dparams` into `grad`.
    fn accumulate(&self, x: &[f64], weight: f64, grad: &mut [f64]) {
        let (b1, w2, b2) = self.offsets();
        grad[b2] += weight;
        for k in 0..self.hidden {
            let w = &self.params[k * self.dim..(k + 1) * self.dim];
            let pre = self.params[b1 + k] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            if pre > 0.0 {
                grad[w2 + k] += weight * pre;
                let c = weight * self.params[w2 + k];
                grad[b1 + k] += c;
                for (g, xi) in grad[k * self.dim..(k + 1) * self.dim].iter_mut().zip(x) {
                    *g += c * xi;
                }
            }
        }
    }

    fn bound_parts(&self, joint: &Batch, marginal: &Batch) -> (f64, Vec<f64>) {
        let tj: f64 = (0..joint.rows())
            .map(|r| self.output(joint.row(r)))
            .sum::<f64>()
            / joint.rows() as f64;
        let tm: Vec<f64> = (0..marginal.rows())
            .map(|r| self.output(marginal.row(r)))
            .collect();
        (tj, tm)
    }

    /// Donsker-Varadhan lower bound of the current network on one batch pair.
    pub fn lower_bound(&self, joint: &Batch, marginal: &Batch) -> f64 {
        let (tj, tm) = self.bound_parts(joint, marginal);
        tj - log_mean_exp(&tm)
    }

    /// Evaluates the bound, then applies one Adam ascent step.
    ///
    /// Returns the bound seen before the update. A non-finite bound leaves the
    /// parameters untouched and is reported as divergence.
    pub fn train_step(&mut self, joint: &Batch, marginal: &Batch) -> Result<f64> {
        let (tj, tm) = self.bound_parts(joint, marginal);
        let lme = log_mean_exp(&tm);
        let bound = tj - lme;
        if !bound.is_finite() {
            return Err(Error::Divergence {
                iteration: self.step,
            });
        }
        let mut grad = vec![0.0; self.params.len()];
        let wj = 1.0 / joint.rows() as f64;
        for r in 0..joint.rows() {
            self.accumulate(joint.row(r), wj, &mut grad);
        }
        // d/dT_m of -log mean exp(T) is minus the softmax weight of sample m.
        let max = tm.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = tm.iter().map(|t| (t - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        for (r, e) in exps.iter().enumerate() {
            self.accumulate(marginal.row(r), -e / z, &mut grad);
        }

        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (i, g) in grad.iter().enumerate() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            self.params[i] += self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(bound)
    }
}

fn log_mean_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + (xs.iter().map(|x| (x - max).exp()).sum::<f64>() / xs.len() as f64).ln()
}

/// Draws a joint minibatch and its right-shuffled marginal counterpart.
pub(crate) fn draw_batches(
    left: &[&[f64]],
    right: &[&[f64]],
    batch_size: usize,
    rng: &mut impl RngCore,
) -> (Batch, Batch) {
    let n = left[0].len();
    let dim = left.len() + right.len();
    let rows = rand::seq::index::sample(rng, n, batch_size).into_vec();
    let mut shuffled = rows.clone();
    shuffled.shuffle(rng);
    let mut joint = Vec::with_capacity(batch_size * dim);
    let mut marginal = Vec::with_capacity(batch_size * dim);
    for (&r, &s) in rows.iter().zip(&shuffled) {
        joint.extend(left.iter().map(|c| c[r]));
        joint.extend(right.iter().map(|c| c[r]));
        marginal.extend(left.iter().map(|c| c[r]));
        marginal.extend(right.iter().map(|c| c[s]));
    }
    (Batch::new(dim, joint), Batch::new(dim, marginal))
}

/// Trains a fresh network and returns its tail-averaged lower bound.
pub(crate) fn mine_mi(
    left: &[&[f64]],
    right: &[&[f64]],
    cfg: &MineConfig,
    seed: u64,
) -> Result<f64> {
    let n = left[0].len();
    if cfg.batch_size > n {
        return Err(Error::BatchTooLarge {
            batch: cfg.batch_size,
            n_samples: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = MineState::new(left.len() + right.len(), cfg, rng.next_u64());
    let tail = cfg.tail_len();
    let mut tail_sum = 0.0;
    for it in 0..cfg.iterations {
        let (joint, marginal) = draw_batches(left, right, cfg.batch_size, &mut rng);
        let bound = state.train_step(&joint, &marginal)?;
        if it >= cfg.iterations - tail {
            tail_sum += bound;
        }
    }
    Ok(tail_sum / tail as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0..2u32) as f64).collect();
        super::super::ksg::standardize(&raw)
    }

    fn quick() -> MineConfig {
        MineConfig {
            batch_size: 256,
            iterations: 2000,
            learning_rate: 1e-3,
            ..MineConfig::default()
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = MineConfig {
            hidden: 4,
            ..MineConfig::default()
        };
        let state = MineState::new(3, &cfg, 11);
        let x = [0.3, -1.2, 0.8];
        let mut grad = vec![0.0; state.params.len()];
        state.accumulate(&x, 1.0, &mut grad);
        let h = 1e-6;
        for (i, &g) in grad.iter().enumerate() {
            let mut up = state.clone();
            up.params[i] += h;
            let mut down = state.clone();
            down.params[i] -= h;
            let fd = (up.output(&x) - down.output(&x)) / (2.0 * h);
            assert!((fd - g).abs() < 1e-6, "param {i}: {fd} vs {g}");
        }
    }

    #[test]
    fn zero_iterations_leave_network_untouched() {
        let x = coin(512, 1);
        let cols: [&[f64]; 1] = [&x];
        let state = MineState::new(2, &MineConfig::default(), 3);
        let before = state.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (j, m) = draw_batches(&cols, &cols, 128, &mut rng);
        let lb = state.lower_bound(&j, &m);
        assert!(lb.is_finite());
        assert_eq!(state, before);
        assert_eq!(state.steps_taken(), 0);
    }

    #[test]
    fn identical_coins_learn_ln2() {
        let x = coin(4000, 7);
        let est = mine_mi(&[&x], &[&x], &quick(), 99).unwrap();
        assert!((est - std::f64::consts::LN_2).abs() < 0.1, "{est}");
    }

    #[test]
    fn independent_coins_stay_near_zero() {
        let x = coin(4000, 7);
        let y = coin(4000, 8);
        let est = mine_mi(&[&x], &[&y], &quick(), 99).unwrap();
        assert!(est.abs() < 0.05, "{est}");
    }

    #[test]
    fn batch_larger_than_data_is_rejected() {
        let x = coin(100, 1);
        let err = mine_mi(&[&x], &[&x], &MineConfig::default(), 0).unwrap_err();
        assert!(matches!(
            err,
            Error::BatchTooLarge {
                batch: 1000,
                n_samples: 100
            }
        ));
    }

    #[test]
    fn same_seed_same_estimate() {
        let x = coin(600, 2);
        let cfg = MineConfig {
            batch_size: 100,
            iterations: 50,
            ..MineConfig::default()
        };
        let a = mine_mi(&[&x], &[&x], &cfg, 5).unwrap();
        let b = mine_mi(&[&x], &[&x], &cfg, 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
