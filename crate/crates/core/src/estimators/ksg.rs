//! Kraskov-Stoegbauer-Grassberger estimator (algorithm 1, max-norm).
//!
//! Columns are z-scored before use so that the max-norm treats every
//! dimension on the same scale. Neighbour search is brute force, which is
//! fine at the few-thousand-sample sizes this crate targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::gamma::digamma;

use crate::types::Dataset;

/// Z-scored copies of every column (features, then the target).
pub(crate) fn standardized_columns(data: &Dataset) -> Vec<Vec<f64>> {
    data.features()
        .iter()
        .chain(std::iter::once(data.target()))
        .map(|c| standardize(c.values()))
        .collect()
}

pub(crate) fn standardize(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > 0.0 {
        values.iter().map(|v| (v - mean) / sd).collect()
    } else {
        vec![0.0; values.len()]
    }
}

fn max_dist(cols: &[&[f64]], a: usize, b: usize) -> f64 {
    cols.iter().fold(0.0f64, |m, c| m.max((c[a] - c[b]).abs()))
}

pub(crate) fn ksg_mi(left: &[&[f64]], right: &[&[f64]], k: usize) -> f64 {
    let n = left.first().map_or(0, |c| c.len());
    if n < 2 || left.is_empty() || right.is_empty() {
        return 0.0;
    }
    let k = k.min(n - 1);
    // Collected in row order and summed serially so the result does not
    // depend on how rayon splits the work.
    let per_point: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; n], vec![0.0; n]),
            |(dx, dy, joint), i| {
                for j in 0..n {
                    dx[j] = max_dist(left, i, j);
                    dy[j] = max_dist(right, i, j);
                    joint[j] = dx[j].max(dy[j]);
                }
                // Exclude the point itself from its own neighbourhood.
                joint[i] = f64::INFINITY;
                let (_, kth, _) = joint.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
                let eps = *kth;
                let mut nx = 0usize;
                let mut ny = 0usize;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    if dx[j] < eps {
                        nx += 1;
                    }
                    if dy[j] < eps {
                        ny += 1;
                    }
                }
                digamma(nx as f64 + 1.0) + digamma(ny as f64 + 1.0)
            },
        )
        .collect();
    let marginal_sum: f64 = per_point.iter().sum();
    digamma(k as f64) + digamma(n as f64) - marginal_sum / n as f64
}

/// Sample standard deviation of the estimator on `draws` independent
/// standard-normal pairs of length `n`: its spread when the truth is zero.
pub(crate) fn null_spread(n: usize, k: usize, draws: usize, seed: u64) -> f64 {
    let estimates: Vec<f64> = (0..draws as u64)
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(super::mix64(seed ^ d));
            let a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            ksg_mi(&[&standardize(&a)], &[&standardize(&b)], k)
        })
        .collect();
    let m = estimates.iter().sum::<f64>() / draws as f64;
    let ss: f64 = estimates.iter().map(|e| (e - m).powi(2)).sum();
    (ss / (draws as f64 - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_pair(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            xs.push(a);
            ys.push(rho * a + (1.0 - rho * rho).sqrt() * b);
        }
        (xs, ys)
    }

    #[test]
    fn independent_gaussians_near_zero() {
        let (x, _) = gaussian_pair(2000, 0.0, 1);
        let (_, y) = gaussian_pair(2000, 0.0, 2);
        let mi = ksg_mi(&[&x], &[&y], 3);
        assert!(mi.abs() < 0.03, "{mi}");
    }

    #[test]
    fn correlated_gaussian_matches_closed_form() {
        let rho: f64 = 0.7;
        let (x, y) = gaussian_pair(2000, rho, 5);
        let truth = -0.5 * (1.0 - rho * rho).ln();
        let mi = ksg_mi(&[&x], &[&y], 3);
        assert!((mi - truth).abs() < 0.04, "{mi} vs {truth}");
    }

    #[test]
    fn symmetric_in_arguments() {
        let (x, y) = gaussian_pair(300, 0.4, 3);
        assert_eq!(ksg_mi(&[&x], &[&y], 3), ksg_mi(&[&y], &[&x], 3));
    }

    #[test]
    fn null_spread_shrinks_with_n() {
        let small = null_spread(250, 3, 20, 1);
        let large = null_spread(2000, 3, 20, 1);
        assert!(small > large && large > 0.0, "{small} {large}");
    }

    #[test]
    fn standardize_constant_column() {
        assert_eq!(standardize(&[2.0, 2.0, 2.0]), vec![0.0; 3]);
    }
}
