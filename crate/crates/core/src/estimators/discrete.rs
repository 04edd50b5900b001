//! Plug-in entropy and mutual information from empirical joint counts.

use crate::error::{Error, Result};
use crate::types::Dataset;

/// Integer-coded columns, features first and the target in the last slot.
#[derive(Debug, Clone)]
pub(crate) struct DiscreteColumns {
    codes: Vec<Vec<u32>>,
    cards: Vec<u32>,
    n: usize,
}

impl DiscreteColumns {
    pub(crate) fn from_dataset(data: &Dataset, what: &'static str) -> Result<Self> {
        let mut codes = Vec::with_capacity(data.n_features() + 1);
        let mut cards = Vec::with_capacity(data.n_features() + 1);
        for col in data.features().iter().chain(std::iter::once(data.target())) {
            match col.kind() {
                crate::types::ColumnKind::Discrete { cardinality } => {
                    codes.push(col.codes().expect("discrete column has codes"));
                    cards.push(cardinality.max(1));
                }
                crate::types::ColumnKind::Continuous => {
                    return Err(Error::ContinuousColumn {
                        column: col.name().to_string(),
                        what,
                    })
                }
            }
        }
        Ok(DiscreteColumns {
            codes,
            cards,
            n: data.n_samples(),
        })
    }

    pub(crate) fn from_parts(codes: Vec<Vec<u32>>, cards: Vec<u32>) -> Self {
        let n = codes.first().map_or(0, Vec::len);
        DiscreteColumns { codes, cards, n }
    }

    /// Sorted joint outcome keys of the given slots, one per row.
    fn joint_keys(&self, slots: &[usize]) -> Vec<u64> {
        // Mixed-radix packing; falls back to ranking row tuples on overflow.
        let mut radix: u64 = 1;
        let mut fits = true;
        for &s in slots {
            match radix.checked_mul(self.cards[s] as u64) {
                Some(r) => radix = r,
                None => {
                    fits = false;
                    break;
                }
            }
        }
        let mut keys: Vec<u64> = if fits {
            (0..self.n)
                .map(|row| {
                    slots.iter().fold(0u64, |acc, &s| {
                        acc * self.cards[s] as u64 + self.codes[s][row] as u64
                    })
                })
                .collect()
        } else {
            let mut tuples: Vec<(Vec<u32>, usize)> = (0..self.n)
                .map(|row| (slots.iter().map(|&s| self.codes[s][row]).collect(), row))
                .collect();
            tuples.sort_unstable();
            let mut keys = vec![0u64; self.n];
            let mut rank = 0u64;
            for w in 0..tuples.len() {
                if w > 0 && tuples[w].0 != tuples[w - 1].0 {
                    rank += 1;
                }
                keys[tuples[w].1] = rank;
            }
            keys
        };
        keys.sort_unstable();
        keys
    }

    /// Plug-in Shannon entropy in nats; slots must be canonical (sorted, unique).
    pub(crate) fn entropy(&self, slots: &[usize]) -> f64 {
        if slots.is_empty() || self.n == 0 {
            return 0.0;
        }
        let keys = self.joint_keys(slots);
        let n = self.n as f64;
        let mut acc = 0.0;
        let mut start = 0;
        for i in 1..=keys.len() {
            if i == keys.len() || keys[i] != keys[start] {
                let c = (i - start) as f64;
                acc += c * c.ln();
                start = i;
            }
        }
        (n.ln() - acc / n).max(0.0)
    }

    /// I(left; right) = H(left) + H(right) - H(left u right), clamped at zero.
    pub(crate) fn mi(&self, left: &[usize], right: &[usize]) -> f64 {
        if left.is_empty() || right.is_empty() {
            return 0.0;
        }
        let mut union: Vec<usize> = left.iter().chain(right).copied().collect();
        union.sort_unstable();
        union.dedup();
        (self.entropy(left) + self.entropy(right) - self.entropy(&union)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn cols(c: &[&[u32]]) -> DiscreteColumns {
        let cards = c
            .iter()
            .map(|v| v.iter().copied().max().unwrap_or(0) + 1)
            .collect();
        DiscreteColumns::from_parts(c.iter().map(|v| v.to_vec()).collect(), cards)
    }

    #[test]
    fn entropy_examples() {
        let d = cols(&[&[0, 1, 2, 3], &[5, 5, 5, 5], &[0, 1, 0, 1]]);
        assert!((d.entropy(&[0]) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(d.entropy(&[1]), 0.0);
        assert!((d.entropy(&[2]) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn self_information_is_entropy() {
        let d = cols(&[&[0, 1, 1, 2, 0, 2, 2]]);
        assert!((d.mi(&[0], &[0]) - d.entropy(&[0])).abs() < 1e-12);
    }

    #[test]
    fn overflowing_radix_falls_back_to_ranking() {
        let col: Vec<u32> = (0..64).map(|i| i % 4).collect();
        let mut c = vec![col.clone(); 40];
        c[0] = (0..64).collect();
        let cards = c.iter().map(|v| v.iter().max().unwrap() + 1).collect();
        let d = DiscreteColumns::from_parts(c, cards);
        let all: Vec<usize> = (0..40).collect();
        // 64 distinct rows, each seen once.
        assert!((d.entropy(&all) - 64f64.ln()).abs() < 1e-12);
    }
}
