//! Fixtures shared by the criterion benchmarks.

use pidf_core::datasets::{duplicate_feature, generate, DatasetId, GeneratorSpec};
use pidf_core::Dataset;

pub fn sample(id: DatasetId, n_samples: usize, seed: u64) -> Dataset {
    generate(&GeneratorSpec::new(id, n_samples, seed)).expect("benchmark datasets generate")
}

/// TERC-1 widened with copies of its first columns until it has
/// `n_features` features.
pub fn widened_terc(n_features: usize, n_samples: usize) -> Dataset {
    let mut data = sample(DatasetId::Terc1, n_samples, 0);
    let mut next = 0;
    while data.n_features() < n_features {
        data = duplicate_feature(&data, next % 3).expect("index in range");
        next += 1;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widened_terc_has_requested_width() {
        assert_eq!(widened_terc(9, 10).n_features(), 9);
    }
}
