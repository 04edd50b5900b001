//! Equal-frequency discretisation for the binned plug-in estimator.

use super::DiscreteColumns;
use crate::types::{Column, ColumnKind, Dataset};

/// Rank-based equal-frequency bins; tied values always share a bin.
pub(crate) fn equal_frequency_codes(values: &[f64], bins: usize) -> Vec<u32> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut codes = vec![0u32; n];
    let mut first_rank = 0;
    for (rank, &row) in order.iter().enumerate() {
        if rank > 0 && values[row] != values[order[rank - 1]] {
            first_rank = rank;
        }
        codes[row] = ((first_rank * bins) / n.max(1)) as u32;
    }
    codes
}

pub(crate) fn bin_dataset(data: &Dataset, bins: usize) -> DiscreteColumns {
    let convert = |col: &Column| match col.kind() {
        ColumnKind::Discrete { cardinality } => (col.codes().unwrap(), cardinality.max(1)),
        ColumnKind::Continuous => (equal_frequency_codes(col.values(), bins), bins as u32),
    };
    let (codes, cards) = data
        .features()
        .iter()
        .chain(std::iter::once(data.target()))
        .map(convert)
        .unzip();
    DiscreteColumns::from_parts(codes, cards)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_balanced() {
        let values: Vec<f64> = (0..800).map(|i| ((i * 37) % 800) as f64).collect();
        let codes = equal_frequency_codes(&values, 8);
        for b in 0..8 {
            assert_eq!(codes.iter().filter(|&&c| c == b).count(), 100);
        }
    }

    #[test]
    fn ties_share_a_bin() {
        let values = [1.0, 1.0, 1.0, 1.0, 2.0, 3.0];
        let codes = equal_frequency_codes(&values, 3);
        assert!(codes[..4].iter().all(|&c| c == codes[0]));
        assert!(codes.iter().all(|&c| c < 3));
    }
}
