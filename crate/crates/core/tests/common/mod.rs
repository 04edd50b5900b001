#![allow(dead_code)]

use pidf_core::{Column, Dataset};
use proptest::prelude::*;

/// Builds a dataset whose rows are `outcomes` repeated by weight, so plug-in
/// estimates equal the weighted distribution exactly. The last code of each
/// outcome is the target.
pub fn weighted_dataset(n_features: usize, outcomes: &[(Vec<u32>, u32)]) -> Dataset {
    let mut cols = vec![Vec::new(); n_features + 1];
    for (codes, w) in outcomes {
        for _ in 0..*w {
            for (c, &v) in cols.iter_mut().zip(codes) {
                c.push(v);
            }
        }
    }
    let target = cols.pop().unwrap();
    let features = cols
        .into_iter()
        .enumerate()
        .map(|(k, c)| Column::from_codes(format!("f{k}"), c))
        .collect();
    Dataset::new(features, Column::from_codes("target", target)).unwrap()
}

/// Random small discrete distribution: up to `max_features` features, up to
/// `max_states` states per column, up to 12 weighted outcomes.
pub fn instance(
    max_features: usize,
    max_states: u32,
) -> impl Strategy<Value = (usize, Vec<(Vec<u32>, u32)>)> {
    (1..=max_features, 2..=max_states).prop_flat_map(|(n, states)| {
        let outcome = (prop::collection::vec(0..states, n + 1), 1u32..=6);
        (Just(n), prop::collection::vec(outcome, 1..=12))
    })
}

pub fn bits(n: usize, seed: u64) -> Vec<u32> {
    let mut z = seed;
    (0..n)
        .map(|_| {
            // SplitMix64 step, enough for test fixtures.
            z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut x = z;
            x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            ((x ^ (x >> 31)) >> 63) as u32
        })
        .collect()
}
