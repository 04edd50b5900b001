//! The decomposition against exhaustive subset search.

mod common;

use pidf_core::datasets::{generate, population, DatasetId, GeneratorSpec, TercRule};
use pidf_core::oracle::{check_theorems, oracle_pidf, JointTable};
use pidf_core::pidf::{brute_force_fws, run_pidf, PidfConfig, DEFAULT_SUBSET_CAP};
use pidf_core::{Dataset, EstimatorConfig, FeatureSubset};
use proptest::prelude::*;

use common::{instance, weighted_dataset};

const TOL: f64 = 1e-9;

fn exact() -> EstimatorConfig {
    EstimatorConfig::exact()
}

fn pop(id: DatasetId) -> Dataset {
    population(id, TercRule::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_and_theta_bounds((n, outcomes) in instance(5, 4)) {
        let table = JointTable::from_dataset(&weighted_dataset(n, &outcomes)).unwrap();
        let report = check_theorems(&table).unwrap();
        prop_assert!(report.max_identity_residual < TOL, "{report:?}");
        prop_assert_eq!(report.upper_violations, 0);
        prop_assert_eq!(report.lower_violations, 0);
    }

    #[test]
    fn pipeline_identities_and_oracle_bounds((n, outcomes) in instance(4, 3)) {
        let data = weighted_dataset(n, &outcomes);
        let oracle = oracle_pidf(&JointTable::from_dataset(&data).unwrap()).unwrap();
        let (report, _) = run_pidf(&data, &PidfConfig::new(exact())).unwrap();
        prop_assert_eq!(report.features.len(), n);
        for (f, o) in report.features.iter().zip(&oracle) {
            prop_assert!((f.mci - (f.mi + f.fws)).abs() < TOL);
            prop_assert!((f.oci - (f.mci - f.fwr_total)).abs() < TOL);
            let sum = f.fwr_contributions.values().fold(0.0, |a, v| a + v);
            prop_assert_eq!(f.fwr_total, sum);
            prop_assert!(f.fwr_total >= -TOL);
            // Removals telescope, so OCI is the full-set conditional gain.
            prop_assert!((f.oci - o.oci).abs() < TOL, "{} vs {}", f.oci, o.oci);
            prop_assert!((f.mi - o.mi).abs() < TOL);
            // The surviving set is one candidate of the exhaustive search.
            prop_assert!(f.fws <= o.fws + TOL);

            let brute = brute_force_fws(&data, f.feature, &exact(), DEFAULT_SUBSET_CAP).unwrap();
            prop_assert!(brute.value >= 0.0);
            prop_assert!((brute.value - o.fws).abs() < TOL);
            prop_assert_eq!(&brute.maximizers, &o.maximizers);
            prop_assert!(brute.maximizers.iter().any(|p| p.is_empty()) == (o.fws.abs() < TOL));
        }
    }
}

fn subsets(list: &[&[usize]], n: usize) -> Vec<FeatureSubset> {
    list.iter()
        .map(|s| FeatureSubset::new(s.iter().copied(), n).unwrap())
        .collect()
}

#[test]
fn doubled_sum_structure() {
    // Two fair bits, each duplicated, summed into the target.
    let data = pop(DatasetId::Dupsum);
    let brute = brute_force_fws(&data, 0, &exact(), DEFAULT_SUBSET_CAP).unwrap();
    assert_eq!(brute.maximizers, subsets(&[&[1], &[3], &[1, 3]], 4));

    let table = JointTable::from_dataset(&data).unwrap();
    let oracle = oracle_pidf(&table).unwrap();
    let f0 = &oracle[0];
    assert!((f0.fwr - f0.mci).abs() < TOL, "{f0:?}");
    assert!(f0.oci.abs() < TOL);
    // With Y = F0 + F1 over fair bits, H(Y) = 1.5 bits and I(Y;F0) = 0.5 bits.
    let ln2 = std::f64::consts::LN_2;
    assert!((table.entropy(&[4]) - 1.5 * ln2).abs() < TOL);
    assert!((f0.mi - 0.5 * ln2).abs() < TOL);
    assert!((brute.value - 1.0 * ln2 + f0.mi).abs() < TOL);
    assert!((brute.value - f0.fws).abs() < TOL);
    assert!(check_theorems(&table).unwrap().passed());
}

#[test]
fn rvq_passes_every_check() {
    for data in [
        pop(DatasetId::Rvq),
        generate(&GeneratorSpec::new(DatasetId::Rvq, 1000, 5)).unwrap(),
    ] {
        assert!(check_theorems(&JointTable::from_dataset(&data).unwrap())
            .unwrap()
            .passed());
    }
}

#[test]
fn heuristic_matches_exhaustive_search_on_sampled_benchmarks() {
    for id in [
        DatasetId::Rvq,
        DatasetId::Svq,
        DatasetId::Msq,
        DatasetId::Terc2,
        DatasetId::Sg,
        DatasetId::Dupsum,
    ] {
        for seed in 0..5 {
            let data = generate(&GeneratorSpec::new(id, 1000, seed)).unwrap();
            let (report, _) = run_pidf(&data, &PidfConfig::new(exact())).unwrap();
            for f in &report.features {
                let brute =
                    brute_force_fws(&data, f.feature, &exact(), DEFAULT_SUBSET_CAP).unwrap();
                assert!(
                    (f.fws - brute.value).abs() < 0.02,
                    "{id} seed {seed} F{}: {} vs {}",
                    f.feature,
                    f.fws,
                    brute.value
                );
            }
        }
    }
}

#[test]
fn terc1_copies_mask_each_other() {
    // F3..F5 copy F0. With the other copies still present each single removal
    // changes nothing, so no copy is pruned and the synergy of F0 with F1, F2
    // is not found. The exhaustive search does find it.
    let data = pop(DatasetId::Terc1);
    let table = JointTable::from_dataset(&data).unwrap();
    assert_eq!(check_theorems(&table).unwrap().assumption_failures, 0);
    let oracle = oracle_pidf(&table).unwrap();
    let (report, _) = run_pidf(&data, &PidfConfig::new(exact())).unwrap();
    for i in [0, 3, 4, 5] {
        assert!(report.features[i].fws.abs() < TOL);
        assert!(oracle[i].fws > 0.3);
    }
    for i in [1, 2] {
        assert!((report.features[i].fws - oracle[i].fws).abs() < TOL);
    }
}

#[test]
fn oracle_caps() {
    let wide = weighted_dataset(16, &[(vec![0; 17], 1), (vec![1; 17], 1)]);
    let table = JointTable::from_dataset(&wide).unwrap();
    let err = oracle_pidf(&table).unwrap_err();
    assert_eq!(err.class(), pidf_core::ErrorClass::OracleCap);
    assert!(check_theorems(&table).is_err());
    assert!(brute_force_fws(&wide, 0, &exact(), DEFAULT_SUBSET_CAP).is_err());
}
