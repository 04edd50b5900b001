//! Feature-wise partial information decomposition.
//!
//! For every feature of a tabular dataset this crate estimates its mutual
//! information with the target, the extra information it gains in synergy
//! with other features, and the part of that which is redundant with other
//! features. A selection routine turns the decomposition into a small
//! informative feature subset.
//!
//! ```
//! use pidf_core::{datasets, pidf, selection, EstimatorConfig};
//!
//! let data = datasets::generate(&datasets::GeneratorSpec::new(datasets::DatasetId::Rvq, 1000, 7))?;
//! let cfg = pidf::PidfConfig::new(EstimatorConfig::exact());
//! let (report, _trace) = pidf::run_pidf(&data, &cfg)?;
//! let chosen = selection::select_features(&report, cfg.alpha, cfg.eps_zero);
//! assert_eq!(chosen.selected.indices(), &[0, 1]);
//! # Ok::<(), pidf_core::Error>(())
//! ```

pub mod benchmark;
pub mod datasets;
pub mod error;
pub mod estimators;
pub mod io;
pub mod oracle;
pub mod pidf;
pub mod report;
pub mod selection;
pub mod stats;
pub mod types;

pub use error::{Error, ErrorClass, Result};
pub use estimators::{
    estimate_entropy, estimate_mi, EstimatorConfig, EstimatorKind, MiEngine, MineConfig, MineState,
    Var,
};
pub use pidf::{PidfConfig, PidfTrace, ThetaEvaluation, Verdict};
pub use selection::{Confusion, GroundTruth};
pub use types::{
    convert_units, validate_dataset, Column, ColumnKind, Dataset, DatasetFingerprint,
    EstimateEnsemble, FeatureEnsembles, FeatureSubset, InfoValue, PidfFeatureResult, PidfReport,
    Rationale, RawTable, SelectionResult, Unit, ValidateOptions,
};
