//! Shared domain types: the validated dataset, feature subsets, information
//! units, estimate ensembles and the per-feature decomposition results.
//!
//! Everything here is immutable once built. All information quantities are
//! carried in nats; [`Unit::Bits`] exists only for presentation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;

/// Largest number of distinct integer codes for a column to be inferred discrete.
pub const DEFAULT_DISCRETE_CAP: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Discrete { cardinality: u32 },
    Continuous,
}

impl ColumnKind {
    pub fn is_discrete(&self) -> bool {
        matches!(self, ColumnKind::Discrete { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    values: Vec<f64>,
    kind: ColumnKind,
}

impl Column {
    /// Builds a discrete column, checking every value is a code in `0..cardinality`.
    pub fn discrete(name: impl Into<String>, codes: Vec<u32>, cardinality: u32) -> Result<Self> {
        let name = name.into();
        if let Some(&bad) = codes.iter().find(|&&c| c >= cardinality) {
            return Err(Error::InvalidDiscrete {
                column: name,
                value: bad as f64,
                cardinality,
            });
        }
        Ok(Column {
            name,
            values: codes.into_iter().map(f64::from).collect(),
            kind: ColumnKind::Discrete { cardinality },
        })
    }

    /// Builds a discrete column whose cardinality is one past its largest code.
    pub fn from_codes(name: impl Into<String>, codes: Vec<u32>) -> Self {
        let cardinality = codes.iter().copied().max().map_or(1, |m| m + 1);
        Column {
            name: name.into(),
            values: codes.into_iter().map(f64::from).collect(),
            kind: ColumnKind::Discrete { cardinality },
        }
    }

    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            values,
            kind: ColumnKind::Continuous,
        }
    }

    fn with_kind(name: String, values: Vec<f64>, kind: ColumnKind) -> Result<Self> {
        if let ColumnKind::Discrete { cardinality } = kind {
            if let Some(&bad) = values
                .iter()
                .find(|&&v| !(v >= 0.0 && v.fract() == 0.0 && v < cardinality as f64))
            {
                return Err(Error::InvalidDiscrete {
                    column: name,
                    value: bad,
                    cardinality,
                });
            }
        }
        Ok(Column { name, values, kind })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ColumnKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Integer codes of a discrete column; `None` for continuous columns.
    pub fn codes(&self) -> Option<Vec<u32>> {
        match self.kind {
            ColumnKind::Discrete { .. } => Some(self.values.iter().map(|&v| v as u32).collect()),
            ColumnKind::Continuous => None,
        }
    }

    pub(crate) fn renamed(&self, name: String) -> Column {
        Column {
            name,
            values: self.values.clone(),
            kind: self.kind,
        }
    }
}

/// A validated table of feature columns plus one target column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Column>,
    target: Column,
}

impl Dataset {
    pub fn new(features: Vec<Column>, target: Column) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::NoFeatures);
        }
        let n = target.len();
        if n == 0 {
            return Err(Error::EmptyTable);
        }
        let mut seen = BTreeSet::new();
        for col in features.iter().chain(std::iter::once(&target)) {
            if col.len() != n {
                return Err(Error::RaggedColumn {
                    column: col.name.clone(),
                    expected: n,
                    found: col.len(),
                });
            }
            if !seen.insert(col.name.as_str()) {
                return Err(Error::DuplicateName(col.name.clone()));
            }
        }
        Ok(Dataset { features, target })
    }

    pub fn n_samples(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature(&self, index: usize) -> &Column {
        &self.features[index]
    }

    pub fn features(&self) -> &[Column] {
        &self.features
    }

    pub fn target(&self) -> &Column {
        &self.target
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|c| c.name.clone()).collect()
    }

    pub fn all_discrete(&self) -> bool {
        self.features
            .iter()
            .chain(std::iter::once(&self.target))
            .all(|c| c.kind.is_discrete())
    }

    /// Returns a copy with feature columns reordered so that new column `k`
    /// is old column `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Dataset> {
        let mut check: Vec<usize> = order.to_vec();
        check.sort_unstable();
        if check != (0..self.n_features()).collect::<Vec<_>>() {
            return Err(Error::Config(format!(
                "{order:?} is not a permutation of 0..{}",
                self.n_features()
            )));
        }
        let features = order.iter().map(|&i| self.features[i].clone()).collect();
        Dataset::new(features, self.target.clone())
    }

    pub(crate) fn with_appended(&self, column: Column) -> Result<Dataset> {
        let mut features = self.features.clone();
        features.push(column);
        Dataset::new(features, self.target.clone())
    }
}

/// Kind override applied during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindOverride {
    Discrete,
    Continuous,
}

/// Cell-level table as read from a CSV file, before any validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub target: String,
    pub discrete_cap: u32,
    pub overrides: HashMap<String, KindOverride>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            target: "target".to_string(),
            discrete_cap: DEFAULT_DISCRETE_CAP,
            overrides: HashMap::new(),
        }
    }
}

fn infer_kind(values: &[f64], cap: u32) -> ColumnKind {
    let all_codes = values
        .iter()
        .all(|&v| v >= 0.0 && v.fract() == 0.0 && v < cap as f64);
    if all_codes {
        let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
        ColumnKind::Discrete {
            cardinality: max as u32 + 1,
        }
    } else {
        ColumnKind::Continuous
    }
}

/// Turns a raw cell table into a [`Dataset`], inferring column kinds.
///
/// A column is discrete when every value is a non-negative integer below
/// `discrete_cap`; its cardinality is one past the largest code.
pub fn validate_dataset(raw: &RawTable, opts: &ValidateOptions) -> Result<Dataset> {
    if raw.headers.is_empty() || raw.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut seen = BTreeSet::new();
    for h in &raw.headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateName(h.clone()));
        }
    }
    let width = raw.headers.len();
    let n = raw.rows.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); width];
    for (r, row) in raw.rows.iter().enumerate() {
        for (c, header) in raw.headers.iter().enumerate() {
            let cell = row.get(c).map(|s| s.trim()).unwrap_or("");
            if cell.is_empty() {
                let found = raw
                    .rows
                    .iter()
                    .filter(|row| row.get(c).is_some_and(|s| !s.trim().is_empty()))
                    .count();
                return Err(Error::RaggedColumn {
                    column: header.clone(),
                    expected: n,
                    found,
                });
            }
            let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                column: header.clone(),
                row: r,
                cell: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonNumeric {
                    column: header.clone(),
                    row: r,
                    cell: cell.to_string(),
                });
            }
            columns[c].push(value);
        }
        if row.len() > width {
            // More cells than headers: an unnamed column holding too few values.
            return Err(Error::RaggedColumn {
                column: format!("<unnamed #{}>", width + 1),
                expected: n,
                found: raw.rows.iter().filter(|row| row.len() > width).count(),
            });
        }
    }

    let target_pos = raw
        .headers
        .iter()
        .position(|h| *h == opts.target)
        .ok_or_else(|| Error::TargetNotFound(opts.target.clone()))?;

    let mut features = Vec::with_capacity(width - 1);
    let mut target = None;
    for (c, (name, values)) in raw.headers.iter().zip(columns).enumerate() {
        let kind = match opts.overrides.get(name) {
            Some(KindOverride::Continuous) => ColumnKind::Continuous,
            Some(KindOverride::Discrete) => match infer_kind(&values, u32::MAX) {
                k @ ColumnKind::Discrete { .. } => k,
                ColumnKind::Continuous => {
                    let bad = values
                        .iter()
                        .copied()
                        .find(|v| !(*v >= 0.0 && v.fract() == 0.0))
                        .unwrap_or(f64::NAN);
                    return Err(Error::InvalidDiscrete {
                        column: name.clone(),
                        value: bad,
                        cardinality: 0,
                    });
                }
            },
            None => infer_kind(&values, opts.discrete_cap),
        };
        let col = Column::with_kind(name.clone(), values, kind)?;
        if c == target_pos {
            target = Some(col);
        } else {
            features.push(col);
        }
    }
    Dataset::new(features, target.expect("target position was located above"))
}

/// A set of feature indices, stored sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn empty() -> Self {
        FeatureSubset(Vec::new())
    }

    /// Validating constructor: rejects duplicates and out-of-range indices.
    pub fn new(indices: impl IntoIterator<Item = usize>, n_features: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Config(format!("duplicate feature index {}", w[0])));
            }
        }
        if let Some(&index) = v.iter().find(|&&i| i >= n_features) {
            return Err(Error::IndexOutOfRange { index, n_features });
        }
        Ok(FeatureSubset(v))
    }

    /// All features of a dataset with `n_features` columns.
    pub fn full(n_features: usize) -> Self {
        FeatureSubset((0..n_features).collect())
    }

    /// Builds a subset from indices already known to be distinct and in range.
    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FeatureSubset(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn with(&self, index: usize) -> FeatureSubset {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&index) {
            v.insert(pos, index);
        }
        FeatureSubset(v)
    }

    pub fn without(&self, index: usize) -> FeatureSubset {
        FeatureSubset(self.0.iter().copied().filter(|&i| i != index).collect())
    }

    pub fn is_subset_of(&self, other: &FeatureSubset) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn intersection(&self, other: &FeatureSubset) -> FeatureSubset {
        FeatureSubset(self.iter().filter(|&i| other.contains(i)).collect())
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "F{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

impl Unit {
    /// Multiplier taking a value in nats to this unit.
    pub fn per_nat(self) -> f64 {
        match self {
            Unit::Nats => 1.0,
            Unit::Bits => 1.0 / LN_2,
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" | "nat" => Ok(Unit::Nats),
            "bits" | "bit" => Ok(Unit::Bits),
            other => Err(Error::Config(format!("unknown unit `{other}`"))),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoValue {
    pub value: f64,
    pub unit: Unit,
}

impl InfoValue {
    pub fn nats(value: f64) -> Self {
        InfoValue {
            value,
            unit: Unit::Nats,
        }
    }

    pub fn bits(value: f64) -> Self {
        InfoValue {
            value,
            unit: Unit::Bits,
        }
    }

    pub fn to(self, unit: Unit) -> InfoValue {
        convert_units(self, unit)
    }

    pub fn as_nats(self) -> f64 {
        self.to(Unit::Nats).value
    }
}

pub fn convert_units(v: InfoValue, target: Unit) -> InfoValue {
    let value = match (v.unit, target) {
        (a, b) if a == b => v.value,
        (Unit::Nats, Unit::Bits) => v.value / LN_2,
        (Unit::Bits, Unit::Nats) => v.value * LN_2,
        _ => unreachable!(),
    };
    InfoValue {
        value,
        unit: target,
    }
}

/// Repeated estimates of one quantity, one per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateEnsemble {
    pub estimates: Vec<f64>,
    pub seeds: Vec<u64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single estimate.
    pub std: f64,
}

impl EstimateEnsemble {
    pub fn new(estimates: Vec<f64>, seeds: Vec<u64>) -> Self {
        assert!(
            !estimates.is_empty(),
            "an ensemble needs at least one estimate"
        );
        assert_eq!(estimates.len(), seeds.len());
        let n = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / n;
        // Identical estimates must give exactly zero spread.
        let std = if estimates.len() < 2 || estimates.iter().all(|&e| e == estimates[0]) {
            0.0
        } else {
            let ss: f64 = estimates.iter().map(|e| (e - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        EstimateEnsemble {
            estimates,
            seeds,
            mean,
            std,
        }
    }

    /// An ensemble of `seeds.len()` copies of one value.
    pub fn constant(value: f64, seeds: Vec<u64>) -> Self {
        EstimateEnsemble::new(vec![value; seeds.len()], seeds)
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        self.std == 0.0
    }

    /// Seed-wise combination of two ensembles drawn with the same seeds.
    pub fn zip_with(&self, other: &EstimateEnsemble, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.seeds, other.seeds);
        let estimates = self
            .estimates
            .iter()
            .zip(&other.estimates)
            .map(|(&a, &b)| f(a, b))
            .collect();
        EstimateEnsemble::new(estimates, self.seeds.clone())
    }

    pub fn sub(&self, other: &EstimateEnsemble) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &EstimateEnsemble) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EstimateEnsemble::new(
            self.estimates.iter().map(|e| e * factor).collect(),
            self.seeds.clone(),
        )
    }
}

/// Per-seed series behind the headline numbers of a [`PidfFeatureResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEnsembles {
    pub mi: EstimateEnsemble,
    pub fws: EstimateEnsemble,
    pub fwr: EstimateEnsemble,
    /// mci - fwr per seed.
    pub oci: EstimateEnsemble,
}

/// Decomposition of one feature's contribution to the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidfFeatureResult {
    pub feature: usize,
    pub mi: f64,
    pub fws: f64,
    pub fwr_total: f64,
    /// Contributor feature index -> redundant information removed with it.
    pub fwr_contributions: BTreeMap<usize, f64>,
    pub max_synergy_set: FeatureSubset,
    pub redundant_set: FeatureSubset,
    pub mci: f64,
    pub oci: f64,
    /// Set when the synergy is negative but smaller than twice its spread.
    pub fws_within_noise: bool,
    pub ensembles: FeatureEnsembles,
}

impl PidfFeatureResult {
    fn scaled(&self, factor: f64) -> Self {
        PidfFeatureResult {
            feature: self.feature,
            mi: self.mi * factor,
            fws: self.fws * factor,
            fwr_total: self.fwr_total * factor,
            fwr_contributions: self
                .fwr_contributions
                .iter()
                .map(|(&k, &v)| (k, v * factor))
                .collect(),
            max_synergy_set: self.max_synergy_set.clone(),
            redundant_set: self.redundant_set.clone(),
            mci: self.mci * factor,
            oci: self.oci * factor,
            fws_within_noise: self.fws_within_noise,
            ensembles: FeatureEnsembles {
                mi: self.ensembles.mi.scaled(factor),
                fws: self.ensembles.fws.scaled(factor),
                fwr: self.ensembles.fwr.scaled(factor),
                oci: self.ensembles.oci.scaled(factor),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub n_samples: usize,
    pub seed: u64,
}

impl DatasetFingerprint {
    pub fn of(data: &Dataset, seed: u64) -> Self {
        DatasetFingerprint {
            feature_names: data.feature_names(),
            target_name: data.target().name().to_string(),
            n_samples: data.n_samples(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidfReport {
    pub features: Vec<PidfFeatureResult>,
    pub estimator: EstimatorConfig,
    pub repetitions: usize,
    pub alpha: f64,
    /// Zero threshold in nats, whatever `unit` says.
    pub eps_zero: f64,
    pub unit: Unit,
    pub dataset: DatasetFingerprint,
}

impl PidfReport {
    /// Rescales every information value to `unit`.
    pub fn in_units(&self, unit: Unit) -> PidfReport {
        let factor = unit.per_nat() / self.unit.per_nat();
        PidfReport {
            features: self.features.iter().map(|f| f.scaled(factor)).collect(),
            unit,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rationale {
    /// Entered because its maximal information exceeds its redundancy.
    NonRedundant,
    /// Entered in ranked order with no redundant partner selected before it.
    RankedAndCompatible,
    /// Rejected because these redundant partners were already selected.
    RejectedRedundant { blocking: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: FeatureSubset,
    /// One entry per dataset feature, indexed by feature.
    pub rationale: Vec<Rationale>,
}
