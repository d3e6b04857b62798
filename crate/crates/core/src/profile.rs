//! Relative-population profiles on one axis, and per-dataset collections of them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::axis::DemographicAxis;
use crate::error::{Error, Result};
use crate::record::SampleRecord;

/// Tolerance on `Σ p_g = 1` for profiles and targets given as proportions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// The relative population of every group of one axis.
///
/// Profiles built from samples keep their counts; profiles given as
/// proportions (published profiles, targets) have none.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisProfile {
    axis: DemographicAxis,
    counts: Option<Vec<u64>>,
    proportions: Vec<f64>,
}

impl AxisProfile {
    /// Profile from per-group counts aligned with `axis.groups()`.
    pub fn from_counts(axis: DemographicAxis, counts: Vec<u64>) -> Result<Self> {
        assert_eq!(counts.len(), axis.len(), "counts must align with the axis groups");
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyPopulation);
        }
        let n = total as f64;
        let proportions = counts.iter().map(|&c| c as f64 / n).collect();
        Ok(Self { axis, counts: Some(counts), proportions })
    }

    /// Proportion-only profile; values align with `axis.groups()`.
    pub fn from_proportions(axis: DemographicAxis, proportions: Vec<f64>) -> Result<Self> {
        assert_eq!(proportions.len(), axis.len(), "proportions must align with the axis groups");
        validate_simplex(&axis, &proportions)?;
        Ok(Self { axis, counts: None, proportions })
    }

    /// Proportion-only profile from `(group, proportion)` pairs; groups not
    /// listed get zero.
    pub fn from_group_proportions<'a, I>(axis: DemographicAxis, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let proportions = align_pairs(&axis, pairs)?;
        Self::from_proportions(axis, proportions)
    }

    pub fn axis(&self) -> &DemographicAxis {
        &self.axis
    }

    pub fn axis_id(&self) -> &str {
        self.axis.id()
    }

    pub fn groups(&self) -> &[String] {
        self.axis.groups()
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn total(&self) -> Option<u64> {
        self.counts.as_ref().map(|c| c.iter().sum())
    }

    pub fn proportion(&self, group: &str) -> Option<f64> {
        self.axis.index_of(group).map(|i| self.proportions[i])
    }
}

/// Turns `(group, value)` pairs into a vector aligned with `axis`, rejecting
/// unknown and repeated groups.
pub(crate) fn align_pairs<'a, I>(axis: &DemographicAxis, pairs: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut values = vec![0.0; axis.len()];
    let mut seen = vec![false; axis.len()];
    for (group, p) in pairs {
        let i = axis.require(group)?;
        if seen[i] {
            return Err(Error::DuplicateGroup { axis: axis.id().into(), group: group.into() });
        }
        seen[i] = true;
        values[i] = p;
    }
    Ok(values)
}

pub(crate) fn validate_simplex(axis: &DemographicAxis, values: &[f64]) -> Result<()> {
    for (g, &p) in axis.groups().iter().zip(values) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProportionRange { axis: axis.id().into(), group: g.clone(), value: p });
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization { axis: axis.id().into(), sum });
    }
    Ok(())
}

fn tally<'a>(records: impl IntoIterator<Item = &'a SampleRecord>, axis: &DemographicAxis) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; axis.len()];
    for r in records {
        counts[r.group_index(axis)?] += 1;
    }
    Ok(counts)
}

/// Counts the records' assignments on `axis` and normalizes them.
pub fn build_axis_profile(records: &[SampleRecord], axis: &DemographicAxis) -> Result<AxisProfile> {
    if records.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    AxisProfile::from_counts(axis.clone(), tally(records, axis)?)
}

/// Profile of one class (`X_y`) and of the rest of the dataset (`X_ŷ`).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPair {
    pub class: AxisProfile,
    pub rest: AxisProfile,
}

/// Per-class profiles on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSplit {
    /// Classes whose subset and complement are both non-empty, sorted by label.
    pub classes: BTreeMap<String, ClassPair>,
    /// Classes left out because their complement is empty.
    pub excluded: Vec<String>,
    /// Group counts of every class, excluded ones included.
    pub joint: BTreeMap<String, Vec<u64>>,
}

impl ClassSplit {
    /// The class-by-group contingency table, rows in label order.
    pub fn joint_counts(&self) -> Vec<Vec<u64>> {
        self.joint.values().cloned().collect()
    }
}

/// Splits labeled records by class and profiles each class and its complement.
pub fn class_subprofiles(records: &[SampleRecord], axis: &DemographicAxis) -> Result<ClassSplit> {
    if records.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut per_class: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    let mut all = vec![0u64; axis.len()];
    for r in records {
        let label = r.class_label.as_deref().ok_or_else(|| Error::MissingLabel { sample: r.sample_id.clone() })?;
        let g = r.group_index(axis)?;
        per_class.entry(label).or_insert_with(|| vec![0; axis.len()])[g] += 1;
        all[g] += 1;
    }
    let mut split = ClassSplit { classes: BTreeMap::new(), excluded: Vec::new(), joint: BTreeMap::new() };
    for (label, counts) in per_class {
        split.joint.insert(label.into(), counts.clone());
        let rest: Vec<u64> = all.iter().zip(&counts).map(|(a, c)| a - c).collect();
        if rest.iter().all(|&c| c == 0) {
            split.excluded.push(label.into());
            continue;
        }
        split.classes.insert(
            label.into(),
            ClassPair {
                class: AxisProfile::from_counts(axis.clone(), counts)?,
                rest: AxisProfile::from_counts(axis.clone(), rest)?,
            },
        );
    }
    Ok(split)
}

/// All axis profiles of one dataset, plus per-class splits when labeled.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub dataset_id: String,
    pub axis_profiles: BTreeMap<String, AxisProfile>,
    pub class_splits: BTreeMap<String, ClassSplit>,
}

impl DatasetProfile {
    pub fn new(dataset_id: impl Into<String>) -> Self {
        Self { dataset_id: dataset_id.into(), axis_profiles: BTreeMap::new(), class_splits: BTreeMap::new() }
    }

    /// Profiles `records` on every axis. Class splits are built when every
    /// record carries a class label; unlabeled datasets get none, and a mix
    /// of labeled and unlabeled records is a `MissingLabel` error.
    pub fn from_records(
        dataset_id: impl Into<String>,
        records: &[SampleRecord],
        axes: &[DemographicAxis],
    ) -> Result<Self> {
        let mut out = Self::new(dataset_id);
        let labeled = records.iter().filter(|r| r.class_label.is_some()).count();
        for axis in axes {
            out.axis_profiles.insert(axis.id().into(), build_axis_profile(records, axis)?);
            if labeled > 0 {
                out.class_splits.insert(axis.id().into(), class_subprofiles(records, axis)?);
            }
        }
        Ok(out)
    }

    pub fn with_profile(mut self, profile: AxisProfile) -> Self {
        self.axis_profiles.insert(profile.axis_id().into(), profile);
        self
    }

    pub fn profile(&self, axis_id: &str) -> Option<&AxisProfile> {
        self.axis_profiles.get(axis_id)
    }

    pub fn class_split(&self, axis_id: &str) -> Option<&ClassSplit> {
        self.class_splits.get(axis_id)
    }
}
