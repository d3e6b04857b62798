//! Demographic shift between partitions and over a rolling window of a stream.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use crate::axis::DemographicAxis;
use crate::error::{Error, Result};
use crate::profile::{build_axis_profile, AxisProfile};
use crate::record::SampleRecord;
use crate::similarity::{aligned, demographic_similarity, ds};

/// Window capacity used when none is given.
pub const DEFAULT_CAPACITY: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub dataset_id: String,
    pub partitions: (String, String),
    /// DS between the two partition profiles, per axis.
    pub per_axis: BTreeMap<String, f64>,
}

/// DS between the profiles of partitions `part_a` and `part_b` on each axis.
/// 1 means no shift.
pub fn partition_shift(
    dataset_id: &str,
    records: &[SampleRecord],
    axes: &[DemographicAxis],
    part_a: &str,
    part_b: &str,
) -> Result<ShiftReport> {
    let pick = |name: &str| -> Result<Vec<SampleRecord>> {
        let subset: Vec<SampleRecord> =
            records.iter().filter(|r| r.partition.as_deref() == Some(name)).cloned().collect();
        if subset.is_empty() {
            return Err(Error::EmptyPartition { partition: name.into() });
        }
        Ok(subset)
    };
    let a = pick(part_a)?;
    let b = pick(part_b)?;
    let mut per_axis = BTreeMap::new();
    for axis in axes {
        let pa = build_axis_profile(&a, axis)?;
        let pb = build_axis_profile(&b, axis)?;
        per_axis.insert(axis.id().into(), ds(&pa, &pb)?.value);
    }
    Ok(ShiftReport { dataset_id: dataset_id.into(), partitions: (part_a.into(), part_b.into()), per_axis })
}

/// DS of the window against its reference, and whether the window has yet
/// to fill for the first time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReading {
    pub value: f64,
    pub warm_up: bool,
}

/// Fixed-capacity FIFO of the most recent group assignments on one axis,
/// compared against a reference profile fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingWindow {
    axis: DemographicAxis,
    capacity: usize,
    buffer: VecDeque<usize>,
    counts: Vec<u64>,
    reference: Vec<f64>,
}

impl RollingWindow {
    pub fn new(reference: &AxisProfile, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidCapacity);
        }
        let axis = reference.axis().clone();
        let (_, proportions) = aligned(reference, reference)?;
        Ok(Self {
            counts: vec![0; axis.len()],
            reference: proportions.into_owned(),
            axis,
            capacity,
            buffer: VecDeque::with_capacity(capacity),
        })
    }

    pub fn axis(&self) -> &DemographicAxis {
        &self.axis
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Buffered groups, oldest first.
    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.buffer.iter().map(|&i| self.axis.groups()[i].as_str())
    }

    /// Appends `group`, evicting the oldest entry when full.
    pub fn push(&mut self, group: &str) -> Result<()> {
        let i = self.axis.require(group)?;
        if self.buffer.len() == self.capacity {
            if let Some(old) = self.buffer.pop_front() {
                self.counts[old] -= 1;
            }
        }
        self.buffer.push_back(i);
        self.counts[i] += 1;
        Ok(())
    }

    /// The buffer's empirical profile.
    pub fn profile(&self) -> Result<AxisProfile> {
        if self.buffer.is_empty() {
            return Err(Error::EmptyWindow { axis: self.axis.id().into() });
        }
        AxisProfile::from_counts(self.axis.clone(), self.counts.clone())
    }

    pub fn similarity(&self) -> Result<WindowReading> {
        if self.buffer.is_empty() {
            return Err(Error::EmptyWindow { axis: self.axis.id().into() });
        }
        let n = self.buffer.len() as f64;
        let empirical: Vec<f64> = self.counts.iter().map(|&c| c as f64 / n).collect();
        Ok(WindowReading {
            value: demographic_similarity(&empirical, &self.reference),
            warm_up: self.buffer.len() < self.capacity,
        })
    }
}
