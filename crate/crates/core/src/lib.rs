//! Demographic profiling and similarity measures for dataset bias analysis.
//!
//! A dataset is summarized per demographic axis (age, gender, race, or a
//! combination of them) as the relative population of each group. Profiles
//! are compared with the Renkonen-family similarity `DS = 1 − ½ Σ |p − q|`,
//! and the same similarity drives the rest of the crate:
//!
//! * [`bias`]: similarity to ideal profiles (representation, evenness,
//!   class association) next to ENS, Shannon evenness and Cramér's V;
//! * [`clustering`]: pairwise DS matrices and complete-linkage clustering;
//! * [`shift`]: train/test shift and rolling-window drift.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

#[macro_use]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod axis;
pub mod bias;
pub mod clustering;
mod error;
pub mod profile;
pub mod record;
pub mod shift;
pub mod similarity;

pub use axis::{combination_axis, DemographicAxis, COMBINATION_SEPARATOR};
pub use bias::{
    bias_report, chi_square, cramers_v, ds_e, ds_r, ds_s, ens, richness, sei, BiasReport, ContingencyTable,
    TargetDistribution, TargetKind,
};
pub use clustering::{
    complete_linkage, cut_dendrogram, pairwise_matrix, ClusterAssignment, Dendrogram, Merge, SimilarityMatrix,
    DEFAULT_THRESHOLD,
};
pub use error::{Error, Result};
pub use profile::{
    build_axis_profile, class_subprofiles, AxisProfile, ClassPair, ClassSplit, DatasetProfile, NORMALIZATION_TOLERANCE,
};
pub use record::{aggregate_by_subject, project_record_to_combination, Aggregation, SampleRecord, TieFlag};
pub use shift::{partition_shift, RollingWindow, ShiftReport, WindowReading, DEFAULT_CAPACITY};
pub use similarity::{ds, jaccard, renkonen, renkonen_to_jaccard, Family, SimilarityScore};
