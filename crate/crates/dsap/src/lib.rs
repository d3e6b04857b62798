//! File formats, reports and the command-line front end for `dsap-core`.

pub mod cli;
pub mod format;
pub mod ingest;
pub mod svg;

pub use ingest::{
    load_axes, load_external_profile, load_predictions, load_target, DatasetRecords, IngestError, PredictionTable,
};
