//! CSV formats: axis schemas, per-sample prediction tables, and
//! `group_id,proportion` files for external profiles and targets.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use dsap_core::{
    AxisProfile, DemographicAxis, SampleRecord, TargetDistribution, COMBINATION_SEPARATOR, NORMALIZATION_TOLERANCE,
};

use crate::format::fmt_float;

/// Fixed leading columns of a prediction table.
pub const PREDICTION_COLUMNS: [&str; 5] = ["dataset_id", "sample_id", "subject_id", "class_label", "partition"];

/// Axis id reserved for the combination of the selected axes.
pub const COMBINATION_AXIS: &str = "combination";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("IngestError: {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("SchemaError: {file}:{line}: {message}")]
    Schema { file: String, line: u64, message: String },
    #[error("IngestError: {file}:{line}: column '{field}': {message}")]
    Record { file: String, line: u64, field: String, message: String },
    #[error("NormalizationError: {file}: proportions sum to {sum}, expected 1 within {NORMALIZATION_TOLERANCE:e}")]
    Normalization { file: String, sum: f64 },
    #[error("RangeError: {file}:{line}: proportion {value} for group '{group}' is outside [0, 1]")]
    Range { file: String, line: u64, group: String, value: f64 },
}

impl IngestError {
    fn record(file: &str, line: u64, field: &str, message: impl Into<String>) -> Self {
        IngestError::Record { file: file.into(), line, field: field.into(), message: message.into() }
    }
}

fn open(path: &Path) -> Result<(String, csv::Reader<File>), IngestError> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io { file: name.clone(), source })?;
    Ok((name, reader(file)))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(input)
}

fn csv_error(file: &str, err: csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    IngestError::record(file, line, "*", format!("malformed row: {err}"))
}

fn expect_header<R: Read>(file: &str, rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), IngestError> {
    let header = rdr.headers().map_err(|e| csv_error(file, e))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(IngestError::Schema {
            file: file.into(),
            line: 1,
            message: format!(
                "expected header '{}', found '{}'",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

/// Reads an `axis_id,group_id` schema. Axes appear in first-seen order and
/// groups in file order; each axis's rows must be contiguous.
pub fn load_axes(path: impl AsRef<Path>) -> Result<Vec<DemographicAxis>, IngestError> {
    let (name, rdr) = open(path.as_ref())?;
    parse_axes(&name, rdr)
}

pub fn parse_axes<R: Read>(file: &str, mut rdr: csv::Reader<R>) -> Result<Vec<DemographicAxis>, IngestError> {
    expect_header(file, &mut rdr, &["axis_id", "group_id"])?;
    let schema = |line: u64, message: String| IngestError::Schema { file: file.into(), line, message };
    let mut axes: Vec<(String, Vec<String>)> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(file, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let (axis, group) = (row[0].trim(), row[1].trim());
        if axis.is_empty() || group.is_empty() {
            return Err(schema(line, "axis_id and group_id must be non-empty".into()));
        }
        if axis == COMBINATION_AXIS || axis.contains(COMBINATION_SEPARATOR) {
            return Err(schema(line, format!("axis id '{axis}' is reserved or contains '{COMBINATION_SEPARATOR}'")));
        }
        if group.contains(COMBINATION_SEPARATOR) {
            return Err(schema(
                line,
                format!("group '{group}' contains the combination separator '{COMBINATION_SEPARATOR}'"),
            ));
        }
        match axes.last_mut() {
            Some((id, groups)) if id == axis => {
                if groups.iter().any(|g| g == group) {
                    return Err(schema(line, format!("duplicate group '{group}' in axis '{axis}'")));
                }
                groups.push(group.into());
            }
            _ => {
                if axes.iter().any(|(id, _)| id == axis) {
                    return Err(schema(line, format!("duplicate axis id '{axis}'")));
                }
                axes.push((axis.into(), vec![group.into()]));
            }
        }
    }
    if axes.is_empty() {
        return Err(schema(1, "schema declares no axes".into()));
    }
    axes.into_iter()
        .map(|(id, groups)| DemographicAxis::new(id, groups).map_err(|e| schema(0, e.to_string())))
        .collect()
}

pub fn write_axes(axes: &[DemographicAxis]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["axis_id", "group_id"]).expect("in-memory write");
    for a in axes {
        for g in a.groups() {
            w.write_record([a.id(), g]).expect("in-memory write");
        }
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Records of one dataset, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecords {
    pub dataset_id: String,
    pub records: Vec<SampleRecord>,
}

/// A prediction table grouped by dataset in order of first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionTable {
    pub datasets: Vec<DatasetRecords>,
}

impl PredictionTable {
    pub fn dataset(&self, id: &str) -> Option<&DatasetRecords> {
        self.datasets.iter().find(|d| d.dataset_id == id)
    }

    pub fn len(&self) -> usize {
        self.datasets.iter().map(|d| d.records.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }
}

/// Reads a prediction table whose axis columns are exactly the schema's axes.
pub fn load_predictions(path: impl AsRef<Path>, axes: &[DemographicAxis]) -> Result<PredictionTable, IngestError> {
    let (name, rdr) = open(path.as_ref())?;
    parse_predictions(&name, rdr, axes)
}

pub fn parse_predictions<R: Read>(
    file: &str,
    mut rdr: csv::Reader<R>,
    axes: &[DemographicAxis],
) -> Result<PredictionTable, IngestError> {
    let header = rdr.headers().map_err(|e| csv_error(file, e))?.clone();
    let schema = |message: String| IngestError::Schema { file: file.into(), line: 1, message };
    if header.len() < PREDICTION_COLUMNS.len() || header.iter().take(5).ne(PREDICTION_COLUMNS) {
        return Err(schema(format!("header must start with '{}'", PREDICTION_COLUMNS.join(","))));
    }
    let mut axis_columns: Vec<(usize, &DemographicAxis)> = Vec::new();
    for (i, col) in header.iter().enumerate().skip(5) {
        let axis = axes
            .iter()
            .find(|a| a.id() == col)
            .ok_or_else(|| schema(format!("column '{col}' is not a declared axis")))?;
        if axis_columns.iter().any(|(_, a)| a.id() == col) {
            return Err(schema(format!("axis column '{col}' appears twice")));
        }
        axis_columns.push((i, axis));
    }
    if let Some(missing) = axes.iter().find(|a| axis_columns.iter().all(|(_, c)| c.id() != a.id())) {
        return Err(schema(format!("no column for axis '{}'", missing.id())));
    }

    let mut table = PredictionTable::default();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let optional = |s: &str| (!s.is_empty()).then(|| s.to_string());
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(file, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let (dataset, sample) = (&row[0], &row[1]);
        if dataset.is_empty() {
            return Err(IngestError::record(file, line, "dataset_id", "must be non-empty"));
        }
        if sample.is_empty() {
            return Err(IngestError::record(file, line, "sample_id", "must be non-empty"));
        }
        if !seen.insert((dataset.to_string(), sample.to_string())) {
            return Err(IngestError::record(
                file,
                line,
                "sample_id",
                format!("duplicate sample '{sample}' in dataset '{dataset}'"),
            ));
        }
        let mut record = SampleRecord::new(sample);
        record.subject_id = optional(&row[2]);
        record.class_label = optional(&row[3]);
        record.partition = optional(&row[4]);
        for &(i, axis) in &axis_columns {
            let group = &row[i];
            if axis.index_of(group).is_none() {
                return Err(IngestError::record(
                    file,
                    line,
                    axis.id(),
                    format!("'{group}' is not a group of axis '{}'", axis.id()),
                ));
            }
            record.assignments.insert(axis.id().into(), group.into());
        }
        match table.datasets.iter_mut().find(|d| d.dataset_id == dataset) {
            Some(d) => d.records.push(record),
            None => table.datasets.push(DatasetRecords { dataset_id: dataset.into(), records: vec![record] }),
        }
    }
    Ok(table)
}

pub fn write_predictions(table: &PredictionTable, axes: &[DemographicAxis]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = PREDICTION_COLUMNS.to_vec();
    header.extend(axes.iter().map(DemographicAxis::id));
    w.write_record(&header).expect("in-memory write");
    for d in &table.datasets {
        for r in &d.records {
            let mut row: Vec<&str> = vec![
                &d.dataset_id,
                &r.sample_id,
                r.subject_id.as_deref().unwrap_or(""),
                r.class_label.as_deref().unwrap_or(""),
                r.partition.as_deref().unwrap_or(""),
            ];
            row.extend(axes.iter().map(|a| r.group_on(a.id()).unwrap_or("")));
            w.write_record(&row).expect("in-memory write");
        }
    }
    into_string(w)
}

/// Parses `group_id,proportion` rows into a vector aligned with `axis`,
/// checking range and normalization.
pub fn parse_proportions<R: Read>(
    file: &str,
    mut rdr: csv::Reader<R>,
    axis: &DemographicAxis,
) -> Result<Vec<f64>, IngestError> {
    expect_header(file, &mut rdr, &["group_id", "proportion"])?;
    let mut values = vec![0.0; axis.len()];
    let mut seen = BTreeSet::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(file, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let group = row[0].trim();
        let i = axis.index_of(group).ok_or_else(|| {
            IngestError::record(file, line, "group_id", format!("'{group}' is not a group of axis '{}'", axis.id()))
        })?;
        if !seen.insert(i) {
            return Err(IngestError::record(file, line, "group_id", format!("group '{group}' listed twice")));
        }
        let value: f64 = row[1]
            .trim()
            .parse()
            .map_err(|_| IngestError::record(file, line, "proportion", format!("'{}' is not a number", &row[1])))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(IngestError::Range { file: file.into(), line, group: group.into(), value });
        }
        values[i] = value;
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(IngestError::Normalization { file: file.into(), sum });
    }
    Ok(values)
}

/// A proportion-only profile; groups absent from the file get zero.
pub fn load_external_profile(path: impl AsRef<Path>, axis: &DemographicAxis) -> Result<AxisProfile, IngestError> {
    let (name, rdr) = open(path.as_ref())?;
    let values = parse_proportions(&name, rdr, axis)?;
    AxisProfile::from_proportions(axis.clone(), values)
        .map_err(|e| IngestError::record(&name, 0, "proportion", e.to_string()))
}

/// A custom target distribution for `axis`.
pub fn load_target(path: impl AsRef<Path>, axis: &DemographicAxis) -> Result<TargetDistribution, IngestError> {
    let (name, rdr) = open(path.as_ref())?;
    let values = parse_proportions(&name, rdr, axis)?;
    let pairs = axis.groups().iter().map(String::as_str).zip(values);
    TargetDistribution::custom(axis, pairs).map_err(|e| IngestError::record(&name, 0, "proportion", e.to_string()))
}

/// `group_id,proportion` rows over every group of the axis, in axis order.
pub fn write_proportions(groups: &[String], proportions: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group_id", "proportion"]).expect("in-memory write");
    for (g, &p) in groups.iter().zip(proportions) {
        w.write_record([g.as_str(), &fmt_float(p)]).expect("in-memory write");
    }
    into_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axes_from(text: &str) -> Result<Vec<DemographicAxis>, IngestError> {
        parse_axes("axes.csv", reader(text.as_bytes()))
    }

    fn abc() -> DemographicAxis {
        DemographicAxis::new("a", ["A", "B", "C"]).unwrap()
    }

    #[test]
    fn schema_errors_carry_lines() {
        let dup_axis = axes_from("axis_id,group_id\na,x\nb,y\na,z\n").unwrap_err();
        assert!(matches!(dup_axis, IngestError::Schema { line: 4, .. }), "{dup_axis}");
        let plus = axes_from("axis_id,group_id\nage,20+29\n").unwrap_err();
        assert!(plus.to_string().contains("separator"), "{plus}");
        let dup_group = axes_from("axis_id,group_id\na,x\na,x\n").unwrap_err();
        assert!(matches!(dup_group, IngestError::Schema { line: 3, .. }));
        assert!(matches!(axes_from("axis_id,group_id\n"), Err(IngestError::Schema { .. })));
        assert!(matches!(axes_from("axis,group\na,b\n"), Err(IngestError::Schema { line: 1, .. })));
        assert!(matches!(axes_from("axis_id,group_id\na,\n"), Err(IngestError::Schema { line: 2, .. })));
        assert!(matches!(axes_from("axis_id,group_id\ncombination,x\n"), Err(IngestError::Schema { .. })));
    }

    #[test]
    fn predictions_validation() {
        let axes = vec![abc()];
        let parse = |t: &str| parse_predictions("p.csv", reader(t.as_bytes()), &axes);
        let ok =
            parse("dataset_id,sample_id,subject_id,class_label,partition,a\nd,1,,happy,train,A\nd,2,s,,,B\ne,1,,,,C\n")
                .unwrap();
        assert_eq!(ok.datasets.len(), 2);
        assert_eq!(ok.len(), 3);
        let r = &ok.dataset("d").unwrap().records[1];
        assert_eq!(
            (r.subject_id.as_deref(), r.class_label.as_deref(), r.partition.as_deref()),
            (Some("s"), None, None)
        );

        let unknown =
            parse("dataset_id,sample_id,subject_id,class_label,partition,a\nd,1,,,,A\nd,2,,,,Z\n").unwrap_err();
        match &unknown {
            IngestError::Record { line, field, .. } => assert_eq!((*line, field.as_str()), (3, "a")),
            e => panic!("{e}"),
        }
        let dup = parse("dataset_id,sample_id,subject_id,class_label,partition,a\nd,1,,,,A\nd,1,,,,B\n").unwrap_err();
        assert!(matches!(dup, IngestError::Record { line: 3, .. }));
        let short = parse("dataset_id,sample_id,subject_id,class_label,partition,a\nd,1,,,\n").unwrap_err();
        assert!(matches!(short, IngestError::Record { line: 2, .. }), "{short}");
        let extra = parse("dataset_id,sample_id,subject_id,class_label,partition,a,confidence\n").unwrap_err();
        assert!(matches!(extra, IngestError::Schema { .. }));
        let missing = parse("dataset_id,sample_id,subject_id,class_label,partition\n").unwrap_err();
        assert!(matches!(missing, IngestError::Schema { .. }));
    }

    #[test]
    fn proportion_files() {
        let parse = |t: &str| parse_proportions("t.csv", reader(t.as_bytes()), &abc());
        assert_eq!(parse("group_id,proportion\nA,0.5\nB,0.5\n").unwrap(), [0.5, 0.5, 0.0]);
        assert!(matches!(parse("group_id,proportion\nA,0.6\nB,0.5\n"), Err(IngestError::Normalization { .. })));
        assert!(matches!(parse("group_id,proportion\nA,1.5\nB,-0.5\n"), Err(IngestError::Range { line: 2, .. })));
        assert!(matches!(parse("group_id,proportion\nA,x\n"), Err(IngestError::Record { .. })));
        assert!(matches!(parse("group_id,proportion\nZ,1\n"), Err(IngestError::Record { .. })));
        assert!(matches!(parse("group_id,proportion\nA,0.5\nA,0.5\n"), Err(IngestError::Record { .. })));
    }
}
