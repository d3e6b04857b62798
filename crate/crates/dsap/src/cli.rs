//! The `dsap` command line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use dsap_core::{
    aggregate_by_subject, bias_report, combination_axis, complete_linkage, cut_dendrogram, pairwise_matrix,
    partition_shift, project_record_to_combination, AxisProfile, BiasReport, DatasetProfile, DemographicAxis,
    RollingWindow, SampleRecord, TargetDistribution, TieFlag, DEFAULT_CAPACITY, DEFAULT_THRESHOLD,
};

use crate::format::{fmt_float, num, opt_cell, opt_num};
use crate::ingest::{load_axes, load_predictions, load_target, IngestError, COMBINATION_AXIS};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "dsap", version, about = "Demographic profiles, similarity, bias, clustering and shift of datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-dataset, per-axis demographic profiles.
    Profile(CommonArgs),
    /// Pairwise similarity matrices between datasets.
    Compare(CommonArgs),
    /// Representation, evenness and stereotype scores plus baselines.
    Bias(BiasArgs),
    /// Complete-linkage clustering of datasets, cut at a cophenetic distance.
    Cluster(ClusterArgs),
    /// Similarity between two partitions of each dataset.
    Shift(ShiftArgs),
    /// Rolling-window similarity of an event stream to a reference profile.
    Monitor(MonitorArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Axis schema CSV (`axis_id,group_id`).
    #[arg(long)]
    pub schema: PathBuf,
    /// Prediction table CSV.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Axes to report, comma separated; `combination` adds the product axis.
    #[arg(long, value_delimiter = ',')]
    pub axes: Vec<String>,
    /// Add the combination of the selected axes.
    #[arg(long)]
    pub combination: bool,
    /// Restrict to these datasets (repeatable).
    #[arg(long = "dataset")]
    pub datasets: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Representation target as `<axis>=<path>` (repeatable).
    #[arg(long = "target")]
    pub targets: Vec<String>,
    /// Evenness target as `<axis>=<path>` (repeatable).
    #[arg(long = "even-target")]
    pub even_targets: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Maximum cophenetic distance within a cluster.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// The two partitions to compare.
    #[arg(long, value_delimiter = ',', default_value = "train,test")]
    pub partitions: Vec<String>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Only use reference samples from this partition.
    #[arg(long)]
    pub reference_partition: Option<String>,
    /// Newline-delimited JSON events (`{"<axis>": "<group>", ...}`); `-` for standard input.
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    pub capacity: usize,
    /// Emit one record every N accepted events.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Abort on the first malformed event instead of reporting and continuing.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Core(#[from] dsap_core::Error),
    #[error("UsageError: {0}")]
    Usage(String),
    #[error("Undefined: {0}")]
    Undefined(String),
    #[error("IoError: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_undefined() => 3,
            CliError::Undefined(_) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A command's output and a one-line summary for the terminal.
pub struct Outcome {
    pub body: String,
    pub summary: String,
    /// Set when every requested result was undefined.
    pub all_undefined: bool,
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<i32> {
    let (outcome, output) = match &cli.command {
        Command::Profile(a) => (cmd_profile(a)?, &a.output),
        Command::Compare(a) => (cmd_compare(a)?, &a.output),
        Command::Bias(a) => (cmd_bias(a)?, &a.common.output),
        Command::Cluster(a) => (cmd_cluster(a)?, &a.common.output),
        Command::Shift(a) => (cmd_shift(a)?, &a.common.output),
        Command::Monitor(a) => return cmd_monitor(a),
    };
    write_output(output.as_deref(), &outcome.body)?;
    summarize(&outcome.summary);
    Ok(if outcome.all_undefined { 3 } else { 0 })
}

fn write_output(path: Option<&Path>, body: &str) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn summarize(line: &str) {
    if std::env::var_os("DSAP_NO_COLOR").is_some() {
        eprintln!("dsap: {line}");
    } else {
        eprintln!("\x1b[1;32mdsap\x1b[0m: {line}");
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// One dataset after subject aggregation, with its profiles.
pub struct Prepared {
    pub dataset_id: String,
    pub samples: usize,
    pub records: Vec<SampleRecord>,
    pub ties: Vec<TieFlag>,
    pub profile: DatasetProfile,
}

/// Loaded inputs: the selected axes (combination last) and prepared datasets.
pub struct Workspace {
    pub axes: Vec<DemographicAxis>,
    pub datasets: Vec<Prepared>,
}

impl Workspace {
    fn axis(&self, id: &str) -> CliResult<&DemographicAxis> {
        self.axes.iter().find(|a| a.id() == id).ok_or_else(|| CliError::Usage(format!("axis '{id}' is not selected")))
    }
}

/// Resolves `--axes`/`--combination` against the schema.
pub fn select_axes(
    schema: &[DemographicAxis],
    requested: &[String],
    combination: bool,
) -> CliResult<Vec<DemographicAxis>> {
    let mut plain = Vec::new();
    let mut want_combo = combination;
    for token in requested.iter().map(|t| t.trim()).filter(|t| !t.is_empty()) {
        if token == COMBINATION_AXIS {
            want_combo = true;
            continue;
        }
        let axis = schema
            .iter()
            .find(|a| a.id() == token)
            .ok_or_else(|| CliError::Usage(format!("unknown axis '{token}'")))?;
        if !plain.iter().any(|a: &DemographicAxis| a.id() == token) {
            plain.push(axis.clone());
        }
    }
    let constituents = if plain.is_empty() { schema.to_vec() } else { plain.clone() };
    let mut out =
        if plain.is_empty() && !requested.is_empty() && want_combo { Vec::new() } else { constituents.clone() };
    if want_combo {
        out.push(combination_axis(&constituents)?.renamed(COMBINATION_AXIS));
    }
    Ok(out)
}

pub fn load_workspace(args: &CommonArgs, partition: Option<&str>) -> CliResult<Workspace> {
    let schema = load_axes(&args.schema)?;
    let axes = select_axes(&schema, &args.axes, args.combination)?;
    let table = load_predictions(&args.predictions, &schema)?;
    for id in &args.datasets {
        if table.dataset(id).is_none() {
            return Err(CliError::Usage(format!("dataset '{id}' is not in {}", args.predictions.display())));
        }
    }
    let combo = axes.iter().find(|a| a.is_combination());
    let mut datasets = Vec::new();
    for d in &table.datasets {
        if !args.datasets.is_empty() && !args.datasets.contains(&d.dataset_id) {
            continue;
        }
        let records: Vec<SampleRecord> = match partition {
            Some(p) => d.records.iter().filter(|r| r.partition.as_deref() == Some(p)).cloned().collect(),
            None => d.records.clone(),
        };
        let agg = aggregate_by_subject(&records, &schema);
        let records = match combo {
            Some(c) => agg.records.iter().map(|r| project_record_to_combination(r, c)).collect::<Result<_, _>>()?,
            None => agg.records,
        };
        let profile = DatasetProfile::from_records(d.dataset_id.clone(), &records, &axes)?;
        datasets.push(Prepared {
            dataset_id: d.dataset_id.clone(),
            samples: d.records.len(),
            records,
            ties: agg.ties,
            profile,
        });
    }
    if datasets.is_empty() {
        return Err(dsap_core::Error::EmptyPopulation.into());
    }
    Ok(Workspace { axes, datasets })
}

fn no_svg(format: OutputFormat, command: &str) -> CliResult<()> {
    if format == OutputFormat::Svg {
        return Err(CliError::Usage(format!("svg output is not available for '{command}'")));
    }
    Ok(())
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn profile_json(p: &AxisProfile) -> Value {
    json!({
        "groups": p.groups(),
        "counts": p.counts(),
        "proportions": p.proportions().iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "total": p.total(),
    })
}

fn tie_json(t: &TieFlag) -> Value {
    json!({
        "subject_id": t.subject_id,
        "class_label": t.class_label,
        "partition": t.partition,
        "axis_id": t.axis_id,
        "tied_groups": t.tied_groups,
        "chosen": t.chosen,
    })
}

pub fn cmd_profile(args: &CommonArgs) -> CliResult<Outcome> {
    no_svg(args.format, "profile")?;
    let ws = load_workspace(args, None)?;
    let body = match args.format {
        OutputFormat::Csv => {
            let mut rows = vec![vec!["dataset_id", "axis_id", "group_id", "count", "proportion"]
                .into_iter()
                .map(String::from)
                .collect()];
            for d in &ws.datasets {
                for axis in &ws.axes {
                    let p = &d.profile.axis_profiles[axis.id()];
                    for (i, g) in p.groups().iter().enumerate() {
                        rows.push(vec![
                            d.dataset_id.clone(),
                            axis.id().into(),
                            g.clone(),
                            p.counts().map(|c| c[i].to_string()).unwrap_or_default(),
                            fmt_float(p.proportions()[i]),
                        ]);
                    }
                }
            }
            csv_string(rows)
        }
        _ => {
            let datasets: Vec<Value> = ws
                .datasets
                .iter()
                .map(|d| {
                    let axes: Map<String, Value> =
                        d.profile.axis_profiles.iter().map(|(k, p)| (k.clone(), profile_json(p))).collect();
                    json!({
                        "dataset_id": d.dataset_id,
                        "samples": d.samples,
                        "units": d.records.len(),
                        "tied_subjects": d.ties.iter().map(tie_json).collect::<Vec<_>>(),
                        "axes": axes,
                    })
                })
                .collect();
            pretty(&json!({ "datasets": datasets }))
        }
    };
    Ok(Outcome {
        body,
        summary: format!("profiled {} dataset(s) on {} axis/axes", ws.datasets.len(), ws.axes.len()),
        all_undefined: false,
    })
}

fn matrices(ws: &Workspace) -> CliResult<Vec<dsap_core::SimilarityMatrix>> {
    let profiles: Vec<DatasetProfile> = ws.datasets.iter().map(|d| d.profile.clone()).collect();
    ws.axes.iter().map(|a| pairwise_matrix(&profiles, a.id()).map_err(CliError::from)).collect()
}

fn matrix_json(m: &dsap_core::SimilarityMatrix) -> Value {
    json!({
        "axis_id": m.axis_id,
        "dataset_ids": m.dataset_ids,
        "values": m.values.iter().map(|r| r.iter().map(|&v| num(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn cmd_compare(args: &CommonArgs) -> CliResult<Outcome> {
    let ws = load_workspace(args, None)?;
    let ms = matrices(&ws)?;
    let body = match args.format {
        OutputFormat::Svg => svg::heatmaps(&ms),
        OutputFormat::Csv => {
            let mut header = vec!["axis_id".to_string(), "dataset_id".to_string()];
            header.extend(ms[0].dataset_ids.iter().cloned());
            let mut rows = vec![header];
            for m in &ms {
                for (i, id) in m.dataset_ids.iter().enumerate() {
                    let mut row = vec![m.axis_id.clone(), id.clone()];
                    row.extend(m.values[i].iter().map(|&v| fmt_float(v)));
                    rows.push(row);
                }
            }
            csv_string(rows)
        }
        OutputFormat::Json => pretty(&json!({ "matrices": ms.iter().map(matrix_json).collect::<Vec<_>>() })),
    };
    Ok(Outcome {
        body,
        summary: format!("compared {} datasets on {} axis/axes", ws.datasets.len(), ms.len()),
        all_undefined: false,
    })
}

/// `<axis>=<path>` pairs loaded against the selected axes.
fn load_targets(ws: &Workspace, specs: &[String]) -> CliResult<Vec<(TargetDistribution, String)>> {
    let mut out: Vec<(TargetDistribution, String)> = Vec::new();
    for spec in specs {
        let (axis_id, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("target '{spec}' must look like <axis>=<path>")))?;
        let axis = ws.axis(axis_id)?;
        if out.iter().any(|(t, _)| t.axis_id == axis_id) {
            return Err(CliError::Usage(format!("axis '{axis_id}' has two targets")));
        }
        out.push((load_target(path, axis)?, path.to_string()));
    }
    Ok(out)
}

fn bias_json(r: &BiasReport, rep: Option<&str>, even: Option<&str>) -> Value {
    json!({
        "dataset_id": r.dataset_id,
        "axis_id": r.axis_id,
        "ds_r": num(r.ds_r),
        "ds_r_uniform": num(r.ds_r_uniform),
        "ds_r_delta": num(r.ds_r - r.ds_r_uniform),
        "ds_e": num(r.ds_e),
        "ds_s": opt_num(r.ds_s),
        "ens": num(r.ens),
        "sei": opt_num(r.sei),
        "richness": r.richness,
        "cramers_v": opt_num(r.cramers_v),
        "rep_target": { "kind": r.rep_target.as_str(), "path": rep },
        "even_target": { "kind": r.even_target.as_str(), "path": even },
        "classes_used": r.classes_used,
        "classes_excluded": r.classes_excluded,
    })
}

pub fn cmd_bias(args: &BiasArgs) -> CliResult<Outcome> {
    no_svg(args.common.format, "bias")?;
    let ws = load_workspace(&args.common, None)?;
    let reps = load_targets(&ws, &args.targets)?;
    let evens = load_targets(&ws, &args.even_targets)?;
    let find = |ts: &'_ [(TargetDistribution, String)], axis: &str| -> Option<(TargetDistribution, String)> {
        ts.iter().find(|(t, _)| t.axis_id == axis).cloned()
    };
    let mut reports = Vec::new();
    for d in &ws.datasets {
        for axis in &ws.axes {
            let rep = find(&reps, axis.id());
            let even = find(&evens, axis.id());
            let r = bias_report(&d.profile, axis.id(), rep.as_ref().map(|t| &t.0), even.as_ref().map(|t| &t.0))?;
            reports.push((r, rep.map(|t| t.1), even.map(|t| t.1)));
        }
    }
    let body = match args.common.format {
        OutputFormat::Csv => {
            let header = [
                "dataset_id",
                "axis_id",
                "ds_r",
                "ds_r_uniform",
                "ds_r_delta",
                "ds_e",
                "ds_s",
                "ens",
                "sei",
                "richness",
                "cramers_v",
                "rep_target",
                "even_target",
            ];
            let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
            for (r, _, _) in &reports {
                rows.push(vec![
                    r.dataset_id.clone(),
                    r.axis_id.clone(),
                    fmt_float(r.ds_r),
                    fmt_float(r.ds_r_uniform),
                    fmt_float(r.ds_r - r.ds_r_uniform),
                    fmt_float(r.ds_e),
                    opt_cell(r.ds_s),
                    fmt_float(r.ens),
                    opt_cell(r.sei),
                    r.richness.to_string(),
                    opt_cell(r.cramers_v),
                    r.rep_target.as_str().into(),
                    r.even_target.as_str().into(),
                ]);
            }
            csv_string(rows)
        }
        _ => {
            let rows: Vec<Value> =
                reports.iter().map(|(r, rep, even)| bias_json(r, rep.as_deref(), even.as_deref())).collect();
            pretty(&json!({ "reports": rows }))
        }
    };
    Ok(Outcome { body, summary: format!("{} bias report(s)", reports.len()), all_undefined: false })
}

pub fn cmd_cluster(args: &ClusterArgs) -> CliResult<Outcome> {
    if !args.threshold.is_finite() || args.threshold < 0.0 {
        return Err(CliError::Usage(format!("threshold must be a non-negative number, got {}", args.threshold)));
    }
    let ws = load_workspace(&args.common, None)?;
    let items: Vec<_> = matrices(&ws)?
        .into_iter()
        .map(|m| {
            let d = complete_linkage(&m);
            let a = cut_dendrogram(&d, args.threshold);
            (m, d, a)
        })
        .collect();
    let body = match args.common.format {
        OutputFormat::Svg => svg::cluster_view(&items),
        OutputFormat::Csv => {
            let mut rows = vec![vec!["axis_id".to_string(), "dataset_id".into(), "cluster".into()]];
            for (m, _, a) in &items {
                for (id, l) in a.dataset_ids.iter().zip(&a.labels) {
                    rows.push(vec![m.axis_id.clone(), id.clone(), l.clone()]);
                }
            }
            csv_string(rows)
        }
        OutputFormat::Json => {
            let axes: Map<String, Value> = items
                .iter()
                .map(|(m, d, a)| {
                    let merges: Vec<Value> = d
                        .merges
                        .iter()
                        .map(|x| json!({ "left": x.left, "right": x.right, "height": num(x.height), "size": x.size }))
                        .collect();
                    let clusters: Map<String, Value> =
                        a.dataset_ids.iter().zip(&a.labels).map(|(id, l)| (id.clone(), json!(l))).collect();
                    let order: Vec<&str> = d.leaf_order().iter().map(|&i| d.leaf_ids[i].as_str()).collect();
                    let v = json!({
                        "dataset_ids": d.leaf_ids,
                        "merges": merges,
                        "leaf_order": order,
                        "clusters": clusters,
                        "cluster_count": a.cluster_count(),
                        "similarity": matrix_json(m)["values"].clone(),
                    });
                    (m.axis_id.clone(), v)
                })
                .collect();
            pretty(&json!({ "threshold": num(args.threshold), "axes": axes }))
        }
    };
    let counts: Vec<String> = items.iter().map(|(m, _, a)| format!("{}={}", m.axis_id, a.cluster_count())).collect();
    Ok(Outcome { body, summary: format!("clusters at {}: {}", args.threshold, counts.join(" ")), all_undefined: false })
}

pub fn cmd_shift(args: &ShiftArgs) -> CliResult<Outcome> {
    no_svg(args.common.format, "shift")?;
    let (a, b) = match args.partitions.as_slice() {
        [a, b] => (a.as_str(), b.as_str()),
        _ => return Err(CliError::Usage("--partitions takes exactly two names".into())),
    };
    let ws = load_workspace(&args.common, None)?;
    let mut results = Vec::new();
    for d in &ws.datasets {
        match partition_shift(&d.dataset_id, &d.records, &ws.axes, a, b) {
            Ok(r) => results.push((d.dataset_id.clone(), Ok(r))),
            Err(e) if e.is_undefined() => results.push((d.dataset_id.clone(), Err(e))),
            Err(e) => return Err(e.into()),
        }
    }
    let all_undefined = results.iter().all(|(_, r)| r.is_err());
    let body = match args.common.format {
        OutputFormat::Csv => {
            let mut rows = vec![vec![
                "dataset_id".to_string(),
                "axis_id".into(),
                "partition_a".into(),
                "partition_b".into(),
                "ds".into(),
                "error".into(),
            ]];
            for (id, r) in &results {
                match r {
                    Ok(rep) => {
                        for (axis, v) in &rep.per_axis {
                            rows.push(vec![id.clone(), axis.clone(), a.into(), b.into(), fmt_float(*v), String::new()]);
                        }
                    }
                    Err(e) => {
                        rows.push(vec![id.clone(), String::new(), a.into(), b.into(), String::new(), e.to_string()])
                    }
                }
            }
            csv_string(rows)
        }
        _ => {
            let rows: Vec<Value> = results
                .iter()
                .map(|(id, r)| match r {
                    Ok(rep) => {
                        let per_axis: Map<String, Value> =
                            rep.per_axis.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
                        json!({ "dataset_id": id, "partitions": [a, b], "per_axis": per_axis, "error": null })
                    }
                    Err(e) => {
                        json!({ "dataset_id": id, "partitions": [a, b], "per_axis": null, "error": e.to_string() })
                    }
                })
                .collect();
            pretty(&json!({ "shifts": rows }))
        }
    };
    Ok(Outcome { body, summary: format!("shift {a} vs {b} for {} dataset(s)", results.len()), all_undefined })
}

fn open_events(path: &Path) -> CliResult<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|source| IngestError::Io { file: path.display().to_string(), source })?;
    Ok(Box::new(BufReader::new(f)))
}

/// Group index per window for one event line, or a description of what is wrong with it.
fn parse_event(line: &str, windows: &[RollingWindow], combo: Option<&DemographicAxis>) -> Result<Vec<String>, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value.as_object().ok_or("event must be a JSON object")?;
    let mut record = SampleRecord::new("event");
    for (k, v) in obj {
        if let Some(s) = v.as_str() {
            record.assignments.insert(k.clone(), s.to_string());
        }
    }
    if let Some(c) = combo {
        record = project_record_to_combination(&record, c).map_err(|e| e.to_string())?;
    }
    windows
        .iter()
        .map(|w| {
            let axis = w.axis();
            let group = record.group_on(axis.id()).ok_or_else(|| format!("no group for axis '{}'", axis.id()))?;
            axis.require(group).map_err(|e| e.to_string())?;
            Ok(group.to_string())
        })
        .collect()
}

pub fn cmd_monitor(args: &MonitorArgs) -> CliResult<i32> {
    if args.common.format != OutputFormat::Json {
        return Err(CliError::Usage("monitor only writes JSON lines".into()));
    }
    if args.every == 0 {
        return Err(CliError::Usage("--every must be at least 1".into()));
    }
    let ws = load_workspace(&args.common, args.reference_partition.as_deref())?;
    let reference = match ws.datasets.as_slice() {
        [one] => one,
        _ => return Err(CliError::Usage("monitor needs exactly one reference dataset; pass --dataset".into())),
    };
    let mut windows = ws
        .axes
        .iter()
        .map(|a| RollingWindow::new(&reference.profile.axis_profiles[a.id()], args.capacity))
        .collect::<Result<Vec<_>, _>>()?;
    let combo = ws.axes.iter().find(|a| a.is_combination());

    let input = open_events(&args.events)?;
    let sink: Box<dyn Write> = match &args.common.output {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    let mut out = BufWriter::new(sink);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut pending = false;
    let mut last_line = 0usize;
    let emit =
        |out: &mut BufWriter<Box<dyn Write>>, windows: &[RollingWindow], event: usize, line: usize| -> CliResult<()> {
            let mut axes = Map::new();
            for w in windows {
                let r = w.similarity()?;
                axes.insert(w.axis().id().into(), json!({ "value": num(r.value), "warm_up": r.warm_up }));
            }
            writeln!(out, "{}", json!({ "event": event, "line": line, "axes": axes }))?;
            out.flush()?;
            Ok(())
        };
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_event(&line, &windows, combo) {
            Ok(groups) => {
                for (w, g) in windows.iter_mut().zip(&groups) {
                    w.push(g)?;
                }
                accepted += 1;
                last_line = line_no;
                pending = true;
                if accepted.is_multiple_of(args.every) {
                    emit(&mut out, &windows, accepted, line_no)?;
                    pending = false;
                }
            }
            Err(message) => {
                if args.strict {
                    out.flush()?;
                    return Err(CliError::Usage(format!("EventError: {}:{line_no}: {message}", args.events.display())));
                }
                rejected += 1;
                writeln!(out, "{}", json!({ "line": line_no, "error": message }))?;
            }
        }
    }
    if pending {
        emit(&mut out, &windows, accepted, last_line)?;
    }
    out.flush()?;
    summarize(&format!("monitored {accepted} event(s), rejected {rejected}"));
    Ok(if accepted == 0 { 3 } else { 0 })
}
