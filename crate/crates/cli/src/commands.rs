use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use kitti_safety::kitti_io::project_records;
use kitti_safety::mot::{evaluate_sequence, metrics as mot_metrics, MatchCriterion, MotSummary, TallySummary};
use kitti_safety::pipeline::{analyze_all, post_processed_trajectories, render_outputs, RenderOptions, RenderedOutputs};
use kitti_safety::report::{export_cdf_table, export_report, parse_report_json, Format, SequenceReport, TOTAL_LABEL};
use kitti_safety::trajectory::build_trajectories;
use kitti_safety::{ObjectClass, Trajectory};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{analysis_config, FileConfig};
use crate::inputs::{load_sequences, read_labels, sequence_files};
use crate::{AnalyzeArgs, ExportCdfArgs, InputArgs, MetricsArgs, PipelineArgs};

/// Prints the per-sequence error summary and turns it into the command error.
fn sequence_failures(mut failed: Vec<(String, anyhow::Error)>, total: usize) -> anyhow::Error {
    failed.sort_by(|a, b| a.0.cmp(&b.0));
    eprintln!("{} of {} sequences failed:", failed.len(), total);
    for (sequence, e) in &failed {
        eprintln!("  {sequence}: {e:#}");
    }
    anyhow!("{} sequence(s) failed; no output written", failed.len())
}

fn write_outputs(dir: &Path, files: &RenderedOutputs) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

fn serialize_rows<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

pub fn parse_check(args: &InputArgs) -> Result<()> {
    let (inputs, mut failed) = load_sequences(&args.labels, args.poses.as_deref())?;
    let total = inputs.len() + failed.len();
    let mut lines = Vec::new();
    for input in &inputs {
        let checked = project_records(&input.records, input.poses.as_ref())
            .and_then(|obs| build_trajectories(&obs, None))
            .map_err(anyhow::Error::from);
        match checked {
            Ok(trajectories) => {
                let analyzed = input.records.iter().filter(|r| r.class.is_analyzed()).count();
                let frames: BTreeSet<u32> = input.records.iter().map(|r| r.frame).collect();
                lines.push(format!(
                    "{:<10} {:>8} {:>8} {:>8} {:>7} {:>7} {:>6}",
                    input.id,
                    input.records.len(),
                    analyzed,
                    input.records.len() - analyzed,
                    trajectories.len(),
                    frames.len(),
                    input.poses.as_ref().map_or(0, |p| p.len()),
                ));
            }
            Err(e) => failed.push((input.id.clone(), e)),
        }
    }
    if !failed.is_empty() {
        return Err(sequence_failures(failed, total));
    }
    println!(
        "{:<10} {:>8} {:>8} {:>8} {:>7} {:>7} {:>6}",
        "sequence", "records", "analyzed", "ignored", "tracks", "frames", "poses"
    );
    for line in lines {
        println!("{line}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    sequence: String,
    method: String,
    track_id: String,
    class: ObjectClass,
    stationary: bool,
    frame: u32,
    x: f64,
    z: f64,
    yaw: f64,
    length: f64,
    width: f64,
    vx: Option<f64>,
    vz: Option<f64>,
}

fn trajectory_rows(sequence: &str, method: &str, trajectories: &[Trajectory]) -> Vec<TrajectoryRow> {
    trajectories
        .iter()
        .flat_map(|t| {
            let id = if t.is_ego() { "ego".to_owned() } else { t.track_id.to_string() };
            t.states.iter().map(move |s| TrajectoryRow {
                sequence: sequence.to_owned(),
                method: method.to_owned(),
                track_id: id.clone(),
                class: t.class,
                stationary: t.stationary,
                frame: s.frame,
                x: s.position.x,
                z: s.position.z,
                yaw: s.yaw,
                length: s.length,
                width: s.width,
                vx: s.velocity.map(|v| v.x),
                vz: s.velocity.map(|v| v.z),
            })
        })
        .collect()
}

pub fn postprocess(args: &PipelineArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let cfg = analysis_config(&file, &args.overrides(None, None))?;
    let format = args.format.or(file.format).unwrap_or_default();
    let (inputs, mut failed) = load_sequences(&args.input.labels, args.input.poses.as_deref())?;
    let total = inputs.len() + failed.len();

    let outcomes: Vec<_> = inputs
        .par_iter()
        .map(|input| {
            let rows = cfg
                .variants
                .iter()
                .map(|&v| {
                    let trajectories = post_processed_trajectories(input, &cfg, v)?;
                    Ok(trajectory_rows(&input.id, &cfg.method_label(v), &trajectories))
                })
                .collect::<kitti_safety::Result<Vec<_>>>();
            (input.id.clone(), rows)
        })
        .collect();

    let mut rows = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(per_variant) => rows.extend(per_variant.into_iter().flatten()),
            Err(e) => failed.push((id, e.into())),
        }
    }
    if !failed.is_empty() {
        return Err(sequence_failures(failed, total));
    }
    let text = serialize_rows(&rows, format)?;
    match &args.out {
        Some(dir) => write_outputs(dir, &RenderedOutputs::from([(format!("trajectories.{}", format.extension()), text)])),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let p = &args.pipeline;
    let file = FileConfig::load(p.config.as_deref())?;
    let cfg = analysis_config(&file, &p.overrides(args.reference.clone(), args.band))?;
    let opts = RenderOptions {
        format: p.format.or(file.format).unwrap_or_default(),
        emit_series: args.emit_series || file.emit_series.unwrap_or(false),
        drop_undefined: args.drop_undefined || file.drop_undefined.unwrap_or(false),
    };
    let (inputs, mut failed) = load_sequences(&p.input.labels, p.input.poses.as_deref())?;
    let total = inputs.len() + failed.len();

    let analyses = match analyze_all(&inputs, &cfg) {
        Ok(a) => a,
        Err(errors) => {
            failed.extend(errors.into_iter().map(|e| (e.sequence, e.error.into())));
            Vec::new()
        }
    };
    if !failed.is_empty() {
        return Err(sequence_failures(failed, total));
    }
    let files = render_outputs(&analyses, &cfg, &opts)?;
    match &p.out {
        Some(dir) => write_outputs(dir, &files),
        None => {
            print!("{}", files[&format!("summary.{}", opts.format.extension())]);
            Ok(())
        }
    }
}

const OVERALL: &str = "ALL";

#[derive(Debug, Serialize)]
struct MetricsRow {
    sequence: String,
    class: String,
    mota: Option<f64>,
    motp: Option<f64>,
    motp_distance: Option<f64>,
    moda: Option<f64>,
    modp: Option<f64>,
    idf1: Option<f64>,
    detection_f1: Option<f64>,
    mt: Option<f64>,
    ml: Option<f64>,
    fp_pct: Option<f64>,
    fn_pct: Option<f64>,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    idsw: u64,
    frag: u64,
    gt: u64,
    gt_tracks: usize,
}

impl MetricsRow {
    fn new(sequence: &str, class: &str, t: &TallySummary) -> Self {
        let m = mot_metrics(t);
        Self {
            sequence: sequence.to_owned(),
            class: class.to_owned(),
            mota: m.as_ref().map(|m| m.mota),
            motp: m.as_ref().and_then(|m| m.motp),
            motp_distance: m.as_ref().and_then(|m| m.motp_distance),
            moda: m.as_ref().map(|m| m.moda),
            modp: m.as_ref().and_then(|m| m.modp),
            idf1: m.as_ref().map(|m| m.idf1),
            detection_f1: m.as_ref().map(|m| m.detection_f1),
            mt: m.as_ref().map(|m| m.mt),
            ml: m.as_ref().map(|m| m.ml),
            fp_pct: m.as_ref().map(|m| m.fp_pct),
            fn_pct: m.as_ref().map(|m| m.fn_pct),
            tp: t.tp,
            fp: t.fp,
            fn_: t.fn_,
            idsw: t.idsw,
            frag: t.frag,
            gt: t.gt,
            gt_tracks: t.coverage.len(),
        }
    }
}

fn summary_rows(sequence: &str, s: &MotSummary) -> Vec<MetricsRow> {
    s.per_class
        .iter()
        .map(|(c, t)| MetricsRow::new(sequence, c.label(), t))
        .chain(std::iter::once(MetricsRow::new(sequence, OVERALL, &s.overall)))
        .collect()
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{:.2}", 100.0 * v))
}

fn print_metrics(rows: &[MetricsRow]) {
    println!(
        "{:<10} {:<10} {:>7} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>5} {:>5} {:>7}",
        "sequence", "class", "MOTA%", "MOTP", "IDF1%", "MT%", "ML%", "TP", "FP", "FN", "IDSW", "FRAG", "GT"
    );
    for r in rows {
        println!(
            "{:<10} {:<10} {:>7} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>5} {:>5} {:>7}",
            r.sequence,
            r.class,
            pct(r.mota),
            r.motp.map_or_else(|| "-".to_owned(), |v| format!("{v:.3}")),
            pct(r.idf1),
            pct(r.mt),
            pct(r.ml),
            r.tp,
            r.fp,
            r.fn_,
            r.idsw,
            r.frag,
            r.gt
        );
    }
}

/// Pairs ground-truth and prediction files by sequence id.
fn metric_pairs(gt: &Path, pred: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let g = sequence_files(gt)?;
    let p = sequence_files(pred)?;
    if g.len() == 1 && p.len() == 1 && gt.is_file() && pred.is_file() {
        let (id, gt_path) = g.into_iter().next().expect("one entry");
        let pred_path = p.into_values().next().expect("one entry");
        return Ok(vec![(id, gt_path, pred_path)]);
    }
    let unmatched: Vec<&String> = g.keys().filter(|k| !p.contains_key(*k)).chain(p.keys().filter(|k| !g.contains_key(*k))).collect();
    if !unmatched.is_empty() {
        bail!("sequences without a counterpart in the other input: {unmatched:?}");
    }
    Ok(g.into_iter()
        .map(|(id, gt_path)| {
            let pred_path = p[&id].clone();
            (id, gt_path, pred_path)
        })
        .collect())
}

pub fn metrics(args: &MetricsArgs) -> Result<()> {
    let criterion = match args.max_center_distance {
        Some(max_px) => MatchCriterion::CenterDistance { max_px },
        None => MatchCriterion::Iou { min_iou: args.gate_iou },
    };
    let pairs = metric_pairs(&args.gt, &args.pred)?;
    let total = pairs.len();
    let outcomes: Vec<(String, Result<MotSummary>)> = pairs
        .par_iter()
        .map(|(id, gt_path, pred_path)| {
            let summary = (|| {
                let gt = read_labels(gt_path)?;
                let pred = read_labels(pred_path)?;
                let acc = evaluate_sequence(&gt, &pred, &criterion, args.num_frames)
                    .with_context(|| format!("matching {} against {}", pred_path.display(), gt_path.display()))?;
                Ok(acc.summary())
            })();
            (id.clone(), summary)
        })
        .collect();

    let mut failed = Vec::new();
    let mut rows = Vec::new();
    let mut overall = MotSummary::default();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(s) => {
                rows.extend(summary_rows(&id, &s));
                overall = overall + s;
            }
            Err(e) => failed.push((id, e)),
        }
    }
    if !failed.is_empty() {
        return Err(sequence_failures(failed, total));
    }
    rows.extend(summary_rows(TOTAL_LABEL, &overall));
    print_metrics(&rows);
    if let Some(dir) = &args.out {
        let name = format!("metrics.{}", args.format.extension());
        write_outputs(dir, &RenderedOutputs::from([(name, serialize_rows(&rows, args.format)?)]))?;
    }
    Ok(())
}

pub fn export_cdf(args: &ExportCdfArgs) -> Result<()> {
    let mut merged: BTreeMap<String, BTreeMap<String, _>> = BTreeMap::new();
    let mut recorded_reference = None;
    let mut recorded_band = None;
    for path in &args.reports {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc = parse_report_json(&text).with_context(|| path.display().to_string())?;
        for report in doc.sequences {
            recorded_reference = recorded_reference.or(report.reference.clone());
            recorded_band = recorded_band.or(Some(report.band));
            let methods = merged.entry(report.sequence.clone()).or_default();
            for (method, summary) in report.methods {
                if methods.insert(method.clone(), summary).is_some() {
                    bail!(
                        "method {method:?} appears twice for sequence {} (second time in {})",
                        report.sequence,
                        path.display()
                    );
                }
            }
        }
    }
    let reference = args.reference.clone().or(recorded_reference);
    let band = args.band.or(recorded_band).unwrap_or(kitti_safety::stats::MEDIAN_BAND);
    let mut reports: Vec<SequenceReport> = merged
        .into_iter()
        .map(|(seq, methods)| SequenceReport::new(seq, methods, reference.as_deref(), band))
        .collect();
    if args.drop_undefined {
        let before = reports.len();
        reports.retain(SequenceReport::is_fully_defined);
        if reports.len() < before {
            eprintln!("dropped {} sequence(s) with undefined statistics", before - reports.len());
        }
    }

    let cdf = export_cdf_table(&reports)?;
    match &args.out {
        Some(dir) => {
            let files = RenderedOutputs::from([
                ("cdf.csv".to_owned(), cdf),
                (format!("summary.{}", args.format.extension()), export_report(&reports, args.format)?),
                ("report.json".to_owned(), export_report(&reports, Format::Json)?),
            ]);
            write_outputs(dir, &files)
        }
        None => {
            print!("{cdf}");
            Ok(())
        }
    }
}
