//! End-to-end analysis of labeled sequences: projection, post-processing,
//! interactions, TTC and reports.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TtcConfig;
use crate::kitti_io::{make_ego_trajectory, project_records, EgoConfig, ObservationRecord, PoseMap};
use crate::report::{
    export_cdf_table, export_interactions, export_reductions, export_report, Format, InteractionRow, MethodSummary,
    ReductionRow, SequenceReport, TOTAL_LABEL,
};
use crate::safety::{analyze_interactions, reduction_percentages, Interaction, SeverityCounts, SeverityThresholds};
use crate::stats::MEDIAN_BAND;
use crate::trajectory::{build_trajectories, post_process, PostProcessConfig, Trajectory, Variant};

/// One labeled sequence, optionally with per-frame ego poses.
#[derive(Debug, Clone)]
pub struct SequenceInput {
    pub id: String,
    pub records: Vec<ObservationRecord>,
    pub poses: Option<PoseMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Label carried into every output row, e.g. `GroundTruth`.
    pub method: String,
    pub post: PostProcessConfig,
    pub ttc: TtcConfig,
    /// Post-processing variants to run; the first is the reduction baseline.
    pub variants: Vec<Variant>,
    pub include_ego: bool,
    pub ego: EgoConfig,
    pub thresholds: SeverityThresholds,
    /// Method the distributions are compared against.
    pub reference: Option<String>,
    pub band: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            method: "GroundTruth".to_owned(),
            post: PostProcessConfig::default(),
            ttc: TtcConfig::default(),
            variants: vec![Variant::NONE],
            include_ego: false,
            ego: EgoConfig::default(),
            thresholds: SeverityThresholds::default(),
            reference: None,
            band: MEDIAN_BAND,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        self.post.validate()?;
        self.ttc.validate()?;
        if self.variants.is_empty() {
            return Err(Error::InvalidConfig("at least one post-processing variant is required".into()));
        }
        Ok(())
    }

    pub fn method_label(&self, variant: Variant) -> String {
        format!("{}{}", self.method, variant.suffix())
    }
}

/// Builds and post-processes the trajectories of one sequence.
pub fn post_processed_trajectories(input: &SequenceInput, cfg: &AnalysisConfig, variant: Variant) -> Result<Vec<Trajectory>> {
    let observations = project_records(&input.records, input.poses.as_ref())?;
    let ego = match (cfg.include_ego, input.records.iter().map(|r| r.frame).min()) {
        (true, Some(first)) => {
            let last = input.records.iter().map(|r| r.frame).max().unwrap_or(first);
            let frames: Vec<u32> = (first..=last).collect();
            Some(make_ego_trajectory(&frames, input.poses.as_ref(), &cfg.ego)?)
        }
        _ => None,
    };
    let built = build_trajectories(&observations, ego)?;
    Ok(post_process(&built, &cfg.post, variant))
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub variant: Variant,
    pub method: String,
    pub interactions: Vec<Interaction>,
}

impl VariantResult {
    pub fn counts(&self, thresholds: &SeverityThresholds) -> SeverityCounts {
        crate::safety::count_severities(&self.interactions, thresholds)
    }
}

#[derive(Debug, Clone)]
pub struct SequenceAnalysis {
    pub sequence: String,
    pub results: Vec<VariantResult>,
}

pub fn analyze_sequence(input: &SequenceInput, cfg: &AnalysisConfig) -> Result<SequenceAnalysis> {
    cfg.validate()?;
    let results = cfg
        .variants
        .iter()
        .map(|&variant| {
            let trajectories = post_processed_trajectories(input, cfg, variant)?;
            let interactions = analyze_interactions(&trajectories, cfg.include_ego, &cfg.ttc)?;
            Ok(VariantResult {
                variant,
                method: cfg.method_label(variant),
                interactions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SequenceAnalysis {
        sequence: input.id.clone(),
        results,
    })
}

impl SequenceAnalysis {
    pub fn report(&self, cfg: &AnalysisConfig) -> SequenceReport {
        let methods = self
            .results
            .iter()
            .map(|r| (r.method.clone(), MethodSummary::from_interactions(&r.interactions, &cfg.thresholds)))
            .collect::<BTreeMap<_, _>>();
        SequenceReport::new(self.sequence.clone(), methods, cfg.reference.as_deref(), cfg.band)
    }
}

/// Failure of one sequence within a batch.
#[derive(Debug)]
pub struct SequenceError {
    pub sequence: String,
    pub error: Error,
}

/// Analyzes every sequence in parallel. Results keep the input order.
pub fn analyze_all(inputs: &[SequenceInput], cfg: &AnalysisConfig) -> std::result::Result<Vec<SequenceAnalysis>, Vec<SequenceError>> {
    let outcomes: Vec<_> = inputs.par_iter().map(|input| (input, analyze_sequence(input, cfg))).collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (input, outcome) in outcomes {
        match outcome {
            Ok(a) => ok.push(a),
            Err(error) => failed.push(SequenceError {
                sequence: input.id.clone(),
                error,
            }),
        }
    }
    if failed.is_empty() {
        Ok(ok)
    } else {
        Err(failed)
    }
}

/// Reductions of every later variant against the first, per sequence and in
/// total.
pub fn reduction_rows(analyses: &[SequenceAnalysis], cfg: &AnalysisConfig) -> Vec<ReductionRow> {
    let mut sorted: Vec<&SequenceAnalysis> = analyses.iter().collect();
    sorted.sort_by(|a, b| a.sequence.cmp(&b.sequence));

    let mut rows = Vec::new();
    let mut totals: BTreeMap<usize, (SeverityCounts, SeverityCounts)> = BTreeMap::new();
    let baseline_label = cfg.method_label(cfg.variants[0]);
    for a in &sorted {
        let base = a.results[0].counts(&cfg.thresholds);
        for (k, r) in a.results.iter().enumerate().skip(1) {
            let counts = r.counts(&cfg.thresholds);
            let entry = totals.entry(k).or_default();
            entry.0 = entry.0 + base;
            entry.1 = entry.1 + counts;
            let (r10, r15) = reduction_percentages(&base, &counts);
            rows.push(ReductionRow {
                sequence: a.sequence.clone(),
                baseline: baseline_label.clone(),
                method: r.method.clone(),
                reduction_10s_pct: r10,
                reduction_1_5s_pct: r15,
            });
        }
    }
    for (k, (base, after)) in totals {
        let (r10, r15) = reduction_percentages(&base, &after);
        rows.push(ReductionRow {
            sequence: TOTAL_LABEL.to_owned(),
            baseline: baseline_label.clone(),
            method: cfg.method_label(cfg.variants[k]),
            reduction_10s_pct: r10,
            reduction_1_5s_pct: r15,
        });
    }
    rows
}

/// Rendered output files, keyed by file name.
pub type RenderedOutputs = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions {
    pub format: Format,
    pub emit_series: bool,
    pub drop_undefined: bool,
}

/// Renders all analysis outputs in memory so nothing is written unless
/// every sequence succeeded.
///
/// Files: `summary.<fmt>`, `report.json` (always, for later merging),
/// `interactions.<fmt>`, `cdf.csv` and, with several variants,
/// `reductions.<fmt>`.
pub fn render_outputs(analyses: &[SequenceAnalysis], cfg: &AnalysisConfig, opts: &RenderOptions) -> Result<RenderedOutputs> {
    let mut sorted: Vec<&SequenceAnalysis> = analyses.iter().collect();
    sorted.sort_by(|a, b| a.sequence.cmp(&b.sequence));

    let mut reports: Vec<SequenceReport> = sorted.iter().map(|a| a.report(cfg)).collect();
    if opts.drop_undefined {
        reports.retain(SequenceReport::is_fully_defined);
    }
    let rows: Vec<InteractionRow> = sorted
        .iter()
        .flat_map(|a| {
            a.results.iter().flat_map(move |r| {
                r.interactions
                    .iter()
                    .map(move |i| InteractionRow::new(&a.sequence, &r.method, i, opts.emit_series))
            })
        })
        .collect();

    let ext = opts.format.extension();
    let mut out = RenderedOutputs::new();
    out.insert(format!("summary.{ext}"), export_report(&reports, opts.format)?);
    out.insert("report.json".to_owned(), export_report(&reports, Format::Json)?);
    out.insert(format!("interactions.{ext}"), export_interactions(&rows, opts.format)?);
    out.insert("cdf.csv".to_owned(), export_cdf_table(&reports)?);
    if cfg.variants.len() > 1 {
        out.insert(
            format!("reductions.{ext}"),
            export_reductions(&reduction_rows(analyses, cfg), opts.format)?,
        );
    }
    Ok(out)
}
