//! Per-sequence summaries of `TTC_min` distributions and their export.
//!
//! Summary tables have one row per `(sequence, method)`, sorted, followed by a
//! `TOTAL` row per method pooling every sequence. Undefined values (no samples,
//! no reference) are empty CSV fields and JSON `null`s.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::safety::{count_severities, Category, Interaction, SeverityCounts, SeverityThresholds};
use crate::stats::{ks_d_statistic, median, within_band, EmpiricalCdf};
use crate::trajectory::EGO_TRACK_ID;

pub const TOTAL_LABEL: &str = "TOTAL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(crate::Error::InvalidConfig(format!("unknown output format {other:?}"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `TTC_min` statistics of one method on one sequence.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MethodSummary {
    pub counts: SeverityCounts,
    /// `TTC_min` values below the high-severity threshold, ascending.
    pub ttc_min: Vec<f64>,
    pub ttc_min_interaction1: Vec<f64>,
    pub ttc_min_interaction2: Vec<f64>,
    pub median: Option<f64>,
    /// D-statistic against the reference method.
    pub ks_d: Option<f64>,
    pub median_abs_diff: Option<f64>,
    pub within_band: Option<bool>,
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

impl MethodSummary {
    pub fn from_interactions(interactions: &[Interaction], thresholds: &SeverityThresholds) -> Self {
        let defined = |cat: Option<Category>| -> Vec<f64> {
            sorted(
                interactions
                    .iter()
                    .filter(|i| cat.is_none_or(|c| c == i.category))
                    .filter_map(|i| i.ttc_min)
                    .filter(|&t| t < thresholds.high)
                    .collect(),
            )
        };
        let ttc_min = defined(None);
        Self {
            counts: count_severities(interactions, thresholds),
            median: median(&ttc_min),
            ttc_min,
            ttc_min_interaction1: defined(Some(Category::Interaction1)),
            ttc_min_interaction2: defined(Some(Category::Interaction2)),
            ks_d: None,
            median_abs_diff: None,
            within_band: None,
        }
    }

    fn pooled<'a>(parts: impl IntoIterator<Item = &'a MethodSummary>) -> Self {
        let mut out = MethodSummary::default();
        for p in parts {
            out.counts = out.counts + p.counts;
            out.ttc_min.extend(&p.ttc_min);
            out.ttc_min_interaction1.extend(&p.ttc_min_interaction1);
            out.ttc_min_interaction2.extend(&p.ttc_min_interaction2);
        }
        out.ttc_min = sorted(out.ttc_min);
        out.ttc_min_interaction1 = sorted(out.ttc_min_interaction1);
        out.ttc_min_interaction2 = sorted(out.ttc_min_interaction2);
        out.median = median(&out.ttc_min);
        out
    }

    fn compare(&mut self, reference: &[f64], reference_median: Option<f64>, band: f64) {
        self.ks_d = ks_d_statistic(&self.ttc_min, reference);
        self.median_abs_diff = self.median.zip(reference_median).map(|(m, r)| (m - r).abs());
        self.within_band = self.median.zip(reference_median).map(|(m, r)| within_band(m, r, band));
    }
}

fn compare_all(methods: &mut BTreeMap<String, MethodSummary>, reference: Option<&str>, band: f64) {
    let Some(reference) = reference.and_then(|r| methods.get(r)).cloned() else {
        return;
    };
    for summary in methods.values_mut() {
        summary.compare(&reference.ttc_min, reference.median, band);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub sequence: String,
    /// Method the others are compared against, usually ground truth.
    pub reference: Option<String>,
    /// Half-width of the median agreement band, seconds.
    pub band: f64,
    pub methods: BTreeMap<String, MethodSummary>,
}

impl SequenceReport {
    pub fn new(
        sequence: impl Into<String>,
        mut methods: BTreeMap<String, MethodSummary>,
        reference: Option<&str>,
        band: f64,
    ) -> Self {
        compare_all(&mut methods, reference, band);
        Self {
            sequence: sequence.into(),
            reference: reference.map(str::to_owned),
            band,
            methods,
        }
    }

    /// Adds or replaces a method and refreshes the comparisons.
    pub fn insert(&mut self, method: impl Into<String>, summary: MethodSummary) {
        self.methods.insert(method.into(), summary);
        compare_all(&mut self.methods, self.reference.as_deref(), self.band);
    }

    /// True when every method has a median and, if a reference is set, a
    /// D-statistic.
    pub fn is_fully_defined(&self) -> bool {
        self.methods
            .values()
            .all(|m| m.median.is_some() && (self.reference.is_none() || m.ks_d.is_some()))
    }
}

/// Pools every sequence per method and compares the pooled samples with the
/// pooled reference.
pub fn totals(reports: &[SequenceReport]) -> BTreeMap<String, MethodSummary> {
    let mut grouped: BTreeMap<&str, Vec<&MethodSummary>> = BTreeMap::new();
    for r in reports {
        for (method, s) in &r.methods {
            grouped.entry(method).or_default().push(s);
        }
    }
    let mut out: BTreeMap<String, MethodSummary> = grouped
        .into_iter()
        .map(|(m, parts)| (m.to_owned(), MethodSummary::pooled(parts)))
        .collect();
    if let Some(first) = reports.first() {
        compare_all(&mut out, first.reference.as_deref(), first.band);
    }
    out
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sequence: String,
    pub method: String,
    pub total_interactions: u64,
    pub below_10s: u64,
    pub below_1_5s: u64,
    pub samples: u64,
    pub median_ttc_min: Option<f64>,
    pub ks_d: Option<f64>,
    pub median_abs_diff: Option<f64>,
    pub within_band: Option<bool>,
}

const SUMMARY_HEADER: [&str; 10] = [
    "sequence",
    "method",
    "total_interactions",
    "below_10s",
    "below_1_5s",
    "samples",
    "median_ttc_min",
    "ks_d",
    "median_abs_diff",
    "within_band",
];

impl SummaryRow {
    fn new(sequence: &str, method: &str, s: &MethodSummary) -> Self {
        Self {
            sequence: sequence.to_owned(),
            method: method.to_owned(),
            total_interactions: s.counts.total_interactions,
            below_10s: s.counts.below_10s,
            below_1_5s: s.counts.below_1_5s,
            samples: s.ttc_min.len() as u64,
            median_ttc_min: s.median,
            ks_d: s.ks_d,
            median_abs_diff: s.median_abs_diff,
            within_band: s.within_band,
        }
    }
}

fn sorted_reports(reports: &[SequenceReport]) -> Vec<SequenceReport> {
    let mut reports = reports.to_vec();
    reports.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    reports
}

/// Per-sequence rows sorted by sequence and method, then the totals.
pub fn summary_rows(reports: &[SequenceReport]) -> Vec<SummaryRow> {
    let reports = sorted_reports(reports);
    let mut rows: Vec<SummaryRow> = reports
        .iter()
        .flat_map(|r| r.methods.iter().map(|(m, s)| SummaryRow::new(&r.sequence, m, s)))
        .collect();
    rows.extend(totals(&reports).iter().map(|(m, s)| SummaryRow::new(TOTAL_LABEL, m, s)));
    rows
}

fn csv_with_header<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_rows<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_summary_csv(rows: &[SummaryRow]) -> Result<String> {
    csv_with_header(&SUMMARY_HEADER, rows)
}

pub fn read_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    csv_rows(text)
}

/// JSON form of a report set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub sequences: Vec<SequenceReport>,
    pub totals: BTreeMap<String, MethodSummary>,
}

/// Serializes reports, sorted by sequence, with a totals entry.
///
/// CSV yields the summary table; JSON yields a [`ReportDocument`] including
/// the raw `TTC_min` samples behind every CDF.
pub fn export_report(reports: &[SequenceReport], format: Format) -> Result<String> {
    match format {
        Format::Csv => write_summary_csv(&summary_rows(reports)),
        Format::Json => {
            let sequences = sorted_reports(reports);
            let doc = ReportDocument {
                totals: totals(&sequences),
                sequences,
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn parse_report_json(text: &str) -> Result<ReportDocument> {
    Ok(serde_json::from_str(text)?)
}

/// One step of an empirical CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub sequence: String,
    pub method: String,
    /// `all`, `interaction1` or `interaction2`.
    pub category: String,
    pub ttc_min: f64,
    pub cdf: f64,
}

/// CDF steps for every sequence, method and interaction category, totals
/// last. Plain CSV, ready for external plotting tools.
pub fn export_cdf_table(reports: &[SequenceReport]) -> Result<String> {
    let reports = sorted_reports(reports);
    let pooled = totals(&reports);
    let groups = reports
        .iter()
        .map(|r| (r.sequence.as_str(), &r.methods))
        .chain(std::iter::once((TOTAL_LABEL, &pooled)));

    let mut rows = Vec::new();
    for (sequence, methods) in groups {
        for (method, s) in methods {
            for (category, samples) in [
                ("all", &s.ttc_min),
                ("interaction1", &s.ttc_min_interaction1),
                ("interaction2", &s.ttc_min_interaction2),
            ] {
                rows.extend(EmpiricalCdf::new(samples).steps().into_iter().map(|(v, h)| CdfRow {
                    sequence: sequence.to_owned(),
                    method: method.clone(),
                    category: category.to_owned(),
                    ttc_min: v,
                    cdf: h,
                }));
            }
        }
    }
    csv_with_header(&["sequence", "method", "category", "ttc_min", "cdf"], &rows)
}

pub fn read_cdf_table(text: &str) -> Result<Vec<CdfRow>> {
    csv_rows(text)
}

fn track_label(id: u64) -> String {
    if id == EGO_TRACK_ID {
        "ego".to_owned()
    } else {
        id.to_string()
    }
}

/// Interaction-level output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRow {
    pub sequence: String,
    pub method: String,
    pub track_a: String,
    pub track_b: String,
    pub class_a: String,
    pub class_b: String,
    pub category: Category,
    pub first_frame: u32,
    pub last_frame: u32,
    pub ttc_min: Option<f64>,
    /// `frame:ttc` pairs separated by `;`, with an empty ttc when undefined.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ttc_series: Option<String>,
}

impl InteractionRow {
    pub fn new(sequence: &str, method: &str, i: &Interaction, emit_series: bool) -> Self {
        let series = emit_series.then(|| {
            i.ttc_series
                .iter()
                .map(|(f, t)| match t {
                    Some(t) => format!("{f}:{t}"),
                    None => format!("{f}:"),
                })
                .collect::<Vec<_>>()
                .join(";")
        });
        Self {
            sequence: sequence.to_owned(),
            method: method.to_owned(),
            track_a: track_label(i.pair.0),
            track_b: track_label(i.pair.1),
            class_a: i.classes.0.label().to_owned(),
            class_b: i.classes.1.label().to_owned(),
            category: i.category,
            first_frame: i.frames.0,
            last_frame: i.frames.1,
            ttc_min: i.ttc_min,
            ttc_series: series,
        }
    }
}

pub fn export_interactions(rows: &[InteractionRow], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let series = rows.iter().any(|r| r.ttc_series.is_some());
            let mut header = vec![
                "sequence",
                "method",
                "track_a",
                "track_b",
                "class_a",
                "class_b",
                "category",
                "first_frame",
                "last_frame",
                "ttc_min",
            ];
            if series {
                header.push("ttc_series");
            }
            csv_with_header(&header, rows)
        }
    }
}

/// Count reductions of one post-processing variant relative to a baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub sequence: String,
    pub baseline: String,
    pub method: String,
    pub reduction_10s_pct: Option<f64>,
    pub reduction_1_5s_pct: Option<f64>,
}

pub fn export_reductions(rows: &[ReductionRow], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv_with_header(
            &["sequence", "baseline", "method", "reduction_10s_pct", "reduction_1_5s_pct"],
            rows,
        ),
    }
}
