//! CLEAR MOT evaluation of tracker output against ground truth.
//!
//! Objects are matched frame by frame on their 2D image boxes. Correspondences
//! from the previous frame are kept while they stay within the gate; the rest
//! is solved as a minimum-cost assignment. The per-frame results feed a
//! [`MotAccumulator`], from which [`metrics`] derives MOTA, MOTP, MODA, MODP,
//! IDF1, MT and ML.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::assignment::{solve_gated, CostMatrix};
use crate::error::{Error, Result};
use crate::kitti_io::{BBox2d, ObjectClass, ObservationRecord};

/// Coverage at or above which a ground-truth track is mostly tracked.
pub const MOSTLY_TRACKED: f64 = 0.8;
/// Coverage at or below which a ground-truth track is mostly lost.
pub const MOSTLY_LOST: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageObject {
    pub id: i64,
    pub class: ObjectClass,
    pub bbox: BBox2d,
}

impl From<&ObservationRecord> for ImageObject {
    fn from(r: &ObservationRecord) -> Self {
        Self {
            id: r.track_id,
            class: r.class,
            bbox: r.bbox,
        }
    }
}

/// How candidate pairs are scored and gated. Objects of different classes
/// never match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MatchCriterion {
    /// Cost `1 - IoU`, feasible when `IoU >= min_iou`.
    Iou { min_iou: f64 },
    /// Cost is the center distance in pixels, feasible up to `max_px`.
    CenterDistance { max_px: f64 },
}

impl Default for MatchCriterion {
    fn default() -> Self {
        MatchCriterion::Iou { min_iou: 0.5 }
    }
}

impl MatchCriterion {
    fn cost(&self, gt: &ImageObject, pred: &ImageObject) -> Option<f64> {
        if gt.class != pred.class {
            return None;
        }
        match *self {
            MatchCriterion::Iou { min_iou } => {
                let iou = gt.bbox.iou(&pred.bbox);
                (iou >= min_iou).then_some(1.0 - iou)
            }
            MatchCriterion::CenterDistance { max_px } => {
                let d = gt.bbox.center_distance(&pred.bbox);
                (d <= max_px).then_some(d)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub gt_id: i64,
    pub pred_id: i64,
    pub class: ObjectClass,
    /// Center distance in pixels.
    pub distance: f64,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameMatchResult {
    pub frame: u32,
    pub matches: Vec<MatchedPair>,
    pub unmatched_gt: Vec<(i64, ObjectClass)>,
    pub unmatched_pred: Vec<(i64, ObjectClass)>,
    /// Every `(gt_id, pred_id, class)` pair passing the gate, matched or not.
    pub candidates: Vec<(i64, i64, ObjectClass)>,
}

impl FrameMatchResult {
    /// Number of matches, `c_t`.
    pub fn match_count(&self) -> usize {
        self.matches.len()
    }

    pub fn false_positives(&self) -> usize {
        self.unmatched_pred.len()
    }

    pub fn misses(&self) -> usize {
        self.unmatched_gt.len()
    }
}

fn check_unique(frame: u32, objects: &[ImageObject]) -> Result<()> {
    let mut seen = HashSet::new();
    for o in objects {
        if !seen.insert(o.id) {
            return Err(Error::DuplicateObservation { frame, track_id: o.id });
        }
    }
    Ok(())
}

/// Matches ground truth to predictions in one frame.
///
/// `previous` maps ground-truth ids to the prediction ids they were matched
/// with in the previous frame; those pairs are kept when still feasible.
pub fn match_frame(
    frame: u32,
    gt: &[ImageObject],
    pred: &[ImageObject],
    previous: &HashMap<i64, i64>,
    criterion: &MatchCriterion,
) -> Result<FrameMatchResult> {
    check_unique(frame, gt)?;
    check_unique(frame, pred)?;

    let pred_index: HashMap<i64, usize> = pred.iter().enumerate().map(|(i, p)| (p.id, i)).collect();
    let mut gt_taken = vec![false; gt.len()];
    let mut pred_taken = vec![false; pred.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    for (gi, g) in gt.iter().enumerate() {
        let Some(&pi) = previous.get(&g.id).and_then(|p| pred_index.get(p)) else {
            continue;
        };
        if !pred_taken[pi] && criterion.cost(g, &pred[pi]).is_some() {
            gt_taken[gi] = true;
            pred_taken[pi] = true;
            pairs.push((gi, pi));
        }
    }

    let free_gt: Vec<usize> = (0..gt.len()).filter(|&i| !gt_taken[i]).collect();
    let free_pred: Vec<usize> = (0..pred.len()).filter(|&i| !pred_taken[i]).collect();
    if !free_gt.is_empty() && !free_pred.is_empty() {
        let mut feasible = vec![vec![None; free_pred.len()]; free_gt.len()];
        let mut max_cost: f64 = 0.0;
        for (r, &gi) in free_gt.iter().enumerate() {
            for (c, &pi) in free_pred.iter().enumerate() {
                feasible[r][c] = criterion.cost(&gt[gi], &pred[pi]);
                if let Some(cost) = feasible[r][c] {
                    max_cost = max_cost.max(cost);
                }
            }
        }
        let sentinel = (max_cost + 1.0) * (free_gt.len().min(free_pred.len()) as f64 + 1.0);
        let mut costs = CostMatrix::filled(free_gt.len(), free_pred.len(), sentinel);
        for (r, row) in feasible.iter().enumerate() {
            for (c, cost) in row.iter().enumerate() {
                if let Some(cost) = cost {
                    costs.set(r, c, *cost);
                }
            }
        }
        for (r, c) in solve_gated(&costs, sentinel).pairs {
            gt_taken[free_gt[r]] = true;
            pred_taken[free_pred[c]] = true;
            pairs.push((free_gt[r], free_pred[c]));
        }
    }

    let mut matches: Vec<MatchedPair> = pairs
        .into_iter()
        .map(|(gi, pi)| MatchedPair {
            gt_id: gt[gi].id,
            pred_id: pred[pi].id,
            class: gt[gi].class,
            distance: gt[gi].bbox.center_distance(&pred[pi].bbox),
            iou: gt[gi].bbox.iou(&pred[pi].bbox),
        })
        .collect();
    matches.sort_by_key(|m| m.gt_id);

    let mut candidates = Vec::new();
    for g in gt {
        for p in pred {
            if criterion.cost(g, p).is_some() {
                candidates.push((g.id, p.id, g.class));
            }
        }
    }

    Ok(FrameMatchResult {
        frame,
        matches,
        unmatched_gt: gt
            .iter()
            .zip(&gt_taken)
            .filter(|(_, &t)| !t)
            .map(|(g, _)| (g.id, g.class))
            .collect(),
        unmatched_pred: pred
            .iter()
            .zip(&pred_taken)
            .filter(|(_, &t)| !t)
            .map(|(p, _)| (p.id, p.class))
            .collect(),
        candidates,
    })
}

#[derive(Debug, Clone, Default)]
struct TrackHistory {
    present: u64,
    matched: u64,
    last_pred: Option<i64>,
    last_present_matched: bool,
}

/// Running CLEAR MOT tallies for one class filter within one sequence.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub idsw: u64,
    pub frag: u64,
    /// Ground-truth object-frames.
    pub gt: u64,
    pub sum_iou: f64,
    pub sum_distance: f64,
    pub sum_frame_mean_iou: f64,
    pub frames_with_matches: u64,
    tracks: BTreeMap<i64, TrackHistory>,
    pred_dets: BTreeMap<i64, u64>,
    co_occurrence: BTreeMap<(i64, i64), u64>,
}

impl Tally {
    fn record(&mut self, frame: &FrameMatchResult, class: Option<ObjectClass>) {
        let keep = |c: ObjectClass| class.is_none_or(|k| k == c);

        let mut frame_iou = 0.0;
        let mut c_t = 0u64;
        for m in frame.matches.iter().filter(|m| keep(m.class)) {
            c_t += 1;
            frame_iou += m.iou;
            self.sum_iou += m.iou;
            self.sum_distance += m.distance;

            let track = self.tracks.entry(m.gt_id).or_default();
            if track.last_pred.is_some_and(|p| p != m.pred_id) {
                self.idsw += 1;
            }
            if track.matched > 0 && !track.last_present_matched {
                self.frag += 1;
            }
            track.present += 1;
            track.matched += 1;
            track.last_pred = Some(m.pred_id);
            track.last_present_matched = true;
            *self.pred_dets.entry(m.pred_id).or_default() += 1;
        }
        let misses = frame.unmatched_gt.iter().filter(|(_, c)| keep(*c));
        let mut n_miss = 0;
        for (id, _) in misses {
            n_miss += 1;
            let track = self.tracks.entry(*id).or_default();
            track.present += 1;
            track.last_present_matched = false;
        }
        let mut n_fp = 0;
        for (id, _) in frame.unmatched_pred.iter().filter(|(_, c)| keep(*c)) {
            n_fp += 1;
            *self.pred_dets.entry(*id).or_default() += 1;
        }
        for &(g, p, c) in &frame.candidates {
            if keep(c) {
                *self.co_occurrence.entry((g, p)).or_default() += 1;
            }
        }

        self.tp += c_t;
        self.fn_ += n_miss;
        self.fp += n_fp;
        self.gt += c_t + n_miss;
        if c_t > 0 {
            self.sum_frame_mean_iou += frame_iou / c_t as f64;
            self.frames_with_matches += 1;
        }
    }

    /// Identity-level true positives from the best one-to-one pairing of
    /// ground-truth and predicted tracks.
    fn identity_true_positives(&self) -> u64 {
        let gt_ids: Vec<i64> = self.tracks.keys().copied().collect();
        let pred_ids: Vec<i64> = self.pred_dets.keys().copied().collect();
        if gt_ids.is_empty() || pred_ids.is_empty() || self.co_occurrence.is_empty() {
            return 0;
        }
        let gt_pos: HashMap<i64, usize> = gt_ids.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let pred_pos: HashMap<i64, usize> = pred_ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut costs = CostMatrix::filled(gt_ids.len(), pred_ids.len(), 0.0);
        for (&(g, p), &n) in &self.co_occurrence {
            costs.set(gt_pos[&g], pred_pos[&p], -(n as f64));
        }
        let best = crate::assignment::solve_assignment(&costs);
        best.pairs
            .iter()
            .map(|&(r, c)| self.co_occurrence.get(&(gt_ids[r], pred_ids[c])).copied().unwrap_or(0))
            .sum()
    }

    pub fn summary(&self) -> TallySummary {
        let idtp = self.identity_true_positives();
        let pred_total: u64 = self.pred_dets.values().sum();
        TallySummary {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
            idsw: self.idsw,
            frag: self.frag,
            gt: self.gt,
            sum_iou: self.sum_iou,
            sum_distance: self.sum_distance,
            sum_frame_mean_iou: self.sum_frame_mean_iou,
            frames_with_matches: self.frames_with_matches,
            idtp,
            idfp: pred_total - idtp,
            idfn: self.gt - idtp,
            coverage: self
                .tracks
                .values()
                .map(|t| t.matched as f64 / t.present as f64)
                .collect(),
        }
    }
}

/// Finished tallies; summaries of several sequences add up.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TallySummary {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub idsw: u64,
    pub frag: u64,
    pub gt: u64,
    pub sum_iou: f64,
    pub sum_distance: f64,
    pub sum_frame_mean_iou: f64,
    pub frames_with_matches: u64,
    pub idtp: u64,
    pub idfp: u64,
    pub idfn: u64,
    /// Matched fraction of each ground-truth track.
    pub coverage: Vec<f64>,
}

impl Add for TallySummary {
    type Output = TallySummary;
    fn add(mut self, o: TallySummary) -> TallySummary {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.idsw += o.idsw;
        self.frag += o.frag;
        self.gt += o.gt;
        self.sum_iou += o.sum_iou;
        self.sum_distance += o.sum_distance;
        self.sum_frame_mean_iou += o.sum_frame_mean_iou;
        self.frames_with_matches += o.frames_with_matches;
        self.idtp += o.idtp;
        self.idfp += o.idfp;
        self.idfn += o.idfn;
        self.coverage.extend(o.coverage);
        self
    }
}

/// Per-sequence accumulator: one overall tally plus one per class.
#[derive(Debug, Clone, Default)]
pub struct MotAccumulator {
    pub overall: Tally,
    pub per_class: BTreeMap<ObjectClass, Tally>,
    previous: HashMap<i64, i64>,
    frames: u64,
}

impl MotAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ground-truth to prediction correspondences of the last frame.
    pub fn previous_matches(&self) -> &HashMap<i64, i64> {
        &self.previous
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    /// Adds one frame. Frames must arrive in temporal order.
    pub fn update(&mut self, frame: &FrameMatchResult) {
        self.overall.record(frame, None);
        for class in ObjectClass::ANALYZED {
            self.per_class.entry(class).or_default().record(frame, Some(class));
        }
        self.previous = frame.matches.iter().map(|m| (m.gt_id, m.pred_id)).collect();
        self.frames += 1;
    }

    pub fn summary(&self) -> MotSummary {
        MotSummary {
            overall: self.overall.summary(),
            per_class: self.per_class.iter().map(|(c, t)| (*c, t.summary())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MotSummary {
    pub overall: TallySummary,
    pub per_class: BTreeMap<ObjectClass, TallySummary>,
}

impl Add for MotSummary {
    type Output = MotSummary;
    fn add(mut self, o: MotSummary) -> MotSummary {
        self.overall = self.overall + o.overall;
        for (class, t) in o.per_class {
            let mine = self.per_class.remove(&class).unwrap_or_default();
            self.per_class.insert(class, mine + t);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotMetrics {
    pub mota: f64,
    /// Mean IoU of matched pairs (higher is better).
    pub motp: Option<f64>,
    /// Mean center distance of matched pairs in pixels.
    pub motp_distance: Option<f64>,
    pub moda: f64,
    pub modp: Option<f64>,
    /// Identity-level F1.
    pub idf1: f64,
    /// `2TP / (2TP + FP + FN)` over detections.
    pub detection_f1: f64,
    pub mt: f64,
    pub ml: f64,
    pub fp_pct: f64,
    pub fn_pct: f64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub idsw: u64,
    pub frag: u64,
    pub gt: u64,
    pub gt_tracks: usize,
}

/// Derived metrics; `None` without ground truth.
pub fn metrics(t: &TallySummary) -> Option<MotMetrics> {
    if t.gt == 0 {
        return None;
    }
    let gt = t.gt as f64;
    let (tp, fp, fn_) = (t.tp as f64, t.fp as f64, t.fn_ as f64);
    let matches = (t.tp > 0).then_some(tp);
    let f1 = |tp: f64, fp: f64, fn_: f64| {
        let denom = 2.0 * tp + fp + fn_;
        if denom > 0.0 {
            2.0 * tp / denom
        } else {
            0.0
        }
    };
    let tracks = t.coverage.len().max(1) as f64;
    Some(MotMetrics {
        mota: 1.0 - (fn_ + fp + t.idsw as f64) / gt,
        motp: matches.map(|c| t.sum_iou / c),
        motp_distance: matches.map(|c| t.sum_distance / c),
        moda: (tp - fp) / (tp + fn_),
        modp: (t.frames_with_matches > 0).then(|| t.sum_frame_mean_iou / t.frames_with_matches as f64),
        idf1: f1(t.idtp as f64, t.idfp as f64, t.idfn as f64),
        detection_f1: f1(tp, fp, fn_),
        mt: t.coverage.iter().filter(|&&c| c >= MOSTLY_TRACKED).count() as f64 / tracks,
        ml: t.coverage.iter().filter(|&&c| c <= MOSTLY_LOST).count() as f64 / tracks,
        fp_pct: 100.0 * fp / gt,
        fn_pct: 100.0 * fn_ / gt,
        tp: t.tp,
        fp: t.fp,
        fn_: t.fn_,
        idsw: t.idsw,
        frag: t.frag,
        gt: t.gt,
        gt_tracks: t.coverage.len(),
    })
}

fn by_frame(records: &[ObservationRecord]) -> BTreeMap<u32, Vec<ImageObject>> {
    let mut frames: BTreeMap<u32, Vec<ImageObject>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.class.is_analyzed()) {
        frames.entry(r.frame).or_default().push(r.into());
    }
    frames
}

/// Evaluates one sequence. Frames run from 0 to the last frame present in
/// either file, or to `num_frames - 1` when given. Ignored classes are left
/// out on both sides.
pub fn evaluate_sequence(
    gt: &[ObservationRecord],
    pred: &[ObservationRecord],
    criterion: &MatchCriterion,
    num_frames: Option<u32>,
) -> Result<MotAccumulator> {
    let gt_frames = by_frame(gt);
    let pred_frames = by_frame(pred);
    let last_seen = gt_frames.keys().chain(pred_frames.keys()).copied().max();
    let end = match (num_frames, last_seen) {
        (Some(n), _) => n,
        (None, Some(last)) => last + 1,
        (None, None) => 0,
    };
    let mut acc = MotAccumulator::new();
    let empty = Vec::new();
    for frame in 0..end {
        let g = gt_frames.get(&frame).unwrap_or(&empty);
        let p = pred_frames.get(&frame).unwrap_or(&empty);
        let result = match_frame(frame, g, p, acc.previous_matches(), criterion)?;
        acc.update(&result);
    }
    Ok(acc)
}
