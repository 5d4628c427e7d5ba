//! Pairwise interactions between co-existing road users and their severity.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ttc, TtcConfig};
use crate::kitti_io::ObjectClass;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Both road users move.
    Interaction1,
    /// At least one road user was found stationary.
    Interaction2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    /// Track ids, smaller first.
    pub pair: (u64, u64),
    pub classes: (ObjectClass, ObjectClass),
    /// Inclusive range of frames where both road users exist.
    pub frames: (u32, u32),
    pub ttc_series: BTreeMap<u32, Option<f64>>,
    pub ttc_min: Option<f64>,
    pub category: Category,
}

pub fn categorize(a: &Trajectory, b: &Trajectory) -> Category {
    if a.stationary || b.stationary {
        Category::Interaction2
    } else {
        Category::Interaction1
    }
}

/// One interaction per unordered pair of trajectories whose frame spans
/// intersect, sorted by pair. TTC fields are left empty.
pub fn enumerate_interactions(trajectories: &[Trajectory], include_ego: bool) -> Vec<Interaction> {
    let mut users: Vec<&Trajectory> = trajectories
        .iter()
        .filter(|t| !t.states.is_empty() && (include_ego || !t.is_ego()))
        .collect();
    users.sort_by_key(|t| t.track_id);

    let mut out = Vec::new();
    for (i, a) in users.iter().enumerate() {
        for b in &users[i + 1..] {
            let start = a.first_frame().max(b.first_frame());
            let end = a.last_frame().min(b.last_frame());
            let (Some(start), Some(end)) = (start, end) else { continue };
            if start > end {
                continue;
            }
            out.push(Interaction {
                pair: (a.track_id, b.track_id),
                classes: (a.class, b.class),
                frames: (start, end),
                ttc_series: BTreeMap::new(),
                ttc_min: None,
                category: categorize(a, b),
            });
        }
    }
    out
}

/// Fills the per-frame TTC series of `interaction` and its minimum.
///
/// Frames where either road user has no state are left out of the series.
pub fn compute_ttc_series(interaction: &Interaction, a: &Trajectory, b: &Trajectory, cfg: &TtcConfig) -> Result<Interaction> {
    let mut series = BTreeMap::new();
    for frame in interaction.frames.0..=interaction.frames.1 {
        if let (Some(sa), Some(sb)) = (a.state_at(frame), b.state_at(frame)) {
            series.insert(frame, ttc(sa, sb, cfg)?);
        }
    }
    let ttc_min = series.values().flatten().copied().min_by(f64::total_cmp);
    Ok(Interaction {
        ttc_series: series,
        ttc_min,
        category: categorize(a, b),
        ..interaction.clone()
    })
}

/// Enumerates the interactions of a set of post-processed trajectories and
/// computes their TTC series in parallel. Output is sorted by pair.
pub fn analyze_interactions(trajectories: &[Trajectory], include_ego: bool, cfg: &TtcConfig) -> Result<Vec<Interaction>> {
    cfg.validate()?;
    let by_id: HashMap<u64, &Trajectory> = trajectories.iter().map(|t| (t.track_id, t)).collect();
    let lookup = |id: u64| by_id.get(&id).copied().ok_or(Error::UnknownTrack(id));
    enumerate_interactions(trajectories, include_ego)
        .par_iter()
        .map(|i| compute_ttc_series(i, lookup(i.pair.0)?, lookup(i.pair.1)?, cfg))
        .collect()
}

/// TTC limits, seconds, for the two severity levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityThresholds {
    pub high: f64,
    pub severe: f64,
}

impl Default for SeverityThresholds {
    fn default() -> Self {
        Self { high: 10.0, severe: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SeverityCounts {
    pub below_10s: u64,
    pub below_1_5s: u64,
    pub total_interactions: u64,
}

impl std::ops::Add for SeverityCounts {
    type Output = SeverityCounts;
    fn add(self, rhs: Self) -> Self {
        SeverityCounts {
            below_10s: self.below_10s + rhs.below_10s,
            below_1_5s: self.below_1_5s + rhs.below_1_5s,
            total_interactions: self.total_interactions + rhs.total_interactions,
        }
    }
}

impl std::iter::Sum for SeverityCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

/// Counts interactions whose `ttc_min` is strictly below each threshold.
pub fn count_severities<'a>(
    interactions: impl IntoIterator<Item = &'a Interaction>,
    thresholds: &SeverityThresholds,
) -> SeverityCounts {
    let mut counts = SeverityCounts::default();
    for i in interactions {
        counts.total_interactions += 1;
        if let Some(t) = i.ttc_min {
            counts.below_10s += u64::from(t < thresholds.high);
            counts.below_1_5s += u64::from(t < thresholds.severe);
        }
    }
    counts
}

fn reduction(before: u64, after: u64) -> Option<f64> {
    (before > 0).then(|| 100.0 * (before as f64 - after as f64) / before as f64)
}

/// Signed percentage reduction per threshold, `None` when the baseline count
/// is zero.
pub fn reduction_percentages(before: &SeverityCounts, after: &SeverityCounts) -> (Option<f64>, Option<f64>) {
    (
        reduction(before.below_10s, after.below_10s),
        reduction(before.below_1_5s, after.below_1_5s),
    )
}
