//! Per-track trajectories and their post-processing.
//!
//! The steps run in a fixed order: build, split at long gaps (IDsplit),
//! interpolate missing frames, collapse near-stationary tracks (SS), estimate
//! velocities. See [`post_process`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Vec2};
use crate::kitti_io::{BevState, ObjectClass, TrackedState};

/// Track id reserved for the recording vehicle.
pub const EGO_TRACK_ID: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub track_id: u64,
    pub class: ObjectClass,
    /// Strictly increasing frames.
    pub states: Vec<BevState>,
    pub stationary: bool,
}

impl Trajectory {
    pub fn new(track_id: u64, class: ObjectClass, states: Vec<BevState>) -> Self {
        Self {
            track_id,
            class,
            states,
            stationary: false,
        }
    }

    pub fn is_ego(&self) -> bool {
        self.track_id == EGO_TRACK_ID
    }

    pub fn first_frame(&self) -> Option<u32> {
        self.states.first().map(|s| s.frame)
    }

    pub fn last_frame(&self) -> Option<u32> {
        self.states.last().map(|s| s.frame)
    }

    /// State observed (or interpolated) at `frame`.
    pub fn state_at(&self, frame: u32) -> Option<&BevState> {
        let first = self.first_frame()?;
        // Fast path for contiguous trajectories.
        if let Some(s) = frame.checked_sub(first).and_then(|i| self.states.get(i as usize)) {
            if s.frame == frame {
                return Some(s);
            }
        }
        self.states
            .binary_search_by_key(&frame, |s| s.frame)
            .ok()
            .map(|i| &self.states[i])
    }

    pub fn is_contiguous(&self) -> bool {
        self.states.windows(2).all(|w| w[1].frame == w[0].frame + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostProcessConfig {
    /// Longest tolerated run of missing frames inside a track.
    pub thr_split: u32,
    /// Fewest observed frames a split segment needs to survive.
    pub thr_cons: u32,
    /// Endpoint displacement (meters, per axis) under which a track is
    /// considered stationary.
    pub thr_sta: f64,
    pub fps: f64,
    /// Half-width, in frames, of the velocity difference quotient.
    pub velocity_window: u32,
}

impl Default for PostProcessConfig {
    fn default() -> Self {
        Self {
            thr_split: 10,
            thr_cons: 3,
            thr_sta: 2.0,
            fps: 10.0,
            velocity_window: 1,
        }
    }
}

impl PostProcessConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.thr_split > 0
            && self.thr_cons > 0
            && self.thr_sta > 0.0
            && self.fps > 0.0
            && self.fps.is_finite()
            && self.velocity_window > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("post-processing thresholds must be positive: {self:?}")))
        }
    }
}

/// Hands out track ids for trajectories created by splitting.
#[derive(Debug, Clone)]
pub struct IdAllocator {
    next: u64,
}

impl IdAllocator {
    /// Starts above every id already in use.
    pub fn after<'a>(trajectories: impl IntoIterator<Item = &'a Trajectory>) -> Self {
        let next = trajectories
            .into_iter()
            .filter(|t| !t.is_ego())
            .map(|t| t.track_id + 1)
            .max()
            .unwrap_or(0);
        Self { next }
    }

    pub fn starting_at(next: u64) -> Self {
        Self { next }
    }

    pub fn fresh(&mut self) -> u64 {
        let id = self.next;
        self.next += 1;
        id
    }
}

/// Groups projected observations by track id, sorted by frame.
///
/// The class of a track is the class of its earliest observation. The ego
/// trajectory, when given, is appended last.
pub fn build_trajectories(observations: &[TrackedState], ego: Option<Trajectory>) -> Result<Vec<Trajectory>> {
    let mut tracks: BTreeMap<u64, Vec<(ObjectClass, BevState)>> = BTreeMap::new();
    for obs in observations {
        if !obs.class.is_analyzed() {
            return Err(Error::InvalidRecord(format!(
                "track {} at frame {} has an ignored class",
                obs.track_id, obs.state.frame
            )));
        }
        if obs.track_id == EGO_TRACK_ID {
            return Err(Error::InvalidRecord(format!("track id {EGO_TRACK_ID} is reserved for the ego vehicle")));
        }
        tracks.entry(obs.track_id).or_default().push((obs.class, obs.state));
    }

    let mut out = Vec::with_capacity(tracks.len() + 1);
    for (track_id, mut states) in tracks {
        states.sort_by_key(|(_, s)| s.frame);
        if let Some(w) = states.windows(2).find(|w| w[0].1.frame == w[1].1.frame) {
            return Err(Error::DuplicateObservation {
                frame: w[0].1.frame,
                track_id: track_id as i64,
            });
        }
        let class = states[0].0;
        out.push(Trajectory::new(track_id, class, states.into_iter().map(|(_, s)| s).collect()));
    }
    out.extend(ego);
    Ok(out)
}

/// IDsplit: cuts the trajectory wherever more than `thr_split` frames are
/// missing in a row.
///
/// Without such a gap the trajectory passes through unchanged. Otherwise every
/// piece with at least `thr_cons` observed frames is kept under a fresh id.
pub fn split_on_gaps(traj: &Trajectory, cfg: &PostProcessConfig, ids: &mut IdAllocator) -> Vec<Trajectory> {
    let mut segments: Vec<&[BevState]> = Vec::new();
    let mut start = 0;
    for i in 1..traj.states.len() {
        let missing = traj.states[i].frame - traj.states[i - 1].frame - 1;
        if missing > cfg.thr_split {
            segments.push(&traj.states[start..i]);
            start = i;
        }
    }
    if start == 0 {
        return vec![traj.clone()];
    }
    segments.push(&traj.states[start..]);

    segments
        .into_iter()
        .filter(|seg| seg.len() >= cfg.thr_cons as usize)
        .map(|seg| Trajectory {
            track_id: ids.fresh(),
            class: traj.class,
            states: seg.to_vec(),
            stationary: traj.stationary,
        })
        .collect()
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Fills every missing frame by linear interpolation between the flanking
/// observed states. Headings follow the shorter arc.
pub fn interpolate_gaps(traj: &Trajectory) -> Trajectory {
    let mut states = Vec::with_capacity(traj.states.len());
    for (i, s) in traj.states.iter().enumerate() {
        if let Some(prev) = i.checked_sub(1).map(|j| &traj.states[j]) {
            let span = (s.frame - prev.frame) as f64;
            let turn = normalize_angle(s.yaw - prev.yaw);
            for frame in prev.frame + 1..s.frame {
                let t = (frame - prev.frame) as f64 / span;
                states.push(BevState {
                    frame,
                    position: Vec2::new(lerp(prev.position.x, s.position.x, t), lerp(prev.position.z, s.position.z, t)),
                    yaw: normalize_angle(prev.yaw + turn * t),
                    length: lerp(prev.length, s.length, t),
                    width: lerp(prev.width, s.width, t),
                    velocity: None,
                });
            }
        }
        states.push(*s);
    }
    Trajectory { states, ..traj.clone() }
}

/// SS: a track whose first and last positions differ by less than `thr_sta`
/// on both ground axes is pinned to its mean position with zero velocity.
pub fn stationary_smooth(traj: &Trajectory, cfg: &PostProcessConfig) -> Trajectory {
    let (Some(first), Some(last)) = (traj.states.first(), traj.states.last()) else {
        return traj.clone();
    };
    let moved = last.position - first.position;
    if !(moved.x.abs() < cfg.thr_sta && moved.z.abs() < cfg.thr_sta) {
        return Trajectory {
            stationary: false,
            ..traj.clone()
        };
    }

    // Averaging offsets from the first state keeps an already-constant track
    // bit-identical.
    let n = traj.states.len() as f64;
    let sum = traj
        .states
        .iter()
        .fold(Vec2::ZERO, |acc, s| acc + (s.position - first.position));
    let mean = first.position + sum * (1.0 / n);
    let states = traj
        .states
        .iter()
        .map(|s| BevState {
            position: mean,
            velocity: Some(Vec2::ZERO),
            ..*s
        })
        .collect();
    Trajectory {
        states,
        stationary: true,
        ..traj.clone()
    }
}

/// Finite-difference velocities in meters per second.
///
/// Interior frames use a central difference over `velocity_window` frames on
/// each side; frames near either end fall back to one-sided differences.
/// Stationary tracks keep zero velocity.
pub fn estimate_velocities(traj: &Trajectory, cfg: &PostProcessConfig) -> Trajectory {
    let n = traj.states.len();
    let w = cfg.velocity_window as usize;
    let velocity = |i: usize| -> Vec2 {
        if traj.stationary || n < 2 {
            return Vec2::ZERO;
        }
        let (lo, hi) = if i >= w && i + w < n {
            (i - w, i + w)
        } else if i + w < n {
            (i, i + w)
        } else if i >= w {
            (i - w, i)
        } else {
            (0, n - 1)
        };
        let (a, b) = (&traj.states[lo], &traj.states[hi]);
        let frames = (b.frame - a.frame) as f64;
        (b.position - a.position) * (cfg.fps / frames)
    };
    let states = (0..n)
        .map(|i| BevState {
            velocity: Some(velocity(i)),
            ..traj.states[i]
        })
        .collect();
    Trajectory { states, ..traj.clone() }
}

/// Which optional post-processing steps run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Variant {
    pub idsplit: bool,
    pub ss: bool,
}

impl Variant {
    pub const NONE: Variant = Variant {
        idsplit: false,
        ss: false,
    };

    /// Suffix appended to a method label, e.g. `+IDsplit+SS`.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        if self.idsplit {
            s.push_str("+IDsplit");
        }
        if self.ss {
            s.push_str("+SS");
        }
        s
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = Variant::NONE;
        let lower = s.to_ascii_lowercase();
        if lower == "none" {
            return Ok(v);
        }
        for part in lower.split('+') {
            match part.trim() {
                "idsplit" => v.idsplit = true,
                "ss" => v.ss = true,
                other => return Err(Error::InvalidConfig(format!("unknown post-processing step {other:?}"))),
            }
        }
        Ok(v)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = self.suffix();
        if s.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&s[1..])
        }
    }
}

/// Runs the post-processing chain on freshly built trajectories.
///
/// The ego trajectory never takes part in IDsplit or SS.
pub fn post_process(trajectories: &[Trajectory], cfg: &PostProcessConfig, variant: Variant) -> Vec<Trajectory> {
    let mut ids = IdAllocator::after(trajectories);
    let mut out = Vec::with_capacity(trajectories.len());
    for traj in trajectories {
        let pieces = if variant.idsplit && !traj.is_ego() {
            split_on_gaps(traj, cfg, &mut ids)
        } else {
            vec![traj.clone()]
        };
        for piece in pieces {
            let mut t = interpolate_gaps(&piece);
            if variant.ss && !t.is_ego() {
                t = stationary_smooth(&t, cfg);
            }
            out.push(estimate_velocities(&t, cfg));
        }
    }
    out
}
