//! Ground-plane geometry: oriented rectangles, overlap tests and the
//! constant-velocity time-to-collision search.
//!
//! Coordinates are the camera ground plane `(x, z)` of the KITTI convention
//! (x to the right, z forward). Headings follow the KITTI development kit:
//! a local offset `(dx, dz)` is rotated by `yaw` as
//!
//! ```text
//! x' =  dx * cos(yaw) + dz * sin(yaw)
//! z' = -dx * sin(yaw) + dz * cos(yaw)
//! ```
//!
//! with the box length along the local x axis and the width along the local
//! z axis.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kitti_io::BevState;

/// Slack used by the overlap test. Boxes closer than this count as touching,
/// and touching boxes overlap.
pub const CONTACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub z: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, z: 0.0 };

    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    /// Rotates by `yaw` using the KITTI heading convention.
    pub fn rotate(self, yaw: f64) -> Vec2 {
        let (s, c) = yaw.sin_cos();
        Vec2 {
            x: self.x * c + self.z * s,
            z: -self.x * s + self.z * c,
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.z + rhs.z)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.z * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.z)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Oriented rectangle on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BevBox {
    pub center: Vec2,
    pub yaw: f64,
    pub length: f64,
    pub width: f64,
}

impl BevBox {
    pub fn new(center: Vec2, yaw: f64, length: f64, width: f64) -> Self {
        Self {
            center,
            yaw,
            length,
            width,
        }
    }

    /// Unit vectors along the box length and width.
    pub fn axes(&self) -> [Vec2; 2] {
        [Vec2::new(1.0, 0.0).rotate(self.yaw), Vec2::new(0.0, 1.0).rotate(self.yaw)]
    }

    /// The four corners, counter-clockwise in the `(x, z)` plane.
    pub fn corners(&self) -> [Vec2; 4] {
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        [
            Vec2::new(hl, hw),
            Vec2::new(-hl, hw),
            Vec2::new(-hl, -hw),
            Vec2::new(hl, -hw),
        ]
        .map(|offset| self.center + offset.rotate(self.yaw))
    }

    pub fn circumradius(&self) -> f64 {
        0.5 * self.length.hypot(self.width)
    }

    /// Half-extent of the box projected onto the unit direction `axis`.
    fn projected_radius(&self, axis: Vec2) -> f64 {
        let [u, v] = self.axes();
        0.5 * self.length * u.dot(axis).abs() + 0.5 * self.width * v.dot(axis).abs()
    }

    pub fn translated(&self, offset: Vec2) -> BevBox {
        BevBox {
            center: self.center + offset,
            ..*self
        }
    }
}

/// Separating-axis test over the four edge normals of the two rectangles.
///
/// Rectangles are closed sets: boxes whose boundaries touch overlap.
pub fn overlap(a: &BevBox, b: &BevBox) -> bool {
    let offset = b.center - a.center;
    a.axes().into_iter().chain(b.axes()).all(|axis| {
        offset.dot(axis).abs() <= a.projected_radius(axis) + b.projected_radius(axis) + CONTACT_TOLERANCE
    })
}

/// Footprint of `state` after moving `t` seconds at its constant velocity.
pub fn extrapolate(state: &BevState, t: f64) -> Result<BevBox> {
    let velocity = state.velocity.ok_or(Error::MissingVelocity(state.frame))?;
    Ok(state.footprint().translated(velocity * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtcConfig {
    /// Longest prediction considered, seconds.
    pub horizon: f64,
    /// Spacing of the tested future instants, seconds.
    pub dt: f64,
}

impl Default for TtcConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 0.1,
        }
    }
}

impl TtcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= self.horizon && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "TTC step must satisfy 0 < dt <= horizon (dt={}, horizon={})",
                self.dt, self.horizon
            )));
        }
        Ok(())
    }

    /// Index of the last grid instant, `floor(horizon / dt)`.
    pub fn last_step(&self) -> u64 {
        // The slack absorbs representation error in ratios like 10.0 / 0.1.
        (self.horizon / self.dt + 1e-9).floor() as u64
    }
}

/// Interval of times in `[0, ∞)` during which the bounding circles of two
/// boxes moving with relative motion `offset + velocity * t` may touch.
fn circle_window(offset: Vec2, velocity: Vec2, reach: f64) -> Option<(f64, f64)> {
    let a = velocity.dot(velocity);
    let b = 2.0 * offset.dot(velocity);
    let c = offset.dot(offset) - reach * reach;
    if a == 0.0 {
        return (c <= 0.0).then_some((0.0, f64::INFINITY));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let (lo, hi) = ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a));
    (hi >= 0.0).then_some((lo.max(0.0), hi))
}

/// First grid instant `k * dt` (`0 <= k * dt <= horizon`) at which the
/// constant-velocity footprints of `a` and `b` overlap.
///
/// Returns `Ok(None)` when the two road users never touch within the
/// horizon.
pub fn ttc(a: &BevState, b: &BevState, cfg: &TtcConfig) -> Result<Option<f64>> {
    if a.frame != b.frame {
        return Err(Error::FrameMismatch {
            expected: a.frame,
            found: b.frame,
        });
    }
    let va = a.velocity.ok_or(Error::MissingVelocity(a.frame))?;
    let vb = b.velocity.ok_or(Error::MissingVelocity(b.frame))?;
    let (box_a, box_b) = (a.footprint(), b.footprint());

    // Only instants where the circumscribed circles meet can overlap. The
    // circle test narrows the grid scan; the slack keeps it conservative.
    let reach = box_a.circumradius() + box_b.circumradius() + 1e-6;
    let Some((lo, hi)) = circle_window(box_b.center - box_a.center, vb - va, reach) else {
        return Ok(None);
    };
    let last = cfg.last_step();
    let first_k = ((lo / cfg.dt).floor() as u64).saturating_sub(1);
    let last_k = if hi.is_finite() {
        last.min((hi / cfg.dt).ceil() as u64 + 1)
    } else {
        last
    };

    for k in first_k..=last_k {
        let t = k as f64 * cfg.dt;
        if overlap(&box_a.translated(va * t), &box_b.translated(vb * t)) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
