//! KITTI tracking label files, ego-pose files and the projection of 3D
//! camera-frame boxes onto the ground plane.
//!
//! A label line has 17 whitespace-separated fields (ground truth) or 18
//! (tracker output with a trailing confidence):
//!
//! ```text
//! frame track_id type truncated occluded alpha \
//!     left top right bottom  height width length  x y z  rotation_y [score]
//! ```

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, BevBox, Vec2};
use crate::trajectory::{Trajectory, EGO_TRACK_ID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectClass {
    Car,
    Pedestrian,
    Cyclist,
    /// Any other label (`DontCare`, `Van`, `Truck`, ...). Kept by the parser,
    /// excluded from the safety analysis.
    Ignored,
}

impl ObjectClass {
    pub const ANALYZED: [ObjectClass; 3] = [ObjectClass::Car, ObjectClass::Pedestrian, ObjectClass::Cyclist];

    pub fn from_label(label: &str) -> Self {
        match label {
            "Car" => ObjectClass::Car,
            "Pedestrian" => ObjectClass::Pedestrian,
            "Cyclist" => ObjectClass::Cyclist,
            _ => ObjectClass::Ignored,
        }
    }

    /// Label written back to label files. Ignored objects become `DontCare`.
    pub fn label(self) -> &'static str {
        match self {
            ObjectClass::Car => "Car",
            ObjectClass::Pedestrian => "Pedestrian",
            ObjectClass::Cyclist => "Cyclist",
            ObjectClass::Ignored => "DontCare",
        }
    }

    pub fn is_analyzed(self) -> bool {
        self != ObjectClass::Ignored
    }
}

impl std::fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Image-plane rectangle in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox2d {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl BBox2d {
    pub fn area(&self) -> f64 {
        (self.right - self.left).max(0.0) * (self.bottom - self.top).max(0.0)
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.left + self.right) / 2.0, (self.top + self.bottom) / 2.0)
    }

    pub fn iou(&self, other: &BBox2d) -> f64 {
        let w = (self.right.min(other.right) - self.left.max(other.left)).max(0.0);
        let h = (self.bottom.min(other.bottom) - self.top.max(other.top)).max(0.0);
        let inter = w * h;
        let union = self.area() + other.area() - inter;
        if union > 0.0 {
            inter / union
        } else {
            0.0
        }
    }

    pub fn center_distance(&self, other: &BBox2d) -> f64 {
        let (a, b) = (self.center(), other.center());
        (a.0 - b.0).hypot(a.1 - b.1)
    }
}

/// Box size in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub height: f64,
    pub width: f64,
    pub length: f64,
}

/// Camera-frame point (x right, y down, z forward), meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// One line of a KITTI tracking label file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub frame: u32,
    /// `-1` for `DontCare` regions in ground truth.
    pub track_id: i64,
    pub class: ObjectClass,
    pub truncated: f64,
    pub occluded: i32,
    pub alpha: f64,
    pub bbox: BBox2d,
    pub dims: Dimensions,
    /// Bottom center of the 3D box.
    pub location: Point3,
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl ObservationRecord {
    /// Ground-plane footprint of the record.
    pub fn to_bev(&self) -> Result<BevState> {
        if !self.class.is_analyzed() {
            return Err(Error::InvalidRecord(format!(
                "frame {} track {}: ignored class has no footprint",
                self.frame, self.track_id
            )));
        }
        let Dimensions { length, width, .. } = self.dims;
        if !(length > 0.0 && width > 0.0) {
            return Err(Error::InvalidRecord(format!(
                "frame {} track {}: non-positive footprint {length} x {width}",
                self.frame, self.track_id
            )));
        }
        Ok(BevState {
            frame: self.frame,
            position: Vec2::new(self.location.x, self.location.z),
            yaw: normalize_angle(self.rotation_y),
            length,
            width,
            velocity: None,
        })
    }
}

/// Ground-plane state of a road user at one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BevState {
    pub frame: u32,
    pub position: Vec2,
    pub yaw: f64,
    pub length: f64,
    pub width: f64,
    /// Meters per second; set by velocity estimation.
    pub velocity: Option<Vec2>,
}

impl BevState {
    pub fn footprint(&self) -> BevBox {
        BevBox::new(self.position, self.yaw, self.length, self.width)
    }
}

/// Rigid planar transform from the camera ground plane of one frame to a
/// static world frame.
///
/// Points are rotated with the same convention as box headings (see
/// [`crate::geometry`]), so a pose adds `heading` to every yaw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoPose {
    pub frame: u32,
    pub x: f64,
    pub z: f64,
    pub heading: f64,
}

impl EgoPose {
    pub fn identity(frame: u32) -> Self {
        Self {
            frame,
            x: 0.0,
            z: 0.0,
            heading: 0.0,
        }
    }

    pub fn translation(&self) -> Vec2 {
        Vec2::new(self.x, self.z)
    }

    pub fn transform_point(&self, p: Vec2) -> Vec2 {
        p.rotate(self.heading) + self.translation()
    }
}

pub type PoseMap = BTreeMap<u32, EgoPose>;

pub fn apply_ego_pose(state: &BevState, pose: &EgoPose) -> Result<BevState> {
    if pose.frame != state.frame {
        return Err(Error::FrameMismatch {
            expected: state.frame,
            found: pose.frame,
        });
    }
    Ok(BevState {
        position: pose.transform_point(state.position),
        yaw: normalize_angle(state.yaw + pose.heading),
        velocity: state.velocity.map(|v| v.rotate(pose.heading)),
        ..*state
    })
}

/// Geometry of the recording vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoConfig {
    pub length: f64,
    pub width: f64,
    /// Center of the ego footprint in the camera ground plane.
    pub offset: Vec2,
}

impl Default for EgoConfig {
    fn default() -> Self {
        Self {
            length: 4.5,
            width: 1.8,
            offset: Vec2::ZERO,
        }
    }
}

/// Heading of a vehicle driving along the camera's optical axis (+z).
pub const FORWARD_YAW: f64 = -FRAC_PI_2;

/// Trajectory of the recording vehicle over `frames`.
///
/// Without poses the ego sits still at its camera-frame offset; with poses it
/// follows them in the world frame.
pub fn make_ego_trajectory(frames: &[u32], poses: Option<&PoseMap>, ego: &EgoConfig) -> Result<Trajectory> {
    let mut frames = frames.to_vec();
    frames.sort_unstable();
    frames.dedup();
    if frames.is_empty() {
        return Err(Error::EmptyFrames);
    }
    let states = frames
        .into_iter()
        .map(|frame| {
            let local = BevState {
                frame,
                position: ego.offset,
                yaw: FORWARD_YAW,
                length: ego.length,
                width: ego.width,
                velocity: None,
            };
            match poses {
                None => Ok(local),
                Some(poses) => {
                    let pose = poses.get(&frame).ok_or(Error::MissingPose(frame))?;
                    apply_ego_pose(&local, pose)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(EGO_TRACK_ID, ObjectClass::Car, states))
}

fn field<T: FromStr>(fields: &[&str], idx: usize, name: &str, line: usize) -> Result<T> {
    fields[idx].parse().map_err(|_| Error::Parse {
        line,
        message: format!("field {} ({name}) is not a number: {:?}", idx + 1, fields[idx]),
    })
}

fn parse_line(text: &str, line: usize) -> Result<ObservationRecord> {
    let f: Vec<&str> = text.split_whitespace().collect();
    if f.len() != 17 && f.len() != 18 {
        return Err(Error::Parse {
            line,
            message: format!("expected 17 or 18 fields, found {}", f.len()),
        });
    }
    let class = ObjectClass::from_label(f[2]);
    let record = ObservationRecord {
        frame: field(&f, 0, "frame", line)?,
        track_id: field(&f, 1, "track id", line)?,
        class,
        truncated: field(&f, 3, "truncated", line)?,
        occluded: field(&f, 4, "occluded", line)?,
        alpha: field(&f, 5, "alpha", line)?,
        bbox: BBox2d {
            left: field(&f, 6, "left", line)?,
            top: field(&f, 7, "top", line)?,
            right: field(&f, 8, "right", line)?,
            bottom: field(&f, 9, "bottom", line)?,
        },
        dims: Dimensions {
            height: field(&f, 10, "height", line)?,
            width: field(&f, 11, "width", line)?,
            length: field(&f, 12, "length", line)?,
        },
        location: Point3 {
            x: field(&f, 13, "x", line)?,
            y: field(&f, 14, "y", line)?,
            z: field(&f, 15, "z", line)?,
        },
        rotation_y: field(&f, 16, "rotation_y", line)?,
        score: if f.len() == 18 {
            Some(field(&f, 17, "score", line)?)
        } else {
            None
        },
    };
    if class.is_analyzed() {
        let invalid = |message: String| Error::Parse { line, message };
        if record.track_id < 0 {
            return Err(invalid(format!("negative track id {}", record.track_id)));
        }
        let b = record.bbox;
        if !(b.right > b.left && b.bottom > b.top) {
            return Err(invalid(format!(
                "degenerate 2D box ({}, {}, {}, {})",
                b.left, b.top, b.right, b.bottom
            )));
        }
        let d = record.dims;
        if !(d.height > 0.0 && d.width > 0.0 && d.length > 0.0) {
            return Err(invalid(format!(
                "non-positive dimensions ({}, {}, {})",
                d.height, d.width, d.length
            )));
        }
    }
    Ok(record)
}

/// Parses a KITTI tracking label file. Blank lines are skipped; line numbers
/// in errors are 1-based.
pub fn parse_tracking_labels(text: &str) -> Result<Vec<ObservationRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

pub fn write_tracking_labels(records: &[ObservationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = write!(
            out,
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}",
            r.frame,
            r.track_id,
            r.class.label(),
            r.truncated,
            r.occluded,
            r.alpha,
            r.bbox.left,
            r.bbox.top,
            r.bbox.right,
            r.bbox.bottom,
            r.dims.height,
            r.dims.width,
            r.dims.length,
            r.location.x,
            r.location.y,
            r.location.z,
            r.rotation_y
        );
        if let Some(score) = r.score {
            let _ = write!(out, " {score}");
        }
        out.push('\n');
    }
    out
}

/// Parses an ego-pose file.
///
/// Two layouts are accepted. Plain text has one `frame x z heading` record per
/// line (`#` starts a comment). JSON is an array of
/// `{"frame": .., "x": .., "z": .., "heading": ..}` objects.
pub fn parse_ego_poses(text: &str) -> Result<PoseMap> {
    let poses: Vec<(usize, EgoPose)> = if text.trim_start().starts_with('[') {
        let parsed: Vec<EgoPose> = serde_json::from_str(text)?;
        parsed.into_iter().enumerate().map(|(i, p)| (i + 1, p)).collect()
    } else {
        let mut poses = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let f: Vec<&str> = content.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 4 pose fields, found {}", f.len()),
                });
            }
            poses.push((
                i + 1,
                EgoPose {
                    frame: field(&f, 0, "frame", i + 1)?,
                    x: field(&f, 1, "x", i + 1)?,
                    z: field(&f, 2, "z", i + 1)?,
                    heading: field(&f, 3, "heading", i + 1)?,
                },
            ));
        }
        poses
    };

    let mut map = PoseMap::new();
    for (line, mut pose) in poses {
        pose.heading = normalize_angle(pose.heading);
        if map.insert(pose.frame, pose).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("second pose for frame {}", pose.frame),
            });
        }
    }
    Ok(map)
}

/// An analyzed record on the ground plane, tagged with its track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedState {
    pub track_id: u64,
    pub class: ObjectClass,
    pub state: BevState,
}

/// Projects every analyzed record to the ground plane, optionally moving it
/// into the world frame. Ignored classes are dropped.
pub fn project_records(records: &[ObservationRecord], poses: Option<&PoseMap>) -> Result<Vec<TrackedState>> {
    records
        .iter()
        .filter(|r| r.class.is_analyzed())
        .map(|r| {
            let mut state = r.to_bev()?;
            if let Some(poses) = poses {
                let pose = poses.get(&r.frame).ok_or(Error::MissingPose(r.frame))?;
                state = apply_ego_pose(&state, pose)?;
            }
            let track_id = u64::try_from(r.track_id)
                .map_err(|_| Error::InvalidRecord(format!("negative track id {}", r.track_id)))?;
            Ok(TrackedState {
                track_id,
                class: r.class,
                state,
            })
        })
        .collect()
}
