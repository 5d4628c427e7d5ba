//! Road-safety analysis of multi-object tracking output in the KITTI tracking
//! format.
//!
//! The crate covers the whole path from label files to safety numbers:
//!
//! * [`kitti_io`] parses label and ego-pose files and projects 3D boxes onto
//!   the ground plane (bird's-eye view).
//! * [`trajectory`] builds per-track trajectories and post-processes them
//!   (gap splitting, linear interpolation, stationary smoothing, velocity
//!   estimation).
//! * [`geometry`] holds oriented-rectangle overlap tests and the
//!   constant-velocity time-to-collision (TTC) search.
//! * [`safety`] enumerates pairwise interactions, computes TTC series and
//!   severity counts.
//! * [`assignment`] and [`mot`] implement CLEAR MOT evaluation.
//! * [`stats`] and [`report`] compare TTC distributions and export tables.
//! * [`pipeline`] wires everything together per sequence.

pub mod assignment;
pub mod error;
pub mod geometry;
pub mod kitti_io;
pub mod mot;
pub mod pipeline;
pub mod report;
pub mod safety;
pub mod stats;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{BevBox, TtcConfig, Vec2};
pub use kitti_io::{BevState, EgoPose, ObjectClass, ObservationRecord};
pub use safety::{Category, Interaction, SeverityCounts};
pub use trajectory::{PostProcessConfig, Trajectory};
