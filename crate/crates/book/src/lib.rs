// Compiles the guide under book/src so every listing runs as a doctest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/kitti-format.md")]
pub mod kitti_format {}

#[doc = include_str!("../../../book/src/post-processing.md")]
pub mod post_processing {}

#[doc = include_str!("../../../book/src/geometry-ttc.md")]
pub mod geometry_ttc {}

#[doc = include_str!("../../../book/src/safety-indicators.md")]
pub mod safety_indicators {}

#[doc = include_str!("../../../book/src/clear-mot.md")]
pub mod clear_mot {}

#[doc = include_str!("../../../book/src/distributions.md")]
pub mod distributions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
