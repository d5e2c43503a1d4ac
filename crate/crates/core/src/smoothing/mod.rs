//! Turning raw data into scalar fields: kernel density estimates of point
//! clouds and local quadratic smoothing of images.

mod kde;
mod loess;

pub use kde::{kde, point_cloud_diagram, KdeSpec};
pub use loess::{loess_smooth, LoessSpec, MIN_NEIGHBORS};
