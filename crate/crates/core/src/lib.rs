//! Topological summaries of images and point clouds, and statistics on them.
//!
//! The pipeline runs field (or point cloud → KDE field) → superlevel
//! persistence diagram → functional summary on a shared grid → inference
//! (means, bootstrap bands, prediction bands, permutation tests) or learning
//! (kNN with leave-one-out selection, distance matrices, classical MDS).
//! [`simulate`] provides the pick-up-sticks image generator and a simple
//! gland point-cloud generator for end-to-end experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod error;
pub mod homology;
pub mod inference;
pub mod io;
pub mod kernel;
pub mod learn;
pub mod par;
pub mod rng;
pub mod simulate;
pub mod smoothing;
pub mod summaries;
pub mod types;

pub use error::{Error, Result};
pub use kernel::Kernel;
pub use types::{
    canonicalize_superlevel, filter_by_dim, CurveParams, DiagramPoint, Extent, Grid1D, MetricSpec,
    MetricWeight, Orientation, PersistenceDiagram, PointCloud, ScalarField, SummaryCurve, SummaryKind,
};
