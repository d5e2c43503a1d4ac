//! Synthetic data: pick-up-sticks (STIX) images, a gland point-cloud
//! stand-in, and the experiment drivers built on them.
//!
//! The gland generator is a deliberately simple substitute for a full gland
//! synthesizer: points on a jittered circle mixed with uniform clutter.

mod experiment;
mod gland;
mod stix;

pub use experiment::{
    gland_experiment, stix_experiment, GlandExperiment, GlandReport, StixExperiment, StixTable, GLAND_TYPES,
};
pub use gland::{gland, GlandConfig};
pub use stix::{stix, stix_sticks, Raster, Stick, StixConfig, REFERENCE_WIDTH};
