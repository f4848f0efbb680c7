//! Finite-scale Hausdorff dimension toolkit.
//!
//! * [`grid`]: b-adic occupied-cell sets, scale counts and cover sums.
//! * [`dimension`]: log-log slope estimates and β profiles.
//! * [`frostman`]: cascade measures satisfying `μ(I) <= C |I|^α` on grid cells.
//! * [`walk`]: ±√Δt random walks, level sets, local time, record times, images.
//! * [`experiments`]: seeded Monte-Carlo runs with CSV/JSON reports.

pub mod dimension;
pub mod error;
pub mod experiments;
pub mod frostman;
pub mod grid;
pub mod rng;
pub mod stats;
pub mod walk;

pub use dimension::{estimate_dimension, threshold_profile, DimensionEstimate, ThresholdProfile};
pub use error::{Error, Result};
pub use frostman::{frostman_cascade, CascadeMeasure};
pub use grid::{cantor_set, CantorSpec, GridSet, GridSpec, ScaleCounts};
pub use walk::{sample_walk, LatticePoint, WalkPath};

pub const TOOLKIT_VERSION: &str = concat!("fractal-lab ", env!("CARGO_PKG_VERSION"));
