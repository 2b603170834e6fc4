//! Forward model of the recorded data: exit wave, free-space transport to
//! the scattering layer, and the residual speckle the layer leaves on the
//! relayed intensity.

mod medium;
mod simulate;
mod stack;

pub use medium::{
    apply_shower_curtain, correlated_gaussian_field, derive_seed, speckle_multiplier,
    DetectorModel, MediumKind, MediumModel, DEFAULT_DYNAMIC_FRAMES,
};
pub use simulate::{simulate_dataset, simulate_dataset_with_detector, simulate_pattern};
pub use stack::PatternStack;
