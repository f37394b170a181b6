//! Design-time analyses that quantify how distinguishable a motion design
//! is before any user data exists.

mod design;
mod profile;
mod sweep;

pub use design::{
    capacity_report, lag_profile, pairwise_target_similarity, rotation_sensitivity,
    target_window_start, CapacityRow, RotationConfig, RotationCurve, RotationPoint,
};
pub use profile::{
    entropy_profile, mean_entropy_vs_window, EntropyProfile, ProfileMode, WindowSweep,
    WindowSweepPoint,
};
pub use sweep::{cell_seed, noise_entropy_sweep, NoiseSweepConfig, NoiseSweepPoint};
