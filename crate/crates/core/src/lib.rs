//! Probabilistic selection engine for motion-correlation interfaces.
//!
//! Targets move along known paths; the user mimics one of them. This crate
//! generates target and input trajectories ([`trajectory`]), scores how
//! similar an input window is to each target window ([`similarity`]), turns
//! those scores into a belief over "which target, if any, is being followed"
//! and decides by entropy ([`inference`]), and offers design-time analyses
//! that quantify how ambiguous a design is before any user data exists
//! ([`analysis`]). File formats live in [`io`].

pub mod analysis;
pub mod error;
pub mod inference;
pub mod io;
pub mod similarity;
pub mod trajectory;

pub use error::{Error, Result};
pub use inference::{BeliefState, Decision, LikelihoodModel, Outcome, UserState};
pub use similarity::{Measure, SimilarityScore};
pub use trajectory::{Direction, Point2, Trajectory, Window};
