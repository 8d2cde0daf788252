//! Harmonic extension `P_ω`, the concave transform `κ_ω`, and grid validators for the
//! inequalities relating them to `ω`.

mod poisson;
mod validators;

pub use poisson::{kappa, poisson, Estimate, HarmonicSample, T_FAR};
pub use validators::{dc_log_absorb, est3, mixed_w1, phragmen, subharmonic_mean, w1};
