//! Poisson approximation via the Chen-Stein method with generalized size-bias
//! couplings, together with the point-process simulators used to check the
//! resulting bounds numerically.
//!
//! The crate is organised bottom-up:
//!
//! * [`poisson_stein`]: Poisson masses in log space, Stein solutions and their
//!   magic-factor bounds.
//! * [`discrete_dist`]: finite integer laws, distances to Poisson and the
//!   Stein discrepancy identity.
//! * [`coupling`]: coupling laws `(X, Z)` and the bounds built from them.
//! * [`pointproc`], [`ustat`], [`interpoint`], [`runs`], [`voronoi`]: samplers
//!   and the applications.

pub mod coupling;
pub mod discrete_dist;
pub mod error;
pub mod grid;
pub mod interpoint;
pub mod mc;
pub mod poisson_stein;
pub mod pointproc;
pub mod report;
pub mod runs;
pub mod selftest;
pub mod ustat;
pub mod voronoi;

pub use error::{Error, Result};

/// Volume of the unit ball in dimension `d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    (half * std::f64::consts::PI.ln() - statrs::function::gamma::ln_gamma(half + 1.0)).exp()
}
