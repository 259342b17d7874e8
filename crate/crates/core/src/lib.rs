//! Sampling from the invariant (Haar) measure of the classical compact groups
//! SO(N), O(N), U(N), Sp(2N) and of the symmetric group S_N.
//!
//! Every group has more than one independent construction: Euler-angle
//! products with independent beta-distributed angles, Gaussian QR, and chains
//! of Householder reflections. The `analytics` module carries the closed
//! forms (entry moments, group volumes, circular-ensemble normalizations) the
//! samplers are checked against, and `verify` bundles those checks into a
//! reproducible suite.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod euler;
pub mod linalg;
pub mod rng;
pub mod samplers;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{EigenPhaseList, Kind, SquareMatrix, C64};
pub use rng::RandomStream;
