//! Numerical toolkit for the Riemann zeta function on the critical line.
//!
//! The crate is organised bottom-up:
//!
//! * [`rs_core`] evaluates the Riemann-Siegel theta function, the Hardy
//!   function `Z(t)` and the local oscillator (spectral) form of `Z`.
//! * [`zeros`] scans, verifies, persists and imports zero ordinates and
//!   provides the counting function `N(t)`.
//! * [`argmod`] computes `S(t)`, `S1(t)`, their mean values and the
//!   odd-order roots of `S1`.
//! * [`moments`] estimates window moments of `S1` and the second moment of
//!   `|Z|`.
//! * [`ladder`] builds segment chains, evaluates the oscillatory product
//!   system and searches for factorization configurations.
//!
//! Everything is pure and immutable after construction; the parallel parts
//! (zero scans, candidate grids, window integrals) reduce their results in a
//! fixed order so results do not depend on the thread count.

// `!(x <= tol)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod argmod;
pub mod config;
mod error;
mod gamma;
pub mod ladder;
pub mod moments;
pub mod quad;
pub mod report;
pub mod roots;
pub mod rs_core;
pub mod zeros;

pub use error::{Error, ErrorKind, Result};
pub use rs_core::CriticalT;
pub use zeros::ZeroStore;
