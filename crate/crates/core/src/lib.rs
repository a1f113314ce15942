//! Weighted Bergman kernels, Bergman-type projections and Bloch-seminorm
//! diagnostics on the unit ball of `C^n`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, the command line or report serialization lives in the
//! `bergman-lab` companion crate.
//!
//! Module map:
//!
//! * [`weights`]: radial weights, tail integrals, the memoized moment table and
//!   the doubling-class diagnostics.
//! * [`quadrature`]: graded adaptive Gauss-Kronrod integration, disk and sphere
//!   reductions, polar integration over the ball.
//! * [`kernel`]: the reproducing-kernel power series and its relatives, with
//!   rigorous truncation.
//! * [`projection`]: the Bergman-type projection of bounded symbols and the
//!   monomial reproducing-property check.
//! * [`analysis`]: the boundedness functional, the majorant, the Cesàro lower
//!   bound, Hardy-Littlewood checks and the combined theorem check.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod fft;
pub mod kernel;
pub mod projection;
pub mod quadrature;
pub mod special;
pub mod trend;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
