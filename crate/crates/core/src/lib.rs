//! Exact harmonic analysis on the dyadic half-line.
//!
//! The half-line `[0, ∞)` carries digitwise binary addition `⊕`; its
//! characters are the Walsh functions. This crate works with points that have
//! terminating binary expansions and with step functions on dyadic intervals,
//! so every value, integral, and transform is computed exactly:
//!
//! - [`dyadic`]: points, digits, `⊕`, Walsh functions and the kernel `ψ`.
//! - [`stepfn`]: dyadic step functions and their linear structure.
//! - [`wft`]: the Walsh–Fourier transform (fast butterfly and direct sum).
//! - [`refine`]: masks, the transition operator, cascade iteration, and the
//!   product formula for the transform of the refinable function.
//! - [`theorem1`]: exact audit of the transform of `x·χ_[0,1)` and the
//!   divergent pairing built from it.
//! - [`io`]: CSV and JSON formats.

pub mod dyadic;
pub mod error;
pub mod io;
pub mod refine;
pub mod scalar;
pub mod stepfn;
pub mod theorem1;
pub mod wft;

pub use dyadic::{bit, dyadic_add, pairing, psi, walsh, DyadicInterval, DyadicRational};
pub use error::{Error, Result};
pub use refine::Mask;
pub use scalar::ExactScalar;
pub use stepfn::{inner, linear_combine, pointwise_mul, Dilation, StepFunction};
pub use wft::{moment_integral, wft, wft_direct};
