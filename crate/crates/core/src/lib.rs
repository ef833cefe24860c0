//! Direct non-blind deconvolution of 1D signals and 2D rasters by
//! shift-cancellation methods.
//!
//! A measuring system with a known, shift-invariant blur kernel `S` turns an
//! impulse response `h` into the observed response `H = S * h`. This crate
//! recovers `h` from `H` and `S` directly, without integral transforms or
//! regularization, using three complementary strategies:
//!
//! * [`step::step_by_step`] — cancels one kernel coefficient per iteration by
//!   subtracting scaled, shifted copies of the data. Exact while the leading
//!   kernel coefficient dominates; diverges past a computable horizon
//!   ([`step::estimate_m_max`]) otherwise.
//! * [`step::modified_doubling`] — for two-term kernels, cancels
//!   exponentially many coefficients per step by doubling the shift width.
//! * [`combined::combined_deconvolve`] — solves a small Toeplitz system for a
//!   linear combination of shifted data copies whose effective kernel is a
//!   unit impulse flanked by zeros. Works for any finite kernel with a
//!   nonsingular shift matrix, including kernels whose maximum is interior,
//!   and degrades gracefully under noise.
//!
//! The [`image`] module lifts all three methods to rasters line by line:
//! axis-parallel blur, uniform-motion (boxcar) deblurring, and separable
//! 2D restoration. [`oracle`] holds deliberately slow reference
//! implementations used to cross-check the fast paths in tests.
//!
//! The crate is `no_std` (requires `alloc`); all operations are pure
//! functions over immutable inputs.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod combined;
pub mod error;
pub mod image;
pub mod oracle;
pub mod signal;
pub mod step;

pub use error::{Error, Result};
pub use signal::{NoiseSpec, Signal1D};
