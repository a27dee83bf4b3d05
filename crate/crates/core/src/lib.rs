//! Reed-Muller codes with permutation-stable dynamic frozen bits.
//!
//! The crate builds `R(r, n)` based pre-transformed polar codes whose
//! dynamic freezing constraints stay invariant under the coordinate
//! permutations of `BLTA(n-1, 1) ∩ PL`, decodes them with SC, SCL and
//! automorphism ensemble SCL, and provides the analysis tools used to
//! characterize them: weight spectra, truncated union bounds, memory
//! accounting and Monte Carlo block error rates.

pub mod analysis;
pub mod autgroup;
pub mod cli;
pub mod codespec;
pub mod encdec;
pub mod error;
pub mod gf2;
pub mod sim;

pub use error::{Error, Result};
