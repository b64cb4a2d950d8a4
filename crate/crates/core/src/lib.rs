//! Finite cyclic spin-1/2 XYZ chains in a transverse field: ground-state
//! and low-temperature entanglement around the factorizing field.
//!
//! - [`closed_form`]: factorizing field, side-limit concurrences, block
//!   entanglement, mixtures.
//! - [`concurrence`]: pair correlators, reduced two-spin states, Wootters.
//! - [`collective`]: fully connected chain in the maximum-spin block.
//! - [`freefermion`]: nearest-neighbour XY chain via the parity-resolved
//!   Jordan-Wigner solution.
//! - [`oracle`]: exhaustive diagonalization in the full `2^n` space.
//! - [`sector`]: model-independent sector sweeps and thermal mixtures.

pub mod closed_form;
pub mod collective;
pub mod concurrence;
pub mod error;
pub mod freefermion;
pub mod oracle;
pub mod sector;
pub mod spec;
mod tridiag;

pub use error::{Error, Result};
pub use spec::{ChainSpec, Couplings, Parity};
