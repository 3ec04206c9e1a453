//! Thermodynamic formalism on subshifts of finite type.
//!
//! Forward computations (pressure, equilibrium states, rotation sets,
//! multifractal entropy spectra of Birkhoff averages), convex duality on
//! grids, entropy-monotone paths of equilibrium states, inverse realization
//! of prescribed spectra and pressure functions by locally constant
//! potentials, and brute-force periodic-orbit oracles.
//!
//! ```
//! use multispec::{sft::Sft, potential::Potential, thermo};
//!
//! let full = Sft::full_shift(2);
//! let phi = Potential::first_symbol(&full);
//! let p = thermo::pressure(&full, &phi, 1.0).unwrap();
//! assert!((p - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convex;
pub mod error;
pub mod io;
pub mod oracle;
pub mod paths;
pub mod perron;
pub mod potential;
pub mod realize;
pub mod sft;
pub mod spectra;
pub mod thermo;

pub use error::{Error, Result};
pub use potential::{PeriodicOrbit, Potential};
pub use sft::{Sft, Word};
