//! Construction, analysis, canonicalization and numerical optimization of
//! pure states of small multipartite systems.
//!
//! The centre of the crate is the four-qubit question of how large the
//! average two-pair entanglement entropy can be. [`catalog`] builds the named
//! states, [`metrics`] evaluates pair entropies, [`optimizer`] climbs the
//! average entropy on the unit sphere, [`ame`] measures how far a state is
//! from having every pair maximally mixed, [`canonical`] computes the
//! closest-product-state canonical form and [`measurement`] studies the
//! effect of measuring a single party. [`verify`] bundles the end-to-end
//! acceptance checks.

pub mod ame;
pub mod canonical;
pub mod catalog;
pub mod error;
pub mod measurement;
pub mod metrics;
pub mod optimizer;
pub mod random;
pub mod sphere;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use tensor::{CMatrix, DensityMatrix, PureState, Spectrum, C64};
