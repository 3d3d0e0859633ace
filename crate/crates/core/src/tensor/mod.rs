//! Pure states, reduced density matrices and the Hermitian eigensolver.

pub mod density;
pub mod eigen;
pub mod io;
pub mod matrix;
pub mod state;

pub use density::DensityMatrix;
pub use eigen::{eigh, Spectrum};
pub use matrix::{complete_unitary, CMatrix, C64};
pub use state::{flat_index, PureState};
