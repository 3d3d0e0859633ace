use super::eigen::{eigh, Spectrum};
use super::matrix::CMatrix;
use crate::error::{domain, shape, Result};

/// Entrywise Hermiticity tolerance for density matrices.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_FLOOR, 0)` are treated as round-off and clamped.
pub const NEGATIVE_FLOOR: f64 = 1e-10;

/// Hermitian positive semidefinite matrix, usually a reduced state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let scale = matrix
            .as_slice()
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let defect = matrix.hermitian_defect();
        if defect > DENSITY_HERMITIAN_TOL * scale {
            return Err(domain(format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_hermitian_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale((1.0 / dim as f64).into()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigh(&self) -> Result<Spectrum> {
        eigh(&self.matrix)
    }

    /// Eigenvalues, descending, with round-off negatives clamped to zero.
    pub fn clamped_eigenvalues(&self) -> Result<Vec<f64>> {
        clamp_eigenvalues(self.eigh()?.eigenvalues)
    }

    /// `‖ρ − I/d‖_F`.
    pub fn distance_from_maximally_mixed(&self) -> f64 {
        let d = self.dim();
        self.matrix
            .sub(Self::maximally_mixed(d).matrix())
            .map(|m| m.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }
}

pub(crate) fn clamp_eigenvalues(mut values: Vec<f64>) -> Result<Vec<f64>> {
    for l in values.iter_mut() {
        if *l < -NEGATIVE_FLOOR {
            return Err(domain(format!(
                "matrix is not positive semidefinite (eigenvalue {l:e})"
            )));
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::matrix::C64;

    #[test]
    fn clamps_round_off_only() {
        assert_eq!(
            clamp_eigenvalues(vec![1.0, -1e-12]).unwrap(),
            vec![1.0, 0.0]
        );
        assert!(clamp_eigenvalues(vec![1.0, -1e-6]).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn maximally_mixed_distance() {
        let m = DensityMatrix::maximally_mixed(4);
        assert_eq!(m.distance_from_maximally_mixed(), 0.0);
        assert!((m.trace() - 1.0).abs() < 1e-15);
    }
}
