//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use serde::Serialize;

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{domain, shape, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Entrywise `|M − M†|` accepted on input, relative to the largest entry (floor 1).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition `M = V Λ V†` with eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, w) in weights.iter().enumerate() {
                    acc += v[(i, k)] * v[(j, k)].conj() * *w;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues are returned in descending order (stable with respect to the
/// order in which the sweeps leave them on the diagonal) and each eigenvector
/// has its largest-magnitude component made real and positive.
pub fn eigh(m: &CMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(shape(format!(
            "eigh needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let scale = m.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(domain("matrix has non-finite entries"));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(domain(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }

    // Work on the exactly Hermitian part.
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
        a[(i, i)].im = 0.0;
    }
    let mut v = CMatrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= tol {
        return Err(domain("Jacobi sweeps did not converge"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut columns = Vec::with_capacity(n);
    for &i in &order {
        let mut col = v.column(i);
        fix_phase(&mut col);
        columns.push(col);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: CMatrix::from_columns(&columns)?,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `A ← J† A J`, `V ← V J` with `J` chosen to annihilate `a[p][q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let b = beta.norm();
    if b == 0.0 {
        return;
    }
    let phase = beta / b;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is 1 for +0.0, which is the convention we want.
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

fn fix_phase(col: &mut [C64]) {
    let mut best = 0;
    let mut mag = -1.0;
    for (k, z) in col.iter().enumerate() {
        if z.norm() > mag {
            mag = z.norm();
            best = k;
        }
    }
    if mag > 0.0 {
        let ph = col[best].conj() / mag;
        for z in col.iter_mut() {
            *z *= ph;
        }
        col[best].im = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian(n: usize, seed: u64) -> CMatrix {
        // small deterministic LCG keeps the test free of rand plumbing
        let mut x = seed;
        let mut next = || {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(next(), 0.0);
            for j in i + 1..n {
                let z = C64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn scalar_matrix() {
        let m = CMatrix::identity(4).scale(C64::new(0.25, 0.0));
        let s = eigh(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![0.25; 4]);
        assert_eq!(s.eigenvectors, CMatrix::identity(4));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        for n in [1, 2, 3, 4, 8, 16] {
            for seed in 0..5 {
                let m = hermitian(n, seed * 31 + n as u64);
                let s = eigh(&m).unwrap();
                assert!(s.reconstruct().sub(&m).unwrap().frobenius_norm() < 1e-10);
                assert!(s.eigenvectors.unitarity_defect() < 1e-10);
                assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn pauli_y() {
        let m = CMatrix::from_row_major(
            2,
            2,
            vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
        )
        .unwrap();
        let s = eigh(&m).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        // largest component real positive
        let v0 = s.eigenvectors.column(0);
        assert!(v0[0].im.abs() < 1e-15 && v0[0].re > 0.0);
    }

    #[test]
    fn deterministic() {
        let m = hermitian(6, 99);
        assert_eq!(eigh(&m).unwrap(), eigh(&m).unwrap());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(eigh(&m), Err(crate::Error::Domain(_))));
        assert!(matches!(
            eigh(&CMatrix::zeros(2, 3)),
            Err(crate::Error::Shape(_))
        ));
    }
}
