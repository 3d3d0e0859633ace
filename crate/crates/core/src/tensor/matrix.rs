//! Small dense complex matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{domain, shape, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real-valued rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(shape("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(shape("columns differ in length"));
        }
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · self†`, always Hermitian.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let ri = &self.data[i * self.cols..(i + 1) * self.cols];
                let rj = &self.data[j * self.cols..(j + 1) * self.cols];
                let v: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape("matrix shapes differ"));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut g = self.adjoint().matmul(self).expect("square");
        for i in 0..self.rows {
            g[(i, i)] -= ONE;
        }
        g.frobenius_norm()
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect < tol {
            Ok(())
        } else {
            Err(domain(format!("matrix is not unitary (defect {defect:e})")))
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `⟨a|b⟩` for plain amplitude slices.
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Completes `first` to a unitary by Gram–Schmidt against the computational
/// basis, skipping the basis vector with the largest overlap on `first`.
/// Column 0 of the result is `first / ‖first‖`.
pub fn complete_unitary(first: &[C64]) -> Result<CMatrix> {
    let d = first.len();
    let n = norm_sqr(first).sqrt();
    if d == 0 || !(n > 0.0) || !n.is_finite() {
        return Err(domain("cannot complete a zero vector to a unitary"));
    }
    let mut columns: Vec<Vec<C64>> = vec![first.iter().map(|z| z / n).collect()];
    let skip = (0..d)
        .fold((0, -1.0), |(best, mag), k| {
            let m = columns[0][k].norm();
            if m > mag {
                (k, m)
            } else {
                (best, mag)
            }
        })
        .0;
    for k in (0..d).filter(|&k| k != skip) {
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for c in &columns {
                let p = dot(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let vn = norm_sqr(&v).sqrt();
        columns.push(v.into_iter().map(|z| z / vn).collect());
    }
    CMatrix::from_columns(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_is_hermitian() {
        let m = CMatrix::from_row_major(
            2,
            3,
            vec![
                C64::new(1.0, 2.0),
                C64::new(0.5, -1.0),
                C64::new(0.0, 0.3),
                C64::new(-2.0, 0.0),
                C64::new(0.1, 0.1),
                C64::new(3.0, -0.5),
            ],
        )
        .unwrap();
        let g = m.gram();
        let direct = m.matmul(&m.adjoint()).unwrap();
        assert!(g.max_abs_diff(&direct) < 1e-14);
        assert_eq!(g.hermitian_defect(), 0.0);
    }

    #[test]
    fn completion_is_unitary_with_given_first_column() {
        let first = vec![C64::new(0.3, 0.4), C64::new(-0.2, 0.1), C64::new(0.0, 0.8)];
        let u = complete_unitary(&first).unwrap();
        assert!(u.unitarity_defect() < 1e-13);
        let n = norm_sqr(&first).sqrt();
        for (k, z) in first.iter().enumerate() {
            assert!((u[(k, 0)] - z / n).norm() < 1e-15);
        }
    }

    #[test]
    fn completion_of_basis_vector_is_permutation() {
        let u = complete_unitary(&[ZERO, ONE]).unwrap();
        assert_eq!(u[(1, 0)], ONE);
        assert_eq!(u[(0, 1)], ONE);
    }

    #[test]
    fn zero_vector_cannot_be_completed() {
        assert!(complete_unitary(&[ZERO, ZERO]).is_err());
    }
}
