use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::matrix::{dot, norm_sqr, CMatrix, C64, ONE, ZERO};
use crate::error::{domain, shape, Error, Result};

/// Maximum number of parties a state may have.
pub const MAX_PARTIES: usize = 8;
/// `|⟨Ψ|Ψ⟩ − 1|` below which a state counts as normalized.
pub const NORM_TOL: f64 = 1e-12;
/// `‖U†U − I‖_F` accepted for local unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Pure state of `n` parties with local dimensions `dims`.
///
/// Amplitudes are stored row-major with party 0 most significant, so for four
/// parties `t^{ijkl}` sits at `((i·d₁ + j)·d₂ + k)·d₃ + l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "super::io::StateFile", into = "super::io::StateFile")]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_PARTIES {
            return Err(shape(format!(
                "party count {} outside 1..={MAX_PARTIES}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(shape(format!("local dimension {d} is below 2")));
        }
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(shape(format!(
                "{} amplitudes for dims {:?} (expected {len})",
                amps.len(),
                dims
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(domain("amplitudes must be finite"));
        }
        Ok(Self { dims, amps })
    }

    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        Self::new(dims, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis ket `|digits⟩`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let len: usize = dims.iter().product();
        let idx = flat_index(&dims, digits)?;
        let mut amps = vec![ZERO; len];
        amps[idx] = ONE;
        Self::new(dims, amps)
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::basis(vec![2; n], &vec![0; n])
    }

    /// Builds a state from `(coefficient, digits)` terms.
    pub fn from_terms(dims: Vec<usize>, terms: &[(C64, &[usize])]) -> Result<Self> {
        let len: usize = dims.iter().product();
        let mut amps = vec![ZERO; len];
        for (c, digits) in terms {
            amps[flat_index(&dims, digits)?] += c;
        }
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude `t^{digits}`.
    pub fn amp(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amps[flat_index(&self.dims, digits)?])
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        flat_index(&self.dims, digits)
    }

    pub fn digits_of(&self, index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        let mut rest = index;
        for (k, &d) in self.dims.iter().enumerate().rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        digits
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(domain("cannot normalize the zero vector"));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| z * k).collect(),
        }
    }

    /// Same dims, new amplitudes. Length must match.
    pub fn with_amps(&self, amps: Vec<C64>) -> Result<Self> {
        Self::new(self.dims.clone(), amps)
    }

    /// Largest amplitude-wise distance; infinite for different dims.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dims != other.dims {
            return Err(shape(format!(
                "inner product of dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(dot(&self.amps, &other.amps))
    }

    /// Complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(C64::conj).collect(),
        }
    }

    /// Kronecker product of the parts, party order preserved.
    pub fn tensor_product(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| domain("tensor product of an empty list"))?;
        let mut dims = first.dims.clone();
        let mut amps = first.amps.clone();
        for p in rest {
            dims.extend_from_slice(&p.dims);
            amps = amps
                .iter()
                .flat_map(|a| p.amps.iter().map(move |b| a * b))
                .collect();
        }
        Self::new(dims, amps)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::tensor_product(&[self.clone(), other.clone()])
    }

    fn check_party(&self, party: usize) -> Result<()> {
        if party >= self.dims.len() {
            return Err(shape(format!(
                "party {party} out of range for {} parties",
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Layout helper: (outer count, local dim, inner stride) for one party.
    fn party_layout(&self, party: usize) -> (usize, usize, usize) {
        let d = self.dims[party];
        let stride: usize = self.dims[party + 1..].iter().product();
        (self.amps.len() / (d * stride), d, stride)
    }

    /// Applies `u` to one party's index.
    pub fn apply_local_unitary(&self, party: usize, u: &CMatrix) -> Result<Self> {
        self.check_party(party)?;
        let d = self.dims[party];
        if u.rows() != d || u.cols() != d {
            return Err(shape(format!(
                "local operator is {}x{}, party {party} has dimension {d}",
                u.rows(),
                u.cols()
            )));
        }
        u.ensure_unitary(UNITARY_TOL)?;
        Ok(self.apply_local_matrix(party, u))
    }

    /// Applies a unitary on every party; `unitaries[p]` acts on party `p`.
    pub fn apply_local_unitaries(&self, unitaries: &[CMatrix]) -> Result<Self> {
        if unitaries.len() != self.parties() {
            return Err(shape("one unitary per party required"));
        }
        unitaries
            .iter()
            .enumerate()
            .try_fold(self.clone(), |s, (p, u)| s.apply_local_unitary(p, u))
    }

    pub(crate) fn apply_local_matrix(&self, party: usize, u: &CMatrix) -> Self {
        let (outer, d, stride) = self.party_layout(party);
        let mut out = vec![ZERO; self.amps.len()];
        let mut x = vec![ZERO; d];
        for o in 0..outer {
            let base = o * d * stride;
            for r in 0..stride {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = self.amps[base + i * stride + r];
                }
                for i in 0..d {
                    let mut acc = ZERO;
                    for (j, xj) in x.iter().enumerate() {
                        acc += u[(i, j)] * xj;
                    }
                    out[base + i * stride + r] = acc;
                }
            }
        }
        Self {
            dims: self.dims.clone(),
            amps: out,
        }
    }

    /// Contracts party `party` against `⟨v|`, returning the (unnormalized)
    /// vector on the remaining parties as raw dims and amplitudes.
    pub(crate) fn contract_raw(&self, party: usize, v: &[C64]) -> Result<(Vec<usize>, Vec<C64>)> {
        self.check_party(party)?;
        let (outer, d, stride) = self.party_layout(party);
        if v.len() != d {
            return Err(shape(format!(
                "contraction vector of length {} against party dimension {d}",
                v.len()
            )));
        }
        let mut out = vec![ZERO; outer * stride];
        for o in 0..outer {
            for r in 0..stride {
                out[o * stride + r] = (0..d)
                    .map(|i| v[i].conj() * self.amps[o * d * stride + i * stride + r])
                    .sum();
            }
        }
        let mut dims = self.dims.clone();
        dims.remove(party);
        Ok((dims, out))
    }

    /// Matrix view with `row_parties` (in the given order) as the row index
    /// and the remaining parties, ascending, as the column index.
    pub fn matricize(&self, row_parties: &[usize]) -> Result<CMatrix> {
        let n = self.parties();
        let mut seen = vec![false; n];
        for &p in row_parties {
            if p >= n || seen[p] {
                return Err(domain(format!("invalid row party set {row_parties:?}")));
            }
            seen[p] = true;
        }
        let col_parties: Vec<usize> = (0..n).filter(|&p| !seen[p]).collect();
        let rows: usize = row_parties.iter().map(|&p| self.dims[p]).product();
        let cols: usize = col_parties.iter().map(|&p| self.dims[p]).product();
        let mut m = CMatrix::zeros(rows, cols);
        let mut digits = vec![0usize; n];
        for &z in &self.amps {
            let r = row_parties
                .iter()
                .fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            let c = col_parties
                .iter()
                .fold(0, |acc, &p| acc * self.dims[p] + digits[p]);
            m[(r, c)] = z;
            // odometer increment, last party fastest
            for k in (0..n).rev() {
                digits[k] += 1;
                if digits[k] < self.dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Ok(m)
    }

    /// Inverse of [`matricize`](Self::matricize).
    pub fn from_matricized(dims: &[usize], row_parties: &[usize], m: &CMatrix) -> Result<Self> {
        let n = dims.len();
        let col_parties: Vec<usize> = (0..n).filter(|p| !row_parties.contains(p)).collect();
        let len: usize = dims.iter().product();
        if m.rows() * m.cols() != len {
            return Err(shape("matrix size does not match dims"));
        }
        let mut amps = vec![ZERO; len];
        let mut digits = vec![0usize; n];
        for amp in amps.iter_mut() {
            let r = row_parties
                .iter()
                .fold(0, |acc, &p| acc * dims[p] + digits[p]);
            let c = col_parties
                .iter()
                .fold(0, |acc, &p| acc * dims[p] + digits[p]);
            *amp = m[(r, c)];
            for k in (0..n).rev() {
                digits[k] += 1;
                if digits[k] < dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Self::new(dims.to_vec(), amps)
    }

    /// Reduced density matrix on `keep` (kept parties in ascending order).
    ///
    /// The trace equals `⟨Ψ|Ψ⟩`, so callers wanting a unit-trace matrix pass a
    /// normalized state.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.len() >= self.parties() {
            return Err(domain(format!(
                "keep set {keep:?} must be a nonempty proper subset of {} parties",
                self.parties()
            )));
        }
        if keep.iter().any(|&p| p >= self.parties()) {
            return Err(domain(format!("keep set {keep:?} names a missing party")));
        }
        Ok(DensityMatrix::from_hermitian_unchecked(
            self.matricize(&keep)?.gram(),
        ))
    }
}

impl TryFrom<(Vec<usize>, Vec<C64>)> for PureState {
    type Error = Error;

    fn try_from((dims, amps): (Vec<usize>, Vec<C64>)) -> Result<Self> {
        Self::new(dims, amps)
    }
}

/// Row-major flat index of a multi-index.
pub fn flat_index(dims: &[usize], digits: &[usize]) -> Result<usize> {
    if digits.len() != dims.len() {
        return Err(shape(format!(
            "multi-index {digits:?} has wrong length for dims {dims:?}"
        )));
    }
    digits.iter().zip(dims).try_fold(0, |acc, (&i, &d)| {
        if i < d {
            Ok(acc * d + i)
        } else {
            Err(shape(format!("digit {i} out of range for dimension {d}")))
        }
    })
}
