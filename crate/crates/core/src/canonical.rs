//! Canonical form from the closest product state.
//!
//! Alternating maximization of `N = |⟨Ψ|v₀⟩|v₁⟩…|v_{n−1}⟩|²`: with all but one
//! local vector fixed, the optimum for the free party is the normalized
//! contraction of Ψ against the others, so every coordinate step is exact and
//! `N` never decreases. Rotating each local basis so its maximizer becomes
//! `|0⟩` turns the maximizer into `|0…0⟩`; at a stationary point all
//! single-excitation coefficients `t^{0…k…0}` then vanish, since any nonzero
//! one could be rotated into `t^{0…0}` to increase `N`.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, shape, Result};
use crate::random::{haar_vector, stream_rng};
use crate::tensor::io::matrix_to_json;
use crate::tensor::matrix::{dot, norm_sqr, ZERO};
use crate::tensor::{complete_unitary, CMatrix, PureState, C64};

pub const DEFAULT_RESTARTS: usize = 16;
pub const MAX_SWEEPS: usize = 500;
/// Largest single-excitation modulus accepted as canonical.
pub const ZERO_TOL: f64 = 1e-8;
/// Sweeps stop once every party's off-maximizer contraction is this small.
const STOP_RESIDUAL: f64 = 1e-11;
const MAX_RERANDOMIZE: usize = 8;

/// Result of one exact coordinate step.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMaximizer {
    pub vector: PureState,
    /// `‖c‖` of the raw contraction; `N` after the step is its square.
    pub contraction_norm: f64,
    /// Raw contraction before normalization.
    pub contraction: Vec<C64>,
    /// The contraction vanished and `vector` is the first basis vector.
    pub degenerate: bool,
}

/// Contracts every party except `party` against `⟨others|`.
fn contraction(s: &PureState, party: usize, others: &[&[C64]]) -> Result<Vec<C64>> {
    let n = s.parties();
    if party >= n {
        return Err(shape(format!("party {party} out of range for {n} parties")));
    }
    if others.len() + 1 != n {
        return Err(shape(format!(
            "{} fixed vectors for {n} parties (expected {})",
            others.len(),
            n - 1
        )));
    }
    let mut dims = s.dims().to_vec();
    let mut amps = s.amps().to_vec();
    // contract from the last party down so earlier indices stay put
    let fixed: Vec<usize> = (0..n).filter(|&q| q != party).collect();
    for (slot, &q) in fixed.iter().enumerate().rev() {
        let v = others[slot];
        if v.len() != dims[q] {
            return Err(shape(format!(
                "vector of length {} for party {q} of dimension {}",
                v.len(),
                dims[q]
            )));
        }
        let tmp = PureState::new(dims.clone(), amps)?;
        let (d, a) = tmp.contract_raw(q, v)?;
        dims = d;
        amps = a;
    }
    Ok(amps)
}

/// Exact maximizer of `N` over `party` with `others` (one vector per
/// remaining party, in party order) held fixed.
pub fn best_local_vector(
    s: &PureState,
    party: usize,
    others: &[PureState],
) -> Result<LocalMaximizer> {
    let refs: Vec<&[C64]> = others.iter().map(|o| o.amps()).collect();
    if others.iter().any(|o| o.parties() != 1) {
        return Err(shape("fixed vectors must be single-party states"));
    }
    local_step(s, party, &refs)
}

fn local_step(s: &PureState, party: usize, others: &[&[C64]]) -> Result<LocalMaximizer> {
    let c = contraction(s, party, others)?;
    let norm = norm_sqr(&c).sqrt();
    let d = s.dims()[party];
    let (amps, degenerate) = if norm > 1e-300 {
        (c.iter().map(|z| z / norm).collect(), false)
    } else {
        let mut e = vec![ZERO; d];
        e[0] = C64::new(1.0, 0.0);
        (e, true)
    };
    Ok(LocalMaximizer {
        vector: PureState::new(vec![d], amps)?,
        contraction_norm: norm,
        contraction: c,
        degenerate,
    })
}

/// One alternating-maximization run.
#[derive(Debug, Clone)]
struct Run {
    vectors: Vec<Vec<C64>>,
    overlap: f64,
    /// `N` after every coordinate step.
    trace: Vec<f64>,
    residual: f64,
    sweeps: usize,
}

enum RunError {
    Degenerate,
    Fatal(crate::Error),
}

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        RunError::Fatal(e)
    }
}

fn others_of(vectors: &[Vec<C64>], party: usize) -> Vec<&[C64]> {
    vectors
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != party)
        .map(|(_, v)| v.as_slice())
        .collect()
}

fn alternate(s: &PureState, mut vectors: Vec<Vec<C64>>) -> std::result::Result<Run, RunError> {
    let n = s.parties();
    let mut trace = Vec::new();
    let mut overlap = 0.0;
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            let step = local_step(s, p, &others_of(&vectors, p))?;
            if step.degenerate {
                return Err(RunError::Degenerate);
            }
            overlap = step.contraction_norm * step.contraction_norm;
            trace.push(overlap);
            vectors[p] = step.vector.into_amps();
        }
        residual = stationarity_residual(s, &vectors)?;
        if residual < STOP_RESIDUAL {
            break;
        }
    }
    Ok(Run {
        vectors,
        overlap,
        trace,
        residual,
        sweeps,
    })
}

/// Largest norm of a party's contraction orthogonal to its current vector.
fn stationarity_residual(s: &PureState, vectors: &[Vec<C64>]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (p, v) in vectors.iter().enumerate() {
        let c = contraction(s, p, &others_of(vectors, p))?;
        let along = dot(v, &c);
        let r: Vec<C64> = c.iter().zip(v).map(|(ci, vi)| ci - along * vi).collect();
        worst = worst.max(norm_sqr(&r).sqrt());
    }
    Ok(worst)
}

/// Canonical form of a state: transformed amplitudes and the local bases.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    /// `(⊗ₚ Uₚ†) Ψ`.
    pub state: PureState,
    /// `Uₚ`, whose first column is party `p`'s maximizing vector.
    pub local_bases: Vec<CMatrix>,
    /// Maximal product overlap `N`.
    pub overlap: f64,
    /// Largest `|t^{0…k…0}|` over parties and excitations `k ≥ 1`.
    pub zero_residual: f64,
    pub converged: bool,
    /// Largest off-maximizer contraction norm at the last sweep.
    pub stationarity: f64,
    /// `N` after every coordinate step of the winning run.
    pub overlap_trace: Vec<f64>,
    pub sweeps: usize,
    /// Index of the winning start: 0 is the computational start, `k ≥ 1` is
    /// random start `k − 1`.
    pub winning_start: usize,
}

impl CanonicalForm {
    /// The operators applied to the input, `Uₚ†`.
    pub fn local_unitaries(&self) -> Vec<CMatrix> {
        self.local_bases.iter().map(CMatrix::adjoint).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            state: &'a PureState,
            unitaries: Vec<serde_json::Value>,
            bases: Vec<serde_json::Value>,
            overlap: f64,
            zero_residual: f64,
            converged: bool,
            sweeps: usize,
            winning_start: usize,
        }
        serde_json::to_value(Out {
            state: &self.state,
            unitaries: self.local_unitaries().iter().map(matrix_to_json).collect(),
            bases: self.local_bases.iter().map(matrix_to_json).collect(),
            overlap: self.overlap,
            zero_residual: self.zero_residual,
            converged: self.converged,
            sweeps: self.sweeps,
            winning_start: self.winning_start,
        })
        .expect("serializable")
    }
}

/// Largest single-excitation modulus of a state.
pub fn single_excitation_residual(s: &PureState) -> f64 {
    let n = s.parties();
    let mut worst = 0.0_f64;
    for p in 0..n {
        for k in 1..s.dims()[p] {
            let mut digits = vec![0; n];
            digits[p] = k;
            let z = s.amp(&digits).expect("valid digits");
            worst = worst.max(z.norm());
        }
    }
    worst
}

fn random_product<R: Rng>(rng: &mut R, dims: &[usize]) -> Vec<Vec<C64>> {
    dims.iter().map(|&d| haar_vector(rng, d)).collect()
}

/// Alternating maximization from the computational start plus `restarts`
/// random product starts; the largest `N` wins (earliest start on ties).
pub fn canonicalize(s: &PureState, restarts: usize, seed: u64) -> Result<CanonicalForm> {
    if restarts == 0 {
        return Err(domain("restarts must be at least 1"));
    }
    if !s.is_normalized() {
        return Err(domain("canonicalize needs a normalized state"));
    }
    let dims = s.dims().to_vec();
    let mut best: Option<(usize, Run)> = None;
    for start in 0..=restarts {
        let mut rng = stream_rng(seed, start as u64);
        let mut vectors = if start == 0 {
            dims.iter()
                .map(|&d| {
                    let mut e = vec![ZERO; d];
                    e[0] = C64::new(1.0, 0.0);
                    e
                })
                .collect()
        } else {
            random_product(&mut rng, &dims)
        };
        let mut attempt = 0;
        let run = loop {
            match alternate(s, vectors) {
                Ok(run) => break Some(run),
                Err(RunError::Fatal(e)) => return Err(e),
                Err(RunError::Degenerate) => {
                    attempt += 1;
                    if attempt > MAX_RERANDOMIZE {
                        break None;
                    }
                    vectors = random_product(&mut rng, &dims);
                }
            }
        };
        if let Some(run) = run {
            let better = best.as_ref().map_or(true, |(_, b)| run.overlap > b.overlap);
            if better {
                best = Some((start, run));
            }
        }
    }
    let (winning_start, mut run) =
        best.ok_or_else(|| domain("every start hit a vanishing contraction"))?;

    // rotate party 0's vector so that ⟨v₀…v_{n−1}|Ψ⟩ is real and positive
    let refs = others_of(&run.vectors, 0);
    let amp = dot(&run.vectors[0], &contraction(s, 0, &refs)?);
    if amp.norm() > 0.0 {
        let phase = amp / amp.norm();
        for z in run.vectors[0].iter_mut() {
            *z *= phase;
        }
    }

    let local_bases = run
        .vectors
        .iter()
        .map(|v| complete_unitary(v))
        .collect::<Result<Vec<_>>>()?;
    let mut state = s.clone();
    for (p, u) in local_bases.iter().enumerate() {
        state = state.apply_local_matrix(p, &u.adjoint());
    }
    let origin = vec![0; dims.len()];
    let idx = state.index_of(&origin)?;
    let mut amps = state.into_amps();
    // the origin amplitude is real up to rounding
    amps[idx] = C64::new(amps[idx].re.max(0.0), 0.0);
    let state = PureState::new(dims, amps)?;
    let zero_residual = single_excitation_residual(&state);
    Ok(CanonicalForm {
        state,
        local_bases,
        overlap: run.overlap,
        zero_residual,
        converged: zero_residual < ZERO_TOL,
        stationarity: run.residual,
        overlap_trace: run.trace,
        sweeps: run.sweeps,
        winning_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make, CatalogId};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(amps: &[f64]) -> PureState {
        PureState::from_real(vec![amps.len()], amps).unwrap()
    }

    #[test]
    fn product_state_step() {
        let s = PureState::zeros(4).unwrap();
        let zero = ket(&[1.0, 0.0]);
        let m = best_local_vector(&s, 0, &[zero.clone(), zero.clone(), zero]).unwrap();
        assert_eq!(m.vector, ket(&[1.0, 0.0]));
        assert!(!m.degenerate);
    }

    #[test]
    fn bell_state_steps() {
        let c2 = make(CatalogId::C2).unwrap();
        let m = best_local_vector(&c2, 0, &[ket(&[1.0, 0.0])]).unwrap();
        assert_eq!(m.vector, ket(&[1.0, 0.0]));
        assert!((m.contraction_norm - FRAC_1_SQRT_2).abs() < 1e-15);
        let plus = ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let m = best_local_vector(&c2, 0, &[plus.clone()]).unwrap();
        assert!((m.vector.inner(&plus).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_contraction_flagged() {
        let c2 = make(CatalogId::C2).unwrap();
        // |01⟩ contracted with ⟨0| on B vanishes
        let s = PureState::from_real(vec![2, 2], &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = best_local_vector(&s, 0, &[ket(&[1.0, 0.0])]).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.vector, ket(&[1.0, 0.0]));
        assert!(best_local_vector(&c2, 0, &[ket(&[1.0, 0.0, 0.0])]).is_err());
        assert!(best_local_vector(&c2, 0, &[]).is_err());
    }

    #[test]
    fn product_state_is_fixed() {
        let s = PureState::zeros(4).unwrap();
        let c = canonicalize(&s, 2, 0).unwrap();
        assert!((c.overlap - 1.0).abs() < 1e-15);
        assert!(c.state.max_abs_diff(&s) < 1e-15);
        assert!(c.converged);
    }

    #[test]
    fn cat_state_is_already_canonical() {
        let s = make(CatalogId::CatN(4)).unwrap();
        let c = canonicalize(&s, DEFAULT_RESTARTS, 1).unwrap();
        assert!((c.overlap - 0.5).abs() < 1e-8);
        assert!(c.zero_residual < 1e-8);
        // identities up to phase on each party
        for u in &c.local_bases {
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-6 || (u[(1, 0)].norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = make(CatalogId::M4).unwrap();
        assert!(canonicalize(&s, 0, 0).is_err());
        assert!(canonicalize(&s.scaled(C64::new(2.0, 0.0)), 1, 0).is_err());
    }
}
