//! Maximization of the average two-pair entropy ⟨E₂⟩ of four qubits.
//!
//! ⟨E₂⟩ is the mean of the six pair entropies, which equals the mean over the
//! three pairs containing party A because complementary pairs share their
//! nonzero spectrum. For a vector ψ that is not necessarily normalized, each
//! pair term `E_P(ψ) = −tr ρ_P log₂ ρ_P` with `ρ_P = tr_{P̄}|ψ⟩⟨ψ|` has
//!
//! ```text
//! dE_P = −tr[dρ_P (log₂ ρ_P + log₂e · I)] = Re⟨g_P|dψ⟩,
//! g_P  = −2 (L_P ⊗ I_{P̄}) ψ,   L_P = log₂ ρ_P + log₂e · I,
//! ```
//!
//! which is the Euclidean gradient used by the ascent. The logarithm clamps
//! eigenvalues at `spectral_floor`; since ψ lies in the support of ρ_P the
//! clamp never changes `g_P` at the evaluation point itself.

use std::f64::consts::LOG2_E;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::catalog::{make, CatalogId};
use crate::error::{domain, Result};
use crate::metrics::{fingerprint_distance, profile, EntropyProfile, PairLabel};
use crate::random::{haar_state, stream_rng};
use crate::sphere::{optimize, tangent_project, AscentConfig, Sense, SphereObjective, Trajectory};
use crate::tensor::matrix::{dot, norm_sqr, C64};
use crate::tensor::{eigh, PureState};

pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-12;
pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

/// `1 + ½ log₂ 3`, the pair entropy of every pair of |M4⟩.
pub fn m4_pair_entropy() -> f64 {
    1.0 + 0.5 * 3f64.log2()
}

fn check_four_qubits(s: &PureState) -> Result<()> {
    if s.dims() != [2, 2, 2, 2] {
        return Err(domain(format!(
            "expected four qubits, got dims {:?}",
            s.dims()
        )));
    }
    Ok(())
}

/// ⟨E₂⟩ of a normalized four-qubit state.
pub fn avg_pair_entropy(s: &PureState) -> Result<f64> {
    check_four_qubits(s)?;
    Ok(profile(s)?.average())
}

/// `(L_P ⊗ I) ψ` and `E_P(ψ)` for the unnormalized extension.
fn pair_log_action(psi: &PureState, pair: PairLabel, floor: f64) -> Result<(Vec<C64>, f64)> {
    let rows = pair.parties();
    let m = psi.matricize(&rows)?;
    let spectrum = eigh(&m.gram())?;
    let value = spectrum
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum();
    let log = spectrum.map(|l| l.max(floor).log2() + LOG2_E);
    let lm = log.matmul(&m)?;
    let out = PureState::from_matricized(psi.dims(), &rows, &lm)?;
    Ok((out.into_amps(), value))
}

/// Per-pair Euclidean gradient `g_P = −2 (L_P ⊗ I) ψ` for the three A-pairs.
pub fn pair_gradients(psi: &PureState, floor: f64) -> Result<Vec<(PairLabel, Vec<C64>)>> {
    check_four_qubits(psi)?;
    PairLabel::WITH_A
        .iter()
        .map(|&p| {
            let (v, _) = pair_log_action(psi, p, floor)?;
            Ok((p, v.into_iter().map(|z| z * -2.0).collect()))
        })
        .collect()
}

/// ⟨E₂⟩ extended to arbitrary nonzero vectors via unnormalized reduced
/// matrices. Agrees with [`avg_pair_entropy`] on the unit sphere.
pub fn extended_avg_entropy(psi: &PureState) -> Result<f64> {
    check_four_qubits(psi)?;
    let mut total = 0.0;
    for p in PairLabel::WITH_A {
        total += pair_log_action(psi, p, DEFAULT_SPECTRAL_FLOOR)?.1;
    }
    Ok(total / 3.0)
}

/// ⟨E₂⟩ as a sphere objective.
#[derive(Debug, Clone, Copy)]
pub struct AvgPairEntropy {
    pub spectral_floor: f64,
}

impl Default for AvgPairEntropy {
    fn default() -> Self {
        Self {
            spectral_floor: DEFAULT_SPECTRAL_FLOOR,
        }
    }
}

impl SphereObjective for AvgPairEntropy {
    fn value(&self, s: &PureState) -> Result<f64> {
        avg_pair_entropy(s)
    }

    fn euclidean_gradient(&self, s: &PureState) -> Result<Vec<C64>> {
        let mut g = vec![C64::new(0.0, 0.0); s.len()];
        for (_, gp) in pair_gradients(s, self.spectral_floor)? {
            for (acc, z) in g.iter_mut().zip(gp) {
                *acc += z / 3.0;
            }
        }
        Ok(g)
    }
}

/// Tangent-projected gradient of ⟨E₂⟩ at a normalized state.
pub fn entropy_gradient(s: &PureState) -> Result<PureState> {
    entropy_gradient_with_floor(s, DEFAULT_SPECTRAL_FLOOR)
}

pub fn entropy_gradient_with_floor(s: &PureState, floor: f64) -> Result<PureState> {
    let objective = AvgPairEntropy {
        spectral_floor: floor,
    };
    let g = objective.euclidean_gradient(s)?;
    s.with_amps(tangent_project(s.amps(), &g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptConfig {
    pub seed: u64,
    pub restarts: usize,
    #[serde(flatten)]
    pub ascent: AscentConfig,
    pub spectral_floor: f64,
    /// Fingerprint tolerance for classifying a result as |M4⟩-like.
    pub match_tol: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 20,
            ascent: AscentConfig::default(),
            spectral_floor: DEFAULT_SPECTRAL_FLOOR,
            match_tol: DEFAULT_MATCH_TOL,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        let a = &self.ascent;
        let positive = [
            ("grad_tol", a.grad_tol),
            ("initial_step", a.initial_step),
            ("max_step", a.max_step),
            ("min_step", a.min_step),
            ("armijo", a.armijo),
            ("spectral_floor", self.spectral_floor),
            ("match_tol", self.match_tol),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
        if !(a.backtrack > 0.0 && a.backtrack < 1.0) {
            return Err(domain("backtrack factor must lie in (0, 1)"));
        }
        if self.restarts == 0 {
            return Err(domain("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    MatchesM4Profile,
    Other,
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Classification::MatchesM4Profile => "MATCHES_M4_PROFILE",
            Classification::Other => "OTHER",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub restart: usize,
    #[serde(flatten)]
    pub trajectory: Trajectory,
    pub classification: Classification,
    /// Largest sorted-entry gap to the |M4⟩ profile.
    pub fingerprint_residual: f64,
    pub profile: EntropyProfile,
}

impl RestartOutcome {
    pub fn converged(&self) -> bool {
        self.trajectory.converged()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptReport {
    pub best_value: f64,
    pub best_restart: usize,
    pub grad_norm: f64,
    pub classification: Classification,
    pub best_state: PureState,
    pub restarts: Vec<RestartOutcome>,
}

impl OptReport {
    pub fn converged_count(&self) -> usize {
        self.restarts.iter().filter(|r| r.converged()).count()
    }
}

fn classify(s: &PureState, match_tol: f64) -> Result<(EntropyProfile, Classification, f64)> {
    let p = profile(s)?;
    let reference = profile(&make(CatalogId::M4)?)?;
    let gap = fingerprint_distance(&p, &reference);
    let class = if gap <= match_tol {
        Classification::MatchesM4Profile
    } else {
        Classification::Other
    };
    Ok((p, class, gap))
}

/// Runs one ascent from `start` and classifies the end point.
pub fn maximize_from(start: &PureState, config: &OptConfig) -> Result<RestartOutcome> {
    config.validate()?;
    check_four_qubits(start)?;
    let objective = AvgPairEntropy {
        spectral_floor: config.spectral_floor,
    };
    let trajectory = optimize(&objective, start, Sense::Maximize, &config.ascent)?;
    let (profile, classification, fingerprint_residual) =
        classify(&trajectory.state, config.match_tol)?;
    Ok(RestartOutcome {
        restart: 0,
        trajectory,
        classification,
        fingerprint_residual,
        profile,
    })
}

/// Multi-start ascent from Haar-random four-qubit states. Restart `k` draws
/// its start from stream `k` of `config.seed`.
pub fn maximize(config: &OptConfig) -> Result<OptReport> {
    config.validate()?;
    let restarts: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let start = haar_state(&mut stream_rng(config.seed, k as u64), &[2, 2, 2, 2]);
            let mut outcome = maximize_from(&start, config)?;
            outcome.restart = k;
            Ok(outcome)
        })
        .collect::<Result<_>>()?;
    // highest value wins, earlier restart on ties
    let best = restarts
        .iter()
        .reduce(|a, b| {
            if b.trajectory.value > a.trajectory.value {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    Ok(OptReport {
        best_value: best.trajectory.value,
        best_restart: best.restart,
        grad_norm: best.trajectory.grad_norm,
        classification: best.classification,
        best_state: best.trajectory.state.clone(),
        restarts: restarts.clone(),
    })
}

/// Decomposition of one pair's gradient on span{Ψ, Ψ̄}:
/// `δE_P = Re[state_coefficient·⟨Ψ|δΨ⟩ + conjugate_coefficient·⟨Ψ̄|δΨ⟩] + …`
/// where `…` is bounded by `residual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVariation {
    pub pair: String,
    pub state_coefficient: [f64; 2],
    pub conjugate_coefficient: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub value: f64,
    pub tangent_grad_norm: f64,
    /// `Re⟨s|g⟩` of the extension gradient at the normalized state.
    pub radial_coefficient: f64,
    /// Scale `c` of the evaluation point `Ψ = c·s` for the variations below.
    pub scale: f64,
    pub pairs: Vec<PairVariation>,
    /// Coefficient of `Re⟨Ψ|δΨ⟩` in `δ⟨E₂⟩` at `Ψ`.
    pub average_state_coefficient: f64,
    /// Norm of the part of `∇⟨E₂⟩(Ψ)` orthogonal to `Ψ`.
    pub orthogonal_residual: f64,
}

/// Scale at which |M4⟩'s amplitudes become unit-modulus cube roots of unity.
pub fn default_variation_scale() -> f64 {
    6f64.sqrt()
}

pub fn stationarity_report(s: &PureState) -> Result<StationarityReport> {
    stationarity_report_scaled(s, default_variation_scale())
}

/// Gradient diagnostics at `s`, with per-pair variations evaluated at `scale·s`.
pub fn stationarity_report_scaled(s: &PureState, scale: f64) -> Result<StationarityReport> {
    check_four_qubits(s)?;
    if !s.is_normalized() {
        return Err(domain("stationarity report needs a normalized state"));
    }
    if !(scale > 0.0) {
        return Err(domain("scale must be positive"));
    }
    let objective = AvgPairEntropy::default();
    let g = objective.euclidean_gradient(s)?;
    let radial_coefficient = dot(s.amps(), &g).re;
    let tangent_grad_norm = norm_sqr(&tangent_project(s.amps(), &g)).sqrt();

    let psi = s.scaled(C64::new(scale, 0.0));
    let psi_bar = psi.conjugate();
    let mut pairs = Vec::new();
    let mut total = vec![C64::new(0.0, 0.0); psi.len()];
    for (pair, gp) in pair_gradients(&psi, DEFAULT_SPECTRAL_FLOOR)? {
        let (a, b, residual) = span_decomposition(psi.amps(), psi_bar.amps(), &gp);
        pairs.push(PairVariation {
            pair: pair.to_string(),
            state_coefficient: [a.conj().re, a.conj().im],
            conjugate_coefficient: [b.conj().re, b.conj().im],
            residual,
        });
        for (acc, z) in total.iter_mut().zip(&gp) {
            *acc += z / 3.0;
        }
    }
    let psi_norm2 = psi.norm_sqr();
    let along = dot(psi.amps(), &total) / psi_norm2;
    let orthogonal: Vec<C64> = total
        .iter()
        .zip(psi.amps())
        .map(|(t, p)| t - along * p)
        .collect();
    Ok(StationarityReport {
        value: avg_pair_entropy(s)?,
        tangent_grad_norm,
        radial_coefficient,
        scale,
        pairs,
        average_state_coefficient: along.conj().re,
        orthogonal_residual: norm_sqr(&orthogonal).sqrt(),
    })
}

/// Least-squares `g ≈ a·u + b·v`; returns `(a, b, ‖g − a·u − b·v‖)`.
/// When `v` is parallel to `u`, `b` is zero.
fn span_decomposition(u: &[C64], v: &[C64], g: &[C64]) -> (C64, C64, f64) {
    let uu = norm_sqr(u);
    let vv = norm_sqr(v);
    let uv = dot(u, v);
    let ug = dot(u, g);
    let vg = dot(v, g);
    let det = uu * vv - uv.norm_sqr();
    let (a, b) = if det > 1e-12 * uu * vv {
        // Gram system [[uu, uv], [vu, vv]] (a, b) = (ug, vg)
        let a = (ug * vv - uv * vg) / det;
        let b = (vg * uu - uv.conj() * ug) / det;
        (a, b)
    } else {
        (ug / uu, C64::new(0.0, 0.0))
    };
    let resid: Vec<C64> = g
        .iter()
        .zip(u.iter().zip(v))
        .map(|(gi, (ui, vi))| gi - a * ui - b * vi)
        .collect();
    (a, b, norm_sqr(&resid).sqrt())
}
