//! The acceptance suite: eight end-to-end checks of the library's headline
//! numbers, each against an oracle that does not share code with the path
//! under test where that is practical.
//!
//! Every check returns a [`Criterion`] instead of panicking, so the suite can
//! be run from tests and from the command line alike.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::ame::{ame_deviation, minimize_deviation};
use crate::canonical::{canonicalize, DEFAULT_RESTARTS};
use crate::catalog::{make, CatalogId};
use crate::error::Result;
use crate::measurement::{
    basis_trial, equivariance_overlap, measure, robustness_report, total_probability,
    MeasurementBasis,
};
use crate::metrics::{
    fingerprint_distance, fingerprint_match, profile, PairLabel, DEFAULT_FINGERPRINT_TOL,
};
use crate::optimizer::{avg_pair_entropy, entropy_gradient, m4_pair_entropy, maximize, OptConfig};
use crate::random::{haar_state, haar_su2, haar_unitary, stream_rng};
use crate::sphere::AscentConfig;
use crate::tensor::{eigh, CMatrix, PureState, C64};

/// Smallest total deviation from an AME state reached by four qubits,
/// frozen from an audited 50-restart run (3.999999999999998).
pub const QUBIT_AME_FLOOR: f64 = 4.0;
/// A later floor below this fraction of the frozen one raises the alarm.
pub const FLOOR_ALARM_FRACTION: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub number: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.number,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn run(
    number: u8,
    name: &'static str,
    check: impl FnOnce() -> Result<(bool, String)>,
) -> Criterion {
    let t = Instant::now();
    let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Criterion {
        number,
        name,
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// All eight criteria in order.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    vec![
        exact_entropies(),
        m4_pair_spectrum(),
        stationarity(seed),
        optimization(seed),
        no_qubit_ame(seed),
        canonical_form(seed),
        robustness(seed),
        invariants(seed),
    ]
}

fn max_gap(values: &[f64], target: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max)
}

pub fn exact_entropies() -> Criterion {
    run(1, "exact entropy regression", || {
        let c4 = profile(&make(CatalogId::CatN(4))?)?;
        let psi = profile(&make(CatalogId::PsiExample)?)?;
        let m4 = profile(&make(CatalogId::M4)?)?;
        let c4_gap = max_gap(&c4.sorted(), 1.0);
        let psi_gap = psi
            .sorted()
            .iter()
            .zip([1.0, 1.0, 2.0, 2.0, 2.0, 2.0])
            .map(|(a, b)| (a - b).abs())
            .fold((psi.average() - 5.0 / 3.0).abs(), f64::max);
        let m4_gap = max_gap(&m4.sorted(), m4_pair_entropy());
        let passed = c4_gap < 1e-10 && psi_gap < 1e-10 && m4_gap < 1e-10;
        Ok((
            passed,
            format!("max deviation C4 {c4_gap:.1e}, PSI {psi_gap:.1e}, M4 {m4_gap:.1e}"),
        ))
    })
}

/// `p·|v⟩⟨v|` added into a density matrix.
fn add_projector(m: &mut CMatrix, v: &[C64], p: f64) {
    for i in 0..v.len() {
        for j in 0..v.len() {
            m[(i, j)] += v[i] * v[j].conj() * p;
        }
    }
}

pub fn m4_pair_spectrum() -> Criterion {
    run(2, "M4 pair spectrum and mixture", || {
        let m4 = make(CatalogId::M4)?;
        let spectrum = eigh(m4.partial_trace(&[0, 1])?.matrix())?.eigenvalues;
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        let spectrum_gap = spectrum
            .iter()
            .zip(expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);

        // ⅙(|00⟩⟨00| + |11⟩⟨11| + |Φ₊⟩⟨Φ₊|) + ½|Φ₋⟩⟨Φ₋|
        let mut mixture = CMatrix::zeros(4, 4);
        add_projector(&mut mixture, PureState::zeros(2)?.amps(), 1.0 / 6.0);
        add_projector(
            &mut mixture,
            PureState::basis(vec![2, 2], &[1, 1])?.amps(),
            1.0 / 6.0,
        );
        add_projector(&mut mixture, make(CatalogId::PhiPlus)?.amps(), 1.0 / 6.0);
        add_projector(&mut mixture, make(CatalogId::PhiMinus)?.amps(), 0.5);
        let mut mix_gap = 0.0_f64;
        for pair in PairLabel::WITH_A {
            let rho = m4.partial_trace(&pair.parties())?;
            mix_gap = mix_gap.max(rho.matrix().max_abs_diff(&mixture));
        }
        Ok((
            spectrum_gap < 1e-10 && mix_gap < 1e-10,
            format!("spectrum gap {spectrum_gap:.1e}, AB/AC/AD vs mixture {mix_gap:.1e}"),
        ))
    })
}

/// Central differences of `avg_pair_entropy(x/‖x‖)` along every real
/// coordinate, packed as `(∂/∂Re, ∂/∂Im)` pairs.
pub fn finite_difference_gradient(s: &PureState, h: f64) -> Result<Vec<C64>> {
    let f = |amps: Vec<C64>| -> Result<f64> { avg_pair_entropy(&s.with_amps(amps)?.normalized()?) };
    let mut out = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let mut parts = [0.0; 2];
        for (k, dir) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
            let mut plus = s.amps().to_vec();
            let mut minus = s.amps().to_vec();
            plus[i] += dir;
            minus[i] -= dir;
            parts[k] = (f(plus)? - f(minus)?) / (2.0 * h);
        }
        out.push(C64::new(parts[0], parts[1]));
    }
    Ok(out)
}

/// Worst mismatch between the analytic and finite-difference gradients:
/// relative for components of at least `1e-8`, absolute below.
pub fn gradient_mismatch(s: &PureState) -> Result<f64> {
    let analytic = entropy_gradient(s)?;
    let fd = finite_difference_gradient(s, 1e-5)?;
    let mut worst = 0.0_f64;
    for (a, b) in analytic.amps().iter().zip(&fd) {
        for (x, y) in [(a.re, b.re), (a.im, b.im)] {
            let err = (x - y).abs();
            worst = worst.max(if x.abs() < 1e-8 { err } else { err / x.abs() });
        }
    }
    Ok(worst)
}

pub fn stationarity(seed: u64) -> Criterion {
    run(3, "stationarity and gradient oracle", || {
        let g = entropy_gradient(&make(CatalogId::M4)?)?.norm();
        let mut worst = 0.0_f64;
        for k in 0..20 {
            let s = haar_state(&mut stream_rng(seed, k), &[2, 2, 2, 2]);
            worst = worst.max(gradient_mismatch(&s)?);
        }
        Ok((
            g < 1e-8 && worst < 1e-5,
            format!("tangent gradient at M4 {g:.1e}, worst finite-difference mismatch {worst:.1e} over 20 states"),
        ))
    })
}

pub fn optimization(seed: u64) -> Criterion {
    run(4, "optimization reproduction", || {
        let report = maximize(&OptConfig {
            seed,
            ..OptConfig::default()
        })?;
        let target = m4_pair_entropy();
        let best_gap = (report.best_value - target).abs();
        let reference = profile(&make(CatalogId::M4)?)?;
        let mut worst = 0.0_f64;
        for r in report.restarts.iter().filter(|r| r.converged()) {
            worst = worst.max(fingerprint_distance(&r.profile, &reference));
        }
        let converged = report.converged_count();
        Ok((
            best_gap < 1e-6 && worst < 1e-6 && converged > 0,
            format!(
                "best value gap {best_gap:.1e}, {converged}/{} converged, worst converged fingerprint gap {worst:.1e}",
                report.restarts.len()
            ),
        ))
    })
}

pub fn no_qubit_ame(seed: u64) -> Criterion {
    run(5, "no four-qubit AME state", || {
        let report = minimize_deviation(&[2, 2, 2, 2], 50, seed, &AscentConfig::default())?;
        let ame44 = ame_deviation(&make(CatalogId::Ame44)?)?.total;
        let alarm = FLOOR_ALARM_FRACTION * QUBIT_AME_FLOOR;
        Ok((
            report.floor > 0.0 && report.floor > alarm && ame44 < 1e-12,
            format!(
                "qubit floor {:.12} (alarm below {alarm}), AME(4,4) deviation {ame44:.1e}",
                report.floor
            ),
        ))
    })
}

/// Largest `|⟨v₀v₁v₂v₃|Ψ⟩|²` over a grid of Bloch angles on four qubits.
/// Party A's azimuth is fixed at zero since only the total phase matters.
pub fn bloch_grid_overlap(s: &PureState, polar_steps: usize, azimuth_steps: usize) -> f64 {
    assert_eq!(s.dims(), [2, 2, 2, 2]);
    let mut vectors = Vec::new();
    for i in 0..=polar_steps {
        let theta = std::f64::consts::PI * i as f64 / polar_steps as f64;
        for j in 0..azimuth_steps {
            let phi = std::f64::consts::TAU * j as f64 / azimuth_steps as f64;
            vectors.push([
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            ]);
        }
    }
    let first: Vec<&[C64; 2]> = vectors.iter().step_by(azimuth_steps).collect();
    let t = s.amps();
    let mut best = 0.0_f64;
    for a in &first {
        let ta: Vec<C64> = (0..8)
            .map(|r| a[0].conj() * t[r] + a[1].conj() * t[8 + r])
            .collect();
        for b in &vectors {
            let tb: Vec<C64> = (0..4)
                .map(|r| b[0].conj() * ta[r] + b[1].conj() * ta[4 + r])
                .collect();
            for c in &vectors {
                let tc = [
                    c[0].conj() * tb[0] + c[1].conj() * tb[2],
                    c[0].conj() * tb[1] + c[1].conj() * tb[3],
                ];
                for d in &vectors {
                    let z = d[0].conj() * tc[0] + d[1].conj() * tc[1];
                    best = best.max(z.norm_sqr());
                }
            }
        }
    }
    best
}

pub fn canonical_form(seed: u64) -> Criterion {
    run(6, "canonical form", || {
        let mut worst_zero = 0.0_f64;
        let mut worst_drop = 0.0_f64;
        for k in 0..100 {
            let s = haar_state(&mut stream_rng(seed, k), &[2, 2, 2, 2]);
            let c = canonicalize(&s, DEFAULT_RESTARTS, seed.wrapping_add(k))?;
            worst_zero = worst_zero.max(c.zero_residual);
            for w in c.overlap_trace.windows(2) {
                worst_drop = worst_drop.max(w[0] - w[1]);
            }
        }
        let c4 = make(CatalogId::CatN(4))?;
        let oracle = bloch_grid_overlap(&c4, 8, 8);
        let found = canonicalize(&c4, DEFAULT_RESTARTS, seed)?.overlap;
        let passed = worst_zero < 1e-8
            && worst_drop <= 1e-14
            && (found - oracle).abs() < 1e-8
            && (oracle - 0.5).abs() < 1e-8;
        Ok((
            passed,
            format!(
                "worst zero residual {worst_zero:.1e}, worst overlap drop {worst_drop:.1e}, C4 overlap {found:.10} vs grid {oracle:.10}"
            ),
        ))
    })
}

pub fn robustness(seed: u64) -> Criterion {
    run(7, "robustness under measurement", || {
        let m4 = make(CatalogId::M4)?;
        let target = 3f64.log2() - 2.0 / 3.0;
        let report = robustness_report(&m4, 50, seed)?;
        let mut m4_gap = 0.0_f64;
        let mut count = 0;
        for t in &report.trials {
            for o in &t.outcomes {
                count += o.pairs.len();
                m4_gap = m4_gap.max(max_gap(
                    &o.pairs.values().copied().collect::<Vec<_>>(),
                    target,
                ));
            }
        }
        let mut rng = stream_rng(seed, 1 << 32);
        let mut equivariance = f64::INFINITY;
        for _ in 0..50 {
            let u = haar_su2(&mut rng);
            let party = rng.gen_range(0..4);
            equivariance = equivariance.min(equivariance_overlap(&m4, party, &u)?);
        }

        let c4 = make(CatalogId::CatN(4))?;
        let (mut zero_gap, mut one_gap) = (0.0_f64, 0.0_f64);
        for p in 0..4 {
            let comp = basis_trial(&c4, &MeasurementBasis::computational(p, 2), 0)?;
            let pm = basis_trial(&c4, &MeasurementBasis::plus_minus(p), 0)?;
            for o in &comp.outcomes {
                zero_gap =
                    zero_gap.max(max_gap(&o.pairs.values().copied().collect::<Vec<_>>(), 0.0));
            }
            for o in &pm.outcomes {
                one_gap = one_gap.max(max_gap(&o.pairs.values().copied().collect::<Vec<_>>(), 1.0));
            }
        }
        let passed = count == 50 * 4 * 2 * 3
            && m4_gap < 1e-8
            && (equivariance - 1.0).abs() < 1e-8
            && zero_gap < 1e-10
            && one_gap < 1e-10;
        Ok((
            passed,
            format!(
                "M4 residual gap {m4_gap:.1e} over {count} entropies, equivariance overlap {equivariance:.12}, C4 computational {zero_gap:.1e}, C4 plus/minus {one_gap:.1e}"
            ),
        ))
    })
}

fn random_local_unitaries<R: Rng>(rng: &mut R) -> Vec<CMatrix> {
    (0..4).map(|_| haar_unitary(rng, 2)).collect()
}

pub fn invariants(seed: u64) -> Criterion {
    run(8, "invariant suite", || {
        let states = 50;
        let (mut spectra, mut trace, mut born) = (0.0_f64, 0.0_f64, 0.0_f64);
        let mut lowest = f64::INFINITY;
        let (mut lu_profile, mut lu_ame) = (0.0_f64, 0.0_f64);
        let mut fingerprint_ok = true;
        let mut prev: Option<PureState> = None;
        for k in 0..states {
            let mut rng = stream_rng(seed, 2000 + k);
            let s = haar_state(&mut rng, &[2, 2, 2, 2]);
            for pair in PairLabel::WITH_A {
                let rho = s.partial_trace(&pair.parties())?;
                let rest = s.partial_trace(&pair.complement().parties())?;
                let a = eigh(rho.matrix())?.eigenvalues;
                let b = eigh(rest.matrix())?.eigenvalues;
                spectra = spectra.max(max_pairwise(&a, &b));
                for (m, e) in [(&rho, &a), (&rest, &b)] {
                    trace = trace.max((m.trace() - 1.0).abs());
                    lowest = e.iter().copied().fold(lowest, f64::min);
                }
            }
            for p in 0..4 {
                let basis = MeasurementBasis::random(&mut rng, p, 2);
                born = born.max((total_probability(&measure(&s, &basis)?) - 1.0).abs());
            }
            let moved = s.apply_local_unitaries(&random_local_unitaries(&mut rng))?;
            let (ps, pm) = (profile(&s)?, profile(&moved)?);
            lu_profile = lu_profile.max(
                ps.entries()
                    .iter()
                    .zip(pm.entries())
                    .map(|((_, a), (_, b))| (a - b).abs())
                    .fold(0.0, f64::max),
            );
            lu_ame = lu_ame.max((ame_deviation(&s)?.total - ame_deviation(&moved)?.total).abs());
            fingerprint_ok &= fingerprint_match(&ps, &ps, 0.0);
            if let Some(q) = &prev {
                let pq = profile(q)?;
                fingerprint_ok &= fingerprint_match(&ps, &pq, DEFAULT_FINGERPRINT_TOL)
                    == fingerprint_match(&pq, &ps, DEFAULT_FINGERPRINT_TOL);
                fingerprint_ok &= fingerprint_distance(&ps, &pq) == fingerprint_distance(&pq, &ps);
            }
            prev = Some(s);
        }
        let passed = spectra < 1e-10
            && trace < 1e-12
            && lowest >= -1e-10
            && born < 1e-12
            && lu_profile < 1e-10
            && lu_ame < 1e-10
            && fingerprint_ok;
        Ok((
            passed,
            format!(
                "{states} states: complementary spectra {spectra:.1e}, trace {trace:.1e}, lowest eigenvalue {lowest:.1e}, Born {born:.1e}, LU profile {lu_profile:.1e}, LU deviation {lu_ame:.1e}, fingerprint symmetry {}",
                if fingerprint_ok { "ok" } else { "broken" }
            ),
        ))
    })
}

fn max_pairwise(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
