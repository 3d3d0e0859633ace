//! Projective measurement of a single party and what it leaves behind.
//!
//! Measuring party `p` in an orthonormal basis `{v_k}` yields outcome `k`
//! with probability `‖⟨v_k|_p Ψ‖²`; the residual is the normalized
//! contraction on the other parties. The robustness report measures every
//! party of a state in many random bases and collects the residual pair
//! entropies, so a state whose entanglement survives any single measurement
//! shows up as a narrow band of values, and one whose entanglement can be
//! destroyed shows up as fragile bases.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, shape, Result};
use crate::metrics::{pair_profile, party_letter};
use crate::random::{haar_basis, stream_rng};
use crate::tensor::io::matrix_to_json;
use crate::tensor::{CMatrix, PureState, C64};

/// `|⟨vᵢ|vⱼ⟩ − δᵢⱼ|` allowed between basis vectors.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Outcomes rarer than this have no residual.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;
/// Residual entropies below this count as zero for the fragility flag.
pub const FRAGILE_ENTROPY: f64 = 1e-10;

/// Orthonormal basis of one party's space; columns are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    party: usize,
    vectors: CMatrix,
}

impl MeasurementBasis {
    pub fn new(party: usize, vectors: CMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(shape(format!(
                "basis matrix is {}x{}",
                vectors.rows(),
                vectors.cols()
            )));
        }
        let gram = vectors.adjoint().matmul(&vectors)?;
        let d = vectors.cols();
        for i in 0..d {
            for j in 0..d {
                let delta = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - delta).norm() >= ORTHONORMAL_TOL {
                    return Err(domain(format!(
                        "basis vectors {i} and {j} have overlap {} (expected {delta})",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { party, vectors })
    }

    pub fn computational(party: usize, d: usize) -> Self {
        Self {
            party,
            vectors: CMatrix::identity(d),
        }
    }

    /// `{|+⟩, |−⟩}` on a qubit.
    pub fn plus_minus(party: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            party,
            vectors: CMatrix::from_real_rows(&[&[h, h], &[h, -h]]).expect("2x2"),
        }
    }

    /// Haar-random first vector, completed deterministically.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, party: usize, d: usize) -> Self {
        Self {
            party,
            vectors: haar_basis(rng, d),
        }
    }

    /// `{u|0⟩, u|1⟩, …}` for a unitary `u`.
    pub fn rotated(party: usize, u: &CMatrix) -> Result<Self> {
        Self::new(party, u.clone())
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }
}

impl Serialize for MeasurementBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("MeasurementBasis", 2)?;
        st.serialize_field("party", &party_letter(self.party).to_string())?;
        st.serialize_field("vectors", &matrix_to_json(&self.vectors))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    /// Normalized state of the unmeasured parties; `None` for negligible
    /// outcomes.
    pub residual: Option<PureState>,
}

/// All outcomes of measuring `basis.party()` on `s`.
pub fn measure(s: &PureState, basis: &MeasurementBasis) -> Result<Vec<MeasurementOutcome>> {
    if !s.is_normalized() {
        return Err(domain("measure needs a normalized state"));
    }
    let p = basis.party;
    if p >= s.parties() {
        return Err(shape(format!(
            "party {p} out of range for {} parties",
            s.parties()
        )));
    }
    if s.parties() < 2 {
        return Err(domain("measuring the only party leaves nothing behind"));
    }
    if s.dims()[p] != basis.dim() {
        return Err(shape(format!(
            "basis of dimension {} for party {p} of dimension {}",
            basis.dim(),
            s.dims()[p]
        )));
    }
    (0..basis.dim())
        .map(|k| {
            let (dims, amps) = s.contract_raw(p, &basis.vectors.column(k))?;
            let rest = PureState::new(dims, amps)?;
            let probability = rest.norm_sqr();
            let residual = if probability < NEGLIGIBLE_PROBABILITY {
                None
            } else {
                Some(rest.normalized()?)
            };
            Ok(MeasurementOutcome {
                outcome_index: k,
                probability,
                residual,
            })
        })
        .collect()
}

/// Names the residual's pairs by the original party letters.
fn residual_pair_name(measured: usize, pair: [usize; 2]) -> String {
    let lift = |q: usize| if q >= measured { q + 1 } else { q };
    format!(
        "{}{}",
        party_letter(lift(pair[0])),
        party_letter(lift(pair[1]))
    )
}

/// Pair entropies of one outcome's residual, keyed by original letters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualProfile {
    pub outcome_index: usize,
    pub probability: f64,
    /// Empty when the outcome is negligible.
    pub pairs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisTrial {
    pub trial: usize,
    pub basis: MeasurementBasis,
    pub outcomes: Vec<ResidualProfile>,
    /// Every residual entropy of every outcome vanished.
    pub fragile: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl Stats {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    /// Keyed `"<measured>:<pair>"`, e.g. `"A:BC"`.
    pub entries: BTreeMap<String, Stats>,
    /// Over every residual entropy in the report.
    pub overall: Option<Stats>,
    pub fragile_bases: usize,
    pub trials: Vec<BasisTrial>,
}

/// Measures `s` in one basis and profiles each residual.
pub fn basis_trial(s: &PureState, basis: &MeasurementBasis, trial: usize) -> Result<BasisTrial> {
    let mut outcomes = Vec::new();
    let mut fragile = true;
    for o in measure(s, basis)? {
        let mut pairs = BTreeMap::new();
        if let Some(r) = &o.residual {
            for (pair, e) in pair_profile(r)?.entries() {
                if *e >= FRAGILE_ENTROPY {
                    fragile = false;
                }
                pairs.insert(residual_pair_name(basis.party, pair.parties()), *e);
            }
        }
        outcomes.push(ResidualProfile {
            outcome_index: o.outcome_index,
            probability: o.probability,
            pairs,
        });
    }
    Ok(BasisTrial {
        trial,
        basis: basis.clone(),
        outcomes,
        fragile,
    })
}

/// Residual profiles for an explicit list of bases.
pub fn robustness_with_bases(
    s: &PureState,
    bases: &[MeasurementBasis],
) -> Result<RobustnessReport> {
    if s.parties() < 4 {
        return Err(domain(format!(
            "robustness needs at least 4 parties so residuals have pairs, got {}",
            s.parties()
        )));
    }
    let trials = bases
        .par_iter()
        .enumerate()
        .map(|(t, b)| basis_trial(s, b, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(trials))
}

fn summarize(trials: Vec<BasisTrial>) -> RobustnessReport {
    let mut buckets: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::new();
    for t in &trials {
        let measured = party_letter(t.basis.party);
        for o in &t.outcomes {
            for (pair, e) in &o.pairs {
                buckets
                    .entry(format!("{measured}:{pair}"))
                    .or_default()
                    .push(*e);
                all.push(*e);
            }
        }
    }
    RobustnessReport {
        entries: buckets
            .into_iter()
            .filter_map(|(k, v)| Stats::of(&v).map(|s| (k, s)))
            .collect(),
        overall: Stats::of(&all),
        fragile_bases: trials.iter().filter(|t| t.fragile).count(),
        trials,
    }
}

/// `trials` Haar-random bases for every party. Trial `t` draws its bases
/// from stream `t` of `seed`, party by party.
pub fn robustness_report(s: &PureState, trials: usize, seed: u64) -> Result<RobustnessReport> {
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    if !s.is_normalized() {
        return Err(domain("robustness needs a normalized state"));
    }
    let mut bases = Vec::with_capacity(trials * s.parties());
    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        for (p, &d) in s.dims().iter().enumerate() {
            bases.push(MeasurementBasis::random(&mut rng, p, d));
        }
    }
    robustness_with_bases(s, &bases)
}

/// Measures `party` in the computational basis and in `{u|k⟩}`, and returns
/// the smallest `|⟨u⊗…⊗u r_k | r_k(u)⟩|` over outcomes. A state invariant
/// under `u` on every party gives 1.
pub fn equivariance_overlap(s: &PureState, party: usize, u: &CMatrix) -> Result<f64> {
    let d = s.dims()[party];
    if s.dims().iter().any(|&x| x != d) {
        return Err(domain("equivariance check needs equal local dimensions"));
    }
    let plain = measure(s, &MeasurementBasis::computational(party, d))?;
    let rotated = measure(s, &MeasurementBasis::rotated(party, u)?)?;
    let mut worst = f64::INFINITY;
    for (a, b) in plain.iter().zip(&rotated) {
        match (&a.residual, &b.residual) {
            (Some(ra), Some(rb)) => {
                let moved = ra.apply_local_unitaries(&vec![u.clone(); ra.parties()])?;
                worst = worst.min(moved.inner(rb)?.norm());
            }
            (None, None) => {}
            _ => worst = 0.0,
        }
    }
    Ok(worst)
}

/// Sum of outcome probabilities.
pub fn total_probability(outcomes: &[MeasurementOutcome]) -> f64 {
    outcomes.iter().map(|o| o.probability).sum()
}

/// Largest amplitude distance once the relative global phase is removed.
pub fn phase_aligned_distance(a: &PureState, b: &PureState) -> Result<f64> {
    let z = a.inner(b)?;
    let phase = if z.norm() > 0.0 {
        z / z.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Ok(a.scaled(phase).max_abs_diff(b))
}
