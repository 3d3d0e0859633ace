//! Pair entanglement entropies and local-unitary invariant fingerprints.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{domain, Result};
use crate::tensor::density::clamp_eigenvalues;
use crate::tensor::{DensityMatrix, PureState};

/// Allowed `|tr ρ − 1|` for entropy evaluation.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues below this contribute exactly zero to `−λ log λ`.
pub const ZERO_EIGENVALUE: f64 = 1e-15;
pub const DEFAULT_FINGERPRINT_TOL: f64 = 1e-7;

/// Unordered pair of parties, stored with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairLabel {
    first: usize,
    second: usize,
}

impl PairLabel {
    /// The six pairs of a four-party system, in lexicographic order.
    pub const ALL4: [PairLabel; 6] = [
        PairLabel {
            first: 0,
            second: 1,
        },
        PairLabel {
            first: 0,
            second: 2,
        },
        PairLabel {
            first: 0,
            second: 3,
        },
        PairLabel {
            first: 1,
            second: 2,
        },
        PairLabel {
            first: 1,
            second: 3,
        },
        PairLabel {
            first: 2,
            second: 3,
        },
    ];
    /// AB, AC, AD.
    pub const WITH_A: [PairLabel; 3] = [Self::ALL4[0], Self::ALL4[1], Self::ALL4[2]];

    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(domain("a pair needs two distinct parties"));
        }
        Ok(Self {
            first: a.min(b),
            second: a.max(b),
        })
    }

    pub fn parties(&self) -> [usize; 2] {
        [self.first, self.second]
    }

    /// The other two parties of a four-party system.
    pub fn complement(&self) -> PairLabel {
        let rest: Vec<usize> = (0..4).filter(|p| !self.parties().contains(p)).collect();
        PairLabel {
            first: rest[0],
            second: rest[1],
        }
    }

    /// All pairs among `n` parties, lexicographic.
    pub fn all(n: usize) -> Vec<PairLabel> {
        (0..n)
            .flat_map(|a| {
                (a + 1..n).map(move |b| PairLabel {
                    first: a,
                    second: b,
                })
            })
            .collect()
    }
}

pub fn party_letter(p: usize) -> char {
    (b'A' + p as u8) as char
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            party_letter(self.first),
            party_letter(self.second)
        )
    }
}

/// Von Neumann entropy in bits, `−Σ λ log₂ λ`.
pub fn entropy(m: &DensityMatrix) -> Result<f64> {
    let tr = m.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(domain(format!("entropy needs unit trace, got {tr}")));
    }
    let values = m.clamped_eigenvalues()?;
    Ok(entropy_of_spectrum(&values))
}

/// `−Σ λ log₂ λ` over a probability vector, zero terms dropped.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l >= ZERO_EIGENVALUE)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Pair entropies of a pure state together with their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    entries: Vec<(PairLabel, f64)>,
    average: f64,
}

impl EntropyProfile {
    pub fn entries(&self) -> &[(PairLabel, f64)] {
        &self.entries
    }

    pub fn average(&self) -> f64 {
        self.average
    }

    pub fn get(&self, pair: PairLabel) -> Option<f64> {
        self.entries
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|(_, e)| *e)
    }

    /// Entry values, ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|(_, e)| *e).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, e)| *e)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, e)| *e)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn pairs_json(&self, names: impl Fn(PairLabel) -> String) -> BTreeMap<String, f64> {
        self.entries.iter().map(|(p, e)| (names(*p), *e)).collect()
    }
}

impl Serialize for EntropyProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("EntropyProfile", 2)?;
        st.serialize_field("pairs", &self.pairs_json(|p| p.to_string()))?;
        st.serialize_field("average", &self.average)?;
        st.end()
    }
}

/// Entropy of every pair of a pure state with at least three parties.
pub fn pair_profile(s: &PureState) -> Result<EntropyProfile> {
    let n = s.parties();
    if n < 3 {
        return Err(domain(format!(
            "pair profile needs at least 3 parties, got {n}"
        )));
    }
    let entries = PairLabel::all(n)
        .into_iter()
        .map(|p| Ok((p, entropy(&s.partial_trace(&p.parties())?)?)))
        .collect::<Result<Vec<_>>>()?;
    let average = entries.iter().map(|(_, e)| e).sum::<f64>() / entries.len() as f64;
    Ok(EntropyProfile { entries, average })
}

/// The six pair entropies of a four-party state and their average.
pub fn profile(s: &PureState) -> Result<EntropyProfile> {
    if s.parties() != 4 {
        return Err(domain(format!(
            "entropy profile needs exactly 4 parties, got {}",
            s.parties()
        )));
    }
    pair_profile(s)
}

/// Sorted-entry comparison of two profiles. Agreement is necessary, not
/// sufficient, for local-unitary equivalence.
pub fn fingerprint_match(a: &EntropyProfile, b: &EntropyProfile, tol: f64) -> bool {
    let (x, y) = (a.sorted(), b.sorted());
    x.len() == y.len() && x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= tol)
}

/// Largest sorted-entry difference between two profiles.
pub fn fingerprint_distance(a: &EntropyProfile, b: &EntropyProfile) -> f64 {
    let (x, y) = (a.sorted(), b.sorted());
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    x.iter()
        .zip(&y)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Nonzero (clamped) spectrum of a reduced state, descending.
pub fn reduced_spectrum(s: &PureState, keep: &[usize]) -> Result<Vec<f64>> {
    clamp_eigenvalues(s.partial_trace(keep)?.eigh()?.eigenvalues)
}
