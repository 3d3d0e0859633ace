//! Reshaping a four-party tensor across its three pair-vs-pair cuts and
//! measuring how far each reshape is from a scaled unitary.
//!
//! For a cut whose row parties have total dimension `D`, the reshape `M`
//! satisfies `M M† = ρ_rows`, so `D·M M† = I` exactly when the pair reduction
//! is maximally mixed. The deviation `‖D·M M† − I‖²_F` is smooth in the
//! amplitudes, with gradient `4D (D·M M† − I) M`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::metrics::party_letter;
use crate::random::{haar_state, stream_rng};
use crate::sphere::{optimize, AscentConfig, Sense, SphereObjective, Trajectory};
use crate::tensor::{CMatrix, PureState, C64};

/// A balanced bipartition, named by its row parties (always including A).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    rows: Vec<usize>,
}

impl Cut {
    pub const AB_CD: [usize; 2] = [0, 1];
    pub const AC_BD: [usize; 2] = [0, 2];
    pub const AD_BC: [usize; 2] = [0, 3];

    pub fn new(rows: Vec<usize>) -> Self {
        let mut rows = rows;
        rows.sort_unstable();
        Self { rows }
    }

    pub fn ab_cd() -> Self {
        Self::new(Self::AB_CD.to_vec())
    }

    pub fn ac_bd() -> Self {
        Self::new(Self::AC_BD.to_vec())
    }

    pub fn ad_bc() -> Self {
        Self::new(Self::AD_BC.to_vec())
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// All balanced cuts of `n` parties whose row side contains party A.
    /// For four parties these are AB|CD, AC|BD, AD|BC.
    pub fn balanced(n: usize) -> Result<Vec<Cut>> {
        if n < 2 || n % 2 != 0 {
            return Err(domain(format!(
                "balanced cuts need an even party count, got {n}"
            )));
        }
        let half = n / 2;
        let mut cuts = Vec::new();
        // subsets of {1..n} of size half-1, joined with party 0
        for mask in 0u32..(1 << (n - 1)) {
            if mask.count_ones() as usize == half - 1 {
                let mut rows = vec![0];
                rows.extend((1..n).filter(|p| mask & (1 << (p - 1)) != 0));
                cuts.push(Cut::new(rows));
            }
        }
        cuts.sort();
        Ok(cuts)
    }

    fn columns(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|p| !self.rows.contains(p)).collect()
    }

    pub fn label(&self, n: usize) -> String {
        let side = |ps: &[usize]| ps.iter().map(|&p| party_letter(p)).collect::<String>();
        format!("{}_{}", side(&self.rows), side(&self.columns(n)))
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rows.len() * 2;
        write!(f, "{}", self.label(n))
    }
}

/// One matrix view of a state across a cut.
#[derive(Debug, Clone, PartialEq)]
pub struct ReshapeMatrix {
    pub cut: Cut,
    pub matrix: CMatrix,
}

fn check_equal_dims(s: &PureState) -> Result<usize> {
    let d = s.dims()[0];
    if s.dims().iter().any(|&x| x != d) {
        return Err(domain(format!(
            "reshape needs equal local dimensions, got {:?}",
            s.dims()
        )));
    }
    Ok(d)
}

/// Rows indexed by the cut's row parties, columns by the rest (ascending).
pub fn reshape(s: &PureState, cut: &Cut) -> Result<ReshapeMatrix> {
    check_equal_dims(s)?;
    let n = s.parties();
    if cut.rows.len() * 2 != n || cut.rows.iter().any(|&p| p >= n) {
        return Err(domain(format!(
            "cut {:?} is not balanced for {n} parties",
            cut.rows
        )));
    }
    Ok(ReshapeMatrix {
        cut: cut.clone(),
        matrix: s.matricize(&cut.rows)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmeDeviation {
    pub per_cut: BTreeMap<String, f64>,
    pub total: f64,
}

/// `D·M M† − I` for one reshape.
fn scaled_gram_defect(m: &CMatrix) -> CMatrix {
    let scale = m.rows() as f64;
    let mut a = m.gram().scale(C64::new(scale, 0.0));
    for i in 0..a.rows() {
        a[(i, i)] -= C64::new(1.0, 0.0);
    }
    a
}

/// Squared Frobenius distance of every balanced reshape from a scaled unitary.
pub fn ame_deviation(s: &PureState) -> Result<AmeDeviation> {
    check_equal_dims(s)?;
    let n = s.parties();
    let mut per_cut = BTreeMap::new();
    let mut total = 0.0;
    for cut in Cut::balanced(n)? {
        let r = reshape(s, &cut)?;
        let v = scaled_gram_defect(&r.matrix).frobenius_norm_sqr();
        per_cut.insert(cut.label(n), v);
        total += v;
    }
    Ok(AmeDeviation { per_cut, total })
}

/// Total deviation as a sphere objective (minimized).
#[derive(Debug, Clone, Copy, Default)]
pub struct DeviationObjective;

impl SphereObjective for DeviationObjective {
    fn value(&self, s: &PureState) -> Result<f64> {
        Ok(ame_deviation(s)?.total)
    }

    fn euclidean_gradient(&self, s: &PureState) -> Result<Vec<C64>> {
        let n = s.parties();
        let mut g = vec![C64::new(0.0, 0.0); s.len()];
        for cut in Cut::balanced(n)? {
            let m = s.matricize(&cut.rows)?;
            let scale = m.rows() as f64;
            let gm = scaled_gram_defect(&m)
                .matmul(&m)?
                .scale(C64::new(4.0 * scale, 0.0));
            let back = PureState::from_matricized(s.dims(), &cut.rows, &gm)?;
            for (acc, z) in g.iter_mut().zip(back.amps()) {
                *acc += z;
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRun {
    pub restart: usize,
    #[serde(flatten)]
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    /// Smallest total deviation reached.
    pub floor: f64,
    pub per_cut: BTreeMap<String, f64>,
    pub best_restart: usize,
    pub grad_norm: f64,
    pub iters: usize,
    pub state: PureState,
    pub restarts: Vec<DeviationRun>,
}

/// Descends the total deviation from one start.
pub fn minimize_deviation_from(start: &PureState, config: &AscentConfig) -> Result<Trajectory> {
    check_equal_dims(start)?;
    Cut::balanced(start.parties())?;
    optimize(&DeviationObjective, start, Sense::Minimize, config)
}

/// Multi-start descent from Haar-random states with the given dims.
/// Restart `k` samples from stream `k` of `seed`; ties keep the lower `k`.
pub fn minimize_deviation(
    dims: &[usize],
    restarts: usize,
    seed: u64,
    config: &AscentConfig,
) -> Result<DeviationReport> {
    if restarts == 0 {
        return Err(domain("restarts must be at least 1"));
    }
    if dims.is_empty() || dims.iter().any(|&d| d != dims[0]) {
        return Err(domain(format!(
            "equal local dimensions required, got {dims:?}"
        )));
    }
    Cut::balanced(dims.len())?;
    let runs: Vec<DeviationRun> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let start = haar_state(&mut stream_rng(seed, k as u64), dims);
            Ok(DeviationRun {
                restart: k,
                trajectory: minimize_deviation_from(&start, config)?,
            })
        })
        .collect::<Result<_>>()?;
    let best = runs
        .iter()
        .reduce(|a, b| {
            if b.trajectory.value < a.trajectory.value {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    Ok(DeviationReport {
        floor: best.trajectory.value,
        per_cut: ame_deviation(&best.trajectory.state)?.per_cut,
        best_restart: best.restart,
        grad_norm: best.trajectory.grad_norm,
        iters: best.trajectory.iterations,
        state: best.trajectory.state.clone(),
        restarts: runs.clone(),
    })
}
