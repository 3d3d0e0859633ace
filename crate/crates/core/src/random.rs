//! Seeded sampling of states, local vectors and unitaries.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::matrix::{dot, norm_sqr, CMatrix, C64};
use crate::tensor::{complete_unitary, PureState};

/// Independent generator for restart/trial `stream` under a master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Uniformly distributed unit vector in `C^len`.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    loop {
        let v = gaussian_vector(rng, len);
        let n = norm_sqr(&v).sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random normalized pure state with the given local dimensions.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> PureState {
    let len = dims.iter().product();
    PureState::new(dims.to_vec(), haar_vector(rng, len)).expect("valid dims")
}

/// Haar-random `d×d` unitary (Gram–Schmidt of a Ginibre matrix).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(d);
    while columns.len() < d {
        let mut v = gaussian_vector(rng, d);
        for _ in 0..2 {
            for c in &columns {
                let p = dot(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        if n > 1e-8 {
            columns.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    CMatrix::from_columns(&columns).expect("square")
}

/// Haar-random element of SU(2).
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let u = haar_unitary(rng, 2);
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    u.scale(det.sqrt().inv())
}

/// Orthonormal basis whose first vector is Haar-random, completed by
/// [`complete_unitary`]. Columns are the basis vectors.
pub fn haar_basis<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    complete_unitary(&haar_vector(rng, d)).expect("nonzero vector")
}
