use entangle_core::catalog::{make, CatalogId};
use entangle_core::metrics::{
    entropy, fingerprint_match, pair_profile, profile, reduced_spectrum, PairLabel,
};
use entangle_core::random::{haar_state, haar_unitary, stream_rng};
use entangle_core::tensor::eigh;
use entangle_core::PureState;
use proptest::prelude::*;

fn random_qubits(seed: u64) -> PureState {
    haar_state(&mut stream_rng(seed, 0), &[2, 2, 2, 2])
}

#[test]
fn named_averages() {
    let cases = [
        (CatalogId::CatN(4), 1.0),
        (CatalogId::PsiExample, 5.0 / 3.0),
        (CatalogId::M4, 1.0 + 0.5 * 3f64.log2()),
    ];
    for (id, avg) in cases {
        assert!(
            (profile(&make(id).unwrap()).unwrap().average() - avg).abs() < 1e-12,
            "{id}"
        );
    }
}

#[test]
fn psi_example_pairs() {
    let p = profile(&make(CatalogId::PsiExample).unwrap()).unwrap();
    let get = |a, b| p.get(PairLabel::new(a, b).unwrap()).unwrap();
    assert!((get(0, 1) - 2.0).abs() < 1e-12);
    assert!((get(0, 2) - 2.0).abs() < 1e-12);
    assert!((get(0, 3) - 1.0).abs() < 1e-12);
}

#[test]
fn m4_entries_all_equal() {
    let p = profile(&make(CatalogId::M4).unwrap()).unwrap();
    assert!(p.max() - p.min() < 1e-12);
}

#[test]
fn residuals_profile() {
    // reduced spectra {1/3, 2/3} on every pair of either residual
    let target = 3f64.log2() - 2.0 / 3.0;
    for id in [CatalogId::Residual0, CatalogId::Residual1] {
        let p = pair_profile(&make(id).unwrap()).unwrap();
        assert_eq!(p.entries().len(), 3);
        assert!((p.max() - target).abs() < 1e-12 && (p.min() - target).abs() < 1e-12);
    }
}

#[test]
fn profile_needs_four_parties() {
    assert!(profile(&make(CatalogId::CatN(3)).unwrap()).is_err());
    assert!(pair_profile(&make(CatalogId::C2).unwrap()).is_err());
}

#[test]
fn product_state_has_no_entropy() {
    let p = profile(&PureState::zeros(4).unwrap()).unwrap();
    assert_eq!(p.max(), 0.0);
    assert!(p.entries().iter().all(|(_, e)| e.is_sign_positive()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn complementary_pairs_share_spectrum(seed in any::<u64>()) {
        let s = random_qubits(seed);
        for pair in PairLabel::WITH_A {
            let a = reduced_spectrum(&s, &pair.parties()).unwrap();
            let b = reduced_spectrum(&s, &pair.complement().parties()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn partial_trace_is_a_state(seed in any::<u64>()) {
        let s = random_qubits(seed);
        for keep in [vec![0], vec![1, 3], vec![0, 2, 3]] {
            let rho = s.partial_trace(&keep).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
            let lowest = eigh(rho.matrix()).unwrap().eigenvalues.into_iter().fold(f64::INFINITY, f64::min);
            prop_assert!(lowest >= -1e-10);
        }
    }

    #[test]
    fn profile_invariant_under_local_unitaries(seed in any::<u64>()) {
        let s = random_qubits(seed);
        let mut rng = stream_rng(seed, 1);
        let us: Vec<_> = (0..4).map(|_| haar_unitary(&mut rng, 2)).collect();
        let moved = s.apply_local_unitaries(&us).unwrap();
        prop_assert!((moved.norm() - 1.0).abs() < 1e-12);
        let (a, b) = (profile(&s).unwrap(), profile(&moved).unwrap());
        for ((_, x), (_, y)) in a.entries().iter().zip(b.entries()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugation_and_range(seed in any::<u64>()) {
        let s = random_qubits(seed);
        let (a, b) = (profile(&s).unwrap(), profile(&s.conjugate()).unwrap());
        for ((_, x), (_, y)) in a.entries().iter().zip(b.entries()) {
            prop_assert!((x - y).abs() < 1e-10);
            prop_assert!((0.0..=2.0).contains(x));
        }
        prop_assert!(fingerprint_match(&a, &b, 1e-10));
    }

    #[test]
    fn single_party_entropy_at_most_one(seed in any::<u64>()) {
        let s = random_qubits(seed);
        let e = entropy(&s.partial_trace(&[2]).unwrap()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
    }
}
