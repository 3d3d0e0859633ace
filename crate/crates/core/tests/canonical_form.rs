use entangle_core::canonical::{canonicalize, single_excitation_residual};
use entangle_core::catalog::{make, CatalogId};
use entangle_core::random::{haar_state, haar_unitary, stream_rng};
use entangle_core::PureState;

#[test]
fn invariants_on_random_states() {
    for k in 0..20 {
        let s = haar_state(&mut stream_rng(31, k), &[2, 2, 2, 2]);
        let c = canonicalize(&s, 8, k).unwrap();
        assert!(c.converged);
        let rebuilt = s.apply_local_unitaries(&c.local_unitaries()).unwrap();
        assert!(rebuilt.max_abs_diff(&c.state) < 1e-10);
        let origin = c.state.amp(&[0, 0, 0, 0]).unwrap();
        assert!(origin.im == 0.0 && origin.re >= 0.0);
        assert!((origin.re - c.overlap.sqrt()).abs() < 1e-8);
        assert!(single_excitation_residual(&c.state) < 1e-8);
        assert!(c.overlap <= 1.0 + 1e-12);
        assert!(c.overlap_trace.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }
}

#[test]
fn overlap_invariant_under_local_unitaries() {
    for k in 0..10 {
        let mut rng = stream_rng(32, k);
        let s = haar_state(&mut rng, &[2, 2, 2, 2]);
        let us: Vec<_> = (0..4).map(|_| haar_unitary(&mut rng, 2)).collect();
        let moved = s.apply_local_unitaries(&us).unwrap();
        let (a, b) = (
            canonicalize(&s, 16, 0).unwrap(),
            canonicalize(&moved, 16, 0).unwrap(),
        );
        assert!((a.overlap - b.overlap).abs() < 1e-8);
    }
}

#[test]
fn qutrits_and_mixed_dims() {
    let s = haar_state(&mut stream_rng(33, 0), &[3, 2, 3]);
    let c = canonicalize(&s, 8, 1).unwrap();
    assert!(c.converged);
    assert_eq!(
        c.local_bases.iter().map(|u| u.rows()).collect::<Vec<_>>(),
        [3, 2, 3]
    );
}

#[test]
fn product_state_overlap_one() {
    let s = PureState::zeros(4).unwrap();
    let c = canonicalize(&s, 1, 0).unwrap();
    assert!((c.overlap - 1.0).abs() < 1e-15);
    assert!(c.state.max_abs_diff(&s) < 1e-15);
}

#[test]
fn m4_canonical_form() {
    let c = canonicalize(&make(CatalogId::M4).unwrap(), 16, 2).unwrap();
    assert!(c.converged);
    assert!(c.overlap > 0.0 && c.overlap < 0.5);
}

#[test]
fn seeds_reproduce() {
    let s = haar_state(&mut stream_rng(34, 0), &[2, 2, 2, 2]);
    assert_eq!(
        canonicalize(&s, 4, 8).unwrap(),
        canonicalize(&s, 4, 8).unwrap()
    );
}
