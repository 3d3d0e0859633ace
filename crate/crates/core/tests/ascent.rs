use entangle_core::catalog::{make, omega, CatalogId};
use entangle_core::optimizer::{
    avg_pair_entropy, entropy_gradient, m4_pair_entropy, maximize, maximize_from,
    stationarity_report, Classification, OptConfig,
};
use entangle_core::random::{gaussian_vector, haar_state, haar_unitary, stream_rng};
use entangle_core::sphere::Termination;
use entangle_core::C64;

#[test]
fn m4_start_stops_immediately() {
    let out = maximize_from(&make(CatalogId::M4).unwrap(), &OptConfig::default()).unwrap();
    assert_eq!(out.trajectory.iterations, 0);
    assert_eq!(out.trajectory.termination, Termination::GradientTolerance);
    assert!((out.trajectory.value - m4_pair_entropy()).abs() < 1e-12);
    assert_eq!(out.classification, Classification::MatchesM4Profile);
}

#[test]
fn cat_state_is_critical_but_not_a_trap() {
    let c4 = make(CatalogId::CatN(4)).unwrap();
    // the gradient only sees the two nonzero eigenvalues of each pair, which
    // are balanced at the cat state
    assert!(entropy_gradient(&c4).unwrap().norm() < 1e-12);
    let stuck = maximize_from(&c4, &OptConfig::default()).unwrap();
    assert_eq!(stuck.trajectory.iterations, 0);

    let kick = gaussian_vector(&mut stream_rng(3, 0), 16);
    let amps = c4
        .amps()
        .iter()
        .zip(&kick)
        .map(|(a, k)| a + k * 1e-3)
        .collect();
    let start = c4.with_amps(amps).unwrap().normalized().unwrap();
    let out = maximize_from(&start, &OptConfig::default()).unwrap();
    assert!(out.trajectory.value > 1.0 + 0.5);
    assert!(out.converged());
}

#[test]
fn variations_at_scaled_m4() {
    let r = stationarity_report(&make(CatalogId::M4).unwrap()).unwrap();
    assert!(r.tangent_grad_norm < 1e-8);
    assert!(r.orthogonal_residual < 1e-8);
    let common = -(3.0 * std::f64::consts::E.powi(2)).log2();
    let w = omega();
    for (p, phase) in r.pairs.iter().zip([C64::new(1.0, 0.0), w, w * w]) {
        let a = C64::new(p.state_coefficient[0], p.state_coefficient[1]);
        let b = C64::new(p.conjugate_coefficient[0], p.conjugate_coefficient[1]);
        assert!((a - common).norm() < 1e-8, "{}", p.pair);
        assert!((b - phase * 3f64.log2()).norm() < 1e-8, "{}", p.pair);
        assert!(p.residual < 1e-8);
    }
    assert!((r.average_state_coefficient - common).abs() < 1e-8);
}

#[test]
fn cat_state_report_regression() {
    let r = stationarity_report(&make(CatalogId::CatN(4)).unwrap()).unwrap();
    assert!(r.tangent_grad_norm < 1e-12);
    assert!((r.value - 1.0).abs() < 1e-12);
}

#[test]
fn default_search_finds_m4() {
    let report = maximize(&OptConfig::default()).unwrap();
    assert!((report.best_value - m4_pair_entropy()).abs() < 1e-6);
    for r in &report.restarts {
        assert!(r.converged(), "restart {}", r.restart);
        assert_eq!(r.classification, Classification::MatchesM4Profile);
        assert!(r
            .trajectory
            .history
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12));
    }
}

#[test]
fn search_is_reproducible() {
    let config = OptConfig {
        seed: 9,
        restarts: 4,
        ..OptConfig::default()
    };
    let (a, b) = (maximize(&config).unwrap(), maximize(&config).unwrap());
    for (x, y) in a.restarts.iter().zip(&b.restarts) {
        assert_eq!(x.trajectory.value.to_bits(), y.trajectory.value.to_bits());
        assert_eq!(x.trajectory.state, y.trajectory.state);
    }
}

#[test]
fn gradient_is_tangent() {
    for k in 0..20 {
        let s = haar_state(&mut stream_rng(4, k), &[2, 2, 2, 2]);
        let g = entropy_gradient(&s).unwrap();
        assert!(s.inner(&g).unwrap().re.abs() < 1e-12);
    }
}

#[test]
fn value_invariant_under_local_unitaries() {
    for k in 0..20 {
        let mut rng = stream_rng(6, k);
        let s = haar_state(&mut rng, &[2, 2, 2, 2]);
        let us: Vec<_> = (0..4).map(|_| haar_unitary(&mut rng, 2)).collect();
        let moved = s.apply_local_unitaries(&us).unwrap();
        assert!((avg_pair_entropy(&s).unwrap() - avg_pair_entropy(&moved).unwrap()).abs() < 1e-10);
    }
}
