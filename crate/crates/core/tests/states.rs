use entangle_core::catalog::{make, omega, CatalogId};
use entangle_core::random::{haar_su2, stream_rng};
use entangle_core::{PureState, C64};

fn fixed_and_cats() -> Vec<CatalogId> {
    let mut ids = CatalogId::FIXED.to_vec();
    ids.extend((2..=8).map(CatalogId::CatN));
    ids
}

#[test]
fn every_catalog_state_is_normalized() {
    for id in fixed_and_cats() {
        let s = make(id).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "{id}");
    }
}

#[test]
fn m4_bar_is_the_conjugate() {
    assert_eq!(
        make(CatalogId::M4Bar).unwrap(),
        make(CatalogId::M4).unwrap().conjugate()
    );
}

#[test]
fn m4_amplitudes() {
    let m4 = make(CatalogId::M4).unwrap();
    let w = omega();
    let k = 1.0 / 6f64.sqrt();
    let expected = [
        ([0, 0, 1, 1], C64::new(k, 0.0)),
        ([1, 1, 0, 0], C64::new(k, 0.0)),
        ([1, 0, 1, 0], w * k),
        ([0, 1, 0, 1], w * k),
        ([1, 0, 0, 1], w * w * k),
        ([0, 1, 1, 0], w * w * k),
    ];
    for (digits, z) in expected {
        assert!((m4.amp(&digits).unwrap() - z).norm() < 1e-15, "{digits:?}");
    }
    let support = m4.amps().iter().filter(|z| z.norm() > 0.0).count();
    assert_eq!(support, 6);
}

#[test]
fn single_party_marginals_maximally_mixed() {
    let ids = [
        CatalogId::CatN(2),
        CatalogId::CatN(3),
        CatalogId::CatN(4),
        CatalogId::CatN(7),
        CatalogId::PsiExample,
        CatalogId::M4,
        CatalogId::Ame44,
    ];
    for id in ids {
        let s = make(id).unwrap();
        for p in 0..s.parties() {
            let rho = s.partial_trace(&[p]).unwrap();
            assert!(
                rho.distance_from_maximally_mixed() < 1e-12,
                "{id} party {p}"
            );
        }
    }
}

#[test]
fn ame44_pairs_maximally_mixed() {
    let s = make(CatalogId::Ame44).unwrap();
    for a in 0..4 {
        for b in a + 1..4 {
            let rho = s.partial_trace(&[a, b]).unwrap();
            assert_eq!(rho.dim(), 16);
            assert!(rho.distance_from_maximally_mixed() < 1e-12);
        }
    }
}

#[test]
fn m4_is_an_su2_singlet() {
    let m4 = make(CatalogId::M4).unwrap();
    let mut rng = stream_rng(11, 0);
    for _ in 0..50 {
        let u = haar_su2(&mut rng);
        let moved = m4.apply_local_unitaries(&vec![u; 4]).unwrap();
        assert!((m4.inner(&moved).unwrap().norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn index_convention_round_trip() {
    let amps: Vec<f64> = (0..24).map(|i| i as f64).collect();
    let s = PureState::from_real(vec![2, 3, 2, 2], &amps).unwrap();
    for idx in 0..24 {
        let digits = s.digits_of(idx);
        assert_eq!(s.index_of(&digits).unwrap(), idx);
        assert_eq!(s.amp(&digits).unwrap().re, idx as f64);
    }
    // t^{ijkl} at ((i·3 + j)·2 + k)·2 + l
    assert_eq!(s.index_of(&[1, 2, 0, 1]).unwrap(), ((3 + 2) * 2) * 2 + 1);
}

#[test]
fn state_file_round_trip() {
    for id in fixed_and_cats() {
        let s = make(id).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: PureState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s, "{id}");
    }
}

#[test]
fn catalog_names_parse_back() {
    for id in fixed_and_cats() {
        assert_eq!(id.to_string().parse::<CatalogId>().unwrap(), id);
    }
    assert!("CAT_N(9)"
        .parse::<CatalogId>()
        .map(make)
        .map_or(true, |r| r.is_err()));
    assert!("NOPE".parse::<CatalogId>().is_err());
}
