//! Invariants as property tests over random band-limited fields and states.

mod common;

use proptest::prelude::*;
use waterwave::checkpoint;
use waterwave::energy::{energy_curly_e, taylor_check};
use waterwave::evolution::constraint_defects;
use waterwave::initial::from_traces;
use waterwave::mollify::mollify_data;
use waterwave::quadrature;
use waterwave::singular::{commutator_h, triple_bracket};
use waterwave::spectral::{Part, C64};
use waterwave::state::{compute_a1, A1Method};

use common::{holo, mixed};

const N: usize = 64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hilbert_is_an_involution_on_mean_zero(f in mixed(N, 8, 1.0)) {
        let back = f.hilbert().hilbert();
        prop_assert!((&back - &f.add_const(-f.mean())).linf() < 1e-13);
    }

    #[test]
    fn projections_partition_identity(f in mixed(N, 8, 1.0)) {
        let sum = &f.project(Part::Holo) + &f.project(Part::Antiholo);
        prop_assert!((&sum - &f).linf() < 1e-13);
    }

    #[test]
    fn holomorphic_fields_are_hilbert_fixed(f in holo(N, 8, 1.0)) {
        prop_assert!((&f.hilbert() - &f).linf() < 1e-13);
    }

    #[test]
    fn derivative_commutes_with_hilbert(f in mixed(N, 8, 1.0)) {
        prop_assert!((&f.hilbert().derivative() - &f.derivative().hilbert()).linf() < 1e-12);
    }

    #[test]
    fn product_is_commutative(f in mixed(N, 8, 1.0), g in mixed(N, 8, 1.0)) {
        prop_assert!((&f.mul(&g) - &g.mul(&f)).linf() < 1e-13);
    }

    #[test]
    fn commutator_vanishes_on_holomorphic_pairs(f in holo(N, 8, 1.0), g in holo(N, 8, 1.0)) {
        prop_assert!(commutator_h(&f, &g).linf() < 1e-12);
    }

    #[test]
    fn triple_bracket_is_symmetric(f in mixed(N, 6, 1.0), g in mixed(N, 6, 1.0), h in mixed(N, 6, 1.0)) {
        prop_assert!((&triple_bracket(&f, &g, &h) - &triple_bracket(&g, &f, &h)).linf() < 1e-11);
    }

    #[test]
    fn hhalf_sectors(f in mixed(N, 8, 1.0)) {
        let (p, a) = (f.project(Part::Holo).norm_hhalf_sq(), f.project(Part::Antiholo).norm_hhalf_sq());
        prop_assert!((f.norm_hhalf_sq() - p - a).abs() < 1e-10);
        prop_assert!((f.pairing_hhalf() - (p - a)).abs() < 1e-10);
    }

    #[test]
    fn a1_is_at_least_one(zt in holo(N, 8, 0.3)) {
        let s = from_traces(zt, waterwave::spectral::Field::constant(waterwave::spectral::grid(N).unwrap(), C64::from(1.0)));
        prop_assert!(taylor_check(&s) >= -1e-14);
        let gap = (&compute_a1(&s, A1Method::Commutator) - &quadrature::a1(&s.zt())).linf();
        prop_assert!(gap < 1e-11);
    }

    #[test]
    fn mollification_contracts_energy(zt in holo(N, 6, 0.1), w in holo(N, 6, 0.1), eps in 0.01f64..0.5) {
        let s = from_traces(zt, w.add_const(C64::from(1.0)));
        let m = mollify_data(&s, eps).unwrap();
        let d = constraint_defects(&m);
        prop_assert!(d.zt < 1e-14 && d.za < 1e-14);
        prop_assert!(energy_curly_e(&m) <= energy_curly_e(&s) * (1.0 + 1e-12));
        prop_assert!(mollify_data(&s, 0.0).unwrap() == s);
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_identical(zt in holo(32, 5, 0.2), w in holo(32, 5, 0.2), t in 0.0f64..10.0) {
        let mut s = from_traces(zt, w.add_const(C64::from(1.0)));
        s.t = t;
        let mut buf = Vec::new();
        checkpoint::write_state(&mut buf, &s).unwrap();
        let back = checkpoint::read_state(&mut buf.as_slice(), std::path::Path::new("mem")).unwrap();
        prop_assert!(back == s);
    }
}
