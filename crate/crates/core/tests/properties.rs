use chainbell_core::inequality::ChFunctional;
use chainbell_core::{propagator_matrix, ChainParams, Convention};
use num_complex::Complex64;
use proptest::prelude::*;

fn chain() -> impl Strategy<Value = ChainParams> {
    (2usize..=40, 0.2f64..3.0, -4.0f64..4.0)
        .prop_map(|(n, j, mu)| ChainParams::new(n, j, mu).unwrap())
}

fn convention() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Plain), Just(Convention::Alternating)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_unitary_and_bounded(p in chain(), conv in convention(), t in -30.0f64..30.0) {
        let g = propagator_matrix(t, &p, conv);
        prop_assert!(g.unitarity_defect() < 1e-11);
        prop_assert!(g.entries().iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn propagator_symmetries(p in chain(), conv in convention(), t in -30.0f64..30.0) {
        let n = p.n_sites();
        let g = propagator_matrix(t, &p, conv);
        let back = propagator_matrix(-t, &p, conv);
        for i in 1..=n {
            for j in 1..=n {
                prop_assert!((g.get(i, j) - g.get(j, i)).norm() < 1e-12);
                prop_assert!((g.get(i, j) - g.get(n + 1 - i, n + 1 - j)).norm() < 1e-11);
                prop_assert!((back.get(i, j) - g.get(i, j).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn propagator_group_property(p in chain(), conv in convention(), t1 in -10.0f64..10.0, t2 in -10.0f64..10.0) {
        let a = propagator_matrix(t1, &p, conv);
        let b = propagator_matrix(t2, &p, conv);
        let sum = propagator_matrix(t1 + t2, &p, conv);
        let worst = a
            .compose(&b)
            .iter()
            .zip(sum.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-10);
    }

    #[test]
    fn field_only_shifts_the_phase(n in 2usize..=30, j in 0.2f64..3.0, mu in -4.0f64..4.0, t in -20.0f64..20.0) {
        let with = propagator_matrix(t, &ChainParams::new(n, j, mu).unwrap(), Convention::Plain);
        let without = propagator_matrix(t, &ChainParams::new(n, j, 0.0).unwrap(), Convention::Plain);
        let phase = Complex64::cis(-mu * t);
        for (a, b) in with.entries().iter().zip(without.entries()) {
            prop_assert!((a - phase * b).norm() < 1e-11);
        }
    }

    #[test]
    fn ch_functional_range_and_parity(p in chain(), t in 0.0f64..50.0) {
        let f = ChFunctional::new(&p, Convention::Plain);
        let v = f.value(t);
        let lower = 0.5 - std::f64::consts::SQRT_2 / 16.0;
        let upper = (1.0 + std::f64::consts::SQRT_2) / 2.0;
        prop_assert!(v >= lower - 1e-12 && v <= upper + 1e-12, "I = {}", v);
        prop_assert!((v - f.value(-t)).abs() < 1e-12);
        let c = f.components(t);
        prop_assert!(c.gnn_abs2 + c.g1n_abs2 <= 1.0 + 1e-12);
    }

    #[test]
    fn ch_functional_is_convention_blind(p in chain(), t in 0.0f64..50.0) {
        let plain = ChFunctional::new(&p, Convention::Plain).value(t);
        let alternating = ChFunctional::new(&p, Convention::Alternating).value(t);
        prop_assert!((plain - alternating).abs() < 1e-12);
    }
}
