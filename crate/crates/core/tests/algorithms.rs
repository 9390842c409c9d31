use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;

use qnetsim::algorithms::{
    classical_order, default_iterations, grover_search, grover_search_unknown, inverse_qft,
    mod_pow, order_find, qft, qft_circuit, shor_factor, success_probability, theoretical_success,
    GroverInstance, OrderFindingInstance,
};
use qnetsim::rng::seeded;
use qnetsim::QState;

#[test]
fn qft_circuit_matches_the_transform() {
    for n in 1..=8usize {
        assert_eq!(qft_circuit(n).gate_count(), n * (n + 1) / 2);
        let dim = 1 << n;
        let sites: Vec<usize> = (0..n).collect();
        let psi = QState::random(&vec![2; n], &mut seeded(n as u64)).unwrap();
        let out = qft(&psi, &sites).unwrap();
        for k in 0..dim {
            let want: Complex<f64> = (0..dim)
                .map(|j| psi.amplitudes()[j] * Complex::from_polar(1.0, 2.0 * PI * (j * k) as f64 / dim as f64))
                .sum::<Complex<f64>>()
                / (dim as f64).sqrt();
            assert!((out.amplitudes()[k] - want).norm() < 1e-9, "n={n} k={k}");
        }
        let back = inverse_qft(&out, &sites).unwrap();
        assert!((back.fidelity(&psi).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn grover_curve_follows_the_sine_law() {
    for n in [3usize, 6, 10] {
        let inst = GroverInstance::with_marked(n, &[1]).unwrap();
        let t_opt = default_iterations(n, 1);
        let theta = (1.0 / (1u64 << n) as f64).sqrt().asin();
        for t in 0..=2 * t_opt {
            let want = ((2 * t + 1) as f64 * theta).sin().powi(2);
            assert!((success_probability(&inst, t).unwrap() - want).abs() < 1e-9, "n={n} T={t}");
            assert!((theoretical_success(n, 1, t) - want).abs() < 1e-12);
        }
    }
    assert!(GroverInstance::with_marked(15, &[0]).is_err());
}

#[test]
fn grover_finds_marked_items() {
    let mut rng = seeded(3);
    let inst = GroverInstance::with_marked(8, &[17, 200]).unwrap();
    let hits = (0..50).filter(|_| inst.is_marked(grover_search(&inst, None, &mut rng).unwrap().x)).count();
    assert!(hits >= 45);
    let r = grover_search_unknown(&inst, 40, &mut rng).unwrap();
    assert!(r.found && inst.is_marked(r.x));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reported_orders_are_minimal(seed in any::<u64>(), pick in 0usize..6) {
        let (m, y) = [(15, 7), (15, 2), (15, 4), (21, 2), (21, 5), (21, 8)][pick];
        let inst = OrderFindingInstance::new(m, y).unwrap();
        if let Some(r) = order_find(&inst, &mut seeded(seed)).unwrap().period {
            prop_assert_eq!(mod_pow(y, r, m), 1);
            prop_assert_eq!(Some(r), classical_order(y, m));
        }
    }
}

#[test]
fn shor_factors_small_composites() {
    let mut rng = seeded(17);
    for m in [15u64, 21, 33, 35] {
        let r = shor_factor(m, &mut rng, 40).unwrap();
        assert_eq!(r.factor * r.cofactor, m);
        assert!(r.factor > 1 && r.factor < m);
    }
    assert!(shor_factor(13, &mut rng, 5).is_err());
}
