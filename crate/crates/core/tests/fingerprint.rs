use proptest::prelude::*;

use qnetsim::fingerprint::{
    bits_of, fingerprint_state, hamming, referee_compare, swap_test_probability, Code, HadamardCode,
};
use qnetsim::rng::seeded;
use qnetsim::QState;

#[test]
fn hadamard_distance_exhaustive() {
    for n in 1..=8 {
        let code = HadamardCode::new(n).unwrap();
        let words: Vec<Vec<bool>> = (0..1 << n).map(|x| code.encode(&bits_of(x, n)).unwrap()).collect();
        for (x, a) in words.iter().enumerate() {
            for b in &words[x + 1..] {
                assert!(hamming(a, b) >= code.min_distance());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn overlap_is_codeword_agreement(n in 1usize..7, x in any::<usize>(), y in any::<usize>()) {
        let code = HadamardCode::new(n).unwrap();
        let (x, y) = (bits_of(x % (1 << n), n), bits_of(y % (1 << n), n));
        let d = hamming(&code.encode(&x).unwrap(), &code.encode(&y).unwrap()) as f64;
        let m = code.m() as f64;
        let fx = fingerprint_state(&x, &code).unwrap();
        let fy = fingerprint_state(&y, &code).unwrap();
        prop_assert!((fx.state.inner(&fy.state).unwrap().re - (m - d) / m).abs() < 1e-9);
        prop_assert!((fx.state.norm_sqr() - 1.0).abs() < 1e-12);
        let amp = 1.0 / m.sqrt();
        prop_assert_eq!(fx.state.amplitudes().iter().filter(|a| (a.re - amp).abs() < 1e-12).count(), code.m());
    }

    #[test]
    fn swap_test_law_on_random_states(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = QState::random(&[2, 2], &mut rng).unwrap();
        let b = QState::random(&[2, 2], &mut rng).unwrap();
        let o = a.inner(&b).unwrap().norm_sqr();
        prop_assert!((swap_test_probability(&a, &b).unwrap() - (1.0 + o) / 2.0).abs() < 1e-9);
    }
}

#[test]
fn equal_inputs_are_never_rejected() {
    let code = HadamardCode::new(4).unwrap();
    let mut rng = seeded(5);
    for i in 0..10_000 {
        let x = bits_of(i % 16, 4);
        assert!(referee_compare(&x, &x, &code, 1, &mut rng).unwrap());
    }
}

#[test]
fn distinct_inputs_are_mostly_rejected_with_repetition() {
    let code = HadamardCode::new(4).unwrap();
    let mut rng = seeded(6);
    let (x, y) = (bits_of(1, 4), bits_of(2, 4));
    let accepted = (0..2000).filter(|_| referee_compare(&x, &y, &code, 10, &mut rng).unwrap()).count();
    // 0.625^10 ≈ 0.0091
    assert!(accepted < 40, "{accepted}");
    assert!(referee_compare(&x, &y, &code, 0, &mut rng).is_err());
}
