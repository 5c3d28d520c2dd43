mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qhypernet::ansatz::{
    entangler_pairs, run_ansatz, shift_params, AnsatzParams, Axis, ParamIndex, Sign,
};
use qhypernet::qsim::{zero_state, BitString};

fn angles(n: usize, layers: usize) -> impl Strategy<Value = AnsatzParams> {
    prop::collection::vec(0.0..std::f64::consts::TAU, 2 * n * layers)
        .prop_map(move |a| AnsatzParams::from_angles(n, layers, a).unwrap())
}

fn circuit() -> impl Strategy<Value = AnsatzParams> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(n, l)| angles(n, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matches_dense_oracle(p in circuit()) {
        let fast = run_ansatz(&p);
        let dense = common::dense_amplitudes(&p);
        for (a, b) in fast.amplitudes().iter().zip(&dense) {
            prop_assert!((a - b).norm() < 1e-9);
        }
        let probs = fast.probabilities();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!((fast.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(probs.iter().all(|&q| q >= 0.0));
    }

    #[test]
    fn gates_preserve_norm(p in circuit(), extra in 0.0..6.3f64) {
        let mut s = run_ansatz(&p);
        let n = p.n_qubits();
        for q in 0..n {
            s.apply_ry(q, extra).unwrap();
            s.apply_rz(q, -extra).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
        if n > 1 {
            s.apply_cx(n - 1, 0).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_round_trip(p in circuit(), pick in 0usize..24) {
        let flat = pick % p.len();
        let idx = ParamIndex::from_flat(flat, p.n_qubits());
        let there = shift_params(&p, idx, Sign::Plus).unwrap();
        let back = shift_params(&there, idx, Sign::Minus).unwrap();
        for (a, b) in back.angles().iter().zip(p.angles()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((there.angles()[flat] - p.angles()[flat] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bitstring_text_round_trip(index in 0usize..(1 << 14)) {
        let b = BitString::new(index, 14).unwrap();
        prop_assert_eq!(b.to_string().parse::<BitString>().unwrap(), b);
        prop_assert_eq!(BitString::from_bits(&b.to_bits()).unwrap(), b);
    }
}

#[test]
fn entanglers_alternate_parity() {
    assert_eq!(entangler_pairs(5, 0), vec![(0, 1), (2, 3)]);
    assert_eq!(entangler_pairs(5, 1), vec![(1, 2), (3, 4)]);
    assert_eq!(entangler_pairs(4, 2), entangler_pairs(4, 0));
    assert!(entangler_pairs(1, 0).is_empty());
}

#[test]
fn ry_pi_flip_propagates_through_cx() {
    // RY(π) on qubit 0 gives |1⟩; the first-layer CX(0,1) then flips qubit 1.
    let mut p = AnsatzParams::zeros(2, 1).unwrap();
    p.set(ParamIndex::new(Axis::Ry, 0, 0), PI).unwrap();
    let probs = run_ansatz(&p).probabilities();
    assert!((probs[0b11] - 1.0).abs() < 1e-12);
    assert_eq!(
        common::dense_probabilities(&p)
            .iter()
            .map(|q| q.round())
            .collect::<Vec<_>>(),
        vec![0.0, 0.0, 0.0, 1.0]
    );
}

#[test]
fn fourteen_qubit_state_is_normalised() {
    let p = common::random_params(14, 2, 3);
    let s = run_ansatz(&p);
    assert_eq!(s.dim(), 16384);
    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn sampling_frequencies_follow_probabilities() {
    let p = common::random_params(3, 2, 8);
    let s = run_ansatz(&p);
    let probs = s.probabilities();
    let shots = s.sample(40_000, 17).unwrap();
    let mut counts = [0usize; 8];
    for b in &shots {
        counts[b.index()] += 1;
    }
    for (k, &q) in probs.iter().enumerate() {
        let freq = counts[k] as f64 / shots.len() as f64;
        let se = (q * (1.0 - q) / shots.len() as f64).sqrt().max(1e-4);
        assert!((freq - q).abs() < 4.0 * se, "outcome {k}: {freq} vs {q}");
    }
    assert_eq!(s.sample(10, 17).unwrap(), s.sample(10, 17).unwrap());
}

#[test]
fn bad_qubit_arguments() {
    let mut s = zero_state(2).unwrap();
    assert!(s.apply_ry(2, 0.1).is_err());
    assert!(s.apply_cx(0, 0).is_err());
    assert!(zero_state(0).is_err());
}
