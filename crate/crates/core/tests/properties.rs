//! Property tests for the circuit layer invariants.

use proptest::prelude::*;
use qasim::bits::BitString;
use qasim::circuit::{generate_circuit, parse_circuit, write_circuit, Boundary, CircuitSpec, Gate, Model};
use qasim::phase::Phase;

fn all_two_site_patterns() -> impl Iterator<Item = BitString> {
    (0..4usize).map(|k| BitString::from_index(2, k))
}

#[test]
fn gate_permutations_are_bijections() {
    // exhaustive over the four local patterns for every unitary automaton kind
    let gates = [
        Gate::CnotL(0, 1),
        Gate::CnotR(0, 1),
        Gate::Cz(0, 1),
        Gate::Swap(0, 1),
        Gate::Rz(0, 1, [0.4, 1.0, 2.0]),
    ];
    for g in &gates {
        let mut seen = [false; 4];
        for pattern in all_two_site_patterns() {
            let mut bits = pattern.clone();
            g.permute(&mut bits).unwrap();
            let idx = bits.to_index();
            assert!(!seen[idx], "{g:?} not injective");
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s), "{g:?} not surjective");
    }
}

#[test]
fn paper_update_rules() {
    // CNOT_L: |10> -> |11>; CZ leaves bits alone with a sign on |11>; SWAP swaps
    let mut b = BitString::from_bits(&[true, false]);
    Gate::CnotL(0, 1).permute(&mut b).unwrap();
    assert_eq!(b, BitString::from_bits(&[true, true]));

    let b11 = BitString::from_bits(&[true, true]);
    let mut b = b11.clone();
    Gate::Cz(0, 1).permute(&mut b).unwrap();
    assert_eq!(b, b11);
    assert_eq!(Gate::Cz(0, 1).phase_on(&b11).unwrap().re(), -1.0);
    assert_eq!(
        Gate::Cz(0, 1).phase_on(&BitString::from_bits(&[false, false])).unwrap().re(),
        1.0
    );

    let mut b = BitString::from_bits(&[false, true]);
    Gate::Swap(0, 1).permute(&mut b).unwrap();
    assert_eq!(b, BitString::from_bits(&[true, false]));

    // RZ(0,0,t3) on |11>: Z1 Z2 eigenvalue +1, phase e^{i t3}
    let p = Gate::Rz(0, 1, [0.0, 0.0, 0.7]).phase_on(&b11).unwrap();
    assert!((p.to_complex() - num_complex::Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
}

#[test]
fn measure_gate_rejected_everywhere() {
    let g = Gate::Measure(0);
    let mut bits = BitString::zeros(2);
    assert!(g.permute(&mut bits).is_err());
    assert!(g.phase_on(&bits).is_err());
    assert!(g.inverse().is_err());
    let h = Gate::H(0);
    assert!(h.permute(&mut bits).is_err());
    assert!(h.inverse().is_ok()); // H is unitary, just not automaton
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trips_permutation(
        kind in 0..5u8,
        pattern in 0..4usize,
        t1 in 0.0..std::f64::consts::TAU,
        t2 in 0.0..std::f64::consts::TAU,
        t3 in 0.0..std::f64::consts::TAU,
    ) {
        let gate = match kind {
            0 => Gate::CnotL(0, 1),
            1 => Gate::CnotR(0, 1),
            2 => Gate::Cz(0, 1),
            3 => Gate::Swap(0, 1),
            _ => Gate::Rz(0, 1, [t1, t2, t3]),
        };
        let start = BitString::from_index(2, pattern);
        let mut bits = start.clone();
        gate.permute(&mut bits).unwrap();
        gate.inverse().unwrap().permute(&mut bits).unwrap();
        prop_assert_eq!(&bits, &start);
        // and the phases cancel exactly
        let mut fwd = gate.phase_on(&start).unwrap();
        let mut moved = start.clone();
        gate.permute(&mut moved).unwrap();
        fwd.add(gate.inverse().unwrap().phase_on(&moved).unwrap());
        prop_assert!((fwd.to_complex() - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phases_stay_unit_modulus(quarters in proptest::collection::vec(-7i64..8, 0..30),
                                angles in proptest::collection::vec(-10.0..10.0f64, 0..30)) {
        let mut p = Phase::ZERO;
        for q in quarters {
            p.add_quarters(q);
        }
        for a in angles {
            p.add_radians(a);
        }
        prop_assert!((p.to_complex().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn generation_deterministic_and_serializable(
        model_pick in 0..5u8,
        length in 1..8u32,
        steps in 0..12u32,
        rate in 0.0..1.0f64,
        seed in 0..1000u64,
    ) {
        let model = match model_pick {
            0 => Model::QaPurification,
            1 => Model::QaCliffordEntanglement,
            2 => Model::QaNonClifford,
            3 => Model::NonQaClifford,
            _ => Model::NonQaPurification,
        };
        let spec = CircuitSpec {
            model,
            length: 2 * length,
            steps,
            rate,
            boundary: if seed % 2 == 0 { Boundary::Periodic } else { Boundary::Open },
            master_seed: seed,
            trajectory: seed / 3,
        };
        let a = generate_circuit(&spec).unwrap();
        let b = generate_circuit(&spec).unwrap();
        prop_assert_eq!(&a, &b);
        a.validate().unwrap();
        let back = parse_circuit(&write_circuit(&a)).unwrap();
        prop_assert_eq!(&a, &back);
    }
}
