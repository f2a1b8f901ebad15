//! Cross-engine agreement: every engine checked against the dense oracle and
//! against each other on the circuit families they share.

use qasim::bits::{BitString, Region};
use qasim::circuit::{generate_circuit, Boundary, Circuit, CircuitSpec, Gate, Model};
use qasim::mc;
use qasim::oracle::DenseState;
use qasim::rng::{seed_for, stream, TrajectoryKey};
use qasim::stabilizer::Tableau;
use rand::Rng;

fn spec(model: Model, length: u32, steps: u32, rate: f64, seed: u64, traj: u64) -> CircuitSpec {
    CircuitSpec {
        model,
        length,
        steps,
        rate,
        boundary: Boundary::Periodic,
        master_seed: seed,
        trajectory: traj,
    }
}

#[test]
fn backward_amplitude_matches_oracle_exhaustively() {
    // all 2^6 basis states of random mixed circuits with measurements
    let max = qasim::runner::check_amplitudes_exhaustive(Model::QaNonClifford, 6, 6, 15, 0.2, 31)
        .unwrap();
    assert!(max < 1e-10, "max amplitude deviation {max:.2e}");
}

#[test]
fn exhaustive_purity_matches_oracle() {
    let max = qasim::runner::check_exhaustive_purity(Model::QaNonClifford, 3, 6, 10, 0.2, 32)
        .unwrap();
    assert!(max < 1e-10, "max purity deviation {max:.2e}");
}

#[test]
fn mc_renyi2_matches_oracle_on_nonclifford_circuit() {
    let sp = spec(Model::QaNonClifford, 10, 15, 0.1, 33, 4);
    let c = generate_circuit(&sp).unwrap();
    let mut psi = DenseState::plus_state(10).unwrap();
    psi.apply_circuit(&c).unwrap();
    for hi in [3usize, 5] {
        let region = Region::range(10, 0, hi);
        let target = psi.renyi2_exact(&region);
        let plan = mc::SamplePlan { initial: 40_000, ceiling: 1_000_000 };
        let est = mc::estimate_renyi2(&c, &region, plan, sp.key()).unwrap();
        assert!(
            (est.s2 - target).abs() < 3.0 * est.stderr.max(1e-3),
            "region 0..{hi}: mc {} vs oracle {} (stderr {})",
            est.s2,
            target,
            est.stderr
        );
    }
}

#[test]
fn mc_matches_stabilizer_on_clifford_circuit() {
    // the stabilizer value is exact, so this is an oracle for the sampler
    let plan = mc::SamplePlan { initial: 50_000, ceiling: 800_000 };
    let rows = qasim::runner::check_mc_vs_stabilizer(16, 12, 0.2, &[2, 4, 6], plan, 35).unwrap();
    for (k, exact, est, sigma) in rows {
        assert!(sigma < 4.0, "prefix {k}: exact {exact}, mc {est}, {sigma:.1} sigma");
    }
}

#[test]
fn mc_observable_matches_oracle() {
    let sp = spec(Model::QaNonClifford, 8, 10, 0.0, 36, 0);
    let c = generate_circuit(&sp).unwrap();
    // oracle expectation of X_0
    let mut psi = DenseState::plus_state(8).unwrap();
    psi.apply_circuit(&c).unwrap();
    let x = BitString::from_bits(&[true, false, false, false, false, false, false, false]);
    let z = BitString::zeros(8);
    let target = psi.pauli_expectation(&x, &z, false);
    let est = mc::estimate_observable(&c, &mc::PauliX(0), 60_000, sp.key()).unwrap();
    let tol = 4.0 * est.stderr_norm().max(1e-3);
    assert!(
        (est.mean - target).norm() < tol,
        "mc {} vs oracle {target} (tol {tol:.2e})",
        est.mean
    );
}

#[test]
fn purification_entropy_exact_invariants() {
    // p = 0: unitaries confined to the system cannot change S_A = L
    let sp = spec(Model::QaPurification, 6, 12, 0.0, 37, 1);
    let c = generate_circuit(&sp).unwrap();
    let mut tab = Tableau::plus_state(12);
    let region = c.system_region();
    let mut li = 0;
    for t in 0..=sp.steps {
        while li < c.layers.len() && c.layers[li].time <= t {
            for g in &c.layers[li].gates {
                tab.apply(g).unwrap();
            }
            li += 1;
        }
        assert_eq!(tab.renyi_entropy(&region), 6, "t={t}");
    }

    // p = 1: the system purifies within a few steps
    let sp = spec(Model::QaPurification, 6, 10, 1.0, 37, 2);
    let c = generate_circuit(&sp).unwrap();
    let mut tab = Tableau::plus_state(12);
    tab.apply_circuit(&c).unwrap();
    assert_eq!(tab.renyi_entropy(&region), 0);
}

#[test]
fn mc_reproduces_epr_entropy() {
    // EPR-prepared state: S_A = L, via Monte Carlo at small L
    let sp = spec(Model::QaPurification, 4, 0, 0.0, 38, 0);
    let c = generate_circuit(&sp).unwrap();
    let region = c.system_region();
    let plan = mc::SamplePlan { initial: 100_000, ceiling: 4_000_000 };
    let est = mc::estimate_renyi2(&c, &region, plan, sp.key()).unwrap();
    assert!((est.s2 - 4.0).abs() < 3.0 * est.stderr, "S2 {} +/- {}", est.s2, est.stderr);
}

#[test]
fn quadruple_phase_cancellation_inside_regions() {
    // gates acting entirely inside A or entirely inside B contribute unit
    // samples whenever m1 and m2 agree on A
    let mut rng = seed_for(39, 0, stream::INIT);
    for trial in 0..20 {
        let n = 10usize;
        let region = Region::range(n, 0, 5);
        let mut layers = Vec::new();
        for t in 1..=8u32 {
            let mut gates = Vec::new();
            for _ in 0..3 {
                let inside_a = rng.random::<bool>();
                let (lo, hi) = if inside_a { (0, 5) } else { (5, 10) };
                let a = rng.random_range(lo..hi);
                let mut b = rng.random_range(lo..hi - 1);
                if b >= a {
                    b += 1;
                }
                let sites_taken = gates.iter().any(|g: &Gate| {
                    let (x, y) = g.sites();
                    x == a || x == b || y == Some(a) || y == Some(b)
                });
                if sites_taken {
                    continue;
                }
                gates.push(match rng.random_range(0..4u8) {
                    0 => Gate::CnotL(a, b),
                    1 => Gate::CnotR(a, b),
                    2 => Gate::Cz(a, b),
                    _ => Gate::Rz(a, b, [rng.random(), rng.random(), rng.random()]),
                });
            }
            layers.push(qasim::circuit::Layer { time: t, gates });
        }
        let c = Circuit {
            n_qubits: n as u32,
            system: n as u32,
            steps: 8,
            layers,
            measurement_events: vec![],
            model: Model::QaNonClifford,
            boundary: Boundary::Periodic,
        };
        c.validate().unwrap();
        let m1 = BitString::random(n, &mut rng);
        let mut m2 = BitString::random(n, &mut rng);
        m2.copy_region_from(&m1, &region);
        let mut total = mc::backward_amplitude(&c, &m1).unwrap();
        total.add(mc::backward_amplitude(&c, &m2).unwrap());
        let mut m1p = m1.clone();
        let mut m2p = m2.clone();
        m1p.copy_region_from(&m2, &region);
        m2p.copy_region_from(&m1, &region);
        total.add(mc::backward_amplitude(&c, &m1p).unwrap().conj());
        total.add(mc::backward_amplitude(&c, &m2p).unwrap().conj());
        assert!((total.re() - 1.0).abs() < 1e-10, "trial {trial}");
    }
}

#[test]
fn estimator_invariant_under_label_exchange() {
    let sp = spec(Model::QaNonClifford, 8, 12, 0.15, 40, 3);
    let c = generate_circuit(&sp).unwrap();
    let region = Region::range(8, 0, 4);
    let mut rng = seed_for(40, 1, stream::INIT);
    for _ in 0..40 {
        let m1 = BitString::random(8, &mut rng);
        let m2 = BitString::random(8, &mut rng);
        let value = |a: &BitString, b: &BitString| {
            let mut ap = a.clone();
            let mut bp = b.clone();
            ap.copy_region_from(b, &region);
            bp.copy_region_from(a, &region);
            let mut total = mc::backward_amplitude(&c, a).unwrap();
            total.add(mc::backward_amplitude(&c, b).unwrap());
            total.add(mc::backward_amplitude(&c, &ap).unwrap().conj());
            total.add(mc::backward_amplitude(&c, &bp).unwrap().conj());
            total.re()
        };
        assert!((value(&m1, &m2) - value(&m2, &m1)).abs() < 1e-12);
    }
}

#[test]
fn stabilizer_engine_agrees_with_mc_on_entanglement_model() {
    // medium-size Clifford circuit, region entropies well inside the
    // resolvable range
    let sp = spec(Model::QaCliffordEntanglement, 20, 14, 0.25, 41, 0);
    let c = generate_circuit(&sp).unwrap();
    let mut tab = Tableau::plus_state(20);
    tab.apply_circuit(&c).unwrap();
    let region = Region::range(20, 0, 5);
    let exact = tab.renyi_entropy(&region) as f64;
    let plan = mc::SamplePlan { initial: 50_000, ceiling: 800_000 };
    let est = mc::estimate_renyi2(&c, &region, plan, sp.key()).unwrap();
    assert!((est.s2 - exact).abs() < 4.0 * est.stderr, "{} vs {exact}", est.s2);
}

#[test]
fn oracle_override_matches_stabilizer_on_nonqa_circuits() {
    // non-QA circuits hit deterministic outcomes; both engines must resolve
    // the recorded outcome the same way and end in the same state
    let mut checked_override = false;
    for traj in 0..12 {
        let sp = spec(Model::NonQaClifford, 6, 10, 0.3, 42, traj);
        let c = generate_circuit(&sp).unwrap();
        let mut tab = Tableau::plus_state(6);
        let mut psi = DenseState::plus_state(6).unwrap();
        let t_over = tab.apply_circuit(&c).unwrap();
        let o_over = psi.apply_circuit(&c).unwrap();
        assert_eq!(t_over, o_over, "override counts differ on trajectory {traj}");
        checked_override |= t_over > 0;
        for i in 0..6 {
            let (x, z, neg) = tab.stabilizer_row(i);
            let e = psi.pauli_expectation(&x, &z, neg);
            assert!((e.re - 1.0).abs() < 1e-9 && e.im.abs() < 1e-9);
        }
    }
    assert!(checked_override, "expected at least one deterministic override in the sample");
}

#[test]
fn unresolvable_estimate_reports_budget() {
    // near-maximal entropy at L=12 cannot resolve with a tiny budget
    let sp = spec(Model::QaNonClifford, 12, 30, 0.0, 43, 0);
    let c = generate_circuit(&sp).unwrap();
    let region = Region::range(12, 0, 6);
    let plan = mc::SamplePlan { initial: 200, ceiling: 800 };
    match mc::estimate_renyi2(&c, &region, plan, sp.key()) {
        Err(qasim::Error::Unresolvable { estimate }) => {
            assert_eq!(estimate.samples, 800);
        }
        other => panic!("expected unresolvable, got {other:?}"),
    }
}

#[test]
fn p_same_decays_at_criticality() {
    let base = spec(Model::QaPurification, 24, 200, 0.137, 44, 0);
    let s = mc::estimate_p_same(&base, 400).unwrap();
    // -log P(t) should fall well below its t=0 value as pairs coincide
    assert!(s.prob[0] < 0.01);
    assert!(s.prob[200] > 0.2, "P(200) = {}", s.prob[200]);
    // monotone growth of P (coincidence is absorbing)
    for w in s.prob.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
}

#[test]
fn trajectory_key_streams_are_stable() {
    let key = TrajectoryKey::new(5, 9);
    let a: Vec<u64> = {
        let mut r = key.stream(stream::CIRCUIT);
        (0..4).map(|_| r.random()).collect()
    };
    let b: Vec<u64> = {
        let mut r = seed_for(5, 9, stream::CIRCUIT);
        (0..4).map(|_| r.random()).collect()
    };
    assert_eq!(a, b);
}
