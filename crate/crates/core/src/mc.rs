//! Monte Carlo estimation of Tr rho_A^2 for hybrid automaton circuits.
//!
//! The purity of region A is the expectation of the region-A swap operator on
//! two copies of the state. Each sample draws two basis strings (m1, m2),
//! forms the region-swapped partners (m1', m2'), and evaluates the same
//! recorded circuit backwards on all four: composite measurements force the
//! measured bit (picking up a bookkeeping sign), unitaries apply their inverse
//! permutation and accumulate the gate phase on the pre-image. The sample
//! value Re e^{i(Theta1+Theta2)} is exactly +-1 for Clifford circuits, so the
//! accumulated mean is free of rounding drift there.

use crate::bits::{BitString, Region};
use crate::circuit::{Circuit, CircuitSpec, Gate, GateKind};
use crate::classical::step_pair_through_layer;
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::rng::{stream, TrajectoryKey};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Samples evaluated per parallel work item; results merge in chunk order, so
/// estimates are identical for every worker count.
const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Renyi2Estimate {
    pub s2: f64,
    pub stderr: f64,
    pub purity: PurityEstimate,
}

/// Adaptive sampling plan: double the budget until the purity resolves
/// (mean > 3 stderr) or the ceiling is exceeded.
#[derive(Clone, Copy, Debug)]
pub struct SamplePlan {
    pub initial: u64,
    pub ceiling: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { initial: 10_000, ceiling: 10_000_000 }
    }
}

/// Phase of <m| U~ |psi_0>, i.e. the phi with <m|U~|psi_0> = e^{i phi}/sqrt(2^N).
///
/// Walks the circuit from the last layer to the first. At a composite
/// measurement with outcome sigma the current bit at the site is forced to
/// sigma, with a sign flip iff the pre-forcing bit and sigma are both 1; at a
/// unitary gate the inverse permutation is applied and the gate phase is
/// evaluated on the pre-image bits.
pub fn backward_amplitude(c: &Circuit, m: &BitString) -> Result<Phase> {
    let mut bits = m.clone();
    let mut phase = Phase::ZERO;
    backward_amplitude_into(c, &mut bits, &mut phase)?;
    Ok(phase)
}

fn backward_amplitude_into(c: &Circuit, bits: &mut BitString, phase: &mut Phase) -> Result<()> {
    for (li, layer) in c.layers.iter().enumerate().rev() {
        let events = c.events_for_layer(li);
        let mut ev = events.len();
        for gate in layer.gates.iter().rev() {
            match gate {
                Gate::Measure(site) => {
                    ev -= 1;
                    debug_assert_eq!(events[ev].site, *site);
                    let s = *site as usize;
                    let outcome = events[ev].outcome;
                    if outcome && bits.get(s) {
                        phase.flip_sign();
                    }
                    bits.set(s, outcome);
                }
                Gate::H(_) => {
                    return Err(Error::UnsupportedGate {
                        kind: GateKind::H,
                        reason: "H outside a composite measurement is not an automaton gate",
                    })
                }
                g => {
                    g.inverse()?.permute(bits)?;
                    phase.add(g.phase_on(bits)?);
                }
            }
        }
    }
    Ok(())
}

/// One quadruple draw and its estimator value Re e^{i(Theta1+Theta2)}.
fn quad_value<R: Rng>(c: &Circuit, region: &Region, rng: &mut R) -> Result<f64> {
    let n = c.n_qubits as usize;
    let m1 = BitString::random(n, rng);
    let m2 = BitString::random(n, rng);
    let mut m1p = m1.clone();
    let mut m2p = m2.clone();
    m1p.copy_region_from(&m2, region);
    m2p.copy_region_from(&m1, region);
    let mut total = backward_amplitude(c, &m1)?;
    total.add(backward_amplitude(c, &m2)?);
    total.add(backward_amplitude(c, &m1p)?.conj());
    total.add(backward_amplitude(c, &m2p)?.conj());
    Ok(total.re())
}

#[derive(Clone, Copy, Default)]
struct Stat {
    sum: f64,
    sumsq: f64,
    count: u64,
}

impl Stat {
    fn add(&mut self, v: f64) {
        self.sum += v;
        self.sumsq += v * v;
        self.count += 1;
    }

    fn merge(&mut self, o: &Stat) {
        self.sum += o.sum;
        self.sumsq += o.sumsq;
        self.count += o.count;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let m = self.mean();
        let var = (self.sumsq - self.sum * m).max(0.0) / (self.count - 1) as f64;
        (var / self.count as f64).sqrt()
    }
}

/// Evaluate quadruple samples with global indices in `range`; one derived RNG
/// stream per sample, merged in index order.
fn sample_range(c: &Circuit, region: &Region, key: TrajectoryKey, range: std::ops::Range<u64>) -> Result<Stat> {
    let chunks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut lo = range.start;
        while lo < range.end {
            let hi = (lo + CHUNK).min(range.end);
            v.push((lo, hi));
            lo = hi;
        }
        v
    };
    let stats: Result<Vec<Stat>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut s = Stat::default();
            for k in lo..hi {
                let mut rng = key.stream(stream::MC_SAMPLE_BASE + k);
                s.add(quad_value(c, region, &mut rng)?);
            }
            Ok(s)
        })
        .collect();
    let mut total = Stat::default();
    for s in stats?.iter() {
        total.merge(s);
    }
    Ok(total)
}

/// Fixed-budget estimate of Tr rho_A^2 over `samples` i.i.d. quadruples.
pub fn estimate_purity(
    c: &Circuit,
    region: &Region,
    samples: u64,
    key: TrajectoryKey,
) -> Result<PurityEstimate> {
    assert!(samples >= 1);
    let s = sample_range(c, region, key, 0..samples)?;
    Ok(PurityEstimate { mean: s.mean(), stderr: s.stderr(), samples: s.count })
}

/// Second Renyi entropy with the adaptive budget of `plan`. Fails with
/// [`Error::Unresolvable`] (carrying the purity estimate) when the purity
/// stays within 3 stderr of zero at the ceiling.
pub fn estimate_renyi2(
    c: &Circuit,
    region: &Region,
    plan: SamplePlan,
    key: TrajectoryKey,
) -> Result<Renyi2Estimate> {
    let mut total = Stat::default();
    let mut budget = plan.initial.min(plan.ceiling);
    loop {
        total.merge(&sample_range(c, region, key, total.count..budget)?);
        let est =
            PurityEstimate { mean: total.mean(), stderr: total.stderr(), samples: total.count };
        if est.mean > 3.0 * est.stderr && est.mean > 0.0 {
            let s2 = -est.mean.log2();
            let stderr = est.stderr / (est.mean * std::f64::consts::LN_2);
            return Ok(Renyi2Estimate { s2, stderr, purity: est });
        }
        if budget >= plan.ceiling {
            return Err(Error::Unresolvable { estimate: est });
        }
        budget = (budget * 2).min(plan.ceiling);
    }
}

/// Exact average over all 4^N quadruples; small systems only.
pub fn exhaustive_purity(c: &Circuit, region: &Region) -> Result<f64> {
    let n = c.n_qubits as usize;
    assert!(n <= 12, "exhaustive purity is exponential in n");
    let dim = 1u64 << n;
    let mut sum = 0.0;
    for i1 in 0..dim {
        let m1 = BitString::from_index(n, i1 as usize);
        for i2 in 0..dim {
            let m2 = BitString::from_index(n, i2 as usize);
            let mut m1p = m1.clone();
            let mut m2p = m2.clone();
            m1p.copy_region_from(&m2, region);
            m2p.copy_region_from(&m1, region);
            let mut total = backward_amplitude(c, &m1)?;
            total.add(backward_amplitude(c, &m2)?);
            total.add(backward_amplitude(c, &m1p)?.conj());
            total.add(backward_amplitude(c, &m2p)?.conj());
            sum += total.re();
        }
    }
    Ok(sum / (dim as f64 * dim as f64))
}

/// An operator that maps basis states to basis states (up to a phase).
pub trait AutomatonOperator: Sync {
    /// Apply to the basis string in place, returning the phase picked up.
    fn apply(&self, bits: &mut BitString) -> Phase;
}

pub struct Identity;

impl AutomatonOperator for Identity {
    fn apply(&self, _bits: &mut BitString) -> Phase {
        Phase::ZERO
    }
}

pub struct PauliX(pub u32);

impl AutomatonOperator for PauliX {
    fn apply(&self, bits: &mut BitString) -> Phase {
        bits.flip(self.0 as usize);
        Phase::ZERO
    }
}

pub struct PauliZ(pub u32);

impl AutomatonOperator for PauliZ {
    fn apply(&self, bits: &mut BitString) -> Phase {
        if bits.get(self.0 as usize) {
            Phase::PI
        } else {
            Phase::ZERO
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ObservableEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: u64,
}

impl ObservableEstimate {
    pub fn stderr_norm(&self) -> f64 {
        (self.stderr_re * self.stderr_re + self.stderr_im * self.stderr_im).sqrt()
    }
}

/// MC estimate of <psi_0| U^dag O U |psi_0> for a measurement-free circuit.
pub fn estimate_observable<O: AutomatonOperator>(
    c: &Circuit,
    op: &O,
    samples: u64,
    key: TrajectoryKey,
) -> Result<ObservableEstimate> {
    if c.has_measurements() {
        return Err(Error::EngineMismatch(
            "observable estimator requires a unitary-only circuit".into(),
        ));
    }
    let values: Result<Vec<Complex64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = key.stream(stream::MC_SAMPLE_BASE + k);
            let mut bits = BitString::random(c.n_qubits as usize, &mut rng);
            let mut phase = Phase::ZERO;
            // forward sweep: theta on pre-permutation bits, then permute
            for layer in &c.layers {
                for g in &layer.gates {
                    phase.add(g.phase_on(&bits)?);
                    g.permute(&mut bits)?;
                }
            }
            phase.add(op.apply(&mut bits));
            // backward sweep through U^dagger
            for layer in c.layers.iter().rev() {
                for g in layer.gates.iter().rev() {
                    g.inverse()?.permute(&mut bits)?;
                    phase.add(g.phase_on(&bits)?.conj());
                }
            }
            Ok(phase.to_complex())
        })
        .collect();
    let values = values?;
    let mut re = Stat::default();
    let mut im = Stat::default();
    for v in &values {
        re.add(v.re);
        im.add(v.im);
    }
    Ok(ObservableEstimate {
        mean: Complex64::new(re.mean(), im.mean()),
        stderr_re: re.stderr(),
        stderr_im: im.stderr(),
        samples,
    })
}

/// P(t): fraction of independently evolved bit-string pairs (one fresh circuit
/// realization each) that agree on region A at each time step.
pub struct PSameSeries {
    pub times: Vec<u32>,
    pub prob: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: u64,
}

pub fn estimate_p_same(base: &CircuitSpec, trials: u64) -> Result<PSameSeries> {
    assert!(trials >= 1);
    let steps = base.steps as usize;
    let counts: Result<Vec<Vec<u64>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut spec = *base;
            spec.trajectory = trial;
            let c = crate::circuit::generate_circuit(&spec)?;
            let region = c.system_region();
            let key = spec.key();
            let mut rng = key.stream(stream::INIT);
            let n = c.n_qubits as usize;
            let mut a = BitString::random(n, &mut rng);
            let mut b = BitString::random(n, &mut rng);
            let mut hits = vec![0u64; steps + 1];
            let mut li = 0;
            for t in 0..=base.steps {
                while li < c.layers.len() && c.layers[li].time <= t {
                    step_pair_through_layer(&c, li, &mut a, &mut b)?;
                    li += 1;
                }
                hits[t as usize] = a.eq_on(&b, &region) as u64;
            }
            Ok(hits)
        })
        .collect();
    let mut total = vec![0u64; steps + 1];
    for hits in counts?.iter() {
        for (acc, h) in total.iter_mut().zip(hits) {
            *acc += h;
        }
    }
    let prob: Vec<f64> = total.iter().map(|&c| c as f64 / trials as f64).collect();
    let stderr = prob.iter().map(|&p| (p * (1.0 - p) / trials as f64).sqrt()).collect();
    Ok(PSameSeries { times: (0..=base.steps).collect(), prob, stderr, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_circuit, Boundary, Layer, Model};

    fn empty_circuit(n: u32) -> Circuit {
        Circuit {
            n_qubits: n,
            system: n,
            steps: 0,
            layers: vec![],
            measurement_events: vec![],
            model: Model::QaCliffordEntanglement,
            boundary: Boundary::Periodic,
        }
    }

    #[test]
    fn empty_circuit_amplitude_is_one() {
        let c = empty_circuit(5);
        for idx in [0usize, 7, 31] {
            let p = backward_amplitude(&c, &BitString::from_index(5, idx)).unwrap();
            assert_eq!(p.re(), 1.0);
        }
    }

    #[test]
    fn single_cz_gives_minus_on_11() {
        let mut c = empty_circuit(2);
        c.layers.push(Layer { time: 1, gates: vec![Gate::Cz(0, 1)] });
        c.steps = 1;
        let p = backward_amplitude(&c, &BitString::from_index(2, 0b11)).unwrap();
        assert_eq!(p.re(), -1.0);
        let p = backward_amplitude(&c, &BitString::from_index(2, 0b01)).unwrap();
        assert_eq!(p.re(), 1.0);
    }

    #[test]
    fn depth_zero_purity_is_one() {
        let c = empty_circuit(6);
        let region = Region::range(6, 0, 3);
        let key = TrajectoryKey::new(1, 0);
        let est = estimate_purity(&c, &region, 500, key).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
        let r2 = estimate_renyi2(&c, &region, SamplePlan { initial: 100, ceiling: 1000 }, key)
            .unwrap();
        assert_eq!(r2.s2, 0.0);
    }

    #[test]
    fn matching_region_bits_give_unit_sample() {
        // when m1 and m2 agree on A, the quadruple phases cancel exactly
        let spec = CircuitSpec {
            model: Model::QaNonClifford,
            length: 8,
            steps: 10,
            rate: 0.2,
            boundary: Boundary::Periodic,
            master_seed: 3,
            trajectory: 0,
        };
        let c = generate_circuit(&spec).unwrap();
        let region = Region::range(8, 0, 4);
        let mut rng = TrajectoryKey::new(9, 9).stream(stream::INIT);
        for _ in 0..50 {
            let m1 = BitString::random(8, &mut rng);
            let mut m2 = BitString::random(8, &mut rng);
            m2.copy_region_from(&m1, &region);
            let mut total = backward_amplitude(&c, &m1).unwrap();
            total.add(backward_amplitude(&c, &m2).unwrap());
            let mut m1p = m1.clone();
            let mut m2p = m2.clone();
            m1p.copy_region_from(&m2, &region);
            m2p.copy_region_from(&m1, &region);
            total.add(backward_amplitude(&c, &m1p).unwrap().conj());
            total.add(backward_amplitude(&c, &m2p).unwrap().conj());
            assert!((total.re() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn h_gate_rejected() {
        let mut c = empty_circuit(2);
        c.layers.push(Layer { time: 1, gates: vec![Gate::H(0)] });
        assert!(matches!(
            backward_amplitude(&c, &BitString::from_index(2, 0)),
            Err(Error::UnsupportedGate { .. })
        ));
    }

    #[test]
    fn identity_and_x_observables() {
        let c = empty_circuit(6);
        let key = TrajectoryKey::new(4, 0);
        let e = estimate_observable(&c, &Identity, 200, key).unwrap();
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
        // |psi_0> is an X eigenstate
        let e = estimate_observable(&c, &PauliX(2), 200, key).unwrap();
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn p_same_extremes() {
        // single-round model: measuring every site after the step's unitaries
        // equalizes the pair from t=1 on
        let mut base = CircuitSpec {
            model: Model::QaNonClifford,
            length: 6,
            steps: 4,
            rate: 1.0,
            boundary: Boundary::Periodic,
            master_seed: 8,
            trajectory: 0,
        };
        let s = estimate_p_same(&base, 40).unwrap();
        for t in 1..=4usize {
            assert_eq!(s.prob[t], 1.0, "t={t}");
        }
        // unitaries alone preserve distinctness: P(t) stays at its t=0 value
        base.model = Model::QaPurification;
        base.rate = 0.0;
        let s = estimate_p_same(&base, 40).unwrap();
        for t in 0..=4usize {
            assert_eq!(s.prob[t], s.prob[0]);
        }
    }
}
