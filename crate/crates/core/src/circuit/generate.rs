//! Circuit generation.
//!
//! Generation is a pure function of `(master_seed, trajectory_index)` through
//! the `stream::CIRCUIT` stream. The draw order is part of the reproducibility
//! contract (the classical engine mirrors it draw for draw):
//!
//! For each time step, in order:
//! 1. two-layer QA models (purification, Clifford entanglement) first plan the
//!    step's measurements: per site ascending, one `f64` in [0,1) (measured
//!    iff `< p`), then for measured sites one `bool` for the half-step slot
//!    (true = after the first brick layer) and one `bool` for the outcome.
//!    Each site is measured at most once per step, at one of the two layer
//!    boundaries; this placement is what puts the bit-string transition at
//!    the same rate the quantum models see.
//! 2. per unitary brick layer, bricks ascending by left site:
//!    - CNOT brick: one `bool` (true = CNOT_L, false = CNOT_R);
//!    - mixed brick (non-Clifford model): one `u8` in 0..4
//!      (0 CNOT_L, 1 CNOT_R, 2 SWAP, 3 RZ), RZ then drawing 3 `f64` in [0,1)
//!      scaled to [0, 2pi); measurement rounds interleave after each layer
//!      per the plan above.
//! 3. single-round models (the non-Clifford single-layer model, and the
//!    non-QA models after their H layer of one `bool` per site): per site
//!    ascending, one `f64` in [0,1) (measured iff `< p`), then one `bool`
//!    for the outcome.

use super::*;
use crate::rng::stream;
use rand::Rng;
use std::f64::consts::TAU;

/// Brickwork pairs at the given offset (0 = even bonds, 1 = odd bonds) on a
/// chain of `length` sites. Periodic boundaries close the seam brick; open
/// boundaries skip it.
pub(crate) fn brick_pairs(length: u32, offset: u32, boundary: Boundary) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity((length / 2) as usize);
    let mut a = offset;
    while a + 1 < length {
        pairs.push((a, a + 1));
        a += 2;
    }
    if offset == 1 && boundary == Boundary::Periodic && length >= 2 {
        pairs.push((length - 1, 0));
    }
    pairs
}

struct Builder {
    circuit: Circuit,
}

impl Builder {
    fn push_layer(&mut self, time: u32, gates: Vec<Gate>) {
        if !gates.is_empty() {
            self.circuit.layers.push(Layer { time, gates });
        }
    }

    fn cnot_brick_layer<R: Rng>(&mut self, time: u32, pairs: &[(u32, u32)], rng: &mut R) {
        let gates = pairs
            .iter()
            .map(|&(a, b)| if rng.random::<bool>() { Gate::CnotL(a, b) } else { Gate::CnotR(a, b) })
            .collect();
        self.push_layer(time, gates);
    }

    fn cz_layer(&mut self, time: u32, pairs: &[(u32, u32)]) {
        self.push_layer(time, pairs.iter().map(|&(a, b)| Gate::Cz(a, b)).collect());
    }

    fn mixed_brick_layer<R: Rng>(&mut self, time: u32, pairs: &[(u32, u32)], rng: &mut R) {
        let gates = pairs
            .iter()
            .map(|&(a, b)| match rng.random_range(0..4u8) {
                0 => Gate::CnotL(a, b),
                1 => Gate::CnotR(a, b),
                2 => Gate::Swap(a, b),
                _ => {
                    let t = [
                        rng.random::<f64>() * TAU,
                        rng.random::<f64>() * TAU,
                        rng.random::<f64>() * TAU,
                    ];
                    Gate::Rz(a, b, t)
                }
            })
            .collect();
        self.push_layer(time, gates);
    }

    fn hadamard_layer<R: Rng>(&mut self, time: u32, sites: u32, rng: &mut R) {
        // one draw per site, in site order
        let gates =
            (0..sites).filter(|_| rng.random::<bool>()).map(Gate::H).collect::<Vec<_>>();
        self.push_layer(time, gates);
    }

    fn measure_layer<R: Rng>(&mut self, time: u32, sites: u32, rate: f64, rng: &mut R) {
        let mut plan = Vec::new();
        for site in 0..sites {
            if rng.random::<f64>() < rate {
                let outcome = rng.random::<bool>();
                plan.push((site, outcome));
            }
        }
        self.measure_round(time, &plan);
    }

    fn measure_round(&mut self, time: u32, sites: &[(u32, bool)]) {
        if sites.is_empty() {
            return;
        }
        let layer_index = self.circuit.layers.len() as u32;
        for &(site, outcome) in sites {
            self.circuit.measurement_events.push(MeasurementEvent {
                layer: layer_index,
                site,
                outcome,
            });
        }
        self.circuit.layers.push(Layer {
            time,
            gates: sites.iter().map(|&(s, _)| Gate::Measure(s)).collect(),
        });
    }
}

/// Per-step measurement plan for the two-layer models: each site measured at
/// most once, scheduled after the first or second brick layer.
pub(crate) struct MeasurePlan {
    pub first: Vec<(u32, bool)>,
    pub second: Vec<(u32, bool)>,
}

pub(crate) fn draw_measure_plan<R: Rng>(sites: u32, rate: f64, rng: &mut R) -> MeasurePlan {
    let mut plan = MeasurePlan { first: Vec::new(), second: Vec::new() };
    for site in 0..sites {
        if rng.random::<f64>() < rate {
            let slot_first = rng.random::<bool>();
            let outcome = rng.random::<bool>();
            if slot_first {
                plan.first.push((site, outcome));
            } else {
                plan.second.push((site, outcome));
            }
        }
    }
    plan
}

/// Generate the explicit circuit realization for `spec`.
pub fn generate_circuit(spec: &CircuitSpec) -> Result<Circuit> {
    spec.validate()?;
    let length = spec.length;
    let n_qubits = spec.n_qubits();
    let mut rng = spec.key().stream(stream::CIRCUIT);
    let mut b = Builder {
        circuit: Circuit {
            n_qubits,
            system: length,
            steps: spec.steps,
            layers: Vec::new(),
            measurement_events: Vec::new(),
            model: spec.model,
            boundary: spec.boundary,
        },
    };

    if spec.model.is_purification() {
        // EPR preparation: pair system site i with environment site L+i.
        b.push_layer(0, (0..length).map(|i| Gate::Cz(i, length + i)).collect());
    }

    let even = brick_pairs(length, 0, spec.boundary);
    let odd = brick_pairs(length, 1, spec.boundary);

    for t in 1..=spec.steps {
        match spec.model {
            Model::QaPurification => {
                let plan = draw_measure_plan(length, spec.rate, &mut rng);
                b.cnot_brick_layer(t, &even, &mut rng);
                b.measure_round(t, &plan.first);
                b.cnot_brick_layer(t, &odd, &mut rng);
                b.measure_round(t, &plan.second);
            }
            Model::QaCliffordEntanglement => {
                let plan = draw_measure_plan(length, spec.rate, &mut rng);
                b.cnot_brick_layer(t, &even, &mut rng);
                b.cz_layer(t, &even);
                b.measure_round(t, &plan.first);
                b.cnot_brick_layer(t, &odd, &mut rng);
                b.cz_layer(t, &odd);
                b.measure_round(t, &plan.second);
            }
            Model::NonQaClifford | Model::NonQaPurification => {
                b.cnot_brick_layer(t, &even, &mut rng);
                b.cz_layer(t, &even);
                b.cnot_brick_layer(t, &odd, &mut rng);
                b.cz_layer(t, &odd);
                b.hadamard_layer(t, length, &mut rng);
                b.measure_layer(t, length, spec.rate, &mut rng);
            }
            Model::QaNonClifford => {
                let pairs = if t % 2 == 1 { &even } else { &odd };
                b.mixed_brick_layer(t, pairs, &mut rng);
                b.measure_layer(t, length, spec.rate, &mut rng);
            }
        }
    }

    debug_assert!(b.circuit.validate().is_ok());
    Ok(b.circuit)
}
