//! Gate set, circuit representation and generators for the hybrid
//! automaton-circuit families.
//!
//! A [`Circuit`] is one fully explicit disorder realization: every random gate
//! choice and every measurement outcome is recorded, so any engine can replay
//! the same trajectory.

mod generate;
mod text;

pub use generate::generate_circuit;
pub use text::{parse_circuit, write_circuit};

use crate::bits::{BitString, Region};
use crate::error::{Error, Result};
use crate::phase::Phase;
use std::fmt;

/// Gate kinds. CNOT_L has its control on the first (left) site, CNOT_R on the
/// second; CZ and RZ are diagonal; the composite measurement is a projective Z
/// measurement followed by a Hadamard on the same site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    CnotL,
    CnotR,
    Cz,
    Swap,
    H,
    Rz,
    Measure,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::CnotL => "CNOT_L",
            GateKind::CnotR => "CNOT_R",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::H => "H",
            GateKind::Rz => "RZ",
            GateKind::Measure => "M",
        })
    }
}

/// A gate placed on one or two sites. Two-site variants carry distinct sites;
/// RZ additionally carries its three angles, so malformed combinations are
/// unrepresentable.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    CnotL(u32, u32),
    CnotR(u32, u32),
    Cz(u32, u32),
    Swap(u32, u32),
    H(u32),
    /// exp(i (t1 Z_a + t2 Z_b + t3 Z_a Z_b)) with z = +1 for bit 0, -1 for bit 1.
    Rz(u32, u32, [f64; 3]),
    Measure(u32),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::CnotL(..) => GateKind::CnotL,
            Gate::CnotR(..) => GateKind::CnotR,
            Gate::Cz(..) => GateKind::Cz,
            Gate::Swap(..) => GateKind::Swap,
            Gate::H(..) => GateKind::H,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Measure(..) => GateKind::Measure,
        }
    }

    pub fn sites(&self) -> (u32, Option<u32>) {
        match *self {
            Gate::CnotL(a, b) | Gate::CnotR(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => {
                (a, Some(b))
            }
            Gate::Rz(a, b, _) => (a, Some(b)),
            Gate::H(a) | Gate::Measure(a) => (a, None),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Measure(_))
    }

    /// Unitary that maps computational basis states to basis states.
    pub fn is_automaton(&self) -> bool {
        !matches!(self, Gate::H(_) | Gate::Measure(_))
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::Rz(..) | Gate::Measure(_))
    }

    /// The basis-state permutation restricted to the gate's sites, applied in
    /// place. Diagonal gates leave the string unchanged; H is rejected because
    /// it is not an automaton gate.
    pub fn permute(&self, bits: &mut BitString) -> Result<()> {
        match *self {
            Gate::CnotL(a, b) => {
                if bits.get(a as usize) {
                    bits.flip(b as usize);
                }
            }
            Gate::CnotR(a, b) => {
                if bits.get(b as usize) {
                    bits.flip(a as usize);
                }
            }
            Gate::Cz(..) | Gate::Rz(..) => {}
            Gate::Swap(a, b) => {
                let (va, vb) = (bits.get(a as usize), bits.get(b as usize));
                bits.set(a as usize, vb);
                bits.set(b as usize, va);
            }
            Gate::H(_) => {
                return Err(Error::UnsupportedGate {
                    kind: GateKind::H,
                    reason: "not an automaton gate; handled only by stabilizer/oracle engines",
                })
            }
            Gate::Measure(_) => {
                return Err(Error::UnsupportedGate {
                    kind: GateKind::Measure,
                    reason: "measurements carry no permutation",
                })
            }
        }
        Ok(())
    }

    /// Phase e^{i theta_m} contributed on the pre-permutation bit values.
    pub fn phase_on(&self, bits: &BitString) -> Result<Phase> {
        match *self {
            Gate::Cz(a, b) => {
                if bits.get(a as usize) && bits.get(b as usize) {
                    Ok(Phase::PI)
                } else {
                    Ok(Phase::ZERO)
                }
            }
            Gate::Rz(a, b, t) => {
                let za = if bits.get(a as usize) { -1.0 } else { 1.0 };
                let zb = if bits.get(b as usize) { -1.0 } else { 1.0 };
                Ok(Phase::from_radians(t[0] * za + t[1] * zb + t[2] * za * zb))
            }
            Gate::CnotL(..) | Gate::CnotR(..) | Gate::Swap(..) => Ok(Phase::ZERO),
            Gate::H(_) => Err(Error::UnsupportedGate {
                kind: GateKind::H,
                reason: "not an automaton gate",
            }),
            Gate::Measure(_) => Err(Error::UnsupportedGate {
                kind: GateKind::Measure,
                reason: "measurements carry no gate phase",
            }),
        }
    }

    /// Inverse gate; round-trips the permutation and negates the phase.
    pub fn inverse(&self) -> Result<Gate> {
        match self {
            Gate::Rz(a, b, t) => Ok(Gate::Rz(*a, *b, [-t[0], -t[1], -t[2]])),
            Gate::Measure(_) => Err(Error::NotInvertible(GateKind::Measure)),
            g => Ok((*g).clone()),
        }
    }
}

/// Gates applied in parallel; site sets are disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    /// Time step this layer belongs to (state "at time t" = after all layers
    /// with `time <= t`; preparation layers carry time 0).
    pub time: u32,
    pub gates: Vec<Gate>,
}

/// One recorded composite-measurement event: `layer` indexes into
/// `Circuit::layers`, and events appear in gate order within a layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementEvent {
    pub layer: u32,
    pub site: u32,
    pub outcome: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

/// The circuit families under study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// EPR pairs between system and environment, CNOT brickwork plus
    /// measurements confined to the system half.
    QaPurification,
    /// CNOT+CZ brickwork with per-site measurements, product initial state.
    QaCliffordEntanglement,
    /// Single brickwork layer per step drawn from {CNOT_L, CNOT_R, SWAP, RZ}.
    QaNonClifford,
    /// QaCliffordEntanglement plus a random H layer before the measurements
    /// (breaks the automaton property).
    NonQaClifford,
    /// Purification geometry driven by the NonQaClifford step dynamics.
    NonQaPurification,
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::QaPurification => "qa_purification",
            Model::QaCliffordEntanglement => "qa_clifford_entanglement",
            Model::QaNonClifford => "qa_nonclifford",
            Model::NonQaClifford => "nonqa_clifford",
            Model::NonQaPurification => "nonqa_purification",
        }
    }

    pub fn from_tag(s: &str) -> Option<Model> {
        Some(match s {
            "qa_purification" => Model::QaPurification,
            "qa_clifford_entanglement" => Model::QaCliffordEntanglement,
            "qa_nonclifford" => Model::QaNonClifford,
            "nonqa_clifford" => Model::NonQaClifford,
            "nonqa_purification" => Model::NonQaPurification,
            _ => return None,
        })
    }

    /// System and environment halves (purification geometries) or the plain chain.
    pub fn is_purification(&self) -> bool {
        matches!(self, Model::QaPurification | Model::NonQaPurification)
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Model::QaNonClifford)
    }

    pub fn is_automaton(&self) -> bool {
        !matches!(self, Model::NonQaClifford | Model::NonQaPurification)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Everything needed to regenerate one disorder realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitSpec {
    pub model: Model,
    /// System size L. Purification geometries use 2L qubits.
    pub length: u32,
    /// Number of time steps T.
    pub steps: u32,
    /// Per-site, per-step measurement probability.
    pub rate: f64,
    pub boundary: Boundary,
    pub master_seed: u64,
    pub trajectory: u64,
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::BadSpec(format!("measurement rate {} not in [0,1]", self.rate)));
        }
        if self.length < 2 || self.length % 2 != 0 {
            return Err(Error::BadSpec(format!(
                "brickwork models need even L >= 2, got {}",
                self.length
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> u32 {
        if self.model.is_purification() {
            2 * self.length
        } else {
            self.length
        }
    }

    pub fn key(&self) -> crate::rng::TrajectoryKey {
        crate::rng::TrajectoryKey::new(self.master_seed, self.trajectory)
    }
}

/// A time-ordered hybrid circuit for one disorder realization.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: u32,
    /// Size of the dynamical system region (sites `0..system`); equals
    /// `n_qubits` for non-purification models.
    pub system: u32,
    pub steps: u32,
    pub layers: Vec<Layer>,
    pub measurement_events: Vec<MeasurementEvent>,
    pub model: Model,
    pub boundary: Boundary,
}

impl Circuit {
    /// Recorded events belonging to layer `layer`, in gate order.
    pub fn events_for_layer(&self, layer: usize) -> &[MeasurementEvent] {
        let lo = self.measurement_events.partition_point(|e| (e.layer as usize) < layer);
        let hi = self.measurement_events.partition_point(|e| (e.layer as usize) <= layer);
        &self.measurement_events[lo..hi]
    }

    /// The system region A (all sites for entanglement models).
    pub fn system_region(&self) -> Region {
        Region::range(self.n_qubits as usize, 0, self.system as usize)
    }

    pub fn has_measurements(&self) -> bool {
        !self.measurement_events.is_empty()
    }

    /// The circuit truncated to layers with `time <= t` (events reindexed),
    /// i.e. the realization that prepares the state at time t.
    pub fn truncated(&self, t: u32) -> Circuit {
        let keep = self.layers.partition_point(|l| l.time <= t);
        Circuit {
            layers: self.layers[..keep].to_vec(),
            measurement_events: self
                .measurement_events
                .iter()
                .take_while(|e| (e.layer as usize) < keep)
                .copied()
                .collect(),
            steps: t.min(self.steps),
            ..self.clone()
        }
    }

    /// Structural invariants: site ranges, disjointness within layers,
    /// one-to-one correspondence between measure gates and recorded events.
    pub fn validate(&self) -> Result<()> {
        let mut cursor = 0usize;
        for (li, layer) in self.layers.iter().enumerate() {
            let mut seen = vec![false; self.n_qubits as usize];
            for gate in &layer.gates {
                let (a, b) = gate.sites();
                for site in std::iter::once(a).chain(b) {
                    if site >= self.n_qubits {
                        return Err(Error::SiteOutOfRange { site, n: self.n_qubits });
                    }
                    if std::mem::replace(&mut seen[site as usize], true) {
                        return Err(Error::BadSpec(format!(
                            "site {site} appears twice in layer {li}"
                        )));
                    }
                }
                if let (a, Some(b)) = gate.sites() {
                    if a == b {
                        return Err(Error::BadSpec(format!("two-site gate on equal sites {a}")));
                    }
                }
                if let Gate::Measure(site) = gate {
                    let Some(ev) = self.measurement_events.get(cursor) else {
                        return Err(Error::BadSpec("measure gate without recorded event".into()));
                    };
                    if ev.layer as usize != li || ev.site != *site {
                        return Err(Error::BadSpec(format!(
                            "event {cursor} does not match measure gate at layer {li} site {site}"
                        )));
                    }
                    cursor += 1;
                }
            }
        }
        if cursor != self.measurement_events.len() {
            return Err(Error::BadSpec("recorded events without measure gates".into()));
        }
        Ok(())
    }
}
