//! Exact dense statevector simulation of small systems.
//!
//! This is the ground-truth oracle for the stabilizer and Monte Carlo engines.
//! It is deliberately unoptimized and hard-capped at 14 qubits.

use crate::bits::{BitString, Region};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const MAX_QUBITS: u32 = 14;

const PROB_FLOOR: f64 = 1e-9;

#[derive(Clone)]
pub struct DenseState {
    n: u32,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// |+x>^n, the uniform superposition over all basis states.
    pub fn plus_state(n: u32) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::OracleTooLarge { n, max: MAX_QUBITS });
        }
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(DenseState { n, amps: vec![a; dim] })
    }

    /// Computational basis state |m>.
    pub fn basis_state(n: u32, m: &BitString) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::OracleTooLarge { n, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[m.to_index()] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn amplitude(&self, m: &BitString) -> Complex64 {
        self.amps[m.to_index()]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let dim = self.amps.len();
        match *gate {
            Gate::CnotL(a, b) | Gate::CnotR(a, b) => {
                let (ctrl, tgt) = match gate {
                    Gate::CnotL(..) => (bit(a), bit(b)),
                    _ => (bit(b), bit(a)),
                };
                for i in 0..dim {
                    if i & ctrl != 0 && i & tgt == 0 {
                        self.amps.swap(i, i | tgt);
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (ma, mb) = (bit(a), bit(b));
                for i in 0..dim {
                    if i & ma != 0 && i & mb == 0 {
                        self.amps.swap(i, (i & !ma) | mb);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let m = bit(a) | bit(b);
                for i in 0..dim {
                    if i & m == m {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            Gate::Rz(a, b, t) => {
                let (ma, mb) = (bit(a), bit(b));
                for i in 0..dim {
                    let za = if i & ma == 0 { 1.0 } else { -1.0 };
                    let zb = if i & mb == 0 { 1.0 } else { -1.0 };
                    let theta = t[0] * za + t[1] * zb + t[2] * za * zb;
                    self.amps[i] *= Complex64::from_polar(1.0, theta);
                }
            }
            Gate::H(a) => self.hadamard(a),
            Gate::Measure(_) => {
                return Err(Error::UnsupportedGate {
                    kind: crate::circuit::GateKind::Measure,
                    reason: "use composite_measure with an outcome",
                })
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, site: u32) {
        let m = bit(site);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (u, v) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (u + v) * s;
                self.amps[i | m] = (u - v) * s;
            }
        }
    }

    /// Project site onto `outcome`, renormalize, then apply H there. Returns
    /// the Born probability of the outcome; errors if it is (numerically)
    /// zero rather than renormalizing a null vector.
    pub fn composite_measure(&mut self, site: u32, outcome: bool) -> Result<f64> {
        let m = bit(site);
        let keep = if outcome { m } else { 0 };
        let prob: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i & m == keep)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if prob < PROB_FLOOR {
            return Err(Error::ZeroProbability);
        }
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != keep {
                *a = Complex64::new(0.0, 0.0);
            } else {
                *a *= scale;
            }
        }
        self.hadamard(site);
        Ok(prob)
    }

    /// Walk a full circuit, forcing each recorded outcome. Outcomes with zero
    /// Born probability (possible only outside the automaton class) fall back
    /// to the deterministic value, mirroring the stabilizer engine's override
    /// rule; the count of overrides is returned.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<u32> {
        let mut overrides = 0;
        for (li, layer) in c.layers.iter().enumerate() {
            let mut events = c.events_for_layer(li).iter();
            for gate in &layer.gates {
                if let Gate::Measure(site) = gate {
                    let ev = events.next().expect("event per measure gate");
                    match self.composite_measure(*site, ev.outcome) {
                        Ok(_) => {}
                        Err(Error::ZeroProbability) => {
                            overrides += 1;
                            self.composite_measure(*site, !ev.outcome)?;
                        }
                        Err(e) => return Err(e),
                    }
                } else {
                    self.apply_gate(gate)?;
                }
            }
        }
        Ok(overrides)
    }

    /// -log2 Tr rho_A^2.
    pub fn renyi2_exact(&self, region: &Region) -> f64 {
        -self.purity_exact(region).log2()
    }

    /// Tr rho_A^2 by direct accumulation over the reduced density matrix
    /// elements (never materializing the full density matrix).
    pub fn purity_exact(&self, region: &Region) -> f64 {
        assert_eq!(region.total(), self.n as usize);
        let a_masks = spread_masks(region);
        let b_masks = spread_masks(&region.complement());
        let mut purity = 0.0;
        for &ai in &a_masks {
            for &aj in &a_masks {
                let mut rho_ij = Complex64::new(0.0, 0.0);
                for &bm in &b_masks {
                    rho_ij += self.amps[(ai | bm) as usize] * self.amps[(aj | bm) as usize].conj();
                }
                purity += rho_ij.norm_sqr();
            }
        }
        purity
    }

    /// <psi| P |psi> for a signed Pauli string given as (x bits, z bits, sign),
    /// in the Hermitian convention (site with x=z=1 is Y).
    pub fn pauli_expectation(&self, x: &BitString, z: &BitString, negative: bool) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let xw = x.words()[0];
        let zw = z.words()[0];
        // P|i> = sign * i^{#Y} * (-1)^{|i & z|} |i ^ x>, Hermitian convention (x=z=1 is Y)
        let base = match (xw & zw).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        } * if negative { -1.0 } else { 1.0 };
        for (i, a) in self.amps.iter().enumerate() {
            let flipped = i ^ xw as usize;
            let zsign = if ((i as u64 & zw).count_ones()) % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.amps[flipped].conj() * base * zsign * a;
        }
        acc
    }
}

#[inline]
fn bit(site: u32) -> usize {
    1usize << site
}

/// All 2^|R| index masks with the region's sites enumerated in order.
fn spread_masks(region: &Region) -> Vec<u64> {
    let sites = region.sites();
    let mut masks = Vec::with_capacity(1 << sites.len());
    for cfg in 0u64..(1 << sites.len()) {
        let mut m = 0u64;
        for (k, &s) in sites.iter().enumerate() {
            if (cfg >> k) & 1 == 1 {
                m |= 1 << s;
            }
        }
        masks.push(m);
    }
    masks
}
