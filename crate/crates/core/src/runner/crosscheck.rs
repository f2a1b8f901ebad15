//! Cross-engine agreement checks against the dense oracle.
//!
//! These are the same comparisons the acceptance suite runs; the CLI exposes
//! them as `crosscheck` so a user can validate a build in one command.

use crate::bits::{BitString, Region};
use crate::circuit::{generate_circuit, Boundary, CircuitSpec, Model};
use crate::error::{Error, Result};
use crate::mc::{backward_amplitude, estimate_renyi2, exhaustive_purity, SamplePlan};
use crate::oracle::DenseState;
use crate::stabilizer::Tableau;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrosscheckLevel {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub passed: bool,
    pub lines: Vec<String>,
}

fn spec(model: Model, l: u32, t: u32, p: f64, seed: u64, traj: u64) -> CircuitSpec {
    CircuitSpec {
        model,
        length: l,
        steps: t,
        rate: p,
        boundary: Boundary::Periodic,
        master_seed: seed,
        trajectory: traj,
    }
}

fn all_contiguous_regions(n: usize) -> Vec<Region> {
    let mut out = Vec::new();
    for lo in 0..n {
        for hi in lo + 1..=n {
            out.push(Region::range(n, lo, hi));
        }
    }
    out
}

/// Stabilizer entropies must equal the oracle's exactly (integer match) on
/// every contiguous probe region of every sampled circuit. Returns the
/// largest absolute deviation seen.
pub fn check_stabilizer_vs_oracle(
    model: Model,
    circuits: u64,
    l: u32,
    t: u32,
    p: f64,
    seed: u64,
) -> Result<f64> {
    let devs: Result<Vec<f64>> = (0..circuits)
        .into_par_iter()
        .map(|traj| {
            let c = generate_circuit(&spec(model, l, t, p, seed, traj))?;
            let n = c.n_qubits as usize;
            let mut tab = Tableau::plus_state(n);
            let mut psi = DenseState::plus_state(c.n_qubits)?;
            tab.apply_circuit(&c)?;
            psi.apply_circuit(&c)?;
            let mut worst = 0.0f64;
            for r in all_contiguous_regions(n) {
                let d = (tab.renyi_entropy(&r) as f64 - psi.renyi2_exact(&r)).abs();
                worst = worst.max(d);
            }
            Ok(worst)
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// |<m|U~|psi_0> - e^{i phi}/sqrt(2^N)| over every basis state of sampled
/// automaton circuits; exhaustive in m.
pub fn check_amplitudes_exhaustive(
    model: Model,
    circuits: u64,
    l: u32,
    t: u32,
    p: f64,
    seed: u64,
) -> Result<f64> {
    let devs: Result<Vec<f64>> = (0..circuits)
        .into_par_iter()
        .map(|traj| {
            let c = generate_circuit(&spec(model, l, t, p, seed, traj))?;
            let n = c.n_qubits;
            let mut psi = DenseState::plus_state(n)?;
            let overrides = psi.apply_circuit(&c)?;
            if overrides != 0 {
                return Err(Error::EngineMismatch(
                    "automaton circuit produced an outcome override".into(),
                ));
            }
            let norm = 1.0 / (1u64 << n) as f64;
            let mut worst = 0.0f64;
            for idx in 0..(1usize << n) {
                let m = BitString::from_index(n as usize, idx);
                let predicted = backward_amplitude(&c, &m)?.to_complex() * norm.sqrt();
                let actual = psi.amplitude(&m);
                worst = worst.max((predicted - actual).norm());
            }
            Ok(worst)
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// Exhaustive-quadruple purity against the oracle's Tr rho_A^2.
pub fn check_exhaustive_purity(
    model: Model,
    circuits: u64,
    l: u32,
    t: u32,
    p: f64,
    seed: u64,
) -> Result<f64> {
    let devs: Result<Vec<f64>> = (0..circuits)
        .into_par_iter()
        .map(|traj| {
            let c = generate_circuit(&spec(model, l, t, p, seed, traj))?;
            let region = Region::range(c.n_qubits as usize, 0, (l / 2) as usize);
            let mut psi = DenseState::plus_state(c.n_qubits)?;
            psi.apply_circuit(&c)?;
            let exact = exhaustive_purity(&c, &region)?;
            Ok((exact - psi.purity_exact(&region)).abs())
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// MC Renyi-2 against the oracle on non-Clifford circuits: every resolvable
/// case with oracle entropy <= `s_cap` must agree within 3 stderr. Returns
/// (worst sigma distance, cases compared).
pub fn check_mc_vs_oracle(
    circuits: u64,
    l: u32,
    t: u32,
    p: f64,
    s_cap: f64,
    plan: SamplePlan,
    seed: u64,
) -> Result<(f64, u64)> {
    let results: Result<Vec<Option<f64>>> = (0..circuits)
        .into_par_iter()
        .map(|traj| {
            let sp = spec(Model::QaNonClifford, l, t, p, seed, traj);
            let c = generate_circuit(&sp)?;
            let region = Region::range(l as usize, 0, (l / 2) as usize);
            let mut psi = DenseState::plus_state(c.n_qubits)?;
            psi.apply_circuit(&c)?;
            let target = psi.renyi2_exact(&region);
            if target > s_cap {
                return Ok(None);
            }
            let est = estimate_renyi2(&c, &region, plan, sp.key())?;
            Ok(Some((est.s2 - target).abs() / est.stderr.max(1e-12)))
        })
        .collect();
    let sigmas: Vec<f64> = results?.into_iter().flatten().collect();
    let count = sigmas.len() as u64;
    Ok((sigmas.into_iter().fold(0.0, f64::max), count))
}

/// MC Renyi-2 against the exact stabilizer value on a Clifford circuit, for
/// each probe region (prefixes of the given sizes).
pub fn check_mc_vs_stabilizer(
    l: u32,
    t: u32,
    p: f64,
    prefix_sizes: &[u32],
    plan: SamplePlan,
    seed: u64,
) -> Result<Vec<(u32, f64, f64, f64)>> {
    let sp = spec(Model::QaCliffordEntanglement, l, t, p, seed, 0);
    let c = generate_circuit(&sp)?;
    let mut tab = Tableau::plus_state(l as usize);
    tab.apply_circuit(&c)?;
    let mut out = Vec::new();
    for &k in prefix_sizes {
        let region = Region::range(l as usize, 0, k as usize);
        let exact = tab.renyi_entropy(&region) as f64;
        let est = estimate_renyi2(&c, &region, plan, sp.key())?;
        let sigma = (est.s2 - exact).abs() / est.stderr.max(1e-12);
        out.push((k, exact, est.s2, sigma));
    }
    Ok(out)
}

/// Run the standard battery; `Quick` trims the circuit counts.
pub fn crosscheck(level: CrosscheckLevel, seed: u64) -> Result<CrosscheckReport> {
    let (n_stab, n_amp, n_mc) = match level {
        CrosscheckLevel::Quick => (20, 5, 3),
        CrosscheckLevel::Full => (100, 20, 20),
    };
    let mut lines = Vec::new();
    let mut passed = true;

    for model in [Model::QaCliffordEntanglement, Model::QaPurification, Model::NonQaClifford] {
        let l = if model.is_purification() { 4 } else { 8 };
        let dev = check_stabilizer_vs_oracle(model, n_stab, l, 20, 0.15, seed)?;
        let ok = dev == 0.0 || dev < 1e-8;
        passed &= ok;
        lines.push(format!(
            "stabilizer_vs_oracle model={} circuits={n_stab} max_dev={dev:.3e} {}",
            model.tag(),
            if ok { "pass" } else { "FAIL" }
        ));
    }

    let dev = check_amplitudes_exhaustive(Model::QaNonClifford, n_amp, 6, 15, 0.2, seed)?;
    let ok = dev < 1e-10;
    passed &= ok;
    lines.push(format!(
        "backward_amplitude_vs_oracle circuits={n_amp} max_dev={dev:.3e} {}",
        if ok { "pass" } else { "FAIL" }
    ));

    let dev = check_exhaustive_purity(Model::QaNonClifford, 2.min(n_amp), 6, 10, 0.2, seed)?;
    let ok = dev < 1e-10;
    passed &= ok;
    lines.push(format!(
        "exhaustive_purity_vs_oracle max_dev={dev:.3e} {}",
        if ok { "pass" } else { "FAIL" }
    ));

    let plan = SamplePlan { initial: 20_000, ceiling: 2_000_000 };
    let (sigma, cases) = check_mc_vs_oracle(n_mc, 10, 20, 0.1, 5.0, plan, seed)?;
    let ok = sigma < 3.0 && cases > 0;
    passed &= ok;
    lines.push(format!(
        "mc_vs_oracle cases={cases} worst_sigma={sigma:.2} {}",
        if ok { "pass" } else { "FAIL" }
    ));

    Ok(CrosscheckReport { passed, lines })
}
