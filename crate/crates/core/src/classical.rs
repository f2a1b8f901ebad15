//! Classical side of the mapping: paired bit-string dynamics (Hamming
//! distance, front spreading) and the bond directed-percolation reference
//! model.
//!
//! Two implementations of the bit-string dynamics exist on purpose. The
//! circuit-driven path ([`evolve_pair`]) replays a generated [`Circuit`] on an
//! explicit pair of strings; the standalone path ([`evolve_difference`])
//! evolves only the difference field h = a xor b with its own copy of the
//! update rules, mirroring the circuit generator's documented draw order so
//! that equal seeds give bit-identical trajectories. Divergence between the
//! two is a test failure, which guards against the quantum and classical
//! models drifting apart.

use crate::analysis::{fit_linear, fit_quadratic, log_times, LinearFit};
use crate::bits::BitString;
use crate::circuit::{generate_circuit, Boundary, Circuit, CircuitSpec, Gate, Model};
use crate::error::{Error, Result};
use crate::rng::{seed_for, stream};
use rand::Rng;
use rayon::prelude::*;

/// Initial condition for a bit-string pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairInit {
    /// Two independent uniform strings (mean Hamming distance L/2).
    RandomPair,
    /// Equal strings except for a four-site block at mid-system.
    SingleDifference,
    Identical,
}

/// D(t) per step plus optional difference-field snapshots.
#[derive(Clone, Debug)]
pub struct PairTrace {
    /// Hamming distance over the system region at t = 0..=T.
    pub hamming: Vec<u32>,
    /// (t, h(.,t)) snapshots over the system sites, if requested.
    pub field: Vec<(u32, BitString)>,
}

/// Apply one layer of a recorded circuit to a pair of basis strings. The
/// composite measurement forces both bits at the site to the recorded outcome.
pub fn step_pair_through_layer(
    c: &Circuit,
    layer_index: usize,
    a: &mut BitString,
    b: &mut BitString,
) -> Result<()> {
    let layer = &c.layers[layer_index];
    let mut events = c.events_for_layer(layer_index).iter();
    for gate in &layer.gates {
        if let Gate::Measure(site) = gate {
            let ev = events.next().expect("event per measure gate");
            a.set(*site as usize, ev.outcome);
            b.set(*site as usize, ev.outcome);
        } else {
            gate.permute(a)?;
            gate.permute(b)?;
        }
    }
    Ok(())
}

fn init_pair(spec: &CircuitSpec, init: PairInit, n: usize) -> (BitString, BitString) {
    let mut rng = spec.key().stream(stream::INIT);
    let a = BitString::random(n, &mut rng);
    let mut b = match init {
        PairInit::RandomPair => BitString::random(n, &mut rng),
        PairInit::SingleDifference | PairInit::Identical => a.clone(),
    };
    if init == PairInit::SingleDifference {
        for s in seed_sites(spec.length) {
            b.flip(s);
        }
    }
    (a, b)
}

/// The four-site seed block at mid-system.
fn seed_sites(length: u32) -> std::ops::Range<usize> {
    let mid = length as usize / 2;
    mid.saturating_sub(2)..(mid + 2).min(length as usize)
}

/// Evolve a pair of bit-strings through the full generated circuit for
/// `spec`, recording the Hamming distance over the system region each step
/// and the difference field at `field_times`.
pub fn evolve_pair(spec: &CircuitSpec, init: PairInit, field_times: &[u32]) -> Result<PairTrace> {
    let c = generate_circuit(spec)?;
    let n = c.n_qubits as usize;
    let region = c.system_region();
    let (mut a, mut b) = init_pair(spec, init, n);
    let mut hamming = Vec::with_capacity(spec.steps as usize + 1);
    let mut field = Vec::new();
    let mut li = 0;
    for t in 0..=spec.steps {
        while li < c.layers.len() && c.layers[li].time <= t {
            step_pair_through_layer(&c, li, &mut a, &mut b)?;
            li += 1;
        }
        hamming.push(a.hamming_on(&b, &region));
        if field_times.contains(&t) {
            let mut h = BitString::zeros(spec.length as usize);
            for s in 0..spec.length as usize {
                h.set(s, a.get(s) != b.get(s));
            }
            field.push((t, h));
        }
    }
    Ok(PairTrace { hamming, field })
}

/// Standalone difference-field dynamics. Supports the automaton models only
/// (H layers break the classical picture). Draws mirror [`generate_circuit`]
/// exactly: CNOT direction per brick, gate kind and discarded RZ angles for
/// the mixed bricks, and per-site measurement Bernoulli plus discarded outcome
/// bits, all in the generator's order. Once h = 0 the trajectory is absorbed
/// and the remaining steps are filled without further draws.
pub fn evolve_difference(
    spec: &CircuitSpec,
    init: PairInit,
    field_times: &[u32],
) -> Result<PairTrace> {
    spec.validate()?;
    if !spec.model.is_automaton() {
        return Err(Error::EngineMismatch(
            "difference-field dynamics are defined for automaton models only".into(),
        ));
    }
    let length = spec.length as usize;
    let mut h = {
        let mut rng = spec.key().stream(stream::INIT);
        let a = BitString::random(length_words_len(spec), &mut rng);
        match init {
            PairInit::RandomPair => {
                let b = BitString::random(length_words_len(spec), &mut rng);
                let mut h = a;
                h.xor_with(&b);
                truncate_to_system(h, length)
            }
            PairInit::SingleDifference => {
                let mut h = BitString::zeros(length);
                for s in seed_sites(spec.length) {
                    h.set(s, true);
                }
                h
            }
            PairInit::Identical => BitString::zeros(length),
        }
    };
    let mut rng = spec.key().stream(stream::CIRCUIT);
    let even = brick_pairs_classical(spec.length, 0, spec.boundary);
    let odd = brick_pairs_classical(spec.length, 1, spec.boundary);
    let mut hamming = Vec::with_capacity(spec.steps as usize + 1);
    let mut field = Vec::new();
    let record = |t: u32, h: &BitString, field: &mut Vec<(u32, BitString)>| {
        if field_times.contains(&t) {
            field.push((t, h.clone()));
        }
    };
    hamming.push(h.count_ones());
    record(0, &h, &mut field);
    let mut absorbed = h.is_zero();
    for t in 1..=spec.steps {
        if absorbed {
            hamming.push(0);
            record(t, &h, &mut field);
            continue;
        }
        match spec.model {
            Model::QaPurification | Model::QaCliffordEntanglement => {
                // measurement plan first, mirroring the generator's draws
                let mut first: Vec<u32> = Vec::new();
                let mut second: Vec<u32> = Vec::new();
                for site in 0..spec.length {
                    if rng.random::<f64>() < spec.rate {
                        let slot_first = rng.random::<bool>();
                        let _outcome = rng.random::<bool>();
                        if slot_first {
                            first.push(site);
                        } else {
                            second.push(site);
                        }
                    }
                }
                for (pairs, kills) in [(&even, &first), (&odd, &second)] {
                    for &(pa, pb) in pairs.iter() {
                        // CNOT spreads the difference from control to target
                        if rng.random::<bool>() {
                            if h.get(pa as usize) {
                                h.flip(pb as usize);
                            }
                        } else if h.get(pb as usize) {
                            h.flip(pa as usize);
                        }
                    }
                    for &site in kills.iter() {
                        h.set(site as usize, false);
                    }
                }
                hamming.push(h.count_ones());
                record(t, &h, &mut field);
                absorbed = h.is_zero();
                continue;
            }
            Model::QaNonClifford => {
                let pairs = if t % 2 == 1 { &even } else { &odd };
                for &(pa, pb) in pairs {
                    match rng.random_range(0..4u8) {
                        0 => {
                            if h.get(pa as usize) {
                                h.flip(pb as usize);
                            }
                        }
                        1 => {
                            if h.get(pb as usize) {
                                h.flip(pa as usize);
                            }
                        }
                        2 => {
                            let (va, vb) = (h.get(pa as usize), h.get(pb as usize));
                            h.set(pa as usize, vb);
                            h.set(pb as usize, va);
                        }
                        _ => {
                            // RZ is diagonal; burn its three angle draws
                            let _ = rng.random::<f64>();
                            let _ = rng.random::<f64>();
                            let _ = rng.random::<f64>();
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        for site in 0..length {
            if rng.random::<f64>() < spec.rate {
                let _outcome = rng.random::<bool>();
                h.set(site, false);
            }
        }
        hamming.push(h.count_ones());
        record(t, &h, &mut field);
        absorbed = h.is_zero();
    }
    Ok(PairTrace { hamming, field })
}

/// Number of sites whose random initial bits must be drawn to mirror the
/// circuit-driven path (purification circuits carry an environment half).
fn length_words_len(spec: &CircuitSpec) -> usize {
    spec.n_qubits() as usize
}

fn truncate_to_system(h: BitString, length: usize) -> BitString {
    if h.len() == length {
        return h;
    }
    let mut out = BitString::zeros(length);
    for s in 0..length {
        out.set(s, h.get(s));
    }
    out
}

fn brick_pairs_classical(length: u32, offset: u32, boundary: Boundary) -> Vec<(u32, u32)> {
    // same pairing the circuit generator uses
    let mut pairs = Vec::with_capacity((length / 2) as usize);
    let mut a = offset;
    while a + 1 < length {
        pairs.push((a, a + 1));
        a += 2;
    }
    if offset == 1 && boundary == Boundary::Periodic {
        pairs.push((length - 1, 0));
    }
    pairs
}

/// Ensemble of difference-field trajectories, sampled at `times`; rows are
/// D(t) per trajectory.
pub fn hamming_ensemble(
    base: &CircuitSpec,
    init: PairInit,
    trials: u64,
    times: &[u32],
) -> Result<Vec<Vec<f64>>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut spec = *base;
            spec.trajectory = trial;
            let trace = evolve_difference(&spec, init, &[])?;
            Ok(times.iter().map(|&t| trace.hamming[t as usize] as f64).collect())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bond directed percolation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpInit {
    SingleSeed,
    FullyOccupied,
}

/// Bond DP on the tilted square lattice: each site at t+1 has two parent
/// bonds, from sites x and x+1 at time t (periodic ring); a bond is blocked
/// with probability `block_prob`.
#[derive(Clone, Copy, Debug)]
pub struct BondDpSpec {
    pub block_prob: f64,
    pub length: u32,
    pub steps: u32,
    pub init: DpInit,
    pub master_seed: u64,
}

/// Occupation counts N(t), t = 0..=T, for one realization. Bonds are drawn
/// only out of occupied parents (parents ascending, same-column bond before
/// the left bond), so the all-empty row is absorbing and costs nothing.
pub fn run_bond_dp(spec: &BondDpSpec, trajectory: u64) -> Vec<u32> {
    let l = spec.length as usize;
    let mut rng = seed_for(spec.master_seed, trajectory, stream::BOND_DP);
    let mut occ = BitString::zeros(l);
    match spec.init {
        DpInit::SingleSeed => occ.set(l / 2, true),
        DpInit::FullyOccupied => {
            for s in 0..l {
                occ.set(s, true);
            }
        }
    }
    let mut counts = Vec::with_capacity(spec.steps as usize + 1);
    counts.push(occ.count_ones());
    let mut next = BitString::zeros(l);
    for _ in 1..=spec.steps {
        if occ.is_zero() {
            counts.push(0);
            continue;
        }
        for w in next.words_mut() {
            *w = 0;
        }
        for (wi, &word) in occ.words().iter().enumerate() {
            let mut m = word;
            while m != 0 {
                let x = wi * 64 + m.trailing_zeros() as usize;
                m &= m - 1;
                if rng.random::<f64>() >= spec.block_prob {
                    next.set(x, true);
                }
                if rng.random::<f64>() >= spec.block_prob {
                    next.set((x + l - 1) % l, true);
                }
            }
        }
        std::mem::swap(&mut occ, &mut next);
        counts.push(occ.count_ones());
    }
    counts
}

/// N(t) rows over an ensemble of bond-DP realizations at `times`.
pub fn bond_dp_ensemble(spec: &BondDpSpec, trials: u64, times: &[u32]) -> Vec<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let counts = run_bond_dp(spec, trial);
            times.iter().map(|&t| counts[t as usize] as f64).collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Critical-point scan
// ---------------------------------------------------------------------------

/// Which order-parameter family a scan runs on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanFamily {
    /// Bit-string model of the CNOT-brickwork (purification/entanglement)
    /// circuits; order parameter D(t) from random pairs.
    Purification,
    /// Bit-string model of the mixed-brick circuit family.
    NonClifford,
    /// Bond DP from the fully occupied row; the grid is over block_prob.
    BondDp,
}

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub family: ScanFamily,
    pub grid: Vec<f64>,
    pub length: u32,
    pub steps: u32,
    pub trials: u64,
    pub master_seed: u64,
    /// Fit window in t; defaults to [100, T/10] when None.
    pub window: Option<(f64, f64)>,
    pub bootstrap: u32,
}

#[derive(Clone, Debug)]
pub struct PcEstimate {
    pub p_c: f64,
    /// 95% bootstrap confidence interval.
    pub ci: (f64, f64),
    /// (p, log-log curvature) over the usable grid points.
    pub curvatures: Vec<(f64, f64)>,
}

fn decay_rows(spec: &ScanSpec, p: f64, times: &[u32]) -> Result<Vec<Vec<f64>>> {
    match spec.family {
        ScanFamily::Purification | ScanFamily::NonClifford => {
            let model = if spec.family == ScanFamily::Purification {
                Model::QaPurification
            } else {
                Model::QaNonClifford
            };
            let base = CircuitSpec {
                model,
                length: spec.length,
                steps: spec.steps,
                rate: p,
                boundary: Boundary::Open,
                master_seed: spec.master_seed,
                trajectory: 0,
            };
            hamming_ensemble(&base, PairInit::RandomPair, spec.trials, times)
        }
        ScanFamily::BondDp => {
            let dp = BondDpSpec {
                block_prob: p,
                length: spec.length,
                steps: spec.steps,
                init: DpInit::FullyOccupied,
                master_seed: spec.master_seed,
            };
            Ok(bond_dp_ensemble(&dp, spec.trials, times))
        }
    }
}

/// Curvature of log D-bar vs log t (quadratic coefficient); positive when the
/// curve bends up (subcritical saturation), negative when it bends down
/// (supercritical death).
fn log_curvature(times: &[u32], mean: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(mean)
        .filter(|&(_, &m)| m > 0.0)
        .map(|(&t, &m)| ((t as f64).ln(), m.ln()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    fit_quadratic(&xs, &ys).ok().map(|c| c[2])
}

/// Root of curvature(p) by linear interpolation at the sign-change bracket.
/// Curvature is strongly nonlinear away from the transition (supercritical
/// curves bend hard), so a global fit would drag the root; only the two
/// bracketing grid points enter.
fn curvature_root(ps: &[f64], cs: &[f64]) -> Option<f64> {
    let k = (0..cs.len().checked_sub(1)?).find(|&i| cs[i] > 0.0 && cs[i + 1] <= 0.0)?;
    let (p0, p1, c0, c1) = (ps[k], ps[k + 1], cs[k], cs[k + 1]);
    if c0 == c1 {
        return None;
    }
    Some(p0 + (p1 - p0) * c0 / (c0 - c1))
}

/// Locate the critical point as the grid value whose decay curve is
/// straightest in log-log coordinates: fit the quadratic curvature per p,
/// then the root of curvature(p). The CI is a percentile bootstrap over
/// trajectories.
pub fn scan_critical_point(spec: &ScanSpec) -> Result<PcEstimate> {
    if spec.grid.len() < 3 {
        return Err(Error::BadSpec("scan needs >= 3 grid points".into()));
    }
    let window = spec.window.unwrap_or((100.0, spec.steps as f64 / 10.0));
    let (lo, hi) = (window.0.max(1.0) as u32, (window.1 as u32).min(spec.steps));
    if lo >= hi {
        return Err(Error::BadSpec("empty scan window".into()));
    }
    let times = log_times(lo, hi, 24);
    let mut grid_rows = Vec::new();
    for &p in &spec.grid {
        grid_rows.push((p, decay_rows(spec, p, &times)?));
    }

    let mean_of = |rows: &[Vec<f64>]| -> Vec<f64> {
        let n = rows.len() as f64;
        (0..times.len()).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / n).collect()
    };

    let mut ps = Vec::new();
    let mut cs = Vec::new();
    for (p, rows) in &grid_rows {
        if let Some(c) = log_curvature(&times, &mean_of(rows)) {
            ps.push(*p);
            cs.push(c);
        }
    }
    if cs.iter().all(|&c| c > 0.0) || cs.iter().all(|&c| c < 0.0) || ps.len() < 3 {
        return Err(Error::NoStraddle);
    }
    let p_c = curvature_root(&ps, &cs).ok_or(Error::NoStraddle)?;

    // percentile bootstrap over trajectories, resampling every grid point
    let mut roots = Vec::new();
    for b in 0..spec.bootstrap {
        let mut rng = seed_for(spec.master_seed, b as u64, stream::BOOTSTRAP);
        let mut bps = Vec::new();
        let mut bcs = Vec::new();
        for (p, rows) in &grid_rows {
            let n = rows.len();
            let mut acc = vec![0.0; times.len()];
            for _ in 0..n {
                let row = &rows[rng.random_range(0..n)];
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            for a in &mut acc {
                *a /= n as f64;
            }
            if let Some(c) = log_curvature(&times, &acc) {
                bps.push(*p);
                bcs.push(c);
            }
        }
        if bps.len() >= 3 {
            if let Some(r) = curvature_root(&bps, &bcs) {
                roots.push(r);
            }
        }
    }
    let ci = if roots.len() >= 8 {
        roots.sort_by(f64::total_cmp);
        let lo = roots[(roots.len() as f64 * 0.025) as usize];
        let hi = roots[((roots.len() as f64 * 0.975) as usize).min(roots.len() - 1)];
        (lo, hi)
    } else {
        (p_c, p_c)
    };
    Ok(PcEstimate { p_c, ci, curvatures: ps.into_iter().zip(cs).collect() })
}

// ---------------------------------------------------------------------------
// Front spreading
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FrontResult {
    /// Snapshot times.
    pub times: Vec<u32>,
    /// Mean difference field per snapshot, indexed [time][site].
    pub mean_field: Vec<Vec<f64>>,
    /// Mean D(t) at every step.
    pub d_mean: Vec<f64>,
    /// Right-front position per snapshot and its linear fit against t.
    pub front_positions: Vec<f64>,
    pub velocity: LinearFit,
    /// Profiles rescaled to (x - x0 - v t) / sqrt(t) per snapshot.
    pub rescaled: Vec<(u32, Vec<(f64, f64)>)>,
}

/// Mean front profile from the single-difference init; `snapshots` times must
/// be within 1..=T.
pub fn front_profile(base: &CircuitSpec, trials: u64, snapshots: &[u32]) -> Result<FrontResult> {
    let length = base.length as usize;
    let field_acc: Result<Vec<(Vec<Vec<f64>>, Vec<f64>)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut spec = *base;
            spec.trajectory = trial;
            let trace = evolve_difference(&spec, PairInit::SingleDifference, snapshots)?;
            let mut fields = vec![vec![0.0; length]; snapshots.len()];
            for (k, (_, h)) in trace.field.iter().enumerate() {
                for s in 0..length {
                    if h.get(s) {
                        fields[k][s] = 1.0;
                    }
                }
            }
            let d: Vec<f64> = trace.hamming.iter().map(|&d| d as f64).collect();
            Ok((fields, d))
        })
        .collect();
    let mut mean_field = vec![vec![0.0; length]; snapshots.len()];
    let mut d_mean = vec![0.0; base.steps as usize + 1];
    let per_traj = field_acc?;
    for (fields, d) in &per_traj {
        for (acc, f) in mean_field.iter_mut().zip(fields) {
            for (a, v) in acc.iter_mut().zip(f) {
                *a += v;
            }
        }
        for (a, v) in d_mean.iter_mut().zip(d) {
            *a += v;
        }
    }
    let nt = trials as f64;
    mean_field.iter_mut().for_each(|f| f.iter_mut().for_each(|v| *v /= nt));
    d_mean.iter_mut().for_each(|v| *v /= nt);

    // right-edge front position: rightmost site above 10% of the profile peak
    let x0 = (length / 2) as f64;
    let front_positions: Vec<f64> = mean_field
        .iter()
        .map(|f| {
            let peak = f.iter().cloned().fold(0.0, f64::max);
            if peak <= 0.0 {
                return x0;
            }
            let thr = 0.1 * peak;
            f.iter().rposition(|&v| v >= thr).map(|x| x as f64).unwrap_or(x0)
        })
        .collect();
    let ts: Vec<f64> = snapshots.iter().map(|&t| t as f64).collect();
    let velocity = fit_linear(&ts, &front_positions)?;
    let rescaled = snapshots
        .iter()
        .zip(&mean_field)
        .map(|(&t, f)| {
            let tf = (t as f64).max(1.0);
            let pts = f
                .iter()
                .enumerate()
                .map(|(x, &v)| ((x as f64 - x0 - velocity.slope * tf) / tf.sqrt(), v))
                .collect();
            (t, pts)
        })
        .collect();
    Ok(FrontResult { times: snapshots.to_vec(), mean_field, d_mean, front_positions, velocity, rescaled })
}
