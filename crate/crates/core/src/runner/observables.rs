//! Per-observable experiment execution.

use super::config::{EngineKind, ExperimentConfig, MiAxis, Observable, RegionSpec};
use super::{render_csv, OutFile, Row};
use crate::analysis::{cross_ratio, sample_times, Axis, Ensemble, Meta, Series};
use crate::bits::Region;
use crate::circuit::{generate_circuit, Circuit, CircuitSpec, Model};
use crate::classical::{bond_dp_ensemble, front_profile, hamming_ensemble, BondDpSpec};
use crate::error::{Error, Result};
use crate::mc::{estimate_p_same, estimate_renyi2, SamplePlan};
use crate::oracle::DenseState;
use crate::stabilizer::Tableau;
use rayon::prelude::*;
use std::fmt::Write as _;

pub(super) struct Produced {
    pub files: Vec<OutFile>,
    pub unresolvable_rows: u64,
}

pub(super) fn run_observable(
    cfg: &ExperimentConfig,
    obs: Observable,
    report: &mut String,
) -> Result<Produced> {
    match obs {
        Observable::EntropyT => entropy_time(cfg, false),
        Observable::Purification => entropy_time(cfg, true),
        Observable::EntropyLa => entropy_la(cfg, report),
        Observable::MutualInfo => mutual_info(cfg),
        Observable::Hamming => hamming(cfg),
        Observable::Front => front(cfg, report),
        Observable::BondDp => bond_dp(cfg),
        Observable::PSame => p_same(cfg),
    }
}

fn base_spec(cfg: &ExperimentConfig, model: Model, l: u32, p: f64) -> CircuitSpec {
    CircuitSpec {
        model,
        length: l,
        steps: cfg.steps,
        rate: p,
        boundary: cfg.boundary,
        master_seed: cfg.master_seed,
        trajectory: 0,
    }
}

fn meta(cfg: &ExperimentConfig, model: Model, l: u32, p: f64) -> Meta {
    Meta { model: Some(model), length: Some(l), rate: Some(p), seed: Some(cfg.master_seed) }
}

fn series_rows(cfg: &ExperimentConfig, s: &Series) -> Vec<Row> {
    s.points
        .iter()
        .map(|pt| Row {
            x: pt.x,
            mean: Some(pt.mean),
            stderr: Some(pt.stderr),
            n: pt.n,
            model: s.meta.model.map(|m| m.tag().to_string()).unwrap_or_default(),
            length: s.meta.length.unwrap_or(0),
            rate: s.meta.rate.unwrap_or(0.0),
            seed: cfg.master_seed,
        })
        .collect()
}

/// Evenly spaced sample times across the last quarter of T.
pub fn steady_times(t_max: u32) -> Vec<u32> {
    let lo = (3 * t_max) / 4;
    let step = ((t_max - lo) / 16).max(1);
    let mut ts: Vec<u32> = (lo..=t_max).step_by(step as usize).collect();
    if *ts.last().unwrap() != t_max {
        ts.push(t_max);
    }
    ts
}

/// Walk a tableau through the circuit, sampling region entropies at `times`.
fn stab_entropy_rows(c: &Circuit, regions: &[Region], times: &[u32]) -> Result<Vec<Vec<f64>>> {
    let mut tab = Tableau::plus_state(c.n_qubits as usize);
    let mut out = vec![Vec::with_capacity(times.len()); regions.len()];
    let mut li = 0;
    for &t in times {
        while li < c.layers.len() && c.layers[li].time <= t {
            apply_layer_stab(&mut tab, c, li)?;
            li += 1;
        }
        for (k, r) in regions.iter().enumerate() {
            out[k].push(tab.renyi_entropy(r) as f64);
        }
    }
    Ok(out)
}

fn apply_layer_stab(tab: &mut Tableau, c: &Circuit, li: usize) -> Result<()> {
    let layer = &c.layers[li];
    let mut events = c.events_for_layer(li).iter();
    for gate in &layer.gates {
        if let crate::circuit::Gate::Measure(site) = gate {
            let ev = events.next().expect("event per measure gate");
            tab.composite_measure(*site, ev.outcome)?;
        } else {
            tab.apply(gate)?;
        }
    }
    Ok(())
}

fn oracle_entropy_rows(c: &Circuit, regions: &[Region], times: &[u32]) -> Result<Vec<Vec<f64>>> {
    let mut psi = DenseState::plus_state(c.n_qubits)?;
    let mut out = vec![Vec::with_capacity(times.len()); regions.len()];
    let mut li = 0;
    for &t in times {
        let upto = c.layers.partition_point(|l| l.time <= t);
        let from = li;
        li = upto;
        for i in from..li {
            let mut events = c.events_for_layer(i).iter();
            for gate in &c.layers[i].gates {
                if let crate::circuit::Gate::Measure(site) = gate {
                    let ev = events.next().expect("event per measure gate");
                    match psi.composite_measure(*site, ev.outcome) {
                        Ok(_) => {}
                        Err(Error::ZeroProbability) => {
                            psi.composite_measure(*site, !ev.outcome)?;
                        }
                        Err(e) => return Err(e),
                    }
                } else {
                    psi.apply_gate(gate)?;
                }
            }
        }
        for (k, r) in regions.iter().enumerate() {
            out[k].push(psi.renyi2_exact(r));
        }
    }
    Ok(out)
}

fn default_region(cfg: &ExperimentConfig, model: Model) -> RegionSpec {
    cfg.region_a.clone().unwrap_or(if model.is_purification() {
        RegionSpec::System
    } else {
        RegionSpec::Half
    })
}

/// Entropy vs time (also the purification observable, which defaults the
/// probe region to the full system half).
fn entropy_time(cfg: &ExperimentConfig, purification: bool) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let times = if cfg.engine == EngineKind::Mc && !cfg.mc_times.is_empty() {
        let mut ts = cfg.mc_times.clone();
        ts.sort_unstable();
        ts.dedup();
        ts
    } else if cfg.engine == EngineKind::Mc {
        vec![cfg.steps]
    } else {
        sample_times(cfg.steps)
    };
    let spec_region = if purification {
        RegionSpec::System
    } else {
        default_region(cfg, model)
    };
    let mut rows = Vec::new();
    let mut unresolvable = 0;
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let base = base_spec(cfg, model, l, p);
            let n = base.n_qubits() as usize;
            let region = spec_region.resolve(n, l);
            match cfg.engine {
                EngineKind::Stabilizer | EngineKind::Oracle => {
                    let per_traj: Result<Vec<Vec<f64>>> = (0..cfg.ensemble)
                        .into_par_iter()
                        .map(|traj| {
                            let mut spec = base;
                            spec.trajectory = traj;
                            let c = generate_circuit(&spec)?;
                            let r = if cfg.engine == EngineKind::Stabilizer {
                                stab_entropy_rows(&c, std::slice::from_ref(&region), &times)?
                            } else {
                                oracle_entropy_rows(&c, std::slice::from_ref(&region), &times)?
                            };
                            Ok(r.into_iter().next().unwrap())
                        })
                        .collect();
                    let ens = Ensemble::new(
                        Axis::Time,
                        times.iter().map(|&t| t as f64).collect(),
                        per_traj?,
                        meta(cfg, model, l, p),
                    );
                    rows.extend(series_rows(cfg, &ens.to_series()?));
                }
                EngineKind::Mc => {
                    let (mc_rows, bad) = mc_entropy_series(cfg, &base, &region, &times)?;
                    unresolvable += bad;
                    rows.extend(mc_rows);
                }
                EngineKind::Classical => {
                    return Err(Error::EngineMismatch("classical engine has no entropy".into()))
                }
            }
        }
    }
    let name = if purification { "purification.csv" } else { "entropy_t.csv" };
    Ok(Produced {
        files: vec![OutFile { name: name.into(), content: render_csv("t", &rows) }],
        unresolvable_rows: unresolvable,
    })
}

/// Per-trajectory MC entropies merged across the ensemble; a time where any
/// trajectory is unresolvable becomes a flagged row.
fn mc_entropy_series(
    cfg: &ExperimentConfig,
    base: &CircuitSpec,
    region: &Region,
    times: &[u32],
) -> Result<(Vec<Row>, u64)> {
    let plan = SamplePlan { initial: cfg.mc_initial, ceiling: cfg.mc_ceiling };
    let per_traj: Result<Vec<Vec<Option<f64>>>> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|traj| {
            let mut spec = *base;
            spec.trajectory = traj;
            let c = generate_circuit(&spec)?;
            let mut vals = Vec::with_capacity(times.len());
            for &t in times {
                let sub = c.truncated(t);
                match estimate_renyi2(&sub, region, plan, spec.key()) {
                    Ok(est) => vals.push(Some(est.s2)),
                    Err(Error::Unresolvable { .. }) => vals.push(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(vals)
        })
        .collect();
    let per_traj = per_traj?;
    let mut rows = Vec::new();
    let mut unresolvable = 0;
    for (i, &t) in times.iter().enumerate() {
        let vals: Vec<f64> = per_traj.iter().filter_map(|r| r[i]).collect();
        let any_bad = vals.len() < per_traj.len();
        if any_bad || vals.is_empty() {
            unresolvable += 1;
            rows.push(Row {
                x: t as f64,
                mean: None,
                stderr: None,
                n: vals.len() as u64,
                model: base.model.tag().into(),
                length: base.length,
                rate: base.rate,
                seed: cfg.master_seed,
            });
            continue;
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = if vals.len() > 1 {
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        rows.push(Row {
            x: t as f64,
            mean: Some(mean),
            stderr: Some((var / n).sqrt()),
            n: vals.len() as u64,
            model: base.model.tag().into(),
            length: base.length,
            rate: base.rate,
            seed: cfg.master_seed,
        });
    }
    Ok((rows, unresolvable))
}

/// Steady-state entropy vs subsystem size.
fn entropy_la(cfg: &ExperimentConfig, report: &mut String) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let mut rows = Vec::new();
    let mut unresolvable = 0;
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let base = base_spec(cfg, model, l, p);
            match cfg.engine {
                EngineKind::Stabilizer => {
                    let ts = steady_times(cfg.steps);
                    let half = (l / 2) as usize;
                    // rows: prefix entropies averaged over the steady window,
                    // with the half-system time series kept for the flatness check
                    let per_traj: Result<Vec<(Vec<f64>, Vec<f64>)>> = (0..cfg.ensemble)
                        .into_par_iter()
                        .map(|traj| {
                            let mut spec = base;
                            spec.trajectory = traj;
                            let c = generate_circuit(&spec)?;
                            let mut tab = Tableau::plus_state(c.n_qubits as usize);
                            let mut li = 0;
                            let mut acc = vec![0.0; half];
                            let mut half_series = Vec::with_capacity(ts.len());
                            for &t in &ts {
                                while li < c.layers.len() && c.layers[li].time <= t {
                                    apply_layer_stab(&mut tab, &c, li)?;
                                    li += 1;
                                }
                                let pre = tab.prefix_entropies(half);
                                for (a, v) in acc.iter_mut().zip(&pre) {
                                    *a += *v as f64;
                                }
                                half_series.push(pre[half - 1] as f64);
                            }
                            for a in &mut acc {
                                *a /= ts.len() as f64;
                            }
                            Ok((acc, half_series))
                        })
                        .collect();
                    let per_traj = per_traj?;
                    let la_rows: Vec<Vec<f64>> = per_traj.iter().map(|x| x.0.clone()).collect();
                    let ens = Ensemble::new(
                        Axis::SubsystemSize,
                        (1..=half).map(|k| k as f64).collect(),
                        la_rows,
                        meta(cfg, model, l, p),
                    );
                    rows.extend(series_rows(cfg, &ens.to_series()?));
                    // flatness of S(L/2) over the averaging window
                    let flat_rows: Vec<Vec<f64>> = per_traj.into_iter().map(|x| x.1).collect();
                    let flat = Ensemble::new(
                        Axis::Time,
                        ts.iter().map(|&t| t as f64).collect(),
                        flat_rows,
                        meta(cfg, model, l, p),
                    );
                    let s = flat.to_series()?;
                    let lf =
                        crate::analysis::fit_linear(&s.xs(), &s.means()).unwrap_or(
                            crate::analysis::LinearFit {
                                slope: 0.0,
                                intercept: 0.0,
                                slope_stderr: 0.0,
                                r2: 1.0,
                                rms_residual: 0.0,
                            },
                        );
                    let _ = writeln!(report, "observable = entropy_la");
                    let _ = writeln!(report, "L = {l}");
                    let _ = writeln!(report, "p = {p}");
                    let _ = writeln!(report, "steady_slope = {}", lf.slope);
                    let _ = writeln!(report, "steady_slope_stderr = {}", lf.slope_stderr);
                    let _ = writeln!(report, "steady_window = {} {}", ts[0], ts[ts.len() - 1]);
                    let _ = writeln!(report);
                }
                EngineKind::Mc | EngineKind::Oracle => {
                    let las: Vec<u32> = if cfg.la_values.is_empty() {
                        default_la_grid(l)
                    } else {
                        cfg.la_values.iter().map(|e| e.eval(l)).filter(|&v| v >= 1).collect()
                    };
                    let n = base.n_qubits() as usize;
                    if cfg.engine == EngineKind::Oracle {
                        let regions: Vec<Region> =
                            las.iter().map(|&la| Region::range(n, 0, la as usize)).collect();
                        let per_traj: Result<Vec<Vec<f64>>> = (0..cfg.ensemble)
                            .into_par_iter()
                            .map(|traj| {
                                let mut spec = base;
                                spec.trajectory = traj;
                                let c = generate_circuit(&spec)?;
                                let r = oracle_entropy_rows(&c, &regions, &[cfg.steps])?;
                                Ok(r.into_iter().map(|v| v[0]).collect())
                            })
                            .collect();
                        let ens = Ensemble::new(
                            Axis::SubsystemSize,
                            las.iter().map(|&v| v as f64).collect(),
                            per_traj?,
                            meta(cfg, model, l, p),
                        );
                        rows.extend(series_rows(cfg, &ens.to_series()?));
                    } else {
                        for &la in &las {
                            let region = Region::range(n, 0, la as usize);
                            let (mc_rows, bad) =
                                mc_entropy_series_at_la(cfg, &base, &region, la)?;
                            unresolvable += bad;
                            rows.extend(mc_rows);
                        }
                    }
                }
                EngineKind::Classical => {
                    return Err(Error::EngineMismatch("classical engine has no entropy".into()))
                }
            }
        }
    }
    Ok(Produced {
        files: vec![OutFile { name: "entropy_la.csv".into(), content: render_csv("L_A", &rows) }],
        unresolvable_rows: unresolvable,
    })
}

fn default_la_grid(l: u32) -> Vec<u32> {
    let mut las = Vec::new();
    let mut v = 1u32;
    while v <= l / 2 {
        las.push(v);
        let next = (v as f64 * 1.5).ceil() as u32;
        v = next.max(v + 1);
    }
    if *las.last().unwrap() != l / 2 {
        las.push(l / 2);
    }
    las
}

fn mc_entropy_series_at_la(
    cfg: &ExperimentConfig,
    base: &CircuitSpec,
    region: &Region,
    la: u32,
) -> Result<(Vec<Row>, u64)> {
    let plan = SamplePlan { initial: cfg.mc_initial, ceiling: cfg.mc_ceiling };
    let per_traj: Result<Vec<Option<f64>>> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|traj| {
            let mut spec = *base;
            spec.trajectory = traj;
            let c = generate_circuit(&spec)?;
            match estimate_renyi2(&c, region, plan, spec.key()) {
                Ok(est) => Ok(Some(est.s2)),
                Err(Error::Unresolvable { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let per_traj = per_traj?;
    let vals: Vec<f64> = per_traj.iter().copied().flatten().collect();
    let any_bad = vals.len() < per_traj.len();
    if any_bad || vals.is_empty() {
        return Ok((
            vec![Row {
                x: la as f64,
                mean: None,
                stderr: None,
                n: vals.len() as u64,
                model: base.model.tag().into(),
                length: base.length,
                rate: base.rate,
                seed: cfg.master_seed,
            }],
            1,
        ));
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = if vals.len() > 1 {
        vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok((
        vec![Row {
            x: la as f64,
            mean: Some(mean),
            stderr: Some((var / n).sqrt()),
            n: vals.len() as u64,
            model: base.model.tag().into(),
            length: base.length,
            rate: base.rate,
            seed: cfg.master_seed,
        }],
        0,
    ))
}

/// Mutual information, swept over the configured axis with ensemble sizes
/// escalated until stderr < 10% of the signal or the ceiling is reached.
fn mutual_info(cfg: &ExperimentConfig) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let mut rows = Vec::new();
    let mut unresolvable = 0;
    for &l in &cfg.lengths {
        // sweep points: (x, p, region A, region B)
        let mut sweeps: Vec<(f64, f64, Region, Region)> = Vec::new();
        let n_for = |p: f64| base_spec(cfg, model, l, p).n_qubits() as usize;
        match cfg.mi_axis {
            MiAxis::Rate => {
                for &p in &cfg.rates {
                    let n = n_for(p);
                    let a = cfg
                        .region_a
                        .clone()
                        .unwrap_or(RegionSpec::Arc(
                            super::config::Expr::constant(0),
                            super::config::Expr { num: 1, den: 8, times_l: true },
                        ))
                        .resolve(n, l);
                    let b = cfg
                        .region_b
                        .clone()
                        .unwrap_or(RegionSpec::Arc(
                            super::config::Expr { num: 1, den: 2, times_l: true },
                            super::config::Expr { num: 1, den: 8, times_l: true },
                        ))
                        .resolve(n, l);
                    sweeps.push((p, p, a, b));
                }
            }
            MiAxis::Separation | MiAxis::CrossRatio => {
                let p = *cfg.rates.first().ok_or_else(|| {
                    Error::Config("mutual_info separation sweep needs one p".into())
                })?;
                let n = n_for(p);
                let width = match &cfg.region_a {
                    Some(RegionSpec::Arc(_, w)) => w.eval(l),
                    _ => 3,
                } as usize;
                for &r in &cfg.separations {
                    let a = Region::arc(n, 0, width);
                    let b = Region::arc(n, r as usize, width);
                    if !a.is_disjoint(&b) {
                        return Err(Error::OverlappingRegions);
                    }
                    let x = if cfg.mi_axis == MiAxis::Separation {
                        r as f64
                    } else {
                        cross_ratio(
                            [0.0, width as f64, r as f64, (r as usize + width) as f64],
                            l as f64,
                        )?
                    };
                    sweeps.push((x, p, a, b));
                }
            }
        }
        sweeps.sort_by(|u, v| u.0.total_cmp(&v.0));

        for (x, p, a, b) in sweeps {
            let base = base_spec(cfg, model, l, p);
            let ceiling = if cfg.ensemble_ceiling > 0 {
                cfg.ensemble_ceiling
            } else {
                cfg.ensemble * 8
            };
            let mut vals: Vec<f64> = Vec::new();
            let mut bad = 0u64;
            let mut next = 0u64;
            loop {
                let target = (next + cfg.ensemble).min(ceiling);
                let batch: Result<Vec<Option<f64>>> = (next..target)
                    .into_par_iter()
                    .map(|traj| {
                        let mut spec = base;
                        spec.trajectory = traj;
                        mi_trajectory(cfg, &spec, &a, &b)
                    })
                    .collect();
                for v in batch? {
                    match v {
                        Some(v) => vals.push(v),
                        None => bad += 1,
                    }
                }
                next = target;
                let n = vals.len() as f64;
                if n >= 2.0 {
                    let mean = vals.iter().sum::<f64>() / n;
                    let var =
                        vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                    let stderr = (var / n).sqrt();
                    if (stderr < 0.1 * mean.abs() && mean.abs() > 0.0) || next >= ceiling {
                        break;
                    }
                } else if next >= ceiling {
                    break;
                }
            }
            if bad > 0 || vals.is_empty() {
                unresolvable += 1;
                rows.push(Row {
                    x,
                    mean: None,
                    stderr: None,
                    n: vals.len() as u64,
                    model: model.tag().into(),
                    length: l,
                    rate: p,
                    seed: cfg.master_seed,
                });
                continue;
            }
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            rows.push(Row {
                x,
                mean: Some(mean),
                stderr: Some((var / n).sqrt()),
                n: vals.len() as u64,
                model: model.tag().into(),
                length: l,
                rate: p,
                seed: cfg.master_seed,
            });
        }
    }
    let axis = match cfg.mi_axis {
        MiAxis::Rate => "p",
        MiAxis::Separation => "r",
        MiAxis::CrossRatio => "eta",
    };
    Ok(Produced {
        files: vec![OutFile { name: "mutual_info.csv".into(), content: render_csv(axis, &rows) }],
        unresolvable_rows: unresolvable,
    })
}

/// Steady-window average of I(A;B) for one trajectory; None marks an
/// unresolvable MC estimate.
fn mi_trajectory(
    cfg: &ExperimentConfig,
    spec: &CircuitSpec,
    a: &Region,
    b: &Region,
) -> Result<Option<f64>> {
    let c = generate_circuit(spec)?;
    match cfg.engine {
        EngineKind::Stabilizer => {
            let ts = steady_times(cfg.steps);
            let mut tab = Tableau::plus_state(c.n_qubits as usize);
            let mut li = 0;
            let mut acc = 0.0;
            for &t in &ts {
                while li < c.layers.len() && c.layers[li].time <= t {
                    apply_layer_stab(&mut tab, &c, li)?;
                    li += 1;
                }
                acc += tab.mutual_information(a, b)? as f64;
            }
            Ok(Some(acc / ts.len() as f64))
        }
        EngineKind::Mc => {
            let plan = SamplePlan { initial: cfg.mc_initial, ceiling: cfg.mc_ceiling };
            let union = a.union(b);
            let mut total = 0.0;
            for (region, sign) in [(a, 1.0), (b, 1.0), (&union, -1.0)] {
                match estimate_renyi2(&c, region, plan, spec.key()) {
                    Ok(est) => total += sign * est.s2,
                    Err(Error::Unresolvable { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(total))
        }
        EngineKind::Oracle => {
            let mut psi = DenseState::plus_state(c.n_qubits)?;
            psi.apply_circuit(&c)?;
            Ok(Some(psi.renyi2_exact(a) + psi.renyi2_exact(b) - psi.renyi2_exact(&a.union(b))))
        }
        EngineKind::Classical => {
            Err(Error::EngineMismatch("classical engine has no mutual information".into()))
        }
    }
}

fn hamming(cfg: &ExperimentConfig) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let times = sample_times(cfg.steps);
    let mut rows = Vec::new();
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let base = base_spec(cfg, model, l, p);
            let data = hamming_ensemble(&base, cfg.pair_init, cfg.ensemble, &times)?;
            let ens = Ensemble::new(
                Axis::Time,
                times.iter().map(|&t| t as f64).collect(),
                data,
                meta(cfg, model, l, p),
            );
            rows.extend(series_rows(cfg, &ens.to_series()?));
        }
    }
    Ok(Produced {
        files: vec![OutFile { name: "hamming.csv".into(), content: render_csv("t", &rows) }],
        unresolvable_rows: 0,
    })
}

fn front(cfg: &ExperimentConfig, report: &mut String) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let snapshots: Vec<u32> = if cfg.snapshots.is_empty() {
        crate::analysis::log_times(4.max(1), cfg.steps.max(8), 6)
    } else {
        cfg.snapshots.clone()
    };
    let mut field_csv = String::from("t,x,hbar,n,model,L,p,seed\n");
    let mut collapse_csv = String::from("t,u,hbar,n,model,L,p,seed\n");
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let base = base_spec(cfg, model, l, p);
            let fr = front_profile(&base, cfg.ensemble, &snapshots)?;
            for (k, &t) in fr.times.iter().enumerate() {
                for (x, &h) in fr.mean_field[k].iter().enumerate() {
                    let _ = writeln!(
                        field_csv,
                        "{t},{x},{h},{},{},{l},{p},{}",
                        cfg.ensemble,
                        model.tag(),
                        cfg.master_seed
                    );
                }
            }
            for (t, pts) in &fr.rescaled {
                for (u, h) in pts {
                    let _ = writeln!(
                        collapse_csv,
                        "{t},{u},{h},{},{},{l},{p},{}",
                        cfg.ensemble,
                        model.tag(),
                        cfg.master_seed
                    );
                }
            }
            let _ = writeln!(report, "observable = front");
            let _ = writeln!(report, "L = {l}");
            let _ = writeln!(report, "p = {p}");
            let _ = writeln!(report, "front_velocity = {}", fr.velocity.slope);
            let _ = writeln!(report, "front_velocity_r2 = {}", fr.velocity.r2);
            let _ = writeln!(report);
        }
    }
    Ok(Produced {
        files: vec![
            OutFile { name: "front.csv".into(), content: field_csv },
            OutFile { name: "front_collapse.csv".into(), content: collapse_csv },
        ],
        unresolvable_rows: 0,
    })
}

fn bond_dp(cfg: &ExperimentConfig) -> Result<Produced> {
    let times = sample_times(cfg.steps);
    let mut rows = Vec::new();
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let spec = BondDpSpec {
                block_prob: p,
                length: l,
                steps: cfg.steps,
                init: cfg.dp_init,
                master_seed: cfg.master_seed,
            };
            let data = bond_dp_ensemble(&spec, cfg.ensemble, &times);
            let ens = Ensemble::new(
                Axis::Time,
                times.iter().map(|&t| t as f64).collect(),
                data,
                Meta { model: None, length: Some(l), rate: Some(p), seed: Some(cfg.master_seed) },
            );
            let s = ens.to_series()?;
            rows.extend(s.points.iter().map(|pt| Row {
                x: pt.x,
                mean: Some(pt.mean),
                stderr: Some(pt.stderr),
                n: pt.n,
                model: "bond_dp".into(),
                length: l,
                rate: p,
                seed: cfg.master_seed,
            }));
        }
    }
    Ok(Produced {
        files: vec![OutFile { name: "bond_dp.csv".into(), content: render_csv("t", &rows) }],
        unresolvable_rows: 0,
    })
}

fn p_same(cfg: &ExperimentConfig) -> Result<Produced> {
    let model = cfg.model.expect("checked by config");
    let mut rows = Vec::new();
    for &l in &cfg.lengths {
        for &p in &cfg.rates {
            let base = base_spec(cfg, model, l, p);
            let trials = if cfg.trials > 0 { cfg.trials } else { cfg.ensemble };
            let s = estimate_p_same(&base, trials)?;
            for (i, &t) in s.times.iter().enumerate() {
                rows.push(Row {
                    x: t as f64,
                    mean: Some(s.prob[i]),
                    stderr: Some(s.stderr[i]),
                    n: trials,
                    model: model.tag().into(),
                    length: l,
                    rate: p,
                    seed: cfg.master_seed,
                });
            }
        }
    }
    Ok(Produced {
        files: vec![OutFile { name: "p_same.csv".into(), content: render_csv("t", &rows) }],
        unresolvable_rows: 0,
    })
}
