//! Configuration-driven experiment runner.
//!
//! Trajectories form a deterministic queue keyed by `(master_seed,
//! trajectory_index)`; a fixed-size worker pool consumes them and results
//! merge in trajectory order, so the written CSVs are byte-identical for any
//! worker count and across reruns. The manifest is written last: its presence
//! marks a completed run.

pub mod config;
pub mod manifest;

mod crosscheck;
mod observables;

pub use config::{EngineKind, ExperimentConfig, MiAxis, Observable, RegionSpec};
pub use crosscheck::{
    check_amplitudes_exhaustive, check_exhaustive_purity, check_mc_vs_oracle,
    check_mc_vs_stabilizer, check_stabilizer_vs_oracle, crosscheck, CrosscheckLevel,
    CrosscheckReport,
};
pub use manifest::{sha256_file, sha256_hex, RunManifest, MANIFEST_NAME};

/// Run `f` on a dedicated pool of `workers` threads (0 = caller's pool).
pub fn with_worker_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

use crate::error::{Error, Result};
use crate::rng::SEED_RULE;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One output record; `mean`/`stderr` are absent on unresolvable rows.
#[derive(Clone, Debug)]
pub struct Row {
    pub x: f64,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub n: u64,
    pub model: String,
    pub length: u32,
    pub rate: f64,
    pub seed: u64,
}

impl Row {
    fn status(&self) -> &'static str {
        if self.mean.is_some() {
            "ok"
        } else {
            "unresolvable"
        }
    }
}

/// A rendered output file (CSV or key=value report).
struct OutFile {
    name: String,
    content: String,
}

pub struct RunOutcome {
    pub manifest_path: PathBuf,
    pub files: Vec<PathBuf>,
    pub unresolvable_rows: u64,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(axis_name: &str, rows: &[Row]) -> String {
    let mut out = format!("{axis_name},mean,stderr,n,model,L,p,seed,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.x,
            fmt_opt(r.mean),
            fmt_opt(r.stderr),
            r.n,
            r.model,
            r.length,
            r.rate,
            r.seed,
            r.status()
        );
    }
    out
}

/// Execute the config end to end: all observables, all (L, p) combinations.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, overwrite: bool) -> Result<RunOutcome> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let manifest_path = out_dir.join(MANIFEST_NAME);
    if manifest_path.exists() && !overwrite {
        return Err(Error::Config(format!(
            "{} already exists (pass --overwrite to replace the run)",
            manifest_path.display()
        )));
    }
    if manifest_path.exists() {
        std::fs::remove_file(&manifest_path)?;
    }

    let body = || -> Result<(Vec<OutFile>, u64)> {
        let mut files = Vec::new();
        let mut unresolvable = 0;
        let mut report = String::new();
        for &obs in &cfg.observables {
            let produced = observables::run_observable(cfg, obs, &mut report)?;
            for f in produced.files {
                files.push(f);
            }
            unresolvable += produced.unresolvable_rows;
        }
        if !report.is_empty() {
            files.push(OutFile { name: "report.txt".into(), content: report });
        }
        Ok((files, unresolvable))
    };

    // results merge in trajectory order inside each observable, so the worker
    // count only affects scheduling
    let (files, unresolvable_rows) = with_worker_pool(cfg.workers, body)??;

    let mut written = Vec::new();
    let mut digests = Vec::new();
    for f in &files {
        let path = out_dir.join(&f.name);
        std::fs::write(&path, &f.content)?;
        digests.push((f.name.clone(), sha256_hex(f.content.as_bytes())));
        written.push(path);
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        seed_rule: SEED_RULE.into(),
        master_seed: cfg.master_seed,
        workers: cfg.workers,
        wallclock_s: started.elapsed().as_secs_f64(),
        unresolvable_rows,
        config_text: cfg.raw.clone(),
        files: digests,
    };
    let manifest_path = manifest.write(out_dir)?;
    Ok(RunOutcome { manifest_path, files: written, unresolvable_rows })
}

/// Re-run the config embedded in a manifest and compare output digests.
pub struct ReplayReport {
    pub matched: bool,
    pub lines: Vec<String>,
}

pub fn replay(manifest_path: &Path) -> Result<ReplayReport> {
    let text = std::fs::read_to_string(manifest_path)?;
    let recorded = RunManifest::parse(&text)?;
    let mut cfg = ExperimentConfig::parse(&recorded.config_text)?;
    cfg.master_seed = recorded.master_seed;
    let dir = manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(format!("replay-{}", std::process::id()));
    let outcome = run(&cfg, &dir, true)?;
    let mut lines = Vec::new();
    let mut matched = true;
    for (name, want) in &recorded.files {
        let got = sha256_file(&dir.join(name)).unwrap_or_else(|_| "missing".into());
        let ok = got == *want;
        matched &= ok;
        lines.push(format!("{} = {}", name, if ok { "match" } else { "MISMATCH" }));
    }
    let _ = outcome;
    std::fs::remove_dir_all(&dir).ok();
    Ok(ReplayReport { matched, lines })
}

/// Minimal reader for the runner's own CSV format; returns (header axis name,
/// rows) with rows keeping their metadata columns.
pub fn read_csv(path: &Path) -> Result<(String, Vec<Row>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty csv".into() })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() != 9 {
        return Err(Error::Parse { line: 1, msg: "unexpected column count".into() });
    }
    let axis = cols[0].to_string();
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::Parse { line: ln + 2, msg: "unexpected column count".into() });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse { line: ln + 2, msg: format!("bad {what}") })
        };
        let mean = if f[1].is_empty() { None } else { Some(parse(f[1], "mean")?) };
        let stderr = if f[2].is_empty() { None } else { Some(parse(f[2], "stderr")?) };
        rows.push(Row {
            x: parse(f[0], "x")?,
            mean,
            stderr,
            n: f[3].parse().map_err(|_| Error::Parse { line: ln + 2, msg: "bad n".into() })?,
            model: f[4].to_string(),
            length: f[5].parse().map_err(|_| Error::Parse { line: ln + 2, msg: "bad L".into() })?,
            rate: parse(f[6], "p")?,
            seed: f[7].parse().map_err(|_| Error::Parse { line: ln + 2, msg: "bad seed".into() })?,
        });
    }
    Ok((axis, rows))
}

/// Group CSV rows into per-(L, p) series on their axis.
pub fn rows_to_series(
    axis_name: &str,
    rows: &[Row],
) -> Result<Vec<(u32, f64, crate::analysis::Series)>> {
    use crate::analysis::{Axis, Meta, Point, Series};
    let axis = match axis_name {
        "t" => Axis::Time,
        "L_A" => Axis::SubsystemSize,
        "p" => Axis::MeasurementRate,
        "r" => Axis::Separation,
        "eta" => Axis::CrossRatio,
        other => return Err(Error::Parse { line: 1, msg: format!("unknown axis `{other}`") }),
    };
    let mut combos: Vec<(u32, f64)> = Vec::new();
    for r in rows {
        if !combos.iter().any(|&(l, p)| l == r.length && p == r.rate) {
            combos.push((r.length, r.rate));
        }
    }
    let mut out = Vec::new();
    for (l, p) in combos {
        let mut pts: Vec<Point> = rows
            .iter()
            .filter(|r| r.length == l && r.rate == p && r.mean.is_some())
            .map(|r| Point { x: r.x, mean: r.mean.unwrap(), stderr: r.stderr.unwrap_or(0.0), n: r.n })
            .collect();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x));
        pts.dedup_by(|a, b| a.x == b.x);
        if pts.is_empty() {
            continue;
        }
        let meta = Meta { model: None, length: Some(l), rate: Some(p), seed: None };
        out.push((l, p, Series::new(axis, pts, meta)?));
    }
    Ok(out)
}
