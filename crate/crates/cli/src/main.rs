//! Experiment runner CLI.
//!
//! Exit codes: 0 success, 2 config error, 3 unresolvable-estimate budget
//! exceeded, 4 crosscheck/replay failure.

use clap::{Args, Parser, Subcommand};
use qasim::analysis::{self, ScalingForm};
use qasim::classical::{scan_critical_point, ScanSpec};
use qasim::runner::{self, CrosscheckLevel, ExperimentConfig};
use qasim::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 2;
const EXIT_UNRESOLVABLE: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "qasim", about = "hybrid automaton-circuit simulation suite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Experiment config (flat key = value text)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = library default)
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Replace an existing run in the output directory
    #[arg(long)]
    overwrite: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every observable in the config and write CSVs plus a manifest
    Run(CommonRunArgs),
    /// Locate the critical measurement rate for a model family
    ScanPc(CommonRunArgs),
    /// Data collapse of an entropy CSV over system sizes
    Collapse {
        /// CSV produced by `run`
        #[arg(long)]
        input: PathBuf,
        /// Scaling form: `z` (t/L^z) or `nu` (correlation length vs p)
        #[arg(long, default_value = "z")]
        form: String,
        /// Exponent search range
        #[arg(long, num_args = 2, default_values_t = [0.5, 2.5])]
        search: Vec<f64>,
        /// Critical rate (required for --form nu)
        #[arg(long)]
        pc: Option<f64>,
        /// Reference exponents to report objectives at
        #[arg(long, num_args = 0.., default_values_t = [1.0, 1.581])]
        reference: Vec<f64>,
    },
    /// Fit a power law, logarithm or exponential to a CSV series
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// One of: power, log, exp
        #[arg(long)]
        kind: String,
        /// Fit window on the x axis
        #[arg(long, num_args = 2)]
        window: Option<Vec<f64>>,
        /// Restrict to one system size
        #[arg(long)]
        length: Option<u32>,
        /// Restrict to one measurement rate
        #[arg(long)]
        rate: Option<f64>,
        /// Fit mean vs log(chord(L_A)) instead of log(L_A) (log fits only)
        #[arg(long)]
        chord: bool,
    },
    /// Engine agreement battery against the dense oracle
    Crosscheck {
        #[arg(long, default_value = "quick")]
        level: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Re-run a manifest's config and verify byte-identical outputs
    Replay { manifest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::Parse { .. } | Error::BadSpec(_)
                | Error::EngineMismatch(_) | Error::NoStraddle | Error::Io(_) => EXIT_CONFIG,
                Error::Unresolvable { .. } => EXIT_UNRESOLVABLE,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn load_config(args: &CommonRunArgs) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            let outcome = runner::run(&cfg, &args.out, args.overwrite)?;
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("wrote {}", outcome.manifest_path.display());
            if outcome.unresolvable_rows > 0 {
                eprintln!(
                    "{} row(s) unresolvable at the sample budget",
                    outcome.unresolvable_rows
                );
                return Ok(EXIT_UNRESOLVABLE);
            }
            Ok(EXIT_OK)
        }
        Command::ScanPc(args) => {
            let cfg = load_config(&args)?;
            let family = cfg
                .scan_family
                .ok_or_else(|| Error::Config("scan-pc needs `family = ...`".into()))?;
            let grid = if cfg.scan_grid.is_empty() { cfg.rates.clone() } else { cfg.scan_grid.clone() };
            let length = *cfg
                .lengths
                .first()
                .ok_or_else(|| Error::Config("scan-pc needs L".into()))?;
            let trials = if cfg.trials > 0 { cfg.trials } else { cfg.ensemble };
            let spec = ScanSpec {
                family,
                grid,
                length,
                steps: cfg.steps,
                trials,
                master_seed: cfg.master_seed,
                window: cfg.window,
                bootstrap: cfg.bootstrap,
            };
            let est = runner::with_worker_pool(cfg.workers, || scan_critical_point(&spec))??;
            std::fs::create_dir_all(&args.out)?;
            let mut csv = String::from("p,curvature\n");
            for (p, c) in &est.curvatures {
                csv.push_str(&format!("{p},{c}\n"));
            }
            std::fs::write(args.out.join("pc_scan.csv"), csv)?;
            println!("p_c = {}", est.p_c);
            println!("ci_lo = {}", est.ci.0);
            println!("ci_hi = {}", est.ci.1);
            Ok(EXIT_OK)
        }
        Command::Collapse { input, form, search, pc, reference } => {
            let (axis, rows) = runner::read_csv(&input)?;
            let series = runner::rows_to_series(&axis, &rows)?;
            let fam: Vec<(u32, analysis::Series)> =
                series.into_iter().map(|(l, _p, s)| (l, s)).collect();
            let form = match form.as_str() {
                "z" => ScalingForm::DynamicExponent,
                "nu" => ScalingForm::CorrelationLength {
                    pc: pc.ok_or_else(|| Error::Config("--form nu needs --pc".into()))?,
                },
                other => return Err(Error::Config(format!("unknown form `{other}`"))),
            };
            let res = analysis::collapse(&fam, &form, (search[0], search[1]), &reference)?;
            println!("exponent = {}", res.exponent);
            println!("objective = {}", res.objective);
            for (e, o) in &res.reference {
                println!("objective_at_{e} = {o}");
            }
            Ok(EXIT_OK)
        }
        Command::Fit { input, kind, window, length, rate, chord } => {
            let (axis, rows) = runner::read_csv(&input)?;
            let filtered: Vec<runner::Row> = rows
                .into_iter()
                .filter(|r| length.is_none_or(|l| r.length == l))
                .filter(|r| rate.is_none_or(|p| (r.rate - p).abs() < 1e-12))
                .collect();
            let series = runner::rows_to_series(&axis, &filtered)?;
            let (l, p, mut s) = series
                .into_iter()
                .next()
                .ok_or_else(|| Error::Config("no usable rows after filtering".into()))?;
            if chord {
                let total = l as usize;
                for pt in &mut s.points {
                    pt.x = analysis::chord(total, pt.x as usize);
                }
                s.points.sort_by(|a, b| a.x.total_cmp(&b.x));
                s.points.dedup_by(|a, b| a.x == b.x);
            }
            let w = window
                .map(|w| (w[0], w[1]))
                .unwrap_or((s.points[0].x, s.points.last().unwrap().x));
            let fit = match kind.as_str() {
                "power" => analysis::fit_power_law(&s, w)?,
                "exp" => analysis::fit_exponential(&s, w)?,
                "log" => {
                    let trimmed = analysis::Series::new(
                        s.axis,
                        s.points.iter().copied().filter(|q| q.x >= w.0 && q.x <= w.1).collect(),
                        s.meta.clone(),
                    )?;
                    analysis::fit_log_slope(&trimmed)?
                }
                other => return Err(Error::Config(format!("unknown fit kind `{other}`"))),
            };
            println!("kind = {kind}");
            println!("L = {l}");
            println!("p = {p}");
            println!("value = {}", fit.value);
            println!("stderr = {}", fit.stderr);
            println!("residual = {}", fit.residual);
            println!("window = {} {}", fit.window.0, fit.window.1);
            println!("n_points = {}", fit.n_points);
            Ok(EXIT_OK)
        }
        Command::Crosscheck { level, seed } => {
            let level = match level.as_str() {
                "quick" => CrosscheckLevel::Quick,
                "full" => CrosscheckLevel::Full,
                other => return Err(Error::Config(format!("unknown level `{other}`"))),
            };
            let report = runner::crosscheck(level, seed)?;
            for line in &report.lines {
                println!("{line}");
            }
            if report.passed {
                println!("crosscheck: pass");
                Ok(EXIT_OK)
            } else {
                println!("crosscheck: FAIL");
                Ok(EXIT_CHECK_FAILED)
            }
        }
        Command::Replay { manifest } => {
            let report = runner::replay(&manifest)?;
            for line in &report.lines {
                println!("{line}");
            }
            if report.matched {
                println!("replay: byte-identical");
                Ok(EXIT_OK)
            } else {
                println!("replay: MISMATCH");
                Ok(EXIT_CHECK_FAILED)
            }
        }
    }
}
