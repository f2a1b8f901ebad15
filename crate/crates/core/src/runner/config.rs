//! Flat key=value experiment configuration.
//!
//! One `key = value` pair per line, `#` comments, keys repeatable where a list
//! is meant (`L`, `p`). Region values are written as `half`, `quarter`,
//! `system`, `range LO HI` or `arc START LEN`, where the numeric tokens accept
//! the forms `N`, `L`, `L/N` and `NL/M` so the same config works across a size
//! list.

use crate::circuit::{Boundary, Model};
use crate::classical::{DpInit, PairInit, ScanFamily};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Stabilizer,
    Mc,
    Classical,
    Oracle,
}

impl EngineKind {
    pub fn tag(&self) -> &'static str {
        match self {
            EngineKind::Stabilizer => "stabilizer",
            EngineKind::Mc => "mc",
            EngineKind::Classical => "classical",
            EngineKind::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    EntropyT,
    EntropyLa,
    Purification,
    MutualInfo,
    Hamming,
    Front,
    BondDp,
    PSame,
}

impl Observable {
    pub fn tag(&self) -> &'static str {
        match self {
            Observable::EntropyT => "entropy_t",
            Observable::EntropyLa => "entropy_la",
            Observable::Purification => "purification",
            Observable::MutualInfo => "mutual_info",
            Observable::Hamming => "hamming",
            Observable::Front => "front",
            Observable::BondDp => "bond_dp",
            Observable::PSame => "p_same",
        }
    }
}

/// Axis of a mutual-information sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiAxis {
    Rate,
    Separation,
    CrossRatio,
}

/// A region written against a symbolic system size.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    Half,
    Quarter,
    System,
    Range(Expr, Expr),
    Arc(Expr, Expr),
}

/// Numeric token that may reference L: forms N, L, L/N, NL/M.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expr {
    pub num: u32,
    pub den: u32,
    pub times_l: bool,
}

impl Expr {
    pub fn constant(n: u32) -> Self {
        Expr { num: n, den: 1, times_l: false }
    }

    pub fn eval(&self, l: u32) -> u32 {
        let base = if self.times_l { self.num as u64 * l as u64 } else { self.num as u64 };
        (base / self.den as u64) as u32
    }

    fn parse(tok: &str) -> Result<Expr> {
        let bad = || Error::Config(format!("bad numeric expression `{tok}`"));
        let (lhs, den) = match tok.split_once('/') {
            Some((a, b)) => (a, b.parse::<u32>().map_err(|_| bad())?),
            None => (tok, 1u32),
        };
        if den == 0 {
            return Err(bad());
        }
        if let Some(prefix) = lhs.strip_suffix('L') {
            let num = if prefix.is_empty() { 1 } else { prefix.parse().map_err(|_| bad())? };
            Ok(Expr { num, den, times_l: true })
        } else {
            Ok(Expr { num: lhs.parse().map_err(|_| bad())?, den, times_l: false })
        }
    }
}

impl RegionSpec {
    fn parse(v: &str) -> Result<RegionSpec> {
        let toks: Vec<&str> = v.split_whitespace().collect();
        match toks.as_slice() {
            ["half"] => Ok(RegionSpec::Half),
            ["quarter"] => Ok(RegionSpec::Quarter),
            ["system"] => Ok(RegionSpec::System),
            ["range", lo, hi] => Ok(RegionSpec::Range(Expr::parse(lo)?, Expr::parse(hi)?)),
            ["arc", s, w] => Ok(RegionSpec::Arc(Expr::parse(s)?, Expr::parse(w)?)),
            _ => Err(Error::Config(format!("bad region `{v}`"))),
        }
    }

    /// Resolve on a chain of `n` qubits whose system size is `l`.
    pub fn resolve(&self, n: usize, l: u32) -> crate::bits::Region {
        use crate::bits::Region;
        match self {
            RegionSpec::Half => Region::range(n, 0, l as usize / 2),
            RegionSpec::Quarter => Region::range(n, 0, l as usize / 4),
            RegionSpec::System => Region::range(n, 0, l as usize),
            RegionSpec::Range(lo, hi) => Region::range(n, lo.eval(l) as usize, hi.eval(l) as usize),
            RegionSpec::Arc(s, w) => Region::arc(n, s.eval(l) as usize, w.eval(l) as usize),
        }
    }
}

/// Fully resolved experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: Option<Model>,
    pub engine: EngineKind,
    pub observables: Vec<Observable>,
    pub lengths: Vec<u32>,
    pub rates: Vec<f64>,
    pub steps: u32,
    pub ensemble: u64,
    pub ensemble_ceiling: u64,
    pub boundary: Boundary,
    pub master_seed: u64,
    pub workers: usize,
    pub region_a: Option<RegionSpec>,
    pub region_b: Option<RegionSpec>,
    pub pair_init: PairInit,
    pub dp_init: DpInit,
    pub mi_axis: MiAxis,
    pub separations: Vec<u32>,
    pub mc_initial: u64,
    pub mc_ceiling: u64,
    /// Times at which MC entropy is estimated (defaults to final time only).
    pub mc_times: Vec<u32>,
    pub la_values: Vec<Expr>,
    pub snapshots: Vec<u32>,
    /// Fit/scan window override.
    pub window: Option<(f64, f64)>,
    pub scan_family: Option<ScanFamily>,
    pub scan_grid: Vec<f64>,
    pub trials: u64,
    pub bootstrap: u32,
    /// Raw config text, embedded verbatim in manifests.
    pub raw: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: None,
            engine: EngineKind::Stabilizer,
            observables: Vec::new(),
            lengths: Vec::new(),
            rates: Vec::new(),
            steps: 0,
            ensemble: 1,
            ensemble_ceiling: 0,
            boundary: Boundary::Periodic,
            master_seed: 1,
            workers: 0,
            region_a: None,
            region_b: None,
            pair_init: PairInit::RandomPair,
            dp_init: DpInit::FullyOccupied,
            mi_axis: MiAxis::Rate,
            separations: Vec::new(),
            mc_initial: 10_000,
            mc_ceiling: 10_000_000,
            mc_times: Vec::new(),
            la_values: Vec::new(),
            snapshots: Vec::new(),
            window: None,
            scan_family: None,
            scan_grid: Vec::new(),
            trials: 0,
            bootstrap: 100,
            raw: String::new(),
        }
    }
}

fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>> {
    v.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Config(format!("bad value `{t}` for {key}"))))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig { raw: text.to_string(), ..Default::default() };
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", ln + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            cfg.apply(key, value)?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |k: &str, v: &str| Error::Config(format!("bad value `{v}` for {k}"));
        match key {
            "model" => {
                self.model = Some(Model::from_tag(value).ok_or_else(|| bad(key, value))?);
            }
            "engine" => {
                self.engine = match value {
                    "stabilizer" => EngineKind::Stabilizer,
                    "mc" => EngineKind::Mc,
                    "classical" => EngineKind::Classical,
                    "oracle" => EngineKind::Oracle,
                    _ => return Err(bad(key, value)),
                };
            }
            "observable" => {
                let obs = match value {
                    "entropy_t" => Observable::EntropyT,
                    "entropy_la" => Observable::EntropyLa,
                    "purification" => Observable::Purification,
                    "mutual_info" => Observable::MutualInfo,
                    "hamming" => Observable::Hamming,
                    "front" => Observable::Front,
                    "bond_dp" => Observable::BondDp,
                    "p_same" => Observable::PSame,
                    _ => return Err(bad(key, value)),
                };
                self.observables.push(obs);
            }
            "L" => self.lengths.extend(parse_list::<u32>(value, key)?),
            "p" => self.rates.extend(parse_list::<f64>(value, key)?),
            "T" => self.steps = value.parse().map_err(|_| bad(key, value))?,
            "ensemble" => self.ensemble = value.parse().map_err(|_| bad(key, value))?,
            "ensemble_ceiling" => {
                self.ensemble_ceiling = value.parse().map_err(|_| bad(key, value))?
            }
            "boundary" => {
                self.boundary = match value {
                    "periodic" => Boundary::Periodic,
                    "open" => Boundary::Open,
                    _ => return Err(bad(key, value)),
                };
            }
            "seed" => self.master_seed = value.parse().map_err(|_| bad(key, value))?,
            "workers" => self.workers = value.parse().map_err(|_| bad(key, value))?,
            "region_a" => self.region_a = Some(RegionSpec::parse(value)?),
            "region_b" => self.region_b = Some(RegionSpec::parse(value)?),
            "init" => {
                self.pair_init = match value {
                    "random" => PairInit::RandomPair,
                    "seed" => PairInit::SingleDifference,
                    "identical" => PairInit::Identical,
                    _ => return Err(bad(key, value)),
                };
            }
            "dp_init" => {
                self.dp_init = match value {
                    "seed" => DpInit::SingleSeed,
                    "full" => DpInit::FullyOccupied,
                    _ => return Err(bad(key, value)),
                };
            }
            "mi_axis" => {
                self.mi_axis = match value {
                    "p" => MiAxis::Rate,
                    "r" => MiAxis::Separation,
                    "eta" => MiAxis::CrossRatio,
                    _ => return Err(bad(key, value)),
                };
            }
            "separations" => self.separations.extend(parse_list::<u32>(value, key)?),
            "mc_initial" => self.mc_initial = value.parse().map_err(|_| bad(key, value))?,
            "mc_ceiling" => self.mc_ceiling = value.parse().map_err(|_| bad(key, value))?,
            "mc_times" => self.mc_times.extend(parse_list::<u32>(value, key)?),
            "la" => {
                for tok in value.split_whitespace() {
                    self.la_values.push(Expr::parse(tok)?);
                }
            }
            "snapshots" => self.snapshots.extend(parse_list::<u32>(value, key)?),
            "window" => {
                let w = parse_list::<f64>(value, key)?;
                if w.len() != 2 || w[0] >= w[1] {
                    return Err(bad(key, value));
                }
                self.window = Some((w[0], w[1]));
            }
            "family" => {
                self.scan_family = Some(match value {
                    "purification" => ScanFamily::Purification,
                    "nonclifford" => ScanFamily::NonClifford,
                    "bond_dp" => ScanFamily::BondDp,
                    _ => return Err(bad(key, value)),
                });
            }
            "p_grid" => self.scan_grid.extend(parse_list::<f64>(value, key)?),
            "trials" => self.trials = value.parse().map_err(|_| bad(key, value))?,
            "bootstrap" => self.bootstrap = value.parse().map_err(|_| bad(key, value))?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.lengths.is_empty() && !self.observables.is_empty() {
            return err("at least one L is required");
        }
        for &l in &self.lengths {
            if l < 2 || l % 2 != 0 {
                return err("L must be even and >= 2");
            }
        }
        for &p in &self.rates {
            if !(0.0..=1.0).contains(&p) {
                return err("p must lie in [0,1]");
            }
        }
        for obs in &self.observables {
            self.check_compat(*obs)?;
        }
        Ok(())
    }

    /// Engine/model/observable compatibility.
    fn check_compat(&self, obs: Observable) -> Result<()> {
        let fail = |m: String| Err(Error::EngineMismatch(m));
        let model = self.model;
        let needs_model = !matches!(obs, Observable::BondDp);
        if needs_model && model.is_none() {
            return Err(Error::Config(format!("{} requires a model", obs.tag())));
        }
        match (self.engine, obs) {
            (EngineKind::Stabilizer, _) => {
                if let Some(m) = model {
                    if !m.is_clifford() {
                        return fail(format!("stabilizer engine cannot run {}", m.tag()));
                    }
                }
                if matches!(
                    obs,
                    Observable::Hamming | Observable::Front | Observable::BondDp | Observable::PSame
                ) {
                    return fail(format!("{} is not a stabilizer observable", obs.tag()));
                }
            }
            (EngineKind::Mc, o) => {
                if let Some(m) = model {
                    if !m.is_automaton() {
                        return fail(format!(
                            "MC engine needs automaton dynamics, not {}",
                            m.tag()
                        ));
                    }
                }
                if matches!(o, Observable::Hamming | Observable::Front | Observable::BondDp) {
                    return fail(format!("{} is not an MC observable", o.tag()));
                }
            }
            (EngineKind::Classical, o) => {
                if !matches!(o, Observable::Hamming | Observable::Front | Observable::BondDp) {
                    return fail(format!("{} is not a classical observable", o.tag()));
                }
                if o != Observable::BondDp {
                    if let Some(m) = model {
                        if !m.is_automaton() {
                            return fail("classical engine needs an automaton model".into());
                        }
                    }
                }
            }
            (EngineKind::Oracle, o) => {
                if !matches!(o, Observable::EntropyT | Observable::EntropyLa | Observable::Purification) {
                    return fail(format!("{} is not an oracle observable", o.tag()));
                }
            }
        }
        // entropy of a non-Clifford model must go through the MC engine
        if model == Some(Model::QaNonClifford)
            && matches!(obs, Observable::EntropyT | Observable::EntropyLa | Observable::Purification)
            && !matches!(self.engine, EngineKind::Mc | EngineKind::Oracle)
        {
            return fail("qa_nonclifford entropy requires engine = mc (or oracle at small L)".into());
        }
        Ok(())
    }

    /// Key-value view of the resolved settings (manifest payload).
    pub fn resolved_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        if let Some(model) = self.model {
            m.insert("model".into(), model.tag().into());
        }
        m.insert("engine".into(), self.engine.tag().into());
        m.insert(
            "observables".into(),
            self.observables.iter().map(|o| o.tag()).collect::<Vec<_>>().join(" "),
        );
        m.insert("L".into(), self.lengths.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
        m.insert("p".into(), self.rates.iter().map(f64::to_string).collect::<Vec<_>>().join(" "));
        m.insert("T".into(), self.steps.to_string());
        m.insert("ensemble".into(), self.ensemble.to_string());
        m.insert("boundary".into(), self.boundary.to_string());
        m.insert("seed".into(), self.master_seed.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_repeatable_keys_and_regions() {
        let cfg = ExperimentConfig::parse(
            "model = qa_clifford_entanglement\nengine = stabilizer\nobservable = entropy_t\n\
             L = 64 128\nL = 256\np = 0.137\nT = 100\nensemble = 10\nseed = 7\n\
             region_a = arc 0 L/8\nregion_b = arc L/2 L/8\n",
        )
        .unwrap();
        assert_eq!(cfg.lengths, vec![64, 128, 256]);
        let a = cfg.region_a.unwrap().resolve(64, 64);
        assert_eq!(a.len(), 8);
        assert_eq!(a.sites()[0], 0);
        let b = cfg.region_b.unwrap().resolve(64, 64);
        assert_eq!(b.sites()[0], 32);
    }

    #[test]
    fn expr_forms() {
        assert_eq!(Expr::parse("12").unwrap().eval(64), 12);
        assert_eq!(Expr::parse("L").unwrap().eval(64), 64);
        assert_eq!(Expr::parse("L/8").unwrap().eval(64), 8);
        assert_eq!(Expr::parse("3L/8").unwrap().eval(64), 24);
        assert!(Expr::parse("L/0").is_err());
        assert!(Expr::parse("x").is_err());
    }

    #[test]
    fn rejects_incompatible_engine() {
        let text = "model = qa_nonclifford\nengine = stabilizer\nobservable = entropy_t\n\
                    L = 8\np = 0.1\nT = 10\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "model = nonqa_clifford\nengine = mc\nobservable = entropy_t\n\
                    L = 8\np = 0.1\nT = 10\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::parse("frobnicate = 1\n").is_err());
        assert!(ExperimentConfig::parse("model = qa_purification\nengine = classical\nobservable = hamming\nL = 7\np = 0.1\nT = 5\n").is_err());
        assert!(ExperimentConfig::parse("model = qa_purification\nengine = classical\nobservable = hamming\nL = 8\np = 1.4\nT = 5\n").is_err());
    }
}
