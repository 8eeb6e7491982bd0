//! Flat `key = value` experiment configs. `#` starts a comment; lists are
//! comma separated.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chenstein::interpoint::{self, InterpointConfig};
use chenstein::runs::{RunsConfig, MAX_EXHAUSTIVE_N};
use chenstein::voronoi::{VoronoiConfig, MIN_P_REPS};
use serde::Serialize;

use crate::error::{config, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Interpoint,
    Runs,
    VoronoiCirc,
    VoronoiInradius,
    UstatBinomial,
    UstatPoisson,
    CoreSelftest,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Interpoint,
        Self::Runs,
        Self::VoronoiCirc,
        Self::VoronoiInradius,
        Self::UstatBinomial,
        Self::UstatPoisson,
        Self::CoreSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Interpoint => "interpoint",
            Self::Runs => "runs",
            Self::VoronoiCirc => "voronoi_circ",
            Self::VoronoiInradius => "voronoi_inradius",
            Self::UstatBinomial => "ustat_binomial",
            Self::UstatPoisson => "ustat_poisson",
            Self::CoreSelftest => "core_selftest",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Self::Interpoint => &["d", "t", "u_max", "u_grid"],
            Self::Runs => &["n", "k", "p", "v"],
            Self::VoronoiCirc => &["d", "t", "grid_points", "p_reps", "u_grid"],
            Self::VoronoiInradius => &["d", "t", "grid_points", "u_grid"],
            Self::UstatBinomial => &["kernel", "region_upper", "delta", "d", "n", "m", "v", "mc_samples", "sizebias_draws"],
            Self::UstatPoisson => &["kernel", "region_upper", "delta", "d", "t", "m", "v", "mc_samples", "sizebias_draws"],
            Self::CoreSelftest => &[],
        }
    }

    fn default_reps(self) -> u64 {
        match self {
            Self::Interpoint | Self::VoronoiInradius | Self::UstatBinomial | Self::UstatPoisson => 10_000,
            Self::Runs => 100_000,
            Self::VoronoiCirc => 1_000,
            Self::CoreSelftest => 1,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| config(format!("unknown experiment {s:?}")))
    }
}

/// Largest sequence length accepted by the runs experiment.
pub const MAX_RUNS_N: u32 = 1_000_000;

const COMMON_KEYS: [&str; 5] = ["experiment", "reps", "seed", "workers", "output"];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `1{x in [0, upper]}`.
    Region { upper: Vec<f64> },
    /// `1{|x - y| <= delta}`.
    Distance { delta: f64 },
}

impl KernelSpec {
    pub fn arity(&self) -> u64 {
        match self {
            Self::Region { .. } => 1,
            Self::Distance { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Params {
    Interpoint { d: usize, t: f64, u_max: f64, u_grid: Vec<f64> },
    Runs { n: Vec<u32>, k: Option<Vec<u32>>, p: Vec<f64>, v: Vec<u64> },
    VoronoiCirc { d: usize, t: f64, grid_points: usize, p_reps: u64, u_grid: Option<Vec<f64>> },
    VoronoiInradius { d: usize, t: f64, grid_points: usize, u_grid: Option<Vec<f64>> },
    UstatBinomial { kernel: KernelSpec, d: usize, n: u64, m: u64, v: u64, mc_samples: u64, sizebias_draws: u64 },
    UstatPoisson { kernel: KernelSpec, d: usize, t: f64, m: u64, v: u64, mc_samples: u64, sizebias_draws: u64 },
    CoreSelftest,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub reps: u64,
    pub master_seed: u64,
    pub workers: usize,
    pub output_path: PathBuf,
}

/// Raw key-value pairs with the line each came from.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| CliError::ConfigLine { line, message: format!("expected key = value, got {content:?}") })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
            return Err(CliError::ConfigLine { line, message: format!("invalid key {k:?}") });
        }
        if v.is_empty() {
            return Err(CliError::ConfigLine { line, message: format!("empty value for {k}") });
        }
        if out.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(CliError::ConfigLine { line, message: format!("duplicate key {k}") });
        }
    }
    Ok(out)
}

struct Pairs(BTreeMap<String, (usize, String)>);

impl Pairs {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|(line, v)| {
                v.parse().map_err(|_| CliError::ConfigLine { line: *line, message: format!("invalid value {v:?} for {key}") })
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| config(format!("missing required key {key}")))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|(line, v)| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse().map_err(|_| CliError::ConfigLine {
                            line: *line,
                            message: format!("invalid list entry {:?} for {key}", x.trim()),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn require_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.list(key)?.ok_or_else(|| config(format!("missing required key {key}")))
    }
}

fn wrap(e: chenstein::Error) -> CliError {
    config(e.to_string())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > 2 {
        return Err(config(format!("d must be 1 or 2, got {d}")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses and validates a config; every precondition of the target
    /// module is checked here.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = Pairs(parse_pairs(text)?);
        let experiment: Experiment = pairs.require("experiment")?;
        for (k, (line, _)) in &pairs.0 {
            if !COMMON_KEYS.contains(&k.as_str()) && !experiment.keys().contains(&k.as_str()) {
                return Err(CliError::ConfigLine { line: *line, message: format!("unknown key {k} for {experiment}") });
            }
        }
        let reps = pairs.or("reps", experiment.default_reps())?;
        let master_seed = pairs.or("seed", 0u64)?;
        let workers = pairs.or("workers", 1usize)?;
        let output_path = PathBuf::from(pairs.or("output", "out".to_string())?);
        let params = match experiment {
            Experiment::Interpoint => {
                let d = pairs.require("d")?;
                let t = pairs.require("t")?;
                let u_max = pairs.or("u_max", 4.0)?;
                let u_grid = match pairs.list("u_grid")? {
                    Some(g) => g,
                    None => interpoint::default_grid(u_max),
                };
                Params::Interpoint { d, t, u_max, u_grid }
            }
            Experiment::Runs => {
                let k = match pairs.raw("k") {
                    Some((_, v)) if v == "all" => None,
                    _ => Some(pairs.require_list("k")?),
                };
                Params::Runs { n: pairs.require_list("n")?, k, p: pairs.require_list("p")?, v: pairs.require_list("v")? }
            }
            Experiment::VoronoiCirc => Params::VoronoiCirc {
                d: pairs.require("d")?,
                t: pairs.require("t")?,
                grid_points: pairs.or("grid_points", 10)?,
                p_reps: pairs.or("p_reps", 1_000_000)?,
                u_grid: pairs.list("u_grid")?,
            },
            Experiment::VoronoiInradius => Params::VoronoiInradius {
                d: pairs.require("d")?,
                t: pairs.require("t")?,
                grid_points: pairs.or("grid_points", 50)?,
                u_grid: pairs.list("u_grid")?,
            },
            Experiment::UstatBinomial | Experiment::UstatPoisson => {
                let d: usize = pairs.require("d")?;
                let kernel = match pairs.require::<String>("kernel")?.as_str() {
                    "region" => KernelSpec::Region {
                        upper: pairs.list("region_upper")?.unwrap_or_else(|| vec![0.5; d]),
                    },
                    "distance" => KernelSpec::Distance { delta: pairs.require("delta")? },
                    other => return Err(config(format!("kernel must be region or distance, got {other:?}"))),
                };
                let m = pairs.or("m", 1)?;
                let v = pairs.or("v", 1)?;
                let mc_samples = pairs.or("mc_samples", 100_000)?;
                let sizebias_draws = pairs.or("sizebias_draws", 0)?;
                if experiment == Experiment::UstatBinomial {
                    Params::UstatBinomial { kernel, d, n: pairs.require("n")?, m, v, mc_samples, sizebias_draws }
                } else {
                    Params::UstatPoisson { kernel, d, t: pairs.require("t")?, m, v, mc_samples, sizebias_draws }
                }
            }
            Experiment::CoreSelftest => Params::CoreSelftest,
        };
        let cfg = Self { experiment, params, reps, master_seed, workers, output_path };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(config("reps must be at least 1"));
        }
        if self.workers == 0 {
            return Err(config("workers must be at least 1"));
        }
        match &self.params {
            Params::Interpoint { d, t, u_max, u_grid } => {
                check_dim(*d)?;
                InterpointConfig::unit(*d, *t, *u_max, self.reps, self.master_seed).map_err(wrap)?;
                if self.reps < interpoint::MIN_REPS {
                    return Err(config(format!("reps must be at least {}", interpoint::MIN_REPS)));
                }
                if let Some(u) = u_grid.iter().find(|&&u| !(u > 0.0 && u <= *u_max)) {
                    return Err(config(format!("u_grid entry {u} outside (0, u_max]")));
                }
            }
            Params::Runs { n, k, p, v } => {
                if n.is_empty() || p.is_empty() || v.is_empty() || k.as_ref().is_some_and(Vec::is_empty) {
                    return Err(config("runs lists must be non-empty"));
                }
                for &n in n {
                    if n == 0 || n > MAX_RUNS_N {
                        return Err(config(format!("n must satisfy 1 <= n <= {MAX_RUNS_N}, got {n}")));
                    }
                    for &k in k.iter().flatten() {
                        if k == 0 || k > n {
                            return Err(config(format!("runs precondition 1 ≤ k ≤ n violated: k = {k}, n = {n} (k ≤ n)")));
                        }
                    }
                    for &p in p {
                        RunsConfig::new(n, 1, p).map_err(wrap)?;
                    }
                }
                if n.iter().any(|&n| n > MAX_EXHAUSTIVE_N) && self.reps < 100 {
                    return Err(config("simulated runs need reps >= 100"));
                }
            }
            Params::VoronoiCirc { d, t, grid_points, p_reps, u_grid } => {
                check_dim(*d)?;
                if *p_reps < MIN_P_REPS {
                    return Err(config(format!("p_reps must be at least {MIN_P_REPS}")));
                }
                if *t < 1.0 {
                    return Err(config(format!("t must be at least 1, got {t}")));
                }
                if let Some(u) = u_grid.iter().flatten().find(|&&u| !(u > 0.0)) {
                    return Err(config(format!("u_grid entry {u} must be positive")));
                }
                self.voronoi(*d, *t, *grid_points, u_grid.clone(), true)?;
            }
            Params::VoronoiInradius { d, t, grid_points, u_grid } => {
                check_dim(*d)?;
                if *t <= std::f64::consts::E.powi(2) {
                    return Err(config(format!("t must exceed e^2, got {t}")));
                }
                if let Some(u) = u_grid.iter().flatten().find(|&&u| u <= -t.ln()) {
                    return Err(config(format!("u_grid entry {u} must exceed -log t")));
                }
                self.voronoi(*d, *t, *grid_points, u_grid.clone(), false)?;
            }
            Params::UstatBinomial { kernel, d, n, m, v, mc_samples, .. } => {
                self.check_ustat(kernel, *d, *m, *v, *mc_samples)?;
                if *n < 2 * kernel.arity() {
                    return Err(config(format!("n = {n} must be at least twice the kernel arity")));
                }
            }
            Params::UstatPoisson { kernel, d, t, m, v, mc_samples, .. } => {
                self.check_ustat(kernel, *d, *m, *v, *mc_samples)?;
                if !(t.is_finite() && *t > 0.0) {
                    return Err(config(format!("t must be positive, got {t}")));
                }
            }
            Params::CoreSelftest => {}
        }
        Ok(())
    }

    fn check_ustat(&self, kernel: &KernelSpec, d: usize, m: u64, v: u64, mc_samples: u64) -> Result<()> {
        check_dim(d)?;
        if m == 0 || v == 0 {
            return Err(config("m and v must be at least 1"));
        }
        if mc_samples < 2 {
            return Err(config("mc_samples must be at least 2"));
        }
        if self.reps < 100 {
            return Err(config("reps must be at least 100"));
        }
        match kernel {
            KernelSpec::Region { upper } => {
                if upper.len() != d || upper.iter().any(|&u| !(u > 0.0 && u <= 1.0)) {
                    return Err(config("region_upper needs d entries in (0, 1]"));
                }
            }
            KernelSpec::Distance { delta } => {
                if !(delta.is_finite() && *delta > 0.0) {
                    return Err(config(format!("delta must be positive, got {delta}")));
                }
            }
        }
        Ok(())
    }

    /// The simulation config of either Voronoi experiment.
    pub fn voronoi(&self, d: usize, t: f64, grid_points: usize, u_grid: Option<Vec<f64>>, circum: bool) -> Result<VoronoiConfig> {
        let grid = match u_grid {
            Some(g) => g,
            None if grid_points == 0 => return Err(config("grid_points must be at least 1")),
            None if circum => chenstein::voronoi::weibull_grid(d, grid_points),
            None => chenstein::voronoi::gumbel_grid(grid_points),
        };
        VoronoiConfig::unit(d, t, grid, self.reps, self.master_seed).map_err(wrap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_lists() {
        let cfg = ExperimentConfig::parse(
            "# runs sweep\nexperiment = runs\nn = 4, 5 # two lengths\nk = all\np = 0.1,0.5\nv = 1\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.params, Params::Runs { n: vec![4, 5], k: None, p: vec![0.1, 0.5], v: vec![1] });
    }

    #[test]
    fn k_above_n_names_precondition() {
        let err = ExperimentConfig::parse("experiment = runs\nn = 3\nk = 5\np = 0.3\nv = 0\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("k ≤ n"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(ExperimentConfig::parse("experiment = core_selftest\nfoo = 1\n").is_err());
        assert!(ExperimentConfig::parse("experiment = core_selftest\nseed = 1\nseed = 2\n").is_err());
        assert!(ExperimentConfig::parse("experiment = nope\n").is_err());
        assert!(ExperimentConfig::parse("experiment core_selftest\n").is_err());
        assert!(ExperimentConfig::parse("seed = 1\n").is_err());
    }

    #[test]
    fn module_preconditions_checked() {
        assert!(ExperimentConfig::parse("experiment = interpoint\nd = 1\nt = 2\nu_max = 4\n").is_err());
        assert!(ExperimentConfig::parse("experiment = voronoi_inradius\nd = 1\nt = 5\n").is_err());
        assert!(ExperimentConfig::parse("experiment = voronoi_circ\nd = 3\nt = 100\n").is_err());
        assert!(ExperimentConfig::parse("experiment = ustat_binomial\nkernel = distance\ndelta = 0.1\nd = 1\nn = 3\n").is_err());
        let ok = ExperimentConfig::parse("experiment = ustat_poisson\nkernel = region\nd = 2\nt = 10\n").unwrap();
        assert_eq!(ok.reps, 10_000);
    }
}
