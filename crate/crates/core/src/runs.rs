//! Non-overlapping head runs in i.i.d. Bernoulli trials: exact counting, an
//! exhaustive oracle, the size-bias coupling and the Poisson bounds.
//!
//! The statistic is `S = sum_{i=0}^{n-k} I_i` with
//! `I_i = 1{X_{i-1} = 0, X_i = ... = X_{i+k-1} = 1}` and `X_{-1} = 0`, so a
//! block of `k + j` ones contributes one run, never two.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{q_sequence, zero_prob_sign_bounds, CouplingLaw};
use crate::discrete_dist::{empirical_from_counts, tv_distance, IntegerPmf, Origin};
use crate::error::{domain, Error, Result};
use crate::pointproc::SeedSpec;
use crate::poisson_stein::PoissonLaw;
use crate::report::{BoundCheck, BoundReport};

/// Largest `n` handled by exhaustive enumeration.
pub const MAX_EXHAUSTIVE_N: u32 = 20;
/// Largest `n` handled by the exact size-bias enumeration.
pub const MAX_SIZEBIAS_N: u32 = 14;

pub const CHECK_UNIFORM: &str = "|P(S<=v)-P(P<=v)|";
pub const CHECK_RUNS_ZERO: &str = "P(S=0)";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunsConfig {
    pub n: u32,
    pub k: u32,
    pub p: f64,
}

impl RunsConfig {
    pub fn new(n: u32, k: u32, p: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(domain(format!("run length must satisfy 1 <= k <= n (k = {k}, n = {n})")));
        }
        if !(p > 0.0 && p <= 0.5) {
            return Err(domain(format!("success probability must satisfy 0 < p <= 1/2, got {p}")));
        }
        Ok(Self { n, k, p })
    }

    /// `E[S] = p^k (1 + (n - k)(1 - p))`.
    pub fn mean(&self) -> f64 {
        self.p.powi(self.k as i32) * (1.0 + f64::from(self.n - self.k) * (1.0 - self.p))
    }

    fn weight(&self, ones: u32) -> f64 {
        self.p.powi(ones as i32) * (1.0 - self.p).powi((self.n - ones) as i32)
    }
}

/// `S` evaluated literally from its defining sum.
pub fn count_runs(bits: &[bool], k: usize) -> Result<u64> {
    let n = bits.len();
    if k == 0 || k > n {
        return Err(domain(format!("run length must satisfy 1 <= k <= n (k = {k}, n = {n})")));
    }
    let x = |j: isize| j >= 0 && bits[j as usize];
    Ok((0..=n - k)
        .filter(|&i| !x(i as isize - 1) && (i..i + k).all(|j| bits[j]))
        .count() as u64)
}

// bit i of the result is I_i for the sequence whose bit j is X_j
fn run_starts(x: u32, k: u32) -> u32 {
    let mut r = x;
    for s in 1..k {
        r &= x >> s;
    }
    r & !(x << 1)
}

// integer tallies keyed by (S, number of ones), p-independent
fn tally(n: u32, k: u32) -> BTreeMap<(u32, u32), u64> {
    let total = 1u64 << n;
    let chunks = if n >= 12 { 64u64 } else { 1 };
    let size = total / chunks;
    let parts: Vec<BTreeMap<(u32, u32), u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m: BTreeMap<(u32, u32), u64> = BTreeMap::new();
            let mut dense = vec![0u64; ((n + 1) * (n + 1)) as usize];
            for x in c * size..(c + 1) * size {
                let x = x as u32;
                let s = run_starts(x, k).count_ones();
                dense[(s * (n + 1) + x.count_ones()) as usize] += 1;
            }
            for (i, c) in dense.into_iter().enumerate() {
                if c > 0 {
                    m.insert((i as u32 / (n + 1), i as u32 % (n + 1)), c);
                }
            }
            m
        })
        .collect();
    let mut out = BTreeMap::new();
    for part in parts {
        for (key, c) in part {
            *out.entry(key).or_default() += c;
        }
    }
    out
}

/// Exact law of `S` by enumerating all `2^n` sequences.
pub fn brute_force_dist(cfg: &RunsConfig) -> Result<IntegerPmf> {
    if cfg.n > MAX_EXHAUSTIVE_N {
        return Err(Error::Size(format!("exhaustive enumeration limited to n <= {MAX_EXHAUSTIVE_N}")));
    }
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for ((s, ones), c) in tally(cfg.n, cfg.k) {
        *mass.entry(u64::from(s)).or_default() += c as f64 * cfg.weight(ones);
    }
    let (support, m): (Vec<u64>, Vec<f64>) = mass.into_iter().filter(|(_, p)| *p > 0.0).unzip();
    let total: f64 = m.iter().sum();
    IntegerPmf::new(support, m.into_iter().map(|v| v / total).collect())
}

/// Exact joint law of `(S, -U_Y)` with the identity check.
#[derive(Clone, Debug)]
pub struct SizeBiasRuns {
    pub coupling: CouplingLaw,
    /// `max_m |m P(S=m) - E[S] P(S - U_Y = m-1)|`.
    pub max_violation: f64,
    pub upper_sign_bound: bool,
}

pub fn sizebias_runs_check(cfg: &RunsConfig) -> Result<SizeBiasRuns> {
    let (n, k) = (cfg.n, cfg.k);
    if n > MAX_SIZEBIAS_N {
        return Err(Error::Size(format!("exact size-bias enumeration limited to n <= {MAX_SIZEBIAS_N}")));
    }
    let last = n - k;
    let masks: Vec<u32> = (0..=last)
        .map(|l| {
            let lo = l.saturating_sub(k);
            let hi = (l + k).min(last);
            (lo..=hi).fold(0u32, |m, i| m | (1 << i))
        })
        .collect();
    // tallies keyed by (S, U, Y > 0, ones)
    let mut counts: BTreeMap<(u32, u32, bool, u32), u64> = BTreeMap::new();
    for x in 0..(1u32 << n) {
        let starts = run_starts(x, k);
        let s = starts.count_ones();
        let ones = x.count_ones();
        for (l, mask) in masks.iter().enumerate() {
            *counts.entry((s, (starts & mask).count_ones(), l > 0, ones)).or_default() += 1;
        }
    }
    let mean = cfg.mean();
    let pk = cfg.p.powi(k as i32);
    let mut atoms: BTreeMap<(u64, i64), f64> = BTreeMap::new();
    for ((s, u, later, ones), c) in counts {
        let ey = if later { pk * (1.0 - cfg.p) } else { pk };
        *atoms.entry((u64::from(s), -i64::from(u))).or_default() += c as f64 * cfg.weight(ones) * ey / mean;
    }
    let total: f64 = atoms.values().sum();
    let coupling = CouplingLaw::exact(atoms.into_iter().map(|(key, p)| (key, p / total)), mean)?;
    let q = q_sequence(&coupling)?;
    let max_violation = q.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_violation > 1e-12 {
        return Err(Error::Internal(format!("runs size-bias identity violated by {max_violation:e}")));
    }
    let sign = zero_prob_sign_bounds(&coupling)?;
    Ok(SizeBiasRuns { coupling, max_violation, upper_sign_bound: sign.upper_applicable })
}

/// `(2k + 1)(1 ^ E S) p^k`.
pub fn tv_bound(cfg: &RunsConfig) -> f64 {
    f64::from(2 * cfg.k + 1) * cfg.mean().min(1.0) * cfg.p.powi(cfg.k as i32)
}

/// `40 (v + 2)^2 log(n) / n`, defined for `n >= 2`.
pub fn uniform_bound(n: u32, v: u64) -> Option<f64> {
    (n >= 2).then(|| 40.0 * ((v + 2) as f64).powi(2) * f64::from(n).ln() / f64::from(n))
}

/// `exp(-(n - k + 1) p^k (1 - p))`.
pub fn zero_bound(cfg: &RunsConfig) -> f64 {
    (-(f64::from(cfg.n - cfg.k + 1)) * cfg.p.powi(cfg.k as i32) * (1.0 - cfg.p)).exp()
}

/// Both theorem bounds, with exact left-hand sides when `n` allows enumeration.
pub fn bounds_runs(cfg: &RunsConfig, v: u64) -> Result<BoundReport> {
    let lambda = cfg.mean();
    let mut r = BoundReport::new("runs");
    r.term("n", f64::from(cfg.n))
        .term("k", f64::from(cfg.k))
        .term("p", cfg.p)
        .term("v", v as f64)
        .term("E[S]", lambda)
        .term("p^k", cfg.p.powi(cfg.k as i32));
    let exact = (cfg.n <= MAX_EXHAUSTIVE_N).then(|| brute_force_dist(cfg)).transpose()?;
    let law = PoissonLaw::new(lambda)?;
    let mut tv = BoundCheck::new("d_TV", tv_bound(cfg));
    let mut zero = BoundCheck::new(CHECK_RUNS_ZERO, zero_bound(cfg));
    let mut uniform = uniform_bound(cfg.n, v).map(|b| BoundCheck::new(CHECK_UNIFORM, b));
    if let Some(pmf) = &exact {
        tv = tv.with_exact(tv_distance(pmf, law));
        zero = zero.with_exact(pmf.prob(0));
        let diff = (pmf.cdf(v) - law.cdf(v)).abs();
        uniform = uniform.map(|u| u.with_exact(diff));
    }
    r.push(tv);
    if let Some(u) = uniform {
        r.push(u);
    } else {
        r.notes.push("uniform bound requires n >= 2".into());
    }
    r.push(zero);
    Ok(r)
}

/// Fills the checks of [`bounds_runs`] that lack a left-hand side with
/// estimates from a simulated law of `S`, allowing three standard errors.
pub fn attach_runs_estimates(r: &mut BoundReport, cfg: &RunsConfig, sim: &IntegerPmf, v: u64) -> Result<()> {
    let reps = match sim.origin() {
        Origin::Empirical { samples } => samples as f64,
        Origin::Exact => return Err(domain("a simulated law is required")),
    };
    let se = |f: f64| (f * (1.0 - f) / reps).sqrt();
    let law = PoissonLaw::new(cfg.mean())?;
    let (f0, fv) = (sim.prob(0), sim.cdf(v));
    for c in r.checks.iter_mut().filter(|c| c.lhs.is_none()) {
        let (lhs, allowance) = match c.quantity.as_str() {
            "d_TV" => (tv_distance(sim, law), 3.0 * sim.tv_std_error()),
            CHECK_UNIFORM => ((fv - law.cdf(v)).abs(), 3.0 * se(fv)),
            CHECK_RUNS_ZERO => (f0, 3.0 * se(f0)),
            _ => continue,
        };
        *c = c.clone().with_estimate(lhs, allowance);
    }
    Ok(())
}

/// Law of `S` estimated from `reps` simulated sequences.
pub fn simulate_runs(cfg: &RunsConfig, reps: u64, seed: SeedSpec) -> Result<IntegerPmf> {
    if reps == 0 {
        return Err(domain("at least one replication is needed"));
    }
    let mut rng = seed.rng();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut bits = vec![false; cfg.n as usize];
    for _ in 0..reps {
        for b in bits.iter_mut() {
            *b = rng.random::<f64>() < cfg.p;
        }
        *counts.entry(count_runs(&bits, cfg.k as usize)?).or_default() += 1;
    }
    empirical_from_counts(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_runs(&bits("111"), 1).unwrap(), 1);
        assert_eq!(count_runs(&bits("0101"), 1).unwrap(), 2);
        assert_eq!(count_runs(&bits("0000"), 2).unwrap(), 0);
        assert!(count_runs(&bits("01"), 3).is_err());
    }

    #[test]
    fn bitmask_matches_literal_count() {
        for n in 1..=10u32 {
            for k in 1..=n {
                for x in 0..(1u32 << n) {
                    let b: Vec<bool> = (0..n).map(|j| x >> j & 1 == 1).collect();
                    assert_eq!(u64::from(run_starts(x, k).count_ones()), count_runs(&b, k as usize).unwrap());
                }
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let d = brute_force_dist(&RunsConfig::new(2, 1, 0.5).unwrap()).unwrap();
        assert_eq!(d.support(), &[0, 1]);
        assert!((d.prob(0) - 0.25).abs() < 1e-15);
        let cfg = RunsConfig::new(5, 5, 0.3).unwrap();
        let d = brute_force_dist(&cfg).unwrap();
        assert!((d.prob(1) - 0.3f64.powi(5)).abs() < 1e-15);
        let d = brute_force_dist(&RunsConfig::new(8, 2, 1e-9).unwrap()).unwrap();
        assert!((d.prob(0) - 1.0).abs() < 1e-8);
        assert!(brute_force_dist(&RunsConfig::new(21, 2, 0.5).unwrap()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunsConfig::new(3, 4, 0.5).is_err());
        assert!(RunsConfig::new(3, 0, 0.5).is_err());
        assert!(RunsConfig::new(3, 2, 0.6).is_err());
    }

    #[test]
    fn bound_plug_ins() {
        let cfg = RunsConfig::new(100, 2, 0.5).unwrap();
        assert!((cfg.mean() - 12.5).abs() < 1e-12);
        assert!((tv_bound(&cfg) - 1.25).abs() < 1e-12);
        assert!((uniform_bound(100, 0).unwrap() - 40.0 * 4.0 * 100f64.ln() / 100.0).abs() < 1e-12);
        assert!(uniform_bound(1, 0).is_none());
    }

    #[test]
    fn small_sizebias_case() {
        let sb = sizebias_runs_check(&RunsConfig::new(2, 1, 0.5).unwrap()).unwrap();
        assert!(sb.max_violation < 1e-15);
        assert!(sb.upper_sign_bound);
        let x = sb.coupling.law_of_x().unwrap();
        assert!((x.prob(1) - 0.75).abs() < 1e-15);
    }
}
