//! Finite-support laws on `N_0`, distances to Poisson and other integer laws,
//! and the Stein discrepancy identity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::poisson_stein::{IndicatorSet, LipschitzFn, PoissonLaw, SteinSolution, SteinTarget};

/// Tolerance on the total mass of a validated law.
pub const MASS_TOL: f64 = 1e-12;

/// Tail mass beyond which Poisson comparison targets are truncated. The
/// omitted tail is added back exactly in every distance.
pub const POISSON_TAIL: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Exact,
    Empirical { samples: u64 },
}

/// Probability mass function with finite support in `N_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerPmf {
    support: Vec<u64>,
    mass: Vec<f64>,
    origin: Origin,
}

impl IntegerPmf {
    pub fn new(support: Vec<u64>, mass: Vec<f64>) -> Result<Self> {
        Self::with_origin(support, mass, Origin::Exact)
    }

    fn with_origin(support: Vec<u64>, mass: Vec<f64>, origin: Origin) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::Validation("support and mass lengths differ".into()));
        }
        if support.is_empty() {
            return Err(Error::Validation("empty support".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("support must be strictly ascending".into()));
        }
        if let Some(m) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Validation(format!("invalid mass {m}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { support, mass, origin })
    }

    /// Law with masses `dense[k]` at `k = 0..dense.len()`; zero masses are dropped.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        let (support, mass): (Vec<u64>, Vec<f64>) = dense
            .iter()
            .enumerate()
            .filter(|(_, m)| **m != 0.0)
            .map(|(k, m)| (k as u64, *m))
            .unzip();
        Self::new(support, mass)
    }

    pub fn point_mass(k: u64) -> Self {
        Self { support: vec![k], mass: vec![1.0], origin: Origin::Exact }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Self::from_dense(&[1.0 - p, p])
    }

    /// Poisson law truncated at the first index whose tail is below `tail`,
    /// with the omitted mass folded into the last atom.
    pub fn poisson_truncated(lambda: f64, tail: f64) -> Result<Self> {
        let law = PoissonLaw::new(lambda)?;
        let k = law.truncation_index(tail);
        let mut dense = law.pmf_table(k);
        let total: f64 = dense.iter().sum();
        dense[k as usize] += 1.0 - total;
        Self::from_dense(&dense)
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.support.iter().copied().zip(self.mass.iter().copied())
    }

    pub fn prob(&self, k: u64) -> f64 {
        self.support.binary_search(&k).map_or(0.0, |i| self.mass[i])
    }

    pub fn cdf(&self, v: u64) -> f64 {
        let end = self.support.partition_point(|&s| s <= v);
        if end == self.support.len() {
            1.0
        } else {
            self.mass[..end].iter().sum()
        }
    }

    pub fn max_value(&self) -> u64 {
        *self.support.last().expect("non-empty support")
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, m)| k as f64 * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.iter().map(|(k, m)| (k as f64 - mu).powi(2) * m).sum()
    }

    /// Masses at `0..=max_value`.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_value() as usize + 1];
        for (k, m) in self.iter() {
            out[k as usize] = m;
        }
        out
    }

    pub fn prob_in(&self, set: &IndicatorSet) -> f64 {
        self.iter().filter(|(k, _)| set.contains(*k)).map(|(_, m)| m).sum()
    }

    /// Per-atom standard errors `sqrt(p(1-p)/n)` for empirical laws, zero for exact ones.
    pub fn standard_errors(&self) -> Vec<f64> {
        match self.origin {
            Origin::Exact => vec![0.0; self.mass.len()],
            Origin::Empirical { samples } => {
                self.mass.iter().map(|p| (p * (1.0 - p) / samples as f64).sqrt()).collect()
            }
        }
    }

    /// Standard error scale of a total-variation distance computed from this law: `sum(se) / 2`.
    pub fn tv_std_error(&self) -> f64 {
        0.5 * self.standard_errors().iter().sum::<f64>()
    }

    /// `value,probability` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,probability\n");
        for (k, m) in self.iter() {
            let _ = writeln!(out, "{k},{m:.16e}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "value,probability" => {}
            Some((i, _)) => {
                return Err(Error::Parse { line: i + 1, message: "expected header value,probability".into() })
            }
            None => return Err(Error::Parse { line: 1, message: "empty input".into() }),
        }
        let mut support = Vec::new();
        let mut mass = Vec::new();
        for (i, line) in lines {
            let parse_err = |message: &str| Error::Parse { line: i + 1, message: message.into() };
            let (k, m) = line.split_once(',').ok_or_else(|| parse_err("expected two columns"))?;
            support.push(k.trim().parse::<u64>().map_err(|_| parse_err("invalid value"))?);
            mass.push(m.trim().parse::<f64>().map_err(|_| parse_err("invalid probability"))?);
        }
        Self::new(support, mass)
    }
}

/// Relative-frequency law of a sample.
pub fn empirical_pmf(samples: &[u64]) -> Result<IntegerPmf> {
    if samples.is_empty() {
        return Err(domain("empirical law of an empty sample"));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_default() += 1;
    }
    empirical_from_counts(&counts)
}

/// Relative-frequency law from a table of counts.
pub fn empirical_from_counts(counts: &BTreeMap<u64, u64>) -> Result<IntegerPmf> {
    let n: u64 = counts.values().sum();
    if n == 0 {
        return Err(domain("empirical law of an empty sample"));
    }
    let (support, mass) = counts
        .iter()
        .filter(|(_, c)| **c > 0)
        .map(|(k, c)| (*k, *c as f64 / n as f64))
        .unzip();
    IntegerPmf::with_origin(support, mass, Origin::Empirical { samples: n })
}

/// Comparison target for the distances.
#[derive(Clone, Copy, Debug)]
pub enum Law<'a> {
    Pmf(&'a IntegerPmf),
    Poisson(PoissonLaw),
}

impl<'a> From<&'a IntegerPmf> for Law<'a> {
    fn from(p: &'a IntegerPmf) -> Self {
        Law::Pmf(p)
    }
}

impl From<PoissonLaw> for Law<'_> {
    fn from(p: PoissonLaw) -> Self {
        Law::Poisson(p)
    }
}

// dense masses of q on 0..=k_max together with the mass q puts above k_max
fn dense_target(q: &Law<'_>, k_min: u64) -> (Vec<f64>, f64) {
    match q {
        Law::Pmf(q) => {
            let mut d = q.dense();
            let len = d.len().max(k_min as usize + 1);
            d.resize(len, 0.0);
            (d, 0.0)
        }
        Law::Poisson(law) => {
            let k = law.truncation_index(POISSON_TAIL).max(k_min);
            (law.pmf_table(k), law.sf(k + 1))
        }
    }
}

fn aligned(p: &IntegerPmf, q: &Law<'_>) -> (Vec<f64>, Vec<f64>, f64) {
    let (qd, q_tail) = dense_target(q, p.max_value());
    let mut pd = p.dense();
    pd.resize(qd.len(), 0.0);
    (pd, qd, q_tail)
}

/// `sup_A |P(X in A) - Q(A)| = 1/2 sum_k |p_k - q_k|`.
pub fn tv_distance<'a>(p: &IntegerPmf, q: impl Into<Law<'a>>) -> f64 {
    let (pd, qd, q_tail) = aligned(p, &q.into());
    0.5 * (pd.iter().zip(&qd).map(|(a, b)| (a - b).abs()).sum::<f64>() + q_tail)
}

/// `sum_v |F_p(v) - F_q(v)|`.
pub fn wasserstein_distance<'a>(p: &IntegerPmf, q: impl Into<Law<'a>>) -> f64 {
    let q = q.into();
    let (pd, qd, _) = aligned(p, &q);
    let mut fp = 0.0;
    let mut fq = 0.0;
    let mut acc = 0.0;
    let last = pd.len() - 1;
    for k in 0..last {
        fp += pd[k];
        fq += qd[k];
        acc += (fp - fq).abs();
    }
    // beyond the last aligned index p has CDF 1: add E[(Q - last)_+]
    if let Law::Poisson(law) = q {
        let mut v = last as u64;
        loop {
            let t = law.sf(v + 1);
            acc += t;
            v += 1;
            if t < 1e-18 {
                break;
            }
        }
    }
    acc
}

/// `max_v |F_p(v) - F_q(v)|`.
pub fn kolmogorov_distance<'a>(p: &IntegerPmf, q: impl Into<Law<'a>>) -> f64 {
    let (pd, qd, q_tail) = aligned(p, &q.into());
    let mut fp = 0.0;
    let mut fq = 0.0;
    let mut best = q_tail;
    for (a, b) in pd.iter().zip(&qd) {
        fp += a;
        fq += b;
        best = best.max((fp - fq).abs());
    }
    best
}

/// `D(i) = i P(X = i) - lambda P(X = i - 1)` for `i = 1..=max+1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyVector {
    pub lambda: f64,
    /// `values[j]` holds `D(j + 1)`.
    pub values: Vec<f64>,
}

impl DiscrepancyVector {
    pub fn new(p: &IntegerPmf, lambda: f64) -> Result<Self> {
        PoissonLaw::new(lambda)?;
        let d = p.dense();
        let values = (1..=d.len())
            .map(|i| {
                let here = d.get(i).copied().unwrap_or(0.0);
                i as f64 * here - lambda * d[i - 1]
            })
            .collect();
        Ok(Self { lambda, values })
    }

    /// `D(i)`; zero beyond `max + 1`.
    pub fn get(&self, i: u64) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.values.get(i as usize - 1).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `sum_{i >= 1} f(i) D(i)`, which equals `E g(P_lambda) - E g(X)`.
pub fn stein_discrepancy(p: &IntegerPmf, lambda: f64, target: &SteinTarget) -> Result<f64> {
    let d = DiscrepancyVector::new(p, lambda)?;
    let sol = SteinSolution::new(lambda, target.clone())?;
    if let SteinTarget::Lipschitz(g) = target {
        check_lipschitz_on(g, p.max_value() + 2)?;
    }
    let mut acc = 0.0;
    for (j, dv) in d.values.iter().enumerate() {
        if *dv != 0.0 {
            acc += sol.value(j as u64 + 1)? * dv;
        }
    }
    Ok(acc)
}

fn check_lipschitz_on(g: &LipschitzFn, upto: u64) -> Result<()> {
    let mut prev = g.eval(0);
    for k in 1..=upto {
        let cur = g.eval(k);
        if !cur.is_finite() || (cur - prev).abs() > 1.0 + 1e-12 {
            return Err(domain(format!("target '{}' is not certified 1-Lipschitz", g.name())));
        }
        prev = cur;
    }
    Ok(())
}
