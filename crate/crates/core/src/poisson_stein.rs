//! Poisson masses in log space, solutions of the Stein equation
//!
//! ```text
//! lambda * f(i + 1) - i * f(i) = g(i) - E[g(P_lambda)],   f(0) = 0,
//! ```
//!
//! and the uniform bounds ("magic factors") on those solutions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{domain, Error, Result};

/// Rounded constant used in the Wasserstein magic factor.
pub const LIPSCHITZ_DIFF_CONSTANT: f64 = 1.1437;

/// Exact value `8 / (3 sqrt(2e))` that [`LIPSCHITZ_DIFF_CONSTANT`] rounds up.
pub fn lipschitz_diff_constant_exact() -> f64 {
    8.0 / (3.0 * (2.0 * std::f64::consts::E).sqrt())
}

/// Tolerance on the Stein residual of every evaluated index.
pub const RESIDUAL_TOL: f64 = 1e-10;

const SERIES_REL_TOL: f64 = 1e-17;
const LIPSCHITZ_SLACK: f64 = 1e-12;
const EXPECTATION_TAIL_TOL: f64 = 1e-13;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("lambda must be positive and finite, got {lambda}")))
    }
}

/// Poisson law with mean `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonLaw {
    lambda: f64,
}

impl PoissonLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_pmf(&self, k: u64) -> f64 {
        k as f64 * self.lambda.ln() - self.lambda - ln_factorial(k)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// `ln P(P <= v)`.
    pub fn ln_cdf(&self, v: u64) -> f64 {
        if (v as f64) < self.lambda {
            self.ln_lower_sum(v)
        } else {
            (-self.ln_upper_sum(v + 1).exp()).ln_1p()
        }
    }

    pub fn cdf(&self, v: u64) -> f64 {
        self.ln_cdf(v).exp()
    }

    /// `ln P(P >= i)`.
    pub fn ln_sf(&self, i: u64) -> f64 {
        if i == 0 {
            0.0
        } else if (i as f64) > self.lambda {
            self.ln_upper_sum(i)
        } else {
            (-self.ln_lower_sum(i - 1).exp_m1()).ln()
        }
    }

    /// `P(P >= i)`.
    pub fn sf(&self, i: u64) -> f64 {
        self.ln_sf(i).exp()
    }

    /// Smallest `K` with `P(P > K) < tol`.
    pub fn truncation_index(&self, tol: f64) -> u64 {
        let mut k = (self.lambda + 6.0 * self.lambda.sqrt()).ceil() as u64;
        while self.sf(k + 1) >= tol {
            k += k / 8 + 1;
        }
        // tighten by bisection on [lo, k]
        let mut lo = 0u64;
        while lo < k {
            let mid = lo + (k - lo) / 2;
            if self.sf(mid + 1) < tol {
                k = mid;
            } else {
                lo = mid + 1;
            }
        }
        k
    }

    /// Masses `P(P = 0..=k_max)`.
    pub fn pmf_table(&self, k_max: u64) -> Vec<f64> {
        (0..=k_max).map(|k| self.pmf(k)).collect()
    }

    // ln sum_{k <= v} pmf(k), summed downward from the largest term (requires v < lambda)
    fn ln_lower_sum(&self, v: u64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in (1..=v).rev() {
            term *= k as f64 / self.lambda;
            sum += term;
            if term < SERIES_REL_TOL * sum {
                break;
            }
        }
        self.ln_pmf(v) + sum.ln()
    }

    // ln sum_{k >= i} pmf(k) (requires i > lambda so the terms decay geometrically)
    fn ln_upper_sum(&self, i: u64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = i;
        loop {
            let r = self.lambda / (k + 1) as f64;
            term *= r;
            sum += term;
            k += 1;
            if term * r / (1.0 - r) < SERIES_REL_TOL * sum {
                break;
            }
        }
        self.ln_pmf(i) + sum.ln()
    }
}

/// `exp(-lambda) lambda^k / k!`.
pub fn pmf(lambda: f64, k: u64) -> Result<f64> {
    Ok(PoissonLaw::new(lambda)?.pmf(k))
}

/// `P(P_lambda <= v)`.
pub fn cdf(lambda: f64, v: u64) -> Result<f64> {
    Ok(PoissonLaw::new(lambda)?.cdf(v))
}

/// Subset of the non-negative integers with a finite description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndicatorSet {
    /// An explicit finite set.
    Finite(BTreeSet<u64>),
    /// The interval `{0, ..., v}`.
    AtMost(u64),
    /// All of `N_0`.
    All,
}

impl IndicatorSet {
    pub fn finite(values: impl IntoIterator<Item = u64>) -> Self {
        Self::Finite(values.into_iter().collect())
    }

    pub fn singleton(k: u64) -> Self {
        Self::finite([k])
    }

    pub fn contains(&self, k: u64) -> bool {
        match self {
            Self::Finite(s) => s.contains(&k),
            Self::AtMost(v) => k <= *v,
            Self::All => true,
        }
    }

    /// `P(P in A)` under `law`.
    pub fn poisson_prob(&self, law: &PoissonLaw) -> f64 {
        match self {
            Self::Finite(s) => s.iter().map(|&k| law.pmf(k)).sum(),
            Self::AtMost(v) => law.cdf(*v),
            Self::All => 1.0,
        }
    }

    fn is_zero_singleton(&self) -> bool {
        matches!(self, Self::Finite(s) if s.len() == 1 && s.contains(&0))
            || matches!(self, Self::AtMost(0))
    }

    // P(A | P <= i - 1), i >= 1
    fn cond_below(&self, law: &PoissonLaw, i: u64) -> f64 {
        let ln_lo = law.ln_cdf(i - 1);
        match self {
            Self::Finite(s) => s.range(..i).map(|&k| (law.ln_pmf(k) - ln_lo).exp()).sum(),
            Self::AtMost(v) if *v >= i - 1 => 1.0,
            Self::AtMost(v) => (law.ln_cdf(*v) - ln_lo).exp(),
            Self::All => 1.0,
        }
    }

    // P(A | P >= i), i >= 1
    fn cond_above(&self, law: &PoissonLaw, i: u64) -> f64 {
        let ln_hi = law.ln_sf(i);
        match self {
            Self::Finite(s) => s.range(i..).map(|&k| (law.ln_pmf(k) - ln_hi).exp()).sum(),
            Self::AtMost(v) if *v < i => 0.0,
            Self::AtMost(v) => -(law.ln_sf(*v + 1) - ln_hi).exp_m1(),
            Self::All => 1.0,
        }
    }
}

/// A function `N_0 -> R` whose Lipschitz constant the caller certifies to be at most 1.
#[derive(Clone)]
pub struct LipschitzFn {
    name: String,
    f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl LipschitzFn {
    pub fn new(name: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new("identity", |k| k as f64)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, k: u64) -> f64 {
        (self.f)(k)
    }
}

impl fmt::Debug for LipschitzFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzFn").field("name", &self.name).finish()
    }
}

/// Right-hand side of the Stein equation.
#[derive(Clone, Debug)]
pub enum SteinTarget {
    Set(IndicatorSet),
    Lipschitz(LipschitzFn),
}

impl SteinTarget {
    pub fn eval(&self, k: u64) -> f64 {
        match self {
            Self::Set(a) => f64::from(u8::from(a.contains(k))),
            Self::Lipschitz(g) => g.eval(k),
        }
    }
}

/// `ln(e^lambda (i-1)! / lambda^i * P(P <= i-1) * P(P >= i))` for `i >= 1`.
fn ln_solution_scale(law: &PoissonLaw, i: u64) -> f64 {
    let lambda = law.lambda();
    lambda + ln_factorial(i - 1) - i as f64 * lambda.ln() + law.ln_cdf(i - 1) + law.ln_sf(i)
}

/// `f_{0}(i)` via the positive series `sum_l lambda^l (i-1)! e^-lambda / (i+l)!`.
pub fn stein_f_zero(lambda: f64, i: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if i == 0 {
        return Ok(0.0);
    }
    let ln_term = |l: u64| {
        l as f64 * lambda.ln() + ln_factorial(i - 1) - lambda - ln_factorial(i + l)
    };
    // largest term sits at the first l with lambda / (i + l + 1) <= 1
    let peak = (lambda - i as f64 - 1.0).ceil().max(0.0) as u64;
    let mut sum = 1.0;
    let mut term = 1.0;
    for l in (1..=peak).rev() {
        term *= (i + l) as f64 / lambda;
        sum += term;
        if term < SERIES_REL_TOL * sum {
            break;
        }
    }
    term = 1.0;
    let mut l = peak;
    loop {
        let r = lambda / (i + l + 1) as f64;
        term *= r;
        sum += term;
        l += 1;
        if term * r / (1.0 - r) < SERIES_REL_TOL * sum {
            break;
        }
    }
    Ok((ln_term(peak) + sum.ln()).exp())
}

/// `f_A(i)` for a set `A` with finite description.
pub fn stein_f_indicator(lambda: f64, set: &IndicatorSet, i: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if i == 0 {
        return Ok(0.0);
    }
    if set.is_zero_singleton() {
        return stein_f_zero(lambda, i);
    }
    let law = PoissonLaw::new(lambda)?;
    let diff = set.cond_below(&law, i) - set.cond_above(&law, i);
    if diff == 0.0 {
        return Ok(0.0);
    }
    Ok(ln_solution_scale(&law, i).exp() * diff)
}

/// `E[g(P_lambda)]`, truncated where the certified tail is below 1e-13.
pub fn poisson_expectation(law: &PoissonLaw, g: &LipschitzFn) -> Result<f64> {
    let g0 = g.eval(0).abs();
    let lambda = law.lambda();
    let mut v = (lambda + 10.0 * lambda.sqrt() + 10.0).ceil() as u64;
    while g0 * law.sf(v + 1) + lambda * law.sf(v) >= EXPECTATION_TAIL_TOL {
        v += v / 4 + 1;
    }
    let mut acc = 0.0;
    let mut prev = g.eval(0);
    acc += prev * law.pmf(0);
    for k in 1..=v {
        let cur = g.eval(k);
        check_lipschitz_step(prev, cur, k - 1)?;
        acc += cur * law.pmf(k);
        prev = cur;
    }
    Ok(acc)
}

fn check_lipschitz_step(prev: f64, cur: f64, k: u64) -> Result<()> {
    if !cur.is_finite() || (cur - prev).abs() > 1.0 + LIPSCHITZ_SLACK {
        return Err(domain(format!(
            "target function is not 1-Lipschitz between {k} and {}",
            k + 1
        )));
    }
    Ok(())
}

fn stein_f_lipschitz_raw(law: &PoissonLaw, g: &LipschitzFn, i: u64) -> Result<f64> {
    if i == 0 {
        return Ok(0.0);
    }
    let lambda = law.lambda();
    let c = g.eval(i);
    let ln_lo = law.ln_cdf(i - 1);
    let ln_hi = law.ln_sf(i);
    let mut below = 0.0;
    for k in 0..i {
        let w = (law.ln_pmf(k) - ln_lo).exp();
        if w > 0.0 {
            below += (g.eval(k) - c) * w;
        }
    }
    let mut above = 0.0;
    let mut prev = c;
    let mut k = i + 1;
    loop {
        let cur = g.eval(k);
        check_lipschitz_step(prev, cur, k - 1)?;
        prev = cur;
        let w = (law.ln_pmf(k) - ln_hi).exp();
        above += (cur - c) * w;
        let r = lambda / (k + 1) as f64;
        if r < 1.0 {
            let tail = w * ((k - i + 2) as f64) / ((1.0 - r) * (1.0 - r));
            if tail < SERIES_REL_TOL {
                break;
            }
        }
        k += 1;
    }
    Ok(ln_solution_scale(law, i).exp() * (below - above))
}

/// `f_g(i)` for a 1-Lipschitz `g`, with the Stein residual verified at every
/// index below `i`.
pub fn stein_f_lipschitz(lambda: f64, g: &LipschitzFn, i: u64) -> Result<f64> {
    let sol = SteinSolution::new(lambda, SteinTarget::Lipschitz(g.clone()))?;
    let values = sol.values(i)?;
    Ok(values[i as usize])
}

/// Solution of the Stein equation for a fixed rate and right-hand side.
#[derive(Debug)]
pub struct SteinSolution {
    law: PoissonLaw,
    target: SteinTarget,
    mean: OnceLock<Result<f64>>,
}

impl SteinSolution {
    pub fn new(lambda: f64, target: SteinTarget) -> Result<Self> {
        Ok(Self { law: PoissonLaw::new(lambda)?, target, mean: OnceLock::new() })
    }

    pub fn lambda(&self) -> f64 {
        self.law.lambda()
    }

    pub fn target(&self) -> &SteinTarget {
        &self.target
    }

    /// `E[g(P_lambda)]` (or `P(P_lambda in A)`).
    pub fn target_mean(&self) -> Result<f64> {
        self.mean
            .get_or_init(|| match &self.target {
                SteinTarget::Set(a) => Ok(a.poisson_prob(&self.law)),
                SteinTarget::Lipschitz(g) => poisson_expectation(&self.law, g),
            })
            .clone()
    }

    pub fn value(&self, i: u64) -> Result<f64> {
        match &self.target {
            SteinTarget::Set(a) => stein_f_indicator(self.law.lambda(), a, i),
            SteinTarget::Lipschitz(g) => stein_f_lipschitz_raw(&self.law, g, i),
        }
    }

    /// `f(i + 1) - f(i)`.
    pub fn delta(&self, i: u64) -> Result<f64> {
        Ok(self.value(i + 1)? - self.value(i)?)
    }

    /// `lambda f(i+1) - i f(i) - (g(i) - E g(P))`.
    pub fn residual(&self, i: u64) -> Result<f64> {
        let lhs = self.law.lambda() * self.value(i + 1)? - i as f64 * self.value(i)?;
        Ok(lhs - (self.target.eval(i) - self.target_mean()?))
    }

    /// `f(0..=upto)`, failing with the first index whose residual exceeds
    /// [`RESIDUAL_TOL`].
    pub fn values(&self, upto: u64) -> Result<Vec<f64>> {
        let mean = self.target_mean()?;
        let lambda = self.law.lambda();
        let mut out = Vec::with_capacity(upto as usize + 1);
        out.push(0.0);
        for i in 1..=upto {
            let f = self.value(i)?;
            let prev = out[i as usize - 1];
            let j = i - 1;
            let residual = lambda * f - j as f64 * prev - (self.target.eval(j) - mean);
            if !residual.is_finite() || residual.abs() >= RESIDUAL_TOL {
                return Err(Error::Numerical { index: j, residual });
            }
            out.push(f);
        }
        Ok(out)
    }
}

/// Uniform bounds on Stein solutions and their differences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicFactors {
    pub lambda: f64,
    pub v: Option<u64>,
    pub n: Option<u64>,
    /// `max |f_g|` over 1-Lipschitz `g`.
    pub sup_f_g: f64,
    /// `max |Delta f_g|`.
    pub sup_delta_f_g: f64,
    /// `max |f_A|` over sets `A`.
    pub sup_f_a: f64,
    /// `max |Delta f_A|`.
    pub sup_delta_f_a: f64,
    /// `|f_{0}(1)|`.
    pub f0_at_1: f64,
    /// `|f_{0}(i)|`, `i >= 2`.
    pub f0_from_2: f64,
    /// `|Delta f_{0}(i)|` for `i >= n`.
    pub delta_f0: Option<f64>,
    /// `Delta f_{0..v}(i)` for `i >= v + 2`.
    pub delta_f0v: Option<f64>,
    /// Preconditions that did not hold, with the fallback that was used.
    pub flags: Vec<String>,
}

/// `min(1/n, (n-1)!/lambda^n)`.
pub fn delta_f0_factor(lambda: f64, n: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let ln_ratio = ln_factorial(n - 1) - n as f64 * lambda.ln();
    Ok((1.0 / n as f64).min(ln_ratio.exp()))
}

pub fn magic_factors(lambda: f64, v: Option<u64>, n: Option<u64>) -> Result<MagicFactors> {
    check_lambda(lambda)?;
    let mut flags = Vec::new();
    let delta_f0 = n.map(|n| delta_f0_factor(lambda, n)).transpose()?;
    let delta_f0v = match v {
        Some(0) => return Err(domain("v must be at least 1")),
        Some(v) if (v as f64) <= lambda => {
            let ratio = ((v + 1) as f64 / lambda).powi(2);
            Some(ratio.min(1.0))
        }
        Some(v) => {
            flags.push(format!(
                "interval factor precondition v <= lambda violated (v = {v}, lambda = {lambda}); using min(1, 1/lambda)"
            ));
            Some((1.0 / lambda).min(1.0))
        }
        None => None,
    };
    Ok(MagicFactors {
        lambda,
        v,
        n,
        sup_f_g: 1.0,
        sup_delta_f_g: (LIPSCHITZ_DIFF_CONSTANT / lambda.sqrt()).min(1.0),
        sup_f_a: (1.0 / lambda.sqrt()).min(1.0),
        sup_delta_f_a: (1.0 / lambda).min(1.0),
        f0_at_1: (1.0 / lambda).min(1.0),
        f0_from_2: (1.0 / (lambda * lambda)).min(1.0),
        delta_f0,
        delta_f0v,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pmf_examples() {
        assert!(close(pmf(1.0, 0).unwrap(), (-1.0f64).exp(), 1e-15));
        assert!(close(pmf(2.0, 3).unwrap(), 4.0 / 3.0 * (-2.0f64).exp(), 1e-15));
        assert!(pmf(0.0, 1).is_err());
        assert!(pmf(-1.0, 1).is_err());
    }

    #[test]
    fn pmf_large_argument_matches_log_sum() {
        // ln 700! by compensated summation of logarithms
        let mut s = 0.0f64;
        let mut comp = 0.0f64;
        for j in 2..=700u32 {
            let y = f64::from(j).ln() - comp;
            let t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        let oracle = (700.0 * 700f64.ln() - 700.0 - s).exp();
        let got = pmf(700.0, 700).unwrap();
        assert!(got > 0.0 && got.is_finite());
        assert!(((got - oracle) / oracle).abs() < 1e-10);
    }

    #[test]
    fn cdf_examples() {
        assert!(close(cdf(1.0, 1).unwrap(), 2.0 * (-1.0f64).exp(), 1e-15));
        assert!(close(cdf(0.5, 0).unwrap(), (-0.5f64).exp(), 1e-15));
        let partial: f64 = (0..=9u32)
            .map(|k| {
                let mut t = (-10.0f64).exp();
                for j in 1..=k {
                    t *= 10.0 / f64::from(j);
                }
                t
            })
            .sum();
        assert!(close(cdf(10.0, 9).unwrap(), partial, 1e-13));
        assert!(close(cdf(10.0, 9).unwrap(), 0.4579297144, 1e-10));
    }

    #[test]
    fn sf_complements_cdf() {
        for &lambda in &[0.1, 1.0, 7.5, 40.0] {
            let law = PoissonLaw::new(lambda).unwrap();
            for v in 0..80 {
                assert!(close(law.cdf(v) + law.sf(v + 1), 1.0, 1e-13), "{lambda} {v}");
            }
        }
    }

    #[test]
    fn truncation_index_is_minimal() {
        let law = PoissonLaw::new(3.0).unwrap();
        let k = law.truncation_index(1e-12);
        assert!(law.sf(k + 1) < 1e-12);
        assert!(law.sf(k) >= 1e-12);
    }

    #[test]
    fn f_zero_examples() {
        let e1 = (-1.0f64).exp();
        assert!(close(stein_f_zero(1.0, 1).unwrap(), 1.0 - e1, 1e-14));
        assert!(close(stein_f_zero(1.0, 2).unwrap(), 1.0 - 2.0 * e1, 1e-14));
        let a = IndicatorSet::singleton(0);
        assert!(close(stein_f_indicator(1.0, &a, 1).unwrap(), 0.6321205588, 1e-10));
        assert_eq!(stein_f_indicator(3.0, &a, 0).unwrap(), 0.0);
    }

    #[test]
    fn f_zero_series_matches_general_formula() {
        for &lambda in &[0.1, 1.0, 10.0, 60.0] {
            let law = PoissonLaw::new(lambda).unwrap();
            for i in 1..120 {
                let series = stein_f_zero(lambda, i).unwrap();
                let general = ln_solution_scale(&law, i).exp()
                    * (IndicatorSet::AtMost(0).cond_below(&law, i) - 0.0);
                assert!(close(series, general, 1e-12 * (1.0 + series.abs())), "{lambda} {i}");
            }
        }
    }

    #[test]
    fn lipschitz_examples() {
        let id = LipschitzFn::identity();
        assert!(close(stein_f_lipschitz(1.0, &id, 1).unwrap(), -1.0, 1e-12));
        assert_eq!(stein_f_lipschitz(2.5, &id, 0).unwrap(), 0.0);
        let ind0 = LipschitzFn::new("1{0}", |k| if k == 0 { 1.0 } else { 0.0 });
        let sol = SteinSolution::new(1.0, SteinTarget::Lipschitz(ind0)).unwrap();
        let values = sol.values(50).unwrap();
        for (i, v) in values.iter().enumerate() {
            let reference = stein_f_indicator(1.0, &IndicatorSet::singleton(0), i as u64).unwrap();
            assert!(close(*v, reference, 1e-10), "{i}");
        }
    }

    #[test]
    fn non_lipschitz_target_rejected() {
        let g = LipschitzFn::new("square", |k| (k * k) as f64);
        assert!(matches!(stein_f_lipschitz(1.0, &g, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn interval_target_residuals() {
        for &lambda in &[0.1, 1.0, 10.0] {
            for v in [0, 3, 12] {
                let sol = SteinSolution::new(lambda, SteinTarget::Set(IndicatorSet::AtMost(v))).unwrap();
                sol.values(200).unwrap();
            }
        }
    }

    #[test]
    fn magic_factor_examples() {
        assert_eq!(magic_factors(4.0, None, None).unwrap().sup_delta_f_a, 0.25);
        assert_eq!(magic_factors(1.0, None, None).unwrap().sup_delta_f_g, 1.0);
        assert_eq!(magic_factors(0.5, None, None).unwrap().sup_f_a, 1.0);
        let mf = magic_factors(2.0, Some(5), Some(3)).unwrap();
        assert_eq!(mf.flags.len(), 1);
        assert_eq!(mf.delta_f0v, Some(0.5));
        assert!(close(mf.delta_f0.unwrap(), (1.0f64 / 3.0).min(2.0 / 8.0), 1e-15));
        let mf = magic_factors(9.0, Some(2), None).unwrap();
        assert!(mf.flags.is_empty());
        assert!(close(mf.delta_f0v.unwrap(), 1.0 / 9.0, 1e-15));
        assert!(lipschitz_diff_constant_exact() <= LIPSCHITZ_DIFF_CONSTANT);
    }
}
