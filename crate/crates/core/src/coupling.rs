//! Couplings `(X, Z)` with a rate `lambda`, the error sequence
//! `q_{i-1} = i P(X = i) - lambda P(X + Z = i - 1)`, and the Poisson
//! approximation bounds they imply.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::discrete_dist::{tv_distance, wasserstein_distance, IntegerPmf};
use crate::error::{domain, precondition, Error, Result};
use crate::poisson_stein::{PoissonLaw, LIPSCHITZ_DIFF_CONSTANT};
use crate::report::{BoundCheck, BoundReport};
use statrs::function::factorial::ln_factorial;

/// Minimum number of samples for sample-mode estimates.
pub const MIN_SAMPLES: usize = 100;

/// Tolerance for "q is identically zero" and "lambda equals E[X]".
pub const IDENTITY_TOL: f64 = 1e-10;

/// Tolerance when reading the sign of `q_i` from a floating-point table.
pub const Q_SIGN_TOL: f64 = 1e-12;

pub const CHECK_TV: &str = "d_TV";
pub const CHECK_W: &str = "d_W";
pub const CHECK_W_NONNEG: &str = "d_W[P(X+Z>=0)=1]";
pub const CHECK_ZERO: &str = "|P(X=0)-P(P=0)|";
pub const CHECK_CDF: &str = "|P(X<=v)-P(P<=v)|";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CouplingRepr {
    /// Atoms `((x, z), probability)`, merged and sorted.
    ExactTable { atoms: Vec<((u64, i64), f64)> },
    /// Equally weighted draws of `(x, z)`.
    Samples { draws: Vec<(u64, i64)> },
}

/// Joint law of `(X, Z)` together with a rate `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingLaw {
    repr: CouplingRepr,
    lambda: f64,
}

impl CouplingLaw {
    pub fn exact(atoms: impl IntoIterator<Item = ((u64, i64), f64)>, lambda: f64) -> Result<Self> {
        PoissonLaw::new(lambda)?;
        let mut merged: BTreeMap<(u64, i64), f64> = BTreeMap::new();
        for (key, p) in atoms {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::Validation(format!("invalid probability {p}")));
            }
            *merged.entry(key).or_default() += p;
        }
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("probabilities sum to {total}, not 1")));
        }
        let atoms = merged.into_iter().filter(|(_, p)| *p > 0.0).collect();
        Ok(Self { repr: CouplingRepr::ExactTable { atoms }, lambda })
    }

    pub fn samples(draws: Vec<(u64, i64)>, lambda: f64) -> Result<Self> {
        PoissonLaw::new(lambda)?;
        if draws.is_empty() {
            return Err(Error::InsufficientData { needed: MIN_SAMPLES, got: 0 });
        }
        Ok(Self { repr: CouplingRepr::Samples { draws }, lambda })
    }

    /// `X ~ Bernoulli(p)` with `Z = -X`, an exact size-bias coupling for `lambda = p`.
    pub fn bernoulli_exact(p: f64) -> Result<Self> {
        Self::exact([((0, 0), 1.0 - p), ((1, -1), p)], p)
    }

    /// `X ~ Bernoulli(p)` with `Z = 0`.
    pub fn bernoulli_zero(p: f64, lambda: f64) -> Result<Self> {
        Self::exact([((0, 0), 1.0 - p), ((1, 0), p)], lambda)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn repr(&self) -> &CouplingRepr {
        &self.repr
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, CouplingRepr::ExactTable { .. })
    }

    /// Weighted atoms; draws carry weight `1/n`.
    pub fn weighted(&self) -> Vec<((u64, i64), f64)> {
        match &self.repr {
            CouplingRepr::ExactTable { atoms } => atoms.clone(),
            CouplingRepr::Samples { draws } => {
                let w = 1.0 / draws.len() as f64;
                draws.iter().map(|&d| (d, w)).collect()
            }
        }
    }

    /// Law of `X`.
    pub fn law_of_x(&self) -> Result<IntegerPmf> {
        let mut m: BTreeMap<u64, f64> = BTreeMap::new();
        for ((x, _), p) in self.weighted() {
            *m.entry(x).or_default() += p;
        }
        let (s, p): (Vec<u64>, Vec<f64>) = m.into_iter().unzip();
        let total: f64 = p.iter().sum();
        IntegerPmf::new(s, p.into_iter().map(|v| v / total).collect())
    }

    pub fn mean_x(&self) -> f64 {
        self.weighted().iter().map(|((x, _), p)| *x as f64 * p).sum()
    }

    /// `P(X + Z >= 0) = 1` on the support.
    pub fn x_plus_z_nonnegative(&self) -> bool {
        self.weighted().iter().all(|((x, z), _)| *x as i64 + z >= 0)
    }

    pub fn z_nonnegative(&self) -> bool {
        self.weighted().iter().all(|((_, z), _)| *z >= 0)
    }

    pub fn z_nonpositive(&self) -> bool {
        self.weighted().iter().all(|((_, z), _)| *z <= 0)
    }
}

/// Error sequence `q_0, q_1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSequence {
    pub values: Vec<f64>,
    /// Standard errors (sample mode only).
    pub std_errors: Option<Vec<f64>>,
    /// Bound on the sum of omitted `|q_i|`; zero when the whole support is represented.
    pub tail_bound: f64,
    pub warnings: Vec<String>,
}

impl QSequence {
    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|q| q.abs()).sum::<f64>() + self.tail_bound
    }

    pub fn abs_q0(&self) -> f64 {
        self.values.first().map_or(0.0, |q| q.abs())
    }

    pub fn abs_sum_from_1(&self) -> f64 {
        self.values.iter().skip(1).map(|q| q.abs()).sum::<f64>() + self.tail_bound
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|q| q.abs() <= tol)
    }
}

/// `q_{i-1} = i P(X = i) - lambda P(X + Z = i - 1)` over the joint support.
pub fn q_sequence(c: &CouplingLaw) -> Result<QSequence> {
    let atoms = c.weighted();
    let lambda = c.lambda;
    let top = atoms
        .iter()
        .map(|((x, z), _)| (*x as i64).max(*x as i64 + z + 1))
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    // per-atom contribution to q_{i-1}, i = 1..=top
    let contribution = |x: u64, z: i64, i: usize| -> f64 {
        let mut v = 0.0;
        if x as usize == i {
            v += i as f64;
        }
        if x as i64 + z == i as i64 - 1 {
            v -= lambda;
        }
        v
    };
    let mut values = vec![0.0; top];
    for ((x, z), p) in &atoms {
        for (j, q) in values.iter_mut().enumerate() {
            let c = contribution(*x, *z, j + 1);
            if c != 0.0 {
                *q += c * p;
            }
        }
    }
    match &c.repr {
        CouplingRepr::ExactTable { .. } => {
            Ok(QSequence { values, std_errors: None, tail_bound: 0.0, warnings: Vec::new() })
        }
        CouplingRepr::Samples { draws } => {
            let n = draws.len();
            if n < MIN_SAMPLES {
                return Err(Error::InsufficientData { needed: MIN_SAMPLES, got: n });
            }
            let mut second = vec![0.0; top];
            for &(x, z) in draws {
                for (j, s) in second.iter_mut().enumerate() {
                    let c = contribution(x, z, j + 1);
                    *s += c * c;
                }
            }
            let se = values
                .iter()
                .zip(&second)
                .map(|(m, s)| ((s / n as f64 - m * m).max(0.0) / n as f64).sqrt())
                .collect();
            Ok(QSequence {
                values,
                std_errors: Some(se),
                tail_bound: 0.0,
                warnings: vec![
                    "sum of |q_i| is a plug-in estimate and is biased upwards under sampling noise".into(),
                ],
            })
        }
    }
}

/// Coupling expectations entering the bounds, with standard errors (zero for exact tables).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingTerms {
    pub e_abs_z: f64,
    pub e_abs_z_se: f64,
    pub e_z: f64,
    pub e_z_se: f64,
    /// `E[|Z| 1{X - Z_- = k}]` for `k < m`.
    pub e_abs_z_at: Vec<f64>,
    pub e_abs_z_at_se: Vec<f64>,
    /// `E[|Z| 1{X - Z_- <= v}]`.
    pub e_abs_z_upto_v: f64,
    pub e_abs_z_upto_v_se: f64,
    /// `E[Z] - (Var X - lambda) / lambda`, zero for exact size-bias couplings.
    pub remark_stat: f64,
    pub remark_se: f64,
    pub samples: Option<usize>,
}

fn weighted_moments(values: &[(f64, f64)]) -> (f64, f64) {
    let mean: f64 = values.iter().map(|(v, w)| v * w).sum();
    let var: f64 = values.iter().map(|(v, w)| (v - mean).powi(2) * w).sum();
    (mean, var)
}

fn terms_from(atoms: &[((u64, i64), f64)], lambda: f64, m: u64, v: u64, n: Option<usize>) -> CouplingTerms {
    let se = |var: f64| n.map_or(0.0, |n| (var / n as f64).sqrt());
    let stat = |f: &dyn Fn(u64, i64) -> f64| {
        let vals: Vec<(f64, f64)> = atoms.iter().map(|((x, z), p)| (f(*x, *z), *p)).collect();
        let (mean, var) = weighted_moments(&vals);
        (mean, se(var))
    };
    let shifted = |x: u64, z: i64| x as i64 - (-z).max(0);
    let (e_abs_z, e_abs_z_se) = stat(&|_, z| z.unsigned_abs() as f64);
    let (e_z, e_z_se) = stat(&|_, z| z as f64);
    let (at, at_se): (Vec<f64>, Vec<f64>) = (0..m)
        .map(|k| stat(&|x, z| if shifted(x, z) == k as i64 { z.unsigned_abs() as f64 } else { 0.0 }))
        .unzip();
    let (upto, upto_se) =
        stat(&|x, z| if shifted(x, z) <= v as i64 { z.unsigned_abs() as f64 } else { 0.0 });
    let (mean_x, _) = stat(&|x, _| x as f64);
    let (remark_stat, remark_se) =
        stat(&|x, z| z as f64 - ((x as f64 - mean_x).powi(2) - lambda) / lambda);
    CouplingTerms {
        e_abs_z,
        e_abs_z_se,
        e_z,
        e_z_se,
        e_abs_z_at: at,
        e_abs_z_at_se: at_se,
        e_abs_z_upto_v: upto,
        e_abs_z_upto_v_se: upto_se,
        remark_stat,
        remark_se,
        samples: n,
    }
}

/// Terms of an exact table or of a sample-mode coupling.
pub fn coupling_terms(c: &CouplingLaw, m: u64, v: u64) -> Result<CouplingTerms> {
    match &c.repr {
        CouplingRepr::ExactTable { atoms } => Ok(terms_from(atoms, c.lambda, m, v, None)),
        CouplingRepr::Samples { draws } => estimate_coupling_terms(draws, c.lambda, m, v),
    }
}

/// Monte Carlo estimates of the coupling terms from equally weighted draws.
pub fn estimate_coupling_terms(samples: &[(u64, i64)], lambda: f64, m: u64, v: u64) -> Result<CouplingTerms> {
    PoissonLaw::new(lambda)?;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_SAMPLES, got: samples.len() });
    }
    let w = 1.0 / samples.len() as f64;
    let atoms: Vec<((u64, i64), f64)> = samples.iter().map(|&s| (s, w)).collect();
    Ok(terms_from(&atoms, lambda, m, v, Some(samples.len())))
}

/// `k!/lambda^k` evaluated in log space.
fn factorial_ratio(k: u64, lambda: f64) -> f64 {
    (ln_factorial(k) - k as f64 * lambda.ln()).exp()
}

/// Sums of `|q_i|` entering the approximate-coupling bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QSums {
    pub total: f64,
    pub first: f64,
    pub rest: f64,
}

impl From<&QSequence> for QSums {
    fn from(q: &QSequence) -> Self {
        Self { total: q.abs_sum(), first: q.abs_q0(), rest: q.abs_sum_from_1() }
    }
}

/// Assembles the bounds of the exact (`q = None`) or approximate coupling theorem
/// from already computed terms. No left-hand sides are attached.
pub fn assemble_bounds(
    lambda: f64,
    terms: &CouplingTerms,
    q: Option<QSums>,
    x_plus_z_nonneg: bool,
    m: u64,
    v: u64,
) -> Result<BoundReport> {
    PoissonLaw::new(lambda)?;
    if v == 0 {
        return Err(domain("the CDF bound needs v >= 1"));
    }
    if terms.e_abs_z_at.len() < m as usize {
        return Err(domain("coupling terms computed for a smaller m"));
    }
    let mut r = BoundReport::new(if q.is_some() { "approximate-coupling" } else { "exact-coupling" });
    let e = terms.e_abs_z;
    r.term("lambda", lambda).term("m", m as f64).term("v", v as f64).term("E|Z|", e);

    let tv_factor = lambda.min(1.0);
    let w_factor = (LIPSCHITZ_DIFF_CONSTANT * lambda.sqrt()).min(lambda);
    let zero_factor = factorial_ratio(m, lambda);
    let cdf_factor = ((v + 1) as f64).powi(2) / lambda;
    r.term("min(1,lambda)", tv_factor)
        .term("min(1.1437*sqrt(lambda),lambda)", w_factor)
        .term("m!/lambda^m", zero_factor)
        .term("(v+1)^2/lambda", cdf_factor)
        .term("E[|Z|1{X-Z_-<=v}]", terms.e_abs_z_upto_v);

    let mut zero = zero_factor * e;
    for k in 0..m {
        let weight = (lambda / (k + 1) as f64).min(factorial_ratio(k, lambda));
        let val = terms.e_abs_z_at[k as usize];
        r.term(format!("E[|Z|1{{X-Z_-={k}}}]"), val);
        r.term(format!("min(lambda/(k+1),k!/lambda^k)[k={k}]"), weight);
        zero += weight * val;
    }
    let mut tv = tv_factor * e;
    let mut cdf = cdf_factor * e + terms.e_abs_z_upto_v;
    let mut w = w_factor * e;
    let mut w_general = None;
    if let Some(q) = q {
        let inv_sqrt = (1.0 / lambda.sqrt()).min(1.0);
        r.term("sum|q_i|", q.total)
            .term("|q_0|", q.first)
            .term("sum_{i>=1}|q_i|", q.rest)
            .term("min(1,1/sqrt(lambda))", inv_sqrt)
            .term("min(1,1/lambda)", (1.0 / lambda).min(1.0))
            .term("min(1,1/lambda^2)", (1.0 / (lambda * lambda)).min(1.0));
        tv += inv_sqrt * q.total;
        cdf += inv_sqrt * q.total;
        zero += (1.0 / lambda).min(1.0) * q.first + (1.0 / (lambda * lambda)).min(1.0) * q.rest;
        w_general = Some(lambda * e + q.total);
        w += q.total;
    }
    r.push(BoundCheck::new(CHECK_TV, tv));
    match w_general {
        None => {
            r.push(BoundCheck::new(CHECK_W, w));
        }
        Some(wg) => {
            r.push(BoundCheck::new(CHECK_W, wg));
            if x_plus_z_nonneg {
                r.push(BoundCheck::new(CHECK_W_NONNEG, w));
            }
        }
    }
    r.push(BoundCheck::new(CHECK_ZERO, zero));
    r.push(BoundCheck::new(CHECK_CDF, cdf));
    Ok(r)
}

fn require_exact(c: &CouplingLaw) -> Result<()> {
    if c.is_exact() {
        Ok(())
    } else {
        Err(precondition("an exact table is required; use estimate_coupling_terms for samples"))
    }
}

fn attach_exact_lhs(r: &mut BoundReport, c: &CouplingLaw, v: u64) -> Result<()> {
    let x = c.law_of_x()?;
    let law = PoissonLaw::new(c.lambda)?;
    let tv = tv_distance(&x, law);
    let w = wasserstein_distance(&x, law);
    let zero = (x.prob(0) - (-c.lambda).exp()).abs();
    let cdf = (x.cdf(v) - law.cdf(v)).abs();
    for check in &mut r.checks {
        let lhs = match check.quantity.as_str() {
            CHECK_TV => tv,
            CHECK_W | CHECK_W_NONNEG => w,
            CHECK_ZERO => zero,
            CHECK_CDF => cdf,
            _ => continue,
        };
        *check = check.clone().with_exact(lhs);
    }
    Ok(())
}

/// Bounds for an exact size-bias coupling (`q = 0`, `lambda = E[X]`), with exact left-hand sides.
pub fn bounds_exact(c: &CouplingLaw, m: u64, v: u64) -> Result<BoundReport> {
    require_exact(c)?;
    let mean = c.mean_x();
    if (mean - c.lambda).abs() > IDENTITY_TOL {
        return Err(precondition(format!("lambda = {} differs from E[X] = {mean}", c.lambda)));
    }
    let q = q_sequence(c)?;
    if !q.is_zero(IDENTITY_TOL) {
        return Err(precondition(
            "q is not identically zero; the coupling is approximate, use bounds_approximate",
        ));
    }
    let terms = coupling_terms(c, m, v)?;
    let mut r = assemble_bounds(c.lambda, &terms, None, true, m, v)?;
    attach_exact_lhs(&mut r, c, v)?;
    Ok(r)
}

/// Bounds for an arbitrary coupling, with every `q` term itemized and exact left-hand sides.
pub fn bounds_approximate(c: &CouplingLaw, m: u64, v: u64) -> Result<BoundReport> {
    require_exact(c)?;
    let q = q_sequence(c)?;
    let terms = coupling_terms(c, m, v)?;
    let mut r = assemble_bounds(c.lambda, &terms, Some(QSums::from(&q)), c.x_plus_z_nonnegative(), m, v)?;
    attach_exact_lhs(&mut r, c, v)?;
    Ok(r)
}

/// Which one-sided comparison of `P(X = 0)` with `e^-lambda` the sign conditions give.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignBounds {
    /// `P(X = 0) >= e^-lambda` holds by the sign conditions.
    pub lower_applicable: bool,
    /// `P(X = 0) <= e^-lambda` holds by the sign conditions.
    pub upper_applicable: bool,
    pub e_minus_lambda: f64,
    pub p_x0: f64,
}

pub fn zero_prob_sign_bounds(c: &CouplingLaw) -> Result<SignBounds> {
    require_exact(c)?;
    let q = q_sequence(c)?;
    let lower = c.z_nonnegative() && q.values.iter().all(|&v| v <= Q_SIGN_TOL);
    let upper = c.z_nonpositive()
        && c.x_plus_z_nonnegative()
        && q.values.iter().all(|&v| v >= -Q_SIGN_TOL);
    let e = (-c.lambda).exp();
    let p0 = c.law_of_x()?.prob(0);
    if lower && p0 < e - 1e-12 {
        return Err(Error::Internal(format!("P(X=0) = {p0} below e^-lambda = {e} despite sign conditions")));
    }
    if upper && p0 > e + 1e-12 {
        return Err(Error::Internal(format!("P(X=0) = {p0} above e^-lambda = {e} despite sign conditions")));
    }
    Ok(SignBounds { lower_applicable: lower, upper_applicable: upper, e_minus_lambda: e, p_x0: p0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn q_sequence_examples() {
        let c = CouplingLaw::bernoulli_exact(0.3).unwrap();
        assert!(q_sequence(&c).unwrap().is_zero(1e-15));
        let c = CouplingLaw::bernoulli_zero(0.5, 0.5).unwrap();
        let q = q_sequence(&c).unwrap();
        assert!(close(q.values[0], 0.25, 1e-15));
        assert!(close(q.values[1], -0.25, 1e-15));
        assert!(q.values[2..].iter().all(|v| *v == 0.0));
        assert_eq!(q.tail_bound, 0.0);
    }

    #[test]
    fn sample_mode_needs_data() {
        let c = CouplingLaw::samples(vec![(0, 0); 50], 0.5).unwrap();
        assert!(matches!(q_sequence(&c), Err(Error::InsufficientData { .. })));
        assert!(estimate_coupling_terms(&[(0, 0); 99], 1.0, 1, 1).is_err());
    }

    #[test]
    fn bernoulli_exact_bounds() {
        let c = CouplingLaw::bernoulli_exact(0.3).unwrap();
        let r = bounds_exact(&c, 2, 1).unwrap();
        assert!(close(r.bound(CHECK_TV).unwrap(), 0.09, 1e-15));
        assert!(close(r.bound(CHECK_W).unwrap(), 0.09, 1e-15));
        let tv = r.check(CHECK_TV).unwrap();
        assert!(close(tv.lhs.unwrap(), 0.3 * (1.0 - (-0.3f64).exp()), 1e-15));
        assert!(r.all_satisfied());
        assert!(close(r.terms["E|Z|"], 0.3, 1e-15));
    }

    #[test]
    fn bounds_exact_rejects_approximate_couplings() {
        let c = CouplingLaw::bernoulli_zero(0.5, 0.5).unwrap();
        assert!(matches!(bounds_exact(&c, 1, 1), Err(Error::Precondition(_))));
        let c = CouplingLaw::exact([((0, 0), 0.7), ((1, -1), 0.3)], 0.4).unwrap();
        assert!(matches!(bounds_exact(&c, 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn approximate_bounds_example() {
        let c = CouplingLaw::bernoulli_zero(0.5, 0.5).unwrap();
        let r = bounds_approximate(&c, 1, 1).unwrap();
        let expected = (1.0f64 / 0.5f64.sqrt()).min(1.0) * 0.5;
        assert!(close(r.bound(CHECK_TV).unwrap(), expected, 1e-15));
        assert!(close(r.check(CHECK_TV).unwrap().lhs.unwrap(), 0.5 * (1.0 - (-0.5f64).exp()), 1e-15));
        assert!(r.all_satisfied());
        assert!(r.check(CHECK_W_NONNEG).is_some());
    }

    #[test]
    fn approximate_reduces_to_exact() {
        let c = CouplingLaw::bernoulli_exact(0.2).unwrap();
        let a = bounds_approximate(&c, 3, 2).unwrap();
        let e = bounds_exact(&c, 3, 2).unwrap();
        for name in [CHECK_TV, CHECK_ZERO, CHECK_CDF] {
            assert!(close(a.bound(name).unwrap(), e.bound(name).unwrap(), 1e-15));
        }
        assert!(close(a.bound(CHECK_W_NONNEG).unwrap(), e.bound(CHECK_W).unwrap(), 1e-15));
    }

    #[test]
    fn sign_bounds_examples() {
        let c = CouplingLaw::bernoulli_exact(0.3).unwrap();
        let s = zero_prob_sign_bounds(&c).unwrap();
        assert!(s.upper_applicable && !s.lower_applicable);
        assert!(close(s.e_minus_lambda, 0.7408182, 1e-7));
        let c = CouplingLaw::exact([((0, 1), 0.5), ((2, -1), 0.5)], 1.0).unwrap();
        let s = zero_prob_sign_bounds(&c).unwrap();
        assert!(!s.upper_applicable && !s.lower_applicable);
    }

    #[test]
    fn estimate_terms_examples() {
        let t = estimate_coupling_terms(&[(1, 0); 200], 1.0, 2, 1).unwrap();
        assert_eq!(t.e_abs_z, 0.0);
        assert_eq!(t.e_abs_z_se, 0.0);
        let c = CouplingLaw::bernoulli_exact(0.3).unwrap();
        let t = coupling_terms(&c, 2, 1).unwrap();
        assert!(close(t.e_abs_z, 0.3, 1e-15));
        assert!(close(t.remark_stat, 0.0, 1e-15));
    }
}
