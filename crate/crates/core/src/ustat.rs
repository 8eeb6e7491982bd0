//! U-statistics of binomial and Poisson point processes with `{0,1}`-valued
//! symmetric kernels: evaluation, the `lambda` and `r` functionals, the
//! size-bias constructions and the bound reports.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_factorial;

use crate::coupling::{CouplingLaw, CHECK_CDF, CHECK_TV, CHECK_W, CHECK_ZERO};
use crate::discrete_dist::{tv_distance, wasserstein_distance, IntegerPmf, Origin};
use crate::error::{domain, precondition, Error, Result};
use crate::grid::UniformGrid;
use crate::pointproc::{sample_binomial_with, sample_poisson_with, BoxWindow, PointPattern, SeedSpec, StreamRng};
use crate::poisson_stein::{PoissonLaw, LIPSCHITZ_DIFF_CONSTANT};
use crate::report::{BoundCheck, BoundReport};

/// Proposals allowed per accepted tuple in the default rejection sampler.
pub const PROPOSAL_CAP: u64 = 1_000_000;

/// Default number of Monte Carlo samples per `lambda`/`r` integral.
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;

/// One-sided zero check of the Poisson-input theorem.
pub const CHECK_ZERO_POISSON: &str = "P(S=0)-e^-lambda";
pub const CHECK_ZERO_SIGN: &str = "e^-lambda-P(S=0)";

const SYMMETRY_SPOT_CHECKS: usize = 64;

type KernelFn = dyn Fn(&[&[f64]]) -> bool + Send + Sync;
type ProposalFn = dyn Fn(&BoxWindow, &mut StreamRng) -> Vec<f64> + Send + Sync;

/// Symmetric `{0,1}`-valued kernel of arity `l` on points of dimension `d`.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    arity: usize,
    dim: usize,
    eval: Arc<KernelFn>,
    reach: Option<f64>,
    proposal: Option<Arc<ProposalFn>>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("dim", &self.dim)
            .field("reach", &self.reach)
            .finish()
    }
}

impl Kernel {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        dim: usize,
        eval: impl Fn(&[&[f64]]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if arity == 0 || dim == 0 {
            return Err(Error::Kernel("arity and dimension must be positive".into()));
        }
        Ok(Self { name: name.into(), arity, dim, eval: Arc::new(eval), reach: None, proposal: None })
    }

    /// Declares that `h = 1` forces all arguments within distance `reach` of
    /// each other, which enables grid-accelerated evaluation.
    pub fn with_reach(mut self, reach: f64) -> Self {
        self.reach = Some(reach);
        self
    }

    /// Sampler for tuples drawn from the normalized density `h` times Lebesgue
    /// measure on a box; returns the `l * d` coordinates.
    pub fn with_proposal(
        mut self,
        proposal: impl Fn(&BoxWindow, &mut StreamRng) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.proposal = Some(Arc::new(proposal));
        self
    }

    /// `h = 1` for every tuple.
    pub fn constant(arity: usize, dim: usize) -> Result<Self> {
        Self::new("constant", arity, dim, |_| true)
    }

    /// `h(x) = 1{x in [lower, upper]}`.
    pub fn region(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        Self::new("region", 1, dim, move |p| {
            p[0].iter().zip(lower.iter().zip(&upper)).all(|(x, (a, b))| *a <= *x && *x <= *b)
        })
    }

    /// `h(x, y) = 1{|x - y| <= delta}`.
    pub fn distance_threshold(dim: usize, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Kernel(format!("invalid threshold {delta}")));
        }
        let d2 = delta * delta;
        Ok(Self::new("distance_threshold", 2, dim, move |p| dist2(p[0], p[1]) <= d2)?.with_reach(delta))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reach(&self) -> Option<f64> {
        self.reach
    }

    pub fn has_proposal(&self) -> bool {
        self.proposal.is_some()
    }

    pub fn eval(&self, points: &[&[f64]]) -> bool {
        (self.eval)(points)
    }

    /// Evaluates `h` on `tuples` random tuples and on a permutation of each,
    /// failing on the first disagreement.
    pub fn check_symmetry(&self, window: &BoxWindow, tuples: usize, rng: &mut StreamRng) -> Result<()> {
        let l = self.arity;
        if l < 2 {
            return Ok(());
        }
        for _ in 0..tuples {
            let coords = uniform_tuple(window, l, rng);
            let pts: Vec<&[f64]> = coords.chunks_exact(self.dim).collect();
            let mut perm: Vec<usize> = (0..l).collect();
            for i in (1..l).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let permuted: Vec<&[f64]> = perm.iter().map(|&i| pts[i]).collect();
            if self.eval(&pts) != self.eval(&permuted) {
                return Err(Error::Kernel(format!("kernel '{}' is not symmetric", self.name)));
            }
        }
        Ok(())
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn uniform_tuple(window: &BoxWindow, l: usize, rng: &mut impl Rng) -> Vec<f64> {
    let d = window.dim();
    let mut out = Vec::with_capacity(l * d);
    for _ in 0..l {
        for j in 0..d {
            out.push(window.lower()[j] + rng.random::<f64>() * window.side(j));
        }
    }
    out
}

/// `n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}

/// Number of `l`-subsets of the pattern on which `h = 1`.
pub fn eval_ustat(pattern: &PointPattern, kernel: &Kernel) -> Result<u64> {
    eval_coords(pattern.coords(), pattern.dim(), pattern.window(), kernel)
}

fn eval_coords(coords: &[f64], d: usize, window: &BoxWindow, kernel: &Kernel) -> Result<u64> {
    if d != kernel.dim {
        return Err(Error::Kernel(format!("pattern dimension {d} differs from kernel dimension {}", kernel.dim)));
    }
    let n = coords.len() / d;
    let l = kernel.arity;
    let point = |i: usize| &coords[i * d..(i + 1) * d];
    let mut count = 0u64;
    let mut checks = 0usize;
    let mut check = |idx: &[usize], value: bool| -> Result<()> {
        if checks < SYMMETRY_SPOT_CHECKS && idx.len() >= 2 {
            checks += 1;
            let rotated: Vec<&[f64]> = idx.iter().cycle().skip(1).take(idx.len()).map(|&i| point(i)).collect();
            let mut swapped: Vec<&[f64]> = idx.iter().map(|&i| point(i)).collect();
            swapped.swap(0, 1);
            if kernel.eval(&rotated) != value || kernel.eval(&swapped) != value {
                return Err(Error::Kernel(format!("kernel '{}' is not symmetric", kernel.name)));
            }
        }
        Ok(())
    };
    if l > n {
        return Ok(0);
    }
    match kernel.reach {
        Some(reach) if l >= 2 && d <= 3 => {
            let grid = UniformGrid::new(coords, d, window.lower(), window.upper(), reach.max(1e-12))?;
            let mut neigh = Vec::new();
            let mut idx = vec![0usize; l];
            for i in 0..n {
                neigh.clear();
                grid.for_each_within(point(i), reach, |j, _| {
                    if j > i {
                        neigh.push(j);
                    }
                });
                neigh.sort_unstable();
                idx[0] = i;
                let mut combo: Vec<usize> = (0..l - 1).collect();
                if neigh.len() < l - 1 {
                    continue;
                }
                loop {
                    for (slot, &c) in combo.iter().enumerate() {
                        idx[slot + 1] = neigh[c];
                    }
                    let pts: Vec<&[f64]> = idx.iter().map(|&k| point(k)).collect();
                    let v = kernel.eval(&pts);
                    check(&idx, v)?;
                    count += u64::from(v);
                    if !next_combination(&mut combo, neigh.len()) {
                        break;
                    }
                }
            }
        }
        _ => {
            let mut combo: Vec<usize> = (0..l).collect();
            loop {
                let pts: Vec<&[f64]> = combo.iter().map(|&k| point(k)).collect();
                let v = kernel.eval(&pts);
                check(&combo, v)?;
                count += u64::from(v);
                if !next_combination(&mut combo, n) {
                    break;
                }
            }
        }
    }
    Ok(count)
}

// advances an ascending k-combination of 0..n; false when exhausted
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Input process of a U-statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UStatInput {
    Binomial { n: u64, window: BoxWindow },
    Poisson { t: f64, window: BoxWindow },
}

impl UStatInput {
    pub fn window(&self) -> &BoxWindow {
        match self {
            Self::Binomial { window, .. } | Self::Poisson { window, .. } => window,
        }
    }
}

/// How `lambda` and `r` are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaRMethod {
    ClosedForm { lambda: f64, r: f64 },
    MonteCarlo { samples: u64, seed: SeedSpec },
}

/// `lambda` and `r` with Monte Carlo standard errors (zero for closed forms).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaR {
    pub lambda: f64,
    pub lambda_se: f64,
    pub r: f64,
    pub r_se: f64,
    pub warnings: Vec<String>,
}

// total mass of the intensity measure and the multiplicity factor for 2l - i points
fn mass_factor(input: &UStatInput, points: u64) -> f64 {
    match input {
        UStatInput::Binomial { n, .. } => falling_factorial(*n, points),
        UStatInput::Poisson { t, window } => (t * window.volume()).powi(points as i32),
    }
}

fn lambda_r(kernel: &Kernel, input: &UStatInput, method: LambdaRMethod) -> Result<LambdaR> {
    let l = kernel.arity as u64;
    let window = input.window();
    if window.dim() != kernel.dim {
        return Err(Error::Kernel("kernel and window dimensions differ".into()));
    }
    match method {
        LambdaRMethod::ClosedForm { lambda, r } => {
            if lambda < 0.0 || r < 0.0 {
                return Err(domain("lambda and r must be non-negative"));
            }
            let r = if l == 1 { 0.0 } else { r };
            Ok(LambdaR { lambda, lambda_se: 0.0, r, r_se: 0.0, warnings: Vec::new() })
        }
        LambdaRMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InsufficientData { needed: 2, got: samples as usize });
            }
            let mut rng = seed.rng();
            let d = kernel.dim;
            let mut hits = 0u64;
            for _ in 0..samples {
                let c = uniform_tuple(window, kernel.arity, &mut rng);
                let pts: Vec<&[f64]> = c.chunks_exact(d).collect();
                hits += u64::from(kernel.eval(&pts));
            }
            let p = hits as f64 / samples as f64;
            let p_se = (p * (1.0 - p) / samples as f64).sqrt();
            let scale = mass_factor(input, l) / (ln_factorial(l)).exp();
            let mut warnings = Vec::new();
            if hits == 0 {
                warnings.push("degenerate kernel: no accepted tuple, lambda estimate is 0".into());
            }
            let (mut r, mut r_se) = (0.0, 0.0);
            for i in 1..l {
                let mut acc = 0u64;
                for _ in 0..samples {
                    let shared = uniform_tuple(window, i as usize, &mut rng);
                    let a = uniform_tuple(window, (l - i) as usize, &mut rng);
                    let b = uniform_tuple(window, (l - i) as usize, &mut rng);
                    let mut ta: Vec<&[f64]> = shared.chunks_exact(d).collect();
                    let mut tb = ta.clone();
                    ta.extend(a.chunks_exact(d));
                    tb.extend(b.chunks_exact(d));
                    acc += u64::from(kernel.eval(&ta) && kernel.eval(&tb));
                }
                let q = acc as f64 / samples as f64;
                let q_se = (q * (1.0 - q) / samples as f64).sqrt();
                let f = mass_factor(input, 2 * l - i);
                if f * q >= r {
                    r = f * q;
                    r_se = f * q_se;
                }
            }
            Ok(LambdaR { lambda: scale * p, lambda_se: scale * p_se, r, r_se, warnings })
        }
    }
}

/// `lambda = (n)_l / l! * int h dK^l` and the matching `r`, with `K` uniform on the box.
pub fn lambda_r_binomial(kernel: &Kernel, n: u64, window: &BoxWindow, method: LambdaRMethod) -> Result<LambdaR> {
    if n < kernel.arity as u64 {
        return Err(precondition(format!("n = {n} smaller than the kernel arity {}", kernel.arity)));
    }
    lambda_r(kernel, &UStatInput::Binomial { n, window: window.clone() }, method)
}

/// `lambda = 1/l! * int h dL^l` and the matching `r`, with `L = t` times Lebesgue on the box.
pub fn lambda_r_poisson(kernel: &Kernel, t: f64, window: &BoxWindow, method: LambdaRMethod) -> Result<LambdaR> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("intensity must be positive, got {t}")));
    }
    lambda_r(kernel, &UStatInput::Poisson { t, window: window.clone() }, method)
}

/// A U-statistic together with its `lambda` and `r`.
#[derive(Clone, Debug)]
pub struct UStatSpec {
    pub kernel: Kernel,
    pub input: UStatInput,
    pub lambda_r: LambdaR,
}

fn factorial_ratio(k: u64, lambda: f64, extra_power: i32) -> f64 {
    (ln_factorial(k) - (k as f64 + f64::from(extra_power)) * lambda.ln()).exp()
}

struct Factor {
    value: f64,
    upper: f64,
}

fn check_with_sensitivity(name: &str, bound: f64, bound_hi: f64) -> BoundCheck {
    let mut c = BoundCheck::new(name, bound);
    c.mc_allowance = (bound_hi - bound).max(0.0);
    c
}

/// Bounds for a U-statistic of a binomial process; `stilde` is the (empirical)
/// law of the statistic on `n - 2l` points.
pub fn bounds_ustat_binomial(spec: &UStatSpec, stilde: &IntegerPmf, m: u64, v: u64) -> Result<BoundReport> {
    let UStatInput::Binomial { n, .. } = spec.input else {
        return Err(precondition("binomial input required"));
    };
    let l = spec.kernel.arity as u64;
    if n < 2 * l {
        return Err(precondition(format!("n = {n} must be at least 2l = {}", 2 * l)));
    }
    let lambda = spec.lambda_r.lambda;
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    if m == 0 || v == 0 {
        return Err(domain("m and v must be at least 1"));
    }
    let lf = ln_factorial(l).exp();
    let two_l = 2f64.powi(l as i32);
    let factor_at = |r: f64| two_l * r / (lf * lambda) + 2.0 * (l * l) as f64 * lambda / n as f64;
    let lr = &spec.lambda_r;
    let f = Factor { value: factor_at(lr.r), upper: factor_at(lr.r + 3.0 * lr.r_se) };
    let mut rep = BoundReport::new("ustat-binomial");
    rep.term("lambda", lambda)
        .term("r", lr.r)
        .term("r_se", lr.r_se)
        .term("n", n as f64)
        .term("l", l as f64)
        .term("2^l r/(l! lambda) + 2 l^2 lambda/n", f.value);
    let tv_f = lambda.min(1.0);
    let w_f = (LIPSCHITZ_DIFF_CONSTANT * lambda.sqrt()).min(lambda);
    let mut zero_f = factorial_ratio(m, lambda, 0);
    for k in 0..m {
        zero_f += (lambda / (k + 1) as f64).min(factorial_ratio(k, lambda, 0)) * stilde.cdf(k);
    }
    let cdf_f = ((v + 1) as f64).powi(2) / lambda + stilde.cdf(v);
    rep.term("zero_bracket", zero_f).term("cdf_bracket", cdf_f);
    rep.push(check_with_sensitivity(CHECK_TV, tv_f * f.value, tv_f * f.upper));
    rep.push(check_with_sensitivity(CHECK_W, w_f * f.value, w_f * f.upper));
    rep.push(check_with_sensitivity(CHECK_ZERO, zero_f * f.value, zero_f * f.upper));
    rep.push(check_with_sensitivity(CHECK_CDF, cdf_f * f.value, cdf_f * f.upper));
    Ok(rep)
}

/// Bounds for a U-statistic of a Poisson process; `s_law` is the (empirical) law of `S`.
pub fn bounds_ustat_poisson(spec: &UStatSpec, s_law: &IntegerPmf, m: u64, v: u64) -> Result<BoundReport> {
    if !matches!(spec.input, UStatInput::Poisson { .. }) {
        return Err(precondition("Poisson input required"));
    }
    let lambda = spec.lambda_r.lambda;
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    if m == 0 || v == 0 {
        return Err(domain("m and v must be at least 1"));
    }
    let l = spec.kernel.arity as u64;
    let lf = ln_factorial(l).exp();
    let two_l = 2f64.powi(l as i32);
    let lr = &spec.lambda_r;
    let base = two_l * lr.r / lf;
    let base_hi = two_l * (lr.r + 3.0 * lr.r_se) / lf;
    let mut rep = BoundReport::new("ustat-poisson");
    rep.term("lambda", lambda).term("r", lr.r).term("r_se", lr.r_se).term("l", l as f64).term("2^l r/l!", base);
    let tv_f = (1.0 / lambda).min(1.0);
    let w_f = (LIPSCHITZ_DIFF_CONSTANT / lambda.sqrt()).min(1.0);
    let mut zero_f = factorial_ratio(m, lambda, 1);
    for k in 0..m {
        zero_f += (1.0 / (k + 1) as f64).min(factorial_ratio(k, lambda, 1)) * s_law.cdf(k);
    }
    let cdf_f = (((v + 1) as f64).powi(2) / lambda + s_law.cdf(v)) / lambda;
    rep.term("zero_bracket", zero_f).term("cdf_bracket", cdf_f);
    rep.push(check_with_sensitivity(CHECK_TV, tv_f * base, tv_f * base_hi));
    rep.push(check_with_sensitivity(CHECK_W, w_f * base, w_f * base_hi));
    rep.push(check_with_sensitivity(CHECK_ZERO_POISSON, zero_f * base, zero_f * base_hi));
    rep.push(check_with_sensitivity(CHECK_CDF, cdf_f * base, cdf_f * base_hi));
    Ok(rep)
}

/// Fills the checks of a U-statistic report with Monte Carlo estimates of
/// their left-hand sides from the law of `S`. Allowances add three standard
/// errors of the estimate and three standard errors of `lambda`.
pub fn attach_estimates(report: &mut BoundReport, law: &IntegerPmf, lambda: f64, lambda_se: f64, v: u64) -> Result<()> {
    let po = PoissonLaw::new(lambda)?;
    let n = match law.origin() {
        Origin::Empirical { samples } => samples as f64,
        Origin::Exact => f64::INFINITY,
    };
    let se = |f: f64| (f * (1.0 - f) / n).sqrt();
    let slack = 3.0 * lambda_se;
    let w_se: f64 = (0..=law.max_value()).map(|k| se(law.cdf(k))).sum();
    let (f0, z0, fv) = (law.prob(0), (-lambda).exp(), law.cdf(v));
    let estimates = [
        (CHECK_TV, tv_distance(law, po), 3.0 * law.tv_std_error()),
        (CHECK_W, wasserstein_distance(law, po), 3.0 * w_se),
        (CHECK_CDF, (fv - po.cdf(v)).abs(), 3.0 * se(fv)),
        (CHECK_ZERO, (f0 - z0).abs(), 3.0 * se(f0)),
        (CHECK_ZERO_POISSON, f0 - z0, 3.0 * se(f0)),
    ];
    let mut one_sided = false;
    for c in report.checks.iter_mut() {
        if let Some(&(name, lhs, allowance)) = estimates.iter().find(|e| e.0 == c.quantity) {
            one_sided |= name == CHECK_ZERO_POISSON;
            *c = c.clone().with_estimate(lhs, allowance + slack);
        }
    }
    if one_sided {
        report.push(BoundCheck::new(CHECK_ZERO_SIGN, 0.0).with_estimate(z0 - f0, 3.0 * se(f0) + slack));
    }
    report.term("P(S=0)", f0).term("e^-lambda", z0);
    Ok(())
}

fn draw_chi(kernel: &Kernel, window: &BoxWindow, rng: &mut StreamRng) -> Result<Vec<f64>> {
    if let Some(p) = &kernel.proposal {
        return Ok(p(window, rng));
    }
    let d = kernel.dim;
    for _ in 0..PROPOSAL_CAP {
        let c = uniform_tuple(window, kernel.arity, rng);
        let pts: Vec<&[f64]> = c.chunks_exact(d).collect();
        if kernel.eval(&pts) {
            return Ok(c);
        }
    }
    Err(Error::Efficiency { attempts: PROPOSAL_CAP })
}

/// One draw of `(S, S')` for a Poisson input: `S' = s(eta + chi) - h(chi)`
/// with `chi` drawn from the normalized `h L^l`, independent of `eta`.
pub fn sample_sizebias_poisson(kernel: &Kernel, t: f64, window: &BoxWindow, seed: SeedSpec) -> Result<(u64, u64)> {
    let mut rng = seed.rng();
    let eta = sample_poisson_with(window, t, &mut rng)?;
    let chi = draw_chi(kernel, window, &mut rng)?;
    let s = eval_ustat(&eta, kernel)?;
    let mut coords = eta.coords().to_vec();
    coords.extend_from_slice(&chi);
    let s_plus = eval_coords(&coords, kernel.dim, window, kernel)?;
    Ok((s, s_plus - 1))
}

/// One draw of `(S, S')` for a binomial input: `beta_n` is the first `n - l`
/// points plus `l` more, and `S' = s(beta_{n-l} + chi) - h(chi)`.
pub fn sample_sizebias_binomial(kernel: &Kernel, n: u64, window: &BoxWindow, seed: SeedSpec) -> Result<(u64, u64)> {
    let l = kernel.arity as u64;
    if n < l {
        return Err(precondition("n must be at least the kernel arity"));
    }
    let mut rng = seed.rng();
    let beta = sample_binomial_with(n, window, &mut rng);
    let chi = draw_chi(kernel, window, &mut rng)?;
    let s = eval_ustat(&beta, kernel)?;
    let keep = ((n - l) as usize) * kernel.dim;
    let mut coords = beta.coords()[..keep].to_vec();
    coords.extend_from_slice(&chi);
    let s_plus = eval_coords(&coords, kernel.dim, window, kernel)?;
    Ok((s, s_plus - 1))
}

/// Result of the chi-square comparison of `k P(S = k)` with `lambda P(S' = k - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeBiasTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub draws: usize,
}

/// Hotelling-type test of the identities `k P(S=k) = lambda P(S'=k-1)`,
/// `k = 1..K`, pooling `k >= K` into the last cell.
pub fn sizebias_chi_square(draws: &[(u64, u64)], lambda: f64, min_count: u64) -> Result<SizeBiasTest> {
    let n = draws.len();
    if n < 100 {
        return Err(Error::InsufficientData { needed: 100, got: n });
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &(s, _) in draws {
        *counts.entry(s).or_default() += 1;
    }
    let mut cells = 1u64;
    while counts.get(&(cells + 1)).copied().unwrap_or(0) >= min_count {
        cells += 1;
    }
    let k_cells = cells as usize;
    let vector = |s: u64, sp: u64| -> DVector<f64> {
        let mut w = DVector::zeros(k_cells);
        for k in 1..=cells {
            let last = k == cells;
            let hit_s = if last { s >= k } else { s == k };
            let hit_sp = if last { sp + 1 >= k } else { sp + 1 == k };
            let mut val = 0.0;
            if hit_s {
                val += s as f64;
            }
            if hit_sp {
                val -= lambda;
            }
            w[(k - 1) as usize] = val;
        }
        w
    };
    let mut mean = DVector::zeros(k_cells);
    for &(s, sp) in draws {
        mean += vector(s, sp);
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(k_cells, k_cells);
    for &(s, sp) in draws {
        let c = vector(s, sp) - &mean;
        cov += &c * c.transpose();
    }
    cov /= (n - 1) as f64;
    let scaled = &cov / n as f64;
    let solved = scaled
        .clone()
        .lu()
        .solve(&mean)
        .ok_or_else(|| Error::Internal("singular covariance in size-bias test".into()))?;
    let statistic = mean.dot(&solved);
    let chi = ChiSquared::new(k_cells as f64).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(SizeBiasTest { statistic, degrees_of_freedom: k_cells, p_value: 1.0 - chi.cdf(statistic), draws: n })
}

/// Finite space with atoms (points) and probabilities, used as `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpace {
    pub atoms: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

/// Exact laws of `S` and of the size-bias partner `S'` for a binomial input on a finite space.
#[derive(Clone, Debug)]
pub struct ExactSizeBias {
    pub lambda: f64,
    pub law_s: IntegerPmf,
    pub law_s_prime: IntegerPmf,
    /// Joint law of `(S, S' - S)`.
    pub coupling: CouplingLaw,
    /// `max_k |k P(S=k) - lambda P(S'=k-1)|`.
    pub max_violation: f64,
}

const MAX_ENUMERATION: u64 = 1 << 22;

/// Enumerates `K^n` and the `chi` tuples to obtain the exact joint law.
pub fn binomial_sizebias_exact(space: &FiniteSpace, kernel: &Kernel, n: u64) -> Result<ExactSizeBias> {
    let a = space.atoms.len() as u64;
    let l = kernel.arity as u64;
    if a == 0 || space.probs.len() != a as usize {
        return Err(domain("finite space needs matching atoms and probabilities"));
    }
    if (space.probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 || space.probs.iter().any(|p| *p < 0.0) {
        return Err(Error::Validation("atom probabilities must form a distribution".into()));
    }
    if n < l {
        return Err(precondition("n must be at least the kernel arity"));
    }
    if a.checked_pow((n + l) as u32).is_none_or(|t| t > MAX_ENUMERATION) {
        return Err(Error::Size(format!("{a}^{} configurations exceed the enumeration cap", n + l)));
    }
    let s_of = |labels: &[usize]| -> u64 {
        let m = labels.len();
        if m < l as usize {
            return 0;
        }
        let mut combo: Vec<usize> = (0..l as usize).collect();
        let mut c = 0;
        loop {
            let pts: Vec<&[f64]> = combo.iter().map(|&i| space.atoms[labels[i]].as_slice()).collect();
            c += u64::from(kernel.eval(&pts));
            if !next_combination(&mut combo, m) {
                break;
            }
        }
        c
    };
    let decode = |mut idx: u64, len: u64| -> Vec<usize> {
        (0..len)
            .map(|_| {
                let v = (idx % a) as usize;
                idx /= a;
                v
            })
            .collect()
    };
    // chi law: tuples weighted by h times product measure
    let mut chi: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut chi_mass = 0.0;
    for idx in 0..a.pow(l as u32) {
        let labels = decode(idx, l);
        let pts: Vec<&[f64]> = labels.iter().map(|&i| space.atoms[i].as_slice()).collect();
        if kernel.eval(&pts) {
            let w: f64 = labels.iter().map(|&i| space.probs[i]).product();
            chi_mass += w;
            chi.push((labels, w));
        }
    }
    if chi_mass == 0.0 {
        return Err(precondition("lambda = 0: the kernel never fires"));
    }
    let lambda = falling_factorial(n, l) / ln_factorial(l).exp() * chi_mass;
    let mut joint: BTreeMap<(u64, i64), f64> = BTreeMap::new();
    for idx in 0..a.pow(n as u32) {
        let labels = decode(idx, n);
        let w: f64 = labels.iter().map(|&i| space.probs[i]).product();
        if w == 0.0 {
            continue;
        }
        let s = s_of(&labels);
        let mut base = labels[..(n - l) as usize].to_vec();
        for (tuple, cw) in &chi {
            base.truncate((n - l) as usize);
            base.extend_from_slice(tuple);
            let sp = s_of(&base) - 1;
            *joint.entry((s, sp as i64 - s as i64)).or_default() += w * cw / chi_mass;
        }
    }
    let coupling = CouplingLaw::exact(joint.iter().map(|(k, p)| (*k, *p)), lambda)?;
    let mut ls: BTreeMap<u64, f64> = BTreeMap::new();
    let mut lsp: BTreeMap<u64, f64> = BTreeMap::new();
    for (&(s, z), &p) in &joint {
        *ls.entry(s).or_default() += p;
        *lsp.entry((s as i64 + z) as u64).or_default() += p;
    }
    let to_pmf = |m: BTreeMap<u64, f64>| -> Result<IntegerPmf> {
        let (s, p): (Vec<u64>, Vec<f64>) = m.into_iter().unzip();
        let t: f64 = p.iter().sum();
        IntegerPmf::new(s, p.into_iter().map(|x| x / t).collect())
    };
    let law_s = to_pmf(ls)?;
    let law_s_prime = to_pmf(lsp)?;
    let top = law_s.max_value().max(law_s_prime.max_value() + 1);
    let max_violation = (1..=top)
        .map(|k| (k as f64 * law_s.prob(k) - lambda * law_s_prime.prob(k - 1)).abs())
        .fold(0.0, f64::max);
    Ok(ExactSizeBias { lambda, law_s, law_s_prime, coupling, max_violation })
}
