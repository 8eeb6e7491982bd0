//! Deterministic identity suites for the Stein machinery and the coupling
//! bounds. Each suite returns a report whose checks carry the worst observed
//! value against its tolerance.

use rand::Rng;

use crate::coupling::{bounds_approximate, bounds_exact, q_sequence, CouplingLaw};
use crate::discrete_dist::{stein_discrepancy, IntegerPmf};
use crate::error::Result;
use crate::pointproc::SeedSpec;
use crate::poisson_stein::{
    magic_factors, IndicatorSet, LipschitzFn, PoissonLaw, SteinSolution, SteinTarget, RESIDUAL_TOL,
};
use crate::report::{BoundCheck, BoundReport};

pub const STEIN_LAMBDAS: [f64; 3] = [0.1, 1.0, 10.0];
pub const SETS_PER_LAMBDA: u64 = 50;
pub const MAX_SET_ELEMENT: u64 = 50;
pub const MAX_INDEX: u64 = 200;
pub const IDENTITY_CASES: u64 = 100;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const Q_TOL: f64 = 1e-12;
pub const BERNOULLI_PS: [f64; 10] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5];

const FACTORIAL_LAMBDAS: [f64; 3] = [0.5, 2.0, 8.0];
const FACTORIAL_MAX_N: u64 = 12;
const LIPSCHITZ_MAX_INDEX: u64 = 100;

fn random_set(rng: &mut impl Rng) -> IndicatorSet {
    loop {
        let s: Vec<u64> = (0..=MAX_SET_ELEMENT).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return IndicatorSet::finite(s);
        }
    }
}

fn excess(name: String, worst: f64) -> BoundCheck {
    BoundCheck::new(name, 0.0).with_exact(worst)
}

/// Recursion residuals and magic-factor dominations of the Stein solutions.
pub fn stein_suite(seed: u64) -> Result<BoundReport> {
    let mut r = BoundReport::new("stein-machinery");
    r.term("sets_per_lambda", SETS_PER_LAMBDA as f64).term("max_index", MAX_INDEX as f64);
    for (li, &lambda) in STEIN_LAMBDAS.iter().enumerate() {
        let mf = magic_factors(lambda, None, None)?;
        let mut rng = SeedSpec::for_replication(seed, "selftest_sets", li as u64).rng();
        let (mut resid, mut f_ex, mut df_ex) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for _ in 0..SETS_PER_LAMBDA {
            let sol = SteinSolution::new(lambda, SteinTarget::Set(random_set(&mut rng)))?;
            let f: Vec<f64> = (0..=MAX_INDEX + 1).map(|i| sol.value(i)).collect::<Result<_>>()?;
            for i in 0..=MAX_INDEX {
                resid = resid.max(sol.residual(i)?.abs());
                f_ex = f_ex.max(f[i as usize].abs() - mf.sup_f_a);
                df_ex = df_ex.max((f[i as usize + 1] - f[i as usize]).abs() - mf.sup_delta_f_a);
            }
        }
        r.push(BoundCheck::new(format!("max residual f_A @lambda={lambda}"), RESIDUAL_TOL).with_exact(resid));
        r.push(excess(format!("max |f_A| - min(1,1/sqrt(lambda)) @lambda={lambda}"), f_ex));
        r.push(excess(format!("max |Delta f_A| - min(1,1/lambda) @lambda={lambda}"), df_ex));

        let zero = SteinSolution::new(lambda, SteinTarget::Set(IndicatorSet::singleton(0)))?;
        let f0: Vec<f64> = (0..=MAX_INDEX + 1).map(|i| zero.value(i)).collect::<Result<_>>()?;
        let mut sign = f64::NEG_INFINITY;
        let mut from2 = f64::NEG_INFINITY;
        for i in 1..=MAX_INDEX as usize {
            sign = sign.max((f0[i + 1] - f0[i]).max(-f0[i]));
            if i >= 2 {
                from2 = from2.max(f0[i].abs() - mf.f0_from_2);
            }
        }
        r.push(excess(format!("max(Delta f_0, -f_0) @lambda={lambda}"), sign));
        r.push(excess(format!("|f_0(1)| - min(1,1/lambda) @lambda={lambda}"), f0[1].abs() - mf.f0_at_1));
        r.push(excess(format!("max |f_0(i>=2)| - min(1,1/lambda^2) @lambda={lambda}"), from2));

        let targets = [
            LipschitzFn::identity(),
            LipschitzFn::new("|k-5|", |k| (k as f64 - 5.0).abs()),
            LipschitzFn::new("min(k,3)", |k| (k as f64).min(3.0)),
            LipschitzFn::new("sin(k)", |k| (k as f64).sin()),
        ];
        let (mut g_ex, mut dg_ex) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for g in targets {
            let sol = SteinSolution::new(lambda, SteinTarget::Lipschitz(g))?;
            let f = sol.values(LIPSCHITZ_MAX_INDEX + 1)?;
            for i in 0..=LIPSCHITZ_MAX_INDEX as usize {
                g_ex = g_ex.max(f[i].abs() - mf.sup_f_g);
                if i >= 1 {
                    dg_ex = dg_ex.max((f[i + 1] - f[i]).abs() - mf.sup_delta_f_g);
                }
            }
        }
        r.push(excess(format!("max |f_g| - 1 @lambda={lambda}"), g_ex));
        r.push(excess(format!("max |Delta f_g| - min(1,1.1437/sqrt(lambda)) @lambda={lambda}"), dg_ex));
    }
    for &lambda in &FACTORIAL_LAMBDAS {
        let zero = SteinSolution::new(lambda, SteinTarget::Set(IndicatorSet::singleton(0)))?;
        let f0: Vec<f64> = (0..=MAX_INDEX + 1).map(|i| zero.value(i)).collect::<Result<_>>()?;
        let mut worst = f64::NEG_INFINITY;
        for n in 1..=FACTORIAL_MAX_N {
            let cap = magic_factors(lambda, None, Some(n))?.delta_f0.unwrap_or(1.0);
            for i in n as usize..=MAX_INDEX as usize {
                worst = worst.max((f0[i + 1] - f0[i]).abs() - cap);
            }
        }
        r.push(excess(format!("max |Delta f_0(i>=n)| - min(1/n,(n-1)!/lambda^n) @lambda={lambda}"), worst));
        for v in (1..=3u64).filter(|&v| v as f64 <= lambda) {
            let cap = magic_factors(lambda, Some(v), None)?.delta_f0v.unwrap_or(1.0);
            let sol = SteinSolution::new(lambda, SteinTarget::Set(IndicatorSet::AtMost(v)))?;
            let mut worst = f64::NEG_INFINITY;
            for i in v + 2..=MAX_INDEX {
                worst = worst.max(sol.delta(i)? - cap);
            }
            r.push(excess(format!("max Delta f_0..{v}(i>=v+2) - min(1,(v+1)^2/lambda^2) @lambda={lambda}"), worst));
        }
    }
    Ok(r)
}

fn random_law(rng: &mut impl Rng) -> Result<IntegerPmf> {
    let top = rng.random_range(0..=20usize);
    let w: Vec<f64> = (0..=top).map(|_| rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    IntegerPmf::from_dense(&w.iter().map(|x| x / s).collect::<Vec<_>>())
}

/// `sum f_A(i) D(i) = P(P in A) - P(X in A)` on random laws, rates and sets.
pub fn identity_suite(seed: u64) -> Result<BoundReport> {
    let mut r = BoundReport::new("discrepancy-identity");
    r.term("cases", IDENTITY_CASES as f64);
    let mut worst = 0.0f64;
    for case in 0..IDENTITY_CASES {
        let mut rng = SeedSpec::for_replication(seed, "selftest_identity", case).rng();
        let law = random_law(&mut rng)?;
        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
        let set = random_set(&mut rng);
        let lhs = stein_discrepancy(&law, lambda, &SteinTarget::Set(set.clone()))?;
        let rhs = set.poisson_prob(&PoissonLaw::new(lambda)?) - law.prob_in(&set);
        worst = worst.max((lhs - rhs).abs());
    }
    r.push(BoundCheck::new("max |sum f_A D - (P(P in A) - P(X in A))|", IDENTITY_TOL).with_exact(worst));
    Ok(r)
}

/// Both coupling theorems on exact Bernoulli tables.
pub fn bernoulli_suite() -> Result<BoundReport> {
    let mut r = BoundReport::new("bernoulli-couplings");
    for &p in &BERNOULLI_PS {
        let exact = CouplingLaw::bernoulli_exact(p)?;
        let q = q_sequence(&exact)?;
        let q_max = q.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        r.push(BoundCheck::new(format!("max |q_i| exact @p={p}"), Q_TOL).with_exact(q_max));
        let approx = CouplingLaw::bernoulli_zero(p, p)?;
        for m in 0..=2 {
            for v in 1..=2 {
                for (label, rep) in [("exact", bounds_exact(&exact, m, v)?), ("approx", bounds_approximate(&approx, m, v)?)] {
                    for c in rep.checks {
                        r.push(BoundCheck { quantity: format!("{} {label} @p={p},m={m},v={v}", c.quantity), ..c });
                    }
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        assert!(identity_suite(1).unwrap().all_satisfied());
        let b = bernoulli_suite().unwrap();
        assert!(b.all_satisfied());
        assert!(b.checks.iter().all(|c| c.satisfied.is_some()));
    }
}
