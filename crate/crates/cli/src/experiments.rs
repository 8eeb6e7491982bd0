//! Dispatch from configs to the application modules, and the fixed table
//! layout of each experiment.

use std::collections::BTreeMap;

use chenstein::discrete_dist::{empirical_from_counts, IntegerPmf};
use chenstein::interpoint::{check_interpoint_bounds, InterpointConfig};
use chenstein::mc::replicate;
use chenstein::pointproc::{sample_binomial_with, sample_poisson_with, BoxWindow, SeedSpec};
use chenstein::poisson_stein::PoissonLaw;
use chenstein::report::{BoundCheck, BoundReport};
use chenstein::runs::{
    attach_runs_estimates, bounds_runs, simulate_runs, sizebias_runs_check, RunsConfig, CHECK_RUNS_ZERO,
    CHECK_UNIFORM, MAX_EXHAUSTIVE_N, MAX_SIZEBIAS_N,
};
use chenstein::selftest::{bernoulli_suite, identity_suite, stein_suite};
use chenstein::ustat::{
    attach_estimates, bounds_ustat_binomial, bounds_ustat_poisson, eval_ustat, lambda_r_binomial, lambda_r_poisson,
    sample_sizebias_binomial, sample_sizebias_poisson, sizebias_chi_square, Kernel, LambdaRMethod, UStatInput,
    UStatSpec,
};
use chenstein::voronoi::{c_gumbel, estimate_p, simulate_circum, simulate_inradius, VoronoiConstants};
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig, KernelSpec, Params};
use crate::error::Result;
use crate::table::{columns, Column, Kind, Table};

pub const CHECK_SIZEBIAS_RUNS: &str = "size-bias identity";
pub const CHECK_SIZEBIAS_TEST: &str = "1e-3 - p_value(size-bias)";
/// Significance level of the size-bias chi-square check.
pub const SIZEBIAS_LEVEL: f64 = 1e-3;
/// Smallest count of a cell kept separate in the size-bias test.
pub const SIZEBIAS_MIN_COUNT: u64 = 50;
const SIZEBIAS_IDENTITY_TOL: f64 = 1e-12;

/// Everything an experiment produces.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    pub reports: Vec<BoundReport>,
    pub constants: Option<Value>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(BoundReport::all_satisfied)
    }
}

use Kind::{Bool as B, Float as F, Int as I, Str as S};

/// Columns of the results table of `e`, in output order.
pub fn schema(e: Experiment) -> Vec<Column> {
    match e {
        Experiment::Interpoint => columns(&[
            ("u", F),
            ("survival", F),
            ("survival_se", F),
            ("target", F),
            ("sup_bound", F),
            ("mean_count", F),
            ("mean_count_se", F),
            ("tv", F),
            ("tv_se", F),
            ("tv_bound", F),
            ("pass", B),
        ]),
        Experiment::Runs => columns(&[
            ("n", I),
            ("k", I),
            ("p", F),
            ("v", I),
            ("mean", F),
            ("exact", B),
            ("tv", F),
            ("bound_tv", F),
            ("cdf_diff", F),
            ("bound_uniform", F),
            ("p_zero", F),
            ("bound_zero", F),
            ("sizebias_violation", F),
            ("pass", B),
        ]),
        Experiment::VoronoiCirc => columns(&[
            ("u", F),
            ("survival", F),
            ("survival_se", F),
            ("weibull_survival", F),
            ("survival_bound", F),
            ("mean_count", F),
            ("mean_count_se", F),
            ("m_cap", F),
            ("mhat", F),
            ("mhat_rate", F),
            ("mhat_rate_se", F),
            ("tv", F),
            ("tv_se", F),
            ("tv_bound", F),
            ("pass", B),
        ]),
        Experiment::VoronoiInradius => columns(&[
            ("u", F),
            ("cdf", F),
            ("cdf_se", F),
            ("gumbel_cdf", F),
            ("kolmogorov_bound", F),
            ("mean_count", F),
            ("mean_count_se", F),
            ("target_count", F),
            ("tv", F),
            ("tv_se", F),
            ("tv_bound", F),
            ("pass", B),
        ]),
        Experiment::UstatBinomial | Experiment::UstatPoisson => columns(&[
            ("k", I),
            ("p_hat", F),
            ("p_hat_se", F),
            ("poisson_pmf", F),
            ("cdf_hat", F),
            ("poisson_cdf", F),
        ]),
        Experiment::CoreSelftest => columns(&[("suite", S), ("check", S), ("lhs", F), ("bound", F), ("pass", B)]),
    }
}

/// The checked-in schema document: CSV columns and JSONL fields per experiment.
pub fn schema_document() -> Value {
    let mut doc = serde_json::Map::new();
    for e in Experiment::ALL {
        let cols = schema(e);
        doc.insert(
            e.name().into(),
            json!({
                "csv_columns": cols.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
                "jsonl_fields": cols,
            }),
        );
    }
    Value::Object(doc)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut table = Table::new(schema(cfg.experiment));
    let outcome = match &cfg.params {
        Params::Interpoint { d, t, u_max, u_grid } => {
            let ic = InterpointConfig::unit(*d, *t, *u_max, cfg.reps, cfg.master_seed)?;
            let study = check_interpoint_bounds(&ic, u_grid, cfg.workers)?;
            for r in &study.rows {
                table.push(vec![
                    r.u.into(),
                    r.survival.into(),
                    r.survival_se.into(),
                    r.target.into(),
                    r.sup_bound.into(),
                    r.mean_count.into(),
                    r.mean_count_se.into(),
                    r.tv.into(),
                    r.tv_se.into(),
                    r.tv_bound.into(),
                    r.pass.into(),
                ]);
            }
            Outcome { table, reports: vec![study.report], constants: None, notes: Vec::new() }
        }
        Params::Runs { n, k, p, v } => runs(cfg, table, n, k.as_deref(), p, v)?,
        Params::VoronoiCirc { d, t, grid_points, p_reps, u_grid } => {
            let p = estimate_p(*d, *p_reps, cfg.master_seed, cfg.workers)?;
            let c = VoronoiConstants::from_estimate(*d, &p)?;
            let vc = cfg.voronoi(*d, *t, *grid_points, u_grid.clone(), true)?;
            let study = simulate_circum(&vc, &c, cfg.workers)?;
            for r in &study.rows {
                table.push(vec![
                    r.u.into(),
                    r.survival.into(),
                    r.survival_se.into(),
                    r.weibull_survival.into(),
                    r.survival_bound.into(),
                    r.mean_count.into(),
                    r.mean_count_se.into(),
                    r.m_cap.into(),
                    r.mhat.into(),
                    r.mhat_rate.into(),
                    r.mhat_rate_se.into(),
                    r.tv.into(),
                    r.tv_se.into(),
                    r.tv_bound.into(),
                    r.pass.into(),
                ]);
            }
            let constants = json!({
                "p_estimate": p,
                "constants": c,
                "kolmogorov": study.kolmogorov,
                "kolmogorov_bound": study.kolmogorov_bound,
            });
            let notes = study.report.notes.clone();
            Outcome { table, reports: vec![study.report], constants: Some(constants), notes }
        }
        Params::VoronoiInradius { d, t, grid_points, u_grid } => {
            let vc = cfg.voronoi(*d, *t, *grid_points, u_grid.clone(), false)?;
            let study = simulate_inradius(&vc, cfg.workers)?;
            for r in &study.rows {
                table.push(vec![
                    r.u.into(),
                    r.cdf.into(),
                    r.cdf_se.into(),
                    r.gumbel_cdf.into(),
                    r.kolmogorov_bound.into(),
                    r.mean_count.into(),
                    r.mean_count_se.into(),
                    r.target_count.into(),
                    r.tv.into(),
                    r.tv_se.into(),
                    r.tv_bound.into(),
                    r.pass.into(),
                ]);
            }
            let constants = json!({
                "d": d,
                "c_gumbel": c_gumbel(*d),
                "kolmogorov": study.kolmogorov,
                "kolmogorov_se": study.kolmogorov_se,
                "kolmogorov_bound": study.kolmogorov_bound,
            });
            let notes = study.report.notes.clone();
            Outcome { table, reports: vec![study.report], constants: Some(constants), notes }
        }
        Params::UstatBinomial { kernel, d, n, m, v, mc_samples, sizebias_draws } => {
            let window = BoxWindow::unit_cube(*d)?;
            let input = UStatInput::Binomial { n: *n, window };
            ustat(cfg, table, kernel, input, *m, *v, *mc_samples, *sizebias_draws)?
        }
        Params::UstatPoisson { kernel, d, t, m, v, mc_samples, sizebias_draws } => {
            let window = BoxWindow::unit_cube(*d)?;
            let input = UStatInput::Poisson { t: *t, window };
            ustat(cfg, table, kernel, input, *m, *v, *mc_samples, *sizebias_draws)?
        }
        Params::CoreSelftest => {
            let reports = vec![stein_suite(cfg.master_seed)?, identity_suite(cfg.master_seed)?, bernoulli_suite()?];
            for r in &reports {
                for c in &r.checks {
                    table.push(vec![
                        r.theorem.as_str().into(),
                        c.quantity.as_str().into(),
                        c.lhs.unwrap_or(f64::NAN).into(),
                        c.bound.into(),
                        c.passed().into(),
                    ]);
                }
            }
            Outcome { table, reports, constants: None, notes: Vec::new() }
        }
    };
    Ok(outcome)
}

fn lhs(r: &BoundReport, name: &str) -> f64 {
    r.check(name).and_then(|c| c.lhs).unwrap_or(f64::NAN)
}

fn bound(r: &BoundReport, name: &str) -> f64 {
    r.bound(name).unwrap_or(f64::NAN)
}

fn runs(cfg: &ExperimentConfig, mut table: Table, ns: &[u32], ks: Option<&[u32]>, ps: &[f64], vs: &[u64]) -> Result<Outcome> {
    let mut combos = Vec::new();
    for &n in ns {
        let klist: Vec<u32> = match ks {
            Some(ks) => ks.to_vec(),
            None => (1..=n).collect(),
        };
        for k in klist {
            for &p in ps {
                combos.push(RunsConfig::new(n, k, p)?);
            }
        }
    }
    let per_combo = replicate(combos.len() as u64, cfg.workers, |i| -> Result<Vec<BoundReport>> {
        let rc = &combos[i as usize];
        let sim = (rc.n > MAX_EXHAUSTIVE_N)
            .then(|| simulate_runs(rc, cfg.reps, SeedSpec::for_replication(cfg.master_seed, "runs", i)))
            .transpose()?;
        let violation = (rc.n <= MAX_SIZEBIAS_N).then(|| sizebias_runs_check(rc)).transpose()?.map(|s| s.max_violation);
        vs.iter()
            .map(|&v| {
                let mut r = bounds_runs(rc, v)?;
                if let Some(sim) = &sim {
                    attach_runs_estimates(&mut r, rc, sim, v)?;
                }
                if let Some(x) = violation {
                    r.push(BoundCheck::new(CHECK_SIZEBIAS_RUNS, SIZEBIAS_IDENTITY_TOL).with_exact(x));
                }
                Ok(r)
            })
            .collect()
    })?;
    let mut reports = Vec::new();
    for (rc, reps) in combos.iter().zip(per_combo) {
        for (&v, r) in vs.iter().zip(reps?) {
            table.push(vec![
                rc.n.into(),
                rc.k.into(),
                rc.p.into(),
                v.into(),
                rc.mean().into(),
                (rc.n <= MAX_EXHAUSTIVE_N).into(),
                lhs(&r, "d_TV").into(),
                bound(&r, "d_TV").into(),
                lhs(&r, CHECK_UNIFORM).into(),
                bound(&r, CHECK_UNIFORM).into(),
                lhs(&r, CHECK_RUNS_ZERO).into(),
                bound(&r, CHECK_RUNS_ZERO).into(),
                lhs(&r, CHECK_SIZEBIAS_RUNS).into(),
                r.all_satisfied().into(),
            ]);
            reports.push(r);
        }
    }
    Ok(Outcome { table, reports, constants: None, notes: Vec::new() })
}

fn build_kernel(spec: &KernelSpec, d: usize) -> Result<Kernel> {
    Ok(match spec {
        KernelSpec::Region { upper } => Kernel::region(vec![0.0; d], upper.clone())?,
        KernelSpec::Distance { delta } => Kernel::distance_threshold(d, *delta)?,
    })
}

/// `int h` over the unit cube when it has a closed form: the box volume for
/// a region kernel, and the pair-distance distribution function for a
/// distance kernel with `delta <= 1`.
pub fn kernel_integral(spec: &KernelSpec, d: usize) -> Option<f64> {
    match spec {
        KernelSpec::Region { upper } => Some(upper.iter().product()),
        KernelSpec::Distance { delta } if *delta <= 1.0 => {
            let r = *delta;
            match d {
                1 => Some(2.0 * r - r * r),
                2 => Some(std::f64::consts::PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4)),
                _ => None,
            }
        }
        KernelSpec::Distance { .. } => None,
    }
}

fn law_of(values: impl IntoIterator<Item = u64>) -> Result<IntegerPmf> {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for s in values {
        *counts.entry(s).or_default() += 1;
    }
    Ok(empirical_from_counts(&counts)?)
}

#[allow(clippy::too_many_arguments)]
fn ustat(
    cfg: &ExperimentConfig,
    mut table: Table,
    spec: &KernelSpec,
    input: UStatInput,
    m: u64,
    v: u64,
    mc_samples: u64,
    sizebias_draws: u64,
) -> Result<Outcome> {
    let window = input.window().clone();
    let d = window.dim();
    let kernel = build_kernel(spec, d)?;
    let l = kernel.arity() as u64;
    let method = LambdaRMethod::MonteCarlo {
        samples: mc_samples,
        seed: SeedSpec::for_replication(cfg.master_seed, "ustat_lambda", 0),
    };
    let mut lr = match &input {
        UStatInput::Binomial { n, .. } => lambda_r_binomial(&kernel, *n, &window, method)?,
        UStatInput::Poisson { t, .. } => lambda_r_poisson(&kernel, *t, &window, method)?,
    };
    let mut notes = std::mem::take(&mut lr.warnings);
    if let Some(integral) = kernel_integral(spec, d) {
        let mass = match &input {
            UStatInput::Binomial { n, .. } => {
                (0..l).map(|j| (n - j) as f64).product::<f64>() / (1..=l).map(|j| j as f64).product::<f64>()
            }
            UStatInput::Poisson { t, .. } => t.powi(l as i32) / (1..=l).map(|j| j as f64).product::<f64>(),
        };
        notes.push(format!("lambda from closed form, Monte Carlo value {}", lr.lambda));
        lr.lambda = mass * integral;
        lr.lambda_se = 0.0;
    }
    if l == 1 {
        lr.r = 0.0;
        lr.r_se = 0.0;
    }
    let seed = cfg.master_seed;
    let (report, law) = match &input {
        UStatInput::Binomial { n, .. } => {
            let draws = replicate(cfg.reps, cfg.workers, |r| -> Result<(u64, u64)> {
                let mut rng = SeedSpec::for_replication(seed, "ustat_s", r).rng();
                let full = sample_binomial_with(*n, &window, &mut rng);
                let reduced = sample_binomial_with(n - 2 * l, &window, &mut rng);
                Ok((eval_ustat(&full, &kernel)?, eval_ustat(&reduced, &kernel)?))
            })?
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let law = law_of(draws.iter().map(|p| p.0))?;
            let stilde = law_of(draws.iter().map(|p| p.1))?;
            let us = UStatSpec { kernel: kernel.clone(), input: input.clone(), lambda_r: lr.clone() };
            (bounds_ustat_binomial(&us, &stilde, m, v)?, law)
        }
        UStatInput::Poisson { t, .. } => {
            let draws = replicate(cfg.reps, cfg.workers, |r| -> Result<u64> {
                let mut rng = SeedSpec::for_replication(seed, "ustat_s", r).rng();
                let eta = sample_poisson_with(&window, *t, &mut rng)?;
                Ok(eval_ustat(&eta, &kernel)?)
            })?
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let law = law_of(draws)?;
            let us = UStatSpec { kernel: kernel.clone(), input: input.clone(), lambda_r: lr.clone() };
            (bounds_ustat_poisson(&us, &law, m, v)?, law)
        }
    };
    let mut report = report;
    attach_estimates(&mut report, &law, lr.lambda, lr.lambda_se, v)?;
    let mut test = None;
    if sizebias_draws > 0 {
        let pairs = replicate(sizebias_draws, cfg.workers, |r| {
            let s = SeedSpec::for_replication(seed, "ustat_sizebias", r);
            match &input {
                UStatInput::Binomial { n, .. } => sample_sizebias_binomial(&kernel, *n, &window, s),
                UStatInput::Poisson { t, .. } => sample_sizebias_poisson(&kernel, *t, &window, s),
            }
        })?
        .into_iter()
        .collect::<chenstein::Result<Vec<_>>>()?;
        let tst = sizebias_chi_square(&pairs, lr.lambda, SIZEBIAS_MIN_COUNT)?;
        report.term("size-bias statistic", tst.statistic).term("size-bias p-value", tst.p_value);
        report.push(BoundCheck::new(CHECK_SIZEBIAS_TEST, 0.0).with_exact(SIZEBIAS_LEVEL - tst.p_value));
        test = Some(tst);
    }
    let po = PoissonLaw::new(lr.lambda)?;
    let reps = cfg.reps as f64;
    for k in 0..=law.max_value() {
        let pk = law.prob(k);
        table.push(vec![
            k.into(),
            pk.into(),
            (pk * (1.0 - pk) / reps).sqrt().into(),
            po.pmf(k).into(),
            law.cdf(k).into(),
            po.cdf(k).into(),
        ]);
    }
    let constants = json!({ "lambda_r": lr, "sizebias_test": test });
    report.notes.extend(notes.iter().cloned());
    Ok(Outcome { table, reports: vec![report], constants: Some(constants), notes })
}
