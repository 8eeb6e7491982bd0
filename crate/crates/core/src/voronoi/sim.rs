//! Simulation of the circumradius and inradius extremes on a buffered window.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cell::{circumradius_1d, circumradius_2d, inradius_transform};
use super::{c_gumbel, gumbel_bound, inradius_tv_bound, mhat, mhat_theta, s_t, v_t, VoronoiConstants};
use crate::discrete_dist::{empirical_from_counts, tv_distance};
use crate::error::{domain, precondition, Error, Result};
use crate::grid::UniformGrid;
use crate::mc::{binomial_std_error, poisson_std_error, replicate, Estimate};
use crate::pointproc::{sample_poisson_with, BoxWindow, PointPattern, SeedSpec};
use crate::poisson_stein::PoissonLaw;
use crate::report::{BoundCheck, BoundReport};

/// Largest buffer allowed, as a fraction of the shortest window side.
pub const MAX_BUFFER_FRACTION: f64 = 0.2;
pub const CIRCUM_TAG: &str = "voronoi_circ";
pub const INRADIUS_TAG: &str = "voronoi_inradius";
const INRADIUS_SAFETY: f64 = 1.05;
const CIRCUM_BUFFER: f64 = 6.0;
/// Lower and upper target-CDF levels spanned by the default grids.
const GRID_LEVELS: (f64, f64) = (0.001, 0.999);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiConfig {
    pub d: usize,
    pub t: f64,
    pub window: BoxWindow,
    pub u_grid: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
}

impl VoronoiConfig {
    pub fn new(d: usize, t: f64, window: BoxWindow, u_grid: Vec<f64>, reps: u64, seed: u64) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        if window.dim() != d {
            return Err(domain(format!("window has dimension {}, expected {d}", window.dim())));
        }
        if (window.volume() - 1.0).abs() > 1e-12 {
            return Err(domain(format!("window volume must be 1, got {}", window.volume())));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(domain(format!("intensity must be positive, got {t}")));
        }
        if u_grid.is_empty() || u_grid.iter().any(|u| !u.is_finite()) {
            return Err(domain("u grid must be a non-empty list of finite values"));
        }
        if reps == 0 {
            return Err(domain("at least one replication is needed"));
        }
        Ok(Self { d, t, window, u_grid, reps, seed })
    }

    pub fn unit(d: usize, t: f64, u_grid: Vec<f64>, reps: u64, seed: u64) -> Result<Self> {
        Self::new(d, t, BoxWindow::unit_cube(d)?, u_grid, reps, seed)
    }

    fn min_side(&self) -> f64 {
        (0..self.d).map(|j| self.window.side(j)).fold(f64::INFINITY, f64::min)
    }
}

fn levels(n: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = GRID_LEVELS;
    (0..n).map(move |i| if n == 1 { 0.5 } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// `n` points where the Weibull(shape d+1) CDF runs from 0.001 to 0.999.
pub fn weibull_grid(d: usize, n: usize) -> Vec<f64> {
    levels(n).map(|q| (-(1.0 - q).ln()).powf(1.0 / (d + 1) as f64)).collect()
}

/// `n` points where the standard Gumbel CDF runs from 0.001 to 0.999.
pub fn gumbel_grid(n: usize) -> Vec<f64> {
    levels(n).map(|q| -(-q.ln()).ln()).collect()
}

fn rep_pattern(cfg: &VoronoiConfig, tag: &str, buffer: f64, rep: u64) -> Result<PointPattern> {
    let sim = cfg.window.buffered(buffer)?;
    let mut rng = SeedSpec::for_replication(cfg.seed, tag, rep).rng();
    sample_poisson_with(&sim, cfg.t, &mut rng)
}

// ---------------------------------------------------------------- circumradius

/// Per-replication summary of the circumradius marks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircumRep {
    /// `T_t`, or infinity when no mark falls in the grid range.
    pub min_mark: f64,
    /// `xi_t([0,u])` per grid point.
    pub below: Vec<u32>,
    /// Marks at most `u` whose nucleus has exactly `d + 1` other points in `B(x, 4(u/s_t)^{1/d})`.
    pub hat: Vec<u32>,
}

fn circum_grid(cfg: &VoronoiConfig, s: f64, notes: &mut Vec<String>) -> Result<Vec<f64>> {
    let cap = MAX_BUFFER_FRACTION * cfg.min_side();
    let mut grid = Vec::new();
    for &u in &cfg.u_grid {
        if u <= 0.0 {
            return Err(domain(format!("circumradius grid points must be positive, got {u}")));
        }
        if CIRCUM_BUFFER * (u / s).powf(1.0 / cfg.d as f64) <= cap {
            grid.push(u);
        } else {
            notes.push(format!("grid point u={u} dropped: buffer would exceed {MAX_BUFFER_FRACTION} of the window side"));
        }
    }
    if grid.is_empty() {
        return Err(domain("no grid point keeps the buffer within the window cap"));
    }
    Ok(grid)
}

fn circum_rep(cfg: &VoronoiConfig, s: f64, grid: &[f64], rep: u64) -> Result<CircumRep> {
    let d = cfg.d;
    let u_max = grid.iter().copied().fold(0.0, f64::max);
    let r_max = (u_max / s).powf(1.0 / d as f64);
    let pattern = rep_pattern(cfg, CIRCUM_TAG, CIRCUM_BUFFER * r_max, rep)?;
    let sim = pattern.window();
    let index = UniformGrid::new(pattern.coords(), d, sim.lower(), sim.upper(), 2.0 * r_max)?;
    let hat_r2: Vec<f64> = grid.iter().map(|&u| (4.0 * (u / s).powf(1.0 / d as f64)).powi(2)).collect();
    let mut out = CircumRep { min_mark: f64::INFINITY, below: vec![0; grid.len()], hat: vec![0; grid.len()] };
    let mut near: Vec<f64> = Vec::new();
    for i in 0..pattern.len() {
        let x = pattern.point(i);
        if !cfg.window.contains(x) {
            continue;
        }
        near.clear();
        index.for_each_within(x, 2.0 * r_max, |j, _| {
            if j != i {
                near.extend_from_slice(pattern.point(j));
            }
        });
        let c = match d {
            1 => circumradius_1d(x[0], &near),
            _ => {
                let nb: Vec<[f64; 2]> = near.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
                circumradius_2d([x[0], x[1]], &nb)
            }
        };
        if c > r_max {
            continue;
        }
        let mark = s * c.powi(d as i32);
        out.min_mark = out.min_mark.min(mark);
        let mut d2s = Vec::new();
        index.for_each_within(x, 4.0 * r_max, |j, d2| {
            if j != i {
                d2s.push(d2);
            }
        });
        for (g, &u) in grid.iter().enumerate() {
            if mark <= u {
                out.below[g] += 1;
                if d2s.iter().filter(|&&d2| d2 < hat_r2[g]).count() == d + 1 {
                    out.hat[g] += 1;
                }
            }
        }
    }
    Ok(out)
}

fn check_circum(cfg: &VoronoiConfig, c: &VoronoiConstants) -> Result<()> {
    if cfg.d > 2 {
        return Err(Error::UnsupportedDimension(cfg.d));
    }
    if c.d != cfg.d {
        return Err(domain(format!("constants are for d = {}, config has d = {}", c.d, cfg.d)));
    }
    if cfg.t < 1.0 {
        return Err(precondition(format!("t must be at least 1, got {}", cfg.t)));
    }
    Ok(())
}

/// Simulates every replication; returns the grid actually used, the
/// replications in order and any notes about dropped grid points.
pub fn simulate_circum_reps(
    cfg: &VoronoiConfig,
    c: &VoronoiConstants,
    workers: usize,
) -> Result<(Vec<f64>, Vec<CircumRep>, Vec<String>)> {
    check_circum(cfg, c)?;
    let s = s_t(cfg.d, cfg.t, c.alpha2);
    let mut notes = Vec::new();
    let grid = circum_grid(cfg, s, &mut notes)?;
    let reps: Result<Vec<CircumRep>> =
        replicate(cfg.reps, workers, |r| circum_rep(cfg, s, &grid, r))?.into_iter().collect();
    Ok((grid, reps?, notes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircumRow {
    pub u: f64,
    pub survival: f64,
    pub survival_se: f64,
    pub weibull_survival: f64,
    /// `exp(-M_hat_t([0,u]))`.
    pub survival_bound: f64,
    pub mean_count: f64,
    pub mean_count_se: f64,
    pub m_cap: f64,
    pub mhat: f64,
    pub mhat_rate: f64,
    pub mhat_rate_se: f64,
    pub tv: f64,
    pub tv_se: f64,
    pub tv_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircumStudy {
    pub rows: Vec<CircumRow>,
    pub kolmogorov: f64,
    pub kolmogorov_bound: f64,
    pub report: BoundReport,
}

fn count_law(counts: impl Iterator<Item = u32>) -> Result<crate::discrete_dist::IntegerPmf> {
    let mut table: BTreeMap<u64, u64> = BTreeMap::new();
    for c in counts {
        *table.entry(u64::from(c)).or_default() += 1;
    }
    empirical_from_counts(&table)
}

/// Evaluates the circumradius checks on simulated replications.
pub fn circum_study(
    cfg: &VoronoiConfig,
    c: &VoronoiConstants,
    grid: &[f64],
    reps: &[CircumRep],
    notes: Vec<String>,
) -> Result<CircumStudy> {
    let d = cfg.d;
    let n = reps.len() as u64;
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let root = cfg.t.powf(1.0 / (d + 1) as f64);
    let mut report = BoundReport::new("voronoi-circumradius");
    report
        .term("d", d as f64)
        .term("t", cfg.t)
        .term("reps", n as f64)
        .term("p", c.p_succ)
        .term("p_bound", c.p_bound)
        .term("alpha2", c.alpha2)
        .term("C_TV", c.c_tv)
        .term("C_K", c.c_k)
        .term("s_t", s_t(d, cfg.t, c.alpha2));
    report.notes = notes;
    let mut rows = Vec::with_capacity(grid.len());
    let mut ks = 0.0f64;
    let mut ks_se = 0.0f64;
    for (g, &u) in grid.iter().enumerate() {
        let alive = reps.iter().filter(|r| r.min_mark > u).count() as u64;
        let surv = Estimate::proportion(alive, n);
        let weib = (-u.powi(d as i32 + 1)).exp();
        let diff = (surv.mean - weib).abs();
        if diff >= ks {
            ks = diff;
            ks_se = surv.se_at_least(binomial_std_error(weib, n));
        }
        let mt = mhat_theta(d, cfg.t, u, c)?;
        let mean = Estimate::of(reps.iter().map(|r| f64::from(r.below[g])));
        let rate = Estimate::of(reps.iter().map(|r| f64::from(r.hat[g])));
        let mhat_hat = mhat(d, cfg.t, u, c.alpha2);
        let law = count_law(reps.iter().map(|r| r.below[g]))?;
        let tv = tv_distance(&law, PoissonLaw::new(u.powi(d as i32 + 1))?);
        let tv_se = law.tv_std_error();
        let tv_bound = c.c_tv * u.powi(d as i32 + 2) / root;
        let p_rel = if c.p_succ > 0.0 { 3.0 * c.p_std_error / c.p_succ } else { 0.0 };
        let checks = [
            BoundCheck::new(format!("P(T>u) @u={u}"), (-mt.mhat).exp())
                .with_estimate(surv.mean, 3.0 * surv.se_at_least(binomial_std_error((-mt.mhat).exp(), n))),
            BoundCheck::new(format!("E xi([0,u]) @u={u}"), mt.m_cap)
                .with_estimate(mean.mean, 3.0 * mean.se_at_least(poisson_std_error(mt.m_cap, n))),
            BoundCheck::new(format!("d_TV(xi([0,u]),Po(u^(d+1))) @u={u}"), tv_bound).with_estimate(tv, 3.0 * tv_se),
            BoundCheck::new(format!("|Mhat rate - Mhat| @u={u}"), 0.0)
                .with_estimate((rate.mean - mhat_hat).abs(), 3.0 * rate.std_error + mhat_hat * p_rel),
        ];
        rows.push(CircumRow {
            u,
            survival: surv.mean,
            survival_se: surv.std_error,
            weibull_survival: weib,
            survival_bound: (-mt.mhat).exp(),
            mean_count: mean.mean,
            mean_count_se: mean.std_error,
            m_cap: mt.m_cap,
            mhat: mhat_hat,
            mhat_rate: rate.mean,
            mhat_rate_se: rate.std_error,
            tv,
            tv_se,
            tv_bound,
            pass: checks.iter().all(BoundCheck::passed),
        });
        for ch in checks {
            report.push(ch);
        }
    }
    let kolmogorov_bound = c.c_k / root;
    report.push(BoundCheck::new("d_K(T,Weibull)", kolmogorov_bound).with_estimate(ks, 3.0 * ks_se));
    Ok(CircumStudy { rows, kolmogorov: ks, kolmogorov_bound, report })
}

pub fn simulate_circum(cfg: &VoronoiConfig, c: &VoronoiConstants, workers: usize) -> Result<CircumStudy> {
    let (grid, reps, notes) = simulate_circum_reps(cfg, c, workers)?;
    circum_study(cfg, c, &grid, &reps, notes)
}

// ---------------------------------------------------------------- inradius

/// Per-replication summary of the inradius marks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InradiusRep {
    /// `T_t`: infinite when some nucleus exceeds the grid range, `-inf` when `W` holds no point.
    pub max_h: f64,
    /// `xi_t((u, inf))` per grid point.
    pub above: Vec<u32>,
}

fn inradius_grid(cfg: &VoronoiConfig, notes: &mut Vec<String>) -> Result<Vec<f64>> {
    if cfg.t <= std::f64::consts::E.powi(2) {
        return Err(precondition(format!("t must exceed e^2, got {}", cfg.t)));
    }
    let floor = -cfg.t.ln();
    if let Some(&u) = cfg.u_grid.iter().find(|&&u| u <= floor) {
        return Err(domain(format!("grid point {u} must exceed -log t = {floor}")));
    }
    let cap = MAX_BUFFER_FRACTION * cfg.min_side();
    let mut grid = Vec::new();
    for &u in &cfg.u_grid {
        if INRADIUS_SAFETY * v_t(cfg.d, cfg.t, u) <= cap {
            grid.push(u);
        } else {
            notes.push(format!("grid point u={u} dropped: buffer would exceed {MAX_BUFFER_FRACTION} of the window side"));
        }
    }
    if grid.is_empty() {
        return Err(domain("no grid point keeps the buffer within the window cap"));
    }
    Ok(grid)
}

fn inradius_rep(cfg: &VoronoiConfig, grid: &[f64], rep: u64) -> Result<InradiusRep> {
    let d = cfg.d;
    let u_cap = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reach = v_t(d, cfg.t, u_cap);
    let pattern = rep_pattern(cfg, INRADIUS_TAG, INRADIUS_SAFETY * reach, rep)?;
    let sim = pattern.window();
    let spacing = cfg.t.powf(-1.0 / d as f64);
    let index = UniformGrid::new(pattern.coords(), d, sim.lower(), sim.upper(), spacing)?;
    let mut out = InradiusRep { max_h: f64::NEG_INFINITY, above: vec![0; grid.len()] };
    for i in 0..pattern.len() {
        let x = pattern.point(i);
        if !cfg.window.contains(x) {
            continue;
        }
        let h = match index.nearest(x, Some(i), reach) {
            Some((_, r)) => inradius_transform(d, cfg.t, r),
            None => f64::INFINITY,
        };
        out.max_h = out.max_h.max(h);
        for (g, &u) in grid.iter().enumerate() {
            if h > u {
                out.above[g] += 1;
            }
        }
    }
    Ok(out)
}

pub fn simulate_inradius_reps(cfg: &VoronoiConfig, workers: usize) -> Result<(Vec<f64>, Vec<InradiusRep>, Vec<String>)> {
    let mut notes = Vec::new();
    let grid = inradius_grid(cfg, &mut notes)?;
    let reps: Result<Vec<InradiusRep>> =
        replicate(cfg.reps, workers, |r| inradius_rep(cfg, &grid, r))?.into_iter().collect();
    Ok((grid, reps?, notes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InradiusRow {
    pub u: f64,
    pub cdf: f64,
    pub cdf_se: f64,
    pub gumbel_cdf: f64,
    pub kolmogorov_bound: f64,
    pub mean_count: f64,
    pub mean_count_se: f64,
    pub target_count: f64,
    pub tv: f64,
    pub tv_se: f64,
    pub tv_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InradiusStudy {
    pub rows: Vec<InradiusRow>,
    pub kolmogorov: f64,
    pub kolmogorov_se: f64,
    pub kolmogorov_bound: f64,
    pub report: BoundReport,
}

pub fn inradius_study(cfg: &VoronoiConfig, grid: &[f64], reps: &[InradiusRep], notes: Vec<String>) -> Result<InradiusStudy> {
    let d = cfg.d;
    let n = reps.len() as u64;
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let ks_bound = gumbel_bound(d, cfg.t);
    let mut report = BoundReport::new("voronoi-inradius");
    report
        .term("d", d as f64)
        .term("t", cfg.t)
        .term("reps", n as f64)
        .term("c_gumbel", c_gumbel(d))
        .term("bound_K", ks_bound);
    report.notes = notes;
    let mut rows = Vec::with_capacity(grid.len());
    let mut ks = 0.0f64;
    let mut ks_se = 0.0f64;
    for (g, &u) in grid.iter().enumerate() {
        let below = reps.iter().filter(|r| r.max_h <= u).count() as u64;
        let cdf = Estimate::proportion(below, n);
        let gumbel = (-(-u).exp()).exp();
        let diff = (cdf.mean - gumbel).abs();
        if diff >= ks {
            ks = diff;
            ks_se = cdf.se_at_least(binomial_std_error(gumbel, n));
        }
        let target = (-u).exp();
        let mean = Estimate::of(reps.iter().map(|r| f64::from(r.above[g])));
        let law = count_law(reps.iter().map(|r| r.above[g]))?;
        let tv = tv_distance(&law, PoissonLaw::new(target)?);
        let tv_se = law.tv_std_error();
        let tv_bound = inradius_tv_bound(d, cfg.t, u);
        let checks = [
            BoundCheck::new(format!("|E xi((u,inf)) - e^-u| @u={u}"), 0.0)
                .with_estimate((mean.mean - target).abs(), 3.0 * mean.se_at_least(poisson_std_error(target, n))),
            BoundCheck::new(format!("d_TV(xi((u,inf)),Po(e^-u)) @u={u}"), tv_bound).with_estimate(tv, 3.0 * tv_se),
        ];
        rows.push(InradiusRow {
            u,
            cdf: cdf.mean,
            cdf_se: cdf.std_error,
            gumbel_cdf: gumbel,
            kolmogorov_bound: ks_bound,
            mean_count: mean.mean,
            mean_count_se: mean.std_error,
            target_count: target,
            tv,
            tv_se,
            tv_bound,
            pass: checks.iter().all(BoundCheck::passed),
        });
        for ch in checks {
            report.push(ch);
        }
    }
    report.push(BoundCheck::new("d_K(T,Gumbel)", ks_bound).with_estimate(ks, 3.0 * ks_se));
    Ok(InradiusStudy { rows, kolmogorov: ks, kolmogorov_se: ks_se, kolmogorov_bound: ks_bound, report })
}

pub fn simulate_inradius(cfg: &VoronoiConfig, workers: usize) -> Result<InradiusStudy> {
    let (grid, reps, notes) = simulate_inradius_reps(cfg, workers)?;
    inradius_study(cfg, &grid, &reps, notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_span_targets() {
        let g = gumbel_grid(50);
        assert_eq!(g.len(), 50);
        assert!(((-(-g[0]).exp()).exp() - 0.001).abs() < 1e-12);
        let w = weibull_grid(1, 10);
        assert!((1.0 - (-w[9] * w[9]).exp() - 0.999).abs() < 1e-12);
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn inradius_preconditions() {
        let cfg = VoronoiConfig::unit(1, 5.0, vec![0.0], 10, 1).unwrap();
        assert!(matches!(simulate_inradius(&cfg, 1), Err(Error::Precondition(_))));
        let cfg = VoronoiConfig::unit(1, 100.0, vec![-10.0], 10, 1).unwrap();
        assert!(matches!(simulate_inradius(&cfg, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn circum_rejects_three_dims() {
        let cfg = VoronoiConfig::unit(3, 100.0, vec![1.0], 10, 1).unwrap();
        let c = VoronoiConstants::from_p(3, 0.1, 0.0).unwrap();
        assert!(matches!(simulate_circum(&cfg, &c, 1), Err(Error::UnsupportedDimension(3))));
    }
}
