//! Rescaled interpoint distances of a Poisson process: the marks
//! `t^2 k_d |x - y|^d / 2` over pairs with midpoint in `W`, their Poisson
//! approximation and the exponential approximation of the minimum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::discrete_dist::{empirical_from_counts, tv_distance};
use crate::error::{domain, Error, Result};
use crate::grid::UniformGrid;
use crate::mc::{binomial_std_error, poisson_std_error, replicate, Estimate};
use crate::pointproc::{sample_poisson_with, BoxWindow, PointPattern, SeedSpec};
use crate::poisson_stein::PoissonLaw;
use crate::report::{BoundCheck, BoundReport};
use crate::unit_ball_volume;

pub const STREAM_TAG: &str = "interpoint";
pub const DEFAULT_U_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const MIN_REPS: u64 = 100;
pub const CHECK_SUP: &str = "sup|P(Y>u)-e^-u|";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpointConfig {
    pub d: usize,
    pub t: f64,
    pub window: BoxWindow,
    pub u_max: f64,
    pub reps: u64,
    pub seed: u64,
}

impl InterpointConfig {
    pub fn new(d: usize, t: f64, window: BoxWindow, u_max: f64, reps: u64, seed: u64) -> Result<Self> {
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
        if !(u_max > 0.0 && u_max < t) {
            return Err(domain(format!("u_max must satisfy 0 < u_max < t, got {u_max}")));
        }
        Ok(Self { d, t, window, u_max, reps, seed })
    }

    /// Unit-cube window.
    pub fn unit(d: usize, t: f64, u_max: f64, reps: u64, seed: u64) -> Result<Self> {
        Self::new(d, t, BoxWindow::unit_cube(d)?, u_max, reps, seed)
    }

    fn scale(&self) -> f64 {
        0.5 * self.t * self.t * unit_ball_volume(self.d)
    }

    /// Mark of the pair `(x, y)`.
    pub fn mark(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.scale() * d2.powf(self.d as f64 / 2.0)
    }

    /// Largest pair distance with mark at most `u_max`.
    pub fn max_distance(&self) -> f64 {
        (self.u_max / self.scale()).powf(1.0 / self.d as f64)
    }

    /// Buffer radius: half the largest qualifying pair distance.
    pub fn buffer(&self) -> f64 {
        0.5 * self.max_distance()
    }
}

/// Sorted marks at most `u_max` over unordered pairs of `pattern` with midpoint in the window.
pub fn marks_of_pattern(cfg: &InterpointConfig, pattern: &PointPattern) -> Result<Vec<f64>> {
    let d = cfg.d;
    let reach = cfg.max_distance();
    let sim = pattern.window();
    let grid = UniformGrid::new(pattern.coords(), d, sim.lower(), sim.upper(), reach)?;
    let mut marks = Vec::new();
    let mut mid = vec![0.0; d];
    for i in 0..pattern.len() {
        let x = pattern.point(i);
        grid.for_each_within(x, reach, |j, _| {
            if j <= i {
                return;
            }
            let y = pattern.point(j);
            for k in 0..d {
                mid[k] = 0.5 * (x[k] + y[k]);
            }
            if cfg.window.contains(&mid) {
                let m = cfg.mark(x, y);
                if m <= cfg.u_max {
                    marks.push(m);
                }
            }
        });
    }
    marks.sort_by(f64::total_cmp);
    Ok(marks)
}

/// Marks of replication `replication`, simulated on the window buffered by [`InterpointConfig::buffer`].
pub fn simulate_marks(cfg: &InterpointConfig, replication: u64) -> Result<Vec<f64>> {
    let sim = cfg.window.buffered(cfg.buffer())?;
    let mut rng = SeedSpec::for_replication(cfg.seed, STREAM_TAG, replication).rng();
    let pattern = sample_poisson_with(&sim, cfg.t, &mut rng)?;
    marks_of_pattern(cfg, &pattern)
}

/// Marks of every replication, in replication order.
pub fn simulate_all(cfg: &InterpointConfig, workers: usize) -> Result<Vec<Vec<f64>>> {
    replicate(cfg.reps, workers, |r| simulate_marks(cfg, r))?.into_iter().collect()
}

/// `P(Y_t > u)` estimated on `grid` from per-replication mark lists.
pub fn survival_curve(marks: &[Vec<f64>], grid: &[f64]) -> Result<Vec<(f64, Estimate)>> {
    let n = marks.len() as u64;
    if n < MIN_REPS {
        return Err(Error::InsufficientData { needed: MIN_REPS as usize, got: n as usize });
    }
    Ok(grid
        .iter()
        .map(|&u| {
            let alive = marks.iter().filter(|m| m.first().is_none_or(|&y| y > u)).count() as u64;
            (u, Estimate::proportion(alive, n))
        })
        .collect())
}

/// One row of the interpoint study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpointRow {
    pub u: f64,
    pub survival: f64,
    pub survival_se: f64,
    pub target: f64,
    pub sup_bound: f64,
    pub mean_count: f64,
    pub mean_count_se: f64,
    pub tv: f64,
    pub tv_se: f64,
    pub tv_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpointStudy {
    pub rows: Vec<InterpointRow>,
    pub report: BoundReport,
}

/// Default grid restricted to `(0, u_max]`.
pub fn default_grid(u_max: f64) -> Vec<f64> {
    DEFAULT_U_GRID.iter().copied().filter(|&u| u <= u_max).collect()
}

/// `(1 ^ u) 8u / t`.
pub fn tv_bound(t: f64, u: f64) -> f64 {
    u.min(1.0) * 8.0 * u / t
}

/// `81 / t`.
pub fn sup_bound(t: f64) -> f64 {
    81.0 / t
}

/// Evaluates every check of the interpoint theorem on already simulated marks.
pub fn study_from_marks(cfg: &InterpointConfig, marks: &[Vec<f64>], grid: &[f64]) -> Result<InterpointStudy> {
    if let Some(&u) = grid.iter().find(|&&u| !(u > 0.0 && u <= cfg.u_max)) {
        return Err(domain(format!("grid point {u} outside (0, u_max]")));
    }
    let survival = survival_curve(marks, grid)?;
    let mut report = BoundReport::new("interpoint");
    report.term("t", cfg.t).term("d", cfg.d as f64).term("reps", marks.len() as f64).term("buffer", cfg.buffer());
    let mut rows = Vec::with_capacity(grid.len());
    let mut sup = 0.0f64;
    let mut sup_se = 0.0f64;
    for &(u, surv) in &survival {
        let counts_u: Vec<u64> = marks.iter().map(|m| m.partition_point(|&y| y <= u) as u64).collect();
        let mean = Estimate::of(counts_u.iter().map(|&c| c as f64));
        let mut table: BTreeMap<u64, u64> = BTreeMap::new();
        for &c in &counts_u {
            *table.entry(c).or_default() += 1;
        }
        let law = empirical_from_counts(&table)?;
        let tv = tv_distance(&law, PoissonLaw::new(u)?);
        let tv_se = law.tv_std_error();
        let target = (-u).exp();
        let n = marks.len() as u64;
        let mean_se = mean.se_at_least(poisson_std_error(u, n));
        let surv_se = surv.se_at_least(binomial_std_error(target, n));
        let checks = [
            BoundCheck::new(format!("|E xi([0,u]) - u| @u={u}"), 0.0).with_estimate((mean.mean - u).abs(), 3.0 * mean_se),
            BoundCheck::new(format!("d_TV(xi([0,u]),Po(u)) @u={u}"), tv_bound(cfg.t, u)).with_estimate(tv, 3.0 * tv_se),
            BoundCheck::new(format!("e^-u - P(Y>u) @u={u}"), 0.0)
                .with_estimate(target - surv.mean, 3.0 * surv_se),
        ];
        let diff = (surv.mean - target).abs();
        if diff >= sup {
            sup = diff;
            sup_se = surv_se;
        }
        let pass = checks.iter().all(BoundCheck::passed) && diff <= sup_bound(cfg.t) + 3.0 * surv_se;
        rows.push(InterpointRow {
            u,
            survival: surv.mean,
            survival_se: surv.std_error,
            target,
            sup_bound: sup_bound(cfg.t),
            mean_count: mean.mean,
            mean_count_se: mean.std_error,
            tv,
            tv_se,
            tv_bound: tv_bound(cfg.t, u),
            pass,
        });
        for c in checks {
            report.push(c);
        }
    }
    report.push(BoundCheck::new(CHECK_SUP, sup_bound(cfg.t)).with_estimate(sup, 3.0 * sup_se));
    Ok(InterpointStudy { rows, report })
}

/// Simulates `cfg.reps` replications and evaluates the checks on `grid`.
pub fn check_interpoint_bounds(cfg: &InterpointConfig, grid: &[f64], workers: usize) -> Result<InterpointStudy> {
    let marks = simulate_all(cfg, workers)?;
    study_from_marks(cfg, &marks, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::Intensity;

    #[test]
    fn hand_mark() {
        let cfg = InterpointConfig::unit(1, 10.0, 5.0, 100, 1).unwrap();
        assert!((cfg.mark(&[0.4], &[0.5]) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(InterpointConfig::unit(1, 10.0, 10.0, 100, 1).is_err());
        let w = BoxWindow::new(vec![0.0], vec![2.0]).unwrap();
        assert!(InterpointConfig::new(1, 10.0, w, 1.0, 100, 1).is_err());
    }

    #[test]
    fn midpoint_rule() {
        let cfg = InterpointConfig::unit(1, 10.0, 8.0, 100, 1).unwrap();
        let sim = cfg.window.buffered(1.0).unwrap();
        let pp = |c: Vec<f64>| PointPattern::new(sim.clone(), c, Intensity::Poisson { t: 10.0 }).unwrap();
        // first pair has its midpoint outside W, second pair has mark 10
        assert!(marks_of_pattern(&cfg, &pp(vec![0.98, 1.04, 0.2, 0.3])).unwrap().is_empty());
        let m = marks_of_pattern(&cfg, &pp(vec![0.96, 1.01])).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m[0] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn survival_basics() {
        let marks = vec![vec![0.5], vec![]];
        assert!(survival_curve(&marks, &[0.0]).is_err());
        let marks: Vec<Vec<f64>> = (0..200).map(|i| if i % 2 == 0 { vec![0.5] } else { vec![] }).collect();
        let s = survival_curve(&marks, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s[0].1.mean, 1.0);
        assert_eq!(s[1].1.mean, 0.5);
        assert!(s[2].1.mean <= s[1].1.mean);
    }

    #[test]
    fn plug_ins() {
        assert!((sup_bound(100.0) - 0.81).abs() < 1e-15);
        assert!((tv_bound(50.0, 0.5) - 0.5 * 4.0 / 50.0).abs() < 1e-15);
    }
}
