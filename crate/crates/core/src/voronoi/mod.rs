//! Extremes of Poisson-Voronoi tessellations: the minimal circumscribed
//! radius (Weibull limit, `d <= 2`) and the maximal inradius (Gumbel limit).

mod cell;
mod sim;

pub use cell::{cell_polygon_2d, circumradius_1d, circumradius_2d, directions_cover, inradius_stat, inradius_transform};
pub use sim::{
    circum_study, gumbel_grid, inradius_study, simulate_circum, simulate_circum_reps, simulate_inradius,
    simulate_inradius_reps, weibull_grid, CircumRep, CircumRow, CircumStudy, InradiusRep, InradiusRow,
    InradiusStudy, VoronoiConfig, MAX_BUFFER_FRACTION,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::mc::{replicate, Estimate};
use crate::pointproc::SeedSpec;
use crate::unit_ball_volume;

pub const P_STREAM_TAG: &str = "voronoi_p";
/// Trials per random stream in [`estimate_p`].
pub const P_CHUNK: u64 = 10_000;
pub const MIN_P_REPS: u64 = 10_000;

/// Monte Carlo estimate of `p_{d+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Three standard errors.
    pub ci_halfwidth: f64,
    pub reps: u64,
}

fn uniform_in_ball2(rng: &mut impl Rng) -> [f64; 2] {
    let r = 2.0 * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    [r * th.cos(), r * th.sin()]
}

fn p_trial(d: usize, rng: &mut impl Rng) -> bool {
    match d {
        1 => {
            let ys = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            circumradius_1d(0.0, &ys) < 1.0
        }
        _ => {
            let ys = [uniform_in_ball2(rng), uniform_in_ball2(rng), uniform_in_ball2(rng)];
            circumradius_2d([0.0, 0.0], &ys) < 1.0
        }
    }
}

/// Fraction of trials in which the cell of the origin with respect to `d + 1`
/// uniform points in `B(0, 2)` lies in `B(0, 1)`.
pub fn estimate_p(d: usize, reps: u64, seed: u64, workers: usize) -> Result<PEstimate> {
    if d == 0 || d > 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if reps < MIN_P_REPS {
        return Err(Error::InsufficientData { needed: MIN_P_REPS as usize, got: reps as usize });
    }
    let chunks = reps.div_ceil(P_CHUNK);
    let hits: Vec<u64> = replicate(chunks, workers, |c| {
        let mut rng = SeedSpec::for_replication(seed, &format!("{P_STREAM_TAG}{d}"), c).rng();
        let n = P_CHUNK.min(reps - c * P_CHUNK);
        (0..n).filter(|_| p_trial(d, &mut rng)).count() as u64
    })?;
    let e = Estimate::proportion(hits.iter().sum(), reps);
    Ok(PEstimate { estimate: e.mean, std_error: e.std_error, ci_halfwidth: 3.0 * e.std_error, reps })
}

/// `(2^{d(d+1)} p / (d+1)!)^{1/(d+1)}`.
pub fn alpha2(d: usize, p_succ: f64) -> Result<f64> {
    if !(p_succ > 0.0 && p_succ <= 1.0) {
        return Err(domain(format!("p must lie in (0, 1], got {p_succ}")));
    }
    let fact: f64 = (1..=d + 1).map(|k| k as f64).product();
    Ok((2f64.powi((d * (d + 1)) as i32) * p_succ / fact).powf(1.0 / (d + 1) as f64))
}

/// `3 * 2^{d(d+3)} / (alpha2 p)`.
pub fn c_tv(d: usize, alpha2: f64, p: f64) -> f64 {
    3.0 * 2f64.powi((d * (d + 3)) as i32) / (alpha2 * p)
}

/// `1 + 2^{d(d+3)+4} / (alpha2 p) + 2^{2d+3} / alpha2 + 16^d / alpha2^2`.
pub fn c_k(d: usize, alpha2: f64, p: f64) -> f64 {
    1.0 + 2f64.powi((d * (d + 3) + 4) as i32) / (alpha2 * p)
        + 2f64.powi((2 * d + 3) as i32) / alpha2
        + 16f64.powi(d as i32) / (alpha2 * alpha2)
}

/// `2^{d+2} (4^d + 2^d + 2) + 1`.
pub fn c_gumbel(d: usize) -> f64 {
    2f64.powi(d as i32 + 2) * (4f64.powi(d as i32) + 2f64.powi(d as i32) + 2.0) + 1.0
}

/// Constants of both Voronoi theorems. Bound constants use the pessimistic
/// end `p - ci_halfwidth` of the interval for `p_{d+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiConstants {
    pub d: usize,
    pub p_succ: f64,
    pub p_std_error: f64,
    pub p_ci_halfwidth: f64,
    pub p_bound: f64,
    pub alpha2: f64,
    pub alpha2_bound: f64,
    pub c_tv: f64,
    pub c_k: f64,
    pub c_gumbel: f64,
}

impl VoronoiConstants {
    pub fn from_p(d: usize, p_succ: f64, p_std_error: f64) -> Result<Self> {
        let ci = 3.0 * p_std_error;
        let p_bound = (p_succ - ci).max(p_succ * 1e-3);
        let alpha2_hat = alpha2(d, p_succ)?;
        let alpha2_bound = alpha2(d, p_bound)?;
        Ok(Self {
            d,
            p_succ,
            p_std_error,
            p_ci_halfwidth: ci,
            p_bound,
            alpha2: alpha2_hat,
            alpha2_bound,
            c_tv: c_tv(d, alpha2_bound, p_bound),
            c_k: c_k(d, alpha2_bound, p_bound),
            c_gumbel: c_gumbel(d),
        })
    }

    pub fn from_estimate(d: usize, p: &PEstimate) -> Result<Self> {
        Self::from_p(d, p.estimate, p.std_error)
    }
}

/// `s_t = alpha2 k_d t^{(d+2)/(d+1)}`.
pub fn s_t(d: usize, t: f64, alpha2: f64) -> f64 {
    alpha2 * unit_ball_volume(d) * t.powf((d + 2) as f64 / (d + 1) as f64)
}

/// `u^{d+1} exp(-4^d u / (alpha2 t^{1/(d+1)}))`.
pub fn mhat(d: usize, t: f64, u: f64, alpha2: f64) -> f64 {
    let root = t.powf(1.0 / (d + 1) as f64);
    u.powi(d as i32 + 1) * (-(4f64.powi(d as i32)) * u / (alpha2 * root)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhatTheta {
    pub mhat: f64,
    pub theta_bound: f64,
    pub m_cap: f64,
}

/// Closed form of `M_hat_t([0,u])` with the bounds on `theta_t([0,u])` and
/// `M_t([0,u])`, at the pessimistic constants.
pub fn mhat_theta(d: usize, t: f64, u: f64, c: &VoronoiConstants) -> Result<MhatTheta> {
    if t < 1.0 {
        return Err(crate::error::precondition(format!("t must be at least 1, got {t}")));
    }
    if !(u > 0.0) {
        return Err(domain(format!("u must be positive, got {u}")));
    }
    let root = t.powf(1.0 / (d + 1) as f64);
    Ok(MhatTheta {
        mhat: mhat(d, t, u, c.alpha2_bound),
        theta_bound: 2f64.powi((d * (d + 3)) as i32) * u.powi(d as i32 + 2) / (c.alpha2_bound * c.p_bound * root),
        m_cap: u.powi(d as i32 + 1) / c.p_bound,
    })
}

/// `v_t(u) = ((u + log t) / (t k_d))^{1/d}`.
pub fn v_t(d: usize, t: f64, u: f64) -> f64 {
    ((u + t.ln()) / (t * unit_ball_volume(d))).powf(1.0 / d as f64)
}

/// `2^d (u + log t) / (e^{u/2} sqrt t) + (u + log t) / (e^u t)`.
pub fn inradius_tv_bound(d: usize, t: f64, u: f64) -> f64 {
    let a = u + t.ln();
    2f64.powi(d as i32) * a / ((u / 2.0).exp() * t.sqrt()) + a / (u.exp() * t)
}

/// `c_gumbel(d) log t / sqrt t`.
pub fn gumbel_bound(d: usize, t: f64) -> f64 {
    c_gumbel(d) * t.ln() / t.sqrt()
}
