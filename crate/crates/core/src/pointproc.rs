//! Seeded sampling of Poisson and binomial point processes on axis-aligned boxes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Random stream used by all samplers.
pub type StreamRng = ChaCha12Rng;

/// Axis-aligned box `prod_j [lower_j, upper_j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxWindow {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxWindow {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(domain("box corners must be non-empty and of equal dimension"));
        }
        for (j, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(domain(format!("degenerate box side {j}: [{a}, {b}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[0, 1]^d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d], vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.side(j)).product()
    }

    /// Half-open membership `lower <= x < upper`.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (a, b))| *a <= *v && *v < *b)
    }

    /// The box enlarged by `rho` in every coordinate direction.
    pub fn buffered(&self, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(domain(format!("buffer radius must be non-negative, got {rho}")));
        }
        Self::new(
            self.lower.iter().map(|a| a - rho).collect(),
            self.upper.iter().map(|b| b + rho).collect(),
        )
    }
}

/// Free-function form of [`BoxWindow::buffered`].
pub fn buffered_box(w: &BoxWindow, rho: f64) -> Result<BoxWindow> {
    w.buffered(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Intensity {
    Poisson { t: f64 },
    Binomial { n: u64 },
}

/// Finite set of points in a box, stored as a flat coordinate array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    window: BoxWindow,
    coords: Vec<f64>,
    intensity: Intensity,
}

impl PointPattern {
    pub fn new(window: BoxWindow, coords: Vec<f64>, intensity: Intensity) -> Result<Self> {
        let d = window.dim();
        if coords.len() % d != 0 {
            return Err(domain("coordinate count is not a multiple of the dimension"));
        }
        if let Some(p) = coords.chunks_exact(d).find(|p| !window.contains(p)) {
            return Err(domain(format!("point {p:?} outside the generating box")));
        }
        Ok(Self { window, coords, intensity })
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn window(&self) -> &BoxWindow {
        &self.window
    }

    pub fn intensity(&self) -> Intensity {
        self.intensity
    }

    /// One point per row, columns `x0, x1, ...`.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
        let mut out = header.join(",");
        out.push('\n');
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Parses the output of [`PointPattern::to_csv`] for a given window.
    pub fn from_csv(text: &str, window: BoxWindow, intensity: Intensity) -> Result<Self> {
        let d = window.dim();
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        if header.split(',').count() != d {
            return Err(Error::Parse { line: 1, message: format!("expected {d} columns") });
        }
        let mut coords = Vec::new();
        for (i, line) in lines {
            let row: Vec<&str> = line.split(',').collect();
            if row.len() != d {
                return Err(Error::Parse { line: i + 1, message: format!("expected {d} columns") });
            }
            for v in row {
                let x: f64 = v.trim().parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("invalid coordinate '{v}'"),
                })?;
                coords.push(x);
            }
        }
        Self::new(window, coords, intensity)
    }
}

/// Master seed plus stream identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Stream identifier of replication `rep` of the experiment named `tag`.
pub fn stream_id(tag: &str, rep: u64) -> u64 {
    splitmix64(fnv1a(tag) ^ splitmix64(rep))
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    pub fn for_replication(master_seed: u64, tag: &str, rep: u64) -> Self {
        Self::new(master_seed, stream_id(tag, rep))
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn uniform_point(window: &BoxWindow, rng: &mut impl Rng, out: &mut Vec<f64>) {
    for j in 0..window.dim() {
        let u: f64 = rng.random();
        let mut x = window.lower[j] + u * window.side(j);
        if x >= window.upper[j] {
            x = window.lower[j];
        }
        out.push(x);
    }
}

/// Poisson process of intensity `t` times Lebesgue measure on `window`, drawn from `rng`.
pub fn sample_poisson_with(window: &BoxWindow, t: f64, rng: &mut impl Rng) -> Result<PointPattern> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("intensity must be non-negative, got {t}")));
    }
    let mean = t * window.volume();
    let n = if mean == 0.0 {
        0
    } else {
        let dist = Poisson::new(mean).map_err(|e| domain(e.to_string()))?;
        dist.sample(rng) as usize
    };
    let mut coords = Vec::with_capacity(n * window.dim());
    for _ in 0..n {
        uniform_point(window, rng, &mut coords);
    }
    Ok(PointPattern { window: window.clone(), coords, intensity: Intensity::Poisson { t } })
}

/// `n` i.i.d. uniform points on `window`, drawn from `rng`.
pub fn sample_binomial_with(n: u64, window: &BoxWindow, rng: &mut impl Rng) -> PointPattern {
    let mut coords = Vec::with_capacity(n as usize * window.dim());
    for _ in 0..n {
        uniform_point(window, rng, &mut coords);
    }
    PointPattern { window: window.clone(), coords, intensity: Intensity::Binomial { n } }
}

pub fn sample_poisson(window: &BoxWindow, t: f64, seed: SeedSpec) -> Result<PointPattern> {
    sample_poisson_with(window, t, &mut seed.rng())
}

pub fn sample_binomial(n: u64, window: &BoxWindow, seed: SeedSpec) -> PointPattern {
    sample_binomial_with(n, window, &mut seed.rng())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_validation_and_buffer() {
        assert!(BoxWindow::new(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        let b = BoxWindow::unit_cube(2).unwrap();
        assert_eq!(b.buffered(0.0).unwrap(), b);
        let bb = b.buffered(0.5).unwrap();
        assert_eq!(bb.lower(), &[-0.5, -0.5]);
        assert_eq!(bb.upper(), &[1.5, 1.5]);
        assert_eq!(BoxWindow::unit_cube(1).unwrap().buffered(1.0).unwrap().volume(), 3.0);
        assert!(b.buffered(-1.0).is_err());
    }

    #[test]
    fn sampler_basics() {
        let b = BoxWindow::unit_cube(2).unwrap();
        assert!(sample_poisson(&b, 0.0, SeedSpec::new(1, 2)).unwrap().is_empty());
        assert!(sample_binomial(0, &b, SeedSpec::new(1, 2)).is_empty());
        assert_eq!(sample_binomial(3, &b, SeedSpec::new(1, 2)).len(), 3);
        let a = sample_poisson(&b, 50.0, SeedSpec::new(7, 9)).unwrap();
        let c = sample_poisson(&b, 50.0, SeedSpec::new(7, 9)).unwrap();
        assert_eq!(a, c);
        assert!(a.points().all(|p| b.contains(p)));
        let other = sample_poisson(&b, 50.0, SeedSpec::new(7, 10)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn csv_round_trip() {
        let b = BoxWindow::unit_cube(2).unwrap();
        let p = sample_binomial(5, &b, SeedSpec::new(3, 4));
        let back = PointPattern::from_csv(&p.to_csv(), b, p.intensity()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn stream_ids_differ() {
        assert_ne!(stream_id("a", 0), stream_id("a", 1));
        assert_ne!(stream_id("a", 0), stream_id("b", 0));
    }
}
