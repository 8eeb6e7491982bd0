//! Uniform-grid spatial index for point patterns in dimension at most 3.

use crate::error::{Error, Result};

const MAX_DIM: usize = 3;

/// Bucketed point index over a box.
pub struct UniformGrid<'a> {
    coords: &'a [f64],
    d: usize,
    origin: [f64; MAX_DIM],
    cell: f64,
    dims: [usize; MAX_DIM],
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl<'a> UniformGrid<'a> {
    /// Indexes the flat coordinate array `coords` of `d`-dimensional points
    /// lying in `[lower, upper]`, with cells of side at least `cell`.
    pub fn new(coords: &'a [f64], d: usize, lower: &[f64], upper: &[f64], cell: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        let n = coords.len() / d;
        let mut cell = if cell.is_finite() && cell > 0.0 { cell } else { 1.0 };
        let max_cells = 8 * n + 64;
        let count = |cell: f64| -> usize {
            (0..d).map(|j| (((upper[j] - lower[j]) / cell).ceil() as usize).max(1)).product()
        };
        while count(cell) > max_cells {
            cell *= 1.5;
        }
        let mut origin = [0.0; MAX_DIM];
        let mut dims = [1usize; MAX_DIM];
        for j in 0..d {
            origin[j] = lower[j];
            dims[j] = (((upper[j] - lower[j]) / cell).ceil() as usize).max(1);
        }
        let total = dims.iter().product::<usize>();
        let mut grid = Self { coords, d, origin, cell, dims, starts: vec![0; total + 1], order: vec![0; n] };
        let keys: Vec<usize> = (0..n).map(|i| grid.key(grid.cell_of(&coords[i * d..(i + 1) * d]))).collect();
        for &k in &keys {
            grid.starts[k + 1] += 1;
        }
        for k in 0..total {
            grid.starts[k + 1] += grid.starts[k];
        }
        let mut fill = grid.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            grid.order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    fn cell_of(&self, p: &[f64]) -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for j in 0..self.d {
            let raw = ((p[j] - self.origin[j]) / self.cell).floor() as i64;
            c[j] = raw.clamp(0, self.dims[j] as i64 - 1);
        }
        c
    }

    fn key(&self, c: [i64; MAX_DIM]) -> usize {
        (c[0] as usize * self.dims[1] + c[1] as usize) * self.dims[2] + c[2] as usize
    }

    fn dist2(&self, p: &[f64], i: usize) -> f64 {
        p.iter().zip(self.point(i)).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    fn visit_cell(&self, c: [i64; MAX_DIM], mut f: impl FnMut(usize)) {
        for j in 0..MAX_DIM {
            if c[j] < 0 || c[j] >= self.dims[j] as i64 {
                return;
            }
        }
        let k = self.key(c);
        for &i in &self.order[self.starts[k] as usize..self.starts[k + 1] as usize] {
            f(i as usize);
        }
    }

    /// Calls `f(index, squared distance)` for every indexed point within
    /// distance `r` of `p`.
    pub fn for_each_within(&self, p: &[f64], r: f64, mut f: impl FnMut(usize, f64)) {
        let r2 = r * r;
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for j in 0..self.d {
            lo[j] = (((p[j] - r - self.origin[j]) / self.cell).floor() as i64).max(0);
            hi[j] = (((p[j] + r - self.origin[j]) / self.cell).floor() as i64).min(self.dims[j] as i64 - 1);
            if lo[j] > hi[j] {
                return;
            }
        }
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                for c in lo[2]..=hi[2] {
                    self.visit_cell([a, b, c], |i| {
                        let d2 = self.dist2(p, i);
                        if d2 <= r2 {
                            f(i, d2);
                        }
                    });
                }
            }
        }
    }

    /// Nearest indexed point to `p` other than `exclude`, searching up to
    /// distance `max_r`; returns `(index, distance)`.
    pub fn nearest(&self, p: &[f64], exclude: Option<usize>, max_r: f64) -> Option<(usize, f64)> {
        let center = self.cell_of(p);
        let max_ring = self.dims.iter().copied().max().unwrap_or(1) as i64 + 1;
        let mut best: Option<(usize, f64)> = None;
        for k in 0..=max_ring {
            let span = |j: usize| if j < self.d { (center[j] - k, center[j] + k) } else { (0, 0) };
            let (a0, a1) = span(0);
            let (b0, b1) = span(1);
            let (c0, c1) = span(2);
            for a in a0..=a1 {
                for b in b0..=b1 {
                    for c in c0..=c1 {
                        let ring = (a - center[0]).abs().max((b - center[1]).abs()).max((c - center[2]).abs());
                        if ring != k {
                            continue;
                        }
                        self.visit_cell([a, b, c], |i| {
                            if Some(i) == exclude {
                                return;
                            }
                            let d2 = self.dist2(p, i);
                            if best.is_none_or(|(_, bd)| d2 < bd) {
                                best = Some((i, d2));
                            }
                        });
                    }
                }
            }
            let reach = k as f64 * self.cell;
            if let Some((_, bd)) = best {
                if bd.sqrt() <= reach {
                    break;
                }
            }
            if reach > max_r {
                break;
            }
        }
        best.map(|(i, d2)| (i, d2.sqrt())).filter(|(_, d)| *d <= max_r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=3usize {
            let n = 400;
            let coords: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
            let g = UniformGrid::new(&coords, d, &vec![0.0; d], &vec![1.0; d], 0.07).unwrap();
            for q in 0..50 {
                let p = &coords[q * d..(q + 1) * d];
                let brute = (0..n)
                    .filter(|&i| i != q)
                    .map(|i| (i, g.dist2(p, i).sqrt()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                let got = g.nearest(p, Some(q), f64::INFINITY).unwrap();
                assert_eq!(got.0, brute.0);
                let mut within = Vec::new();
                g.for_each_within(p, 0.15, |i, _| within.push(i));
                within.sort_unstable();
                let expected: Vec<usize> = (0..n).filter(|&i| g.dist2(p, i) <= 0.15 * 0.15).collect();
                assert_eq!(within, expected);
            }
        }
    }

    #[test]
    fn nearest_respects_cap() {
        let coords = [0.1, 0.9];
        let g = UniformGrid::new(&coords, 1, &[0.0], &[1.0], 0.1).unwrap();
        assert!(g.nearest(&[0.1], Some(0), 0.5).is_none());
        assert_eq!(g.nearest(&[0.1], Some(0), 1.0).unwrap().0, 1);
    }
}
