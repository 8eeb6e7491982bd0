//! Single-cell Voronoi geometry in dimensions one and two.

use crate::error::{domain, Result};
use crate::pointproc::PointPattern;
use crate::grid::UniformGrid;
use crate::unit_ball_volume;

/// Relative tolerance of the orientation test.
const ORIENT_TOL: f64 = 1e-12;
const MAX_ENLARGEMENTS: usize = 40;

/// Circumscribed radius of the cell of `x` on the line: the larger half-gap,
/// infinite unless there are neighbors on both sides.
pub fn circumradius_1d(x: f64, neighbors: &[f64]) -> f64 {
    let left = neighbors.iter().copied().filter(|&y| y < x).fold(f64::NEG_INFINITY, f64::max);
    let right = neighbors.iter().copied().filter(|&y| y > x).fold(f64::INFINITY, f64::min);
    if left.is_finite() && right.is_finite() {
        0.5 * (x - left).max(right - x)
    } else {
        f64::INFINITY
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// True when the directions `y - x` are not contained in any closed half-plane,
/// which is exactly when the cell of `x` is bounded.
pub fn directions_cover(x: [f64; 2], neighbors: &[[f64; 2]]) -> bool {
    let mut dirs: Vec<[f64; 2]> = neighbors
        .iter()
        .map(|y| [y[0] - x[0], y[1] - x[1]])
        .filter(|v| v[0] != 0.0 || v[1] != 0.0)
        .collect();
    if dirs.len() < 3 {
        return false;
    }
    dirs.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    (0..dirs.len()).all(|i| {
        let a = dirs[i];
        let b = dirs[(i + 1) % dirs.len()];
        let scale = (a[0].hypot(a[1])) * (b[0].hypot(b[1]));
        cross(a, b) > ORIENT_TOL * scale
    })
}

// keeps the part of `poly` with (z - x).n <= c
fn clip(poly: &[[f64; 2]], x: [f64; 2], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let side = |z: [f64; 2]| (z[0] - x[0]) * n[0] + (z[1] - x[1]) * n[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let s = sa / (sa - sb);
            out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    out
}

fn clip_cell(x: [f64; 2], neighbors: &[[f64; 2]], half: f64) -> Vec<[f64; 2]> {
    let mut poly = vec![
        [x[0] - half, x[1] - half],
        [x[0] + half, x[1] - half],
        [x[0] + half, x[1] + half],
        [x[0] - half, x[1] + half],
    ];
    for y in neighbors {
        let n = [y[0] - x[0], y[1] - x[1]];
        let c = 0.5 * (n[0] * n[0] + n[1] * n[1]);
        if c == 0.0 {
            continue;
        }
        poly = clip(&poly, x, n, c);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Vertices of the bounded Voronoi cell of `x`, or `None` when it is unbounded.
pub fn cell_polygon_2d(x: [f64; 2], neighbors: &[[f64; 2]]) -> Option<Vec<[f64; 2]>> {
    if !directions_cover(x, neighbors) {
        return None;
    }
    let mut sorted = neighbors.to_vec();
    let dist2 = |y: &[f64; 2]| (y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2);
    sorted.sort_by(|a, b| dist2(a).total_cmp(&dist2(b)));
    let far = sorted.iter().map(dist2).fold(0.0, f64::max).sqrt();
    let mut half = 2.0 * far;
    for _ in 0..MAX_ENLARGEMENTS {
        let poly = clip_cell(x, &sorted, half);
        let touches = poly
            .iter()
            .any(|v| (v[0] - x[0]).abs().max((v[1] - x[1]).abs()) >= half * (1.0 - 1e-9));
        if !touches {
            return Some(poly);
        }
        half *= 16.0;
    }
    None
}

/// Circumscribed radius of the Voronoi cell of `x` with respect to
/// `neighbors`; infinite for unbounded cells.
pub fn circumradius_2d(x: [f64; 2], neighbors: &[[f64; 2]]) -> f64 {
    match cell_polygon_2d(x, neighbors) {
        Some(poly) => poly
            .iter()
            .map(|v| (v[0] - x[0]).hypot(v[1] - x[1]))
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    }
}

/// `t k_d r^d - log t` for nearest-neighbor distance `r`.
pub fn inradius_transform(d: usize, t: f64, r: f64) -> f64 {
    t * unit_ball_volume(d) * r.powi(d as i32) - t.ln()
}

/// `h_t(x, pattern)`: the nearest-neighbor transform at `x`, ignoring any
/// point of the pattern equal to `x`.
pub fn inradius_stat(x: &[f64], pattern: &PointPattern, t: f64) -> Result<f64> {
    let d = pattern.dim();
    if x.len() != d {
        return Err(domain(format!("point has dimension {}, pattern has {d}", x.len())));
    }
    let w = pattern.window();
    let spacing = (1.0 / (pattern.len().max(1) as f64 / w.volume())).powf(1.0 / d as f64);
    let grid = UniformGrid::new(pattern.coords(), d, w.lower(), w.upper(), spacing)?;
    let own = (0..pattern.len()).find(|&i| pattern.point(i) == x);
    let nn = match own {
        Some(i) => grid.nearest(x, Some(i), f64::INFINITY),
        None => grid.nearest(x, None, f64::INFINITY),
    };
    let (j, r) = nn.ok_or_else(|| domain("inradius undefined for an isolated point"))?;
    if pattern.point(j) == x {
        return Err(domain("pattern contains a duplicate of the point"));
    }
    Ok(inradius_transform(d, t, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::{BoxWindow, Intensity};

    #[test]
    fn square_cell() {
        let a = 0.7;
        let n = [[2.0 * a, 0.0], [-2.0 * a, 0.0], [0.0, 2.0 * a], [0.0, -2.0 * a]];
        assert!((circumradius_2d([0.0, 0.0], &n) - a * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn triangle_cell() {
        let n: Vec<[f64; 2]> = (0..3)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                [2.0 * th.cos(), 2.0 * th.sin()]
            })
            .collect();
        assert!((circumradius_2d([0.0, 0.0], &n) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_cells() {
        assert!(circumradius_2d([0.0, 0.0], &[]).is_infinite());
        assert!(circumradius_2d([0.0, 0.0], &[[1.0, 0.0]]).is_infinite());
        assert!(circumradius_2d([0.0, 0.0], &[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]).is_infinite());
        assert!(circumradius_1d(0.0, &[1.0, 2.0]).is_infinite());
    }

    #[test]
    fn line_cell() {
        assert!((circumradius_1d(0.0, &[-0.2, 0.6, 1.0]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn inradius_examples() {
        let w = BoxWindow::unit_cube(1).unwrap();
        let p = PointPattern::new(w, vec![0.3, 0.4, 0.9], Intensity::Poisson { t: 10.0 }).unwrap();
        let h = inradius_stat(&[0.3], &p, 10.0).unwrap();
        assert!((h - (2.0 - 10f64.ln())).abs() < 1e-12);
        let lone = PointPattern::new(BoxWindow::unit_cube(1).unwrap(), vec![0.3], Intensity::Poisson { t: 1.0 })
            .unwrap();
        assert!(inradius_stat(&[0.3], &lone, 10.0).is_err());
        let r = 0.05;
        assert!((inradius_transform(2, 100.0, r) - (100.0 * std::f64::consts::PI * r * r - 100f64.ln())).abs() < 1e-12);
    }
}
