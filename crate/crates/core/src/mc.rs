//! Ordered parallel replication and Monte Carlo summaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Runs `f(rep)` for `rep in 0..reps` on `workers` threads and returns the
/// results in replication order, so the output does not depend on scheduling.
pub fn replicate<T, F>(reps: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(pool.install(|| (0..reps).into_par_iter().map(&f).collect()))
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut n = 0u64;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for v in values {
            n += 1;
            let delta = v - mean;
            mean += delta / n as f64;
            m2 += delta * (v - mean);
        }
        if n < 2 {
            return Self { mean, std_error: 0.0 };
        }
        let var = m2 / (n - 1) as f64;
        Self { mean, std_error: (var / n as f64).sqrt() }
    }

    /// Standard error, floored at `floor`.
    pub fn se_at_least(&self, floor: f64) -> f64 {
        self.std_error.max(floor)
    }

    /// Proportion estimate with binomial standard error.
    pub fn proportion(successes: u64, n: u64) -> Self {
        let p = successes as f64 / n as f64;
        Self { mean: p, std_error: (p * (1.0 - p) / n as f64).sqrt() }
    }
}

/// Binomial standard error of a proportion over `n` trials with success probability `p0`.
pub fn binomial_std_error(p0: f64, n: u64) -> f64 {
    (p0 * (1.0 - p0) / n as f64).sqrt()
}

/// Standard error of the mean of `n` Poisson counts with mean `mean0`.
pub fn poisson_std_error(mean0: f64, n: u64) -> f64 {
    (mean0 / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicate_is_ordered() {
        let a = replicate(100, 1, |r| r * r).unwrap();
        let b = replicate(100, 8, |r| r * r).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[7], 49);
    }

    #[test]
    fn estimate_matches_closed_form() {
        let e = Estimate::of([1.0, 2.0, 3.0, 4.0]);
        assert!((e.mean - 2.5).abs() < 1e-15);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
