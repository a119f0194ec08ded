//! One-dimensional Gaussian kernel density estimation.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Gaussian KDE with Silverman's rule-of-thumb bandwidth:
/// `h = 0.9 * min(sigma, IQR/1.34) * n^(-1/5)`, floored at 1e-3 so
/// degenerate (constant) samples keep a finite, integrable density.
///
/// [`Kde::density`] is the exact sum over observations; prediction paths
/// use [`Kde::density_fast`], a linearly interpolated lookup table built
/// once per fitted density (identical across calls and threads, excluded
/// from serialization and equality).
#[derive(Debug, Serialize, Deserialize)]
pub struct Kde {
    points: Vec<f64>,
    bandwidth: f64,
    #[serde(skip)]
    table: OnceLock<DensityTable>,
}

#[derive(Debug)]
struct DensityTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

const MIN_BANDWIDTH: f64 = 1e-3;
const TABLE_SIZE: usize = 4096;
/// Tail width of the table; Gaussian mass beyond 8 bandwidths is < 1e-15.
const TABLE_TAILS: f64 = 8.0;

impl Clone for Kde {
    fn clone(&self) -> Self {
        Kde {
            points: self.points.clone(),
            bandwidth: self.bandwidth,
            table: OnceLock::new(),
        }
    }
}

impl PartialEq for Kde {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.bandwidth == other.bandwidth
    }
}

impl Kde {
    /// Fit on finite observations. Panics on an empty sample; callers
    /// guard.
    pub fn fit(data: &[f64]) -> Kde {
        assert!(!data.is_empty(), "KDE requires at least one observation");
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let sigma = if data.len() > 1 {
            (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };

        let mut sorted = data.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite observations"));
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);

        let spread_candidates = [sigma, iqr / 1.34];
        let spread = spread_candidates
            .iter()
            .copied()
            .filter(|s| *s > 0.0)
            .fold(f64::INFINITY, f64::min);
        let bandwidth = if spread.is_finite() {
            (0.9 * spread * n.powf(-0.2)).max(MIN_BANDWIDTH)
        } else {
            MIN_BANDWIDTH
        };

        Kde {
            points: sorted,
            bandwidth,
            table: OnceLock::new(),
        }
    }

    /// Exact density: the mean of Gaussian kernels at the observations.
    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.points.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
        let sum: f64 = self
            .points
            .iter()
            .map(|&p| (-0.5 * ((x - p) / h).powi(2)).exp())
            .sum();
        norm * sum
    }

    /// Table-interpolated density; exact up to the interpolation step,
    /// zero outside the padded observation range (where the exact density
    /// is below 1e-15 of its peak).
    pub fn density_fast(&self, x: f64) -> f64 {
        let table = self.table.get_or_init(|| self.build_table());
        let pos = (x - table.lo) / table.step;
        if pos < 0.0 || pos >= (table.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = pos as usize;
        let frac = pos - i as f64;
        table.values[i] * (1.0 - frac) + table.values[i + 1] * frac
    }

    /// Log of the fast density, floored so products over features stay
    /// finite.
    pub fn log_density(&self, x: f64) -> f64 {
        self.density_fast(x).max(1e-300).ln()
    }

    fn build_table(&self) -> DensityTable {
        let lo = self.points.first().unwrap() - TABLE_TAILS * self.bandwidth;
        let hi = self.points.last().unwrap() + TABLE_TAILS * self.bandwidth;
        let step = (hi - lo) / (TABLE_SIZE - 1) as f64;
        let values = (0..TABLE_SIZE)
            .map(|i| self.density(lo + step * i as f64))
            .collect();
        DensityTable { lo, step, values }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    }
}
