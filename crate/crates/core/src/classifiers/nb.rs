//! Naive Bayes with per-class per-feature kernel density estimates.
//!
//! Missing values are skipped natively: an unobserved training value never
//! enters a density, and a missing test value drops its feature from the
//! product. An all-missing input therefore scores the match-class prior.
//!
//! Each class density is mixed with a small uniform background over the
//! feature's observed range. Without it, a test value outside one class's
//! training support (a same-city non-matching pair, say, when no training
//! negative shared a city) turns into an unbounded log-ratio that vetoes
//! every other feature.

use serde::{Deserialize, Serialize};

use super::kde::Kde;
use crate::features::FeatureVector;

/// Background mixture weight.
const SMOOTHING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesKde {
    pub prior_pos: f64,
    /// Per feature: densities for the match / non-match class. A feature
    /// without observed values in either class is skipped at prediction.
    pub features: Vec<ClassDensities>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDensities {
    pub pos: Option<Kde>,
    pub neg: Option<Kde>,
    /// Width of the pooled observed range, the support of the uniform
    /// background.
    pub background_width: f64,
}

pub fn fit(examples: &[(FeatureVector, bool)]) -> NaiveBayesKde {
    let n_pos = examples.iter().filter(|(_, y)| *y).count();
    let prior_pos = n_pos as f64 / examples.len() as f64;

    let mut features = Vec::with_capacity(5);
    for slot in 0..5 {
        let collect = |want: bool| -> Option<Kde> {
            let values: Vec<f64> = examples
                .iter()
                .filter(|(_, y)| *y == want)
                .filter_map(|(fv, _)| fv.slots()[slot])
                .collect();
            (!values.is_empty()).then(|| Kde::fit(&values))
        };
        let observed: Vec<f64> = examples
            .iter()
            .filter_map(|(fv, _)| fv.slots()[slot])
            .collect();
        let background_width = match (
            observed.iter().cloned().fold(f64::INFINITY, f64::min),
            observed.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ) {
            (lo, hi) if lo.is_finite() && hi.is_finite() => (hi - lo).max(1.0),
            _ => 1.0,
        };
        features.push(ClassDensities {
            pos: collect(true),
            neg: collect(false),
            background_width,
        });
    }
    NaiveBayesKde {
        prior_pos,
        features,
    }
}

impl ClassDensities {
    fn log_density(&self, kde: &Kde, x: f64) -> f64 {
        ((1.0 - SMOOTHING) * kde.density_fast(x) + SMOOTHING / self.background_width).ln()
    }
}

impl NaiveBayesKde {
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        let mut log_pos = self.prior_pos.max(1e-300).ln();
        let mut log_neg = (1.0 - self.prior_pos).max(1e-300).ln();
        for (slot, densities) in self.features.iter().enumerate() {
            let Some(x) = fv.slots()[slot] else { continue };
            // Use a feature only when both classes exhibited it in training;
            // a one-sided density would make the comparison lopsided.
            let (Some(pos), Some(neg)) = (&densities.pos, &densities.neg) else {
                continue;
            };
            log_pos += densities.log_density(pos, x);
            log_neg += densities.log_density(neg, x);
        }
        let m = log_pos.max(log_neg);
        let e_pos = (log_pos - m).exp();
        let e_neg = (log_neg - m).exp();
        e_pos / (e_pos + e_neg)
    }
}
