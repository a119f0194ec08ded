//! Linear SVM: hinge loss + L2 by subgradient descent.
//!
//! The step is backtracked so the objective never increases epoch to epoch;
//! at a point where no halved step improves, training stops. Probabilities
//! come from a logistic link fitted on the training margins, so SVM output
//! is comparable with the other families' probabilities.

use serde::{Deserialize, Serialize};

use super::logistic::{self, DenseLogistic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    /// Logistic link over the margin.
    pub link: DenseLogistic,
}

impl LinearSvm {
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.link.predict(&[self.margin(x)])
    }
}

/// `lambda/2 ||w||^2 + mean hinge loss`.
pub fn objective(weights: &[f64], bias: f64, xs: &[Vec<f64>], ys: &[bool], lambda: f64) -> f64 {
    let n = xs.len() as f64;
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let sign = if y { 1.0 } else { -1.0 };
            let m = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
            (1.0 - sign * m).max(0.0)
        })
        .sum();
    lambda / 2.0 * weights.iter().map(|w| w * w).sum::<f64>() + hinge / n
}

fn subgradient(
    weights: &[f64],
    bias: f64,
    xs: &[Vec<f64>],
    ys: &[bool],
    lambda: f64,
) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| lambda * w).collect();
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let sign = if y { 1.0 } else { -1.0 };
        let m = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        if sign * m < 1.0 {
            for (g, v) in gw.iter_mut().zip(x) {
                *g -= sign * v / n;
            }
            gb -= sign / n;
        }
    }
    (gw, gb)
}

/// Fit from a zero start; returns the model and the per-epoch objective
/// (nonincreasing by construction).
pub fn fit(
    xs: &[Vec<f64>],
    ys: &[bool],
    lambda: f64,
    max_epochs: usize,
) -> (LinearSvm, Vec<f64>) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let dim = xs[0].len();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut obj = objective(&w, b, xs, ys, lambda);
    let mut history = vec![obj];
    let mut lr = 0.5;

    for _ in 0..max_epochs {
        let (gw, gb) = subgradient(&w, b, xs, ys, lambda);
        let mut accepted = false;
        for _ in 0..60 {
            let wt: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - lr * gi).collect();
            let bt = b - lr * gb;
            let next = objective(&wt, bt, xs, ys, lambda);
            if next <= obj {
                let gain = obj - next;
                w = wt;
                b = bt;
                obj = next;
                history.push(obj);
                accepted = true;
                lr = (lr * 1.2).min(1e3);
                if gain < 1e-13 {
                    let link = fit_link(&w, b, xs, ys);
                    return (
                        LinearSvm {
                            weights: w,
                            bias: b,
                            lambda,
                            link,
                        },
                        history,
                    );
                }
                break;
            }
            lr /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    let link = fit_link(&w, b, xs, ys);
    (
        LinearSvm {
            weights: w,
            bias: b,
            lambda,
            link,
        },
        history,
    )
}

fn fit_link(weights: &[f64], bias: f64, xs: &[Vec<f64>], ys: &[bool]) -> DenseLogistic {
    let margins: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            vec![weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias]
        })
        .collect();
    // Small ridge keeps the link finite on separable data.
    logistic::fit(&margins, ys, 1e-6, 2000)
}
