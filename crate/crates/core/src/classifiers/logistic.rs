//! Logistic regression by penalized maximum likelihood.
//!
//! The optimizer is plain full-batch gradient ascent with a backtracking
//! step: a step that lowers the objective is halved and retried, so the
//! penalized log-likelihood is nondecreasing across accepted steps. The
//! objective is concave, which makes this slow but exact and reproducible.

use serde::{Deserialize, Serialize};

/// A fitted linear model over dense inputs: `p = sigmoid(w . x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLogistic {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl DenseLogistic {
    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean log-likelihood minus `l2/2 * ||w||^2` (bias unpenalized).
pub fn objective(weights: &[f64], bias: f64, xs: &[Vec<f64>], ys: &[bool], l2: f64) -> f64 {
    let n = xs.len() as f64;
    let mut ll = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z = dot(weights, x) + bias;
        // log sigmoid(z) if y else log sigmoid(-z), computed stably
        ll += if y { -softplus(-z) } else { -softplus(z) };
    }
    ll / n - l2 / 2.0 * weights.iter().map(|w| w * w).sum::<f64>()
}

fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else if z < -30.0 {
        0.0
    } else {
        (1.0 + z.exp()).ln()
    }
}

/// Analytic gradient of [`objective`]: returns (d/dw, d/db).
pub fn gradient(
    weights: &[f64],
    bias: f64,
    xs: &[Vec<f64>],
    ys: &[bool],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let err = (y as u8 as f64) - sigmoid(dot(weights, x) + bias);
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += err * xi;
        }
        gb += err;
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n - l2 * w;
    }
    (gw, gb / n)
}

/// Maximum-likelihood fit from a zero start. Deterministic.
pub fn fit(xs: &[Vec<f64>], ys: &[bool], l2: f64, max_epochs: usize) -> DenseLogistic {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let dim = xs[0].len();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut obj = objective(&w, b, xs, ys, l2);
    let mut lr = 1.0;

    for _ in 0..max_epochs {
        let (gw, gb) = gradient(&w, b, xs, ys, l2);
        let gnorm: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        if gnorm.sqrt() < 1e-10 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let wt: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi + lr * gi).collect();
            let bt = b + lr * gb;
            let next = objective(&wt, bt, xs, ys, l2);
            if next >= obj {
                let gain = next - obj;
                w = wt;
                b = bt;
                obj = next;
                accepted = true;
                lr = (lr * 1.2).min(1e6);
                if gain < 1e-13 {
                    return DenseLogistic { weights: w, bias: b };
                }
                break;
            }
            lr /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    DenseLogistic { weights: w, bias: b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn toy() -> (Vec<Vec<f64>>, Vec<bool>) {
        let xs = vec![
            vec![0.9, 0.8],
            vec![1.0, 0.95],
            vec![0.85, 1.0],
            vec![0.1, 0.2],
            vec![0.0, 0.05],
            vec![0.15, 0.0],
        ];
        let ys = vec![true, true, true, false, false, false];
        (xs, ys)
    }

    #[test]
    fn separates_the_toy_set() {
        let (xs, ys) = toy();
        let model = fit(&xs, &ys, 1e-3, 5000);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(model.predict(x) > 0.5, *y);
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let (xs, ys) = toy();
        let l2 = 1e-3;
        let mut rng = crate::rng::stream(17, "lr-gradient-check");
        let eps = 1e-6;
        for _ in 0..10 {
            let w: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let b: f64 = rng.random_range(-2.0..2.0);
            let (gw, gb) = gradient(&w, b, &xs, &ys, l2);
            for d in 0..2 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[d] += eps;
                wm[d] -= eps;
                let num =
                    (objective(&wp, b, &xs, &ys, l2) - objective(&wm, b, &xs, &ys, l2)) / (2.0 * eps);
                let denom = num.abs().max(gw[d].abs()).max(1e-8);
                assert!(
                    ((num - gw[d]) / denom).abs() < 1e-5,
                    "dw[{d}]: analytic {} vs numeric {num}",
                    gw[d]
                );
            }
            let num =
                (objective(&w, b + eps, &xs, &ys, l2) - objective(&w, b - eps, &xs, &ys, l2))
                    / (2.0 * eps);
            let denom = num.abs().max(gb.abs()).max(1e-8);
            assert!(((num - gb) / denom).abs() < 1e-5);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let (xs, ys) = toy();
        let a = fit(&xs, &ys, 1e-3, 2000);
        let b = fit(&xs, &ys, 1e-3, 2000);
        assert_eq!(a, b);
    }
}
