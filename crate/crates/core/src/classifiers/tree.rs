//! Decision tree with Gini splits and all-branches missing handling.
//!
//! Splits are chosen on instances where the split feature is present
//! (gain discounted by the present fraction, C4.5 style). Instances missing
//! the feature descend both branches with proportionally divided weight,
//! and prediction aggregates both subtrees by the same stored proportion.

use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        p: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Fraction of present-feature weight that went left at training.
        left_frac: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub max_depth: usize,
    pub min_leaf: f64,
}

struct Instance {
    x: [Option<f64>; 5],
    y: bool,
    w: f64,
}

pub fn fit(
    examples: &[(FeatureVector, bool)],
    max_depth: usize,
    min_leaf: f64,
) -> DecisionTree {
    let instances: Vec<Instance> = examples
        .iter()
        .map(|(fv, y)| Instance {
            x: *fv.slots(),
            y: *y,
            w: 1.0,
        })
        .collect();
    let root = grow(instances, 0, max_depth, min_leaf);
    DecisionTree {
        root,
        max_depth,
        min_leaf,
    }
}

fn weighted_p(instances: &[Instance]) -> f64 {
    let total: f64 = instances.iter().map(|i| i.w).sum();
    if total == 0.0 {
        return 0.5;
    }
    instances.iter().filter(|i| i.y).map(|i| i.w).sum::<f64>() / total
}

fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn grow(instances: Vec<Instance>, depth: usize, max_depth: usize, min_leaf: f64) -> Node {
    let p = weighted_p(&instances);
    let total_w: f64 = instances.iter().map(|i| i.w).sum();
    if depth >= max_depth || total_w < 2.0 * min_leaf || p == 0.0 || p == 1.0 {
        return Node::Leaf { p };
    }

    let mut best: Option<BestSplit> = None;
    for feature in 0..5 {
        let mut present: Vec<(f64, f64, bool)> = instances
            .iter()
            .filter_map(|i| i.x[feature].map(|v| (v, i.w, i.y)))
            .collect();
        if present.len() < 2 {
            continue;
        }
        present.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
        let w_present: f64 = present.iter().map(|(_, w, _)| w).sum();
        let pos_present: f64 = present.iter().filter(|(_, _, y)| *y).map(|(_, w, _)| w).sum();
        let parent_gini = gini(pos_present, w_present);

        // Scan prefix sums over candidate thresholds between distinct values.
        let mut w_left = 0.0;
        let mut pos_left = 0.0;
        for k in 0..present.len() - 1 {
            let (v, w, y) = present[k];
            w_left += w;
            if y {
                pos_left += w;
            }
            let v_next = present[k + 1].0;
            if v == v_next {
                continue;
            }
            let w_right = w_present - w_left;
            if w_left < min_leaf || w_right < min_leaf {
                continue;
            }
            let child_gini = (w_left * gini(pos_left, w_left)
                + w_right * gini(pos_present - pos_left, w_right))
                / w_present;
            // Discount by the present fraction so sparsely available
            // features do not win on a sliver of the node.
            let gain = (w_present / total_w) * (parent_gini - child_gini);
            if gain > best.as_ref().map_or(1e-12, |b| b.gain) {
                best = Some(BestSplit {
                    feature,
                    threshold: (v + v_next) / 2.0,
                    gain,
                });
            }
        }
    }

    let Some(split) = best else {
        return Node::Leaf { p };
    };

    let mut w_left_present = 0.0;
    let mut w_right_present = 0.0;
    for i in &instances {
        if let Some(v) = i.x[split.feature] {
            if v <= split.threshold {
                w_left_present += i.w;
            } else {
                w_right_present += i.w;
            }
        }
    }
    let left_frac = w_left_present / (w_left_present + w_right_present);

    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in instances {
        match i.x[split.feature] {
            Some(v) if v <= split.threshold => left.push(i),
            Some(_) => right.push(i),
            None => {
                // Missing: descend both branches with divided weight.
                left.push(Instance {
                    x: i.x,
                    y: i.y,
                    w: i.w * left_frac,
                });
                right.push(Instance {
                    x: i.x,
                    y: i.y,
                    w: i.w * (1.0 - left_frac),
                });
            }
        }
    }

    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left_frac,
        left: Box::new(grow(left, depth + 1, max_depth, min_leaf)),
        right: Box::new(grow(right, depth + 1, max_depth, min_leaf)),
    }
}

impl DecisionTree {
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        predict_node(&self.root, fv.slots())
    }
}

fn predict_node(node: &Node, x: &[Option<f64>; 5]) -> f64 {
    match node {
        Node::Leaf { p } => *p,
        Node::Split {
            feature,
            threshold,
            left_frac,
            left,
            right,
        } => match x[*feature] {
            Some(v) if v <= *threshold => predict_node(left, x),
            Some(_) => predict_node(right, x),
            None => {
                left_frac * predict_node(left, x) + (1.0 - left_frac) * predict_node(right, x)
            }
        },
    }
}
