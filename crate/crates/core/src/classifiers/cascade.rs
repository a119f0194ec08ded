//! Two-stage Naive Bayes cascade.
//!
//! Stage 1, trained on randomly sampled pairs, weeds out clear non-matches.
//! Stage 2 trains only on hard pairs that pass stage 1 (matching profiles
//! versus similar-name non-matches), so it learns to split candidates that
//! names alone cannot.

use serde::{Deserialize, Serialize};

use super::nb::{self, NaiveBayesKde};
use super::ModelError;
use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub stage1: NaiveBayesKde,
    pub stage2: NaiveBayesKde,
    pub stage1_threshold: f64,
}

pub fn fit(
    random_examples: &[(FeatureVector, bool)],
    hard_examples: &[(FeatureVector, bool)],
    stage1_threshold: f64,
) -> Result<CascadeModel, ModelError> {
    let stage1 = nb::fit(random_examples);

    let passing: Vec<(FeatureVector, bool)> = hard_examples
        .iter()
        .filter(|(fv, _)| stage1.predict(fv) >= stage1_threshold)
        .cloned()
        .collect();
    let pos = passing.iter().filter(|(_, y)| *y).count();
    if pos == 0 || pos == passing.len() {
        return Err(ModelError::DegenerateCascadeStage {
            passing: passing.len(),
            positives: pos,
        });
    }
    let stage2 = nb::fit(&passing);
    Ok(CascadeModel {
        stage1,
        stage2,
        stage1_threshold,
    })
}

impl CascadeModel {
    /// Zero when stage 1 rejects, otherwise the stage-2 probability.
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        if self.stage1.predict(fv) < self.stage1_threshold {
            0.0
        } else {
            self.stage2.predict(fv)
        }
    }
}
