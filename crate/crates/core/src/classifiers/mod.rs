//! Binary classifier families over feature vectors.
//!
//! Four families, each with its own missing-value strategy: Naive Bayes
//! with per-feature KDEs skips missing features natively, logistic
//! regression imputes the training median, the linear SVM imputes -1, and
//! the decision tree routes missing values down all branches. Friend counts
//! feed the linear models as `ln(1 + count)`; Naive Bayes and the tree see
//! the raw count.

pub mod cascade;
pub mod kde;
pub mod logistic;
pub mod nb;
pub mod svm;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AttributeKind, Corpus};
use crate::features::{FeatureVector, Featurizer};
use crate::rng;
use crate::sampling::PairDataset;

use logistic::DenseLogistic;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training set contains a single class ({positives} of {total} positive)")]
    SingleClass { positives: usize, total: usize },
    #[error("training set is empty")]
    EmptyDataset,
    #[error("pair references unknown profile `{id}`")]
    UnresolvedId { id: String },
    #[error("cascade stage 2 training set is degenerate ({passing} passing, {positives} positive)")]
    DegenerateCascadeStage { passing: usize, positives: usize },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not a model file (bad magic header)")]
    CorruptFile { path: String },
    #[error("{path} has model format `{found}`, this build reads `{expected}`")]
    VersionMismatch {
        path: String,
        found: String,
        expected: String,
    },
    #[error("malformed model body in {path}: {message}")]
    MalformedBody { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierFamily {
    NaiveBayesKde,
    LogisticRegression,
    LinearSvm,
    DecisionTree,
}

impl ClassifierFamily {
    pub const ALL: [ClassifierFamily; 4] = [
        ClassifierFamily::NaiveBayesKde,
        ClassifierFamily::LogisticRegression,
        ClassifierFamily::LinearSvm,
        ClassifierFamily::DecisionTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierFamily::NaiveBayesKde => "naive_bayes_kde",
            ClassifierFamily::LogisticRegression => "logistic_regression",
            ClassifierFamily::LinearSvm => "linear_svm",
            ClassifierFamily::DecisionTree => "decision_tree",
        }
    }

    pub fn strategy(self) -> MissingStrategy {
        match self {
            ClassifierFamily::NaiveBayesKde => MissingStrategy::SkipFeature,
            ClassifierFamily::LogisticRegression => MissingStrategy::ImputeMedian,
            ClassifierFamily::LinearSvm => MissingStrategy::ImputeNegativeOne,
            ClassifierFamily::DecisionTree => MissingStrategy::AllBranches,
        }
    }
}

impl fmt::Display for ClassifierFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissingStrategy {
    SkipFeature,
    ImputeMedian,
    ImputeNegativeOne,
    AllBranches,
}

/// Training hyperparameters. `svm_lambda: None` selects the regularizer by
/// 10-fold cross-validation on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr_l2: f64,
    pub lr_max_epochs: usize,
    pub svm_lambda: Option<f64>,
    pub svm_grid: Vec<f64>,
    pub svm_max_epochs: usize,
    pub cv_folds: usize,
    pub tree_max_depth: usize,
    pub tree_min_leaf: f64,
    /// -1 imputation is the configuration that performs best for trees
    /// (missingness becomes a split-able signal); routing missing values
    /// down all branches is the alternative.
    pub tree_missing: TreeMissing,
    pub stage1_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeMissing {
    ImputeNegativeOne,
    AllBranches,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr_l2: 1e-3,
            lr_max_epochs: 4000,
            svm_lambda: None,
            svm_grid: vec![1e-4, 1e-3, 1e-2, 1e-1],
            svm_max_epochs: 600,
            cv_folds: 10,
            tree_max_depth: 8,
            tree_min_leaf: 5.0,
            tree_missing: TreeMissing::ImputeNegativeOne,
            stage1_threshold: 0.5,
        }
    }
}

/// Provenance of a trained model, embedded in the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub family: String,
    pub seed: u64,
    pub n_examples: usize,
    pub n_positives: usize,
    pub dataset_provenance: BTreeMap<String, usize>,
    pub hyperparameters: serde_json::Value,
}

/// Logistic regression over imputed features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub core: DenseLogistic,
    pub medians: [f64; 5],
}

impl LogisticModel {
    fn inputs(&self, fv: &FeatureVector) -> Vec<f64> {
        (0..5)
            .map(|slot| match fv.slots()[slot] {
                Some(v) => transform_slot(slot, v),
                None => self.medians[slot],
            })
            .collect()
    }

    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        self.core.predict(&self.inputs(fv))
    }
}

/// Linear SVM over -1-imputed features with a logistic link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub core: svm::LinearSvm,
}

impl SvmModel {
    fn inputs(fv: &FeatureVector) -> Vec<f64> {
        (0..5)
            .map(|slot| match fv.slots()[slot] {
                Some(v) => transform_slot(slot, v),
                None => -1.0,
            })
            .collect()
    }

    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        self.core.predict(&Self::inputs(fv))
    }
}

/// Friend counts are unbounded; linear models consume `ln(1 + count)`.
fn transform_slot(slot: usize, v: f64) -> f64 {
    if slot == AttributeKind::Friends.index() {
        (1.0 + v).ln()
    } else {
        v
    }
}

/// Decision tree plus how it treats missing values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub tree: tree::DecisionTree,
    pub impute_negative_one: bool,
}

impl TreeModel {
    fn prepare(fv: &FeatureVector, impute: bool) -> FeatureVector {
        if !impute {
            return *fv;
        }
        let slots = std::array::from_fn(|i| Some(fv.slots()[i].unwrap_or(-1.0)));
        FeatureVector::new(slots)
    }

    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        self.tree
            .predict(&Self::prepare(fv, self.impute_negative_one))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    NaiveBayesKde(nb::NaiveBayesKde),
    LogisticRegression(LogisticModel),
    LinearSvm(SvmModel),
    DecisionTree(TreeModel),
    Cascade(cascade::CascadeModel),
}

impl ModelKind {
    fn strategy(&self) -> MissingStrategy {
        match self {
            ModelKind::NaiveBayesKde(_) | ModelKind::Cascade(_) => MissingStrategy::SkipFeature,
            ModelKind::LogisticRegression(_) => MissingStrategy::ImputeMedian,
            ModelKind::LinearSvm(_) => MissingStrategy::ImputeNegativeOne,
            ModelKind::DecisionTree(t) => {
                if t.impute_negative_one {
                    MissingStrategy::ImputeNegativeOne
                } else {
                    MissingStrategy::AllBranches
                }
            }
        }
    }
}

/// A fitted binary classifier with its missing-value strategy and training
/// manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub missing_strategy: MissingStrategy,
    pub manifest: TrainingManifest,
}

impl TrainedModel {
    /// Deterministic match probability in [0,1].
    pub fn predict_proba(&self, fv: &FeatureVector) -> f64 {
        let p = match &self.kind {
            ModelKind::NaiveBayesKde(m) => m.predict(fv),
            ModelKind::LogisticRegression(m) => m.predict(fv),
            ModelKind::LinearSvm(m) => m.predict(fv),
            ModelKind::DecisionTree(m) => m.predict(fv),
            ModelKind::Cascade(m) => m.predict(fv),
        };
        p.clamp(0.0, 1.0)
    }
}

/// Compute feature vectors for every pair of a dataset.
pub fn featurize_pairs(
    ds: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
) -> Result<Vec<(FeatureVector, bool)>, ModelError> {
    ds.pairs()
        .iter()
        .map(|p| {
            let a1 = sn1.get(&p.sn1_id).ok_or_else(|| ModelError::UnresolvedId {
                id: p.sn1_id.clone(),
            })?;
            let a2 = sn2.get(&p.sn2_id).ok_or_else(|| ModelError::UnresolvedId {
                id: p.sn2_id.clone(),
            })?;
            Ok((fz.featurize(a1, a2), p.is_match))
        })
        .collect()
}

fn provenance_counts(ds: &PairDataset) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for p in ds.pairs() {
        *counts.entry(p.provenance.tag().to_string()).or_insert(0) += 1;
    }
    counts
}

fn check_two_classes(examples: &[(FeatureVector, bool)]) -> Result<usize, ModelError> {
    if examples.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let positives = examples.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == examples.len() {
        return Err(ModelError::SingleClass {
            positives,
            total: examples.len(),
        });
    }
    Ok(positives)
}

/// Train one family on featurized examples.
pub fn train_on_examples(
    family: ClassifierFamily,
    examples: &[(FeatureVector, bool)],
    dataset_provenance: BTreeMap<String, usize>,
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedModel, ModelError> {
    let n_positives = check_two_classes(examples)?;

    let (kind, hyperparameters) = match family {
        ClassifierFamily::NaiveBayesKde => (
            ModelKind::NaiveBayesKde(nb::fit(examples)),
            serde_json::json!({ "bandwidth": "silverman" }),
        ),
        ClassifierFamily::LogisticRegression => {
            let medians = feature_medians(examples);
            let xs: Vec<Vec<f64>> = examples
                .iter()
                .map(|(fv, _)| {
                    (0..5)
                        .map(|slot| match fv.slots()[slot] {
                            Some(v) => transform_slot(slot, v),
                            None => medians[slot],
                        })
                        .collect()
                })
                .collect();
            let ys: Vec<bool> = examples.iter().map(|(_, y)| *y).collect();
            let core = logistic::fit(&xs, &ys, config.lr_l2, config.lr_max_epochs);
            (
                ModelKind::LogisticRegression(LogisticModel { core, medians }),
                serde_json::json!({ "l2": config.lr_l2, "max_epochs": config.lr_max_epochs }),
            )
        }
        ClassifierFamily::LinearSvm => {
            let xs: Vec<Vec<f64>> = examples.iter().map(|(fv, _)| SvmModel::inputs(fv)).collect();
            let ys: Vec<bool> = examples.iter().map(|(_, y)| *y).collect();
            let lambda = match config.svm_lambda {
                Some(l) => l,
                None => select_svm_lambda(&xs, &ys, config, seed),
            };
            let (core, _) = svm::fit(&xs, &ys, lambda, config.svm_max_epochs);
            (
                ModelKind::LinearSvm(SvmModel { core }),
                serde_json::json!({
                    "lambda": lambda,
                    "lambda_source": if config.svm_lambda.is_some() { "fixed" } else { "cv" },
                    "max_epochs": config.svm_max_epochs,
                    "calibration": "logistic_link_on_margins",
                }),
            )
        }
        ClassifierFamily::DecisionTree => (
            ModelKind::DecisionTree(tree::fit(
                examples,
                config.tree_max_depth,
                config.tree_min_leaf,
            )),
            serde_json::json!({
                "max_depth": config.tree_max_depth,
                "min_leaf": config.tree_min_leaf,
            }),
        ),
    };

    Ok(TrainedModel {
        missing_strategy: kind.strategy(),
        manifest: TrainingManifest {
            family: family.name().to_string(),
            seed,
            n_examples: examples.len(),
            n_positives,
            dataset_provenance,
            hyperparameters,
        },
        kind,
    })
}

/// Train one family straight from a pair dataset.
pub fn train(
    family: ClassifierFamily,
    ds: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedModel, ModelError> {
    let examples = featurize_pairs(ds, sn1, sn2, fz)?;
    train_on_examples(family, &examples, provenance_counts(ds), config, seed)
}

/// Median of observed (transformed) values per feature; 0 for features
/// never observed in training.
fn feature_medians(examples: &[(FeatureVector, bool)]) -> [f64; 5] {
    let mut medians = [0.0; 5];
    for (slot, m) in medians.iter_mut().enumerate() {
        let mut values: Vec<f64> = examples
            .iter()
            .filter_map(|(fv, _)| fv.slots()[slot])
            .map(|v| transform_slot(slot, v))
            .collect();
        if values.is_empty() {
            continue;
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
        let n = values.len();
        *m = if n % 2 == 1 {
            values[n / 2]
        } else {
            (values[n / 2 - 1] + values[n / 2]) / 2.0
        };
    }
    medians
}

/// 10-fold cross-validated accuracy over the lambda grid; ties keep the
/// smaller lambda. Folds are seeded, so selection is deterministic.
fn select_svm_lambda(xs: &[Vec<f64>], ys: &[bool], config: &TrainConfig, seed: u64) -> f64 {
    use rand::seq::SliceRandom;
    let folds = config.cv_folds.max(2).min(xs.len());
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.shuffle(&mut rng::stream(seed, "svm-cv-folds"));

    let mut best_lambda = config.svm_grid.first().copied().unwrap_or(1e-3);
    let mut best_acc = -1.0;
    for &lambda in &config.svm_grid {
        let mut correct = 0usize;
        let mut counted = 0usize;
        for fold in 0..folds {
            let hold: Vec<usize> = order
                .iter()
                .copied()
                .skip(fold)
                .step_by(folds)
                .collect();
            let hold_set: std::collections::HashSet<usize> = hold.iter().copied().collect();
            let mut txs = Vec::new();
            let mut tys = Vec::new();
            for i in 0..xs.len() {
                if !hold_set.contains(&i) {
                    txs.push(xs[i].clone());
                    tys.push(ys[i]);
                }
            }
            if tys.iter().all(|&y| y) || tys.iter().all(|&y| !y) {
                continue;
            }
            let (model, _) = svm::fit(&txs, &tys, lambda, config.svm_max_epochs);
            for &i in &hold {
                counted += 1;
                if (model.predict(&xs[i]) > 0.5) == ys[i] {
                    correct += 1;
                }
            }
        }
        if counted == 0 {
            continue;
        }
        let acc = correct as f64 / counted as f64;
        if acc > best_acc {
            best_acc = acc;
            best_lambda = lambda;
        }
    }
    best_lambda
}

/// Train the two-stage cascade from a random-sampled set and a hard
/// (emulated-large style) set.
pub fn train_cascade(
    ds_random: &PairDataset,
    ds_hard: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedModel, ModelError> {
    let random_examples = featurize_pairs(ds_random, sn1, sn2, fz)?;
    let hard_examples = featurize_pairs(ds_hard, sn1, sn2, fz)?;
    let n_positives = check_two_classes(&random_examples)?;
    check_two_classes(&hard_examples)?;

    let model = cascade::fit(&random_examples, &hard_examples, config.stage1_threshold)?;
    let mut dataset_provenance = provenance_counts(ds_random);
    for (k, v) in provenance_counts(ds_hard) {
        *dataset_provenance.entry(k).or_insert(0) += v;
    }
    Ok(TrainedModel {
        kind: ModelKind::Cascade(model),
        missing_strategy: MissingStrategy::SkipFeature,
        manifest: TrainingManifest {
            family: "naive_bayes_cascade".to_string(),
            seed,
            n_examples: random_examples.len() + hard_examples.len(),
            n_positives,
            dataset_provenance,
            hyperparameters: serde_json::json!({
                "stage1_threshold": config.stage1_threshold,
            }),
        },
    })
}

const MAGIC: &str = "ACIDMATCH-MODEL v1";

pub(crate) fn write_container<T: Serialize>(value: &T, path: &Path) -> Result<(), ModelError> {
    let body = serde_json::to_string_pretty(value).expect("models serialize");
    fs::write(path, format!("{MAGIC}\n{body}\n")).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub(crate) fn read_container<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ModelError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: display.clone(),
        source: e,
    })?;
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| ModelError::CorruptFile {
            path: display.clone(),
        })?;
    let header = header.trim_end();
    if header != MAGIC {
        if header.starts_with("ACIDMATCH-MODEL") {
            return Err(ModelError::VersionMismatch {
                path: display,
                found: header.to_string(),
                expected: MAGIC.to_string(),
            });
        }
        return Err(ModelError::CorruptFile { path: display });
    }
    serde_json::from_str(body).map_err(|e| ModelError::MalformedBody {
        path: display,
        message: e.to_string(),
    })
}

/// Write a model in the versioned container format.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), ModelError> {
    write_container(model, path)
}

/// Read a model back; rejects wrong magic and version drift explicitly.
pub fn load_model(path: &Path) -> Result<TrainedModel, ModelError> {
    read_container(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(slots: [Option<f64>; 5]) -> FeatureVector {
        FeatureVector::new(slots)
    }

    fn separable() -> Vec<(FeatureVector, bool)> {
        let mut ex = Vec::new();
        for i in 0..12 {
            let j = i as f64 * 0.002;
            ex.push((
                fv([Some(1.0 - j), Some(1.0), Some(1.0 - j), Some(1.0), Some(5.0)]),
                true,
            ));
            ex.push((
                fv([Some(0.0 + j), Some(0.0), Some(0.0 + j), Some(0.0), Some(0.0)]),
                false,
            ));
        }
        ex
    }

    #[test]
    fn every_family_separates_the_toy_set() {
        let examples = separable();
        for family in ClassifierFamily::ALL {
            let model = train_on_examples(
                family,
                &examples,
                BTreeMap::new(),
                &TrainConfig {
                    svm_lambda: Some(1e-3),
                    ..TrainConfig::default()
                },
                7,
            )
            .unwrap();
            for (x, y) in &examples {
                assert_eq!(
                    model.predict_proba(x) > 0.5,
                    *y,
                    "family {family} misclassifies {x:?}"
                );
            }
            assert_eq!(model.missing_strategy, family.strategy());
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let examples: Vec<(FeatureVector, bool)> = separable()
            .into_iter()
            .filter(|(_, y)| *y)
            .collect();
        assert!(matches!(
            train_on_examples(
                ClassifierFamily::NaiveBayesKde,
                &examples,
                BTreeMap::new(),
                &TrainConfig::default(),
                0,
            ),
            Err(ModelError::SingleClass { .. })
        ));
    }

    #[test]
    fn prototype_positive_scores_high() {
        let examples = separable();
        let model = train_on_examples(
            ClassifierFamily::NaiveBayesKde,
            &examples,
            BTreeMap::new(),
            &TrainConfig::default(),
            7,
        )
        .unwrap();
        let p = model.predict_proba(&fv([
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(1.0),
            Some(5.0),
        ]));
        assert!(p > 0.99, "p = {p}");
    }

    #[test]
    fn all_missing_inputs_are_finite_for_every_family() {
        let examples = separable();
        for family in ClassifierFamily::ALL {
            let model = train_on_examples(
                family,
                &examples,
                BTreeMap::new(),
                &TrainConfig {
                    svm_lambda: Some(1e-3),
                    ..TrainConfig::default()
                },
                7,
            )
            .unwrap();
            let p = model.predict_proba(&FeatureVector::all_missing());
            assert!((0.0..=1.0).contains(&p), "family {family}: p = {p}");
        }
    }

    #[test]
    fn svm_missing_values_impute_negative_one() {
        let inputs = SvmModel::inputs(&FeatureVector::all_missing());
        assert_eq!(inputs, vec![-1.0; 5]);
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let examples = separable();
        for family in ClassifierFamily::ALL {
            let cfg = TrainConfig::default();
            let a = train_on_examples(family, &examples, BTreeMap::new(), &cfg, 42).unwrap();
            let b = train_on_examples(family, &examples, BTreeMap::new(), &cfg, 42).unwrap();
            assert_eq!(a, b, "family {family} not deterministic");
        }
    }

    #[test]
    fn model_file_round_trips_with_identical_predictions() {
        let examples = separable();
        let model = train_on_examples(
            ClassifierFamily::LinearSvm,
            &examples,
            BTreeMap::new(),
            &TrainConfig {
                svm_lambda: Some(1e-2),
                ..TrainConfig::default()
            },
            3,
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&model, f.path()).unwrap();
        let loaded = load_model(f.path()).unwrap();
        assert_eq!(model, loaded);

        let mut rng = crate::rng::stream(5, "roundtrip-vectors");
        use rand::Rng;
        for _ in 0..1000 {
            let slots: [Option<f64>; 5] = std::array::from_fn(|i| {
                if rng.random_bool(0.8) {
                    Some(if i == 4 {
                        rng.random_range(0.0..20.0_f64).floor()
                    } else {
                        rng.random_range(0.0..1.0)
                    })
                } else {
                    None
                }
            });
            let v = fv(slots);
            assert_eq!(
                model.predict_proba(&v).to_bits(),
                loaded.predict_proba(&v).to_bits()
            );
        }
    }

    #[test]
    fn wrong_magic_and_wrong_version_are_distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.model");
        std::fs::write(&bad, "not a model\n{}").unwrap();
        assert!(matches!(
            load_model(&bad),
            Err(ModelError::CorruptFile { .. })
        ));

        let old = dir.path().join("old.model");
        std::fs::write(&old, "ACIDMATCH-MODEL v0\n{}").unwrap();
        assert!(matches!(
            load_model(&old),
            Err(ModelError::VersionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn probabilities_always_in_unit_interval(
            a in proptest::option::of(0.0..1.0f64),
            b in proptest::option::of(0.0..1.0f64),
            c in proptest::option::of(0.0..1.0f64),
            d in proptest::option::of(0.0..1.0f64),
            e in proptest::option::of(0.0..50.0f64),
        ) {
            let examples = separable();
            let cfg = TrainConfig { svm_lambda: Some(1e-3), ..TrainConfig::default() };
            let v = fv([a, b, c, d, e.map(f64::floor)]);
            for family in ClassifierFamily::ALL {
                let model =
                    train_on_examples(family, &examples, BTreeMap::new(), &cfg, 1).unwrap();
                let p = model.predict_proba(&v);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
