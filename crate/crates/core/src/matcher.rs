//! End-to-end matching modes.
//!
//! Generic mode declares every candidate whose match probability clears a
//! threshold and may return several profiles. The at-most-one-match mode
//! returns the topmatch only when a second-stage confidence estimator,
//! fed `p_1st` and the gap to `p_2nd`, clears its own threshold; otherwise
//! it abstains. Both high-and-close probabilities (an impersonator next to
//! the real profile) and low-and-close ones (no matching profile at all)
//! produce small gaps and abstention.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::{candidate_set, BlockingIndex, CandidateSet};
use crate::classifiers::logistic::{self, DenseLogistic};
use crate::classifiers::{self, ModelError, TrainedModel};
use crate::corpus::{Corpus, GroundTruth, Profile};
use crate::features::Featurizer;

#[derive(Debug, Error)]
pub enum MatcherError {
    #[error("p_1st {p1} < p_2nd {p2} violates the topmatch ordering")]
    OrderingViolation { p1: f64, p2: f64 },
    #[error("confidence training set is empty")]
    EmptyTrainingSet,
    #[error("confidence training set contains a single class")]
    SingleClass,
    #[error("pair references unknown profile `{id}`")]
    UnresolvedId { id: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv error on {path}: {message}")]
    Csv { path: String, message: String },
}

/// Outcome of the at-most-one-match pipeline for one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub probe_id: String,
    pub outcome: Outcome,
    pub p_1st: f64,
    pub p_2nd: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Matched(String),
    Abstain,
}

impl MatchDecision {
    pub fn matched_id(&self) -> Option<&str> {
        match &self.outcome {
            Outcome::Matched(id) => Some(id),
            Outcome::Abstain => None,
        }
    }
}

/// Generic pairwise matching: all candidates with probability above `th_p`,
/// most probable first. May be empty, may contain several profiles.
pub fn match_generic(
    a1: &Profile,
    index: &BlockingIndex,
    sn2: &Corpus,
    model: &TrainedModel,
    fz: &Featurizer,
    th_p: f64,
    min_sim: f64,
    cap: usize,
) -> Vec<(String, f64)> {
    let cs = candidate_set(a1, index, min_sim, cap);
    let mut out: Vec<(String, f64)> = cs
        .entries()
        .iter()
        .filter_map(|c| {
            let a2 = sn2.get(&c.sn2_id).expect("candidate ids resolve in sn2");
            let p = model.predict_proba(&fz.featurize(a1, a2));
            (p > th_p).then(|| (c.sn2_id.clone(), p))
        })
        .collect();
    // Stable sort: ties keep candidate order (blocking sim, then id).
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("probabilities are finite"));
    out
}

/// The candidate with the highest match probability, with the runner-up
/// probability. Ties break toward higher blocking similarity, then
/// lexicographically smaller id (the candidate order).
pub struct TopMatch {
    pub sn2_id: String,
    pub p_1st: f64,
    pub p_2nd: f64,
}

pub fn top_match(
    a1: &Profile,
    candidates: &CandidateSet,
    sn2: &Corpus,
    model: &TrainedModel,
    fz: &Featurizer,
) -> Option<TopMatch> {
    let mut best: Option<(usize, f64)> = None;
    let mut probs = Vec::with_capacity(candidates.len());
    for (i, c) in candidates.entries().iter().enumerate() {
        let a2 = sn2.get(&c.sn2_id).expect("candidate ids resolve in sn2");
        let p = model.predict_proba(&fz.featurize(a1, a2));
        probs.push(p);
        match best {
            Some((_, bp)) if p <= bp => {}
            _ => best = Some((i, p)),
        }
    }
    let (best_idx, p_1st) = best?;
    let p_2nd = probs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best_idx)
        .map(|(_, &p)| p)
        .fold(0.0, f64::max);
    Some(TopMatch {
        sn2_id: candidates.entries()[best_idx].sn2_id.clone(),
        p_1st,
        p_2nd,
    })
}

/// The confidence estimator's two inputs: `p_1st` and the gap to `p_2nd`.
pub fn confidence_features(p_1st: f64, p_2nd: f64) -> Result<(f64, f64), MatcherError> {
    if p_1st < p_2nd {
        return Err(MatcherError::OrderingViolation { p1: p_1st, p2: p_2nd });
    }
    Ok((p_1st, p_1st - p_2nd))
}

/// Logistic regression over `(p_1st, p_1st - p_2nd)` estimating the
/// probability that a topmatch is the true matching profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceModel {
    pub core: DenseLogistic,
    pub n_train: usize,
    pub seed: u64,
}

impl ConfidenceModel {
    pub fn confidence(&self, p_1st: f64, p_2nd: f64) -> Result<f64, MatcherError> {
        let (p1, gap) = confidence_features(p_1st, p_2nd)?;
        Ok(self.core.predict(&[p1, gap]))
    }
}

/// One labeled topmatch decision for confidence training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledDecision {
    pub p_1st: f64,
    pub p_2nd: f64,
    pub topmatch_is_true: bool,
}

pub fn train_confidence(
    decisions: &[LabeledDecision],
    seed: u64,
) -> Result<ConfidenceModel, MatcherError> {
    if decisions.is_empty() {
        return Err(MatcherError::EmptyTrainingSet);
    }
    let positives = decisions.iter().filter(|d| d.topmatch_is_true).count();
    if positives == 0 || positives == decisions.len() {
        return Err(MatcherError::SingleClass);
    }
    let mut xs = Vec::with_capacity(decisions.len());
    let mut ys = Vec::with_capacity(decisions.len());
    for d in decisions {
        let (p1, gap) = confidence_features(d.p_1st, d.p_2nd)?;
        xs.push(vec![p1, gap]);
        ys.push(d.topmatch_is_true);
    }
    let core = logistic::fit(&xs, &ys, 1e-4, 4000);
    Ok(ConfidenceModel {
        core,
        n_train: decisions.len(),
        seed,
    })
}

/// Run the topmatch over labeled probes to produce confidence training
/// decisions. Probes with an empty candidate set yield nothing (there is no
/// topmatch to label).
pub fn generate_confidence_training(
    probes: &[&Profile],
    index: &BlockingIndex,
    sn2: &Corpus,
    gt: &GroundTruth,
    linker: &TrainedModel,
    fz: &Featurizer,
    min_sim: f64,
    cap: usize,
) -> Vec<LabeledDecision> {
    probes
        .iter()
        .filter_map(|probe| {
            let cs = candidate_set(probe, index, min_sim, cap);
            let top = top_match(probe, &cs, sn2, linker, fz)?;
            Some(LabeledDecision {
                p_1st: top.p_1st,
                p_2nd: top.p_2nd,
                topmatch_is_true: gt.is_match(&probe.profile_id, &top.sn2_id),
            })
        })
        .collect()
}

/// The full at-most-one-match pipeline for one probe: candidates ->
/// topmatch -> confidence -> match or abstain. An empty candidate set
/// abstains with zero probabilities.
pub fn match_unique(
    a1: &Profile,
    index: &BlockingIndex,
    sn2: &Corpus,
    linker: &TrainedModel,
    confidence: &ConfidenceModel,
    fz: &Featurizer,
    th_q: f64,
    min_sim: f64,
    cap: usize,
) -> MatchDecision {
    let cs = candidate_set(a1, index, min_sim, cap);
    let Some(top) = top_match(a1, &cs, sn2, linker, fz) else {
        return MatchDecision {
            probe_id: a1.profile_id.clone(),
            outcome: Outcome::Abstain,
            p_1st: 0.0,
            p_2nd: 0.0,
            confidence: 0.0,
        };
    };
    let q = confidence
        .confidence(top.p_1st, top.p_2nd)
        .expect("top_match output is ordered");
    MatchDecision {
        probe_id: a1.profile_id.clone(),
        outcome: if q > th_q {
            Outcome::Matched(top.sn2_id)
        } else {
            Outcome::Abstain
        },
        p_1st: top.p_1st,
        p_2nd: top.p_2nd,
        confidence: q,
    }
}

/// Decisions CSV: `probe_id,outcome,matched_id,p1,p2,q`.
pub fn save_decisions(decisions: &[MatchDecision], path: &Path) -> Result<(), MatcherError> {
    let to_err = |e: csv::Error| MatcherError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(["probe_id", "outcome", "matched_id", "p1", "p2", "q"])
        .map_err(to_err)?;
    for d in decisions {
        let outcome = match &d.outcome {
            Outcome::Matched(_) => "matched",
            Outcome::Abstain => "abstain",
        };
        w.write_record([
            d.probe_id.as_str(),
            outcome,
            d.matched_id().unwrap_or(""),
            &format!("{:.6}", d.p_1st),
            &format!("{:.6}", d.p_2nd),
            &format!("{:.6}", d.confidence),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| MatcherError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn save_confidence(model: &ConfidenceModel, path: &Path) -> Result<(), ModelError> {
    classifiers::write_container(model, path)
}

pub fn load_confidence(path: &Path) -> Result<ConfidenceModel, ModelError> {
    classifiers::read_container(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::build_name_index;
    use crate::classifiers::{train_on_examples, ClassifierFamily, TrainConfig};
    use crate::corpus::Friend;
    use crate::features::FeatureVector;
    use std::collections::BTreeMap;

    fn profile(id: &str, name: &str, screen: &str, friends: &[&str]) -> Profile {
        Profile {
            profile_id: id.into(),
            network_id: "sn".into(),
            real_name: Some(name.into()),
            screen_name: screen.into(),
            location: None,
            photo: None,
            friends: Some(
                friends
                    .iter()
                    .map(|f| Friend {
                        real_name: None,
                        screen_name: (*f).into(),
                    })
                    .collect(),
            ),
            is_impersonator_of: None,
        }
    }

    /// Name-similarity-driven linker trained on a tiny synthetic set.
    fn toy_linker() -> TrainedModel {
        let fv = |rn: f64, sn: f64, fr: f64| {
            FeatureVector::new([Some(rn), Some(sn), None, None, Some(fr)])
        };
        let mut examples = Vec::new();
        for i in 0..10 {
            let j = i as f64 * 0.006;
            examples.push((fv(1.0 - j, 1.0 - j, 3.0), true));
            examples.push((fv(0.3 + j, 0.2 + j, 0.0), false));
        }
        train_on_examples(
            ClassifierFamily::NaiveBayesKde,
            &examples,
            BTreeMap::new(),
            &TrainConfig::default(),
            1,
        )
        .unwrap()
    }

    fn toy_confidence() -> ConfidenceModel {
        // True topmatches: high p1, large gap. False: either both high and
        // close, or both low.
        let mut decisions = Vec::new();
        for i in 0..12 {
            let j = i as f64 * 0.002;
            decisions.push(LabeledDecision {
                p_1st: 0.97 - j,
                p_2nd: 0.2 + j,
                topmatch_is_true: true,
            });
            decisions.push(LabeledDecision {
                p_1st: 0.95 - j,
                p_2nd: 0.93 - j,
                topmatch_is_true: false,
            });
            decisions.push(LabeledDecision {
                p_1st: 0.3 + j,
                p_2nd: 0.28 + j,
                topmatch_is_true: false,
            });
        }
        train_confidence(&decisions, 3).unwrap()
    }

    #[test]
    fn confidence_features_arithmetic() {
        assert_eq!(confidence_features(0.99, 0.10).unwrap(), (0.99, 0.89));
        let (p1, gap) = confidence_features(0.95, 0.94).unwrap();
        assert!((p1 - 0.95).abs() < 1e-12 && (gap - 0.01).abs() < 1e-12);
        let (p1, gap) = confidence_features(0.30, 0.28).unwrap();
        assert!((p1 - 0.30).abs() < 1e-12 && (gap - 0.02).abs() < 1e-12);
        assert!(matches!(
            confidence_features(0.5, 0.6),
            Err(MatcherError::OrderingViolation { .. })
        ));
    }

    #[test]
    fn top_match_orders_and_breaks_ties() {
        let linker = toy_linker();
        let fz = Featurizer::default();
        let probe = profile("a0", "Greta Oak", "gretao", &["x", "y", "z"]);
        let sn2 = Corpus::from_profiles(vec![
            profile("b1", "Greta Oak", "gretao", &["x", "y", "z"]),
            profile("b2", "Greta Oaks", "gretaoak", &[]),
        ])
        .unwrap();
        let index = build_name_index(&sn2);
        let cs = candidate_set(&probe, &index, 0.5, 10);

        let top = top_match(&probe, &cs, &sn2, &linker, &fz).unwrap();
        assert_eq!(top.sn2_id, "b1");
        assert!(top.p_1st >= top.p_2nd);
        assert!(top.p_2nd > 0.0);

        // Singleton candidate set: p_2nd = 0.
        let sn2_single = Corpus::from_profiles(vec![profile(
            "b1",
            "Greta Oak",
            "gretao",
            &["x", "y", "z"],
        )])
        .unwrap();
        let index1 = build_name_index(&sn2_single);
        let cs1 = candidate_set(&probe, &index1, 0.5, 10);
        let top1 = top_match(&probe, &cs1, &sn2_single, &linker, &fz).unwrap();
        assert_eq!(top1.p_2nd, 0.0);
    }

    #[test]
    fn exact_probability_ties_resolve_by_candidate_order() {
        let linker = toy_linker();
        let fz = Featurizer::default();
        let probe = profile("a0", "Greta Oak", "gretao", &["x"]);
        // Identical twins: identical features, identical p. The candidate
        // order (ascending id among equal blocking sims) decides.
        let sn2 = Corpus::from_profiles(vec![
            profile("twin_b", "Greta Oak", "gretao", &["x"]),
            profile("twin_a", "Greta Oak", "gretao", &["x"]),
        ])
        .unwrap();
        let index = build_name_index(&sn2);
        let cs = candidate_set(&probe, &index, 0.5, 10);
        for _ in 0..3 {
            let top = top_match(&probe, &cs, &sn2, &linker, &fz).unwrap();
            assert_eq!(top.sn2_id, "twin_a");
            assert_eq!(top.p_1st, top.p_2nd);
        }
    }

    #[test]
    fn match_generic_filters_and_sorts() {
        let linker = toy_linker();
        let fz = Featurizer::default();
        let probe = profile("a0", "Greta Oak", "gretao", &["x", "y", "z"]);
        let sn2 = Corpus::from_profiles(vec![
            profile("b1", "Greta Oak", "gretao", &["x", "y", "z"]),
            profile("b2", "Greta Oak", "gretaoo", &["x", "y", "z"]),
            profile("b3", "Greta Wolf", "wolfg", &[]),
        ])
        .unwrap();
        let index = build_name_index(&sn2);

        let out = match_generic(&probe, &index, &sn2, &linker, &fz, 0.9, 0.5, 100);
        assert!(out.len() >= 2, "name twins both exceed the threshold");
        assert!(out.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!(out.iter().all(|(_, p)| *p > 0.9));
        let ids: Vec<&str> = out.iter().map(|(id, _)| id.as_str()).collect();
        assert!(ids.contains(&"b1") && ids.contains(&"b2"));
        assert!(!ids.contains(&"b3"), "dissimilar profile stays out");
        // Deterministic across invocations.
        assert_eq!(
            out,
            match_generic(&probe, &index, &sn2, &linker, &fz, 0.9, 0.5, 100)
        );

        // Empty candidate set -> empty output.
        let lonely = profile("a9", "Qqqq Vvvv", "qv999x", &[]);
        assert!(match_generic(&lonely, &index, &sn2, &linker, &fz, 0.5, 0.98, 100).is_empty());
    }

    #[test]
    fn match_unique_decides_and_abstains() {
        let linker = toy_linker();
        let conf = toy_confidence();
        let fz = Featurizer::default();

        // Clear unique match.
        let probe = profile("a0", "Greta Oak", "gretao", &["x", "y", "z"]);
        let sn2 = Corpus::from_profiles(vec![
            profile("b1", "Greta Oak", "gretao", &["x", "y", "z"]),
            profile("b2", "Boris Elm", "belm", &[]),
        ])
        .unwrap();
        let index = build_name_index(&sn2);
        let d = match_unique(&probe, &index, &sn2, &linker, &conf, &fz, 0.5, 0.5, 100);
        assert_eq!(d.matched_id(), Some("b1"));
        assert!(d.confidence > 0.5);
        assert!(d.p_1st >= d.p_2nd);

        // Impersonator twin: both probabilities high, tiny gap -> abstain.
        let sn2_twin = Corpus::from_profiles(vec![
            profile("b1", "Greta Oak", "gretao", &["x", "y", "z"]),
            profile("imp", "Greta Oak", "gretao", &["x", "y", "z"]),
        ])
        .unwrap();
        let index_twin = build_name_index(&sn2_twin);
        let d = match_unique(&probe, &index_twin, &sn2_twin, &linker, &conf, &fz, 0.5, 0.5, 100);
        assert_eq!(d.outcome, Outcome::Abstain);
        assert!(d.p_1st > 0.9 && (d.p_1st - d.p_2nd) < 0.02);

        // Empty candidate set -> abstain with zeroed probabilities.
        let lonely = profile("a9", "Qqqq Vvvv", "qv999x", &[]);
        let d = match_unique(&lonely, &index, &sn2, &linker, &conf, &fz, 0.5, 0.98, 100);
        assert_eq!(
            d,
            MatchDecision {
                probe_id: "a9".into(),
                outcome: Outcome::Abstain,
                p_1st: 0.0,
                p_2nd: 0.0,
                confidence: 0.0,
            }
        );
    }

    #[test]
    fn confidence_training_separates_and_validates() {
        let conf = toy_confidence();
        // Separated training scenario accuracy.
        assert!(conf.confidence(0.97, 0.2).unwrap() > 0.5);
        assert!(conf.confidence(0.95, 0.93).unwrap() < 0.5);
        assert!(conf.confidence(0.3, 0.28).unwrap() < 0.5);

        assert!(matches!(
            train_confidence(&[], 0),
            Err(MatcherError::EmptyTrainingSet)
        ));
        let one_class = vec![
            LabeledDecision {
                p_1st: 0.9,
                p_2nd: 0.1,
                topmatch_is_true: true,
            };
            4
        ];
        assert!(matches!(
            train_confidence(&one_class, 0),
            Err(MatcherError::SingleClass)
        ));
    }

    #[test]
    fn confidence_model_round_trips() {
        let conf = toy_confidence();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_confidence(&conf, f.path()).unwrap();
        let loaded = load_confidence(f.path()).unwrap();
        assert_eq!(conf, loaded);
    }

    #[test]
    fn decisions_csv_has_documented_header() {
        let decisions = vec![
            MatchDecision {
                probe_id: "a0".into(),
                outcome: Outcome::Matched("b1".into()),
                p_1st: 0.9,
                p_2nd: 0.1,
                confidence: 0.8,
            },
            MatchDecision {
                probe_id: "a1".into(),
                outcome: Outcome::Abstain,
                p_1st: 0.4,
                p_2nd: 0.39,
                confidence: 0.2,
            },
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        save_decisions(&decisions, f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("probe_id,outcome,matched_id,p1,p2,q"));
        assert!(lines.next().unwrap().starts_with("a0,matched,b1,"));
        assert!(lines.next().unwrap().starts_with("a1,abstain,,"));
    }
}
