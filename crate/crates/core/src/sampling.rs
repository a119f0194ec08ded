//! Evaluation dataset construction.
//!
//! Two dataset shapes with very different reliability behavior:
//!
//! * Random-Sampled: the full cross product of a random sample of matching
//!   pairs. Preserves availability and consistency, wildly over-estimates
//!   discriminability.
//! * Emulated-Large: per probe, all name-search candidates from the full
//!   sn2 corpus. Preserves the name discriminability of the whole network,
//!   which is what collapses precision in practice.
//!
//! Plus the two training-set shapes: majority-class under-sampling and the
//! enriched set that adds hard negatives from Emulated-Large.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::blocking::{candidate_set, BlockingIndex};
use crate::corpus::{GroundTruth, Profile};
use crate::rng;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("ground truth has {have} pairs, need {need}")]
    InsufficientGroundTruth { have: usize, need: usize },
    #[error("dataset has no positive pairs")]
    NoPositives,
    #[error("dataset has no negative pairs")]
    NoNegatives,
    #[error("`{source_name}` has {have} negatives, need {need}")]
    InsufficientNegatives {
        source_name: &'static str,
        have: usize,
        need: usize,
    },
    #[error("`{source_name}` has {have} positives, need {need}")]
    InsufficientPositives {
        source_name: &'static str,
        have: usize,
        need: usize,
    },
    #[error("csv error on {path}: {message}")]
    Csv { path: String, message: String },
    #[error("unknown {field} `{value}` at {path}:{line}")]
    UnknownTag {
        field: &'static str,
        value: String,
        path: String,
        line: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    RandomSampled,
    EmulatedLarge,
    EnrichedTraining,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::RandomSampled => "random_sampled",
            Provenance::EmulatedLarge => "emulated_large",
            Provenance::EnrichedTraining => "enriched_training",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "random_sampled" => Some(Provenance::RandomSampled),
            "emulated_large" => Some(Provenance::EmulatedLarge),
            "enriched_training" => Some(Provenance::EnrichedTraining),
            _ => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub sn1_id: String,
    pub sn2_id: String,
    pub is_match: bool,
    pub provenance: Provenance,
}

/// An ordered list of labeled cross-corpus pairs with no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairDataset {
    pairs: Vec<LabeledPair>,
}

impl PairDataset {
    pub fn new(pairs: Vec<LabeledPair>) -> Self {
        debug_assert_eq!(
            pairs
                .iter()
                .map(|p| (&p.sn1_id, &p.sn2_id))
                .collect::<HashSet<_>>()
                .len(),
            pairs.len(),
            "duplicate pairs in dataset"
        );
        PairDataset { pairs }
    }

    pub fn pairs(&self) -> &[LabeledPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_match).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// Deterministic split of the dataset by pair count: the first fraction
    /// goes to train after a seeded shuffle, the rest to test.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (PairDataset, PairDataset) {
        let mut order: Vec<usize> = (0..self.pairs.len()).collect();
        order.shuffle(&mut rng::stream(seed, "dataset-split"));
        let cut = ((self.pairs.len() as f64) * train_fraction).round() as usize;
        let take = |idxs: &[usize]| {
            let mut sorted = idxs.to_vec();
            sorted.sort_unstable();
            PairDataset {
                pairs: sorted.iter().map(|&i| self.pairs[i].clone()).collect(),
            }
        };
        (take(&order[..cut]), take(&order[cut..]))
    }

    /// CSV with header `id1,id2,label,provenance`; labels are `match` /
    /// `non-match`.
    pub fn save(&self, path: &Path) -> Result<(), SampleError> {
        let to_err = |e: csv::Error| SampleError::Csv {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(to_err)?;
        w.write_record(["id1", "id2", "label", "provenance"])
            .map_err(to_err)?;
        for p in &self.pairs {
            w.write_record([
                p.sn1_id.as_str(),
                p.sn2_id.as_str(),
                if p.is_match { "match" } else { "non-match" },
                p.provenance.tag(),
            ])
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| SampleError::Csv {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, SampleError> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| SampleError::Csv {
            path: display.clone(),
            message: e.to_string(),
        })?;
        let mut pairs = Vec::new();
        for (i, row) in reader
            .deserialize::<(String, String, String, String)>()
            .enumerate()
        {
            let (id1, id2, label, provenance) = row.map_err(|e| SampleError::Csv {
                path: display.clone(),
                message: e.to_string(),
            })?;
            let is_match = match label.as_str() {
                "match" => true,
                "non-match" => false,
                other => {
                    return Err(SampleError::UnknownTag {
                        field: "label",
                        value: other.to_string(),
                        path: display,
                        line: i + 2,
                    })
                }
            };
            let provenance = Provenance::parse(&provenance).ok_or_else(|| {
                SampleError::UnknownTag {
                    field: "provenance",
                    value: provenance.clone(),
                    path: display.clone(),
                    line: i + 2,
                }
            })?;
            pairs.push(LabeledPair {
                sn1_id: id1,
                sn2_id: id2,
                is_match,
                provenance,
            });
        }
        Ok(PairDataset::new(pairs))
    }
}

/// Select `n_pos` matching pairs uniformly at random and emit all
/// `n_pos * n_pos` cross combinations: the selected pairs as positives,
/// everything else labeled from the ground truth.
pub fn build_random_sampled(
    gt: &GroundTruth,
    n_pos: usize,
    seed: u64,
) -> Result<PairDataset, SampleError> {
    if gt.len() < n_pos {
        return Err(SampleError::InsufficientGroundTruth {
            have: gt.len(),
            need: n_pos,
        });
    }
    let mut order: Vec<usize> = (0..gt.len()).collect();
    order.shuffle(&mut rng::stream(seed, "random-sampled"));
    let mut chosen: Vec<usize> = order[..n_pos].to_vec();
    chosen.sort_unstable();

    let selected: Vec<&(String, String)> = chosen.iter().map(|&i| &gt.pairs()[i]).collect();
    let mut pairs = Vec::with_capacity(n_pos * n_pos);
    for (id1, _) in &selected {
        for (_, id2) in &selected {
            pairs.push(LabeledPair {
                sn1_id: id1.clone(),
                sn2_id: id2.clone(),
                is_match: gt.is_match(id1, id2),
                provenance: Provenance::RandomSampled,
            });
        }
    }
    Ok(PairDataset::new(pairs))
}

/// Result of the reliability-preserving construction.
pub struct EmulatedLarge {
    pub dataset: PairDataset,
    /// Fraction of (probe, match) ground-truth pairs whose match landed in
    /// the probe's candidate set.
    pub containment_rate: f64,
}

/// Per probe, pair it with every name-search candidate and label from the
/// ground truth. Matching profiles that the search misses are excluded by
/// default; `include_unsampled_matches` forces them in for sensitivity runs.
pub fn build_emulated_large(
    probes: &[&Profile],
    index: &BlockingIndex,
    gt: &GroundTruth,
    min_sim: f64,
    cap: usize,
    include_unsampled_matches: bool,
) -> EmulatedLarge {
    let mut pairs = Vec::new();
    let mut with_match = 0usize;
    let mut contained = 0usize;
    for probe in probes {
        let cs = candidate_set(probe, index, min_sim, cap);
        let in_set: HashSet<&str> = cs.entries().iter().map(|c| c.sn2_id.as_str()).collect();
        for m in gt.matches_of(&probe.profile_id) {
            with_match += 1;
            if in_set.contains(m.as_str()) {
                contained += 1;
            } else if include_unsampled_matches {
                pairs.push(LabeledPair {
                    sn1_id: probe.profile_id.clone(),
                    sn2_id: m.clone(),
                    is_match: true,
                    provenance: Provenance::EmulatedLarge,
                });
            }
        }
        for c in cs.entries() {
            pairs.push(LabeledPair {
                sn1_id: probe.profile_id.clone(),
                sn2_id: c.sn2_id.clone(),
                is_match: gt.is_match(&probe.profile_id, &c.sn2_id),
                provenance: Provenance::EmulatedLarge,
            });
        }
    }
    let containment_rate = if with_match == 0 {
        0.0
    } else {
        contained as f64 / with_match as f64
    };
    EmulatedLarge {
        dataset: PairDataset::new(pairs),
        containment_rate,
    }
}

/// Keep all positives; sample negatives without replacement down to the
/// positive count. Never oversamples: an already-balanced or
/// positive-heavy dataset is returned unchanged.
pub fn undersample(ds: &PairDataset, seed: u64) -> Result<PairDataset, SampleError> {
    let n_pos = ds.positives();
    if n_pos == 0 {
        return Err(SampleError::NoPositives);
    }
    let neg_idx: Vec<usize> = ds
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_match)
        .map(|(i, _)| i)
        .collect();
    if neg_idx.len() <= n_pos {
        return Ok(ds.clone());
    }
    let mut order = neg_idx.clone();
    order.shuffle(&mut rng::stream(seed, "undersample"));
    let keep: HashSet<usize> = order[..n_pos].iter().copied().collect();
    let pairs = ds
        .pairs()
        .iter()
        .enumerate()
        .filter(|(i, p)| p.is_match || keep.contains(i))
        .map(|(_, p)| p.clone())
        .collect();
    Ok(PairDataset::new(pairs))
}

/// Training set with hard negatives: `n` positives and `n` negatives from
/// the random-sampled dataset plus `n` negatives from the emulated-large
/// dataset, deduplicated (so the total may fall short of `3n`).
pub fn build_enriched_training(
    random_ds: &PairDataset,
    emulated_ds: &PairDataset,
    n: usize,
    seed: u64,
) -> Result<PairDataset, SampleError> {
    let positives: Vec<&LabeledPair> = random_ds.pairs().iter().filter(|p| p.is_match).collect();
    if positives.len() < n {
        return Err(SampleError::InsufficientPositives {
            source_name: "random_sampled",
            have: positives.len(),
            need: n,
        });
    }
    let neg_random: Vec<&LabeledPair> =
        random_ds.pairs().iter().filter(|p| !p.is_match).collect();
    if neg_random.len() < n {
        return Err(SampleError::InsufficientNegatives {
            source_name: "random_sampled",
            have: neg_random.len(),
            need: n,
        });
    }
    let neg_hard: Vec<&LabeledPair> =
        emulated_ds.pairs().iter().filter(|p| !p.is_match).collect();
    if neg_hard.len() < n {
        return Err(SampleError::InsufficientNegatives {
            source_name: "emulated_large",
            have: neg_hard.len(),
            need: n,
        });
    }

    let sample = |items: &[&LabeledPair], k: usize, purpose: &str| -> Vec<LabeledPair> {
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.shuffle(&mut rng::stream(seed, purpose));
        let mut chosen: Vec<usize> = order[..k].to_vec();
        chosen.sort_unstable();
        chosen.iter().map(|&i| items[i].clone()).collect()
    };

    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut pairs = Vec::with_capacity(3 * n);
    for p in sample(&positives, n, "enriched-pos")
        .into_iter()
        .chain(sample(&neg_random, n, "enriched-neg-random"))
        .chain(sample(&neg_hard, n, "enriched-neg-hard"))
    {
        if seen.insert((p.sn1_id.clone(), p.sn2_id.clone())) {
            pairs.push(LabeledPair {
                provenance: Provenance::EnrichedTraining,
                ..p
            });
        }
    }
    Ok(PairDataset::new(pairs))
}
