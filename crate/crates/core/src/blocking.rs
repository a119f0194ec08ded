//! Name-search emulation: an inverted index over folded real names and
//! screen names with a guaranteed recall floor.
//!
//! The index answers "all sn2 profiles whose real-name or screen-name Jaro
//! similarity to the query is at least `min_sim`" exactly, without scanning
//! the whole corpus with the full Jaro metric. Candidates are pre-filtered
//! by a counting bound: Jaro `>= s` forces the number of matched characters
//! `m` to satisfy `m/|q| + m/|x| >= 3s - 1`, and `m` never exceeds the
//! character multiset intersection. Profiles below the bound cannot reach
//! `min_sim`, so filtering on shared-character counts loses nothing;
//! survivors are then scored with the exact Jaro metric. Character postings
//! (rather than the more selective trigram postings) are what makes the
//! floor provable: high-Jaro pairs with zero shared trigrams exist.
//!
//! Comparisons are field to field: a probe's real name is compared to
//! candidate real names and its screen name to candidate screen names.

use std::collections::HashMap;

use crate::corpus::{Corpus, Profile};
use crate::similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameField {
    RealName,
    ScreenName,
}

/// Default similarity floor for candidate retrieval.
pub const DEFAULT_MIN_SIM: f64 = 0.5;

/// Default cap on candidate set size.
pub const DEFAULT_CAP: usize = 1000;

struct FieldIndex {
    /// Folded field value per profile; `None` when the field is absent.
    folded: Vec<Option<Vec<char>>>,
    /// char -> (profile index, occurrences of the char in that profile).
    postings: HashMap<char, Vec<(u32, u16)>>,
    /// Exact folded string -> profiles, the fast path for duplicates.
    exact: HashMap<String, Vec<u32>>,
}

impl FieldIndex {
    fn build<'a>(values: impl Iterator<Item = Option<&'a str>>) -> Self {
        let mut folded = Vec::new();
        let mut postings: HashMap<char, Vec<(u32, u16)>> = HashMap::new();
        let mut exact: HashMap<String, Vec<u32>> = HashMap::new();
        for (i, value) in values.enumerate() {
            let idx = i as u32;
            match value {
                Some(s) => {
                    let chars = similarity::fold(s);
                    if chars.is_empty() {
                        folded.push(None);
                        continue;
                    }
                    let mut counts: HashMap<char, u16> = HashMap::new();
                    for &c in &chars {
                        *counts.entry(c).or_insert(0) += 1;
                    }
                    for (c, n) in counts {
                        postings.entry(c).or_default().push((idx, n));
                    }
                    exact.entry(chars.iter().collect()).or_default().push(idx);
                    folded.push(Some(chars));
                }
                None => folded.push(None),
            }
        }
        FieldIndex {
            folded,
            postings,
            exact,
        }
    }

    /// All profiles with Jaro similarity >= min_sim to `query`, with their
    /// exact similarities. Exact and complete for min_sim > 0; min_sim <= 0
    /// degenerates to a full scan.
    fn query(&self, query: &str, min_sim: f64) -> Vec<(u32, f64)> {
        let q = similarity::fold(query);
        if q.is_empty() {
            return Vec::new();
        }
        if min_sim <= 0.0 {
            return self
                .folded
                .iter()
                .enumerate()
                .filter_map(|(i, x)| {
                    x.as_ref()
                        .map(|chars| (i as u32, similarity::jaro_folded(&q, chars)))
                })
                .collect();
        }

        let mut q_counts: HashMap<char, u16> = HashMap::new();
        for &c in &q {
            *q_counts.entry(c).or_insert(0) += 1;
        }

        // Shared-character counts (multiset intersection) per candidate.
        let mut shared: HashMap<u32, u32> = HashMap::new();
        for (&c, &qn) in &q_counts {
            if let Some(list) = self.postings.get(&c) {
                for &(idx, xn) in list {
                    *shared.entry(idx).or_insert(0) += qn.min(xn) as u32;
                }
            }
        }

        let lq = q.len() as f64;
        let needed = 3.0 * min_sim - 1.0;
        let mut out = Vec::new();
        for (idx, m_ub) in shared {
            let chars = self.folded[idx as usize]
                .as_ref()
                .expect("posted profiles have the field");
            let lx = chars.len() as f64;
            // Jaro >= min_sim requires m*(1/lq + 1/lx) >= 3*min_sim - 1.
            if (m_ub as f64) * (1.0 / lq + 1.0 / lx) < needed - 1e-9 {
                continue;
            }
            let sim = similarity::jaro_folded(&q, chars);
            if sim >= min_sim {
                out.push((idx, sim));
            }
        }
        out
    }

    /// Whether any profile not rejected by `keep` has Jaro similarity
    /// strictly above `th` to `query`. Checks exact duplicates first.
    fn any_above(&self, query: &str, th: f64, keep: &dyn Fn(u32) -> bool) -> bool {
        let q = similarity::fold(query);
        if q.is_empty() {
            return false;
        }
        if th < 1.0 {
            let key: String = q.iter().collect();
            if let Some(dups) = self.exact.get(&key) {
                if dups.iter().any(|&i| keep(i)) {
                    return true;
                }
            }
        }
        self.query(query, th)
            .into_iter()
            .any(|(idx, sim)| sim > th && keep(idx))
    }
}

/// Inverted index over both name fields of one corpus.
pub struct BlockingIndex {
    ids: Vec<String>,
    real: FieldIndex,
    screen: FieldIndex,
}

/// Candidate profiles for one probe, ordered by nonincreasing blocking
/// similarity (ties broken by ascending id).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub probe_id: String,
    entries: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub sn2_id: String,
    pub blocking_sim: f64,
}

impl CandidateSet {
    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, sn2_id: &str) -> bool {
        self.entries.iter().any(|c| c.sn2_id == sn2_id)
    }
}

/// Build the name index over a corpus.
pub fn build_name_index(sn2: &Corpus) -> BlockingIndex {
    let ids: Vec<String> = sn2.iter().map(|p| p.profile_id.clone()).collect();
    let real = FieldIndex::build(sn2.iter().map(|p| p.real_name.as_deref()));
    let screen = FieldIndex::build(sn2.iter().map(|p| Some(p.screen_name.as_str())));
    BlockingIndex { ids, real, screen }
}

impl BlockingIndex {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: u32) -> &str {
        &self.ids[idx as usize]
    }

    fn field(&self, field: NameField) -> &FieldIndex {
        match field {
            NameField::RealName => &self.real,
            NameField::ScreenName => &self.screen,
        }
    }

    /// All profiles whose `field` value has Jaro similarity >= min_sim to
    /// the query, with exact similarities.
    pub fn query_field(&self, field: NameField, query: &str, min_sim: f64) -> Vec<(u32, f64)> {
        self.field(field).query(query, min_sim)
    }

    /// True when some profile accepted by `keep` scores strictly above `th`
    /// on `field`. Used by the discriminability estimator; lossless for the
    /// same reason `query_field` is.
    pub fn any_field_above(
        &self,
        field: NameField,
        query: &str,
        th: f64,
        keep: &dyn Fn(&str) -> bool,
    ) -> bool {
        self.field(field)
            .any_above(query, th, &|idx| keep(&self.ids[idx as usize]))
    }
}

/// Retrieve, re-rank, and truncate the candidate set for one probe: all sn2
/// profiles whose real-name or screen-name Jaro similarity to the probe is
/// at least `min_sim`, ordered by the max of the two field similarities.
pub fn candidate_set(
    a1: &Profile,
    index: &BlockingIndex,
    min_sim: f64,
    cap: usize,
) -> CandidateSet {
    let mut best: HashMap<u32, f64> = HashMap::new();
    if let Some(rn) = &a1.real_name {
        for (idx, sim) in index.query_field(NameField::RealName, rn, min_sim) {
            let e = best.entry(idx).or_insert(0.0);
            if sim > *e {
                *e = sim;
            }
        }
    }
    for (idx, sim) in index.query_field(NameField::ScreenName, &a1.screen_name, min_sim) {
        let e = best.entry(idx).or_insert(0.0);
        if sim > *e {
            *e = sim;
        }
    }

    let mut entries: Vec<Candidate> = best
        .into_iter()
        .map(|(idx, sim)| Candidate {
            sn2_id: index.id(idx).to_string(),
            blocking_sim: sim,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.blocking_sim
            .partial_cmp(&a.blocking_sim)
            .expect("similarities are finite")
            .then_with(|| a.sn2_id.cmp(&b.sn2_id))
    });
    entries.truncate(cap);

    CandidateSet {
        probe_id: a1.profile_id.clone(),
        entries,
    }
}
