//! ACID property estimation and the recall/precision identities.
//!
//! Availability A, consistency C, non-impersonability nI, and effective
//! discriminability D-tilde are per-attribute probabilities estimated from
//! labeled corpora. For the single-attribute threshold classifier ("declare
//! a match iff the similarity passes th; a missing similarity never passes")
//! the following hold as counting identities on any dataset:
//!
//! * recall = C * A
//! * precision <= recall / (recall + 1 - D_tilde) when each probe has at
//!   most one matching profile
//!
//! "Below th" in the discriminability definitions is operationalized as
//! "would not be declared a match at th" — that wording makes both
//! identities exact rather than approximate, including at ties.
//!
//! D (discriminability absent impersonation) conditions on probes that are
//! not impersonated, so it is only estimable on corpora carrying
//! impersonator labels; D_tilde is measured over all probes and all
//! non-matching profiles, impersonators included.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::blocking::{BlockingIndex, NameField};
use crate::corpus::{AttributeKind, Corpus, GroundTruth, Profile};
use crate::features::{Featurizer, ThresholdConfig};
use crate::similarity;

#[derive(Debug, Error)]
pub enum AcidError {
    #[error("ground truth is empty")]
    EmptyGroundTruth,
    #[error("no matching pair has `{0}` available on both sides")]
    NoAvailablePairs(AttributeKind),
    #[error("sn2 corpus is empty")]
    EmptyCorpus,
    #[error("corpus carries no impersonator labels")]
    NoImpersonatorLabels,
    #[error("{0}")]
    Domain(String),
    #[error("blocking acceleration is only lossless for name attributes, not `{0}`")]
    BlockingUnsupported(AttributeKind),
}

/// How to evaluate the per-probe maximum over non-matching profiles.
#[derive(Clone, Copy)]
pub enum Scan<'a> {
    /// Compare the probe against every sn2 profile.
    Exhaustive,
    /// Use the name index to find profiles above th; provably lossless for
    /// RealName and ScreenName only.
    NameIndex(&'a BlockingIndex),
}

fn domain_unit(value: f64, name: &str) -> Result<(), AcidError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(AcidError::Domain(format!("{name} = {value} outside [0,1]")))
    }
}

/// Fraction of matching pairs with the attribute available on both sides.
pub fn estimate_availability(
    gt: &GroundTruth,
    sn1: &Corpus,
    sn2: &Corpus,
    attr: AttributeKind,
) -> Result<f64, AcidError> {
    if gt.is_empty() {
        return Err(AcidError::EmptyGroundTruth);
    }
    let fz = Featurizer::default();
    let available = gt
        .pairs()
        .iter()
        .filter(|(id1, id2)| {
            let (a1, a2) = (resolve(sn1, id1), resolve(sn2, id2));
            fz.attribute_similarity(attr, a1, a2).is_some()
        })
        .count();
    Ok(available as f64 / gt.len() as f64)
}

/// Among matching pairs with the attribute available on both sides, the
/// fraction whose similarity passes th.
pub fn estimate_consistency(
    gt: &GroundTruth,
    sn1: &Corpus,
    sn2: &Corpus,
    attr: AttributeKind,
    th: &ThresholdConfig,
    fz: &Featurizer,
) -> Result<f64, AcidError> {
    let mut available = 0usize;
    let mut consistent = 0usize;
    for (id1, id2) in gt.pairs() {
        let (a1, a2) = (resolve(sn1, id1), resolve(sn2, id2));
        if let Some(sim) = fz.attribute_similarity(attr, a1, a2) {
            available += 1;
            if th.passes(attr, Some(sim), fz.kappa_km) {
                consistent += 1;
            }
        }
    }
    if available == 0 {
        return Err(AcidError::NoAvailablePairs(attr));
    }
    Ok(consistent as f64 / available as f64)
}

fn resolve<'c>(corpus: &'c Corpus, id: &str) -> &'c Profile {
    corpus.get(id).expect("ground-truth ids resolve")
}

/// Pre-folded attribute values for the exhaustive scan.
enum FoldedValues {
    Names(Vec<Option<Vec<char>>>),
    Coords(Vec<Option<(f64, f64)>>),
    Hashes(Vec<Option<u64>>),
    FriendLists(Vec<Option<Vec<crate::corpus::Friend>>>),
}

impl FoldedValues {
    fn prepare(attr: AttributeKind, profiles: &[&Profile]) -> FoldedValues {
        match attr {
            AttributeKind::RealName => FoldedValues::Names(
                profiles
                    .iter()
                    .map(|p| p.real_name.as_deref().map(similarity::fold))
                    .collect(),
            ),
            AttributeKind::ScreenName => FoldedValues::Names(
                profiles
                    .iter()
                    .map(|p| Some(similarity::fold(&p.screen_name)))
                    .collect(),
            ),
            AttributeKind::Location => FoldedValues::Coords(
                profiles
                    .iter()
                    .map(|p| p.location.as_ref().map(|l| (l.lat, l.lon)))
                    .collect(),
            ),
            AttributeKind::Photo => {
                FoldedValues::Hashes(profiles.iter().map(|p| p.photo).collect())
            }
            AttributeKind::Friends => FoldedValues::FriendLists(
                profiles.iter().map(|p| p.friends.clone()).collect(),
            ),
        }
    }

}

struct MaxScan<'a> {
    attr: AttributeKind,
    slot: crate::features::SlotThreshold,
    fz: Featurizer,
    probe_values: FoldedValues,
    sn2_values: FoldedValues,
    sn2_profiles: Vec<&'a Profile>,
    sn2_by_id: HashMap<&'a str, usize>,
    index: Option<&'a BlockingIndex>,
}

impl<'a> MaxScan<'a> {
    fn new(
        probes: &[&'a Profile],
        sn2: &'a Corpus,
        attr: AttributeKind,
        th: &ThresholdConfig,
        fz: &Featurizer,
        scan: Scan<'a>,
    ) -> Result<Self, AcidError> {
        let index = match scan {
            Scan::Exhaustive => None,
            Scan::NameIndex(ix) => {
                if !matches!(attr, AttributeKind::RealName | AttributeKind::ScreenName) {
                    return Err(AcidError::BlockingUnsupported(attr));
                }
                Some(ix)
            }
        };
        let sn2_profiles: Vec<&Profile> = sn2.iter().collect();
        let sn2_by_id = sn2_profiles
            .iter()
            .enumerate()
            .map(|(i, p)| (p.profile_id.as_str(), i))
            .collect();
        Ok(MaxScan {
            attr,
            slot: th.slot_threshold(attr, fz.kappa_km),
            fz: *fz,
            probe_values: FoldedValues::prepare(attr, probes),
            sn2_values: FoldedValues::prepare(attr, &sn2_profiles),
            sn2_profiles,
            sn2_by_id,
            index,
        })
    }

    /// Does any sn2 profile accepted by `keep` score above th against probe
    /// `p_idx`? Vacuously false over an empty set.
    fn any_above(&self, probe: &Profile, p_idx: usize, keep: &dyn Fn(&Profile) -> bool) -> bool {
        if let Some(index) = self.index {
            let field = match self.attr {
                AttributeKind::RealName => NameField::RealName,
                AttributeKind::ScreenName => NameField::ScreenName,
                _ => unreachable!("checked in new()"),
            };
            let query = match self.attr {
                AttributeKind::RealName => match &probe.real_name {
                    Some(rn) => rn.as_str(),
                    None => return false, // missing similarity never passes
                },
                _ => probe.screen_name.as_str(),
            };
            // Sim floors are strict (> th); the friends inclusive case never
            // reaches the index path.
            let by_id = |id: &str| -> bool {
                let idx = self.sn2_by_id[id];
                keep(self.sn2_profiles[idx])
            };
            return index.any_field_above(field, query, self.slot.floor, &by_id);
        }

        (0..self.sn2_profiles.len()).any(|j| {
            let x = self.sn2_profiles[j];
            if !keep(x) {
                return false;
            }
            match self.probe_sim(p_idx, j) {
                Some(sim) => self.slot.passes(sim),
                None => false,
            }
        })
    }

    fn probe_sim(&self, p_idx: usize, sn2_idx: usize) -> Option<f64> {
        match (&self.probe_values, &self.sn2_values) {
            (FoldedValues::Names(a), FoldedValues::Names(b)) => match (&a[p_idx], &b[sn2_idx]) {
                (Some(x), Some(y)) => Some(similarity::jaro_folded(x, y)),
                _ => None,
            },
            (FoldedValues::Coords(a), FoldedValues::Coords(b)) => match (a[p_idx], b[sn2_idx]) {
                (Some(x), Some(y)) => Some(similarity::location_similarity_with_kappa(
                    similarity::geodesic_km(x, y),
                    self.fz.kappa_km,
                )),
                _ => None,
            },
            (FoldedValues::Hashes(a), FoldedValues::Hashes(b)) => match (a[p_idx], b[sn2_idx]) {
                (Some(x), Some(y)) => Some(similarity::photo_similarity(
                    crate::phash::PerceptualHash::from_value(x),
                    crate::phash::PerceptualHash::from_value(y),
                )),
                _ => None,
            },
            (FoldedValues::FriendLists(a), FoldedValues::FriendLists(b)) => {
                match (&a[p_idx], &b[sn2_idx]) {
                    (Some(x), Some(y)) => Some(similarity::friends_overlap(x, y) as f64),
                    _ => None,
                }
            }
            _ => unreachable!("probe and sn2 values prepared for the same attribute"),
        }
    }

}

/// Effective discriminability: the fraction of probes for which no
/// non-matching sn2 profile (impersonators included) would be declared a
/// match at th.
pub fn estimate_discriminability(
    probes: &[&Profile],
    sn2: &Corpus,
    gt: &GroundTruth,
    attr: AttributeKind,
    th: &ThresholdConfig,
    fz: &Featurizer,
    scan: Scan<'_>,
) -> Result<f64, AcidError> {
    if sn2.is_empty() {
        return Err(AcidError::EmptyCorpus);
    }
    if probes.is_empty() {
        return Err(AcidError::Domain("no probes".into()));
    }
    let max_scan = MaxScan::new(probes, sn2, attr, th, fz, scan)?;

    let safe: usize = probes
        .par_iter()
        .enumerate()
        .map(|(i, probe)| {
            let matches: HashSet<&str> = gt
                .matches_of(&probe.profile_id)
                .iter()
                .map(String::as_str)
                .collect();
            let keep = |x: &Profile| !matches.contains(x.profile_id.as_str());
            usize::from(!max_scan.any_above(probe, i, &keep))
        })
        .sum();
    Ok(safe as f64 / probes.len() as f64)
}

/// Discriminability without impersonation: same maximum, but measured only
/// over probes that carry no impersonator in sn2. Requires impersonator
/// labels.
pub fn estimate_discriminability_non_impersonated(
    probes: &[&Profile],
    sn2: &Corpus,
    gt: &GroundTruth,
    attr: AttributeKind,
    th: &ThresholdConfig,
    fz: &Featurizer,
    scan: Scan<'_>,
) -> Result<f64, AcidError> {
    if sn2.impersonator_label_count() == 0 {
        return Err(AcidError::NoImpersonatorLabels);
    }
    let impersonated = impersonated_victims(sn2);
    let clean: Vec<&Profile> = probes
        .iter()
        .filter(|p| !impersonated.contains_key(p.profile_id.as_str()))
        .copied()
        .collect();
    if clean.is_empty() {
        return Err(AcidError::Domain(
            "every probe is impersonated; D is undefined".into(),
        ));
    }
    estimate_discriminability(&clean, sn2, gt, attr, th, fz, scan)
}

fn impersonated_victims(sn2: &Corpus) -> HashMap<&str, Vec<&Profile>> {
    let mut victims: HashMap<&str, Vec<&Profile>> = HashMap::new();
    for p in sn2.iter() {
        if let Some(victim) = &p.is_impersonator_of {
            victims.entry(victim.as_str()).or_default().push(p);
        }
    }
    victims
}

/// Non-impersonability and impersonation rate.
///
/// p_I is the fraction of probes with at least one labeled impersonator in
/// sn2; nI is, among impersonated probes, the fraction whose most similar
/// impersonator would not be declared a match at th. With labels present
/// but no impersonated probe, p_I = 0 and nI = 1 (vacuous maximum).
pub fn estimate_non_impersonability(
    probes: &[&Profile],
    sn2: &Corpus,
    attr: AttributeKind,
    th: &ThresholdConfig,
    fz: &Featurizer,
) -> Result<(f64, f64), AcidError> {
    if sn2.impersonator_label_count() == 0 {
        return Err(AcidError::NoImpersonatorLabels);
    }
    if probes.is_empty() {
        return Err(AcidError::Domain("no probes".into()));
    }
    let victims = impersonated_victims(sn2);
    let mut impersonated = 0usize;
    let mut safe = 0usize;
    for probe in probes {
        let Some(imps) = victims.get(probe.profile_id.as_str()) else {
            continue;
        };
        impersonated += 1;
        let any_passing = imps.iter().any(|imp| {
            let sim = fz.attribute_similarity(attr, probe, imp);
            th.passes(attr, sim, fz.kappa_km)
        });
        if !any_passing {
            safe += 1;
        }
    }
    let p_i = impersonated as f64 / probes.len() as f64;
    let n_i = if impersonated == 0 {
        1.0
    } else {
        safe as f64 / impersonated as f64
    };
    Ok((n_i, p_i))
}

/// recall = C * A.
pub fn theorem_recall(availability: f64, consistency: f64) -> Result<f64, AcidError> {
    domain_unit(availability, "availability")?;
    domain_unit(consistency, "consistency")?;
    Ok(consistency * availability)
}

/// precision <= recall / (recall + 1 - D_tilde); defined as 0 at zero
/// recall.
pub fn precision_upper_bound(recall: f64, d_tilde: f64) -> Result<f64, AcidError> {
    domain_unit(recall, "recall")?;
    domain_unit(d_tilde, "d_tilde")?;
    if recall == 0.0 {
        return Ok(0.0);
    }
    Ok(recall / (recall + 1.0 - d_tilde))
}

/// Closed form under independence: D_tilde = D * ((1 - p_I) + nI * p_I).
pub fn effective_discriminability(d: f64, n_i: f64, p_i: f64) -> Result<f64, AcidError> {
    domain_unit(d, "D")?;
    domain_unit(n_i, "nI")?;
    domain_unit(p_i, "p_I")?;
    Ok(d * ((1.0 - p_i) + n_i * p_i))
}

/// One attribute's estimates. `None` marks UNKNOWN: consistency with no
/// available pair, nI without impersonator labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AcidRow {
    pub attr: AttributeKind,
    pub availability: f64,
    pub consistency: Option<f64>,
    pub non_impersonability: Option<f64>,
    pub effective_discriminability: f64,
    pub threshold: f64,
}

/// Full per-attribute report plus the inputs it was computed with.
#[derive(Debug, Clone, PartialEq)]
pub struct AcidReport {
    pub rows: Vec<AcidRow>,
    pub thresholds: ThresholdConfig,
    pub kappa_km: f64,
    pub sn1_size: usize,
    pub sn2_size: usize,
    pub gt_size: usize,
    pub impersonation_rate: Option<f64>,
}

/// Estimate every ACID property for all five attributes. Probes are the
/// distinct sn1 profiles of the ground truth, in first-appearance order.
pub fn acid_report(
    gt: &GroundTruth,
    sn1: &Corpus,
    sn2: &Corpus,
    th: &ThresholdConfig,
    fz: &Featurizer,
) -> Result<AcidReport, AcidError> {
    if gt.is_empty() {
        return Err(AcidError::EmptyGroundTruth);
    }
    if sn2.is_empty() {
        return Err(AcidError::EmptyCorpus);
    }
    let mut seen = HashSet::new();
    let probes: Vec<&Profile> = gt
        .pairs()
        .iter()
        .filter(|(id1, _)| seen.insert(id1.clone()))
        .map(|(id1, _)| resolve(sn1, id1))
        .collect();

    let mut rows = Vec::new();
    let mut p_i_report = None;
    for attr in AttributeKind::ALL {
        let availability = estimate_availability(gt, sn1, sn2, attr)?;
        let consistency = match estimate_consistency(gt, sn1, sn2, attr, th, fz) {
            Ok(c) => Some(c),
            Err(AcidError::NoAvailablePairs(_)) => None,
            Err(e) => return Err(e),
        };
        let d_tilde =
            estimate_discriminability(&probes, sn2, gt, attr, th, fz, Scan::Exhaustive)?;
        let non_impersonability = match estimate_non_impersonability(&probes, sn2, attr, th, fz)
        {
            Ok((n_i, p_i)) => {
                p_i_report = Some(p_i);
                Some(n_i)
            }
            Err(AcidError::NoImpersonatorLabels) => None,
            Err(e) => return Err(e),
        };
        let threshold = match attr {
            AttributeKind::RealName => th.real_name,
            AttributeKind::ScreenName => th.screen_name,
            AttributeKind::Location => th.location_km,
            AttributeKind::Photo => th.photo,
            AttributeKind::Friends => th.friends_min,
        };
        rows.push(AcidRow {
            attr,
            availability,
            consistency,
            non_impersonability,
            effective_discriminability: d_tilde,
            threshold,
        });
    }

    Ok(AcidReport {
        rows,
        thresholds: *th,
        kappa_km: fz.kappa_km,
        sn1_size: sn1.len(),
        sn2_size: sn2.len(),
        gt_size: gt.len(),
        impersonation_rate: p_i_report,
    })
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "unknown".to_string(),
    }
}

impl AcidReport {
    /// Flat CSV: `attribute,A,C,nI,D_tilde,th,p_I`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("attribute,A,C,nI,D_tilde,th,p_I\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.4},{},{},{:.4},{},{}",
                row.attr,
                row.availability,
                cell(row.consistency),
                cell(row.non_impersonability),
                row.effective_discriminability,
                row.threshold,
                cell(self.impersonation_rate),
            );
        }
        out
    }

    /// Human-readable table for standard output.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "corpora: sn1={} sn2={} matching pairs={}",
            self.sn1_size, self.sn2_size, self.gt_size
        );
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "attribute", "A", "C", "nI", "D~", "th"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<12} {:>8.4} {:>8} {:>8} {:>8.4} {:>8}",
                row.attr.name(),
                row.availability,
                cell(row.consistency),
                cell(row.non_impersonability),
                row.effective_discriminability,
                row.threshold,
            );
        }
        let _ = writeln!(out, "p_I = {}", cell(self.impersonation_rate));
        out
    }
}
