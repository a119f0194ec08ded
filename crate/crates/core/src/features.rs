//! Feature vectors and threshold semantics.
//!
//! A [`FeatureVector`] holds one similarity per attribute, or `None` when
//! the underlying value is unavailable in either profile. Every threshold
//! comparison in the crate goes through [`ThresholdConfig::passes`] /
//! [`SlotThreshold`], so "declared a match at th" means exactly one thing
//! everywhere: a missing similarity counts as 0 and is never declared, and
//! the friends count uses `>= th` while the four bounded similarities use
//! `> th`.

use serde::{Deserialize, Serialize};

use crate::corpus::{AttributeKind, Profile};
use crate::phash::PerceptualHash;
use crate::similarity;

/// Five similarity slots indexed by [`AttributeKind::index`]. Friends holds
/// a raw common-friend count; the other slots are similarities in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    slots: [Option<f64>; 5],
}

impl FeatureVector {
    pub fn new(slots: [Option<f64>; 5]) -> Self {
        for v in slots.iter().flatten() {
            assert!(v.is_finite(), "feature values must be finite");
        }
        FeatureVector { slots }
    }

    pub fn get(&self, attr: AttributeKind) -> Option<f64> {
        self.slots[attr.index()]
    }

    pub fn slots(&self) -> &[Option<f64>; 5] {
        &self.slots
    }

    /// Similarity with the missing-as-zero convention applied.
    pub fn get_or_zero(&self, attr: AttributeKind) -> f64 {
        self.slots[attr.index()].unwrap_or(0.0)
    }

    pub fn is_missing(&self, attr: AttributeKind) -> bool {
        self.slots[attr.index()].is_none()
    }

    pub fn all_missing() -> Self {
        FeatureVector { slots: [None; 5] }
    }
}

/// Per-attribute consistency thresholds. Real/screen name and photo are
/// similarity floors in [0,1]; location is a maximum distance in km;
/// friends is a minimum common-friend count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub real_name: f64,
    pub screen_name: f64,
    pub location_km: f64,
    pub photo: f64,
    pub friends_min: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        // Friends >= 2 follows the source convention of requiring at least
        // two common friends to avoid noise; the rest sit between the
        // matching / non-matching similarity modes and are overridable per
        // experiment.
        ThresholdConfig {
            real_name: 0.66,
            screen_name: 0.82,
            location_km: 70.0,
            photo: 0.60,
            friends_min: 2.0,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<(), String> {
        let unit = |v: f64, name: &str| -> Result<(), String> {
            if (0.0..=1.0).contains(&v) && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} threshold {v} outside [0,1]"))
            }
        };
        unit(self.real_name, "real_name")?;
        unit(self.screen_name, "screen_name")?;
        unit(self.photo, "photo")?;
        if !self.location_km.is_finite() || self.location_km < 0.0 {
            return Err(format!("location_km threshold {} invalid", self.location_km));
        }
        if !self.friends_min.is_finite() || self.friends_min < 0.0 {
            return Err(format!("friends_min threshold {} invalid", self.friends_min));
        }
        Ok(())
    }

    /// The threshold expressed in the attribute's feature-slot domain.
    pub fn slot_threshold(&self, attr: AttributeKind, kappa_km: f64) -> SlotThreshold {
        match attr {
            AttributeKind::RealName => SlotThreshold::exclusive(self.real_name),
            AttributeKind::ScreenName => SlotThreshold::exclusive(self.screen_name),
            // distance < th_km  <=>  exp(-d/kappa) > exp(-th_km/kappa)
            AttributeKind::Location => SlotThreshold::exclusive(
                similarity::location_similarity_with_kappa(self.location_km, kappa_km),
            ),
            AttributeKind::Photo => SlotThreshold::exclusive(self.photo),
            AttributeKind::Friends => SlotThreshold::inclusive(self.friends_min),
        }
    }

    /// Whether a feature slot passes its consistency threshold. Missing
    /// never passes.
    pub fn passes(&self, attr: AttributeKind, slot: Option<f64>, kappa_km: f64) -> bool {
        match slot {
            None => false,
            Some(v) => self.slot_threshold(attr, kappa_km).passes(v),
        }
    }
}

/// A resolved per-slot threshold: `value > floor` for similarities,
/// `value >= floor` for counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotThreshold {
    pub floor: f64,
    pub inclusive: bool,
}

impl SlotThreshold {
    pub fn exclusive(floor: f64) -> Self {
        SlotThreshold {
            floor,
            inclusive: false,
        }
    }

    pub fn inclusive(floor: f64) -> Self {
        SlotThreshold {
            floor,
            inclusive: true,
        }
    }

    pub fn passes(&self, value: f64) -> bool {
        if self.inclusive {
            value >= self.floor
        } else {
            value > self.floor
        }
    }
}

/// Assembles feature vectors; owns the location similarity scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Featurizer {
    pub kappa_km: f64,
}

impl Default for Featurizer {
    fn default() -> Self {
        Featurizer {
            kappa_km: similarity::DEFAULT_KAPPA_KM,
        }
    }
}

impl Featurizer {
    /// Similarity of one attribute across two profiles, or `None` when the
    /// value is unavailable on either side.
    pub fn attribute_similarity(
        &self,
        attr: AttributeKind,
        a1: &Profile,
        a2: &Profile,
    ) -> Option<f64> {
        match attr {
            AttributeKind::RealName => match (&a1.real_name, &a2.real_name) {
                (Some(n1), Some(n2)) => Some(similarity::jaro(n1, n2)),
                _ => None,
            },
            AttributeKind::ScreenName => {
                Some(similarity::jaro(&a1.screen_name, &a2.screen_name))
            }
            AttributeKind::Location => match (&a1.location, &a2.location) {
                (Some(l1), Some(l2)) => {
                    Some(similarity::location_pair_similarity(l1, l2, self.kappa_km))
                }
                _ => None,
            },
            AttributeKind::Photo => match (a1.photo, a2.photo) {
                (Some(h1), Some(h2)) => Some(similarity::photo_similarity(
                    PerceptualHash::from_value(h1),
                    PerceptualHash::from_value(h2),
                )),
                _ => None,
            },
            AttributeKind::Friends => match (&a1.friends, &a2.friends) {
                (Some(f1), Some(f2)) => Some(similarity::friends_overlap(f1, f2) as f64),
                _ => None,
            },
        }
    }

    pub fn featurize(&self, a1: &Profile, a2: &Profile) -> FeatureVector {
        let mut slots = [None; 5];
        for attr in AttributeKind::ALL {
            slots[attr.index()] = self.attribute_similarity(attr, a1, a2);
        }
        FeatureVector::new(slots)
    }
}
