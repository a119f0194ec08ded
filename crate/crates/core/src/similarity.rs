//! Attribute similarity metrics.
//!
//! All functions here are pure and symmetric in their two arguments; string
//! metrics case-fold and trim before comparing.

use crate::corpus::{Friend, Location};
use crate::phash::PerceptualHash;

/// Mean earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Scale of the location similarity kernel, km.
pub const DEFAULT_KAPPA_KM: f64 = 50.0;

/// Case-fold and trim a string into the char sequence all string metrics
/// operate on.
pub fn fold(s: &str) -> Vec<char> {
    s.trim().to_lowercase().chars().collect()
}

/// Jaro similarity in [0,1] over case-folded, trimmed strings.
///
/// Classical definition: matches `m` within a window of
/// `max(len)/2 - 1`, transpositions counted as half the number of
/// matched characters out of sequence. Returns 1.0 iff the folded strings
/// are equal and nonempty, 0.0 if either is empty or nothing matches.
pub fn jaro(s1: &str, s2: &str) -> f64 {
    jaro_folded(&fold(s1), &fold(s2))
}

/// Jaro over strings already case-folded into char slices. Exposed for the
/// index and the exhaustive estimators, which fold each corpus once.
pub fn jaro_folded(a: &[char], b: &[char]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }

    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut m = 0usize;

    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && b[j] == *ca {
                a_matched[i] = true;
                b_matched[j] = true;
                m += 1;
                break;
            }
        }
    }
    if m == 0 {
        return 0.0;
    }

    let mut mismatches = 0usize;
    let mut k = 0usize;
    for (i, &am) in a_matched.iter().enumerate() {
        if !am {
            continue;
        }
        while !b_matched[k] {
            k += 1;
        }
        if a[i] != b[k] {
            mismatches += 1;
        }
        k += 1;
    }
    let m = m as f64;
    let t = mismatches as f64 / 2.0;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Haversine great-circle distance in km on a sphere of radius
/// [`EARTH_RADIUS_KM`]. Inputs are degrees.
pub fn geodesic_km(loc1: (f64, f64), loc2: (f64, f64)) -> f64 {
    let (lat1, lon1) = (loc1.0.to_radians(), loc1.1.to_radians());
    let (lat2, lon2) = (loc2.0.to_radians(), loc2.1.to_radians());
    let dlat = (lat2 - lat1) / 2.0;
    let dlon = (lon2 - lon1) / 2.0;
    let h = dlat.sin().powi(2) + lat1.cos() * lat2.cos() * dlon.sin().powi(2);
    2.0 * h.sqrt().min(1.0).asin() * EARTH_RADIUS_KM
}

/// Map a distance to a bounded similarity: `exp(-d/kappa)`, strictly
/// decreasing, 1.0 at zero distance.
pub fn location_similarity(distance_km: f64) -> f64 {
    location_similarity_with_kappa(distance_km, DEFAULT_KAPPA_KM)
}

pub fn location_similarity_with_kappa(distance_km: f64, kappa_km: f64) -> f64 {
    (-distance_km / kappa_km).exp()
}

/// `1 - hamming/64`: 1.0 iff the hashes are equal.
pub fn photo_similarity(h1: PerceptualHash, h2: PerceptualHash) -> f64 {
    1.0 - h1.hamming(h2) as f64 / 64.0
}

/// Number of friends of `f1` with an exact case-folded screen-name or
/// real-name match in `f2`. Each friend in `f1` counts at most once, so the
/// result never exceeds `min(|f1|, |f2|)`. Cross-field matches (a real name
/// equal to a screen name) do not count. The count is deliberately not
/// normalized.
pub fn friends_overlap(f1: &[Friend], f2: &[Friend]) -> usize {
    use std::collections::HashMap;
    let fold_one = |s: &str| s.trim().to_lowercase();

    // Greedy one-to-one assignment: each f2 entry can be claimed once.
    let mut by_screen: HashMap<String, Vec<usize>> = HashMap::new();
    let mut by_real: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, f) in f2.iter().enumerate() {
        by_screen.entry(fold_one(&f.screen_name)).or_default().push(i);
        if let Some(rn) = &f.real_name {
            by_real.entry(fold_one(rn)).or_default().push(i);
        }
    }

    let mut used = vec![false; f2.len()];
    let mut count = 0usize;
    for f in f1 {
        let mut claim = |candidates: Option<&Vec<usize>>| -> bool {
            if let Some(idxs) = candidates {
                for &i in idxs {
                    if !used[i] {
                        used[i] = true;
                        return true;
                    }
                }
            }
            false
        };
        if claim(by_screen.get(&fold_one(&f.screen_name))) {
            count += 1;
            continue;
        }
        if let Some(rn) = &f.real_name {
            if claim(by_real.get(&fold_one(rn))) {
                count += 1;
            }
        }
    }
    count
}

/// Location similarity of two resolved locations.
pub fn location_pair_similarity(l1: &Location, l2: &Location, kappa_km: f64) -> f64 {
    location_similarity_with_kappa(geodesic_km((l1.lat, l1.lon), (l2.lat, l2.lon)), kappa_km)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phash::PerceptualHash;
    use proptest::prelude::*;

    #[test]
    fn jaro_case_fold_identity() {
        assert_eq!(jaro("Anna", "anna"), 1.0);
        assert_eq!(jaro("  Anna ", "ANNA"), 1.0);
    }

    #[test]
    fn jaro_disjoint_strings_are_zero() {
        assert_eq!(jaro("abc", "xyz"), 0.0);
    }

    #[test]
    fn jaro_empty_is_zero() {
        assert_eq!(jaro("", "abc"), 0.0);
        assert_eq!(jaro("abc", ""), 0.0);
        assert_eq!(jaro("", ""), 0.0);
        assert_eq!(jaro("   ", "abc"), 0.0);
    }

    #[test]
    fn jaro_martha_marhta() {
        // m = 6, t = 1: (6/6 + 6/6 + 5/6) / 3
        let expected = (1.0 + 1.0 + 5.0 / 6.0) / 3.0;
        assert!((jaro("MARTHA", "MARHTA") - expected).abs() < 1e-12);
        assert!((jaro("MARTHA", "MARHTA") - 0.9444).abs() < 1e-4);
    }

    #[test]
    fn jaro_known_values() {
        // DWAYNE/DUANE: m=4, t=0, (4/6 + 4/5 + 4/4)/3
        let expected = (4.0 / 6.0 + 4.0 / 5.0 + 1.0) / 3.0;
        assert!((jaro("DWAYNE", "DUANE") - expected).abs() < 1e-12);
    }

    #[test]
    fn geodesic_same_point_is_zero() {
        assert_eq!(geodesic_km((48.8566, 2.3522), (48.8566, 2.3522)), 0.0);
    }

    #[test]
    fn geodesic_antipodal_equator() {
        let d = geodesic_km((0.0, 0.0), (0.0, 180.0));
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_KM).abs() < 0.5);
        assert!((d - 20015.1).abs() < 0.5);
    }

    #[test]
    fn geodesic_paris_london() {
        let d = geodesic_km((48.8566, 2.3522), (51.5074, -0.1278));
        assert!((d - 343.5).abs() < 1.0, "got {d}");
    }

    #[test]
    fn location_similarity_reference_points() {
        assert_eq!(location_similarity(0.0), 1.0);
        assert!((location_similarity(50.0) - 0.3679).abs() < 1e-4);
        assert!((location_similarity(500.0) - 4.54e-5).abs() < 1e-6);
    }

    #[test]
    fn photo_similarity_hamming() {
        let h = PerceptualHash::from_value(0xFFFF_0000_FFFF_0000);
        assert_eq!(photo_similarity(h, h), 1.0);
        let inv = PerceptualHash::from_value(!h.value());
        assert_eq!(photo_similarity(h, inv), 0.0);
        let sixteen = PerceptualHash::from_value(h.value() ^ 0xFFFF);
        assert_eq!(photo_similarity(h, sixteen), 0.75);
    }

    #[test]
    fn photo_similarity_small_perturbations_stay_high() {
        let h = PerceptualHash::from_value(0x0123_4567_89AB_CDEF);
        for bits in [1u64, 0b101, 0b1000_0000_0001_0001] {
            let flipped = PerceptualHash::from_value(h.value() ^ bits);
            assert!(bits.count_ones() <= 3);
            assert!(photo_similarity(h, flipped) >= 0.953);
        }
    }

    fn friend(screen: &str, real: Option<&str>) -> Friend {
        Friend {
            screen_name: screen.into(),
            real_name: real.map(String::from),
        }
    }

    #[test]
    fn friends_overlap_empty_is_zero() {
        assert_eq!(friends_overlap(&[], &[friend("a", None)]), 0);
        assert_eq!(friends_overlap(&[friend("a", None)], &[]), 0);
    }

    #[test]
    fn friends_overlap_counts_shared_screen_names() {
        let f1 = [friend("jdoe", None), friend("asmith", None), friend("x", None)];
        let f2 = [friend("JDoe", None), friend("asmith", Some("Ann Smith")), friend("y", None)];
        assert_eq!(friends_overlap(&f1, &f2), 2);
    }

    #[test]
    fn friends_overlap_never_crosses_fields() {
        let f1 = [friend("zzz", Some("Ann Lee"))];
        let f2 = [friend("annlee", None)];
        assert_eq!(friends_overlap(&f1, &f2), 0);
    }

    #[test]
    fn friends_overlap_bounded_by_smaller_list() {
        let f1 = [friend("a", None), friend("a", None), friend("a", None)];
        let f2 = [friend("a", None)];
        assert_eq!(friends_overlap(&f1, &f2), 1);
    }

    proptest! {
        #[test]
        fn jaro_symmetric_and_bounded(a in ".{0,16}", b in ".{0,16}") {
            let s = jaro(&a, &b);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s.to_bits(), jaro(&b, &a).to_bits());
        }

        #[test]
        fn geodesic_symmetric_nonnegative(
            lat1 in -90.0f64..90.0, lon1 in -180.0f64..180.0,
            lat2 in -90.0f64..90.0, lon2 in -180.0f64..180.0,
        ) {
            let d = geodesic_km((lat1, lon1), (lat2, lon2));
            prop_assert!(d >= 0.0);
            prop_assert!(d <= std::f64::consts::PI * EARTH_RADIUS_KM + 1e-9);
            prop_assert!((d - geodesic_km((lat2, lon2), (lat1, lon1))).abs() < 1e-9);
        }

        #[test]
        fn photo_similarity_monotone_in_hamming(v in any::<u64>(), k in 0u32..63) {
            // Flipping one more bit strictly lowers similarity.
            let base = PerceptualHash::from_value(v);
            let mask_k: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
            let mask_k1: u64 = (1u64 << (k + 1)) - 1;
            let s_k = photo_similarity(base, PerceptualHash::from_value(v ^ mask_k));
            let s_k1 = photo_similarity(base, PerceptualHash::from_value(v ^ mask_k1));
            prop_assert!(s_k1 < s_k);
        }
    }
}
