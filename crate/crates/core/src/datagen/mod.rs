//! Synthetic two-network corpus generator.
//!
//! Every ACID property is an explicit knob: availability per attribute and
//! side (with an optional joint correlation), consistency as a direct
//! per-attribute target (the generator perturbs a copied value and then
//! verifies it against the calibration thresholds, retrying until the draw
//! lands on the intended side), discriminability via Zipf-weighted name
//! pools whose collisions create natural twins, and impersonation via
//! attacker profiles that copy each attribute with a configurable fidelity,
//! drawn independently of the rest of the corpus.
//!
//! All randomness derives from per-user substreams of one seed, so growing
//! the population or adding consumers never reshuffles existing users.

mod names;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Friend, GroundTruth, Location, Profile};
use crate::features::ThresholdConfig;
use crate::rng::substream;
use crate::similarity;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttrAvailability {
    pub sn1: f64,
    pub sn2: f64,
    /// Correlation of the two availability indicators; 0 means independent.
    /// No published joint model exists, so this knob is a stand-in.
    pub correlation: f64,
}

impl AttrAvailability {
    pub fn always() -> Self {
        AttrAvailability {
            sn1: 1.0,
            sn2: 1.0,
            correlation: 0.0,
        }
    }

    fn validate(&self, name: &str) -> Result<(), GenError> {
        for (v, what) in [(self.sn1, "sn1"), (self.sn2, "sn2")] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(GenError::InvalidConfig(format!(
                    "{name}.{what} availability {v} outside [0,1]"
                )));
            }
        }
        if !(-1.0..=1.0).contains(&self.correlation) || !self.correlation.is_finite() {
            return Err(GenError::InvalidConfig(format!(
                "{name}.correlation {} outside [-1,1]",
                self.correlation
            )));
        }
        Ok(())
    }

    /// (both, sn1 only, sn2 only) probabilities of the joint draw.
    fn joint(&self) -> (f64, f64, f64) {
        let lo = (self.sn1 + self.sn2 - 1.0).max(0.0);
        let hi = self.sn1.min(self.sn2);
        let p11 = (self.sn1 * self.sn2
            + self.correlation
                * (self.sn1 * (1.0 - self.sn1) * self.sn2 * (1.0 - self.sn2)).sqrt())
        .clamp(lo, hi);
        (p11, self.sn1 - p11, self.sn2 - p11)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (bool, bool) {
        let (p11, p10, p01) = self.joint();
        let u: f64 = rng.random();
        if u < p11 {
            (true, true)
        } else if u < p11 + p10 {
            (true, false)
        } else if u < p11 + p10 + p01 {
            (false, true)
        } else {
            (false, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityConfig {
    pub real_name: AttrAvailability,
    pub location: AttrAvailability,
    pub photo: AttrAvailability,
    pub friends: AttrAvailability,
}

impl Default for AvailabilityConfig {
    fn default() -> Self {
        AvailabilityConfig {
            real_name: AttrAvailability::always(),
            location: AttrAvailability {
                sn1: 0.6,
                sn2: 0.6,
                correlation: 0.0,
            },
            photo: AttrAvailability {
                sn1: 0.7,
                sn2: 0.7,
                correlation: 0.0,
            },
            friends: AttrAvailability {
                sn1: 0.7,
                sn2: 0.7,
                correlation: 0.0,
            },
        }
    }
}

/// Per-attribute probability that a matching pair's values stay consistent
/// (pass the calibration thresholds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyConfig {
    pub real_name: f64,
    pub screen_name: f64,
    pub location: f64,
    pub photo: f64,
    pub friends: f64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            real_name: 0.9,
            screen_name: 0.7,
            location: 0.8,
            photo: 0.7,
            friends: 0.8,
        }
    }
}

impl ConsistencyConfig {
    fn validate(&self) -> Result<(), GenError> {
        for (v, name) in [
            (self.real_name, "real_name"),
            (self.screen_name, "screen_name"),
            (self.location, "location"),
            (self.photo, "photo"),
            (self.friends, "friends"),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(GenError::InvalidConfig(format!(
                    "consistency.{name} {v} outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// Texture of the consistent branch: how hard values are perturbed while
/// still passing the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Mean number of single-character edits on consistent names.
    pub name_edit_ops: u32,
    /// Jitter radius for consistent locations, km.
    pub location_jitter_km: f64,
    /// Bit flips on consistent photo hashes (capped below the threshold).
    pub photo_flip_bits: u32,
    /// Fraction of the sn1 friend list re-included in the sn2 list.
    pub friend_overlap_rate: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            name_edit_ops: 1,
            location_jitter_km: 20.0,
            photo_flip_bits: 4,
            friend_overlap_rate: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamePoolConfig {
    /// Pool sizes; capped at the built-in list lengths when no custom lists
    /// are given. Smaller pools mean more name twins.
    pub forename_pool: usize,
    pub surname_pool: usize,
    /// Zipf exponent over pool ranks; higher concentrates mass on the top
    /// names and drives exact-twin collisions at scale.
    pub zipf_exponent: f64,
    #[serde(default)]
    pub forenames: Option<Vec<String>>,
    #[serde(default)]
    pub surnames: Option<Vec<String>>,
}

impl Default for NamePoolConfig {
    fn default() -> Self {
        NamePoolConfig {
            forename_pool: 512,
            surname_pool: 2048,
            zipf_exponent: 1.0,
            forenames: None,
            surnames: None,
        }
    }
}

/// Per-attribute probability that an impersonator copies the victim's
/// value exactly (otherwise it draws a fresh one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityConfig {
    pub real_name: f64,
    pub screen_name: f64,
    pub location: f64,
    pub photo: f64,
    pub friends: f64,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        FidelityConfig {
            real_name: 0.9,
            screen_name: 0.7,
            location: 0.7,
            photo: 0.6,
            friends: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// sn1 population size.
    pub population: usize,
    /// Probability that an sn1 profile has a matching sn2 profile.
    pub matched_fraction: f64,
    /// Non-matching filler profiles added to sn2 from the same pools.
    pub unmatched_sn2: usize,
    pub availability: AvailabilityConfig,
    pub consistency: ConsistencyConfig,
    pub noise: NoiseConfig,
    pub name_pool: NamePoolConfig,
    /// Probability that an sn1 profile has an impersonator in sn2.
    pub impersonation_rate: f64,
    pub impersonator_fidelity: FidelityConfig,
    /// Thresholds the consistency targets are calibrated against.
    pub calibration_thresholds: ThresholdConfig,
    pub location_kappa_km: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            population: 1000,
            matched_fraction: 1.0,
            unmatched_sn2: 1000,
            availability: AvailabilityConfig::default(),
            consistency: ConsistencyConfig::default(),
            noise: NoiseConfig::default(),
            name_pool: NamePoolConfig::default(),
            impersonation_rate: 0.0,
            impersonator_fidelity: FidelityConfig::default(),
            calibration_thresholds: ThresholdConfig::default(),
            location_kappa_km: similarity::DEFAULT_KAPPA_KM,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.population == 0 {
            return Err(GenError::InvalidConfig("population must be >= 1".into()));
        }
        for (v, name) in [
            (self.matched_fraction, "matched_fraction"),
            (self.impersonation_rate, "impersonation_rate"),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(GenError::InvalidConfig(format!("{name} {v} outside [0,1]")));
            }
        }
        self.availability.real_name.validate("availability.real_name")?;
        self.availability.location.validate("availability.location")?;
        self.availability.photo.validate("availability.photo")?;
        self.availability.friends.validate("availability.friends")?;
        self.consistency.validate()?;
        for (v, name) in [
            (self.impersonator_fidelity.real_name, "fidelity.real_name"),
            (self.impersonator_fidelity.screen_name, "fidelity.screen_name"),
            (self.impersonator_fidelity.location, "fidelity.location"),
            (self.impersonator_fidelity.photo, "fidelity.photo"),
            (self.impersonator_fidelity.friends, "fidelity.friends"),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(GenError::InvalidConfig(format!("{name} {v} outside [0,1]")));
            }
        }
        if self.name_pool.zipf_exponent < 0.0 || !self.name_pool.zipf_exponent.is_finite() {
            return Err(GenError::InvalidConfig(
                "zipf_exponent must be finite and >= 0".into(),
            ));
        }
        if self.name_pool.forename_pool == 0 || self.name_pool.surname_pool == 0 {
            return Err(GenError::InvalidConfig("name pools must be nonempty".into()));
        }
        self.calibration_thresholds
            .validate()
            .map_err(GenError::InvalidConfig)?;
        Ok(())
    }
}

/// Cumulative Zipf table over `0..n` with weight `(rank+1)^-s`.
struct ZipfTable {
    cum: Vec<f64>,
}

impl ZipfTable {
    fn new(n: usize, s: f64) -> ZipfTable {
        let mut cum = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 0..n {
            acc += 1.0 / ((k + 1) as f64).powf(s);
            cum.push(acc);
        }
        let total = *cum.last().expect("nonempty pool");
        for c in &mut cum {
            *c /= total;
        }
        ZipfTable { cum }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.cum.partition_point(|&c| c < u).min(self.cum.len() - 1)
    }
}

struct Pools {
    forenames: Vec<String>,
    surnames: Vec<String>,
    forename_zipf: ZipfTable,
    surname_zipf: ZipfTable,
}

impl Pools {
    fn new(cfg: &NamePoolConfig) -> Pools {
        let forenames: Vec<String> = match &cfg.forenames {
            Some(list) => list.clone(),
            None => names::synthesize_pool(&names::FORENAMES, cfg.forename_pool, "a", 5),
        };
        let surnames: Vec<String> = match &cfg.surnames {
            Some(list) => list.clone(),
            None => names::synthesize_pool(&names::SURNAMES, cfg.surname_pool, "o", 8),
        };
        let forename_zipf = ZipfTable::new(forenames.len(), cfg.zipf_exponent);
        let surname_zipf = ZipfTable::new(surnames.len(), cfg.zipf_exponent);
        Pools {
            forenames,
            surnames,
            forename_zipf,
            surname_zipf,
        }
    }

    fn real_name(&self, rng: &mut ChaCha8Rng) -> String {
        let f = &self.forenames[self.forename_zipf.sample(rng)];
        let s = &self.surnames[self.surname_zipf.sample(rng)];
        format!("{f} {s}")
    }

    /// Screen name derived from a real name the way people actually do it:
    /// full concatenation, initial + surname, forename + digits, or
    /// surname-first, with optional separator and digit suffix.
    fn screen_name(&self, real_name: &str, rng: &mut ChaCha8Rng) -> String {
        let parts: Vec<String> = real_name
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        let fore = parts.first().cloned().unwrap_or_default();
        let sur = parts.last().cloned().unwrap_or_default();
        let sep = if rng.random_bool(0.15) { "_" } else { "" };
        // Weighted toward the plain forename+surname concatenation, which
        // is what makes same-name users collide on handles too. Short
        // single-part handles always carry digits.
        let roll: f64 = rng.random();
        let (mut base, force_digits) = if roll < 0.6 {
            (format!("{fore}{sep}{sur}"), false)
        } else if roll < 0.72 {
            (
                format!("{}{sep}{sur}", fore.chars().next().unwrap_or('x')),
                false,
            )
        } else if roll < 0.84 {
            (format!("{sur}{sep}{fore}"), false)
        } else if roll < 0.92 {
            (fore.clone(), true)
        } else {
            (sur.clone(), true)
        };
        if force_digits || rng.random_bool(0.25) {
            let digits = rng.random_range(if force_digits { 2..=4 } else { 1..=3 });
            for _ in 0..digits {
                base.push(char::from(b'0' + rng.random_range(0..10) as u8));
            }
        }
        base
    }

    fn friend(&self, rng: &mut ChaCha8Rng) -> Friend {
        let rn = self.real_name(rng);
        let sn = self.screen_name(&rn, rng);
        Friend {
            real_name: rng.random_bool(0.7).then_some(rn),
            screen_name: sn,
        }
    }
}

fn random_city(rng: &mut ChaCha8Rng) -> Location {
    let (label, lat, lon) = names::CITIES[rng.random_range(0..names::CITIES.len())];
    // Metro-area scatter (tens of km): two unrelated users of one city are
    // near each other but clearly farther apart than one user's two
    // profiles.
    let dlat = rng.random_range(-0.25..0.25);
    let dlon = rng.random_range(-0.25..0.25);
    Location {
        label: label.to_string(),
        lat: (lat + dlat).clamp(-89.9, 89.9),
        lon: (lon + dlon).clamp(-180.0, 180.0),
    }
}

/// Apply `edit_ops` random single-character edits (substitute, insert,
/// delete, transpose), each changing the string by Damerau-Levenshtein
/// distance exactly one. Zero ops is the identity.
pub fn perturb_name(name: &str, edit_ops: usize, seed: u64) -> String {
    let mut rng = substream(seed, "perturb-name", edit_ops as u64);
    perturb_name_with(name, edit_ops, &mut rng)
}

fn perturb_name_with(name: &str, edit_ops: usize, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = name.chars().collect();
    for _ in 0..edit_ops {
        chars = apply_one_edit(&chars, rng);
    }
    chars.into_iter().collect()
}

fn apply_one_edit(chars: &[char], rng: &mut ChaCha8Rng) -> Vec<char> {
    let mut out = chars.to_vec();
    let alphabet = "abcdefghijklmnopqrstuvwxyz";
    let random_letter = |rng: &mut ChaCha8Rng| {
        alphabet
            .chars()
            .nth(rng.random_range(0..alphabet.len()))
            .unwrap()
    };
    for _ in 0..32 {
        let op = if out.is_empty() { 1 } else { rng.random_range(0..4) };
        match op {
            0 => {
                // substitute with a different character
                let i = rng.random_range(0..out.len());
                let c = random_letter(rng);
                if out[i].to_lowercase().next() != Some(c) {
                    out[i] = c;
                    return out;
                }
            }
            1 => {
                let i = rng.random_range(0..=out.len());
                out.insert(i, random_letter(rng));
                return out;
            }
            2 => {
                if out.len() > 1 {
                    let i = rng.random_range(0..out.len());
                    out.remove(i);
                    return out;
                }
            }
            _ => {
                // transpose a distinct adjacent pair
                if out.len() >= 2 {
                    let i = rng.random_range(0..out.len() - 1);
                    if out[i] != out[i + 1] {
                        out.swap(i, i + 1);
                        return out;
                    }
                }
            }
        }
    }
    // Pathological input (e.g. "aaaa" rejecting transposes); append.
    out.push(random_letter(rng));
    out
}

struct Identity {
    real_name: String,
    screen_name: String,
    location: Location,
    photo: u64,
    friends: Vec<Friend>,
}

fn draw_identity(pools: &Pools, rng: &mut ChaCha8Rng) -> Identity {
    let real_name = pools.real_name(rng);
    let screen_name = pools.screen_name(&real_name, rng);
    let location = random_city(rng);
    let photo = rng.random();
    let n_friends = rng.random_range(4..=12);
    let friends = (0..n_friends).map(|_| pools.friend(rng)).collect();
    Identity {
        real_name,
        screen_name,
        location,
        photo,
        friends,
    }
}

struct ValueGen<'a> {
    cfg: &'a GenConfig,
    pools: &'a Pools,
}

impl ValueGen<'_> {
    /// Consistent name: perturbed but still above the jaro threshold.
    fn consistent_name(&self, name: &str, th: f64, mean_ops: u32, rng: &mut ChaCha8Rng) -> String {
        let mut ops = rng.random_range(0..=2 * mean_ops) as usize;
        loop {
            let candidate = perturb_name_with(name, ops, rng);
            if similarity::jaro(name, &candidate) > th {
                return candidate;
            }
            if ops == 0 {
                return name.to_string();
            }
            ops -= 1;
        }
    }

    /// Inconsistent name: a fresh draw verified below the threshold, with a
    /// guaranteed-dissimilar fallback.
    fn inconsistent_name(&self, name: &str, th: f64, rng: &mut ChaCha8Rng) -> String {
        for _ in 0..16 {
            let candidate = self.pools.real_name(rng);
            if similarity::jaro(name, &candidate) <= th {
                return candidate;
            }
        }
        // Digits share no character with alphabetic names: jaro = 0.
        format!("{}", rng.random_range(10_000_000..99_999_999u64))
    }

    fn inconsistent_screen_name(&self, screen: &str, th: f64, rng: &mut ChaCha8Rng) -> String {
        for _ in 0..16 {
            let rn = self.pools.real_name(rng);
            let candidate = self.pools.screen_name(&rn, rng);
            if similarity::jaro(screen, &candidate) <= th {
                return candidate;
            }
        }
        format!("u{}", rng.random_range(10_000_000..99_999_999u64))
    }

    /// Consistent location: jitter within the distance threshold.
    fn consistent_location(&self, base: &Location, rng: &mut ChaCha8Rng) -> Location {
        let th_km = self.cfg.calibration_thresholds.location_km;
        let radius = self.cfg.noise.location_jitter_km.min(0.8 * th_km);
        for shrink in 0..8 {
            let d = rng.random_range(0.0..radius / (1 << shrink) as f64);
            let bearing: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let dlat = d * bearing.cos() / 111.19;
            let coslat = base.lat.to_radians().cos().max(0.05);
            let dlon = d * bearing.sin() / (111.19 * coslat);
            let cand = Location {
                label: base.label.clone(),
                lat: (base.lat + dlat).clamp(-89.9, 89.9),
                lon: wrap_lon(base.lon + dlon),
            };
            if similarity::geodesic_km((base.lat, base.lon), (cand.lat, cand.lon)) < th_km {
                return cand;
            }
        }
        base.clone()
    }

    /// Inconsistent location: a different city beyond the threshold.
    fn inconsistent_location(&self, base: &Location, rng: &mut ChaCha8Rng) -> Location {
        let th_km = self.cfg.calibration_thresholds.location_km;
        for _ in 0..16 {
            let cand = random_city(rng);
            if similarity::geodesic_km((base.lat, base.lon), (cand.lat, cand.lon)) >= th_km {
                return cand;
            }
        }
        Location {
            label: "antipode".to_string(),
            lat: (-base.lat).clamp(-89.9, 89.9),
            lon: wrap_lon(base.lon + 180.0),
        }
    }

    /// Consistent photo: flip fewer bits than the similarity threshold
    /// allows.
    fn consistent_photo(&self, hash: u64, rng: &mut ChaCha8Rng) -> u64 {
        let th = self.cfg.calibration_thresholds.photo;
        // sim = 1 - k/64 > th  <=>  k < 64 (1 - th)
        let k_max = ((64.0 * (1.0 - th)).ceil() as u32).saturating_sub(1);
        let k = self.cfg.noise.photo_flip_bits.min(k_max);
        flip_bits(hash, k, rng)
    }

    fn inconsistent_photo(&self, hash: u64, rng: &mut ChaCha8Rng) -> u64 {
        let th = self.cfg.calibration_thresholds.photo;
        let k_min = (64.0 * (1.0 - th)).ceil() as u32;
        let k = rng.random_range(k_min..=64.min(k_min + 24));
        flip_bits(hash, k, rng)
    }

    /// Consistent friends: copy enough of the sn1 list to clear the
    /// common-friend floor, fill the rest with fresh names.
    fn consistent_friends(&self, base: &[Friend], rng: &mut ChaCha8Rng) -> Vec<Friend> {
        let th = self.cfg.calibration_thresholds.friends_min.ceil() as usize;
        let rate = self.cfg.noise.friend_overlap_rate;
        let shared = ((base.len() as f64 * rate).round() as usize)
            .max(th)
            .min(base.len());
        let mut order: Vec<usize> = (0..base.len()).collect();
        shuffle(&mut order, rng);
        let mut out: Vec<Friend> = order[..shared].iter().map(|&i| base[i].clone()).collect();
        let extra = rng.random_range(0..=4);
        for _ in 0..extra {
            out.push(self.pools.friend(rng));
        }
        out
    }

    /// Inconsistent friends: a fresh list with overlap below the floor.
    fn inconsistent_friends(&self, base: &[Friend], rng: &mut ChaCha8Rng) -> Vec<Friend> {
        let th = self.cfg.calibration_thresholds.friends_min.ceil() as usize;
        let budget = th.saturating_sub(1);
        let n = rng.random_range(3..=10);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut placed = false;
            for _ in 0..16 {
                let cand = self.pools.friend(rng);
                out.push(cand);
                if similarity::friends_overlap(base, &out) <= budget {
                    placed = true;
                    break;
                }
                out.pop();
            }
            if !placed {
                out.push(Friend {
                    real_name: None,
                    screen_name: format!("zz{}q{i}", rng.random_range(0..u32::MAX)),
                });
            }
        }
        out
    }
}

fn wrap_lon(lon: f64) -> f64 {
    let mut l = lon;
    while l > 180.0 {
        l -= 360.0;
    }
    while l < -180.0 {
        l += 360.0;
    }
    l
}

fn flip_bits(hash: u64, k: u32, rng: &mut ChaCha8Rng) -> u64 {
    let mut positions: Vec<u32> = (0..64).collect();
    shuffle(&mut positions, rng);
    let mut out = hash;
    for &b in positions.iter().take(k as usize) {
        out ^= 1u64 << b;
    }
    out
}

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    use rand::seq::SliceRandom;
    items.shuffle(rng);
}

/// Generate the two corpora and their ground truth.
pub fn generate(cfg: &GenConfig) -> Result<(Corpus, Corpus, GroundTruth), GenError> {
    cfg.validate()?;
    let pools = Pools::new(&cfg.name_pool);
    let values = ValueGen { cfg, pools: &pools };
    let th = &cfg.calibration_thresholds;

    let mut sn1_profiles = Vec::with_capacity(cfg.population);
    let mut sn2_profiles = Vec::new();
    let mut gt_pairs = Vec::new();

    for i in 0..cfg.population {
        let mut rng = substream(cfg.seed, "user", i as u64);
        let identity = draw_identity(&pools, &mut rng);

        let (rn1, rn2) = cfg.availability.real_name.draw(&mut rng);
        let (loc1, loc2) = cfg.availability.location.draw(&mut rng);
        let (ph1, ph2) = cfg.availability.photo.draw(&mut rng);
        let (fr1, fr2) = cfg.availability.friends.draw(&mut rng);

        let sn1_id = format!("a{i:06}");
        sn1_profiles.push(Profile {
            profile_id: sn1_id.clone(),
            network_id: "sn1".into(),
            real_name: rn1.then(|| identity.real_name.clone()),
            screen_name: identity.screen_name.clone(),
            location: loc1.then(|| identity.location.clone()),
            photo: ph1.then_some(identity.photo),
            friends: fr1.then(|| identity.friends.clone()),
            is_impersonator_of: None,
        });

        if rng.random_bool(cfg.matched_fraction) {
            let real_name = if rng.random_bool(cfg.consistency.real_name) {
                values.consistent_name(
                    &identity.real_name,
                    th.real_name,
                    cfg.noise.name_edit_ops,
                    &mut rng,
                )
            } else {
                values.inconsistent_name(&identity.real_name, th.real_name, &mut rng)
            };
            let screen_name = if rng.random_bool(cfg.consistency.screen_name) {
                values.consistent_name(
                    &identity.screen_name,
                    th.screen_name,
                    cfg.noise.name_edit_ops,
                    &mut rng,
                )
            } else {
                values.inconsistent_screen_name(&identity.screen_name, th.screen_name, &mut rng)
            };
            let location = if rng.random_bool(cfg.consistency.location) {
                values.consistent_location(&identity.location, &mut rng)
            } else {
                values.inconsistent_location(&identity.location, &mut rng)
            };
            let photo = if rng.random_bool(cfg.consistency.photo) {
                values.consistent_photo(identity.photo, &mut rng)
            } else {
                values.inconsistent_photo(identity.photo, &mut rng)
            };
            let friends = if rng.random_bool(cfg.consistency.friends) {
                values.consistent_friends(&identity.friends, &mut rng)
            } else {
                values.inconsistent_friends(&identity.friends, &mut rng)
            };

            let sn2_id = format!("b{i:06}");
            sn2_profiles.push(Profile {
                profile_id: sn2_id.clone(),
                network_id: "sn2".into(),
                real_name: rn2.then_some(real_name),
                screen_name,
                location: loc2.then_some(location),
                photo: ph2.then_some(photo),
                friends: fr2.then_some(friends),
                is_impersonator_of: None,
            });
            gt_pairs.push((sn1_id.clone(), sn2_id));
        }

        // Impersonators draw from their own stream, independent of the
        // filler population and of the victim's matched profile.
        let mut imp_rng = substream(cfg.seed, "impersonator", i as u64);
        if imp_rng.random_bool(cfg.impersonation_rate) {
            let fid = &cfg.impersonator_fidelity;
            let fresh = draw_identity(&pools, &mut imp_rng);
            let copy_rn = imp_rng.random_bool(fid.real_name);
            let copy_sn = imp_rng.random_bool(fid.screen_name);
            let copy_loc = imp_rng.random_bool(fid.location);
            let copy_ph = imp_rng.random_bool(fid.photo);
            let copy_fr = imp_rng.random_bool(fid.friends);

            let a2_rn = imp_rng.random_bool(cfg.availability.real_name.sn2);
            let a2_loc = imp_rng.random_bool(cfg.availability.location.sn2);
            let a2_ph = imp_rng.random_bool(cfg.availability.photo.sn2);
            let a2_fr = imp_rng.random_bool(cfg.availability.friends.sn2);

            let real_name = if copy_rn {
                rn1.then(|| identity.real_name.clone())
            } else {
                a2_rn.then_some(fresh.real_name)
            };
            let location = if copy_loc {
                loc1.then(|| identity.location.clone())
            } else {
                a2_loc.then_some(fresh.location)
            };
            let photo = if copy_ph {
                ph1.then_some(identity.photo)
            } else {
                a2_ph.then_some(fresh.photo)
            };
            let friends = if copy_fr {
                fr1.then(|| identity.friends.clone())
            } else {
                a2_fr.then_some(fresh.friends)
            };
            sn2_profiles.push(Profile {
                profile_id: format!("imp{i:06}"),
                network_id: "sn2".into(),
                real_name,
                screen_name: if copy_sn {
                    identity.screen_name.clone()
                } else {
                    fresh.screen_name
                },
                location,
                photo,
                friends,
                is_impersonator_of: Some(sn1_id),
            });
        }
    }

    for j in 0..cfg.unmatched_sn2 {
        let mut rng = substream(cfg.seed, "filler", j as u64);
        let identity = draw_identity(&pools, &mut rng);
        let rn = rng.random_bool(cfg.availability.real_name.sn2);
        let loc = rng.random_bool(cfg.availability.location.sn2);
        let ph = rng.random_bool(cfg.availability.photo.sn2);
        let fr = rng.random_bool(cfg.availability.friends.sn2);
        sn2_profiles.push(Profile {
            profile_id: format!("f{j:06}"),
            network_id: "sn2".into(),
            real_name: rn.then_some(identity.real_name),
            screen_name: identity.screen_name,
            location: loc.then_some(identity.location),
            photo: ph.then_some(identity.photo),
            friends: fr.then_some(identity.friends),
            is_impersonator_of: None,
        });
    }

    let sn1 = Corpus::from_profiles(sn1_profiles)?;
    let sn2 = Corpus::from_profiles(sn2_profiles)?;
    let gt = GroundTruth::from_pairs(gt_pairs, &sn1, &sn2)?;
    Ok((sn1, sn2, gt))
}

/// sn2 minus every profile appearing in the ground truth; impersonators
/// and filler stay. The absence-of-match testbed.
pub fn remove_matches(sn2: &Corpus, gt: &GroundTruth) -> Corpus {
    let kept: Vec<Profile> = sn2
        .iter()
        .filter(|p| !gt.is_matched_sn2(&p.profile_id))
        .cloned()
        .collect();
    Corpus::from_profiles(kept).expect("subset of a valid corpus stays valid")
}
