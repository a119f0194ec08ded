//! Domain types and corpus ingestion.
//!
//! A [`Corpus`] is an immutable set of profiles from one social network,
//! loaded from a JSON-lines file (one profile per line, UTF-8). Ground truth
//! is a CSV of matching id pairs across two corpora. Neither is ever mutated
//! after construction, so both can be shared freely across threads.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phash;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate profile_id `{id}` at {path}:{line}")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("coordinate out of range at {path}:{line}: lat={lat}, lon={lon}")]
    CoordinateOutOfRange {
        path: String,
        line: usize,
        lat: f64,
        lon: f64,
    },
    #[error("location label `{label}` at {path}:{line} not found in gazetteer")]
    UnresolvedLocation {
        path: String,
        line: usize,
        label: String,
    },
    #[error("photo file error at {path}:{line}: {message}")]
    Photo {
        path: String,
        line: usize,
        message: String,
    },
    #[error("ground-truth id `{id}` does not resolve in corpus `{network}`")]
    UnresolvedId { id: String, network: String },
    #[error("duplicate ground-truth pair ({id1},{id2})")]
    DuplicatePair { id1: String, id2: String },
}

/// One public attribute of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttributeKind {
    RealName,
    ScreenName,
    Location,
    Photo,
    Friends,
}

impl AttributeKind {
    pub const ALL: [AttributeKind; 5] = [
        AttributeKind::RealName,
        AttributeKind::ScreenName,
        AttributeKind::Location,
        AttributeKind::Photo,
        AttributeKind::Friends,
    ];

    /// Slot index in a feature vector.
    pub fn index(self) -> usize {
        match self {
            AttributeKind::RealName => 0,
            AttributeKind::ScreenName => 1,
            AttributeKind::Location => 2,
            AttributeKind::Photo => 3,
            AttributeKind::Friends => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AttributeKind::RealName => "real_name",
            AttributeKind::ScreenName => "screen_name",
            AttributeKind::Location => "location",
            AttributeKind::Photo => "photo",
            AttributeKind::Friends => "friends",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A geographic location with resolved coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub label: String,
    pub lat: f64,
    pub lon: f64,
}

/// One entry of a friend list. Screen name is always present, real name
/// may not be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Friend {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_name: Option<String>,
    pub screen_name: String,
}

/// One account on one network. Screen name is mandatory; every other
/// attribute is optional. An absent friend list (the network exposes no
/// friend data) is distinct from an empty one (zero friends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub profile_id: String,
    pub network_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_name: Option<String>,
    pub screen_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photo: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub friends: Option<Vec<Friend>>,
    /// Ground-truth-only label set by the synthetic generator: the sn1
    /// profile this profile impersonates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_impersonator_of: Option<String>,
}

/// Raw on-disk form: `photo` may be a precomputed hash or an image path,
/// `location` may arrive without coordinates when a gazetteer is supplied.
#[derive(Deserialize)]
struct ProfileRecord {
    profile_id: String,
    network_id: String,
    #[serde(default)]
    real_name: Option<String>,
    screen_name: String,
    #[serde(default)]
    location: Option<LocationRecord>,
    #[serde(default)]
    photo: Option<PhotoField>,
    #[serde(default)]
    friends: Option<Vec<Friend>>,
    #[serde(default)]
    is_impersonator_of: Option<String>,
}

#[derive(Deserialize)]
struct LocationRecord {
    label: String,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PhotoField {
    Hash(u64),
    ImagePath(String),
}

/// Label → coordinates lookup bundled as a CSV with header `label,lat,lon`.
#[derive(Debug, Default, Clone)]
pub struct Gazetteer {
    entries: HashMap<String, (f64, f64)>,
}

impl Gazetteer {
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CorpusError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut entries = HashMap::new();
        for (i, row) in reader.deserialize::<(String, f64, f64)>().enumerate() {
            let (label, lat, lon) = row.map_err(|e| CorpusError::Parse {
                path: path.display().to_string(),
                line: i + 2,
                message: e.to_string(),
            })?;
            entries.insert(label.trim().to_lowercase(), (lat, lon));
        }
        Ok(Gazetteer { entries })
    }

    pub fn resolve(&self, label: &str) -> Option<(f64, f64)> {
        self.entries.get(&label.trim().to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// An immutable collection of profiles with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    profiles: Vec<Profile>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    /// Build a corpus from profiles, enforcing id uniqueness and coordinate
    /// bounds.
    pub fn from_profiles(profiles: Vec<Profile>) -> Result<Self, CorpusError> {
        let mut by_id = HashMap::with_capacity(profiles.len());
        for (i, p) in profiles.iter().enumerate() {
            if let Some(loc) = &p.location {
                if !coords_in_bounds(loc.lat, loc.lon) {
                    return Err(CorpusError::CoordinateOutOfRange {
                        path: String::new(),
                        line: i + 1,
                        lat: loc.lat,
                        lon: loc.lon,
                    });
                }
            }
            if by_id.insert(p.profile_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId {
                    path: String::new(),
                    line: i + 1,
                    id: p.profile_id.clone(),
                });
            }
        }
        Ok(Corpus { profiles, by_id })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn get(&self, id: &str) -> Option<&Profile> {
        self.by_id.get(id).map(|&i| &self.profiles[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Profile> {
        self.profiles.iter()
    }

    /// Count of profiles carrying an impersonator label.
    pub fn impersonator_label_count(&self) -> usize {
        self.profiles
            .iter()
            .filter(|p| p.is_impersonator_of.is_some())
            .count()
    }

    /// Write the corpus as JSON lines. Reloading the output yields an
    /// identical corpus, field for field.
    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let file = File::create(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut w = BufWriter::new(file);
        for p in &self.profiles {
            let line = serde_json::to_string(p).expect("profile serializes");
            writeln!(w, "{line}").map_err(|e| CorpusError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
        }
        w.flush().map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

fn coords_in_bounds(lat: f64, lon: f64) -> bool {
    (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

/// Load a JSON-lines corpus. Photo image paths are hashed at load; location
/// labels without coordinates resolve through the gazetteer or fail.
pub fn load_profiles(path: &Path, gazetteer: Option<&Gazetteer>) -> Result<Corpus, CorpusError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| CorpusError::Io {
        path: display.clone(),
        source: e,
    })?;
    let reader = BufReader::new(file);

    let mut profiles = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Io {
            path: display.clone(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ProfileRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            path: display.clone(),
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(rec.profile_id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: display.clone(),
                line: line_no,
                id: rec.profile_id,
            });
        }

        let location = match rec.location {
            None => None,
            Some(LocationRecord {
                label,
                lat: Some(lat),
                lon: Some(lon),
            }) => {
                if !coords_in_bounds(lat, lon) {
                    return Err(CorpusError::CoordinateOutOfRange {
                        path: display.clone(),
                        line: line_no,
                        lat,
                        lon,
                    });
                }
                Some(Location { label, lat, lon })
            }
            Some(LocationRecord { label, .. }) => {
                let resolved = gazetteer.and_then(|g| g.resolve(&label));
                match resolved {
                    Some((lat, lon)) => Some(Location { label, lat, lon }),
                    None => {
                        return Err(CorpusError::UnresolvedLocation {
                            path: display.clone(),
                            line: line_no,
                            label,
                        })
                    }
                }
            }
        };

        let photo = match rec.photo {
            None => None,
            Some(PhotoField::Hash(h)) => Some(h),
            Some(PhotoField::ImagePath(img_path)) => {
                let bytes = std::fs::read(&img_path).map_err(|e| CorpusError::Photo {
                    path: display.clone(),
                    line: line_no,
                    message: format!("{img_path}: {e}"),
                })?;
                let hash = phash::phash64(&bytes).map_err(|e| CorpusError::Photo {
                    path: display.clone(),
                    line: line_no,
                    message: format!("{img_path}: {e}"),
                })?;
                Some(hash.value())
            }
        };

        profiles.push(Profile {
            profile_id: rec.profile_id,
            network_id: rec.network_id,
            real_name: rec.real_name,
            screen_name: rec.screen_name,
            location,
            photo,
            friends: rec.friends,
            is_impersonator_of: rec.is_impersonator_of,
        });
    }

    Corpus::from_profiles(profiles).map_err(|e| match e {
        // from_profiles has no file context; reattach it.
        CorpusError::DuplicateId { line, id, .. } => CorpusError::DuplicateId {
            path: display.clone(),
            line,
            id,
        },
        CorpusError::CoordinateOutOfRange { line, lat, lon, .. } => {
            CorpusError::CoordinateOutOfRange {
                path: display.clone(),
                line,
                lat,
                lon,
            }
        }
        other => other,
    })
}

/// Labeled matching pairs across two corpora. Every cross-corpus pair not
/// listed is non-matching.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    pairs: Vec<(String, String)>,
    pair_set: HashSet<(String, String)>,
    by_sn1: HashMap<String, Vec<String>>,
    matched_sn2: HashSet<String>,
}

impl GroundTruth {
    pub fn from_pairs(
        pairs: Vec<(String, String)>,
        sn1: &Corpus,
        sn2: &Corpus,
    ) -> Result<Self, CorpusError> {
        let mut gt = GroundTruth::default();
        for (id1, id2) in pairs {
            if !sn1.contains(&id1) {
                return Err(CorpusError::UnresolvedId {
                    id: id1,
                    network: "sn1".into(),
                });
            }
            if !sn2.contains(&id2) {
                return Err(CorpusError::UnresolvedId {
                    id: id2,
                    network: "sn2".into(),
                });
            }
            if !gt.pair_set.insert((id1.clone(), id2.clone())) {
                return Err(CorpusError::DuplicatePair { id1, id2 });
            }
            gt.by_sn1.entry(id1.clone()).or_default().push(id2.clone());
            gt.matched_sn2.insert(id2.clone());
            gt.pairs.push((id1, id2));
        }
        Ok(gt)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn is_match(&self, id1: &str, id2: &str) -> bool {
        self.pair_set.contains(&(id1.to_string(), id2.to_string()))
    }

    /// All sn2 matches of an sn1 profile.
    pub fn matches_of(&self, id1: &str) -> &[String] {
        self.by_sn1.get(id1).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The unique match in the at-most-one-match case.
    pub fn match_of(&self, id1: &str) -> Option<&str> {
        self.by_sn1
            .get(id1)
            .and_then(|v| v.first())
            .map(String::as_str)
    }

    pub fn is_matched_sn2(&self, id2: &str) -> bool {
        self.matched_sn2.contains(id2)
    }

    /// True when every sn1 id appears in at most one pair.
    pub fn is_special_case(&self) -> bool {
        self.by_sn1.values().all(|v| v.len() <= 1)
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        w.write_record(["id1", "id2"]).ok();
        for (id1, id2) in &self.pairs {
            w.write_record([id1, id2]).map_err(|e| CorpusError::Parse {
                path: path.display().to_string(),
                line: 0,
                message: e.to_string(),
            })?;
        }
        w.flush().map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// Load ground truth from a CSV with header `id1,id2`. Every id must resolve
/// in its corpus; duplicate pairs are rejected.
pub fn load_ground_truth(
    path: &Path,
    sn1: &Corpus,
    sn2: &Corpus,
) -> Result<GroundTruth, CorpusError> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CorpusError::Parse {
            path: display.clone(),
            line: 0,
            message: e.to_string(),
        })?;
    let mut pairs = Vec::new();
    for (i, row) in reader.deserialize::<(String, String)>().enumerate() {
        let pair = row.map_err(|e| CorpusError::Parse {
            path: display.clone(),
            line: i + 2,
            message: e.to_string(),
        })?;
        pairs.push(pair);
    }
    GroundTruth::from_pairs(pairs, sn1, sn2)
}
