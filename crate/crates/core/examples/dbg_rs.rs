use acidmatch::classifiers::{train, ClassifierFamily, TrainConfig};
use acidmatch::datagen::{self, GenConfig, AttrAvailability, AvailabilityConfig, ConsistencyConfig, NamePoolConfig};
use acidmatch::features::Featurizer;
use acidmatch::sampling::{build_random_sampled, undersample};
use acidmatch::classifiers::featurize_pairs;
use rayon::prelude::*;

fn main() {
    let cfg = GenConfig {
        population: 10_000,
        unmatched_sn2: 10_000,
        availability: AvailabilityConfig {
            real_name: AttrAvailability::always(),
            location: AttrAvailability { sn1: 0.45, sn2: 0.45, correlation: 0.0 },
            photo: AttrAvailability { sn1: 0.78, sn2: 0.78, correlation: 0.0 },
            friends: AttrAvailability { sn1: 0.6, sn2: 0.6, correlation: 0.0 },
        },
        consistency: ConsistencyConfig { real_name: 0.85, screen_name: 0.70, location: 0.75, photo: 0.12, friends: 0.70 },
        name_pool: NamePoolConfig { forename_pool: 2048, surname_pool: 8192, zipf_exponent: 0.7, forenames: None, surnames: None },
        seed: 51,
        ..GenConfig::default()
    };
    let fz = Featurizer::default();
    let (sn1, sn2, gt) = datagen::generate(&cfg).unwrap();
    let rs = build_random_sampled(&gt, 850, 52).unwrap();
    let (rs_train, rs_test) = rs.split(0.7, 53);
    let bal = undersample(&rs_train, 54).unwrap();
    let model = train(ClassifierFamily::NaiveBayesKde, &bal, &sn1, &sn2, &fz, &TrainConfig::default(), 55).unwrap();

    let feats = featurize_pairs(&rs_test, &sn1, &sn2, &fz).unwrap();
    let mut scored: Vec<(f64, bool, usize)> = feats.par_iter().enumerate()
        .map(|(i, (fv, y))| (model.predict_proba(fv), *y, i)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    // walk down: where does precision fall below 0.95?
    let (mut tp, mut fp) = (0, 0);
    let mut cut = 0;
    for (i, (_, y, _)) in scored.iter().enumerate() {
        if *y { tp += 1 } else { fp += 1 }
        if tp as f64 / (tp + fp) as f64 >= 0.95 { cut = i; }
    }
    println!("best 95% cut at rank {cut}: tp so far...");
    let n_pos = scored.iter().filter(|(_, y, _)| *y).count();
    println!("n_pos={n_pos}");
    // show the first 25 negatives by rank
    let mut shown = 0;
    for (rank, (p, y, i)) in scored.iter().enumerate() {
        if !*y && shown < 25 {
            shown += 1;
            println!("rank {rank} NEG p={p:.5} fv={:?}", feats[*i].0.slots());
        }
        if shown >= 25 && rank > cut { break; }
    }
    // positives between rank cut and 2*cut (the "just missed" ones)
    println!("--- weak positives below the cut:");
    let mut wshown = 0;
    for (rank, (p, y, i)) in scored.iter().enumerate() {
        if rank > cut && *y && wshown < 15 {
            wshown += 1;
            println!("rank {rank} POS p={p:.5} fv={:?}", feats[*i].0.slots());
        }
    }
}
