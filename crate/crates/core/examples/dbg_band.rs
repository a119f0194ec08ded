use acidmatch::datagen::{self, GenConfig, AttrAvailability, AvailabilityConfig, ConsistencyConfig, NamePoolConfig};
use acidmatch::sampling::build_random_sampled;
use acidmatch::similarity::jaro;

fn main() {
    let cfg = GenConfig {
        population: 10_000,
        unmatched_sn2: 0,
        availability: AvailabilityConfig {
            real_name: AttrAvailability::always(),
            location: AttrAvailability { sn1: 0.4, sn2: 0.4, correlation: 0.0 },
            photo: AttrAvailability { sn1: 0.78, sn2: 0.78, correlation: 0.0 },
            friends: AttrAvailability { sn1: 0.55, sn2: 0.55, correlation: 0.0 },
        },
        consistency: ConsistencyConfig { real_name: 0.92, screen_name: 0.85, location: 0.75, photo: 0.12, friends: 0.70 },
        name_pool: NamePoolConfig { forename_pool: 2048, surname_pool: 8192, zipf_exponent: 0.7, forenames: None, surnames: None },
        seed: 51,
        ..GenConfig::default()
    };
    let (sn1, sn2, gt) = datagen::generate(&cfg).unwrap();
    let rs = build_random_sampled(&gt, 850, 52).unwrap();
    let mut count = 0;
    for p in rs.pairs() {
        if p.is_match { continue; }
        let a = sn1.get(&p.sn1_id).unwrap();
        let b = sn2.get(&p.sn2_id).unwrap();
        let rn = match (&a.real_name, &b.real_name) { (Some(x), Some(y)) => jaro(x, y), _ => 0.0 };
        let sn = jaro(&a.screen_name, &b.screen_name);
        if rn > 0.8 && sn > 0.8 {
            count += 1;
            if count <= 20 {
                println!("rn={rn:.3} sn={sn:.3}  [{}] vs [{}]  ({} vs {})",
                    a.real_name.as_deref().unwrap_or(""), b.real_name.as_deref().unwrap_or(""),
                    a.screen_name, b.screen_name);
            }
        }
    }
    println!("total RS negatives with both-name sim > 0.8: {count} of {}", rs.negatives());
}
