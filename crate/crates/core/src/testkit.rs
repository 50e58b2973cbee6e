//! Randomized inputs and fixed experiment settings shared by the property
//! suites, the acceptance checks and the benchmarks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ac::{AcConfig, AcMode};
use crate::datagen::{Corruption, GenConfig};
use crate::dynamic::{DynConfig, NameKeyMode};
use crate::model::{Profile, Schema};

/// AC purge threshold for generated corpora.
pub const DESK_AC_THRESHOLD: usize = 20;
/// Dynamic split threshold for generated corpora.
pub const DESK_DYN_THRESHOLD: usize = 5;
pub const DESK_NAME_KEY_MODE: NameKeyMode = NameKeyMode::FullNamePlusLastname;

pub fn desk_ac(schema: &Schema) -> AcConfig {
    AcConfig::new(schema).with_threshold(DESK_AC_THRESHOLD)
}

pub fn desk_dyn(schema: &Schema) -> DynConfig {
    DynConfig::new(schema)
        .with_threshold(DESK_DYN_THRESHOLD)
        .with_name_key_mode(DESK_NAME_KEY_MODE)
}

/// One member of the randomized generator family: every operator gets a
/// uniform weight in [0, 1), with surname_change and field_omit lifted by 0.2
/// so both always take part; size, duplication, density and name skew vary.
pub fn random_gen_config(seed: u64) -> GenConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = BTreeMap::new();
    for c in Corruption::ALL {
        w.insert(c, rng.gen_range(0.0..1.0));
    }
    *w.entry(Corruption::SurnameChange).or_default() += 0.2;
    *w.entry(Corruption::FieldOmit).or_default() += 0.2;
    GenConfig {
        n_originals: rng.gen_range(1000..=3000),
        dup_rate: rng.gen_range(0.3..0.7),
        max_dups_per_original: rng.gen_range(1..=3),
        corruptions_per_dup: rng.gen_range(1..=2),
        corruption_weights: w,
        attribute_density: rng.gen_range(0.6..0.9),
        name_skew: rng.gen_range(0.6..1.0),
        seed,
    }
}

const FIRST: &[&str] = &[
    "Ben", "Benjamin", "Liz", "Elizabeth", "Bob", "Robert", "Ann", "Maria", "Tom", "Thomas",
];
const LAST: &[&str] = &["Smith", "Thomas", "Edwards", "Lee", "Garcia", "Smith-Jones", "O'Neil"];
const MIDDLE: &[&str] = &["J", "Ann", "Lee", "Ray"];
const CITY: &[&str] = &["New York", "Atlanta", "NY", "Boston", "San Jose", "York"];
const EMPLOYER: &[&str] = &["Acme Corp", "Initech", "Globex", "Acme", "Umbrella Corp"];
const SKILL: &[&str] = &["Rust", "SQL", "Excel", "Leadership", "SQL, Rust", "Public Speaking"];
const EMAIL_USERS: &[&str] = &["bsmith", "lthomas", "bob", "ann.lee", "tom"];
const EMAIL_DOMAINS: &[&str] = &["mail.com", "acme.com"];

/// Attributes of [`random_corpus`] profiles.
pub fn random_schema() -> Schema {
    Schema::with_attributes([
        "first_name", "last_name", "middle_name", "email", "city", "employer", "skill",
    ])
    .expect("random schema is valid")
}

/// Small, collision-heavy corpus: `n` profiles whose attributes are each
/// present with probability `1 - sparsity`, drawn from tiny pools that mix
/// nicknames, punctuation and shared tokens across attributes.
pub fn random_corpus(rng: &mut impl Rng, n: usize, sparsity: f64) -> Vec<Profile> {
    let schema = random_schema();
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.into_iter()
        .map(|i| {
            let mut p = Profile::new(format!("p{i:04}"));
            for attr in schema.attributes() {
                if !rng.gen_bool(1.0 - sparsity) {
                    continue;
                }
                let pick = |rng: &mut dyn rand::RngCore, pool: &[&str]| pool[rng.gen_range(0..pool.len())].to_string();
                let value = match attr.as_str() {
                    "first_name" => pick(rng, FIRST),
                    "last_name" => pick(rng, LAST),
                    "middle_name" => pick(rng, MIDDLE),
                    "email" => format!("{}@{}", pick(rng, EMAIL_USERS), pick(rng, EMAIL_DOMAINS)),
                    "city" => pick(rng, CITY),
                    "employer" => pick(rng, EMPLOYER),
                    _ => pick(rng, SKILL),
                };
                let value = if rng.gen_bool(0.2) { value.to_uppercase() } else { value };
                p.set(attr, &value);
            }
            p
        })
        .collect()
}

/// Blocker settings drawn at random over [`random_schema`].
pub fn random_configs(rng: &mut impl Rng) -> (AcConfig, DynConfig) {
    let schema = random_schema();
    let t = *[2usize, 3, 5, 10].choose(rng).expect("non-empty");
    let mut ac = AcConfig::new(&schema).with_threshold(t);
    if rng.gen_bool(0.5) {
        ac = ac.with_mode(AcMode::SchemaAgnostic);
    }
    let mut attrs = schema.attributes().to_vec();
    attrs.shuffle(rng);
    ac.attributes_used = attrs[..rng.gen_range(1..=attrs.len())].to_vec();
    ac.apply_nicknames = rng.gen_bool(0.2);

    let mut priority: Vec<String> = schema
        .attributes()
        .iter()
        .filter(|a| !schema.is_name_attribute(a))
        .cloned()
        .collect();
    priority.shuffle(rng);
    priority.truncate(rng.gen_range(0..=priority.len()));
    let mut dy = DynConfig::new(&schema)
        .with_threshold(t)
        .with_priority(priority)
        .with_max_depth(rng.gen_range(1..=3));
    if rng.gen_bool(0.5) {
        dy = dy.with_name_key_mode(NameKeyMode::FullNamePlusLastname);
    }
    dy.accept_oversized = rng.gen_bool(0.2);
    (ac, dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_corpus_is_seeded_and_valid() {
        let a = random_corpus(&mut ChaCha8Rng::seed_from_u64(3), 50, 0.5);
        let b = random_corpus(&mut ChaCha8Rng::seed_from_u64(3), 50, 0.5);
        assert_eq!(a, b);
        let schema = random_schema();
        assert!(a.iter().all(|p| p.values.keys().all(|k| schema.contains(k))));
        let (ac, dy) = random_configs(&mut ChaCha8Rng::seed_from_u64(3));
        ac.validate(&schema).unwrap();
        dy.validate(&schema).unwrap();
    }

    #[test]
    fn generator_family_is_valid() {
        for seed in 0..5 {
            let g = random_gen_config(seed);
            g.validate().unwrap();
            assert!(g.corruption_weights[&Corruption::SurnameChange] >= 0.2);
            assert!(g.corruption_weights[&Corruption::FieldOmit] >= 0.2);
        }
    }
}
