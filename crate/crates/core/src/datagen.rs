//! Synthetic duplicate corpora in the style of Febrl: originals drawn from
//! bundled value pools, plus corrupted duplicates with cluster gold labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{GoldStandard, Profile, ProfileId, Schema};
use crate::normalize::parse_map_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    /// One character substituted, inserted, deleted or transposed.
    Typo,
    /// One word removed from a multi-word value.
    TokenDrop,
    /// A non-name attribute blanked.
    FieldOmit,
    /// Given name replaced by a nickname, or a nickname by its full form.
    NicknameSwap,
    /// Family name replaced by a different one.
    SurnameChange,
    /// A non-name attribute replaced by a fresh random value.
    FieldNoise,
}

impl Corruption {
    pub const ALL: [Corruption; 6] = [
        Self::Typo,
        Self::TokenDrop,
        Self::FieldOmit,
        Self::NicknameSwap,
        Self::SurnameChange,
        Self::FieldNoise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Typo => "typo",
            Self::TokenDrop => "token_drop",
            Self::FieldOmit => "field_omit",
            Self::NicknameSwap => "nickname_swap",
            Self::SurnameChange => "surname_change",
            Self::FieldNoise => "field_noise",
        }
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Corruption {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| GenError::UnknownCorruption(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("dup_rate must lie in [0, 1], got {0}")]
    DupRate(f64),
    #[error("attribute_density must lie in [0, 1], got {0}")]
    Density(f64),
    #[error("corruption weight for {0} must be finite and non-negative")]
    Weight(Corruption),
    #[error("at least one corruption weight must be positive")]
    NoWeights,
    #[error("max_dups_per_original must be at least 1 when dup_rate > 0")]
    NoDups,
    #[error("name_skew must be finite and non-negative, got {0}")]
    Skew(f64),
    #[error("unknown corruption `{0}`")]
    UnknownCorruption(String),
    #[error("unknown preset `{0}` (expected febrl1, febrl2 or febrl3)")]
    UnknownPreset(String),
    #[error("the schema needs exactly two name attributes, found {0}")]
    NameAttributes(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_originals: usize,
    /// Fraction of originals that receive duplicates.
    pub dup_rate: f64,
    pub max_dups_per_original: usize,
    pub corruptions_per_dup: usize,
    pub corruption_weights: BTreeMap<Corruption, f64>,
    /// Probability that an original carries each non-name attribute. Names
    /// are always present.
    pub attribute_density: f64,
    /// Zipf exponent of the name pools; 0 draws names uniformly.
    pub name_skew: f64,
    pub seed: u64,
}

/// Omission and noise dominate; name-changing operators are rarer.
pub fn default_weights() -> BTreeMap<Corruption, f64> {
    BTreeMap::from([
        (Corruption::Typo, 1.0),
        (Corruption::TokenDrop, 1.0),
        (Corruption::FieldOmit, 2.0),
        (Corruption::NicknameSwap, 1.0),
        (Corruption::SurnameChange, 0.25),
        (Corruption::FieldNoise, 2.0),
    ])
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_originals: 1000,
            dup_rate: 0.5,
            max_dups_per_original: 2,
            corruptions_per_dup: 2,
            corruption_weights: default_weights(),
            attribute_density: 0.8,
            name_skew: 0.8,
            seed: 0,
        }
    }
}

impl GenConfig {
    /// `febrl1`, `febrl2`, `febrl3`: 2000, 3000 and 4000 originals.
    pub fn preset(name: &str) -> Result<Self, GenError> {
        let n = match name {
            "febrl1" => 2000,
            "febrl2" => 3000,
            "febrl3" => 4000,
            other => return Err(GenError::UnknownPreset(other.to_string())),
        };
        Ok(Self {
            n_originals: n,
            ..Self::default()
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if !(0.0..=1.0).contains(&self.dup_rate) {
            return Err(GenError::DupRate(self.dup_rate));
        }
        if !(0.0..=1.0).contains(&self.attribute_density) {
            return Err(GenError::Density(self.attribute_density));
        }
        if !self.name_skew.is_finite() || self.name_skew < 0.0 {
            return Err(GenError::Skew(self.name_skew));
        }
        for (&c, &w) in &self.corruption_weights {
            if !w.is_finite() || w < 0.0 {
                return Err(GenError::Weight(c));
            }
        }
        if !self.corruption_weights.values().any(|&w| w > 0.0) {
            return Err(GenError::NoWeights);
        }
        if self.dup_rate > 0.0 && self.max_dups_per_original == 0 {
            return Err(GenError::NoDups);
        }
        Ok(())
    }

    fn weight(&self, c: Corruption) -> f64 {
        self.corruption_weights.get(&c).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct GeneratedCorpus {
    pub profiles: Vec<Profile>,
    /// One cluster per original: the original followed by its duplicates.
    pub clusters: Vec<Vec<ProfileId>>,
    pub gold: GoldStandard,
    /// Which operators were applied to each duplicate.
    pub applied: BTreeMap<ProfileId, Vec<Corruption>>,
}

struct Pools {
    first: Vec<String>,
    last: Vec<String>,
    cities: Vec<(String, String, String)>,
    employers: Vec<String>,
    titles: Vec<String>,
    schools: Vec<String>,
    degrees: Vec<String>,
    skills: Vec<String>,
    domains: Vec<String>,
    streets: Vec<String>,
    suffixes: Vec<String>,
    /// Full name -> nicknames, and nickname -> full name.
    nicknames_of: BTreeMap<String, Vec<String>>,
    full_of: BTreeMap<String, String>,
}

fn lines(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

fn pools() -> &'static Pools {
    static POOLS: OnceLock<Pools> = OnceLock::new();
    POOLS.get_or_init(|| {
        let cities = include_str!("../data/pools/cities.csv")
            .lines()
            .skip(1)
            .filter_map(|l| {
                let mut it = l.split(',');
                Some((it.next()?.to_string(), it.next()?.to_string(), it.next()?.to_string()))
            })
            .collect();
        let nick = parse_map_csv(include_str!("../data/nicknames.csv")).expect("bundled nickname map parses");
        let mut nicknames_of: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (from, to) in &nick {
            nicknames_of.entry(to.clone()).or_default().push(from.clone());
        }
        Pools {
            first: lines(include_str!("../data/pools/first_names.txt")),
            last: lines(include_str!("../data/pools/last_names.txt")),
            cities,
            employers: lines(include_str!("../data/pools/employers.txt")),
            titles: lines(include_str!("../data/pools/job_titles.txt")),
            schools: lines(include_str!("../data/pools/schools.txt")),
            degrees: lines(include_str!("../data/pools/degrees.txt")),
            skills: lines(include_str!("../data/pools/skills.txt")),
            domains: lines(include_str!("../data/pools/email_domains.txt")),
            streets: lines(include_str!("../data/pools/street_names.txt")),
            suffixes: lines(include_str!("../data/pools/street_suffixes.txt")),
            nicknames_of,
            full_of: nick,
        }
    })
}

fn title_case(s: &str) -> String {
    s.split(' ')
        .map(|w| {
            let mut cs = w.chars();
            match cs.next() {
                Some(c) => c.to_uppercase().chain(cs).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn zipf(n: usize, s: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / (r as f64).powf(s))).expect("non-empty pool")
}

/// Draws attribute values for originals and for noise.
struct ValueGen {
    first: WeightedIndex<f64>,
    last: WeightedIndex<f64>,
    mild: BTreeMap<&'static str, WeightedIndex<f64>>,
    first_attr: String,
    last_attr: String,
}

impl ValueGen {
    fn new(schema: &Schema, skew: f64) -> Self {
        let p = pools();
        let names = schema.name_attributes();
        let mild = [
            ("employer", p.employers.len()),
            ("job_title", p.titles.len()),
            ("school", p.schools.len()),
            ("degree", p.degrees.len()),
            ("skill", p.skills.len()),
            ("city", p.cities.len()),
        ]
        .into_iter()
        .map(|(k, n)| (k, zipf(n, 0.5)))
        .collect();
        Self {
            first: zipf(p.first.len(), skew),
            last: zipf(p.last.len(), skew),
            mild,
            first_attr: names[0].clone(),
            last_attr: names[1].clone(),
        }
    }

    fn first_name(&self, rng: &mut ChaCha8Rng) -> String {
        title_case(&pools().first[self.first.sample(rng)])
    }

    fn last_name(&self, rng: &mut ChaCha8Rng) -> String {
        title_case(&pools().last[self.last.sample(rng)])
    }

    fn pick<'p>(&self, rng: &mut ChaCha8Rng, key: &str, pool: &'p [String]) -> &'p str {
        &pool[self.mild[key].sample(rng)]
    }

    /// A value for `attr` consistent with the given names; also fills
    /// correlated location fields on first use.
    fn value(&self, rng: &mut ChaCha8Rng, attr: &str, first: &str, last: &str) -> String {
        let p = pools();
        let (f, l) = (first.to_lowercase().replace(' ', ""), last.to_lowercase().replace(' ', ""));
        let fi: String = f.chars().take(1).collect();
        match attr {
            a if a == self.first_attr => self.first_name(rng),
            a if a == self.last_attr => self.last_name(rng),
            "middle_name" => {
                if rng.gen_bool(0.5) {
                    self.first_name(rng)
                } else {
                    let c = (b'A' + rng.gen_range(0..26u8)) as char;
                    c.to_string()
                }
            }
            "email" => {
                let domain = p.domains.choose(rng).expect("domains");
                match rng.gen_range(0..3) {
                    0 => format!("{f}.{l}{}@{domain}", rng.gen_range(1..1000)),
                    1 => format!("{fi}{l}{}@{domain}", rng.gen_range(1..10_000)),
                    _ => format!("{l}.{f}{}@{domain}", rng.gen_range(10..100)),
                }
            }
            "phone" => format!(
                "{}-{:03}-{:04}",
                rng.gen_range(201..990),
                rng.gen_range(0..1000),
                rng.gen_range(0..10_000)
            ),
            "username" => match rng.gen_range(0..2) {
                0 => format!("{f}{l}{}", rng.gen_range(1..10_000)),
                _ => format!("{fi}_{l}{}", rng.gen_range(1..1000)),
            },
            "url" => format!("linkedin.com/in/{f}-{l}-{:06x}", rng.gen_range(0..0x100_0000)),
            "street_address" => format!(
                "{} {} {}",
                rng.gen_range(1..10_000),
                title_case(p.streets.choose(rng).expect("streets")),
                title_case(p.suffixes.choose(rng).expect("suffixes"))
            ),
            "city" => p.cities[self.mild["city"].sample(rng)].0.clone(),
            "state" => p.cities.choose(rng).expect("cities").1.clone(),
            "zip" => {
                let zip3 = &p.cities.choose(rng).expect("cities").2;
                format!("{zip3}{:02}", rng.gen_range(0..100))
            }
            "country" => ["USA", "USA", "USA", "United States", "US", "U.S.A."]
                .choose(rng)
                .expect("countries")
                .to_string(),
            "employer" => self.pick(rng, "employer", &p.employers).to_string(),
            "job_title" => self.pick(rng, "job_title", &p.titles).to_string(),
            "school" => self.pick(rng, "school", &p.schools).to_string(),
            "degree" => self.pick(rng, "degree", &p.degrees).to_string(),
            "skill" => {
                let k = rng.gen_range(1..=3);
                let mut picked: Vec<&str> = (0..k).map(|_| self.pick(rng, "skill", &p.skills)).collect();
                picked.dedup();
                picked.join(", ")
            }
            _ => format!("{} {}", p.skills.choose(rng).expect("skills"), rng.gen_range(1..100)),
        }
    }

    /// An original profile. City, state and zip are drawn together.
    fn original(&self, rng: &mut ChaCha8Rng, id: ProfileId, schema: &Schema, density: f64) -> Profile {
        let first = self.first_name(rng);
        let last = self.last_name(rng);
        let mut p = Profile::new(id);
        let p_pools = pools();
        let place = &p_pools.cities[self.mild["city"].sample(rng)];
        for attr in schema.attributes() {
            let v = if *attr == self.first_attr {
                first.clone()
            } else if *attr == self.last_attr {
                last.clone()
            } else {
                if !rng.gen_bool(density) {
                    continue;
                }
                match attr.as_str() {
                    "city" => place.0.clone(),
                    "state" => place.1.clone(),
                    "zip" => format!("{}{:02}", place.2, rng.gen_range(0..100)),
                    other => self.value(rng, other, &first, &last),
                }
            };
            p.set(attr, &v);
        }
        p
    }
}

fn typo(rng: &mut ChaCha8Rng, value: &str) -> String {
    let mut cs: Vec<char> = value.chars().collect();
    let alnum: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].is_alphanumeric()).collect();
    let Some(&i) = alnum.choose(rng) else {
        return value.to_string();
    };
    let random_like = |rng: &mut ChaCha8Rng, c: char| {
        if c.is_ascii_digit() {
            (b'0' + rng.gen_range(0..10u8)) as char
        } else {
            (b'a' + rng.gen_range(0..26u8)) as char
        }
    };
    let mut op = rng.gen_range(0..4);
    if op == 2 && alnum.len() < 2 {
        op = 0;
    }
    if op == 3 && (i + 1 >= cs.len() || cs[i + 1] == cs[i]) {
        op = 0;
    }
    match op {
        0 => {
            let orig = cs[i];
            let mut r = random_like(rng, orig);
            while r.eq_ignore_ascii_case(&orig) {
                r = random_like(rng, orig);
            }
            cs[i] = r;
        }
        1 => {
            let r = random_like(rng, cs[i]);
            cs.insert(i + 1, r);
        }
        2 => {
            cs.remove(i);
        }
        _ => cs.swap(i, i + 1),
    }
    cs.into_iter().collect()
}

struct Corrupter<'a> {
    gen: &'a ValueGen,
    schema: &'a Schema,
}

impl Corrupter<'_> {
    fn present(&self, p: &Profile, names: bool) -> Vec<String> {
        self.schema
            .attributes()
            .iter()
            .filter(|a| names || !self.schema.is_name_attribute(a))
            .filter(|a| p.get(a).is_some())
            .cloned()
            .collect()
    }

    fn multi_word(&self, p: &Profile) -> Vec<String> {
        self.present(p, true)
            .into_iter()
            .filter(|a| p.get(a).is_some_and(|v| v.split_whitespace().count() >= 2))
            .collect()
    }

    fn applicable(&self, p: &Profile, c: Corruption) -> bool {
        let first = p.get(&self.gen.first_attr).map(str::to_lowercase);
        match c {
            Corruption::Typo => !self.present(p, true).is_empty(),
            Corruption::TokenDrop => !self.multi_word(p).is_empty(),
            Corruption::FieldOmit | Corruption::FieldNoise => !self.present(p, false).is_empty(),
            Corruption::NicknameSwap => first.is_some_and(|f| {
                pools().nicknames_of.contains_key(&f) || pools().full_of.contains_key(&f)
            }),
            Corruption::SurnameChange => p.get(&self.gen.last_attr).is_some(),
        }
    }

    fn apply(&self, rng: &mut ChaCha8Rng, p: &mut Profile, c: Corruption) {
        match c {
            Corruption::Typo => {
                let attr = self.present(p, true).choose(rng).cloned().expect("applicable");
                let v = typo(rng, p.get(&attr).expect("present"));
                p.set(&attr, &v);
            }
            Corruption::TokenDrop => {
                let attr = self.multi_word(p).choose(rng).cloned().expect("applicable");
                let mut words: Vec<&str> = p.get(&attr).expect("present").split_whitespace().collect();
                words.remove(rng.gen_range(0..words.len()));
                let v = words.join(" ");
                p.set(&attr, &v);
            }
            Corruption::FieldOmit => {
                let attr = self.present(p, false).choose(rng).cloned().expect("applicable");
                p.values.remove(&attr);
            }
            Corruption::FieldNoise => {
                let attr = self.present(p, false).choose(rng).cloned().expect("applicable");
                let old = p.get(&attr).expect("present").to_string();
                let first = p.get(&self.gen.first_attr).unwrap_or("x").to_string();
                let last = p.get(&self.gen.last_attr).unwrap_or("x").to_string();
                let mut v = self.gen.value(rng, &attr, &first, &last);
                for _ in 0..8 {
                    if v != old {
                        break;
                    }
                    v = self.gen.value(rng, &attr, &first, &last);
                }
                p.set(&attr, &v);
            }
            Corruption::NicknameSwap => {
                let f = p.get(&self.gen.first_attr).expect("applicable").to_lowercase();
                let swapped = match pools().nicknames_of.get(&f) {
                    Some(nicks) => nicks.choose(rng).expect("non-empty").clone(),
                    None => pools().full_of[&f].clone(),
                };
                p.set(&self.gen.first_attr.clone(), &title_case(&swapped));
            }
            Corruption::SurnameChange => {
                let old = p.get(&self.gen.last_attr).expect("applicable").to_string();
                let mut v = self.gen.last_name(rng);
                while v == old {
                    v = self.gen.last_name(rng);
                }
                p.set(&self.gen.last_attr.clone(), &v);
            }
        }
    }
}

/// Builds a corpus. Fully determined by `cfg` (including its seed) and the schema.
pub fn generate(cfg: &GenConfig, schema: &Schema) -> Result<GeneratedCorpus, GenError> {
    cfg.validate()?;
    if schema.name_attributes().len() != 2 {
        return Err(GenError::NameAttributes(schema.name_attributes().len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gen = ValueGen::new(schema, cfg.name_skew);
    let corrupter = Corrupter { gen: &gen, schema };

    let width = cfg.n_originals.max(1).to_string().len().max(5);
    let n_with_dups = (cfg.dup_rate * cfg.n_originals as f64).round() as usize;
    let with_dups: BTreeSet<usize> = rand::seq::index::sample(&mut rng, cfg.n_originals, n_with_dups)
        .into_iter()
        .collect();

    let mut out = GeneratedCorpus::default();
    for i in 0..cfg.n_originals {
        let orig_id = ProfileId::new(format!("rec-{i:0width$}-org"));
        let original = gen.original(&mut rng, orig_id.clone(), schema, cfg.attribute_density);
        let mut cluster = vec![orig_id];
        let dups = if with_dups.contains(&i) {
            rng.gen_range(1..=cfg.max_dups_per_original)
        } else {
            0
        };
        out.profiles.push(original.clone());
        for d in 0..dups {
            let id = ProfileId::new(format!("rec-{i:0width$}-dup-{d}"));
            let mut dup = original.clone();
            dup.id = id.clone();
            let mut applied = Vec::new();
            for _ in 0..cfg.corruptions_per_dup {
                let weights: Vec<f64> = Corruption::ALL
                    .iter()
                    .map(|&c| if corrupter.applicable(&dup, c) { cfg.weight(c) } else { 0.0 })
                    .collect();
                let Ok(dist) = WeightedIndex::new(&weights) else {
                    break;
                };
                let c = Corruption::ALL[dist.sample(&mut rng)];
                corrupter.apply(&mut rng, &mut dup, c);
                applied.push(c);
            }
            out.applied.insert(id.clone(), applied);
            cluster.push(id);
            out.profiles.push(dup);
        }
        out.clusters.push(cluster);
    }
    out.gold = GoldStandard::from_clusters(out.clusters.iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> GenConfig {
        GenConfig {
            n_originals: 200,
            seed,
            ..GenConfig::default()
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let schema = Schema::default();
        let a = generate(&small(7), &schema).unwrap();
        let b = generate(&small(7), &schema).unwrap();
        assert_eq!(a.profiles, b.profiles);
        assert_eq!(a.gold, b.gold);
        let c = generate(&small(8), &schema).unwrap();
        assert_ne!(a.profiles, c.profiles);
    }

    #[test]
    fn cluster_sizes_and_gold() {
        let schema = Schema::default();
        let g = generate(&small(1), &schema).unwrap();
        assert_eq!(g.clusters.len(), 200);
        let with_dups = g.clusters.iter().filter(|c| c.len() > 1).count();
        assert_eq!(with_dups, 100);
        assert!(g.clusters.iter().all(|c| c.len() <= 3));
        let expected: usize = g.clusters.iter().map(|c| c.len() * (c.len() - 1) / 2).sum();
        assert_eq!(g.gold.len(), expected);
        assert_eq!(g.profiles.len(), g.clusters.iter().map(Vec::len).sum::<usize>());
        let ids: BTreeSet<&ProfileId> = g.profiles.iter().map(|p| &p.id).collect();
        assert_eq!(ids.len(), g.profiles.len());
    }

    #[test]
    fn no_duplicates_means_empty_gold() {
        let cfg = GenConfig {
            n_originals: 10,
            dup_rate: 0.0,
            ..GenConfig::default()
        };
        let g = generate(&cfg, &Schema::default()).unwrap();
        assert_eq!(g.profiles.len(), 10);
        assert!(g.gold.is_empty());
    }

    #[test]
    fn zero_corruptions_copy_values() {
        let cfg = GenConfig {
            corruptions_per_dup: 0,
            ..small(3)
        };
        let g = generate(&cfg, &Schema::default()).unwrap();
        let by_id: BTreeMap<&ProfileId, &Profile> = g.profiles.iter().map(|p| (&p.id, p)).collect();
        for c in &g.clusters {
            for d in &c[1..] {
                assert_eq!(by_id[d].values, by_id[&c[0]].values);
            }
        }
    }

    #[test]
    fn duplicates_differ_in_few_attributes() {
        let schema = Schema::default();
        let cfg = GenConfig {
            corruptions_per_dup: 3,
            ..small(11)
        };
        let g = generate(&cfg, &schema).unwrap();
        let by_id: BTreeMap<&ProfileId, &Profile> = g.profiles.iter().map(|p| (&p.id, p)).collect();
        for c in &g.clusters {
            let orig = by_id[&c[0]];
            for d in &c[1..] {
                let dup = by_id[d];
                let changed = schema
                    .attributes()
                    .iter()
                    .filter(|a| orig.get(a) != dup.get(a))
                    .count();
                assert!(changed <= 3, "{d} changed {changed} attributes");
            }
        }
    }

    #[test]
    fn names_always_present_and_density_respected() {
        let schema = Schema::default();
        let cfg = GenConfig {
            attribute_density: 0.0,
            corruptions_per_dup: 0,
            ..small(5)
        };
        let g = generate(&cfg, &schema).unwrap();
        for p in &g.profiles {
            assert_eq!(p.values.len(), 2);
            assert!(p.get("first_name").is_some() && p.get("last_name").is_some());
        }
    }

    #[test]
    fn surname_change_only_touches_last_name() {
        let schema = Schema::default();
        let mut weights = BTreeMap::new();
        weights.insert(Corruption::SurnameChange, 1.0);
        let cfg = GenConfig {
            corruptions_per_dup: 1,
            corruption_weights: weights,
            ..small(9)
        };
        let g = generate(&cfg, &schema).unwrap();
        let by_id: BTreeMap<&ProfileId, &Profile> = g.profiles.iter().map(|p| (&p.id, p)).collect();
        for c in &g.clusters {
            for d in &c[1..] {
                let (o, p) = (by_id[&c[0]], by_id[d]);
                assert_ne!(o.get("last_name"), p.get("last_name"));
                assert_eq!(o.get("first_name"), p.get("first_name"));
                assert_eq!(o.get("email"), p.get("email"));
            }
        }
    }

    #[test]
    fn typo_is_one_edit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..500 {
            let t = typo(&mut rng, "Accountant");
            assert_ne!(t.to_lowercase(), "accountant");
            assert!((t.len() as i64 - 10).abs() <= 1);
        }
        assert_eq!(typo(&mut rng, "--"), "--");
    }

    #[test]
    fn presets_and_validation() {
        assert_eq!(GenConfig::preset("febrl1").unwrap().n_originals, 2000);
        assert_eq!(GenConfig::preset("febrl3").unwrap().n_originals, 4000);
        assert!(GenConfig::preset("febrl9").is_err());
        let p = GenConfig::preset("febrl2").unwrap();
        assert_eq!((p.dup_rate, p.max_dups_per_original, p.corruptions_per_dup), (0.5, 2, 2));
        let bad = GenConfig {
            dup_rate: 1.5,
            ..GenConfig::default()
        };
        assert_eq!(bad.validate(), Err(GenError::DupRate(1.5)));
        let bad = GenConfig {
            corruption_weights: BTreeMap::from([(Corruption::Typo, 0.0)]),
            ..GenConfig::default()
        };
        assert_eq!(bad.validate(), Err(GenError::NoWeights));
        let bad = GenConfig {
            corruption_weights: BTreeMap::from([(Corruption::Typo, -1.0)]),
            ..GenConfig::default()
        };
        assert_eq!(bad.validate(), Err(GenError::Weight(Corruption::Typo)));
        assert_eq!("surname_change".parse::<Corruption>().unwrap(), Corruption::SurnameChange);
    }
}
