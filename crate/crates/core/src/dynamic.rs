//! Hierarchical (dynamic) blocking.
//!
//! Profiles are first grouped on a canonical name key. A group that is too
//! large is split by adding one more `(attribute, token)` predicate drawn from
//! the attribute priority list, and the split recurses until every group is
//! within the threshold, the depth cap is reached, or the attributes run out.
//! A key is only ever extended with attributes that come later in the
//! priority list than the last one it already carries, so each key set is
//! reached by exactly one path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;
use crate::corpus::{emit_block_pairs, Corpus, CorpusError, PairCodes, TokenId};
use crate::model::{Block, BlockKey, CandidatePairSet, Predicate, Profile, ProfileId, Schema};
use crate::normalize::{normalize_token, NormalizationConfig};

pub const DEFAULT_THRESHOLD: usize = 100;
pub const DEFAULT_MAX_DEPTH: usize = 3;

/// Sub-blocking order for the 17-attribute schema; with the two name
/// attributes this makes 13 attributes in total.
pub const DEFAULT_PRIORITY: [&str; 11] = [
    "email", "phone", "username", "employer", "job_title", "city", "zip", "state", "school",
    "degree", "skill",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NameKeyMode {
    /// One key from (first given-name token, last family-name token).
    FullName,
    /// The full-name key plus a family-name-only key.
    FullNamePlusLastname,
}

impl std::str::FromStr for NameKeyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full_name" => Ok(Self::FullName),
            "full_name_plus_lastname" => Ok(Self::FullNamePlusLastname),
            other => Err(format!("unknown name key mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynConfig {
    pub threshold: usize,
    pub attribute_priority: Vec<String>,
    /// Maximum number of levels: the name level plus extensions.
    pub max_depth: usize,
    pub name_key_mode: NameKeyMode,
    /// Emit blocks that are still oversized when splitting stops instead of
    /// discarding them.
    pub accept_oversized: bool,
}

impl DynConfig {
    pub fn new(schema: &Schema) -> Self {
        let default_schema = Schema::default();
        let attribute_priority = if schema.attributes() == default_schema.attributes() {
            DEFAULT_PRIORITY.iter().map(|s| s.to_string()).collect()
        } else {
            schema
                .attributes()
                .iter()
                .filter(|a| !schema.is_name_attribute(a))
                .cloned()
                .collect()
        };
        Self {
            threshold: DEFAULT_THRESHOLD,
            attribute_priority,
            max_depth: DEFAULT_MAX_DEPTH,
            name_key_mode: NameKeyMode::FullName,
            accept_oversized: false,
        }
    }

    pub fn with_threshold(mut self, t: usize) -> Self {
        self.threshold = t;
        self
    }

    pub fn with_priority<I: IntoIterator<Item = S>, S: Into<String>>(mut self, attrs: I) -> Self {
        self.attribute_priority = attrs.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_max_depth(mut self, d: usize) -> Self {
        self.max_depth = d;
        self
    }

    pub fn with_name_key_mode(mut self, m: NameKeyMode) -> Self {
        self.name_key_mode = m;
        self
    }

    pub fn validate(&self, schema: &Schema) -> Result<(), ConfigError> {
        if self.threshold < 2 {
            return Err(ConfigError::ThresholdTooSmall(self.threshold));
        }
        if self.max_depth < 1 {
            return Err(ConfigError::ZeroDepth);
        }
        if schema.name_attributes().len() != 2 {
            return Err(ConfigError::NameAttributes(schema.name_attributes().len()));
        }
        for (i, a) in self.attribute_priority.iter().enumerate() {
            if !schema.contains(a) {
                return Err(ConfigError::UnknownAttribute(a.clone()));
            }
            if schema.is_name_attribute(a) {
                return Err(ConfigError::NameAttributeInPriority(a.clone()));
            }
            if self.attribute_priority[..i].contains(a) {
                return Err(ConfigError::DuplicatePriority(a.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynDiagnostics {
    /// Distinct top-level name keys.
    pub top_level_blocks: usize,
    pub profiles_without_name_key: usize,
    /// Blocks accepted at any level (size within `[2, T]`).
    pub accepted_blocks: usize,
    /// Oversized blocks that were split further.
    pub split_blocks: usize,
    pub discarded_at_depth_limit: usize,
    pub discarded_attributes_exhausted: usize,
    /// Sum of member counts over discarded oversized blocks.
    pub discarded_members: usize,
    pub deepest_level: usize,
}

impl DynDiagnostics {
    fn merge(mut self, o: Self) -> Self {
        self.top_level_blocks += o.top_level_blocks;
        self.profiles_without_name_key += o.profiles_without_name_key;
        self.accepted_blocks += o.accepted_blocks;
        self.split_blocks += o.split_blocks;
        self.discarded_at_depth_limit += o.discarded_at_depth_limit;
        self.discarded_attributes_exhausted += o.discarded_attributes_exhausted;
        self.discarded_members += o.discarded_members;
        self.deepest_level = self.deepest_level.max(o.deepest_level);
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("block of {size} members is within the threshold {threshold}; nothing to split")]
    NotOversized { size: usize, threshold: usize },
    #[error("block member `{0}` is not in the corpus")]
    UnknownMember(ProfileId),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Top-level keys for one profile.
pub fn name_keys(profile: &Profile, schema: &Schema, norm: &NormalizationConfig, mode: NameKeyMode) -> Vec<BlockKey> {
    let names = schema.name_attributes();
    if names.len() != 2 {
        return Vec::new();
    }
    let (first_attr, last_attr) = (&names[0], &names[1]);
    let first = profile
        .get(first_attr)
        .map(|v| normalize_token(first_attr, v, norm))
        .and_then(|t| t.first().cloned());
    let last = profile
        .get(last_attr)
        .map(|v| normalize_token(last_attr, v, norm))
        .and_then(|t| t.last().cloned());
    let mut keys = Vec::new();
    if let (Some(f), Some(l)) = (&first, &last) {
        keys.push(
            BlockKey::new([
                Predicate::new(first_attr.clone(), f.clone()),
                Predicate::new(last_attr.clone(), l.clone()),
            ])
            .expect("two predicates"),
        );
    }
    if mode == NameKeyMode::FullNamePlusLastname {
        if let Some(l) = last {
            keys.push(BlockKey::single(last_attr.clone(), l));
        }
    }
    keys
}

const LAST_ONLY: u64 = (u32::MAX as u64) << 32;

fn name_key_codes(corpus: &Corpus, p: u32, mode: NameKeyMode) -> impl Iterator<Item = u64> {
    let first = corpus.name_tokens(p, 0).first().copied();
    let last = corpus.name_tokens(p, 1).last().copied();
    let full = match (first, last) {
        (Some(f), Some(l)) => Some(((f as u64) << 32) | l as u64),
        _ => None,
    };
    let last_only = match (mode, last) {
        (NameKeyMode::FullNamePlusLastname, Some(l)) => Some(LAST_ONLY | l as u64),
        _ => None,
    };
    full.into_iter().chain(last_only)
}

fn name_key_of(corpus: &Corpus, code: u64) -> BlockKey {
    let names = corpus.schema().name_attributes();
    let last = Predicate::new(names[1].clone(), corpus.token_str(code as u32));
    if code & LAST_ONLY == LAST_ONLY {
        BlockKey::new([last]).expect("one predicate")
    } else {
        let first = Predicate::new(names[0].clone(), corpus.token_str((code >> 32) as u32));
        BlockKey::new([first, last]).expect("two predicates")
    }
}

/// Receives accepted blocks during the recursive split.
trait Sink {
    /// `path` lists the `(schema attribute, token)` extensions below the top-level key.
    fn accept(&mut self, path: &[(usize, TokenId)], members: &[u32]);
}

struct PairSink(Vec<u64>);

impl Sink for PairSink {
    fn accept(&mut self, _path: &[(usize, TokenId)], members: &[u32]) {
        emit_block_pairs(members, &mut self.0);
    }
}

struct BlockSink<'a> {
    corpus: &'a Corpus,
    base: BlockKey,
    blocks: Vec<Block>,
}

impl Sink for BlockSink<'_> {
    fn accept(&mut self, path: &[(usize, TokenId)], members: &[u32]) {
        let attrs = self.corpus.schema().attributes();
        let key = path.iter().fold(self.base.clone(), |k, &(a, t)| {
            k.extended(Predicate::new(attrs[a].clone(), self.corpus.token_str(t)))
        });
        self.blocks
            .push(Block::new(key, members.iter().map(|&m| self.corpus.id(m).clone())));
    }
}

struct Splitter<'a> {
    corpus: &'a Corpus,
    cfg: &'a DynConfig,
    /// Priority list as schema attribute slots.
    priority: Vec<usize>,
}

impl<'a> Splitter<'a> {
    fn new(corpus: &'a Corpus, cfg: &'a DynConfig) -> Self {
        let schema = corpus.schema();
        let priority = cfg
            .attribute_priority
            .iter()
            .filter_map(|a| schema.index_of(a))
            .collect();
        Self { corpus, cfg, priority }
    }

    /// `depth` is the level of `members` (1 = name level); `start` the first
    /// priority position still available for extension.
    fn resolve<S: Sink>(
        &self,
        members: &[u32],
        depth: usize,
        start: usize,
        path: &mut Vec<(usize, TokenId)>,
        sink: &mut S,
        diag: &mut DynDiagnostics,
    ) {
        let n = members.len();
        if n < 2 {
            return;
        }
        diag.deepest_level = diag.deepest_level.max(depth);
        if n <= self.cfg.threshold {
            diag.accepted_blocks += 1;
            sink.accept(path, members);
            return;
        }
        if depth >= self.cfg.max_depth || start >= self.priority.len() {
            if depth >= self.cfg.max_depth {
                diag.discarded_at_depth_limit += 1;
            } else {
                diag.discarded_attributes_exhausted += 1;
            }
            diag.discarded_members += n;
            log::trace!("oversized block of {n} at level {depth} left unsplit");
            if self.cfg.accept_oversized {
                sink.accept(path, members);
            }
            return;
        }
        diag.split_blocks += 1;
        let mut entries: Vec<(TokenId, u32)> = Vec::new();
        for pos in start..self.priority.len() {
            let attr = self.priority[pos];
            entries.clear();
            for &m in members {
                entries.extend(self.corpus.tokens(m, attr).iter().map(|&t| (t, m)));
            }
            entries.sort_unstable();
            let mut i = 0;
            while i < entries.len() {
                let tok = entries[i].0;
                let mut j = i + 1;
                while j < entries.len() && entries[j].0 == tok {
                    j += 1;
                }
                if j - i >= 2 {
                    let group: Vec<u32> = entries[i..j].iter().map(|&(_, m)| m).collect();
                    path.push((attr, tok));
                    self.resolve(&group, depth + 1, pos + 1, path, sink, diag);
                    path.pop();
                }
                i = j;
            }
        }
    }
}

/// Result of one dynamic-blocking run over a prepared corpus.
#[derive(Debug, Clone, Default)]
pub struct DynRun {
    pub pairs: PairCodes,
    pub diagnostics: DynDiagnostics,
}

/// Top-level groups as `(name key code, sorted members)`.
fn top_level_groups(corpus: &Corpus, mode: NameKeyMode) -> (Vec<(u64, Vec<u32>)>, usize) {
    let mut entries: Vec<(u64, u32)> = (0..corpus.len() as u32)
        .into_par_iter()
        .flat_map_iter(|p| name_key_codes(corpus, p, mode).map(move |k| (k, p)))
        .collect();
    entries.par_sort_unstable();
    let mut has_key = vec![false; corpus.len()];
    let mut groups: Vec<(u64, Vec<u32>)> = Vec::new();
    for (k, p) in entries {
        has_key[p as usize] = true;
        match groups.last_mut() {
            Some((gk, members)) if *gk == k => members.push(p),
            _ => groups.push((k, vec![p])),
        }
    }
    let without = has_key.iter().filter(|h| !**h).count();
    (groups, without)
}

pub fn run(corpus: &Corpus, cfg: &DynConfig) -> DynRun {
    if corpus.schema().name_attributes().len() != 2 {
        return DynRun {
            pairs: PairCodes::default(),
            diagnostics: DynDiagnostics {
                profiles_without_name_key: corpus.len(),
                ..Default::default()
            },
        };
    }
    let (groups, without) = top_level_groups(corpus, cfg.name_key_mode);
    let splitter = Splitter::new(corpus, cfg);
    let (codes, mut diag) = groups
        .par_iter()
        .fold(
            || (PairSink(Vec::new()), DynDiagnostics::default()),
            |(mut sink, mut diag), (_, members)| {
                diag.top_level_blocks += 1;
                splitter.resolve(members, 1, 0, &mut Vec::new(), &mut sink, &mut diag);
                (sink, diag)
            },
        )
        .map(|(sink, diag)| (sink.0, diag))
        .reduce(
            || (Vec::new(), DynDiagnostics::default()),
            |(mut a, da), (b, db)| {
                a.extend(b);
                (a, da.merge(db))
            },
        );
    diag.profiles_without_name_key = without;
    log::debug!(
        "dynamic blocking: {} name blocks, {} accepted, {} discarded oversized",
        diag.top_level_blocks,
        diag.accepted_blocks,
        diag.discarded_at_depth_limit + diag.discarded_attributes_exhausted
    );
    DynRun {
        pairs: PairCodes::from_unsorted(codes),
        diagnostics: diag,
    }
}

/// Every accepted block, ordered by key.
pub fn accepted_blocks(corpus: &Corpus, cfg: &DynConfig) -> Vec<Block> {
    if corpus.schema().name_attributes().len() != 2 {
        return Vec::new();
    }
    let (groups, _) = top_level_groups(corpus, cfg.name_key_mode);
    let splitter = Splitter::new(corpus, cfg);
    let mut blocks: Vec<Block> = groups
        .par_iter()
        .flat_map_iter(|(code, members)| {
            let mut sink = BlockSink {
                corpus,
                base: name_key_of(corpus, *code),
                blocks: Vec::new(),
            };
            let mut diag = DynDiagnostics::default();
            splitter.resolve(members, 1, 0, &mut Vec::new(), &mut sink, &mut diag);
            sink.blocks
        })
        .collect();
    blocks.sort_by(|a, b| a.key.cmp(&b.key));
    blocks
}

/// Splits one oversized block and returns the accepted sub-blocks.
///
/// The block's key decides where splitting resumes: its level is one plus the
/// number of non-name predicates, and only priority attributes after the
/// latest one already in the key are used.
pub fn dyn_split(block: &Block, cfg: &DynConfig, corpus: &Corpus) -> Result<Vec<Block>, SplitError> {
    cfg.validate(corpus.schema())?;
    if block.len() <= cfg.threshold {
        return Err(SplitError::NotOversized {
            size: block.len(),
            threshold: cfg.threshold,
        });
    }
    let members = block
        .members
        .iter()
        .map(|id| corpus.index_of(id).ok_or_else(|| SplitError::UnknownMember(id.clone())))
        .collect::<Result<Vec<u32>, _>>()?;
    let schema = corpus.schema();
    let extensions: Vec<&Predicate> = block
        .key
        .predicates()
        .iter()
        .filter(|p| !schema.is_name_attribute(&p.attribute))
        .collect();
    let start = extensions
        .iter()
        .filter_map(|p| cfg.attribute_priority.iter().position(|a| *a == p.attribute))
        .max()
        .map_or(0, |pos| pos + 1);

    let splitter = Splitter::new(corpus, cfg);
    let mut sink = BlockSink {
        corpus,
        base: block.key.clone(),
        blocks: Vec::new(),
    };
    let mut diag = DynDiagnostics::default();
    splitter.resolve(&members, 1 + extensions.len(), start, &mut Vec::new(), &mut sink, &mut diag);
    let mut blocks = sink.blocks;
    blocks.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(blocks)
}

/// Candidate pairs and diagnostics for a raw profile list.
pub fn dyn_pairs(
    profiles: &[Profile],
    schema: &Schema,
    cfg: &DynConfig,
    norm: &NormalizationConfig,
) -> Result<(CandidatePairSet, DynDiagnostics), CorpusError> {
    let corpus = Corpus::prepare(profiles, schema, norm)?;
    let out = run(&corpus, cfg);
    Ok((corpus.pair_set(&out.pairs), out.diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sample_profiles, sample_schema};

    fn sample_corpus() -> Corpus {
        let schema = sample_schema();
        Corpus::prepare(&sample_profiles(), &schema, &NormalizationConfig::for_schema(&schema)).unwrap()
    }

    #[test]
    fn name_keys_use_canonical_names() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let ps = sample_profiles();
        let k1 = name_keys(&ps[0], &schema, &norm, NameKeyMode::FullName);
        let k3 = name_keys(&ps[2], &schema, &norm, NameKeyMode::FullName);
        assert_eq!(k3.len(), 1);
        assert_eq!(k3[0].to_string(), "first_name:benjamin&last_name:smith");
        assert_eq!(k1, k3);
        let k4 = name_keys(&ps[3], &schema, &norm, NameKeyMode::FullName);
        let k5 = name_keys(&ps[4], &schema, &norm, NameKeyMode::FullName);
        assert_eq!(k5[0].to_string(), "first_name:elizabeth&last_name:edwards");
        assert_ne!(k4, k5);

        let last_only = Profile::new("X").with("last_name", "Smith");
        assert!(name_keys(&last_only, &schema, &norm, NameKeyMode::FullName).is_empty());
        let plus = name_keys(&last_only, &schema, &norm, NameKeyMode::FullNamePlusLastname);
        assert_eq!(plus, vec![BlockKey::single("last_name", "smith")]);
        let plus3 = name_keys(&ps[2], &schema, &norm, NameKeyMode::FullNamePlusLastname);
        assert_eq!(plus3.len(), 2);
    }

    #[test]
    fn multi_word_names_use_first_and_last_tokens() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let p = Profile::new("X").with("first_name", "Mary Ann").with("last_name", "De La Cruz");
        let k = name_keys(&p, &schema, &norm, NameKeyMode::FullName);
        assert_eq!(k[0].to_string(), "first_name:mary&last_name:cruz");
    }

    #[test]
    fn sample_pairs_at_threshold_two() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let cfg = DynConfig::new(&schema).with_threshold(2);
        let (pairs, diag) = dyn_pairs(&sample_profiles(), &schema, &cfg, &norm).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs.contains_ids("P1", "P3"));
        assert!(!pairs.contains_ids("P4", "P5"));
        assert_eq!(diag.top_level_blocks, 4);
        assert_eq!(diag.profiles_without_name_key, 0);
    }

    #[test]
    fn split_of_smith_block_yields_nothing() {
        // {P1,P2,P3} on last_name:smith with T=2: the country sub-block keeps
        // all three, and nothing follows country in the priority list.
        let corpus = sample_corpus();
        let cfg = DynConfig::new(corpus.schema())
            .with_threshold(2)
            .with_priority(["occupation", "city", "country"])
            .with_name_key_mode(NameKeyMode::FullNamePlusLastname);
        let block = Block::new(
            BlockKey::single("last_name", "smith"),
            ["P1", "P2", "P3"].map(ProfileId::new),
        );
        assert!(dyn_split(&block, &cfg, &corpus).unwrap().is_empty());

        // with a deeper cap the outcome is the same: every deeper group is a singleton
        let deep = cfg.clone().with_max_depth(10);
        assert!(dyn_split(&block, &deep, &corpus).unwrap().is_empty());
    }

    #[test]
    fn split_requires_oversized_block() {
        let corpus = sample_corpus();
        let cfg = DynConfig::new(corpus.schema()).with_threshold(2);
        let block = Block::new(BlockKey::single("last_name", "smith"), ["P1", "P3"].map(ProfileId::new));
        assert_eq!(
            dyn_split(&block, &cfg, &corpus),
            Err(SplitError::NotOversized { size: 2, threshold: 2 })
        );
    }

    #[test]
    fn split_without_shared_values_emits_nothing() {
        let schema = Schema::with_attributes(["first_name", "last_name", "city", "employer"]).unwrap();
        let ps: Vec<Profile> = ["Reno", "Austin", "Boise"]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Profile::new(format!("Q{i}"))
                    .with("first_name", "Ann")
                    .with("last_name", "Lee")
                    .with("city", c)
                    .with("employer", &format!("Acme{i}"))
            })
            .collect();
        let corpus = Corpus::prepare(&ps, &schema, &NormalizationConfig::for_schema(&schema)).unwrap();
        let cfg = DynConfig::new(&schema).with_threshold(2);
        let block = Block::new(
            BlockKey::new([Predicate::new("first_name", "ann"), Predicate::new("last_name", "lee")]).unwrap(),
            ps.iter().map(|p| p.id.clone()),
        );
        assert!(dyn_split(&block, &cfg, &corpus).unwrap().is_empty());
    }

    /// Five profiles sharing one name and one employer.
    ///
    /// Hand enumeration with T=2, priority [employer, city, job_title], depth 3:
    /// level 1 ann|lee = {R0..R4} oversized; level 2 employer:acme = {R0..R4}
    /// oversized, city:reno = {R0,R1} accepted, city:boise = {R2,R3,R4}
    /// oversized, job_title:nurse = {R0,R2} accepted, job_title:clerk =
    /// {R1,R3,R4} oversized with no attribute left -> discarded; level 3 (cap)
    /// acme&reno = {R0,R1} accepted, acme&boise discarded, acme&nurse =
    /// {R0,R2} accepted, acme&clerk discarded, boise&clerk = {R3,R4} accepted.
    /// Pairs: (R0,R1), (R0,R2), (R3,R4).
    #[test]
    fn shared_name_and_employer_fixture() {
        let schema = Schema::with_attributes(["first_name", "last_name", "employer", "city", "job_title"]).unwrap();
        let rows = [
            ("R0", "Reno", "Nurse"),
            ("R1", "Reno", "Clerk"),
            ("R2", "Boise", "Nurse"),
            ("R3", "Boise", "Clerk"),
            ("R4", "Boise", "Clerk"),
        ];
        let ps: Vec<Profile> = rows
            .iter()
            .map(|(id, city, job)| {
                Profile::new(*id)
                    .with("first_name", "Ann")
                    .with("last_name", "Lee")
                    .with("employer", "Acme")
                    .with("city", city)
                    .with("job_title", job)
            })
            .collect();
        let norm = NormalizationConfig::for_schema(&schema);
        let cfg = DynConfig::new(&schema)
            .with_threshold(2)
            .with_priority(["employer", "city", "job_title"]);
        let (pairs, diag) = dyn_pairs(&ps, &schema, &cfg, &norm).unwrap();
        let got: Vec<String> = pairs.iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["(R0,R1)", "(R0,R2)", "(R3,R4)"]);
        assert_eq!(diag.discarded_at_depth_limit, 2);
        assert_eq!(diag.discarded_attributes_exhausted, 1);

        // employer alone cannot split the block: nothing survives
        let only_employer = cfg.clone().with_priority(["employer"]);
        let (pairs, diag) = dyn_pairs(&ps, &schema, &only_employer, &norm).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(diag.discarded_attributes_exhausted, 1);
    }

    #[test]
    fn empty_corpus() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let (pairs, diag) = dyn_pairs(&[], &schema, &DynConfig::new(&schema), &norm).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(diag, DynDiagnostics::default());
    }

    #[test]
    fn accept_oversized_flag() {
        let corpus = sample_corpus();
        let mut cfg = DynConfig::new(corpus.schema())
            .with_threshold(2)
            .with_max_depth(1)
            .with_name_key_mode(NameKeyMode::FullNamePlusLastname);
        let strict = run(&corpus, &cfg);
        cfg.accept_oversized = true;
        let loose = run(&corpus, &cfg);
        // the smith last-name block {P1,P2,P3} is kept whole only when accepted
        assert_eq!(strict.pairs.len(), 1);
        assert_eq!(loose.pairs.len(), 3);
    }

    #[test]
    fn config_validation() {
        let schema = sample_schema();
        let base = DynConfig::new(&schema);
        assert_eq!(base.validate(&schema), Ok(()));
        assert_eq!(
            base.clone().with_threshold(1).validate(&schema),
            Err(ConfigError::ThresholdTooSmall(1))
        );
        assert_eq!(base.clone().with_max_depth(0).validate(&schema), Err(ConfigError::ZeroDepth));
        assert_eq!(
            base.clone().with_priority(["first_name"]).validate(&schema),
            Err(ConfigError::NameAttributeInPriority("first_name".into()))
        );
        assert_eq!(
            base.clone().with_priority(["city", "city"]).validate(&schema),
            Err(ConfigError::DuplicatePriority("city".into()))
        );
        assert_eq!(
            DynConfig::new(&Schema::default()).attribute_priority.len() + 2,
            13
        );
    }
}
