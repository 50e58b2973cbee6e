//! Attribute Clustering blocking.
//!
//! Every profile emits one key per (attribute, token) it holds, or per token
//! alone in schema-agnostic mode. Keys are grouped by a counting sort over
//! interned tokens; singletons and blocks larger than the purge threshold
//! are discarded, and the surviving blocks are expanded into pairs.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::corpus::{encode_pair, Column, Corpus, CorpusError, PairCodes};
use crate::model::{Block, BlockKey, CandidatePairSet, Profile, Schema, ANY_ATTRIBUTE};
use crate::normalize::NormalizationConfig;

pub const DEFAULT_PURGE_THRESHOLD: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcMode {
    /// Keys carry the attribute name: `occupation:teacher`.
    SchemaAware,
    /// Keys are bare tokens regardless of source attribute.
    SchemaAgnostic,
}

impl std::str::FromStr for AcMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "schema_aware" | "aware" => Ok(Self::SchemaAware),
            "schema_agnostic" | "agnostic" => Ok(Self::SchemaAgnostic),
            other => Err(format!("unknown AC mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcConfig {
    pub mode: AcMode,
    /// Largest retained block size.
    pub purge_threshold: usize,
    pub attributes_used: Vec<String>,
    /// Use nickname-canonicalized tokens for name attributes. Off by default:
    /// AC keys are built from the literal (normalized) values.
    pub apply_nicknames: bool,
}

impl AcConfig {
    /// Schema-aware, all schema attributes, default threshold.
    pub fn new(schema: &Schema) -> Self {
        Self {
            mode: AcMode::SchemaAware,
            purge_threshold: DEFAULT_PURGE_THRESHOLD,
            attributes_used: schema.attributes().to_vec(),
            apply_nicknames: false,
        }
    }

    pub fn with_threshold(mut self, t: usize) -> Self {
        self.purge_threshold = t;
        self
    }

    pub fn with_mode(mut self, mode: AcMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self, schema: &Schema) -> Result<(), ConfigError> {
        if self.purge_threshold < 2 {
            return Err(ConfigError::ThresholdTooSmall(self.purge_threshold));
        }
        if self.attributes_used.is_empty() {
            return Err(ConfigError::NoAttributes);
        }
        for a in &self.attributes_used {
            if !schema.contains(a) {
                return Err(ConfigError::UnknownAttribute(a.clone()));
            }
        }
        Ok(())
    }
}

/// Blocks dropped by [`purge`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurgeReport {
    pub retained_blocks: usize,
    pub dropped_oversized: usize,
    pub dropped_singletons: usize,
    /// Sum of member counts over all dropped blocks.
    pub dropped_membership: usize,
}

impl PurgeReport {
    fn record(&mut self, size: usize, threshold: usize) {
        if is_retained(size, threshold) {
            self.retained_blocks += 1;
        } else {
            if size > threshold {
                self.dropped_oversized += 1;
            } else {
                self.dropped_singletons += 1;
            }
            self.dropped_membership += size;
        }
    }
}

/// A block survives purging iff `2 <= size <= threshold`.
#[inline]
pub fn is_retained(size: usize, threshold: usize) -> bool {
    size >= 2 && size <= threshold
}

/// Keeps blocks with `2 <= |members| <= threshold`.
pub fn purge(blocks: Vec<Block>, threshold: usize) -> (Vec<Block>, PurgeReport) {
    let mut report = PurgeReport::default();
    let mut kept = Vec::new();
    for b in blocks {
        report.record(b.len(), threshold);
        if is_retained(b.len(), threshold) {
            kept.push(b);
        }
    }
    (kept, report)
}

/// Result of one AC run over a prepared corpus.
#[derive(Debug, Clone, Default)]
pub struct AcRun {
    pub pairs: PairCodes,
    pub report: PurgeReport,
    /// Distinct keys before purging.
    pub key_count: usize,
}

/// Grouped inverted index in compressed-row form: the members of key
/// `keys[i]` are `members[bounds[i]..bounds[i + 1]]`, in profile order.
#[derive(Default)]
struct KeyIndex {
    keys: Vec<u64>,
    bounds: Vec<usize>,
    members: Vec<u32>,
}

impl KeyIndex {
    fn len(&self) -> usize {
        self.keys.len()
    }

    fn group(&self, i: usize) -> (u64, &[u32]) {
        (self.keys[i], &self.members[self.bounds[i]..self.bounds[i + 1]])
    }

    /// Counting sort of `n` profiles over a dense key space of `space` ids.
    /// `local_of` must yield each id at most once per profile.
    fn build<'c>(n: u32, space: usize, key_of: impl Fn(u32) -> u64, local_of: impl Fn(u32) -> Cow<'c, [u32]>) -> Self {
        let mut counts = vec![0usize; space];
        for p in 0..n {
            for &l in local_of(p).iter() {
                counts[l as usize] += 1;
            }
        }
        let mut index = KeyIndex {
            bounds: Vec::with_capacity(space + 1),
            ..Default::default()
        };
        index.bounds.push(0);
        let mut total = 0;
        for (l, c) in counts.iter_mut().enumerate() {
            if *c > 0 {
                index.keys.push(key_of(l as u32));
                let start = total;
                total += *c;
                index.bounds.push(total);
                *c = start;
            }
        }
        let mut cursor = counts;
        index.members = vec![0; total];
        for p in 0..n {
            for &l in local_of(p).iter() {
                index.members[cursor[l as usize]] = p;
                cursor[l as usize] += 1;
            }
        }
        index
    }

    fn from_column(n: u32, col: &Column, prefix: u64) -> Self {
        let distinct = col.distinct();
        Self::build(n, distinct.len(), |l| prefix | distinct[l as usize] as u64, |p| Cow::Borrowed(col.local(p)))
    }
}

/// One index per attribute in schema-aware mode (their key spaces are
/// disjoint), or a single token index in schema-agnostic mode.
fn build_index(corpus: &Corpus, cfg: &AcConfig) -> Vec<KeyIndex> {
    let schema = corpus.schema();
    let n = corpus.len() as u32;
    let mut slots: Vec<(usize, Option<usize>)> = cfg
        .attributes_used
        .iter()
        .filter_map(|a| schema.index_of(a))
        .map(|i| (i, if cfg.apply_nicknames { corpus.name_slot(i) } else { None }))
        .collect();
    slots.sort_unstable();
    slots.dedup();
    let column = |(attr, name_slot): (usize, Option<usize>)| match name_slot {
        Some(k) => corpus.name_set_column(k),
        None => corpus.column(attr),
    };

    match cfg.mode {
        AcMode::SchemaAware => slots
            .par_iter()
            .map(|&slot| KeyIndex::from_column(n, column(slot), (slot.0 as u64 + 1) << 32))
            .collect(),
        AcMode::SchemaAgnostic => {
            let cols: Vec<&Column> = slots.iter().map(|&s| column(s)).collect();
            let index = KeyIndex::build(n, corpus.vocab_size(), u64::from, |p| {
                let mut ts: Vec<u32> = cols.iter().flat_map(|c| c.get(p)).copied().collect();
                ts.sort_unstable();
                ts.dedup();
                Cow::Owned(ts)
            });
            vec![index]
        }
    }
}

/// Every `(key, members)` group across the per-attribute indexes.
fn groups(indexes: &[KeyIndex]) -> impl ParallelIterator<Item = (u64, &[u32])> {
    indexes
        .par_iter()
        .flat_map(|ix| (0..ix.len()).into_par_iter().map(move |i| ix.group(i)))
}

fn key_of(corpus: &Corpus, code: u64) -> BlockKey {
    let token = corpus.token_str(code as u32).to_string();
    match (code >> 32) as usize {
        0 => BlockKey::single(ANY_ATTRIBUTE, token),
        slot => BlockKey::single(corpus.schema().attributes()[slot - 1].clone(), token),
    }
}

/// Every block before purging, ordered by key.
pub fn build_blocks(corpus: &Corpus, cfg: &AcConfig) -> Vec<Block> {
    let indexes = build_index(corpus, cfg);
    let mut blocks: Vec<Block> = groups(&indexes)
        .map(|(key, members)| Block::new(key_of(corpus, key), members.iter().map(|&m| corpus.id(m).clone())))
        .collect();
    blocks.sort_by(|a, b| a.key.cmp(&b.key));
    blocks
}

/// Candidate pairs from the purged blocks. Each profile walks its retained
/// blocks and collects higher-indexed neighbours once, so pairs come out
/// sorted and deduplicated without a global sort.
pub fn run(corpus: &Corpus, cfg: &AcConfig) -> AcRun {
    let indexes = build_index(corpus, cfg);
    let t = cfg.purge_threshold;
    let n = corpus.len();
    let mut report = PurgeReport::default();
    let mut retained: Vec<&[u32]> = Vec::new();
    for ix in &indexes {
        for i in 0..ix.len() {
            let members = ix.group(i).1;
            report.record(members.len(), t);
            if is_retained(members.len(), t) {
                retained.push(members);
            }
        }
    }
    let mut bounds = vec![0usize; n + 1];
    for b in &retained {
        for &m in *b {
            bounds[m as usize + 1] += 1;
        }
    }
    for i in 0..n {
        bounds[i + 1] += bounds[i];
    }
    let mut cursor = bounds.clone();
    let mut blocks_of = vec![0u32; bounds[n]];
    for (bi, b) in retained.iter().enumerate() {
        for &m in *b {
            blocks_of[cursor[m as usize]] = bi as u32;
            cursor[m as usize] += 1;
        }
    }
    let per_profile: Vec<Vec<u64>> = (0..n as u32)
        .into_par_iter()
        .map_init(
            || vec![u32::MAX; n],
            |seen, p| {
                let mut out = Vec::new();
                for &bi in &blocks_of[bounds[p as usize]..bounds[p as usize + 1]] {
                    // members are in profile order
                    let members = retained[bi as usize];
                    let from = members.partition_point(|&m| m <= p);
                    for &m in &members[from..] {
                        if seen[m as usize] != p {
                            seen[m as usize] = p;
                            out.push(encode_pair(p, m));
                        }
                    }
                }
                out.sort_unstable();
                out
            },
        )
        .collect();
    AcRun {
        pairs: PairCodes::from_sorted(per_profile.concat()),
        report,
        key_count: indexes.iter().map(KeyIndex::len).sum(),
    }
}

/// Blocks for a raw profile list, before purging.
pub fn ac_build_blocks(
    profiles: &[Profile],
    schema: &Schema,
    cfg: &AcConfig,
    norm: &NormalizationConfig,
) -> Result<Vec<Block>, CorpusError> {
    let corpus = Corpus::prepare(profiles, schema, norm)?;
    Ok(build_blocks(&corpus, cfg))
}

/// Candidate pairs for a raw profile list.
pub fn ac_pairs(
    profiles: &[Profile],
    schema: &Schema,
    cfg: &AcConfig,
    norm: &NormalizationConfig,
) -> Result<CandidatePairSet, CorpusError> {
    let corpus = Corpus::prepare(profiles, schema, norm)?;
    Ok(corpus.pair_set(&run(&corpus, cfg).pairs))
}
