//! A corpus prepared for blocking: ids sorted, values normalized once and
//! tokens interned.
//!
//! Profile indices follow the lexicographic order of ids, so a pair encoded
//! as `(lo << 32) | hi` with `lo < hi` is already canonical.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{CandidatePairSet, IdPair, Profile, ProfileId, Schema};
use crate::normalize::{normalize_token, NormalizationConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("duplicate profile id `{0}`")]
    DuplicateId(ProfileId),
    #[error("profile `{id}` has attribute `{attr}` outside the schema")]
    UnknownAttribute { id: ProfileId, attr: String },
    #[error("corpus of {0} profiles exceeds the 2^32 index space")]
    TooLarge(usize),
}

pub type TokenId = u32;

/// One token list per profile, stored contiguously. Each token also carries a
/// column-local id: its rank among the distinct tokens of the column.
#[derive(Debug, Clone, Default)]
pub struct Column {
    offsets: Vec<u32>,
    tokens: Vec<TokenId>,
    local: Vec<u32>,
    distinct: Vec<TokenId>,
}

impl Column {
    fn from_lists(lists: Vec<Vec<TokenId>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0u32);
        let mut tokens = Vec::new();
        for l in lists {
            tokens.extend(l);
            offsets.push(tokens.len() as u32);
        }
        let mut distinct = tokens.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let local = tokens
            .iter()
            .map(|t| distinct.binary_search(t).expect("token is in its own column") as u32)
            .collect();
        Self {
            offsets,
            tokens,
            local,
            distinct,
        }
    }

    #[inline]
    fn range(&self, idx: u32) -> std::ops::Range<usize> {
        self.offsets[idx as usize] as usize..self.offsets[idx as usize + 1] as usize
    }

    #[inline]
    pub fn get(&self, idx: u32) -> &[TokenId] {
        &self.tokens[self.range(idx)]
    }

    /// Column-local ids of profile `idx`'s tokens.
    #[inline]
    pub fn local(&self, idx: u32) -> &[u32] {
        &self.local[self.range(idx)]
    }

    /// Column-local ids of every profile, in profile order.
    pub fn all_local(&self) -> &[u32] {
        &self.local
    }

    /// Distinct tokens in ascending order; local id `i` is `distinct()[i]`.
    pub fn distinct(&self) -> &[TokenId] {
        &self.distinct
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    schema: Schema,
    ids: Vec<ProfileId>,
    /// Per attribute slot: sorted, deduplicated tokens (no nickname mapping).
    tokens: Vec<Column>,
    /// Per name attribute: tokens in value order, nickname-canonicalized.
    name_tokens: Vec<Column>,
    /// Per name attribute: sorted, deduplicated nickname-canonicalized tokens.
    name_token_sets: Vec<Column>,
    vocab: Vec<String>,
}

struct RawTokens {
    plain: Vec<Vec<String>>,
    names: Vec<Vec<String>>,
}

impl Corpus {
    pub fn prepare(profiles: &[Profile], schema: &Schema, norm: &NormalizationConfig) -> Result<Self, CorpusError> {
        if profiles.len() >= u32::MAX as usize {
            return Err(CorpusError::TooLarge(profiles.len()));
        }
        let mut order: Vec<usize> = (0..profiles.len()).collect();
        order.sort_by(|&a, &b| profiles[a].id.cmp(&profiles[b].id));
        for w in order.windows(2) {
            if profiles[w[0]].id == profiles[w[1]].id {
                return Err(CorpusError::DuplicateId(profiles[w[0]].id.clone()));
            }
        }
        for p in profiles {
            if let Some(attr) = p.values.keys().find(|a| !schema.contains(a)) {
                return Err(CorpusError::UnknownAttribute {
                    id: p.id.clone(),
                    attr: attr.clone(),
                });
            }
        }

        let plain_norm = norm.without_nicknames();
        let raw: Vec<RawTokens> = order
            .par_iter()
            .map(|&i| {
                let p = &profiles[i];
                let plain = schema
                    .attributes()
                    .iter()
                    .map(|a| p.get(a).map(|v| normalize_token(a, v, &plain_norm)).unwrap_or_default())
                    .collect();
                let names = schema
                    .name_attributes()
                    .iter()
                    .map(|a| p.get(a).map(|v| normalize_token(a, v, norm)).unwrap_or_default())
                    .collect();
                RawTokens { plain, names }
            })
            .collect();

        let mut interner: HashMap<String, TokenId> = HashMap::new();
        let mut vocab: Vec<String> = Vec::new();
        let mut intern = |s: String| -> TokenId {
            if let Some(&id) = interner.get(&s) {
                return id;
            }
            let id = vocab.len() as TokenId;
            vocab.push(s.clone());
            interner.insert(s, id);
            id
        };

        let (n_attr, n_name) = (schema.len(), schema.name_attributes().len());
        let mut tokens: Vec<Vec<Vec<TokenId>>> = vec![Vec::with_capacity(raw.len()); n_attr];
        let mut name_tokens: Vec<Vec<Vec<TokenId>>> = vec![Vec::with_capacity(raw.len()); n_name];
        let mut name_token_sets: Vec<Vec<Vec<TokenId>>> = vec![Vec::with_capacity(raw.len()); n_name];
        for r in raw {
            for (col, ts) in tokens.iter_mut().zip(r.plain) {
                let mut v: Vec<TokenId> = ts.into_iter().map(&mut intern).collect();
                v.sort_unstable();
                v.dedup();
                col.push(v);
            }
            for (k, ts) in r.names.into_iter().enumerate() {
                let v: Vec<TokenId> = ts.into_iter().map(&mut intern).collect();
                let mut set = v.clone();
                set.sort_unstable();
                set.dedup();
                name_tokens[k].push(v);
                name_token_sets[k].push(set);
            }
        }
        let columns = |lists: Vec<Vec<Vec<TokenId>>>| lists.into_par_iter().map(Column::from_lists).collect();
        let (tokens, name_tokens, name_token_sets) = (columns(tokens), columns(name_tokens), columns(name_token_sets));

        Ok(Self {
            schema: schema.clone(),
            ids: order.into_iter().map(|i| profiles[i].id.clone()).collect(),
            tokens,
            name_tokens,
            name_token_sets,
            vocab,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ProfileId] {
        &self.ids
    }

    pub fn id(&self, idx: u32) -> &ProfileId {
        &self.ids[idx as usize]
    }

    /// Number of distinct interned tokens; every `TokenId` is below this.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn token_str(&self, tok: TokenId) -> &str {
        &self.vocab[tok as usize]
    }

    /// Plain tokens of attribute slot `attr` (schema order) for profile `idx`.
    pub fn tokens(&self, idx: u32, attr: usize) -> &[TokenId] {
        self.tokens[attr].get(idx)
    }

    /// Plain token column of attribute slot `attr`.
    pub fn column(&self, attr: usize) -> &Column {
        &self.tokens[attr]
    }

    /// Nickname-canonicalized token set column of the `k`-th name attribute.
    pub fn name_set_column(&self, k: usize) -> &Column {
        &self.name_token_sets[k]
    }

    /// Nickname-canonicalized tokens of the `k`-th name attribute, in value order.
    pub fn name_tokens(&self, idx: u32, k: usize) -> &[TokenId] {
        self.name_tokens[k].get(idx)
    }

    /// Same as [`Corpus::name_tokens`] but sorted and deduplicated.
    pub fn name_token_set(&self, idx: u32, k: usize) -> &[TokenId] {
        self.name_token_sets[k].get(idx)
    }

    /// Position of `attr` among the schema's name attributes.
    pub fn name_slot(&self, attr: usize) -> Option<usize> {
        let name = &self.schema.attributes()[attr];
        self.schema.name_attributes().iter().position(|n| n == name)
    }

    pub fn pair_set(&self, codes: &PairCodes) -> CandidatePairSet {
        codes
            .iter()
            .map(|(a, b)| {
                crate::model::canonical_pair(self.id(a).clone(), self.id(b).clone())
                    .expect("encoded pairs never repeat an index")
            })
            .collect::<CandidatePairSet>()
    }

    /// Index of `id`, if present.
    pub fn index_of(&self, id: &ProfileId) -> Option<u32> {
        self.ids.binary_search(id).ok().map(|i| i as u32)
    }

    pub fn encode(&self, pair: &IdPair) -> Option<u64> {
        let a = self.index_of(pair.first())?;
        let b = self.index_of(pair.second())?;
        Some(encode_pair(a, b))
    }
}

#[inline]
pub fn encode_pair(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

#[inline]
pub fn decode_pair(code: u64) -> (u32, u32) {
    ((code >> 32) as u32, code as u32)
}

/// Sorted, deduplicated canonical pairs over corpus indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCodes(Vec<u64>);

impl PairCodes {
    pub fn from_unsorted(mut codes: Vec<u64>) -> Self {
        codes.par_sort_unstable();
        codes.dedup();
        Self(codes)
    }

    pub(crate) fn from_sorted(codes: Vec<u64>) -> Self {
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        Self(codes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|&c| decode_pair(c))
    }

    pub fn contains(&self, code: u64) -> bool {
        self.0.binary_search(&code).is_ok()
    }

    /// Pairs in `self` that are not in `other`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() {
            if j >= b.len() || a[i] < b[j] {
                out.push(a[i]);
                i += 1;
            } else if a[i] > b[j] {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        Self(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i] < b[j]) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || a[i] > b[j] {
                out.push(b[j]);
                j += 1;
            } else {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
        Self(out)
    }
}

/// Emits every pair of `members` (indices, any order) into `out`.
pub(crate) fn emit_block_pairs(members: &[u32], out: &mut Vec<u64>) {
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            out.push(encode_pair(a, b));
        }
    }
}
