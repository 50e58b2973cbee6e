//! Brute-force reference implementations of both blockers.
//!
//! These recompute candidate pairs by naive enumeration straight from the raw
//! profiles, with no interning, indexing or sorting tricks, so they can be
//! used to cross-check the production blockers on small corpora.

use std::collections::{BTreeMap, BTreeSet};

use crate::ac::{AcConfig, AcMode};
use crate::dynamic::{name_keys, DynConfig};
use crate::model::{BlockKey, CandidatePairSet, Profile, Schema, ANY_ATTRIBUTE};
use crate::normalize::{normalize_token, NormalizationConfig};

/// Largest corpus the oracle accepts.
pub const ORACLE_LIMIT: usize = 5000;

#[derive(Debug, Clone)]
pub enum BlockerSpec {
    Ac(AcConfig),
    Dynamic(DynConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("corpus of {0} profiles exceeds the oracle limit of {ORACLE_LIMIT}")]
    TooLarge(usize),
}

pub fn brute_force_oracle(
    profiles: &[Profile],
    schema: &Schema,
    spec: &BlockerSpec,
    norm: &NormalizationConfig,
) -> Result<CandidatePairSet, OracleError> {
    if profiles.len() > ORACLE_LIMIT {
        return Err(OracleError::TooLarge(profiles.len()));
    }
    Ok(match spec {
        BlockerSpec::Ac(cfg) => ac_oracle(profiles, schema, cfg, norm),
        BlockerSpec::Dynamic(cfg) => dyn_oracle(profiles, schema, cfg, norm),
    })
}

fn tokens(p: &Profile, attr: &str, norm: &NormalizationConfig) -> BTreeSet<String> {
    p.get(attr)
        .map(|v| normalize_token(attr, v, norm).into_iter().collect())
        .unwrap_or_default()
}

fn ac_oracle(profiles: &[Profile], schema: &Schema, cfg: &AcConfig, norm: &NormalizationConfig) -> CandidatePairSet {
    let plain = norm.without_nicknames();
    let keys: Vec<BTreeSet<(String, String)>> = profiles
        .iter()
        .map(|p| {
            let mut ks = BTreeSet::new();
            for a in &cfg.attributes_used {
                let n = if cfg.apply_nicknames && schema.is_name_attribute(a) {
                    norm
                } else {
                    &plain
                };
                let label = match cfg.mode {
                    AcMode::SchemaAware => a.as_str(),
                    AcMode::SchemaAgnostic => ANY_ATTRIBUTE,
                };
                for t in tokens(p, a, n) {
                    ks.insert((label.to_string(), t));
                }
            }
            ks
        })
        .collect();
    let mut holders: BTreeMap<&(String, String), usize> = BTreeMap::new();
    for ks in &keys {
        for k in ks {
            *holders.entry(k).or_default() += 1;
        }
    }
    let mut out = CandidatePairSet::new();
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let shared_retained = keys[i].intersection(&keys[j]).any(|k| {
                let c = holders[k];
                c >= 2 && c <= cfg.purge_threshold
            });
            if shared_retained {
                out.insert_ids(profiles[i].id.clone(), profiles[j].id.clone());
            }
        }
    }
    out
}

struct DynOracle<'a> {
    profiles: &'a [Profile],
    cfg: &'a DynConfig,
    /// Per profile, per priority position: the attribute's token set.
    ext_tokens: Vec<Vec<BTreeSet<String>>>,
    /// Per priority position: every token seen anywhere in the corpus.
    vocab: Vec<BTreeSet<String>>,
}

impl DynOracle<'_> {
    /// Profiles holding the name key and every `(position, token)` extension.
    fn members(&self, name_sets: &[Vec<BlockKey>], name: &BlockKey, ext: &[(usize, &str)]) -> Vec<usize> {
        (0..self.profiles.len())
            .filter(|&i| name_sets[i].contains(name))
            .filter(|&i| ext.iter().all(|&(pos, t)| self.ext_tokens[i][pos].contains(t)))
            .collect()
    }

    fn visit<'s>(
        &'s self,
        name_sets: &[Vec<BlockKey>],
        name: &BlockKey,
        ext: &mut Vec<(usize, &'s str)>,
        out: &mut CandidatePairSet,
    ) {
        let members = self.members(name_sets, name, ext);
        if members.len() < 2 {
            return;
        }
        let depth = 1 + ext.len();
        let start = ext.last().map_or(0, |&(pos, _)| pos + 1);
        let emit = |out: &mut CandidatePairSet| {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    out.insert_ids(self.profiles[i].id.clone(), self.profiles[j].id.clone());
                }
            }
        };
        if members.len() <= self.cfg.threshold {
            emit(out);
            return;
        }
        if depth >= self.cfg.max_depth || start >= self.vocab.len() {
            if self.cfg.accept_oversized {
                emit(out);
            }
            return;
        }
        for pos in start..self.vocab.len() {
            for t in &self.vocab[pos] {
                ext.push((pos, t.as_str()));
                self.visit(name_sets, name, ext, out);
                ext.pop();
            }
        }
    }
}

fn dyn_oracle(profiles: &[Profile], schema: &Schema, cfg: &DynConfig, norm: &NormalizationConfig) -> CandidatePairSet {
    let mut out = CandidatePairSet::new();
    if schema.name_attributes().len() != 2 {
        return out;
    }
    let plain = norm.without_nicknames();
    let ext_tokens: Vec<Vec<BTreeSet<String>>> = profiles
        .iter()
        .map(|p| cfg.attribute_priority.iter().map(|a| tokens(p, a, &plain)).collect())
        .collect();
    let vocab: Vec<BTreeSet<String>> = (0..cfg.attribute_priority.len())
        .map(|pos| ext_tokens.iter().flat_map(|t| t[pos].iter().cloned()).collect())
        .collect();
    let name_sets: Vec<Vec<BlockKey>> = profiles
        .iter()
        .map(|p| name_keys(p, schema, norm, cfg.name_key_mode))
        .collect();
    let all_names: BTreeSet<&BlockKey> = name_sets.iter().flatten().collect();
    let oracle = DynOracle {
        profiles,
        cfg,
        ext_tokens,
        vocab,
    };
    for name in all_names {
        oracle.visit(&name_sets, name, &mut Vec::new(), &mut out);
    }
    out
}
