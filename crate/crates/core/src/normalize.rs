//! Value normalization: case folding, punctuation stripping, word splitting and
//! dictionary canonicalization (nicknames, country names, ...).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::Schema;

const DEFAULT_NICKNAMES: &str = include_str!("../data/nicknames.csv");
const DEFAULT_COUNTRIES: &str = include_str!("../data/countries.csv");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("mapping `{from}` -> `{to}` chains into `{to}` -> `{next}`")]
    Chain {
        from: String,
        to: String,
        next: String,
    },
    #[error("mapping for `{0}` has an empty target")]
    EmptyTarget(String),
    #[error("malformed mapping line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Normalization settings applied to every raw value before blocking.
///
/// Dictionary keys and targets are stored in normalized form, so a map entry
/// such as `USA,unitedstates` matches "usa", "U.S.A." and "Usa" alike.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationConfig {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub collapse_whitespace: bool,
    nickname_map: BTreeMap<String, String>,
    nickname_attributes: BTreeSet<String>,
    value_canonical_map: BTreeMap<String, BTreeMap<String, String>>,
    atomic_attributes: BTreeSet<String>,
}

impl NormalizationConfig {
    /// Case folding and punctuation stripping only; no dictionaries.
    pub fn plain() -> Self {
        Self {
            lowercase: true,
            strip_punctuation: true,
            collapse_whitespace: true,
            nickname_map: BTreeMap::new(),
            nickname_attributes: BTreeSet::new(),
            value_canonical_map: BTreeMap::new(),
            atomic_attributes: BTreeSet::new(),
        }
    }

    /// Bundled nickname and country dictionaries, nicknames applied to the
    /// schema's name attributes.
    pub fn for_schema(schema: &Schema) -> Self {
        let mut cfg = Self::plain();
        let nicknames = parse_map_csv(DEFAULT_NICKNAMES).expect("bundled nickname map parses");
        cfg.set_nickname_map(nicknames)
            .expect("bundled nickname map has no chains");
        cfg.nickname_attributes = schema.name_attributes().iter().cloned().collect();
        if schema.contains("country") {
            let countries = parse_map_csv(DEFAULT_COUNTRIES).expect("bundled country map parses");
            cfg.set_canonical_map("country", countries)
                .expect("bundled country map has no chains");
        }
        cfg
    }

    pub fn nickname_map(&self) -> &BTreeMap<String, String> {
        &self.nickname_map
    }

    pub fn canonical_map(&self, attr: &str) -> Option<&BTreeMap<String, String>> {
        self.value_canonical_map.get(attr)
    }

    pub fn nickname_attributes(&self) -> &BTreeSet<String> {
        &self.nickname_attributes
    }

    pub fn set_nickname_attributes<I: IntoIterator<Item = String>>(&mut self, attrs: I) {
        self.nickname_attributes = attrs.into_iter().collect();
    }

    pub fn set_atomic<I: IntoIterator<Item = String>>(&mut self, attrs: I) {
        self.atomic_attributes = attrs.into_iter().collect();
    }

    pub fn is_atomic(&self, attr: &str) -> bool {
        self.atomic_attributes.contains(attr)
    }

    /// Replaces the nickname dictionary. Rejects chains (a target that is
    /// itself mapped elsewhere).
    pub fn set_nickname_map(&mut self, raw: BTreeMap<String, String>) -> Result<(), MapError> {
        self.nickname_map = self.normalize_map(raw)?;
        Ok(())
    }

    pub fn set_canonical_map(
        &mut self,
        attr: &str,
        raw: BTreeMap<String, String>,
    ) -> Result<(), MapError> {
        let map = self.normalize_map(raw)?;
        self.value_canonical_map.insert(attr.to_string(), map);
        Ok(())
    }

    /// Same settings with the nickname dictionary switched off.
    pub fn without_nicknames(&self) -> Self {
        let mut cfg = self.clone();
        cfg.nickname_map.clear();
        cfg
    }

    fn normalize_map(&self, raw: BTreeMap<String, String>) -> Result<BTreeMap<String, String>, MapError> {
        let mut map = BTreeMap::new();
        for (from, to) in raw {
            let from = self.fold(&from).join(" ");
            let to = self.fold(&to).join(" ");
            if from.is_empty() {
                continue;
            }
            if to.is_empty() {
                return Err(MapError::EmptyTarget(from));
            }
            map.insert(from, to);
        }
        for (from, to) in &map {
            let targets = std::iter::once(to.as_str()).chain(to.split(' '));
            for t in targets {
                if let Some(next) = map.get(t) {
                    if next != t {
                        return Err(MapError::Chain {
                            from: from.clone(),
                            to: t.to_string(),
                            next: next.clone(),
                        });
                    }
                }
            }
        }
        Ok(map)
    }

    /// Case folding, punctuation removal and whitespace splitting.
    fn fold(&self, raw: &str) -> Vec<String> {
        let lowered;
        let mut s: &str = raw;
        if self.lowercase {
            lowered = raw.to_lowercase();
            s = &lowered;
        }
        let stripped: String;
        if self.strip_punctuation {
            stripped = s
                .chars()
                .filter(|c| c.is_alphanumeric() || c.is_whitespace())
                .collect();
            s = &stripped;
        }
        s.split_whitespace().map(str::to_string).collect()
    }

    fn whole_value(&self, raw: &str, words: &[String]) -> String {
        if self.collapse_whitespace {
            words.join(" ")
        } else {
            // keep the original spacing, only the ends are trimmed
            let mut s = if self.lowercase { raw.to_lowercase() } else { raw.to_string() };
            if self.strip_punctuation {
                s.retain(|c| c.is_alphanumeric() || c.is_whitespace());
            }
            s.trim().to_string()
        }
    }
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self::for_schema(&Schema::default())
    }
}

/// Normalizes one raw attribute value into its blocking tokens.
///
/// Blank input yields an empty list; no returned token is ever empty.
pub fn normalize_token(attr: &str, raw: &str, cfg: &NormalizationConfig) -> Vec<String> {
    let mut words = cfg.fold(raw);
    if words.is_empty() {
        return words;
    }
    if let Some(canon) = cfg.value_canonical_map.get(attr) {
        let whole = cfg.whole_value(raw, &words);
        if let Some(target) = canon.get(&whole) {
            words = target.split_whitespace().map(str::to_string).collect();
        } else {
            for w in &mut words {
                if let Some(target) = canon.get(w.as_str()) {
                    *w = target.clone();
                }
            }
            words = words
                .iter()
                .flat_map(|w| w.split_whitespace().map(str::to_string).collect::<Vec<_>>())
                .collect();
        }
    }
    if !cfg.nickname_map.is_empty() && cfg.nickname_attributes.contains(attr) {
        let mut mapped = Vec::with_capacity(words.len());
        for w in words {
            match cfg.nickname_map.get(&w) {
                Some(full) => mapped.extend(full.split_whitespace().map(str::to_string)),
                None => mapped.push(w),
            }
        }
        words = mapped;
    }
    if cfg.atomic_attributes.contains(attr) {
        let joined = words.concat();
        return if joined.is_empty() { Vec::new() } else { vec![joined] };
    }
    words.retain(|w| !w.is_empty());
    words
}

/// Parses a `from,to` CSV dictionary. A leading `from,to` header is skipped.
pub fn parse_map_csv(text: &str) -> Result<BTreeMap<String, String>, MapError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut map = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MapError::Malformed {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(MapError::Malformed {
                line: i + 1,
                reason: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let (from, to) = (rec[0].trim(), rec[1].trim());
        if i == 0 && from.eq_ignore_ascii_case("from") && to.eq_ignore_ascii_case("to") {
            continue;
        }
        map.insert(from.to_string(), to.to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_schema() -> Schema {
        Schema::with_attributes(["first_name", "last_name", "occupation", "city", "country"]).unwrap()
    }

    #[test]
    fn word_level_tokens() {
        let cfg = NormalizationConfig::for_schema(&sample_schema());
        assert_eq!(
            normalize_token("occupation", "Senior Accountant", &cfg),
            vec!["senior", "accountant"]
        );
    }

    #[test]
    fn nickname_applies_to_name_attributes_only() {
        let cfg = NormalizationConfig::for_schema(&sample_schema());
        assert_eq!(normalize_token("first_name", "Ben", &cfg), vec!["benjamin"]);
        assert_eq!(normalize_token("first_name", "Lizzy", &cfg), vec!["elizabeth"]);
        assert_eq!(normalize_token("occupation", "Ben", &cfg), vec!["ben"]);
        assert_eq!(
            normalize_token("first_name", "Ben", &cfg.without_nicknames()),
            vec!["ben"]
        );
    }

    #[test]
    fn blank_collapses_to_missing() {
        let cfg = NormalizationConfig::default();
        assert!(normalize_token("city", "  ", &cfg).is_empty());
        assert!(normalize_token("city", "", &cfg).is_empty());
        assert!(normalize_token("city", " ,.- ", &cfg).is_empty());
    }

    #[test]
    fn country_canonicalization() {
        let cfg = NormalizationConfig::default();
        for raw in ["USA", "U.S.A.", "United States", "united  states", "US"] {
            assert_eq!(normalize_token("country", raw, &cfg), vec!["unitedstates"], "{raw}");
        }
        assert_eq!(normalize_token("country", "unitedstates", &cfg), vec!["unitedstates"]);
        // only the configured attribute is canonicalized
        assert_eq!(normalize_token("city", "USA", &cfg), vec!["usa"]);
    }

    #[test]
    fn punctuation_is_removed_not_spaced() {
        let cfg = NormalizationConfig::default();
        assert_eq!(
            normalize_token("email", "J.Smith@Example.com", &cfg),
            vec!["jsmithexamplecom"]
        );
        assert_eq!(normalize_token("phone", "(404) 555-1234", &cfg), vec!["404", "5551234"]);
    }

    #[test]
    fn atomic_attributes_yield_one_token() {
        let mut cfg = NormalizationConfig::default();
        cfg.set_atomic(["job_title".to_string()]);
        assert_eq!(
            normalize_token("job_title", "Senior Accountant", &cfg),
            vec!["senioraccountant"]
        );
        assert_eq!(normalize_token("job_title", "senioraccountant", &cfg), vec!["senioraccountant"]);
    }

    #[test]
    fn chains_are_rejected() {
        let mut cfg = NormalizationConfig::plain();
        let map: BTreeMap<String, String> = [("bill", "will"), ("will", "william")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(matches!(cfg.set_nickname_map(map), Err(MapError::Chain { .. })));
        let ok: BTreeMap<String, String> = [("canada", "canada")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(cfg.set_canonical_map("country", ok).is_ok());
    }

    #[test]
    fn map_csv_parsing() {
        let m = parse_map_csv("from,to\nBen,Benjamin\n\nLiz , Elizabeth\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["Liz"], "Elizabeth");
        assert!(parse_map_csv("a,b,c\n").is_err());
    }

    #[test]
    fn bundled_maps_load() {
        let cfg = NormalizationConfig::default();
        assert!(cfg.nickname_map().len() > 50);
        assert!(cfg.canonical_map("country").is_some());
        assert!(cfg.nickname_attributes().contains("last_name"));
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent_and_non_empty(
            attr in prop::sample::select(vec!["first_name", "last_name", "country", "city", "job_title"]),
            raw in "[ A-Za-z0-9.,'@éÉßİ-]{0,24}",
        ) {
            let cfg = NormalizationConfig::default();
            let tokens = normalize_token(attr, &raw, &cfg);
            for t in &tokens {
                prop_assert!(!t.is_empty());
                prop_assert_eq!(normalize_token(attr, t, &cfg), vec![t.clone()]);
            }
        }
    }
}
