//! Domain types shared by the blockers, the evaluator and the generator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("self-pair: {0} cannot be paired with itself")]
    SelfPair(ProfileId),
    #[error("schema has no attributes")]
    EmptySchema,
    #[error("empty attribute name in schema")]
    EmptyAttribute,
    #[error("duplicate attribute `{0}` in schema")]
    DuplicateAttribute(String),
    #[error("name attribute `{0}` is not a schema attribute")]
    UnknownNameAttribute(String),
    #[error("empty block key")]
    EmptyKey,
}

/// Opaque profile identifier. Ordering is lexicographic on the string form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileId(Arc<str>);

impl ProfileId {
    pub fn new(id: impl AsRef<str>) -> Self {
        Self(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProfileId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// The 17-attribute people-profile schema used by default.
pub const DEFAULT_ATTRIBUTES: [&str; 17] = [
    "first_name",
    "last_name",
    "middle_name",
    "email",
    "phone",
    "city",
    "state",
    "zip",
    "country",
    "employer",
    "job_title",
    "school",
    "degree",
    "skill",
    "username",
    "url",
    "street_address",
];

/// Ordered attribute list plus the subset treated as name fields.
///
/// `name_attributes` is ordered: the first entry is the given name and the
/// second the family name when the dynamic blocker builds its top-level keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    attributes: Vec<String>,
    name_attributes: Vec<String>,
}

impl Schema {
    pub fn new<A, N>(attributes: A, name_attributes: N) -> Result<Self, ModelError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let attributes: Vec<String> = attributes.into_iter().map(Into::into).collect();
        let name_attributes: Vec<String> = name_attributes.into_iter().map(Into::into).collect();
        if attributes.is_empty() {
            return Err(ModelError::EmptySchema);
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if a.is_empty() {
                return Err(ModelError::EmptyAttribute);
            }
            if !seen.insert(a.as_str()) {
                return Err(ModelError::DuplicateAttribute(a.clone()));
            }
        }
        for n in &name_attributes {
            if !seen.contains(n.as_str()) {
                return Err(ModelError::UnknownNameAttribute(n.clone()));
            }
        }
        Ok(Self {
            attributes,
            name_attributes,
        })
    }

    /// Schema with the given attributes; `first_name`/`last_name` become the
    /// name attributes when present.
    pub fn with_attributes<A>(attributes: A) -> Result<Self, ModelError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let attributes: Vec<String> = attributes.into_iter().map(Into::into).collect();
        let names: Vec<String> = ["first_name", "last_name"]
            .iter()
            .filter(|n| attributes.iter().any(|a| a == *n))
            .map(|n| n.to_string())
            .collect();
        Self::new(attributes, names)
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn name_attributes(&self) -> &[String] {
        &self.name_attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.attributes.iter().any(|a| a == attr)
    }

    pub fn index_of(&self, attr: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == attr)
    }

    pub fn is_name_attribute(&self, attr: &str) -> bool {
        self.name_attributes.iter().any(|a| a == attr)
    }
}

impl Default for Schema {
    fn default() -> Self {
        Self::new(DEFAULT_ATTRIBUTES, ["first_name", "last_name"]).expect("default schema is valid")
    }
}

/// One person record: an id and a sparse attribute to raw-value map.
///
/// Blank values are never stored; a missing key means the attribute is absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub id: ProfileId,
    pub values: BTreeMap<String, String>,
}

impl Profile {
    pub fn new(id: impl Into<ProfileId>) -> Self {
        Self {
            id: id.into(),
            values: BTreeMap::new(),
        }
    }

    /// Builder-style setter; blank values are dropped.
    pub fn with(mut self, attr: &str, value: &str) -> Self {
        self.set(attr, value);
        self
    }

    pub fn set(&mut self, attr: &str, value: &str) {
        if value.trim().is_empty() {
            self.values.remove(attr);
        } else {
            self.values.insert(attr.to_string(), value.to_string());
        }
    }

    pub fn get(&self, attr: &str) -> Option<&str> {
        self.values.get(attr).map(String::as_str)
    }
}

impl From<String> for ProfileId {
    fn from(s: String) -> Self {
        Self::new(s)
    }
}

/// One (attribute, normalized token) predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub attribute: String,
    pub token: String,
}

impl Predicate {
    pub fn new(attribute: impl Into<String>, token: impl Into<String>) -> Self {
        Self {
            attribute: attribute.into(),
            token: token.into(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.attribute, self.token)
    }
}

/// Attribute slot used for keys built in schema-agnostic mode.
pub const ANY_ATTRIBUTE: &str = "*";

/// A non-empty, canonically ordered set of predicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    predicates: Vec<Predicate>,
}

impl BlockKey {
    pub fn new(predicates: impl IntoIterator<Item = Predicate>) -> Result<Self, ModelError> {
        let mut predicates: Vec<Predicate> = predicates.into_iter().collect();
        predicates.sort();
        predicates.dedup();
        if predicates.is_empty() {
            return Err(ModelError::EmptyKey);
        }
        Ok(Self { predicates })
    }

    pub fn single(attribute: impl Into<String>, token: impl Into<String>) -> Self {
        Self {
            predicates: vec![Predicate::new(attribute, token)],
        }
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.predicates.binary_search(p).is_ok()
    }

    /// Key extended with one more predicate.
    pub fn extended(&self, p: Predicate) -> Self {
        let mut predicates = self.predicates.clone();
        if let Err(pos) = predicates.binary_search(&p) {
            predicates.insert(pos, p);
        }
        Self { predicates }
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.predicates.iter().enumerate() {
            if i > 0 {
                f.write_str("&")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub key: BlockKey,
    pub members: BTreeSet<ProfileId>,
}

impl Block {
    pub fn new(key: BlockKey, members: impl IntoIterator<Item = ProfileId>) -> Self {
        Self {
            key,
            members: members.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Unordered pair of distinct ids, stored smaller id first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdPair {
    a: ProfileId,
    b: ProfileId,
}

impl IdPair {
    pub fn first(&self) -> &ProfileId {
        &self.a
    }

    pub fn second(&self) -> &ProfileId {
        &self.b
    }

    pub fn into_ids(self) -> (ProfileId, ProfileId) {
        (self.a, self.b)
    }
}

impl fmt::Display for IdPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

pub fn canonical_pair(a: ProfileId, b: ProfileId) -> Result<IdPair, ModelError> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Ok(IdPair { a, b }),
        std::cmp::Ordering::Greater => Ok(IdPair { a: b, b: a }),
        std::cmp::Ordering::Equal => Err(ModelError::SelfPair(a)),
    }
}

/// Deduplicated set of candidate pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePairSet {
    pairs: BTreeSet<IdPair>,
}

impl CandidatePairSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a pair; returns false for a self-pair or an already present pair.
    pub fn insert_ids(&mut self, a: ProfileId, b: ProfileId) -> bool {
        match canonical_pair(a, b) {
            Ok(p) => self.pairs.insert(p),
            Err(_) => false,
        }
    }

    pub fn insert(&mut self, pair: IdPair) -> bool {
        self.pairs.insert(pair)
    }

    pub fn contains(&self, pair: &IdPair) -> bool {
        self.pairs.contains(pair)
    }

    pub fn contains_ids(&self, a: &str, b: &str) -> bool {
        canonical_pair(ProfileId::new(a), ProfileId::new(b))
            .map(|p| self.pairs.contains(&p))
            .unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IdPair> {
        self.pairs.iter()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            pairs: self.pairs.union(&other.pairs).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self {
            pairs: self.pairs.difference(&other.pairs).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            pairs: self.pairs.intersection(&other.pairs).cloned().collect(),
        }
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.pairs.iter().filter(|p| large.pairs.contains(p)).count()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.pairs.is_disjoint(&other.pairs)
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = IdPair>) {
        self.pairs.extend(other);
    }
}

impl FromIterator<IdPair> for CandidatePairSet {
    fn from_iter<I: IntoIterator<Item = IdPair>>(iter: I) -> Self {
        Self {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for CandidatePairSet {
    type Item = IdPair;
    type IntoIter = std::collections::btree_set::IntoIter<IdPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.into_iter()
    }
}

impl<'a> IntoIterator for &'a CandidatePairSet {
    type Item = &'a IdPair;
    type IntoIter = std::collections::btree_set::Iter<'a, IdPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// All m(m-1)/2 pairs over a block's members. Singletons yield nothing.
pub fn pairs_from_block(block: &Block) -> CandidatePairSet {
    let members: Vec<&ProfileId> = block.members.iter().collect();
    let mut out = CandidatePairSet::new();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            // members is a sorted set, so a < b already
            out.pairs.insert(IdPair {
                a: (*a).clone(),
                b: (*b).clone(),
            });
        }
    }
    out
}

/// True duplicate pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldStandard {
    pub pairs: CandidatePairSet,
}

impl GoldStandard {
    pub fn from_pairs(pairs: CandidatePairSet) -> Self {
        Self { pairs }
    }

    /// Expands every cluster into all of its intra-cluster pairs.
    pub fn from_clusters<I, C>(clusters: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = ProfileId>,
    {
        let mut pairs = CandidatePairSet::new();
        for cluster in clusters {
            let members: BTreeSet<ProfileId> = cluster.into_iter().collect();
            let block = Block {
                key: BlockKey::single("cluster", "_"),
                members,
            };
            pairs.extend(pairs_from_block(&block));
        }
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
