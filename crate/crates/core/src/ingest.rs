//! Reading and writing profile corpora, gold standards and dictionaries.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{canonical_pair, CandidatePairSet, GoldStandard, Profile, ProfileId, Schema};
use crate::normalize::{parse_map_csv, MapError};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}:{line}: invalid JSON: {reason}")]
    Json {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("column `{column}` is not an attribute of the schema")]
    UnknownAttribute { column: String },
    #[error("{path}:{line}: record has no `id`")]
    MissingId { path: PathBuf, line: usize },
    #[error("duplicate profile id `{0}`")]
    DuplicateId(ProfileId),
    #[error("{path}:{line}: {reason}")]
    Format {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("gold standard references unknown profile id `{0}`")]
    UnknownId(ProfileId),
    #[error("{path}: {source}")]
    Map {
        path: PathBuf,
        #[source]
        source: MapError,
    },
    #[error("cannot infer format of {0}; use .jsonl or .csv")]
    UnknownFormat(PathBuf),
}

type Result<T> = std::result::Result<T, IngestError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFormat {
    Jsonl,
    Csv,
}

impl ProfileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => Ok(Self::Jsonl),
            Some("csv") => Ok(Self::Csv),
            _ => Err(IngestError::UnknownFormat(path.to_path_buf())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldFormat {
    /// `id_a,id_b` rows.
    Pairs,
    /// `id,cluster_id` rows.
    Clusters,
    /// Clusters when the header reads `id,cluster_id`, pairs otherwise.
    Auto,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IngestError + '_ {
    move |source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Attribute columns named in a profile file, in file order.
pub fn profile_columns(path: &Path, fmt: ProfileFormat) -> Result<Vec<String>> {
    match fmt {
        ProfileFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_path(path)
                .map_err(csv_err(path))?;
            let headers = rdr.headers().map_err(csv_err(path))?;
            Ok(headers
                .iter()
                .skip(1)
                .map(|h| h.trim().to_string())
                .collect())
        }
        ProfileFormat::Jsonl => {
            let file = File::open(path).map_err(io_err(path))?;
            let mut seen = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let obj = parse_json_object(path, i + 1, &line)?;
                for k in obj.keys() {
                    if k != "id" && !seen.contains(k) {
                        seen.push(k.clone());
                    }
                }
            }
            Ok(seen)
        }
    }
}

/// Loads profiles, rejecting attributes outside `schema` and repeated ids.
pub fn load_profiles(path: &Path, schema: &Schema, fmt: ProfileFormat) -> Result<Vec<Profile>> {
    let profiles = match fmt {
        ProfileFormat::Csv => load_csv(path, schema)?,
        ProfileFormat::Jsonl => load_jsonl(path, schema)?,
    };
    let mut ids = HashSet::with_capacity(profiles.len());
    for p in &profiles {
        if !ids.insert(&p.id) {
            return Err(IngestError::DuplicateId(p.id.clone()));
        }
    }
    Ok(profiles)
}

fn load_csv(path: &Path, schema: &Schema) -> Result<Vec<Profile>> {
    if std::fs::metadata(path).map_err(io_err(path))?.len() == 0 {
        return Ok(Vec::new());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.first().map(String::as_str) != Some("id") {
        return Err(IngestError::Format {
            path: path.to_path_buf(),
            line: 1,
            reason: "first CSV column must be `id`".into(),
        });
    }
    for h in &headers[1..] {
        if !schema.contains(h) {
            return Err(IngestError::UnknownAttribute { column: h.clone() });
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let id = rec.get(0).map(str::trim).unwrap_or("");
        if id.is_empty() {
            return Err(IngestError::MissingId {
                path: path.to_path_buf(),
                line,
            });
        }
        let mut p = Profile::new(id);
        for (col, value) in headers[1..].iter().zip(rec.iter().skip(1)) {
            p.set(col, value);
        }
        out.push(p);
    }
    Ok(out)
}

fn parse_json_object(path: &Path, line: usize, text: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(IngestError::Json {
            path: path.to_path_buf(),
            line,
            reason: "expected an object".into(),
        }),
        Err(e) => Err(IngestError::Json {
            path: path.to_path_buf(),
            line,
            reason: e.to_string(),
        }),
    }
}

fn json_scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        other => Some(other.to_string()),
    }
}

fn load_jsonl(path: &Path, schema: &Schema) -> Result<Vec<Profile>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let obj = parse_json_object(path, i + 1, &line)?;
        let id = obj
            .get("id")
            .and_then(json_scalar)
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| IngestError::MissingId {
                path: path.to_path_buf(),
                line: i + 1,
            })?;
        let mut p = Profile::new(id.trim());
        for (k, v) in &obj {
            if k == "id" {
                continue;
            }
            if !schema.contains(k) {
                return Err(IngestError::UnknownAttribute { column: k.clone() });
            }
            if let Some(s) = json_scalar(v) {
                p.set(k, &s);
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Writes profiles; CSV columns follow the schema order.
pub fn write_profiles(path: &Path, profiles: &[Profile], schema: &Schema, fmt: ProfileFormat) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    match fmt {
        ProfileFormat::Jsonl => {
            let mut w = BufWriter::new(file);
            for p in profiles {
                let mut obj = Map::new();
                obj.insert("id".into(), Value::String(p.id.to_string()));
                for attr in schema.attributes() {
                    if let Some(v) = p.get(attr) {
                        obj.insert(attr.clone(), Value::String(v.to_string()));
                    }
                }
                serde_json::to_writer(&mut w, &obj).map_err(|e| IngestError::Io {
                    path: path.to_path_buf(),
                    source: e.into(),
                })?;
                w.write_all(b"\n").map_err(io_err(path))?;
            }
            w.flush().map_err(io_err(path))
        }
        ProfileFormat::Csv => {
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            let mut header = vec!["id"];
            header.extend(schema.attributes().iter().map(String::as_str));
            w.write_record(&header).map_err(csv_err(path))?;
            for p in profiles {
                let mut row = vec![p.id.as_str()];
                row.extend(schema.attributes().iter().map(|a| p.get(a).unwrap_or("")));
                w.write_record(&row).map_err(csv_err(path))?;
            }
            w.flush().map_err(io_err(path))
        }
    }
}

/// Loads a gold standard. When `known` is given, every referenced id must be in it.
pub fn load_gold(path: &Path, fmt: GoldFormat, known: Option<&BTreeSet<ProfileId>>) -> Result<GoldStandard> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != 2 {
            return Err(IngestError::Format {
                path: path.to_path_buf(),
                line: i + 1,
                reason: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        rows.push((i + 1, rec[0].trim().to_string(), rec[1].trim().to_string()));
    }
    let mut fmt = fmt;
    if let Some((_, a, b)) = rows.first() {
        let header = match (a.as_str(), b.as_str()) {
            ("id", "cluster_id") => Some(GoldFormat::Clusters),
            ("id_a", "id_b") => Some(GoldFormat::Pairs),
            _ => None,
        };
        if let Some(h) = header {
            if fmt == GoldFormat::Auto {
                fmt = h;
            }
            rows.remove(0);
        }
    }
    if fmt == GoldFormat::Auto {
        fmt = GoldFormat::Pairs;
    }
    let check = |id: &ProfileId| -> Result<()> {
        match known {
            Some(k) if !k.contains(id) => Err(IngestError::UnknownId(id.clone())),
            _ => Ok(()),
        }
    };
    match fmt {
        GoldFormat::Pairs => {
            let mut pairs = CandidatePairSet::new();
            for (line, a, b) in rows {
                let (a, b) = (ProfileId::new(&a), ProfileId::new(&b));
                check(&a)?;
                check(&b)?;
                let pair = canonical_pair(a, b).map_err(|e| IngestError::Format {
                    path: path.to_path_buf(),
                    line,
                    reason: e.to_string(),
                })?;
                pairs.insert(pair);
            }
            Ok(GoldStandard::from_pairs(pairs))
        }
        GoldFormat::Clusters | GoldFormat::Auto => {
            let mut clusters: BTreeMap<String, BTreeSet<ProfileId>> = BTreeMap::new();
            for (_, id, cluster) in rows {
                let id = ProfileId::new(&id);
                check(&id)?;
                clusters.entry(cluster).or_default().insert(id);
            }
            Ok(GoldStandard::from_clusters(clusters.into_values()))
        }
    }
}

/// Writes `id,cluster_id` rows.
pub fn write_gold_clusters(path: &Path, clusters: &[Vec<ProfileId>]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["id", "cluster_id"]).map_err(csv_err(path))?;
    for (ci, cluster) in clusters.iter().enumerate() {
        let cid = format!("c{ci}");
        for id in cluster {
            w.write_record([id.as_str(), cid.as_str()]).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Reads a `from,to` dictionary file.
pub fn load_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_map_csv(&text).map_err(|source| IngestError::Map {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_schema() -> Schema {
        Schema::with_attributes(["first_name", "last_name", "occupation", "city", "country"]).unwrap()
    }

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let path = dir.path().join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn csv_row_with_blank_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(
            &dir,
            "p.csv",
            "id,first_name,last_name,occupation,city,country\nP3,Ben,Smith,,,USA\n",
        );
        let ps = load_profiles(&path, &sample_schema(), ProfileFormat::Csv).unwrap();
        assert_eq!(ps.len(), 1);
        let p3 = &ps[0];
        assert_eq!(p3.id.as_str(), "P3");
        assert_eq!(p3.get("first_name"), Some("Ben"));
        assert_eq!(p3.get("last_name"), Some("Smith"));
        assert_eq!(p3.get("country"), Some("USA"));
        assert_eq!(p3.get("occupation"), None);
        assert_eq!(p3.get("city"), None);
    }

    #[test]
    fn empty_files_load_as_empty() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write_tmp(&dir, "e.csv", "");
        let jsonl = write_tmp(&dir, "e.jsonl", "");
        assert!(load_profiles(&csv, &sample_schema(), ProfileFormat::Csv).unwrap().is_empty());
        assert!(load_profiles(&jsonl, &sample_schema(), ProfileFormat::Jsonl).unwrap().is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "d.csv", "id,first_name\nP1,A\nP1,B\n");
        let err = load_profiles(&path, &sample_schema(), ProfileFormat::Csv).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId(id) if id.as_str() == "P1"));
    }

    #[test]
    fn unknown_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "u.csv", "id,first_name,shoe_size\nP1,A,9\n");
        let err = load_profiles(&path, &sample_schema(), ProfileFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("shoe_size"));
        let path = write_tmp(&dir, "u.jsonl", "{\"id\":\"P1\",\"shoe_size\":\"9\"}\n");
        let err = load_profiles(&path, &sample_schema(), ProfileFormat::Jsonl).unwrap_err();
        assert!(matches!(err, IngestError::UnknownAttribute { column } if column == "shoe_size"));
    }

    #[test]
    fn jsonl_requires_id() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "m.jsonl", "{\"first_name\":\"A\"}\n");
        let err = load_profiles(&path, &sample_schema(), ProfileFormat::Jsonl).unwrap_err();
        assert!(matches!(err, IngestError::MissingId { line: 1, .. }));
    }

    #[test]
    fn gold_clusters_expand() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "g.csv", "id,cluster_id\nP1,a\nP3,a\nP4,b\nP5,b\nP2,c\n");
        let gold = load_gold(&path, GoldFormat::Auto, None).unwrap();
        assert_eq!(gold.len(), 2);
        assert!(gold.pairs.contains_ids("P1", "P3"));
        assert!(gold.pairs.contains_ids("P4", "P5"));

        let path = write_tmp(&dir, "g3.csv", "A,x\nB,x\nC,x\n");
        let gold = load_gold(&path, GoldFormat::Clusters, None).unwrap();
        assert_eq!(gold.len(), 3);
    }

    #[test]
    fn gold_pairs_have_set_semantics() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "p.csv", "id_a,id_b\nP1,P3\nP3,P1\nP1,P3\n");
        let gold = load_gold(&path, GoldFormat::Auto, None).unwrap();
        assert_eq!(gold.len(), 1);
    }

    #[test]
    fn gold_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "s.csv", "P1,P1\n");
        assert!(matches!(
            load_gold(&path, GoldFormat::Pairs, None),
            Err(IngestError::Format { line: 1, .. })
        ));
        let path = write_tmp(&dir, "k.csv", "P1,P9\n");
        let known: BTreeSet<ProfileId> = ["P1", "P2"].iter().map(|s| ProfileId::new(s)).collect();
        assert!(matches!(
            load_gold(&path, GoldFormat::Pairs, Some(&known)),
            Err(IngestError::UnknownId(id)) if id.as_str() == "P9"
        ));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ProfileFormat::from_path(Path::new("a.csv")).unwrap(), ProfileFormat::Csv);
        assert_eq!(ProfileFormat::from_path(Path::new("a.jsonl")).unwrap(), ProfileFormat::Jsonl);
        assert!(ProfileFormat::from_path(Path::new("a.txt")).is_err());
    }
}
