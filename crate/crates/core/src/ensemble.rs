//! Ensemble blocking: the dynamic blocker's pairs in full, plus the pairs only
//! the AC blocker found.

use std::io::{BufRead, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ac::{self, AcConfig, PurgeReport};
use crate::corpus::{Corpus, CorpusError};
use crate::dynamic::{self, DynConfig, DynDiagnostics};
use crate::model::{canonical_pair, CandidatePairSet, IdPair, Profile, ProfileId, Schema};
use crate::normalize::NormalizationConfig;

/// Which stream a candidate pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Dyn,
    AcExtra,
    Ac,
}

impl PairSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dyn => "dyn",
            Self::AcExtra => "ac_extra",
            Self::Ac => "ac",
        }
    }
}

impl std::str::FromStr for PairSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dyn" => Ok(Self::Dyn),
            "ac_extra" => Ok(Self::AcExtra),
            "ac" => Ok(Self::Ac),
            other => Err(format!("unknown pair source `{other}`")),
        }
    }
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub ac_ms: f64,
    pub dyn_ms: f64,
    pub merge_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamCounts {
    pub dyn_pairs: usize,
    pub ac_pairs: usize,
    pub ac_extra_pairs: usize,
    pub union_pairs: usize,
}

#[derive(Debug, Clone, Default)]
pub struct EnsembleResult {
    pub dyn_pairs: CandidatePairSet,
    /// The complete AC pair set, before removing what the dynamic blocker found.
    pub ac_pairs: CandidatePairSet,
    pub ac_extra_pairs: CandidatePairSet,
    pub union_pairs: CandidatePairSet,
    pub timings: StageTimings,
    pub counts: StreamCounts,
    pub ac_report: PurgeReport,
    pub dyn_diagnostics: DynDiagnostics,
}

impl EnsembleResult {
    /// `(pair, source)` rows in pair order.
    pub fn rows(&self) -> Vec<(IdPair, PairSource)> {
        let mut rows: Vec<(IdPair, PairSource)> = self
            .dyn_pairs
            .iter()
            .map(|p| (p.clone(), PairSource::Dyn))
            .chain(self.ac_extra_pairs.iter().map(|p| (p.clone(), PairSource::AcExtra)))
            .collect();
        rows.sort();
        rows
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs both blockers concurrently on the current rayon pool and merges.
pub fn run(corpus: &Corpus, dyn_cfg: &DynConfig, ac_cfg: &AcConfig) -> EnsembleResult {
    let total = Instant::now();
    let ((dyn_run, dyn_ms), (ac_run, ac_ms)) = rayon::join(
        || {
            let t = Instant::now();
            let r = dynamic::run(corpus, dyn_cfg);
            (r, millis(t))
        },
        || {
            let t = Instant::now();
            let r = ac::run(corpus, ac_cfg);
            (r, millis(t))
        },
    );

    let merge = Instant::now();
    let extra = ac_run.pairs.difference(&dyn_run.pairs);
    let dyn_pairs = corpus.pair_set(&dyn_run.pairs);
    let ac_pairs = corpus.pair_set(&ac_run.pairs);
    let ac_extra_pairs = corpus.pair_set(&extra);
    let union_pairs = dyn_pairs.union(&ac_extra_pairs);
    let merge_ms = millis(merge);

    let counts = StreamCounts {
        dyn_pairs: dyn_pairs.len(),
        ac_pairs: ac_pairs.len(),
        ac_extra_pairs: ac_extra_pairs.len(),
        union_pairs: union_pairs.len(),
    };
    EnsembleResult {
        dyn_pairs,
        ac_pairs,
        ac_extra_pairs,
        union_pairs,
        timings: StageTimings {
            ac_ms,
            dyn_ms,
            merge_ms,
            total_ms: millis(total),
        },
        counts,
        ac_report: ac_run.report,
        dyn_diagnostics: dyn_run.diagnostics,
    }
}

pub fn run_ensemble(
    profiles: &[Profile],
    schema: &Schema,
    dyn_cfg: &DynConfig,
    ac_cfg: &AcConfig,
    norm: &NormalizationConfig,
) -> Result<EnsembleResult, CorpusError> {
    let corpus = Corpus::prepare(profiles, schema, norm)?;
    Ok(run(&corpus, dyn_cfg, ac_cfg))
}

/// Writes `id_a,id_b,source` rows with a header.
pub fn write_pairs<W: Write>(out: W, rows: &[(IdPair, PairSource)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id_a", "id_b", "source"])?;
    for (p, s) in rows {
        w.write_record([p.first().as_str(), p.second().as_str(), s.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum PairFileError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

/// Reads a pair file written by [`write_pairs`]. A missing source column reads as `ac`.
pub fn read_pairs<R: BufRead>(input: R) -> Result<Vec<(IdPair, PairSource)>, PairFileError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        if i == 0 && rec.get(0) == Some("id_a") {
            continue;
        }
        if rec.len() < 2 {
            return Err(PairFileError::Row {
                line,
                reason: "expected id_a,id_b[,source]".into(),
            });
        }
        let pair = canonical_pair(ProfileId::new(rec[0].trim()), ProfileId::new(rec[1].trim()))
            .map_err(|e| PairFileError::Row {
                line,
                reason: e.to_string(),
            })?;
        let source = match rec.get(2) {
            Some(s) => s.trim().parse().map_err(|e| PairFileError::Row { line, reason: e })?,
            None => PairSource::Ac,
        };
        rows.push((pair, source));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sample_gold, sample_profiles, sample_schema};

    #[test]
    fn sample_ensemble() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let r = run_ensemble(
            &sample_profiles(),
            &schema,
            &DynConfig::new(&schema).with_threshold(2),
            &AcConfig::new(&schema).with_threshold(2),
            &norm,
        )
        .unwrap();
        assert_eq!(r.dyn_pairs.len(), 1);
        assert!(r.dyn_pairs.contains_ids("P1", "P3"));
        assert_eq!(r.ac_extra_pairs.len(), 1);
        assert!(r.ac_extra_pairs.contains_ids("P4", "P5"));
        assert_eq!(r.union_pairs, sample_gold().pairs);
        assert_eq!(r.counts.union_pairs, r.counts.dyn_pairs + r.counts.ac_extra_pairs);

        let rows: Vec<String> = r
            .rows()
            .iter()
            .map(|(p, s)| format!("{p}:{}", s.as_str()))
            .collect();
        assert_eq!(rows, ["(P1,P3):dyn", "(P4,P5):ac_extra"]);
    }

    #[test]
    fn ac_subset_of_dyn_gives_no_extras() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        // P1 and P3 share name, city and country; P9 is unrelated
        let ps = vec![
            Profile::new("P1").with("first_name", "Ann").with("last_name", "Lee").with("city", "Reno"),
            Profile::new("P3").with("first_name", "Ann").with("last_name", "Lee").with("city", "Reno"),
            Profile::new("P9").with("first_name", "Bo").with("last_name", "Yu").with("city", "Lima"),
        ];
        let r = run_ensemble(&ps, &schema, &DynConfig::new(&schema), &AcConfig::new(&schema), &norm).unwrap();
        assert!(r.ac_pairs.is_subset(&r.dyn_pairs));
        assert!(r.ac_extra_pairs.is_empty());
        assert_eq!(r.union_pairs, r.dyn_pairs);
    }

    #[test]
    fn empty_corpus() {
        let schema = sample_schema();
        let norm = NormalizationConfig::for_schema(&schema);
        let r = run_ensemble(&[], &schema, &DynConfig::new(&schema), &AcConfig::new(&schema), &norm).unwrap();
        assert!(r.dyn_pairs.is_empty() && r.ac_extra_pairs.is_empty() && r.union_pairs.is_empty());
    }

    #[test]
    fn pair_file_round_trip() {
        let p = |a: &str, b: &str| canonical_pair(a.into(), b.into()).unwrap();
        let rows = vec![(p("P1", "P3"), PairSource::Dyn), (p("P4", "P5"), PairSource::AcExtra)];
        let mut buf = Vec::new();
        write_pairs(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "id_a,id_b,source\nP1,P3,dyn\nP4,P5,ac_extra\n"
        );
        assert_eq!(read_pairs(buf.as_slice()).unwrap(), rows);
        assert!(read_pairs("P1,P1,dyn\n".as_bytes()).is_err());
        assert!(read_pairs("P1,P2,bogus\n".as_bytes()).is_err());
    }
}
