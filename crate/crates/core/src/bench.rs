//! Runtime scaling with the number of attributes and with the worker count.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::ac::{self, AcConfig};
use crate::corpus::Corpus;
use crate::dynamic::{self, DynConfig};
use crate::exec::worker_pool;
use crate::model::Schema;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("attribute count {k} exceeds the schema's {len} attributes")]
    TooManyAttributes { k: usize, len: usize },
    #[error("attribute count {0} leaves no room for the two name attributes")]
    TooFewAttributes(usize),
    #[error("runs must be at least 1")]
    ZeroRuns,
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Attributes,
    Workers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub study: Study,
    pub blocker: &'static str,
    pub attributes: usize,
    pub workers: usize,
    pub runs: usize,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub pairs: usize,
}

impl BenchRow {
    /// A single run gives no spread to judge the measurement by.
    pub fn noisy(&self) -> bool {
        self.runs < 2
    }
}

/// The non-name attributes available at attribute count `k`: the dynamic
/// priority list first, then any other schema attributes in schema order,
/// truncated to `k - 2`.
pub fn attribute_subset(schema: &Schema, dyn_cfg: &DynConfig, k: usize) -> Result<Vec<String>, BenchError> {
    if k > schema.len() {
        return Err(BenchError::TooManyAttributes { k, len: schema.len() });
    }
    if k < 2 {
        return Err(BenchError::TooFewAttributes(k));
    }
    let mut order: Vec<String> = dyn_cfg.attribute_priority.clone();
    for a in schema.attributes() {
        if !schema.is_name_attribute(a) && !order.contains(a) {
            order.push(a.clone());
        }
    }
    order.truncate(k - 2);
    Ok(order)
}

/// Both configurations restricted to the name attributes plus `extra`.
pub fn restrict(schema: &Schema, ac_cfg: &AcConfig, dyn_cfg: &DynConfig, extra: &[String]) -> (AcConfig, DynConfig) {
    let mut ac = ac_cfg.clone();
    ac.attributes_used = schema
        .name_attributes()
        .iter()
        .chain(extra)
        .cloned()
        .collect();
    let mut dy = dyn_cfg.clone();
    dy.attribute_priority = extra.to_vec();
    (ac, dy)
}

struct Sample {
    times: Vec<f64>,
    pairs: usize,
}

fn time_runs(runs: usize, mut f: impl FnMut() -> usize) -> Sample {
    let mut times = Vec::with_capacity(runs);
    let mut pairs = 0;
    for _ in 0..runs {
        let t = Instant::now();
        pairs = f();
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Sample { times, pairs }
}

fn row(study: Study, blocker: &'static str, attributes: usize, workers: usize, s: Sample) -> BenchRow {
    let runs = s.times.len();
    BenchRow {
        study,
        blocker,
        attributes,
        workers,
        runs,
        mean_ms: s.times.iter().sum::<f64>() / runs as f64,
        min_ms: s.times.iter().copied().fold(f64::INFINITY, f64::min),
        max_ms: s.times.iter().copied().fold(0.0, f64::max),
        pairs: s.pairs,
    }
}

fn measure(
    corpus: &Corpus,
    ac_cfg: &AcConfig,
    dyn_cfg: &DynConfig,
    runs: usize,
    workers: usize,
    study: Study,
    k: usize,
) -> Result<[BenchRow; 2], BenchError> {
    let pool = worker_pool(workers)?;
    let (ac_s, dyn_s) = pool.install(|| {
        let ac_s = time_runs(runs, || ac::run(corpus, ac_cfg).pairs.len());
        let dyn_s = time_runs(runs, || dynamic::run(corpus, dyn_cfg).pairs.len());
        (ac_s, dyn_s)
    });
    Ok([
        row(study, "ac", k, workers, ac_s),
        row(study, "dynamic", k, workers, dyn_s),
    ])
}

/// Mean blocker runtime over `runs` runs at each attribute count.
pub fn attribute_scaling(
    corpus: &Corpus,
    ac_cfg: &AcConfig,
    dyn_cfg: &DynConfig,
    counts: &[usize],
    runs: usize,
    workers: usize,
) -> Result<Vec<BenchRow>, BenchError> {
    if runs == 0 {
        return Err(BenchError::ZeroRuns);
    }
    let schema = corpus.schema();
    let subsets = counts
        .iter()
        .map(|&k| attribute_subset(schema, dyn_cfg, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (&k, extra) in counts.iter().zip(&subsets) {
        let (ac, dy) = restrict(schema, ac_cfg, dyn_cfg, extra);
        rows.extend(measure(corpus, &ac, &dy, runs, workers, Study::Attributes, k)?);
    }
    Ok(rows)
}

/// Mean blocker runtime at each worker count, all attributes in the configs.
pub fn worker_scaling(
    corpus: &Corpus,
    ac_cfg: &AcConfig,
    dyn_cfg: &DynConfig,
    worker_counts: &[usize],
    runs: usize,
) -> Result<Vec<BenchRow>, BenchError> {
    if runs == 0 {
        return Err(BenchError::ZeroRuns);
    }
    let k = corpus.schema().len();
    let mut rows = Vec::new();
    for &w in worker_counts {
        rows.extend(measure(corpus, ac_cfg, dyn_cfg, runs, w, Study::Workers, k)?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["study", "blocker", "attributes", "workers", "runs", "mean_ms", "min_ms", "max_ms", "pairs", "noisy"])?;
    for r in rows {
        let study = match r.study {
            Study::Attributes => "attributes",
            Study::Workers => "workers",
        };
        w.write_record([
            study.to_string(),
            r.blocker.to_string(),
            r.attributes.to_string(),
            r.workers.to_string(),
            r.runs.to_string(),
            format!("{:.3}", r.mean_ms),
            format!("{:.3}", r.min_ms),
            format!("{:.3}", r.max_ms),
            r.pairs.to_string(),
            r.noisy().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, GenConfig};
    use crate::normalize::NormalizationConfig;

    #[test]
    fn subsets_follow_priority_then_schema() {
        let schema = Schema::default();
        let dy = DynConfig::new(&schema);
        assert_eq!(attribute_subset(&schema, &dy, 4).unwrap(), ["email", "phone"]);
        let all = attribute_subset(&schema, &dy, 17).unwrap();
        assert_eq!(all.len(), 15);
        assert_eq!(&all[11..], ["middle_name", "country", "url", "street_address"]);
        assert!(matches!(
            attribute_subset(&schema, &dy, 20),
            Err(BenchError::TooManyAttributes { k: 20, len: 17 })
        ));
        assert!(matches!(attribute_subset(&schema, &dy, 1), Err(BenchError::TooFewAttributes(1))));
    }

    #[test]
    fn scaling_rows_and_csv() {
        let schema = Schema::default();
        let g = generate(&GenConfig { n_originals: 100, ..GenConfig::default() }, &schema).unwrap();
        let corpus = Corpus::prepare(&g.profiles, &schema, &NormalizationConfig::for_schema(&schema)).unwrap();
        let (ac, dy) = (AcConfig::new(&schema), DynConfig::new(&schema));
        let rows = attribute_scaling(&corpus, &ac, &dy, &[4, 17], 2, 1).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.runs == 2 && !r.noisy() && r.min_ms <= r.mean_ms && r.mean_ms <= r.max_ms));
        let full = &rows[2];
        assert_eq!((full.blocker, full.attributes), ("ac", 17));
        assert_eq!(full.pairs, ac::run(&corpus, &ac).pairs.len());

        let w = worker_scaling(&corpus, &ac, &dy, &[1, 2], 1).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w[0].pairs, w[2].pairs);
        assert!(w[0].noisy());

        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("study,blocker,attributes"));
        assert!(attribute_scaling(&corpus, &ac, &dy, &[4], 0, 1).is_err());
    }
}
