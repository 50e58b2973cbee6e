//! Pair Completeness, Reduction Ratio and the per-blocker report.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::model::{CandidatePairSet, GoldStandard};

pub type Fraction = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("pair completeness is undefined for an empty gold standard")]
    EmptyGold,
    #[error("reduction ratio needs at least 2 profiles, got {0}")]
    TooFewProfiles(usize),
    #[error("{candidates} candidate pairs exceed the {d_all} possible pairs of a {n}-profile corpus")]
    TooManyCandidates { candidates: usize, d_all: u64, n: usize },
}

/// n(n-1)/2.
pub fn all_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// |candidates ∩ gold| / |gold|.
pub fn pair_completeness(candidates: &CandidatePairSet, gold: &GoldStandard) -> Result<Fraction, MetricError> {
    if gold.is_empty() {
        return Err(MetricError::EmptyGold);
    }
    let covered = candidates.intersection_len(&gold.pairs);
    Ok(Fraction::new(covered as u64, gold.len() as u64))
}

/// 1 - |candidates| / (n(n-1)/2).
pub fn reduction_ratio(candidate_count: usize, n: usize) -> Result<Fraction, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewProfiles(n));
    }
    let d_all = all_pairs(n);
    let c = candidate_count as u64;
    if c > d_all {
        return Err(MetricError::TooManyCandidates {
            candidates: candidate_count,
            d_all,
            n,
        });
    }
    Ok(Fraction::new(d_all - c, d_all))
}

pub fn to_f64(f: Fraction) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// One report row: a blocker evaluated on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dataset: String,
    pub blocker: String,
    pub n: usize,
    pub d_all: u64,
    pub candidate_count: usize,
    pub gold_count: usize,
    pub covered_gold_count: usize,
    pub pc: f64,
    /// Exact value as `num/den`.
    pub pc_exact: String,
    pub rr: f64,
    pub rr_exact: String,
    pub time_ms: Option<f64>,
}

impl MetricsReport {
    pub fn compute(
        dataset: &str,
        blocker: &str,
        candidates: &CandidatePairSet,
        gold: &GoldStandard,
        n: usize,
        time_ms: Option<f64>,
    ) -> Result<Self, MetricError> {
        let pc = pair_completeness(candidates, gold)?;
        let rr = reduction_ratio(candidates.len(), n)?;
        Ok(Self {
            dataset: dataset.to_string(),
            blocker: blocker.to_string(),
            n,
            d_all: all_pairs(n),
            candidate_count: candidates.len(),
            gold_count: gold.len(),
            covered_gold_count: candidates.intersection_len(&gold.pairs),
            pc: to_f64(pc),
            pc_exact: pc.to_string(),
            rr: to_f64(rr),
            rr_exact: rr.to_string(),
            time_ms,
        })
    }
}

/// Aligned text table with the columns Name, Size, Type, PC, RR, Time (ms).
pub fn render_table(rows: &[MetricsReport]) -> String {
    let header = ["Name", "Size", "Type", "PC", "RR", "Time (ms)"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.dataset.clone(),
                r.n.to_string(),
                r.blocker.clone(),
                format!("{:.4}", r.pc),
                format!("{:.4}", r.rr),
                r.time_ms.map_or_else(|| "-".to_string(), |t| format!("{t:.1}")),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[&str]| {
        let parts: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i < 3 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    let _ = writeln!(out, "{}", widths.map(|w| "-".repeat(w)).join("  "));
    for row in &cells {
        let refs: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &refs);
    }
    out
}
