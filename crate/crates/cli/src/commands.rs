use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use erblock::ac::{self, PurgeReport};
use erblock::bench;
use erblock::config::{Resolved, Settings};
use erblock::datagen::{generate as generate_corpus, Corruption, GenConfig};
use erblock::dynamic::{self, DynDiagnostics};
use erblock::ensemble::{self, read_pairs, write_pairs, StreamCounts};
use erblock::eval::{render_table, MetricsReport};
use erblock::exec::{default_workers, with_workers};
use erblock::ingest::{self, GoldFormat, ProfileFormat};
use erblock::model::{CandidatePairSet, IdPair, Profile, Schema};
use erblock::{Corpus, PairSource};

use crate::manifest::{prepare_out_dir, FileDigest, RunManifest};
use crate::{BenchArgs, BlockArgs, EvaluateArgs, GenerateArgs};

pub const PROFILES_FILE: &str = "profiles.csv";
pub const GOLD_FILE: &str = "gold.csv";
pub const PAIRS_FILE: &str = "pairs.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const GENERATOR_FILE: &str = "generator.json";

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn load_settings(config: Option<&Path>) -> Result<(Settings, Option<FileDigest>)> {
    match config {
        Some(path) => {
            let s = Settings::from_file(path).with_context(|| format!("config {}", path.display()))?;
            Ok((s, Some(FileDigest::of(path)?)))
        }
        None => Ok((Settings::default(), None)),
    }
}

/// A profile file, or the profile file inside a corpus directory.
fn profile_path(input: &Path) -> Result<PathBuf> {
    if input.is_dir() {
        for name in [PROFILES_FILE, "profiles.jsonl"] {
            let p = input.join(name);
            if p.is_file() {
                return Ok(p);
            }
        }
        bail!("no {PROFILES_FILE} or profiles.jsonl in {}", input.display());
    }
    if !input.exists() {
        bail!("profile file {} not found", input.display());
    }
    Ok(input.to_path_buf())
}

struct Loaded {
    path: PathBuf,
    profiles: Vec<Profile>,
    resolved: Resolved,
}

fn load_input(input: &Path, settings: &Settings) -> Result<Loaded> {
    let path = profile_path(input)?;
    let fmt = ProfileFormat::from_path(&path)?;
    let columns = if fs::metadata(&path)?.len() == 0 {
        Vec::new()
    } else {
        ingest::profile_columns(&path, fmt)?
    };
    let resolved = settings.resolve(&columns)?;
    let profiles = ingest::load_profiles(&path, &resolved.schema, fmt)?;
    log::info!(
        "loaded {} profiles over {} attributes from {}",
        profiles.len(),
        resolved.schema.len(),
        path.display()
    );
    Ok(Loaded {
        path,
        profiles,
        resolved,
    })
}

fn parse_weights(spec: &str) -> Result<BTreeMap<Corruption, f64>> {
    let mut w: BTreeMap<Corruption, f64> = Corruption::ALL.iter().map(|&c| (c, 0.0)).collect();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .with_context(|| format!("weight `{part}` is not `operator=value`"))?;
        let c: Corruption = name.trim().parse()?;
        let v: f64 = value.trim().parse().with_context(|| format!("weight `{part}`"))?;
        w.insert(c, v);
    }
    Ok(w)
}

pub fn generate(config: Option<&Path>, args: &GenerateArgs) -> Result<()> {
    let (settings, config_digest) = load_settings(config)?;
    let mut cfg = match &args.preset {
        Some(p) => GenConfig::preset(p)?,
        None => GenConfig::default(),
    };
    if let Some(n) = args.n {
        cfg.n_originals = n;
    }
    if let Some(d) = args.dup_rate {
        cfg.dup_rate = d;
    }
    if let Some(m) = args.max_dups {
        cfg.max_dups_per_original = m;
    }
    if let Some(c) = args.corruptions {
        cfg.corruptions_per_dup = c;
    }
    if let Some(w) = &args.weights {
        cfg.corruption_weights = parse_weights(w)?;
    }
    if let Some(d) = args.density {
        cfg.attribute_density = d;
    }
    if let Some(s) = args.name_skew {
        cfg.name_skew = s;
    }
    cfg.seed = args.seed.or(settings.seed).unwrap_or(0);
    cfg.validate()?;

    let schema = Schema::default();
    let start = Instant::now();
    let g = generate_corpus(&cfg, &schema)?;
    let gen_ms = millis(start);

    prepare_out_dir(&args.out)?;
    let profiles_path = args.out.join(PROFILES_FILE);
    let gold_path = args.out.join(GOLD_FILE);
    let cfg_path = args.out.join(GENERATOR_FILE);
    let start = Instant::now();
    ingest::write_profiles(&profiles_path, &g.profiles, &schema, ProfileFormat::Csv)?;
    ingest::write_gold_clusters(&gold_path, &g.clusters)?;
    fs::write(&cfg_path, serde_json::to_string_pretty(&cfg)? + "\n")?;
    let write_ms = millis(start);

    let mut m = RunManifest::new("generate");
    m.config = config_digest;
    m.seed = Some(cfg.seed);
    m.profile_count = Some(g.profiles.len());
    for p in [&profiles_path, &gold_path, &cfg_path] {
        m.output(p)?;
    }
    m.stage("generate", gen_ms);
    m.stage("write", write_ms);
    m.finish(&args.out)?;
    eprintln!(
        "wrote {} profiles and {} gold pairs to {}",
        g.profiles.len(),
        g.gold.len(),
        args.out.display()
    );
    Ok(())
}

/// Per-run details written next to the pair file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub blocker: String,
    pub profiles: usize,
    pub pairs: usize,
    pub timings_ms: BTreeMap<String, f64>,
    pub counts: Option<StreamCounts>,
    pub ac_report: Option<PurgeReport>,
    pub dyn_diagnostics: Option<DynDiagnostics>,
}

fn tag(pairs: &CandidatePairSet, source: PairSource) -> Vec<(IdPair, PairSource)> {
    pairs.iter().map(|p| (p.clone(), source)).collect()
}

fn run_blocker(blocker: &str, loaded: &Loaded) -> Result<(Vec<(IdPair, PairSource)>, Diagnostics)> {
    let r = &loaded.resolved;
    let start = Instant::now();
    let corpus = Corpus::prepare(&loaded.profiles, &r.schema, &r.norm)?;
    let prepare_ms = millis(start);
    let mut diag = Diagnostics {
        blocker: blocker.to_string(),
        profiles: corpus.len(),
        pairs: 0,
        timings_ms: BTreeMap::from([("prepare".to_string(), prepare_ms)]),
        counts: None,
        ac_report: None,
        dyn_diagnostics: None,
    };
    let start = Instant::now();
    let rows = match blocker {
        "ac" => {
            let run = ac::run(&corpus, &r.ac);
            diag.ac_report = Some(run.report);
            tag(&corpus.pair_set(&run.pairs), PairSource::Ac)
        }
        "dynamic" => {
            if r.schema.name_attributes().len() != 2 {
                log::warn!("dynamic blocking needs a given and a family name attribute; no pairs produced");
            }
            let run = dynamic::run(&corpus, &r.dynamic);
            diag.dyn_diagnostics = Some(run.diagnostics);
            tag(&corpus.pair_set(&run.pairs), PairSource::Dyn)
        }
        "ensemble" => {
            let res = ensemble::run(&corpus, &r.dynamic, &r.ac);
            diag.timings_ms.insert("ac".into(), res.timings.ac_ms);
            diag.timings_ms.insert("dyn".into(), res.timings.dyn_ms);
            diag.timings_ms.insert("merge".into(), res.timings.merge_ms);
            diag.counts = Some(res.counts);
            diag.ac_report = Some(res.ac_report);
            diag.dyn_diagnostics = Some(res.dyn_diagnostics);
            res.rows()
        }
        other => bail!("unknown blocker `{other}`"),
    };
    diag.timings_ms.insert("block".into(), millis(start));
    diag.pairs = rows.len();
    Ok((rows, diag))
}

pub fn block(config: Option<&Path>, args: &BlockArgs) -> Result<()> {
    let (mut settings, config_digest) = load_settings(config)?;
    if let Some(t) = args.threshold {
        settings.set("threshold", &t.to_string())?;
    }
    if let Some(m) = &args.mode {
        settings.set("ac.mode", m)?;
    }
    let workers = args.workers.or(settings.workers).unwrap_or_else(default_workers);
    let loaded = load_input(&args.input, &settings)?;
    let (rows, diag) = with_workers(workers, || run_blocker(&args.blocker, &loaded))??;
    log::info!("{} produced {} candidate pairs", args.blocker, rows.len());

    let Some(out) = &args.out else {
        let stdout = io::stdout();
        write_pairs(stdout.lock(), &rows)?;
        return Ok(());
    };
    prepare_out_dir(out)?;
    let pairs_path = out.join(PAIRS_FILE);
    let diag_path = out.join(DIAGNOSTICS_FILE);
    write_pairs(BufWriter::new(File::create(&pairs_path)?), &rows)
        .with_context(|| format!("cannot write {}", pairs_path.display()))?;
    fs::write(&diag_path, serde_json::to_string_pretty(&diag)? + "\n")?;

    let mut m = RunManifest::new("block");
    m.config = config_digest;
    m.seed = settings.seed;
    m.workers = Some(workers);
    m.blocker = Some(args.blocker.clone());
    m.profile_count = Some(diag.profiles);
    m.input(&loaded.path)?;
    m.output(&pairs_path)?;
    m.output(&diag_path)?;
    for (stage, ms) in &diag.timings_ms {
        m.stage(stage, *ms);
    }
    m.finish(out)?;
    eprintln!("wrote {} pairs to {}", rows.len(), pairs_path.display());
    Ok(())
}

/// The blocker that produced a pair file, judging by its source tags.
fn infer_blocker(sources: &BTreeSet<PairSource>) -> &'static str {
    if sources.contains(&PairSource::AcExtra) || sources.len() > 1 {
        "ensemble"
    } else if sources.contains(&PairSource::Ac) {
        "ac"
    } else {
        "dynamic"
    }
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let (pairs_path, run_dir) = if args.input.is_dir() {
        (args.input.join(PAIRS_FILE), Some(args.input.clone()))
    } else {
        let dir = args.input.parent().map(Path::to_path_buf);
        (args.input.clone(), dir)
    };
    if !pairs_path.is_file() {
        bail!("pair file {} not found", pairs_path.display());
    }
    if !args.gold.is_file() {
        bail!("gold standard file {} not found", args.gold.display());
    }
    let manifest = run_dir
        .as_deref()
        .filter(|d| d.join(crate::manifest::MANIFEST_FILE).is_file())
        .map(RunManifest::load)
        .transpose()?;
    let diag: Option<Diagnostics> = run_dir
        .as_deref()
        .map(|d| d.join(DIAGNOSTICS_FILE))
        .filter(|p| p.is_file())
        .map(|p| -> Result<Diagnostics> { Ok(serde_json::from_str(&fs::read_to_string(p)?)?) })
        .transpose()?;

    let rows = read_pairs(BufReader::new(
        File::open(&pairs_path).with_context(|| format!("cannot read {}", pairs_path.display()))?,
    ))
    .with_context(|| format!("invalid pair file {}", pairs_path.display()))?;
    let gold = ingest::load_gold(&args.gold, GoldFormat::Auto, None)?;
    let n = match args.n.or_else(|| manifest.as_ref().and_then(|m| m.profile_count)) {
        Some(n) => n,
        None => bail!("corpus size unknown for {}: pass --n", pairs_path.display()),
    };

    let sources: BTreeSet<PairSource> = rows.iter().map(|(_, s)| *s).collect();
    let blocker = manifest
        .as_ref()
        .and_then(|m| m.blocker.clone())
        .or_else(|| diag.as_ref().map(|d| d.blocker.clone()))
        .unwrap_or_else(|| infer_blocker(&sources).to_string());
    let dataset = args.name.clone().unwrap_or_else(|| {
        run_dir
            .as_deref()
            .and_then(Path::file_name)
            .map_or_else(|| "corpus".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let timing = |key: &str| diag.as_ref().and_then(|d| d.timings_ms.get(key).copied());

    let all: CandidatePairSet = rows.iter().map(|(p, _)| p.clone()).collect();
    let mut reports = Vec::new();
    if blocker == "ensemble" {
        let dyn_only: CandidatePairSet = rows
            .iter()
            .filter(|(_, s)| *s == PairSource::Dyn)
            .map(|(p, _)| p.clone())
            .collect();
        reports.push(MetricsReport::compute(&dataset, "dynamic", &dyn_only, &gold, n, timing("dyn"))?);
    }
    reports.push(MetricsReport::compute(&dataset, &blocker, &all, &gold, n, timing("block"))?);

    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        print!("{}", render_table(&reports));
    }
    Ok(())
}

pub fn bench(config: Option<&Path>, args: &BenchArgs) -> Result<()> {
    let (settings, _) = load_settings(config)?;
    let runs = args.runs.or(settings.runs).unwrap_or(10);
    let workers = args.workers.or(settings.workers).unwrap_or(1);
    let loaded = load_input(&args.input, &settings)?;
    let r = &loaded.resolved;
    let corpus = Corpus::prepare(&loaded.profiles, &r.schema, &r.norm)?;

    let mut rows = bench::attribute_scaling(&corpus, &r.ac, &r.dynamic, &args.attrs, runs, workers)?;
    if !args.worker_counts.is_empty() {
        rows.extend(bench::worker_scaling(&corpus, &r.ac, &r.dynamic, &args.worker_counts, runs)?);
    }
    if rows.iter().any(|r| r.noisy()) {
        log::warn!("single-run timings are noisy; use --runs 2 or more");
    }
    match &args.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            bench::write_csv(BufWriter::new(f), &rows)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            bench::write_csv(&mut lock, &rows)?;
            lock.flush()?;
        }
    }
    Ok(())
}
