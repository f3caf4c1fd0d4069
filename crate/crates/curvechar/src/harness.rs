//! Configuration, persistence and experiment runners behind the CLI.
//!
//! Every run resolves a `RunConfig` (defaults ← JSON config file ← flags ←
//! environment), derives a SHA-256 hash of the resolved config, and embeds
//! that hash in every output file so results are traceable to their exact
//! configuration.  Primary outputs (JSONL/CSV) are deterministic for a fixed
//! config and seed; wall-clock timing lives only in the experiment record.
//! All files are written atomically (temp file + rename).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::acceptance;
use crate::explorer::{
    gr_filter_check, mcshane_character_check, search_tuples, SearchConfig,
};
use crate::geometry::{
    curve_length, pinching_experiment, punctured_torus_structure, hempel_scan,
    GeometryError, HempelScanConfig, PinchingSchedule,
};
use crate::intersections::{self, DiscreteStructure, IntersectError};
use crate::traces::{
    chars_equal_probabilistic, fricke_char, FrickeTable, TraceError, Verdict,
};
use crate::words::{parse_word, WordError};

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "CURVECHAR_OUT_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot parse rational '{0}' (expected p or p/q)")]
    Rational(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Intersect(#[from] IntersectError),
    #[error(transparent)]
    Explorer(#[from] crate::explorer::ExplorerError),
    #[error("serialization failed: {0}")]
    Serde(#[from] serde_json::Error),
}

// ---------------------------------------------------------------------------
// Config resolution
// ---------------------------------------------------------------------------

/// Fully resolved run configuration; serialized into every record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    /// Single seed feeding every random draw of the run.
    pub seed: u64,
    /// Directory primary outputs and the record are written into.
    pub out_dir: PathBuf,
    /// Worker pool width; None uses all cores.  Results never depend on it.
    pub width: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: PathBuf::from("."),
            width: None,
        }
    }
}

/// Optional fields as they appear in a JSON config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub width: Option<usize>,
}

/// Resolution order: defaults, then config file, then CLI flags, then the
/// output-directory environment variable.
pub fn resolve_config(
    file: Option<&Path>,
    seed_flag: Option<u64>,
    out_dir_flag: Option<&Path>,
    width_flag: Option<usize>,
) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let fc: FileConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        if let Some(s) = fc.seed {
            cfg.seed = s;
        }
        if let Some(d) = fc.out_dir {
            cfg.out_dir = d;
        }
        if let Some(w) = fc.width {
            cfg.width = Some(w);
        }
    }
    if let Some(s) = seed_flag {
        cfg.seed = s;
    }
    if let Some(d) = out_dir_flag {
        cfg.out_dir = d.to_path_buf();
    }
    if let Some(w) = width_flag {
        cfg.width = Some(w);
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        cfg.out_dir = PathBuf::from(dir);
    }
    if let Some(w) = cfg.width {
        if w == 0 {
            return Err(HarnessError::Config("width must be positive".into()));
        }
        // Errors only if a global pool already exists (e.g. in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(cfg)
}

/// SHA-256 of the resolved config serialization, hex-encoded.
pub fn config_hash(cfg: &RunConfig, command: &serde_json::Value) -> String {
    let payload = serde_json::json!({ "run": cfg, "command": command });
    let mut hasher = Sha256::new();
    hasher.update(payload.to_string().as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Writes atomically: a partial file is never visible under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)?;
    Ok(())
}

/// A self-contained description of one completed run.
#[derive(Debug, Serialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub config: RunConfig,
    pub command_args: serde_json::Value,
    pub config_hash: String,
    pub version: String,
    pub wall_ms: u128,
    pub outputs: Vec<String>,
}

fn write_record(
    cfg: &RunConfig,
    command: &str,
    args: serde_json::Value,
    hash: &str,
    started: Instant,
    outputs: &[PathBuf],
) -> Result<(), HarnessError> {
    let record = ExperimentRecord {
        command: command.to_string(),
        config: cfg.clone(),
        command_args: args,
        config_hash: hash.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_ms: started.elapsed().as_millis(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let path = cfg.out_dir.join(format!("{command}_record.json"));
    atomic_write(&path, serde_json::to_string_pretty(&record)?.as_bytes())
}

pub fn parse_rational(text: &str) -> Result<BigRational, HarnessError> {
    let bad = || HarnessError::Rational(text.to_string());
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = text.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(p))
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommand runners (each returns a process exit code)
// ---------------------------------------------------------------------------

pub fn run_char(word: &str) -> Result<i32, HarnessError> {
    let w = parse_word(word, 2)?;
    println!("{}", fricke_char(&w)?.canonical_string());
    Ok(0)
}

pub fn run_equal(
    cfg: &RunConfig,
    word1: &str,
    word2: &str,
    probabilistic: bool,
    trials: usize,
) -> Result<i32, HarnessError> {
    let u = parse_word(word1, 2)?;
    let v = parse_word(word2, 2)?;
    if probabilistic {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        match chars_equal_probabilistic(&u, &v, 2, trials, &mut rng) {
            Verdict::ProbablyEqual { trials } => {
                println!("PROBABLY EQUAL ({trials} trials)");
            }
            Verdict::Distinct { trial, .. } => {
                println!("DISTINCT (witness at trial {trial})");
            }
        }
        return Ok(0);
    }
    let mut table = FrickeTable::new();
    if table.char_of_word(&u)? == table.char_of_word(&v)? {
        println!("EQUAL (exact)");
    } else {
        println!("DISTINCT (exact)");
    }
    Ok(0)
}

#[derive(Serialize)]
struct SearchRecordLine<'a> {
    config_hash: &'a str,
    key: &'a str,
    members: Vec<String>,
    flags: &'a [crate::explorer::MemberFlags],
}

pub fn run_search(
    cfg: &RunConfig,
    max_len: usize,
    include_powers: bool,
    annotate: bool,
    out: &Path,
) -> Result<i32, HarnessError> {
    let started = Instant::now();
    let args = serde_json::json!({
        "max_len": max_len,
        "include_powers": include_powers,
        "annotate": annotate,
        "out": out.display().to_string(),
    });
    let hash = config_hash(cfg, &args);

    let mut search = SearchConfig::new(max_len);
    search.include_powers = include_powers;
    search.annotate_self_intersections = annotate;
    let reports = search_tuples(&search)?;

    let mut jsonl = String::new();
    for r in &reports {
        let line = SearchRecordLine {
            config_hash: &hash,
            key: &r.key,
            members: r.members.iter().map(|m| m.to_string()).collect(),
            flags: &r.flags,
        };
        jsonl.push_str(&serde_json::to_string(&line)?);
        jsonl.push('\n');
    }
    let out_path = cfg.out_dir.join(out);
    atomic_write(&out_path, jsonl.as_bytes())?;

    // Histogram of bucket sizes keyed by the longest member length.
    let mut histogram: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in &reports {
        let len = r.members.iter().map(|m| m.len()).max().unwrap_or(0);
        *histogram.entry((len, r.members.len())).or_default() += 1;
    }
    let mut csv_buf = format!("# config_hash: {hash}\n");
    {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["length", "bucket_size", "buckets"])
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        for ((len, size), count) in &histogram {
            wtr.write_record([len.to_string(), size.to_string(), count.to_string()])
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        let inner = wtr
            .into_inner()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        csv_buf.push_str(&String::from_utf8_lossy(&inner));
    }
    let summary_path = cfg.out_dir.join("search_summary.csv");
    atomic_write(&summary_path, csv_buf.as_bytes())?;

    let violations = gr_filter_check(&reports)?;
    println!(
        "{} multi-member buckets, {} flagged violations",
        reports.len(),
        violations.len()
    );
    for v in &violations {
        println!("VIOLATION {} {} {}", v.key, v.member, v.bucketmate);
    }
    write_record(cfg, "search", args, &hash, started, &[out_path, summary_path])?;
    Ok(if violations.is_empty() { 0 } else { 1 })
}

pub fn run_selfint(word: &str, x: Option<&str>, y: Option<&str>) -> Result<i32, HarnessError> {
    let class = parse_word(word, 2)?.canonical_class()?;
    let structure = match (x, y) {
        (Some(x), Some(y)) => {
            let t = punctured_torus_structure(parse_rational(x)?, parse_rational(y)?, false)?;
            DiscreteStructure::new(t)?
        }
        _ => DiscreteStructure::standard(),
    };
    let r = intersections::self_intersection(&class, &structure)?;
    println!("{}", serde_json::to_string(&r)?);
    Ok(0)
}

pub fn run_lengths(
    cfg: &RunConfig,
    x: &str,
    y: &str,
    words: &[String],
    out: Option<&Path>,
) -> Result<i32, HarnessError> {
    let started = Instant::now();
    let args = serde_json::json!({ "x": x, "y": y, "words": words });
    let hash = config_hash(cfg, &args);
    let t = punctured_torus_structure(parse_rational(x)?, parse_rational(y)?, false)?;
    let mut buf = format!("# config_hash: {hash}\nclass,trace,length,peripheral\n");
    for w in words {
        let c = parse_word(w, 2)?.canonical_class()?;
        let l = curve_length(&t, &c)?;
        let _ = writeln!(buf, "{c},{},{},{}", l.trace, l.length, l.peripheral);
    }
    match out {
        Some(path) => {
            let out_path = cfg.out_dir.join(path);
            atomic_write(&out_path, buf.as_bytes())?;
            write_record(cfg, "lengths", args, &hash, started, &[out_path])?;
        }
        None => print!("{buf}"),
    }
    Ok(0)
}

/// JSON schema of `pinch --config`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinchConfig {
    /// Probe classes measured alongside the pinched curve.
    pub probes: Vec<String>,
}

pub fn run_pinch(
    cfg: &RunConfig,
    config_path: Option<&Path>,
    out: &Path,
) -> Result<i32, HarnessError> {
    let started = Instant::now();
    let probes: Vec<String> = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let pc: PinchConfig = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            pc.probes
        }
        None => vec!["abaaB".to_string(), "aabb".to_string()],
    };
    let args = serde_json::json!({ "probes": probes, "out": out.display().to_string() });
    let hash = config_hash(cfg, &args);

    let probe_classes = probes
        .iter()
        .map(|p| Ok(parse_word(p, 2)?.canonical_class()?))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let schedule = PinchingSchedule::reference(probe_classes);
    let report = pinching_experiment(&schedule)?;

    let mut buf = format!("# config_hash: {hash}\nstep,x,y,z,curve,trace,length\n");
    for row in &report.rows {
        let _ = writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            row.step, row.x, row.y, row.z, row.curve, row.trace, row.length
        );
    }
    let out_path = cfg.out_dir.join(out);
    atomic_write(&out_path, buf.as_bytes())?;
    println!(
        "pinched length at final step: {:.6e} (monotone: {})",
        report.final_pinched_length, report.pinched_monotone
    );
    for (probe, min) in &report.probe_min {
        println!("probe {probe}: min length {min:.6}");
    }
    write_record(cfg, "pinch", args, &hash, started, &[out_path])?;
    Ok(0)
}

pub fn run_hempel(
    cfg: &RunConfig,
    max_len: usize,
    grid: &str,
    out: Option<&Path>,
) -> Result<i32, HarnessError> {
    let started = Instant::now();
    let args = serde_json::json!({ "max_len": max_len, "grid": grid });
    let hash = config_hash(cfg, &args);
    let mut pairs = Vec::new();
    for chunk in grid.split(';') {
        let (x, y) = chunk
            .split_once(',')
            .ok_or_else(|| HarnessError::Config(format!("bad grid entry '{chunk}'")))?;
        pairs.push((parse_rational(x)?, parse_rational(y)?));
    }
    let scan = hempel_scan(&HempelScanConfig {
        max_len,
        grid: pairs,
    })?;
    let payload = serde_json::json!({
        "config_hash": hash,
        "observed_min": scan.observed_min,
        "witness_curve": scan.witness_curve,
        "witness_structure": scan.witness_structure,
        "classes_measured": scan.classes_measured,
    });
    match out {
        Some(path) => {
            let out_path = cfg.out_dir.join(path);
            atomic_write(&out_path, serde_json::to_string_pretty(&payload)?.as_bytes())?;
            write_record(cfg, "hempel", args, &hash, started, &[out_path])?;
        }
        None => println!("{}", serde_json::to_string_pretty(&payload)?),
    }
    Ok(0)
}

pub fn run_gr_check(max_len: usize) -> Result<i32, HarnessError> {
    let reports = search_tuples(&SearchConfig::new(max_len))?;
    let gr = gr_filter_check(&reports)?;
    let mcshane = mcshane_character_check(max_len)?;
    println!(
        "{} multi-member buckets; {} GR violations; {} simple-class violations",
        reports.len(),
        gr.len(),
        mcshane.len()
    );
    for v in &gr {
        println!("GR VIOLATION {} {} {}", v.key, v.member, v.bucketmate);
    }
    for v in &mcshane {
        println!("SIMPLE VIOLATION {} {}", v.key, v.simple_member);
    }
    Ok(if gr.is_empty() && mcshane.is_empty() { 0 } else { 1 })
}

pub fn run_acceptance(suite: Option<&str>) -> Result<i32, HarnessError> {
    let results = acceptance::run(suite);
    if results.is_empty() {
        return Err(HarnessError::Config(format!(
            "unknown suite '{}'; known: {}",
            suite.unwrap_or(""),
            acceptance::CRITERIA.join(", ")
        )));
    }
    let mut failed = 0;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {:2} {:<14} [{:6} ms] {}",
            r.id, r.name, r.millis, r.details
        );
        if !r.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    Ok(if failed == 0 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::from(BigInt::from(3)));
        assert_eq!(
            parse_rational("7/2").unwrap(),
            BigRational::new(BigInt::from(7), BigInt::from(2))
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn atomic_write_replaces_and_never_exposes_partials() {
        let dir = std::env::temp_dir().join("curvechar_harness_test");
        let _ = fs::remove_dir_all(&dir);
        let path = dir.join("out.txt");
        atomic_write(&path, b"first").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"first");
        atomic_write(&path, b"second").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second");
        assert!(!path.with_extension("txt.tmp").exists());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let cfg = RunConfig::default();
        let a1 = config_hash(&cfg, &serde_json::json!({"max_len": 5}));
        let a2 = config_hash(&cfg, &serde_json::json!({"max_len": 5}));
        let b = config_hash(&cfg, &serde_json::json!({"max_len": 6}));
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
        assert_eq!(a1.len(), 64);
    }

    #[test]
    fn config_resolution_precedence() {
        let dir = std::env::temp_dir().join("curvechar_cfg_test");
        fs::create_dir_all(&dir).unwrap();
        let file = dir.join("cfg.json");
        fs::write(&file, r#"{"seed": 7, "width": null}"#).unwrap();
        let cfg = resolve_config(Some(&file), None, None, None).unwrap();
        assert_eq!(cfg.seed, 7);
        let cfg = resolve_config(Some(&file), Some(9), None, None).unwrap();
        assert_eq!(cfg.seed, 9);
        let bad = dir.join("bad.json");
        fs::write(&bad, r#"{"sedd": 7}"#).unwrap();
        assert!(resolve_config(Some(&bad), None, None, None).is_err());
        let _ = fs::remove_dir_all(&dir);
    }
}
