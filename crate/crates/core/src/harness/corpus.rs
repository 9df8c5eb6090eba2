//! Corpus storage: one faulty version per id as `<id>.cov`, `<id>.oracle`
//! and an optional `<id>.meta` carrying `fault_type` and `nof`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::coverage::CoverageRecord;
use crate::error::{Error, Result};
use crate::eval::OracleLabels;
use crate::faultgen::{sample_synthetic_spectrum, FaultType};
use crate::harness::config::{CorpusSpec, SyntheticSpec};
use crate::rng::mix3;

/// One faulty version ready for the pipeline.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub coverage: CoverageRecord,
    pub oracle: OracleLabels,
    /// Fault class, when the generator recorded one.
    pub fault_type: Option<FaultType>,
    /// Declared fault count; defaults to the oracle's distinct labels.
    pub nof: usize,
}

/// Loads or generates the corpus a config points at. Warnings cover
/// conditions worth a manifest line but not a failure: an empty corpus, or
/// declared faults that no failing test exercises.
pub fn load_corpus(spec: &CorpusSpec, seed: u64) -> Result<(Vec<CorpusEntry>, Vec<String>)> {
    match spec {
        CorpusSpec::Dir(dir) => load_dir(dir),
        CorpusSpec::Synthetic(s) => generate_synthetic(s, seed),
    }
}

fn load_dir(dir: &Path) -> Result<(Vec<CorpusEntry>, Vec<String>)> {
    let mut ids: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "cov") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();

    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for id in ids {
        let read = |ext: &str| std::fs::read_to_string(dir.join(format!("{id}.{ext}")));
        let coverage = CoverageRecord::parse(&read("cov")?).map_err(|e| in_file(&id, "cov", e))?;
        let oracle = OracleLabels::parse(&read("oracle")?, &coverage.failed_ids())
            .map_err(|e| in_file(&id, "oracle", e))?;
        if oracle.collapsed_faults() > 0 {
            warnings.push(format!(
                "{id}: {} declared fault(s) have no failing test",
                oracle.collapsed_faults()
            ));
        }
        let mut fault_type = None;
        let mut nof = oracle.r();
        let meta_path = dir.join(format!("{id}.meta"));
        if meta_path.exists() {
            let meta = parse_meta(&std::fs::read_to_string(meta_path)?)
                .map_err(|e| in_file(&id, "meta", e))?;
            fault_type = meta.fault_type;
            if let Some(declared) = meta.nof {
                nof = declared;
            }
        }
        entries.push(CorpusEntry { id, coverage, oracle, fault_type, nof });
    }
    if entries.is_empty() {
        warnings.push(format!("corpus directory {} holds no versions", dir.display()));
    }
    Ok((entries, warnings))
}

fn in_file(id: &str, ext: &str, e: Error) -> Error {
    Error::Domain(format!("{id}.{ext}: {e}"))
}

struct Meta {
    fault_type: Option<FaultType>,
    nof: Option<usize>,
}

fn parse_meta(text: &str) -> Result<Meta> {
    let mut pairs: BTreeMap<&str, &str> = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(no + 1, "expected `key = value`"));
        };
        pairs.insert(key.trim(), value.trim());
    }
    let mut meta = Meta { fault_type: None, nof: None };
    for (key, value) in pairs {
        match key {
            "fault_type" => {
                meta.fault_type = Some(FaultType::parse(value).ok_or_else(|| {
                    Error::domain(format!(
                        "fault_type must be TypeA, TypeP or TypeH, got {value:?}"
                    ))
                })?);
            }
            "nof" => {
                meta.nof = Some(value.parse().map_err(|_| {
                    Error::domain(format!("nof must be a count, got {value:?}"))
                })?);
            }
            other => return Err(Error::domain(format!("unknown meta key {other}"))),
        }
    }
    Ok(meta)
}

fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<(Vec<CorpusEntry>, Vec<String>)> {
    let mut entries = Vec::new();
    for &nof in &spec.nof_levels {
        for index in 0..spec.versions_per_level {
            let (coverage, oracle) = sample_synthetic_spectrum(
                nof,
                spec.failed_per_fault,
                spec.passed,
                spec.statements,
                spec.noise,
                mix3(seed, nof as u64, index as u64),
            )?;
            entries.push(CorpusEntry {
                id: format!("nof{nof}-v{index:03}"),
                coverage,
                oracle,
                fault_type: None,
                nof,
            });
        }
    }
    let warnings = if entries.is_empty() {
        vec!["synthetic corpus has no levels or no versions per level".to_string()]
    } else {
        Vec::new()
    };
    Ok((entries, warnings))
}

/// The `<id>.oracle` text: one `<test_id> <fault_id>` line per failing
/// test, test ids 1-based.
pub fn oracle_text(oracle: &OracleLabels, failed_ids: &[usize]) -> String {
    let mut text = String::new();
    for (pos, &test) in failed_ids.iter().enumerate() {
        writeln!(text, "{} {}", test + 1, oracle.label(pos)).expect("string write");
    }
    text
}

/// Writes a corpus directory the loader round-trips.
pub fn write_corpus(dir: &Path, entries: &[CorpusEntry]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for entry in entries {
        std::fs::write(dir.join(format!("{}.cov", entry.id)), entry.coverage.to_text())?;
        std::fs::write(
            dir.join(format!("{}.oracle", entry.id)),
            oracle_text(&entry.oracle, &entry.coverage.failed_ids()),
        )?;
        let mut meta = format!("nof = {}\n", entry.nof);
        if let Some(ft) = entry.fault_type {
            meta.push_str(&format!("fault_type = {ft}\n"));
        }
        std::fs::write(dir.join(format!("{}.meta", entry.id)), meta)?;
    }
    Ok(())
}
