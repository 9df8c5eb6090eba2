//! Experiment configuration: a flat `key = value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::cluster::MountainParams;
use crate::error::{Error, Result};
use crate::refs::{parse_selector, RefId, GROUPS};

/// Where the faulty versions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSpec {
    /// A directory of `<id>.cov` / `<id>.oracle` / `<id>.meta` triples.
    Dir(PathBuf),
    /// Sampled coverage records with planted faults.
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Fault counts to generate versions for, e.g. `1,2,5`.
    pub nof_levels: Vec<usize>,
    pub versions_per_level: usize,
    pub failed_per_fault: usize,
    pub passed: usize,
    pub statements: usize,
    pub noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            nof_levels: Vec::new(),
            versions_per_level: 10,
            failed_per_fault: 3,
            passed: 40,
            statements: 45,
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: CorpusSpec,
    /// Formulas to run, in report order.
    pub refs: Vec<RefId>,
    /// Sampling percentages for the suite-reduction question.
    pub nsp1f: Vec<u32>,
    pub mountain: MountainParams,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// The twelve group representatives, the default formula slate.
pub fn default_refs() -> Vec<RefId> {
    GROUPS.iter().map(|g| g.representative()).collect()
}

pub const DEFAULT_NSP1F: [u32; 5] = [100, 80, 60, 40, 20];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("{key} has invalid value {value:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items = value
        .split(',')
        .map(|item| parse_num(key, item))
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::config(format!("{key} must not be empty")));
    }
    Ok(items)
}

fn parse_refs(value: &str) -> Result<Vec<RefId>> {
    let mut refs = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        let resolved: Vec<RefId> = match item {
            "all-groups" => default_refs(),
            "all" => RefId::ALL.to_vec(),
            name => vec![parse_selector(name).ok_or_else(|| {
                Error::config(format!("unknown formula or group {name:?} in refs"))
            })?],
        };
        for r in resolved {
            if !refs.contains(&r) {
                refs.push(r);
            }
        }
    }
    if refs.is_empty() {
        return Err(Error::config("refs must not be empty"));
    }
    Ok(refs)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses `key = value` lines; `#` starts a comment. Unknown and
    /// duplicate keys are errors so typos cannot silently fall back to a
    /// default.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut pairs: BTreeMap<&str, &str> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(no + 1, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if pairs.insert(key, value).is_some() {
                return Err(Error::config(format!("duplicate key {key}")));
            }
        }

        const KNOWN: [&str; 16] = [
            "corpus_dir",
            "synthetic_nof_levels",
            "synthetic_versions_per_level",
            "synthetic_failed_per_fault",
            "synthetic_passed",
            "synthetic_statements",
            "synthetic_noise",
            "refs",
            "nsp1f",
            "seed",
            "out_dir",
            "bandwidth_scale",
            "revision_sharpening",
            "stop_ratio",
            "winsor_low",
            "winsor_high",
        ];
        for key in pairs.keys() {
            if !KNOWN.contains(key) {
                return Err(Error::config(format!("unknown key {key}")));
            }
        }

        let corpus = match (pairs.get("corpus_dir"), pairs.get("synthetic_nof_levels")) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "corpus_dir and synthetic_nof_levels are mutually exclusive",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "either corpus_dir or synthetic_nof_levels is required",
                ))
            }
            (Some(dir), None) => {
                if let Some(stray) = pairs.keys().find(|k| k.starts_with("synthetic_")) {
                    return Err(Error::config(format!(
                        "{stray} only applies to a synthetic corpus"
                    )));
                }
                CorpusSpec::Dir(PathBuf::from(dir))
            }
            (None, Some(levels)) => {
                let mut spec = SyntheticSpec {
                    nof_levels: parse_list("synthetic_nof_levels", levels)?,
                    ..SyntheticSpec::default()
                };
                if let Some(v) = pairs.get("synthetic_versions_per_level") {
                    spec.versions_per_level = parse_num("synthetic_versions_per_level", v)?;
                }
                if let Some(v) = pairs.get("synthetic_failed_per_fault") {
                    spec.failed_per_fault = parse_num("synthetic_failed_per_fault", v)?;
                }
                if let Some(v) = pairs.get("synthetic_passed") {
                    spec.passed = parse_num("synthetic_passed", v)?;
                }
                if let Some(v) = pairs.get("synthetic_statements") {
                    spec.statements = parse_num("synthetic_statements", v)?;
                }
                if let Some(v) = pairs.get("synthetic_noise") {
                    spec.noise = parse_num("synthetic_noise", v)?;
                }
                CorpusSpec::Synthetic(spec)
            }
        };

        let refs = match pairs.get("refs") {
            Some(value) => parse_refs(value)?,
            None => default_refs(),
        };
        let nsp1f: Vec<u32> = match pairs.get("nsp1f") {
            Some(value) => parse_list("nsp1f", value)?,
            None => DEFAULT_NSP1F.to_vec(),
        };
        for &pct in &nsp1f {
            if pct == 0 || pct > 100 {
                return Err(Error::config(format!(
                    "nsp1f percentages must lie in 1..=100, got {pct}"
                )));
            }
        }

        let mut mountain = MountainParams::default();
        if let Some(v) = pairs.get("bandwidth_scale") {
            mountain.bandwidth_scale = parse_num("bandwidth_scale", v)?;
        }
        if let Some(v) = pairs.get("revision_sharpening") {
            mountain.revision_sharpening = parse_num("revision_sharpening", v)?;
        }
        if let Some(v) = pairs.get("stop_ratio") {
            mountain.stop_ratio = parse_num("stop_ratio", v)?;
        }
        if let Some(v) = pairs.get("winsor_low") {
            mountain.winsor_low = parse_num("winsor_low", v)?;
        }
        if let Some(v) = pairs.get("winsor_high") {
            mountain.winsor_high = parse_num("winsor_high", v)?;
        }
        mountain.validate()?;

        let seed = match pairs.get("seed") {
            Some(value) => parse_num("seed", value)?,
            None => return Err(Error::config("seed is required")),
        };
        let out_dir = match pairs.get("out_dir") {
            Some(value) => PathBuf::from(value),
            None => return Err(Error::config("out_dir is required")),
        };

        Ok(ExperimentConfig { corpus, refs, nsp1f, mountain, seed, out_dir })
    }

    /// The effective settings as sorted `key = value` lines, echoed into
    /// every run manifest.
    pub fn manifest_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("bandwidth_scale = {}", self.mountain.bandwidth_scale),
            format!(
                "nsp1f = {}",
                self.nsp1f.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
            ),
            format!("out_dir = {}", self.out_dir.display()),
            format!(
                "refs = {}",
                self.refs.iter().map(|r| r.name()).collect::<Vec<_>>().join(",")
            ),
            format!("revision_sharpening = {}", self.mountain.revision_sharpening),
            format!("seed = {}", self.seed),
            format!("stop_ratio = {}", self.mountain.stop_ratio),
            format!("winsor_high = {}", self.mountain.winsor_high),
            format!("winsor_low = {}", self.mountain.winsor_low),
        ];
        match &self.corpus {
            CorpusSpec::Dir(dir) => lines.push(format!("corpus_dir = {}", dir.display())),
            CorpusSpec::Synthetic(s) => {
                lines.push(format!("synthetic_failed_per_fault = {}", s.failed_per_fault));
                lines.push(format!(
                    "synthetic_nof_levels = {}",
                    s.nof_levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
                ));
                lines.push(format!("synthetic_noise = {}", s.noise));
                lines.push(format!("synthetic_passed = {}", s.passed));
                lines.push(format!("synthetic_statements = {}", s.statements));
                lines.push(format!("synthetic_versions_per_level = {}", s.versions_per_level));
            }
        }
        lines.sort();
        lines
    }
}
