//! Experiment runners. Each produces CSV tables plus a manifest in the
//! configured output directory and returns the list of files written.
//!
//! * `rq1`: formula comparison on the full suite.
//! * `rq2`: estimation accuracy across fault counts.
//! * `rq3`: estimation accuracy across fault types.
//! * `rq4`: robustness under sampled passed tests.
//!
//! Every loop runs in configuration order over versions sorted at load, so
//! a rerun with the same config writes byte-identical tables.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{deviation, sum_metric, sum_vote, Category, EvalReport, Metric};
use crate::harness::config::ExperimentConfig;
use crate::harness::corpus::{load_corpus, CorpusEntry};
use crate::harness::pipeline::{evaluate_entry, policy_seed};
use crate::harness::stats::summarize;
use crate::refs::{group_of, RefId};

/// What a runner wrote, and anything worth flagging that was not an error.
#[derive(Debug)]
pub struct RqReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn f6(value: f64) -> String {
    format!("{value:.6}")
}

fn opt_f6(value: Option<f64>) -> String {
    value.map(f6).unwrap_or_default()
}

fn group_label(ref_id: RefId) -> String {
    format!("G{}", group_of(ref_id).id)
}

/// Share of a formula's best per-level equal count, as a percentage. The
/// strongest level of each formula renders fully opaque, giving the
/// category tables a comparable shading column.
fn opacity_percent(equal: usize, max_equal: usize) -> f64 {
    if max_equal == 0 {
        0.0
    } else {
        100.0 * equal as f64 / max_equal as f64
    }
}

struct Outcome {
    version: String,
    ref_id: RefId,
    level: String,
    report: EvalReport,
}

/// Runs every version through every formula at the given percentages and
/// labels each outcome with a level key (the grouping axis of the table).
fn compute_outcomes(
    cfg: &ExperimentConfig,
    entries: &[CorpusEntry],
    pcts: &[u32],
    level_of: impl Fn(&CorpusEntry, u32) -> String,
) -> Result<Vec<Outcome>> {
    let mut outcomes = Vec::new();
    for &ref_id in &cfg.refs {
        for &pct in pcts {
            for (index, entry) in entries.iter().enumerate() {
                let report = evaluate_entry(
                    entry,
                    ref_id,
                    pct,
                    policy_seed(cfg.seed, index, pct),
                    &cfg.mountain,
                )
                .map_err(|e| Error::domain(format!("{}: {e}", entry.id)))?;
                outcomes.push(Outcome {
                    version: entry.id.clone(),
                    ref_id,
                    level: level_of(entry, pct),
                    report,
                });
            }
        }
    }
    Ok(outcomes)
}

struct Writer {
    out_dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(out_dir: &Path) -> Result<Writer> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Writer { out_dir: out_dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, content: String) -> Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, content)?;
        self.files.push(path);
        Ok(())
    }

    fn manifest(
        &mut self,
        rq: &str,
        cfg: &ExperimentConfig,
        version_count: usize,
        warnings: &[String],
    ) -> Result<()> {
        let mut lines = vec![format!("rq = {rq}")];
        lines.extend(cfg.manifest_lines());
        lines.push(format!("corpus_versions = {version_count}"));
        for w in warnings {
            lines.push(format!("warning = {w}"));
        }
        self.write("manifest.txt", lines.join("\n") + "\n")
    }

    fn finish(self, warnings: Vec<String>) -> RqReport {
        RqReport { out_dir: self.out_dir, files: self.files, warnings }
    }
}

fn category_counts<'a>(reports: impl Iterator<Item = &'a EvalReport>) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for report in reports {
        match report.category {
            Category::Under => counts.0 += 1,
            Category::Equal => counts.1 += 1,
            Category::Over => counts.2 += 1,
        }
    }
    counts
}

/// The two per-level tables shared by rq2, rq3 and rq4: category counts
/// with opacity shading, and order statistics of each metric over the
/// exactly-estimated versions.
fn write_level_tables(
    writer: &mut Writer,
    prefix: &str,
    level_col: &str,
    cfg: &ExperimentConfig,
    outcomes: &[Outcome],
    level_order: &[String],
) -> Result<()> {
    let of = |ref_id: RefId, level: &str| -> Vec<&EvalReport> {
        outcomes
            .iter()
            .filter(|o| o.ref_id == ref_id && o.level == level)
            .map(|o| &o.report)
            .collect()
    };

    let mut categories =
        format!("ref,group,{level_col},versions,v_under,v_equal,v_over,opacity\n");
    for &ref_id in &cfg.refs {
        let max_equal = level_order
            .iter()
            .map(|level| category_counts(of(ref_id, level).into_iter()).1)
            .max()
            .unwrap_or(0);
        for level in level_order {
            let (under, equal, over) = category_counts(of(ref_id, level).into_iter());
            categories.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                ref_id.name(),
                group_label(ref_id),
                level,
                under + equal + over,
                under,
                equal,
                over,
                f6(opacity_percent(equal, max_equal)),
            ));
        }
    }
    writer.write(&format!("{prefix}_categories.csv"), categories)?;

    let mut metrics = format!(
        "ref,group,{level_col},metric,versions,sum,mean,median,lower_quartile,upper_quartile\n"
    );
    for &ref_id in &cfg.refs {
        for level in level_order {
            for metric in Metric::ALL {
                let values: Vec<f64> = of(ref_id, level)
                    .into_iter()
                    .filter_map(|r| r.metrics.as_ref())
                    .map(|m| m.value(metric))
                    .collect();
                let row = match summarize(&values) {
                    Some(s) => format!(
                        "{},{},{},{},{},{}",
                        s.count,
                        f6(s.sum),
                        f6(s.mean),
                        f6(s.median),
                        f6(s.lower_quartile),
                        f6(s.upper_quartile),
                    ),
                    None => "0,,,,,".to_string(),
                };
                metrics.push_str(&format!(
                    "{},{},{},{},{}\n",
                    ref_id.name(),
                    group_label(ref_id),
                    level,
                    metric.as_str(),
                    row,
                ));
            }
        }
    }
    writer.write(&format!("{prefix}_metrics.csv"), metrics)
}

/// Formula comparison on the full suite: a per-version table, a per-formula
/// summary, and one dominance matrix per metric.
pub fn run_rq1(cfg: &ExperimentConfig) -> Result<RqReport> {
    let (entries, warnings) = load_corpus(&cfg.corpus, cfg.seed)?;
    let mut writer = Writer::new(&cfg.out_dir)?;
    let outcomes = compute_outcomes(cfg, &entries, &[100], |_, _| String::new())?;

    let mut versions = String::from("version,ref,group,category,k,r,jc,fmi,pr,rr,votes\n");
    for o in &outcomes {
        let (jc, fmi, pr, rr, votes) = match &o.report.metrics {
            Some(m) => (
                f6(m.jc.value),
                f6(m.fmi.value),
                f6(m.pr.value),
                f6(m.rr.value),
                m.votes.to_string(),
            ),
            None => Default::default(),
        };
        versions.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            o.version,
            o.ref_id.name(),
            group_label(o.ref_id),
            o.report.category.as_str(),
            o.report.k,
            o.report.r,
            jc,
            fmi,
            pr,
            rr,
            votes,
        ));
    }
    writer.write("rq1_versions.csv", versions)?;

    let per_ref = |ref_id: RefId| outcomes.iter().filter(move |o| o.ref_id == ref_id);
    let mut summary = String::from(
        "ref,group,versions,v_under,v_equal,v_over,sum_jc,sum_fmi,sum_pr,sum_rr,\
         dev_over,dev_under,dev_mean,sum_vote\n",
    );
    for &ref_id in &cfg.refs {
        let reports: Vec<&EvalReport> = per_ref(ref_id).map(|o| &o.report).collect();
        let (under, equal, over) = category_counts(reports.iter().copied());
        let dev = deviation(&reports.iter().map(|r| (r.k, r.r)).collect::<Vec<_>>());
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            ref_id.name(),
            group_label(ref_id),
            reports.len(),
            under,
            equal,
            over,
            f6(sum_metric(reports.iter().copied(), Metric::Jc)),
            f6(sum_metric(reports.iter().copied(), Metric::Fmi)),
            f6(sum_metric(reports.iter().copied(), Metric::Pr)),
            f6(sum_metric(reports.iter().copied(), Metric::Rr)),
            opt_f6(dev.over),
            opt_f6(dev.under),
            opt_f6(dev.mean),
            sum_vote(reports.iter().copied()),
        ));
    }
    writer.write("rq1_summary.csv", summary)?;

    for metric in Metric::ALL {
        let sums: Vec<f64> = cfg
            .refs
            .iter()
            .map(|&r| sum_metric(per_ref(r).map(|o| &o.report), metric))
            .collect();
        let mut table = String::from("ref");
        for &r in &cfg.refs {
            table.push(',');
            table.push_str(r.name());
        }
        table.push('\n');
        for (i, &r) in cfg.refs.iter().enumerate() {
            table.push_str(r.name());
            for j in 0..cfg.refs.len() {
                table.push_str(if sums[i] > sums[j] { ",1" } else { ",0" });
            }
            table.push('\n');
        }
        writer.write(
            &format!("rq1_dominance_{}.csv", metric.as_str().to_ascii_lowercase()),
            table,
        )?;
    }

    writer.manifest("rq1", cfg, entries.len(), &warnings)?;
    Ok(writer.finish(warnings))
}

/// Estimation accuracy grouped by declared fault count.
pub fn run_rq2(cfg: &ExperimentConfig) -> Result<RqReport> {
    let (entries, warnings) = load_corpus(&cfg.corpus, cfg.seed)?;
    let mut writer = Writer::new(&cfg.out_dir)?;
    let mut levels: Vec<usize> = entries.iter().map(|e| e.nof).collect();
    levels.sort_unstable();
    levels.dedup();
    let level_order: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
    let outcomes = compute_outcomes(cfg, &entries, &[100], |e, _| e.nof.to_string())?;
    write_level_tables(&mut writer, "rq2", "nof", cfg, &outcomes, &level_order)?;
    writer.manifest("rq2", cfg, entries.len(), &warnings)?;
    Ok(writer.finish(warnings))
}

/// Estimation accuracy grouped by fault type. Every version must declare
/// `fault_type` in its meta file.
pub fn run_rq3(cfg: &ExperimentConfig) -> Result<RqReport> {
    let (entries, warnings) = load_corpus(&cfg.corpus, cfg.seed)?;
    if let Some(untyped) = entries.iter().find(|e| e.fault_type.is_none()) {
        return Err(Error::config(format!(
            "version {} does not declare fault_type, which rq3 groups by",
            untyped.id
        )));
    }
    let mut writer = Writer::new(&cfg.out_dir)?;
    let mut types: Vec<_> = entries.iter().filter_map(|e| e.fault_type).collect();
    types.sort();
    types.dedup();
    let level_order: Vec<String> = types.iter().map(|t| t.to_string()).collect();
    let outcomes = compute_outcomes(cfg, &entries, &[100], |e, _| {
        e.fault_type.expect("checked above").to_string()
    })?;
    write_level_tables(&mut writer, "rq3", "fault_type", cfg, &outcomes, &level_order)?;
    writer.manifest("rq3", cfg, entries.len(), &warnings)?;
    Ok(writer.finish(warnings))
}

/// Robustness under passed-test sampling, grouped by sampling percentage.
pub fn run_rq4(cfg: &ExperimentConfig) -> Result<RqReport> {
    let (entries, warnings) = load_corpus(&cfg.corpus, cfg.seed)?;
    let mut writer = Writer::new(&cfg.out_dir)?;
    let level_order: Vec<String> = cfg.nsp1f.iter().map(|p| p.to_string()).collect();
    let outcomes = compute_outcomes(cfg, &entries, &cfg.nsp1f, |_, pct| pct.to_string())?;
    write_level_tables(&mut writer, "rq4", "nsp1f", cfg, &outcomes, &level_order)?;
    writer.manifest("rq4", cfg, entries.len(), &warnings)?;
    Ok(writer.finish(warnings))
}
