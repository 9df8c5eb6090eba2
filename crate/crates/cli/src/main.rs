//! Command-line front end for the failure-clustering pipeline.
//!
//! Each pipeline stage is its own subcommand so intermediate artifacts can
//! be inspected: score statements, build a single failure's ranking proxy,
//! print the proxy distance matrix, estimate the cluster count, cluster,
//! and evaluate against labelled root causes. `generate` writes corpora the
//! `rq1`..`rq4` experiment runners consume.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fclust::faultgen::{example_program, example_suite, label_oracle, mutation_pool, synthesize_version};
use fclust::harness::{
    evaluate_entry, load_corpus, run_rq1, run_rq2, run_rq3, run_rq4, write_corpus, CorpusEntry,
    CorpusSpec, ExperimentConfig, RqReport, SyntheticSpec,
};
use fclust::{
    distance_matrix, estimate_clusters, kmedoids, parse_selector, rank, represent, suspiciousness,
    CoverageRecord, DistanceMatrix, FailureProxy, MountainParams, Nsp1fPolicy, OracleLabels,
    RefId, SuiteSelection,
};

#[derive(Parser)]
#[command(name = "fclust", version, about = "Cluster failing tests by likely root cause")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every statement against the full suite with one or more formulas.
    Suspiciousness {
        /// Coverage matrix file.
        #[arg(long)]
        cov: PathBuf,
        /// Formula name, `groupN`, or `all`; repeatable.
        #[arg(long = "ref", default_value = "Ochiai")]
        refs: Vec<String>,
    },
    /// Build the ranking proxy for one failing test.
    Represent {
        #[arg(long)]
        cov: PathBuf,
        /// 1-based id of the failing test to represent.
        #[arg(long)]
        failed: usize,
        #[command(flatten)]
        srr: SrrArgs,
    },
    /// Print the pairwise distance matrix over all failing tests.
    Distance {
        #[arg(long)]
        cov: PathBuf,
        #[command(flatten)]
        srr: SrrArgs,
    },
    /// Estimate the number of failure clusters.
    Estimate {
        #[arg(long)]
        cov: PathBuf,
        #[command(flatten)]
        srr: SrrArgs,
        #[command(flatten)]
        mountain: MountainArgs,
    },
    /// Cluster the failing tests around medoids.
    Cluster {
        #[arg(long)]
        cov: PathBuf,
        #[command(flatten)]
        srr: SrrArgs,
        #[command(flatten)]
        mountain: MountainArgs,
    },
    /// Run the whole pipeline and compare against a root-cause oracle.
    Evaluate {
        #[arg(long)]
        cov: PathBuf,
        /// Oracle file: one `test fault` pair per line, 1-based test ids.
        #[arg(long)]
        oracle: PathBuf,
        #[command(flatten)]
        srr: SrrArgs,
        #[command(flatten)]
        mountain: MountainArgs,
    },
    /// Write a labelled multi-fault corpus.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Per-version metric tables for every formula at full sampling.
    Rq1 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Accuracy grouped by the number of injected faults.
    Rq2 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Accuracy grouped by fault type.
    Rq3 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Accuracy across successful-test sampling percentages.
    Rq4 {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Mutate the built-in median routine into labelled faulty versions.
    Micro {
        #[arg(long)]
        out: PathBuf,
        /// Fault counts to generate, e.g. `1,2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        per_level: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample synthetic coverage records with planted fault paths.
    Spectrum {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        per_level: usize,
        #[arg(long, default_value_t = 3)]
        failed_per_fault: usize,
        #[arg(long, default_value_t = 40)]
        passed: usize,
        #[arg(long, default_value_t = 45)]
        statements: usize,
        /// Probability of flipping an off-path coverage bit.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Sampling knobs shared by every stage that represents failures.
#[derive(Args)]
struct SrrArgs {
    /// Formula name or `groupN` (resolves to the group representative).
    #[arg(long = "ref", default_value = "Ochiai")]
    ref_name: String,
    /// Percentage of successful tests paired with each failure.
    #[arg(long, default_value_t = 100)]
    nsp1f: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MountainArgs {
    /// Kernel width as a multiple of the winsorized mean pairwise distance.
    #[arg(long, default_value_t = MountainParams::default().bandwidth_scale)]
    bandwidth_scale: f64,
    /// Width divisor of the potential-revision kernel.
    #[arg(long, default_value_t = MountainParams::default().revision_sharpening)]
    revision_sharpening: f64,
    /// Stop once a peak falls below this fraction of the first peak.
    #[arg(long, default_value_t = MountainParams::default().stop_ratio)]
    stop_ratio: f64,
    #[arg(long, default_value_t = MountainParams::default().winsor_low)]
    winsor_low: f64,
    #[arg(long, default_value_t = MountainParams::default().winsor_high)]
    winsor_high: f64,
}

impl MountainArgs {
    fn params(&self) -> MountainParams {
        MountainParams {
            bandwidth_scale: self.bandwidth_scale,
            revision_sharpening: self.revision_sharpening,
            stop_ratio: self.stop_ratio,
            winsor_low: self.winsor_low,
            winsor_high: self.winsor_high,
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Suspiciousness { cov, refs } => cmd_suspiciousness(&cov, &refs),
        Command::Represent { cov, failed, srr } => cmd_represent(&cov, failed, &srr),
        Command::Distance { cov, srr } => cmd_distance(&cov, &srr),
        Command::Estimate { cov, srr, mountain } => cmd_estimate(&cov, &srr, &mountain),
        Command::Cluster { cov, srr, mountain } => cmd_cluster(&cov, &srr, &mountain),
        Command::Evaluate { cov, oracle, srr, mountain } => {
            cmd_evaluate(&cov, &oracle, &srr, &mountain)
        }
        Command::Generate(GenerateCommand::Micro { out, levels, per_level, seed }) => {
            cmd_generate_micro(&out, &levels, per_level, seed)
        }
        Command::Generate(GenerateCommand::Spectrum {
            out,
            levels,
            per_level,
            failed_per_fault,
            passed,
            statements,
            noise,
            seed,
        }) => {
            let spec = SyntheticSpec {
                nof_levels: levels,
                versions_per_level: per_level,
                failed_per_fault,
                passed,
                statements,
                noise,
            };
            cmd_generate_spectrum(&out, spec, seed)
        }
        Command::Rq1 { config } => cmd_rq(&config, run_rq1),
        Command::Rq2 { config } => cmd_rq(&config, run_rq2),
        Command::Rq3 { config } => cmd_rq(&config, run_rq3),
        Command::Rq4 { config } => cmd_rq(&config, run_rq4),
    }
}

fn load_coverage(path: &Path) -> Result<CoverageRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CoverageRecord::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn resolve_ref(name: &str) -> Result<RefId> {
    parse_selector(name).ok_or_else(|| anyhow!("unknown formula or group: {name:?}"))
}

/// One ranking proxy per failing test, in coverage order.
fn build_proxies(cov: &CoverageRecord, srr: &SrrArgs) -> Result<Vec<FailureProxy>> {
    let ref_id = resolve_ref(&srr.ref_name)?;
    let policy = Nsp1fPolicy::from_percent(srr.nsp1f, srr.seed)?;
    let failed = cov.failed_ids();
    if failed.is_empty() {
        bail!("coverage has no failing tests");
    }
    let proxies = failed
        .iter()
        .map(|&t| represent(cov, t, &policy, ref_id))
        .collect::<fclust::Result<Vec<_>>>()?;
    Ok(proxies)
}

fn build_distances(cov: &CoverageRecord, srr: &SrrArgs) -> Result<(Vec<FailureProxy>, DistanceMatrix)> {
    let proxies = build_proxies(cov, srr)?;
    let d = distance_matrix(&proxies)?;
    Ok((proxies, d))
}

fn cmd_suspiciousness(cov: &Path, refs: &[String]) -> Result<()> {
    let cov = load_coverage(cov)?;
    let spectrum = fclust::compute_spectrum(&cov, &SuiteSelection::full(&cov))?;
    let mut selected: Vec<RefId> = Vec::new();
    for name in refs {
        if name.eq_ignore_ascii_case("all") {
            selected.extend(RefId::ALL);
        } else {
            selected.push(resolve_ref(name)?);
        }
    }
    for ref_id in selected {
        let scores = suspiciousness(ref_id, &spectrum);
        let ranking = rank(&scores);
        println!("# {ref_id}");
        for (j, (score, rank)) in scores.scores().iter().zip(ranking.ranks()).enumerate() {
            println!("s{} {score:.6} {rank}", j + 1);
        }
    }
    Ok(())
}

fn cmd_represent(cov: &Path, failed: usize, srr: &SrrArgs) -> Result<()> {
    if failed == 0 {
        bail!("test ids are 1-based");
    }
    let cov = load_coverage(cov)?;
    let ref_id = resolve_ref(&srr.ref_name)?;
    let policy = Nsp1fPolicy::from_percent(srr.nsp1f, srr.seed)?;
    let proxy = represent(&cov, failed - 1, &policy, ref_id)?;
    println!("failed t{failed}");
    let sampled: Vec<String> = proxy.sampled_passed_ids.iter().map(|t| format!("t{}", t + 1)).collect();
    println!("sampled {}", sampled.join(" "));
    let selection = SuiteSelection::new(&cov, vec![failed - 1], proxy.sampled_passed_ids.clone())?;
    let scores = suspiciousness(ref_id, &fclust::compute_spectrum(&cov, &selection)?);
    for (j, (score, rank)) in scores.scores().iter().zip(proxy.ranking.ranks()).enumerate() {
        println!("s{} {score:.6} {rank}", j + 1);
    }
    Ok(())
}

fn cmd_distance(cov: &Path, srr: &SrrArgs) -> Result<()> {
    let cov = load_coverage(cov)?;
    let (proxies, d) = build_distances(&cov, srr)?;
    let labels: Vec<String> = proxies.iter().map(|p| format!("t{}", p.failed_test_id + 1)).collect();
    println!("tests {}", labels.join(" "));
    for (i, label) in labels.iter().enumerate() {
        let row: Vec<String> = (0..d.n()).map(|j| format!("{:.6}", d.get(i, j))).collect();
        println!("{label} {}", row.join(" "));
    }
    Ok(())
}

fn cmd_estimate(cov: &Path, srr: &SrrArgs, mountain: &MountainArgs) -> Result<()> {
    let cov = load_coverage(cov)?;
    let (proxies, d) = build_distances(&cov, srr)?;
    let estimate = estimate_clusters(&d, &mountain.params())?;
    println!("k {}", estimate.k);
    let medoids: Vec<String> = estimate
        .initial_medoids
        .iter()
        .map(|&m| format!("t{}", proxies[m].failed_test_id + 1))
        .collect();
    println!("medoids {}", medoids.join(" "));
    for (m, peak) in &estimate.potential_trace {
        println!("peak t{} {peak:.6}", proxies[*m].failed_test_id + 1);
    }
    Ok(())
}

fn cmd_cluster(cov: &Path, srr: &SrrArgs, mountain: &MountainArgs) -> Result<()> {
    let cov = load_coverage(cov)?;
    let (proxies, d) = build_distances(&cov, srr)?;
    let estimate = estimate_clusters(&d, &mountain.params())?;
    let clustering = kmedoids(&d, &estimate)?;
    println!("k {}", clustering.k());
    for (c, &m) in clustering.medoids.iter().enumerate() {
        println!("medoid c{} t{}", c + 1, proxies[m].failed_test_id + 1);
    }
    for (i, &c) in clustering.assignment.iter().enumerate() {
        println!("t{} c{}", proxies[i].failed_test_id + 1, c + 1);
    }
    println!("converged {} iterations {}", clustering.converged, clustering.iterations);
    Ok(())
}

fn cmd_evaluate(cov: &Path, oracle: &Path, srr: &SrrArgs, mountain: &MountainArgs) -> Result<()> {
    let coverage = load_coverage(cov)?;
    let text = fs::read_to_string(oracle).with_context(|| format!("reading {}", oracle.display()))?;
    let failed = coverage.failed_ids();
    let labels = OracleLabels::parse(&text, &failed).with_context(|| format!("parsing {}", oracle.display()))?;
    let nof = labels.r();
    let entry = CorpusEntry {
        id: cov.display().to_string(),
        coverage,
        oracle: labels,
        fault_type: None,
        nof,
    };
    let ref_id = resolve_ref(&srr.ref_name)?;
    let report = evaluate_entry(&entry, ref_id, srr.nsp1f, srr.seed, &mountain.params())?;
    println!("k {}", report.k);
    println!("r {}", report.r);
    println!("category {}", report.category.as_str());
    if let Some(m) = &report.metrics {
        println!("jc {:.6}", m.jc.value);
        println!("fmi {:.6}", m.fmi.value);
        println!("pr {:.6}", m.pr.value);
        println!("rr {:.6}", m.rr.value);
        println!("votes {}", m.votes);
    }
    Ok(())
}

/// Stateless seed mixer for per-version generator streams.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cmd_generate_micro(out: &Path, levels: &[usize], per_level: usize, seed: u64) -> Result<()> {
    let base = example_program();
    let pool = mutation_pool(&base);
    let suite = example_suite();
    let mut entries = Vec::new();
    for &r in levels {
        for i in 0..per_level {
            let id = format!("r{r}-v{i:03}");
            let base_seed = mix(seed ^ mix(((r as u64) << 32) | i as u64));
            // A version that fails the whole suite leaves nothing to pair
            // failures with downstream; resample it like any other reject.
            let mut accepted = None;
            for attempt in 0..64u64 {
                let version = synthesize_version(&base, &pool, r, &suite, base_seed.wrapping_add(attempt))
                    .with_context(|| format!("generating a {r}-fault version (index {i})"))?;
                let labeled = label_oracle(&version, &suite)?;
                if labeled.coverage.passed_ids().is_empty() {
                    continue;
                }
                if attempt > 0 {
                    eprintln!("warning: {id}: resampled {attempt} all-fail version(s)");
                }
                accepted = Some((version, labeled));
                break;
            }
            let Some((version, labeled)) = accepted else {
                bail!("every candidate {r}-fault version fails the whole suite (index {i})");
            };
            println!(
                "{id} type={} failed={} dropped_multi_cause={} dropped_interaction={}",
                version.fault_type(),
                labeled.coverage.failed_ids().len(),
                labeled.dropped_multi_cause,
                labeled.dropped_interaction,
            );
            entries.push(CorpusEntry {
                id,
                coverage: labeled.coverage,
                oracle: labeled.oracle,
                fault_type: Some(version.fault_type()),
                nof: r,
            });
        }
    }
    write_corpus(out, &entries)?;
    println!("wrote {} versions to {}", entries.len(), out.display());
    Ok(())
}

fn cmd_generate_spectrum(out: &Path, spec: SyntheticSpec, seed: u64) -> Result<()> {
    let (entries, warnings) = load_corpus(&CorpusSpec::Synthetic(spec), seed)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_corpus(out, &entries)?;
    println!("wrote {} versions to {}", entries.len(), out.display());
    Ok(())
}

fn cmd_rq(config: &Path, run: impl Fn(&ExperimentConfig) -> fclust::Result<RqReport>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let report = run(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for file in &report.files {
        println!("{}", file.display());
    }
    Ok(())
}
