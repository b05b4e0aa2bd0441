//! The operations behind each subcommand, exposed as library functions so
//! integration tests and the acceptance suite can drive them in-process.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use dpap_core::{
    ap_run, ap_sweep, build_similarity, delta_loglik, dp_prior, histogram_distance, icm_run,
    rand_index, sample_dataset, ApConfig, Assignment, BenchRecord, CardinalityPrior, Dataset,
    EngineConfig, GenConfig, IcmConfig, IcmInit, RunResult, SegConfig, SimilarityModel,
    SizeHistogram, AP_D_GRID,
};

use crate::error::CliError;
use crate::formats::{
    self, detect_input, ConfigEcho, EvalRecord, InputKind, RunResultFile,
};

/// Environment variable consulted for the default output directory of
/// file-producing commands when no flag names one.
pub const OUT_DIR_ENV: &str = "DPAP_OUT_DIR";

/// Resolve an output directory: the flag wins, then the environment
/// variable, then the current directory. The directory is created.
pub fn resolve_out_dir(flag: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from("."),
        },
    };
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

/// The solvers the CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Dpap,
    Icm1,
    Icmn,
    Ap,
}

impl Algo {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "dpap" => Ok(Algo::Dpap),
            "icm1" => Ok(Algo::Icm1),
            "icmn" => Ok(Algo::Icmn),
            "ap" => Ok(Algo::Ap),
            other => Err(CliError::usage(format!(
                "unknown algorithm {other:?} (choose dpap, ap, icm1, or icmn)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algo::Dpap => "dpap",
            Algo::Icm1 => "icm1",
            Algo::Icmn => "icmn",
            Algo::Ap => "ap",
        }
    }
}

/// Parse a comma-separated roster restriction, preserving canonical order
/// and rejecting duplicates.
pub fn parse_algo_list(list: &str) -> Result<Vec<Algo>, CliError> {
    let mut chosen = Vec::new();
    for token in list.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let a = Algo::parse(token)?;
        if chosen.contains(&a) {
            return Err(CliError::usage(format!("algorithm {token:?} listed twice")));
        }
        chosen.push(a);
    }
    if chosen.is_empty() {
        return Err(CliError::usage("empty algorithm list"));
    }
    // Canonical roster order, independent of how the user listed them.
    let mut out = Vec::new();
    for a in [Algo::Dpap, Algo::Icm1, Algo::Icmn, Algo::Ap] {
        if chosen.contains(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenOpts {
    pub config: GenConfig,
    pub count: usize,
    pub out_dir: Option<PathBuf>,
}

/// Generate `count` datasets with seeds `seed`, `seed + 1`, … and write each
/// to `dataset_<seed>.txt` in the output directory. Returns the paths
/// written. `count = 0` writes nothing and succeeds.
pub fn run_gen(opts: &GenOpts) -> Result<Vec<PathBuf>, CliError> {
    opts.config.validate()?;
    let dir = resolve_out_dir(opts.out_dir.as_deref())?;
    let mut written = Vec::with_capacity(opts.count);
    for i in 0..opts.count {
        let seed = opts.config.seed.wrapping_add(i as u64);
        let ds = sample_dataset(&GenConfig { seed, ..opts.config.clone() })?;
        let path = dir.join(format!("dataset_{seed}.txt"));
        formats::write_dataset(&path, &ds)?;
        written.push(path);
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ClusterOpts {
    pub algo: Algo,
    pub input: PathBuf,
    pub alpha: Option<f64>,
    pub damping: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub prior: Option<String>,
    pub self_sim: Option<f64>,
    pub scale: Option<f64>,
    pub d: Option<f64>,
    pub seed: Option<u64>,
}

fn check_cluster_flags(opts: &ClusterOpts) -> Result<(), CliError> {
    if opts.d.is_some() && opts.algo != Algo::Ap {
        return Err(CliError::usage(format!(
            "--d sets the affinity-propagation preference offset and only applies to ap, not {}",
            opts.algo.name()
        )));
    }
    if opts.algo == Algo::Ap && opts.prior.is_some() {
        return Err(CliError::usage(
            "--prior does not apply to ap: it optimizes the plain similarity sum; steer its \
             cluster count with --d instead",
        ));
    }
    if let Some(l) = opts.damping {
        if !(0.0..1.0).contains(&l) {
            return Err(CliError::usage(format!("--damping must lie in [0, 1), got {l}")));
        }
    }
    if let Some(t) = opts.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::usage(format!("--tol must be positive, got {t}")));
        }
    }
    if let Some(m) = opts.max_iters {
        if m == 0 {
            return Err(CliError::usage("--max-iters must be at least 1"));
        }
    }
    if let Some(a) = opts.alpha {
        if !(a.is_finite() && a > 0.0) {
            return Err(CliError::usage(format!("--alpha must be positive, got {a}")));
        }
    }
    if let Some(p) = opts.self_sim {
        if !p.is_finite() {
            return Err(CliError::usage(format!("--self-sim must be finite, got {p}")));
        }
    }
    if let Some(c) = opts.scale {
        if !(c.is_finite() && c > 0.0) {
            return Err(CliError::usage(format!("--scale must be positive, got {c}")));
        }
    }
    if let Some(d) = opts.d {
        if !d.is_finite() {
            return Err(CliError::usage(format!("--d must be finite, got {d}")));
        }
    }
    Ok(())
}

fn resolve_prior(arg: Option<&str>) -> Result<CardinalityPrior, CliError> {
    match arg {
        None | Some("dp") => Ok(dp_prior()),
        Some("ap") => Ok(dpap_core::ap_prior()),
        Some(other) => {
            if let Some(path) = other.strip_prefix("table:") {
                formats::read_prior_table(Path::new(path))
            } else {
                Err(CliError::usage(format!(
                    "unknown prior {other:?} (choose dp, ap, or table:FILE)"
                )))
            }
        }
    }
}

/// Load a clustering input (dataset or similarity CSV, sniffed from the
/// first line) and build the matrix to solve on.
fn load_cluster_input(opts: &ClusterOpts) -> Result<SimilarityModel, CliError> {
    let text = formats::read_text(&opts.input)?;
    let kind = detect_input(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", opts.input.display())))?;
    let mut sim = match kind {
        InputKind::Dataset => {
            let mut ds = formats::parse_dataset(&text)
                .map_err(|e| CliError::data(format!("{}: {e}", opts.input.display())))?;
            if let Some(a) = opts.alpha {
                ds.config.alpha = a;
            }
            build_similarity(&ds)?
        }
        InputKind::Similarity => {
            if opts.alpha.is_some() {
                return Err(CliError::usage(
                    "--alpha shapes the model-derived matrix and requires a dataset input, \
                     not a similarity matrix",
                ));
            }
            formats::parse_similarity(&text)
                .map_err(|e| CliError::data(format!("{}: {e}", opts.input.display())))?
        }
    };
    if let Some(p) = opts.self_sim {
        sim = sim.with_uniform_diagonal(p);
    }
    if let Some(c) = opts.scale {
        sim = sim.scaled(c);
    }
    Ok(sim)
}

fn echo_config(opts: &ClusterOpts) -> ConfigEcho {
    ConfigEcho {
        input: opts.input.display().to_string(),
        prior: match opts.algo {
            Algo::Ap => "ap".into(),
            _ => opts.prior.clone().unwrap_or_else(|| "dp".into()),
        },
        alpha: opts.alpha,
        damping: opts.damping,
        tol: opts.tol,
        max_iters: opts.max_iters,
        d: opts.d,
        self_sim: opts.self_sim,
        scale: opts.scale,
        seed: opts.seed,
    }
}

/// Run one solver on one input file. The seed is recorded in the echo for
/// provenance only: every solver here is deterministic.
pub fn run_cluster(opts: &ClusterOpts) -> Result<RunResultFile, CliError> {
    check_cluster_flags(opts)?;
    let sim = load_cluster_input(opts)?;
    let run: RunResult = match opts.algo {
        Algo::Dpap => {
            let prior = resolve_prior(opts.prior.as_deref())?;
            let cfg = EngineConfig {
                damping_mu: opts.damping.unwrap_or(0.7),
                tol: opts.tol.unwrap_or(1e-5),
                max_iters: opts.max_iters.unwrap_or(1000),
                prior,
                ..EngineConfig::default()
            };
            dpap_core::run(&sim, &cfg)
        }
        Algo::Icm1 | Algo::Icmn => {
            if opts.damping.is_some() || opts.tol.is_some() {
                return Err(CliError::usage(
                    "--damping and --tol tune message passing and do not apply to icm1/icmn \
                     (use --max-iters to cap improvement passes)",
                ));
            }
            let prior = resolve_prior(opts.prior.as_deref())?;
            let init = if opts.algo == Algo::Icm1 { IcmInit::OneGroup } else { IcmInit::Singletons };
            let cfg = IcmConfig { init, max_passes: opts.max_iters.unwrap_or(100) };
            icm_run(&sim, &prior, &cfg)?
        }
        Algo::Ap => {
            let cfg = ApConfig {
                d: opts.d.unwrap_or(0.0),
                damping: opts.damping.unwrap_or(0.8),
                tol: opts.tol.unwrap_or(1e-5),
                max_iters: opts.max_iters.unwrap_or(1000),
            };
            ap_run(&sim, &cfg)
        }
    };
    Ok(RunResultFile::from_run(&run, echo_config(opts)))
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

/// What an evaluation reference file turned out to hold.
enum Reference {
    /// A full dataset: ground truth plus the model to score against.
    Dataset(Box<Dataset>),
    /// A bare assignment (labels file or a previous result).
    Labels(Assignment),
}

fn load_result_labels(path: &Path) -> Result<Assignment, CliError> {
    let text = formats::read_text(path)?;
    if text.trim_start().starts_with('{') {
        formats::parse_run_result(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
            .assignment()
    } else {
        formats::parse_labels(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    }
}

fn load_reference(path: &Path) -> Result<Reference, CliError> {
    let text = formats::read_text(path)?;
    if text.trim_start().starts_with('{') {
        let a = formats::parse_run_result(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
            .assignment()?;
        return Ok(Reference::Labels(a));
    }
    match detect_input(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))? {
        InputKind::Dataset => {
            let ds = formats::parse_dataset(&text)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            Ok(Reference::Dataset(Box::new(ds)))
        }
        InputKind::Similarity => formats::parse_labels(&text)
            .map(Reference::Labels)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display()))),
    }
}

/// Score a clustering (result JSON or labels file) against a reference
/// (dataset with ground truth, labels file, or another result). The score
/// advantage over the reference is reported only when the reference is a
/// dataset, because it needs the generative model.
pub fn run_eval(result: &Path, reference: &Path) -> Result<EvalRecord, CliError> {
    let found = load_result_labels(result)?;
    let reference = load_reference(reference)?;
    let (truth, delta) = match reference {
        Reference::Dataset(ds) => {
            if ds.truth.n() != found.n() {
                return Err(CliError::data(format!(
                    "result has {} points but the reference has {}",
                    found.n(),
                    ds.truth.n()
                )));
            }
            let sim = build_similarity(&ds)?;
            let delta = delta_loglik(&sim, &found, &ds.truth, &dp_prior())?;
            (ds.truth.clone(), Some(delta))
        }
        Reference::Labels(a) => {
            if a.n() != found.n() {
                return Err(CliError::data(format!(
                    "result has {} points but the reference has {}",
                    found.n(),
                    a.n()
                )));
            }
            (a, None)
        }
    };
    Ok(EvalRecord {
        rand_index: rand_index(&found, &truth)?,
        delta_loglik: delta,
        n_clusters: found.n_clusters(),
    })
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BenchOpts {
    /// Generator settings; `seed` is the base, dataset `i` uses `seed + i`.
    pub config: GenConfig,
    /// How many datasets to generate (ignored when `data_dir` is given).
    pub count: usize,
    /// Load `dataset_*.txt` from here instead of generating.
    pub data_dir: Option<PathBuf>,
    /// Roster restriction; `None` runs everything.
    pub algos: Option<Vec<Algo>>,
    /// Measure wall time per run. Off by default so reruns are byte-identical.
    pub timings: bool,
}

impl Default for BenchOpts {
    fn default() -> Self {
        BenchOpts {
            config: GenConfig::default(),
            count: 100,
            data_dir: None,
            algos: None,
            timings: false,
        }
    }
}

/// Per-algorithm aggregate over a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoStats {
    pub algorithm: String,
    pub mean_rand_index: f64,
    pub mean_delta_loglik: f64,
    /// Fraction of datasets on which the stopping rule fired in budget.
    pub convergence_rate: f64,
    /// Total-variation distance between this solver's pooled cluster-size
    /// histogram and the ground truth's.
    pub histogram_tv_to_truth: f64,
}

/// Everything a benchmark run produces, before any files are written.
#[derive(Debug, Clone)]
pub struct BenchSummary {
    /// One record per (dataset, solver), datasets in order.
    pub records: Vec<BenchRecord>,
    /// Pooled size histograms: ground truth first, then the roster in order.
    pub histograms: Vec<(String, SizeHistogram)>,
    /// Per-solver aggregates, roster order.
    pub stats: Vec<AlgoStats>,
    /// Per-dataset accuracy pairs (dataset id, dpap, icm1); empty unless
    /// both solvers ran.
    pub scatter: Vec<(usize, f64, f64)>,
}

struct DatasetOutcome {
    records: Vec<BenchRecord>,
    truth: Assignment,
    /// Solver name -> decoded assignment, roster order.
    found: Vec<(String, Assignment)>,
}

fn bench_one(id: usize, ds: &Dataset, roster: &[Algo], timings: bool) -> Result<DatasetOutcome, CliError> {
    let sim = build_similarity(ds)?;
    let prior = dp_prior();
    let mut records = Vec::new();
    let mut found = Vec::new();
    let mut push = |run: RunResult, elapsed: f64| -> Result<(), CliError> {
        records.push(BenchRecord {
            dataset_id: id,
            algorithm: run.algorithm.clone(),
            rand_index: rand_index(&run.labels, &ds.truth)?,
            delta_loglik: delta_loglik(&sim, &run.labels, &ds.truth, &prior)?,
            n_clusters: run.labels.n_clusters(),
            converged: run.converged,
            iterations: run.iterations,
            wall_time: elapsed,
        });
        found.push((run.algorithm, run.labels));
        Ok(())
    };
    let clock = |start: Instant| if timings { start.elapsed().as_secs_f64() } else { 0.0 };
    for algo in roster {
        match algo {
            Algo::Dpap => {
                let start = Instant::now();
                let run = dpap_core::run(&sim, &EngineConfig::default());
                push(run, clock(start))?;
            }
            Algo::Icm1 | Algo::Icmn => {
                let init =
                    if *algo == Algo::Icm1 { IcmInit::OneGroup } else { IcmInit::Singletons };
                let start = Instant::now();
                let run = icm_run(&sim, &prior, &IcmConfig { init, max_passes: 100 })?;
                push(run, clock(start))?;
            }
            Algo::Ap => {
                // One run per preference offset in the sweep grid.
                let start = Instant::now();
                let runs = ap_sweep(&sim, &AP_D_GRID, &ApConfig::default());
                let elapsed = clock(start) / AP_D_GRID.len() as f64;
                for run in runs {
                    push(run, elapsed)?;
                }
            }
        }
    }
    Ok(DatasetOutcome { records, truth: ds.truth.clone(), found })
}

/// Datasets for a benchmark: generated from consecutive seeds, or loaded
/// from `dataset_*.txt` files (sorted by file name) when a directory is
/// given.
fn bench_datasets(opts: &BenchOpts) -> Result<Vec<Dataset>, CliError> {
    if let Some(dir) = &opts.data_dir {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|f| f.to_str())
                    .is_some_and(|f| f.starts_with("dataset_") && f.ends_with(".txt"))
            })
            .collect();
        if paths.is_empty() {
            return Err(CliError::data(format!(
                "{}: no dataset_*.txt files found",
                dir.display()
            )));
        }
        paths.sort();
        paths.iter().map(|p| formats::read_dataset(p)).collect()
    } else {
        opts.config.validate()?;
        (0..opts.count)
            .map(|i| {
                let seed = opts.config.seed.wrapping_add(i as u64);
                sample_dataset(&GenConfig { seed, ..opts.config.clone() })
                    .map_err(CliError::from)
            })
            .collect()
    }
}

/// Run the benchmark roster over every dataset (datasets in parallel, each
/// fully deterministic from its seed) and aggregate in dataset order, so the
/// output is independent of scheduling.
pub fn run_bench(opts: &BenchOpts) -> Result<BenchSummary, CliError> {
    let roster = match &opts.algos {
        Some(list) if !list.is_empty() => list.clone(),
        _ => vec![Algo::Dpap, Algo::Icm1, Algo::Icmn, Algo::Ap],
    };
    let datasets = bench_datasets(opts)?;

    let outcomes: Vec<DatasetOutcome> = datasets
        .par_iter()
        .enumerate()
        .map(|(id, ds)| bench_one(id, ds, &roster, opts.timings))
        .collect::<Result<_, _>>()?;

    // Aggregate sequentially in dataset order.
    let mut records: Vec<BenchRecord> = Vec::new();
    let mut truth_hist = SizeHistogram::new();
    let mut name_order: Vec<String> = Vec::new();
    let mut hist_by_name: std::collections::BTreeMap<String, SizeHistogram> = Default::default();
    let mut scatter = Vec::new();
    for outcome in outcomes {
        truth_hist.add(&outcome.truth);
        for (name, assignment) in &outcome.found {
            if !name_order.contains(name) {
                name_order.push(name.clone());
            }
            hist_by_name.entry(name.clone()).or_default().add(assignment);
        }
        let mut dpap_ri = None;
        let mut icm1_ri = None;
        for r in &outcome.records {
            match r.algorithm.as_str() {
                "dpap" => dpap_ri = Some(r.rand_index),
                "icm1" => icm1_ri = Some(r.rand_index),
                _ => {}
            }
        }
        if let (Some(a), Some(b)) = (dpap_ri, icm1_ri) {
            scatter.push((outcome.records[0].dataset_id, a, b));
        }
        records.extend(outcome.records);
    }

    let mut histograms = vec![("truth".to_string(), truth_hist.clone())];
    let mut stats = Vec::new();
    for name in &name_order {
        let hist = hist_by_name.get(name).expect("histogram recorded per name").clone();
        let recs: Vec<&BenchRecord> =
            records.iter().filter(|r| &r.algorithm == name).collect();
        let k = recs.len() as f64;
        stats.push(AlgoStats {
            algorithm: name.clone(),
            mean_rand_index: recs.iter().map(|r| r.rand_index).sum::<f64>() / k,
            mean_delta_loglik: recs.iter().map(|r| r.delta_loglik).sum::<f64>() / k,
            convergence_rate: recs.iter().filter(|r| r.converged).count() as f64 / k,
            histogram_tv_to_truth: histogram_distance(&hist, &truth_hist)?,
        });
        histograms.push((name.clone(), hist));
    }

    Ok(BenchSummary { records, histograms, stats, scatter })
}

/// File names `write_bench_outputs` produces in the output directory.
pub const BENCH_RECORDS_FILE: &str = "records.csv";
pub const BENCH_HISTOGRAMS_FILE: &str = "histograms.csv";
pub const BENCH_SCATTER_FILE: &str = "scatter.csv";

/// Write the benchmark CSVs; the scatter file appears only when both
/// headline solvers ran. Returns the paths written.
pub fn write_bench_outputs(
    summary: &BenchSummary,
    out_dir: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = resolve_out_dir(out_dir)?;
    let mut written = Vec::new();
    let records = dir.join(BENCH_RECORDS_FILE);
    formats::write_text(&records, &formats::records_to_csv(&summary.records))?;
    written.push(records);
    let histograms = dir.join(BENCH_HISTOGRAMS_FILE);
    formats::write_text(&histograms, &formats::histograms_to_csv(&summary.histograms))?;
    written.push(histograms);
    if !summary.scatter.is_empty() {
        let scatter = dir.join(BENCH_SCATTER_FILE);
        formats::write_text(&scatter, &formats::scatter_to_csv(&summary.scatter))?;
        written.push(scatter);
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// segsim
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SegsimOpts {
    pub graph: PathBuf,
    pub tau_color: Option<f64>,
    pub tau_edge: Option<f64>,
    pub self_sim: Option<f64>,
    pub scale: Option<f64>,
    /// Accept 8-bit color components and divide them by 255.
    pub rescale: bool,
}

/// Compose a similarity matrix from a superpixel graph file.
pub fn run_segsim(opts: &SegsimOpts) -> Result<SimilarityModel, CliError> {
    for (flag, v) in [("--tau-color", opts.tau_color), ("--tau-edge", opts.tau_edge)] {
        if let Some(t) = v {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::usage(format!("{flag} must be positive, got {t}")));
            }
        }
    }
    if let Some(p) = opts.self_sim {
        if !p.is_finite() {
            return Err(CliError::usage(format!("--self-sim must be finite, got {p}")));
        }
    }
    if let Some(c) = opts.scale {
        if !(c.is_finite() && c > 0.0) {
            return Err(CliError::usage(format!("--scale must be positive, got {c}")));
        }
    }
    let graph = formats::read_graph(&opts.graph, opts.rescale)?;
    let cfg = SegConfig {
        tau_color: opts.tau_color,
        tau_edge: opts.tau_edge,
        self_sim: opts.self_sim.unwrap_or(0.0),
        scale: opts.scale.unwrap_or(1.0),
    };
    dpap_core::compose(&graph, &cfg).map_err(CliError::from)
}
