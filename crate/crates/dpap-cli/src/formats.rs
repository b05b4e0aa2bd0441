//! File formats. Every writer here has a matching parser, and writing then
//! re-parsing any value reproduces it exactly (floats are printed with the
//! shortest round-tripping representation, `-inf` marks forbidden entries,
//! and point indices are 1-based in files while the library is 0-based).
//!
//! Formats:
//! - dataset text: a header line `n dim alpha base_variance cond_variance
//!   seed`, then `n` point lines (space-separated coordinates), then `n`
//!   ground-truth lines (the 1-based exemplar index of each point);
//! - similarity CSV: a line holding `n`, then `n` rows of `n` comma-separated
//!   log-similarities;
//! - labels text: one 1-based exemplar index per line;
//! - run result JSON: the decoded labels plus score, convergence data, and an
//!   echo of the settings sufficient to reproduce the run;
//! - superpixel graph JSON: `{n, mean_color, edges}` with 1-based endpoints;
//! - prior table text: one log-weight per line (sizes 1, 2, …; later sizes
//!   reuse the last line's weight);
//! - benchmark CSVs: per-run records, pooled cluster-size histograms, and the
//!   per-dataset accuracy scatter.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dpap_core::{
    table_prior, Assignment, BenchRecord, CardinalityPrior, Dataset, EdgeResponses, GenConfig,
    RunResult, SimilarityModel, SizeHistogram, SuperpixelGraph, TailRule,
};

use crate::error::CliError;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Read a whole file, attaching the path to any failure.
pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Write a whole file, attaching the path to any failure.
pub fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Shortest exact representation of a float; `-inf` for negative infinity.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(token: &str, what: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::data(format!("cannot parse {what} from {token:?}")))
}

fn parse_usize(token: &str, what: &str) -> Result<usize, CliError> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::data(format!("cannot parse {what} from {token:?}")))
}

/// Non-empty trimmed lines of a text file.
fn content_lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

// ---------------------------------------------------------------------------
// Input sniffing
// ---------------------------------------------------------------------------

/// What a clustering input file contains, judged by its first content line:
/// a dataset header has six fields, a similarity matrix header has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Dataset,
    Similarity,
}

pub fn detect_input(text: &str) -> Result<InputKind, CliError> {
    let first = content_lines(text)
        .first()
        .copied()
        .ok_or_else(|| CliError::data("empty input file"))?;
    match first.split_whitespace().count() {
        6 => Ok(InputKind::Dataset),
        1 => Ok(InputKind::Similarity),
        k => Err(CliError::data(format!(
            "unrecognized input: first line has {k} fields (expected 6 for a dataset, 1 for a similarity matrix)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Dataset text files
// ---------------------------------------------------------------------------

pub fn dataset_to_string(ds: &Dataset) -> String {
    let c = &ds.config;
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {} {} {} {}",
        c.n,
        c.dim,
        fmt_f64(c.alpha),
        fmt_f64(c.base_variance),
        fmt_f64(c.cond_variance),
        c.seed
    )
    .unwrap();
    for p in &ds.points {
        let coords: Vec<String> = p.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{}", coords.join(" ")).unwrap();
    }
    for &label in ds.truth.labels() {
        writeln!(out, "{}", label + 1).unwrap();
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<Dataset, CliError> {
    let lines = content_lines(text);
    let header = lines.first().ok_or_else(|| CliError::data("empty dataset file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(CliError::data(format!(
            "dataset header must have 6 fields (n dim alpha base_variance cond_variance seed), got {}",
            fields.len()
        )));
    }
    let config = GenConfig {
        n: parse_usize(fields[0], "n")?,
        dim: parse_usize(fields[1], "dim")?,
        alpha: parse_f64(fields[2], "alpha")?,
        base_variance: parse_f64(fields[3], "base_variance")?,
        cond_variance: parse_f64(fields[4], "cond_variance")?,
        seed: fields[5]
            .parse::<u64>()
            .map_err(|_| CliError::data(format!("cannot parse seed from {:?}", fields[5])))?,
    };
    config.validate()?;
    let n = config.n;
    if lines.len() != 1 + 2 * n {
        return Err(CliError::data(format!(
            "dataset file must have 1 + 2n = {} content lines for n = {n}, got {}",
            1 + 2 * n,
            lines.len()
        )));
    }
    let mut points = Vec::with_capacity(n);
    for (row, line) in lines[1..1 + n].iter().enumerate() {
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| parse_f64(t, "coordinate"))
            .collect::<Result<_, _>>()?;
        if coords.len() != config.dim {
            return Err(CliError::data(format!(
                "point {} has {} coordinates, expected {}",
                row + 1,
                coords.len(),
                config.dim
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(CliError::data(format!("point {} has a non-finite coordinate", row + 1)));
        }
        points.push(coords);
    }
    let labels = parse_label_lines(&lines[1 + n..], n)?;
    let truth = Assignment::validate(labels)
        .map_err(|e| CliError::data(format!("invalid ground-truth labels: {e}")))?;
    Ok(Dataset { config, points, truth })
}

pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    parse_dataset(&read_text(path)?)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<(), CliError> {
    write_text(path, &dataset_to_string(ds))
}

// ---------------------------------------------------------------------------
// Similarity CSV
// ---------------------------------------------------------------------------

pub fn similarity_to_csv(sim: &SimilarityModel) -> String {
    let n = sim.n();
    let mut out = String::new();
    writeln!(out, "{n}").unwrap();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_f64(sim.s(i, j))).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

pub fn parse_similarity(text: &str) -> Result<SimilarityModel, CliError> {
    let lines = content_lines(text);
    let header = lines.first().ok_or_else(|| CliError::data("empty similarity file"))?;
    let n = parse_usize(header, "matrix size")?;
    if n == 0 {
        return Err(CliError::data("similarity matrix must have at least one point"));
    }
    if lines.len() != 1 + n {
        return Err(CliError::data(format!(
            "similarity file must have {} content lines for n = {n}, got {}",
            1 + n,
            lines.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines[1..].iter().enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|t| parse_f64(t, "similarity entry"))
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(CliError::data(format!(
                "similarity row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    SimilarityModel::from_rows(rows).map_err(|e| CliError::data(e.to_string()))
}

pub fn read_similarity(path: &Path) -> Result<SimilarityModel, CliError> {
    parse_similarity(&read_text(path)?)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn write_similarity(path: &Path, sim: &SimilarityModel) -> Result<(), CliError> {
    write_text(path, &similarity_to_csv(sim))
}

// ---------------------------------------------------------------------------
// Labels text files
// ---------------------------------------------------------------------------

pub fn labels_to_string(a: &Assignment) -> String {
    let mut out = String::new();
    for &l in a.labels() {
        writeln!(out, "{}", l + 1).unwrap();
    }
    out
}

fn parse_label_lines(lines: &[&str], n: usize) -> Result<Vec<usize>, CliError> {
    let mut labels = Vec::with_capacity(lines.len());
    for (row, line) in lines.iter().enumerate() {
        let v = parse_usize(line, "label")?;
        if v < 1 || v > n {
            return Err(CliError::data(format!(
                "label {v} on line {} is outside 1..={n} (labels are 1-based)",
                row + 1
            )));
        }
        labels.push(v - 1);
    }
    Ok(labels)
}

/// Parse a labels file into a validated assignment (labels are 1-based
/// exemplar indices; each must point at a self-assigned line).
pub fn parse_labels(text: &str) -> Result<Assignment, CliError> {
    let lines = content_lines(text);
    if lines.is_empty() {
        return Err(CliError::data("empty labels file"));
    }
    let n = lines.len();
    let labels = parse_label_lines(&lines, n)?;
    Assignment::validate(labels).map_err(|e| CliError::data(format!("invalid labels: {e}")))
}

pub fn read_labels(path: &Path) -> Result<Assignment, CliError> {
    parse_labels(&read_text(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// JSON float handling (-inf must survive the round trip; JSON has no
// non-finite numbers, so they are written as strings)
// ---------------------------------------------------------------------------

mod json_f64 {
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn encode<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            Err(S::Error::custom("NaN cannot be written"))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub enum NumOrStr {
        Num(f64),
        Str(String),
    }

    pub fn decode<E: serde::de::Error>(v: NumOrStr) -> Result<f64, E> {
        match v {
            NumOrStr::Num(x) => Ok(x),
            NumOrStr::Str(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                _ => Err(E::custom(format!("not a number: {s:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        encode(*v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(NumOrStr::deserialize(d)?)
    }
}

mod json_f64_opt {
    use super::json_f64::{decode, encode, NumOrStr};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        // Only called for Some: None is skipped by the field attribute.
        encode(v.expect("skip_serializing_if guards None"), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<NumOrStr>::deserialize(d)?.map(decode).transpose()
    }
}

mod json_f64_vec {
    use super::json_f64::{decode, encode, NumOrStr};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for &x in v {
            seq.serialize_element(&WriteF64(x))?;
        }
        seq.end()
    }

    struct WriteF64(f64);
    impl serde::Serialize for WriteF64 {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            encode(self.0, s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<NumOrStr>::deserialize(d)?.into_iter().map(decode).collect()
    }
}

// ---------------------------------------------------------------------------
// Run result JSON
// ---------------------------------------------------------------------------

/// Echo of the settings a run was invoked with; enough to reproduce it.
/// Only the flags that were actually given (or resolved) appear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConfigEcho {
    pub input: String,
    pub prior: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_sim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A clustering outcome as written to disk. Labels are 1-based exemplar
/// indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResultFile {
    pub algorithm: String,
    pub labels: Vec<usize>,
    pub n_clusters: usize,
    #[serde(with = "json_f64")]
    pub log_joint: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(
        with = "json_f64_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub final_delta: Option<f64>,
    #[serde(with = "json_f64_vec", default, skip_serializing_if = "Vec::is_empty")]
    pub pass_scores: Vec<f64>,
    pub config: ConfigEcho,
}

impl RunResultFile {
    pub fn from_run(run: &RunResult, config: ConfigEcho) -> Self {
        RunResultFile {
            algorithm: run.algorithm.clone(),
            labels: run.labels.labels().iter().map(|&l| l + 1).collect(),
            n_clusters: run.labels.n_clusters(),
            log_joint: run.log_joint,
            iterations: run.iterations,
            converged: run.converged,
            final_delta: run.diagnostics.final_delta,
            pass_scores: run.diagnostics.pass_scores.clone(),
            config,
        }
    }

    /// The stored labels as a validated 0-based assignment.
    pub fn assignment(&self) -> Result<Assignment, CliError> {
        let n = self.labels.len();
        let mut zero_based = Vec::with_capacity(n);
        for (i, &l) in self.labels.iter().enumerate() {
            if l < 1 || l > n {
                return Err(CliError::data(format!(
                    "result label {l} for point {} is outside 1..={n}",
                    i + 1
                )));
            }
            zero_based.push(l - 1);
        }
        Assignment::validate(zero_based)
            .map_err(|e| CliError::data(format!("invalid result labels: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}

pub fn parse_run_result(text: &str) -> Result<RunResultFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("invalid result JSON: {e}")))
}

pub fn read_run_result(path: &Path) -> Result<RunResultFile, CliError> {
    parse_run_result(&read_text(path)?)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Superpixel graph JSON
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    mean_color: Vec<Vec<f64>>,
    #[serde(default)]
    edges: Vec<GraphEdgeFile>,
}

#[derive(Deserialize)]
struct GraphEdgeFile {
    i: usize,
    j: usize,
    #[serde(default)]
    responses: Option<Vec<f64>>,
    #[serde(default)]
    mean: Option<f64>,
}

/// Parse a superpixel graph. Node indices in the file are 1-based. Color
/// components must lie in [0, 1]; with `rescale` they must lie in [0, 255]
/// and are divided by 255.
pub fn parse_graph(text: &str, rescale: bool) -> Result<SuperpixelGraph, CliError> {
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| CliError::data(format!("invalid graph JSON: {e}")))?;
    if file.mean_color.len() != file.n {
        return Err(CliError::data(format!(
            "graph declares n = {} but has {} colors",
            file.n,
            file.mean_color.len()
        )));
    }
    let limit = if rescale { 255.0 } else { 1.0 };
    let mut colors = Vec::with_capacity(file.n);
    for (idx, c) in file.mean_color.iter().enumerate() {
        if c.len() != 3 {
            return Err(CliError::data(format!(
                "color of node {} has {} components, expected 3",
                idx + 1,
                c.len()
            )));
        }
        let mut rgb = [0.0f64; 3];
        for (k, &v) in c.iter().enumerate() {
            if !(v >= 0.0 && v <= limit) {
                return Err(CliError::data(format!(
                    "color component {v} of node {} is outside [0, {limit}]{}",
                    idx + 1,
                    if rescale { "" } else { " (pass the rescale flag for 8-bit colors)" }
                )));
            }
            rgb[k] = if rescale { v / 255.0 } else { v };
        }
        colors.push(rgb);
    }
    let mut edges = Vec::with_capacity(file.edges.len());
    for e in file.edges {
        if e.i < 1 || e.j < 1 {
            return Err(CliError::data(format!(
                "edge ({}, {}): node indices are 1-based",
                e.i, e.j
            )));
        }
        let responses = match (e.responses, e.mean) {
            (Some(_), Some(_)) => {
                return Err(CliError::data(format!(
                    "edge ({}, {}) has both responses and mean; give one",
                    e.i, e.j
                )))
            }
            (Some(r), None) => EdgeResponses::Samples(r),
            (None, Some(m)) => EdgeResponses::Mean(m),
            (None, None) => {
                return Err(CliError::data(format!(
                    "edge ({}, {}) has neither responses nor mean",
                    e.i, e.j
                )))
            }
        };
        edges.push((e.i - 1, e.j - 1, responses));
    }
    SuperpixelGraph::new(colors, edges).map_err(|e| CliError::data(e.to_string()))
}

pub fn read_graph(path: &Path, rescale: bool) -> Result<SuperpixelGraph, CliError> {
    parse_graph(&read_text(path)?, rescale)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Prior tables
// ---------------------------------------------------------------------------

/// One log-weight per line for sizes 1, 2, …; sizes past the last line reuse
/// it. `-inf` entries forbid a size.
pub fn parse_prior_table(text: &str) -> Result<CardinalityPrior, CliError> {
    let lines = content_lines(text);
    let weights: Vec<f64> = lines
        .iter()
        .map(|l| parse_f64(l, "prior weight"))
        .collect::<Result<_, _>>()?;
    table_prior(weights, TailRule::RepeatLast).map_err(|e| CliError::data(e.to_string()))
}

pub fn read_prior_table(path: &Path) -> Result<CardinalityPrior, CliError> {
    parse_prior_table(&read_text(path)?)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Benchmark CSVs
// ---------------------------------------------------------------------------

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(
        "dataset_id,algorithm,rand_index,delta_loglik,n_clusters,converged,iterations,wall_time\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.dataset_id,
            r.algorithm,
            fmt_f64(r.rand_index),
            fmt_f64(r.delta_loglik),
            r.n_clusters,
            r.converged,
            r.iterations,
            fmt_f64(r.wall_time)
        )
        .unwrap();
    }
    out
}

/// Pooled cluster-size histograms, one block per algorithm in the given
/// order, rows sorted by size within a block.
pub fn histograms_to_csv(histograms: &[(String, SizeHistogram)]) -> String {
    let mut out = String::from("algorithm,size,count\n");
    for (name, hist) in histograms {
        for (size, count) in hist.counts() {
            writeln!(out, "{name},{size},{count}").unwrap();
        }
    }
    out
}

/// Per-dataset accuracy pairs for the two headline solvers.
pub fn scatter_to_csv(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("dataset_id,ri_dpap,ri_icm1\n");
    for (id, a, b) in rows {
        writeln!(out, "{id},{},{}", fmt_f64(*a), fmt_f64(*b)).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation output
// ---------------------------------------------------------------------------

/// One evaluation row. `delta_loglik` needs a generative model, so it is
/// absent when the reference is a bare labels file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub rand_index: f64,
    pub delta_loglik: Option<f64>,
    pub n_clusters: usize,
}

impl EvalRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("eval record serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let delta = self.delta_loglik.map(fmt_f64).unwrap_or_default();
        format!(
            "rand_index,delta_loglik,n_clusters\n{},{delta},{}\n",
            fmt_f64(self.rand_index),
            self.n_clusters
        )
    }
}
