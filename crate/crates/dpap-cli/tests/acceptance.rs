//! Acceptance gate: one test per acceptance criterion, each printing a
//! single PASS/FAIL line (run with `--show-output` to see them alongside the
//! test harness output). Every numeric claim is checked against an oracle
//! implemented here from first principles, independent of the library code.
//!
//! The last criterion documents what this repository deliberately does not
//! reproduce: published image-segmentation benchmark scores (they need the
//! original image corpus and its preprocessing) and one exact historical
//! convergence percentage (a property of a particular run). Their substance
//! is covered by the property checks in criteria 1–9.

use std::time::{Duration, Instant};

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpap_cli::ops::{run_bench, BenchOpts, BenchSummary};
use dpap_core::{
    ap_run, ap_prior, build_similarity, compose, dp_prior, expected_clusters, icm_run, log_joint,
    mu_column_messages, rand_index, sample_dataset, sample_partition, shortest_path_similarity,
    ApConfig, Assignment, EngineConfig, GenConfig, IcmConfig, IcmInit, PriorTable, SegConfig,
    SimilarityModel, SuperpixelGraph, EdgeResponses,
};

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

fn report(id: &str, pass: bool, detail: String) {
    println!("[{}] {id} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

// ---------------------------------------------------------------------------
// Oracles (independent reimplementations, favoring obviousness)
// ---------------------------------------------------------------------------

/// Cluster-size weight of the nonparametric prior, accumulated term by term.
fn dp_weight_oracle(k: usize) -> f64 {
    assert!(k >= 1);
    let mut s = 0.0;
    for m in 2..k {
        s += (m as f64).ln();
    }
    s - (k as f64).ln()
}

/// Column-factor messages by brute force: enumerate every on/off pattern of
/// the column, score it as the factor does (zero for the empty column, a
/// size weight when the column's own row is on, impossible otherwise, plus
/// the incoming values of the other on rows), and take the normalized
/// difference between the best pattern with the recipient on and off.
fn mu_oracle(j: usize, inc: &[f64], w: &dyn Fn(usize) -> f64) -> Vec<f64> {
    let n = inc.len();
    assert!(n <= 20);
    (0..n)
        .map(|recipient| {
            let mut best_on = f64::NEG_INFINITY;
            let mut best_off = f64::NEG_INFINITY;
            for mask in 0u32..(1 << n) {
                let count = mask.count_ones() as usize;
                let factor = if count == 0 {
                    0.0
                } else if mask & (1 << j) == 0 {
                    continue; // occupied column without its exemplar: impossible
                } else {
                    w(count)
                };
                let mut val = factor;
                for r in 0..n {
                    if r != recipient && mask & (1 << r) != 0 {
                        val += inc[r];
                    }
                }
                if mask & (1 << recipient) != 0 {
                    if val > best_on {
                        best_on = val;
                    }
                } else if val > best_off {
                    best_off = val;
                }
            }
            best_on - best_off
        })
        .collect()
}

/// Reference for the bitwise contract of the production column kernel: the
/// same arithmetic, but re-sorting the incoming values from scratch for
/// every recipient instead of reusing one shared sort.
fn mu_resort_reference(j: usize, inc: &[f64], table: &PriorTable) -> Vec<f64> {
    let n = inc.len();
    let mut out = vec![0.0; n];

    let mut others: Vec<usize> = (0..n).filter(|&r| r != j).collect();
    others.sort_by(|&a, &b| inc[b].total_cmp(&inc[a]));
    {
        let mut run = 0.0;
        let mut best = table.log_weight(1);
        for (idx, &row) in others.iter().enumerate() {
            run += inc[row];
            let v = run + table.log_weight(idx + 2);
            if v > best {
                best = v;
            }
        }
        out[j] = best;
    }

    for i in 0..n {
        if i == j {
            continue;
        }
        let mut rest: Vec<usize> = (0..n).filter(|&r| r != i && r != j).collect();
        rest.sort_by(|&a, &b| inc[b].total_cmp(&inc[a]));
        let mut run = 0.0;
        let mut best_on = table.log_weight(2);
        let mut best_off = table.log_weight(1);
        for (idx, &row) in rest.iter().enumerate() {
            run += inc[row];
            let on = run + table.log_weight(idx + 3);
            if on > best_on {
                best_on = on;
            }
            let off = run + table.log_weight(idx + 2);
            if off > best_off {
                best_off = off;
            }
        }
        let on_state = inc[j] + best_on;
        let off_state = (inc[j] + best_off).max(0.0);
        out[i] = if on_state == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            on_state - off_state
        };
    }

    out
}

/// Joint score of a labeling, symbol by symbol.
fn score_oracle(sim: &SimilarityModel, labels: &[usize], w: &dyn Fn(usize) -> f64) -> f64 {
    let n = sim.n();
    let mut total = 0.0;
    for (i, &c) in labels.iter().enumerate() {
        total += sim.s(i, c);
    }
    for e in 0..n {
        if labels[e] == e {
            let size = labels.iter().filter(|&&c| c == e).count();
            total += w(size);
        }
    }
    total
}

/// Every valid labeling of `n` points: a non-empty exemplar set, each
/// remaining point mapped to one of the exemplars.
fn enumerate_valid_labelings(n: usize) -> Vec<Vec<usize>> {
    assert!((1..=9).contains(&n));
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let exemplars: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let free: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) == 0).collect();
        let k = exemplars.len() as u64;
        let combos = k.pow(free.len() as u32);
        for idx in 0..combos {
            let mut labels = vec![0usize; n];
            for &e in &exemplars {
                labels[e] = e;
            }
            let mut rest = idx;
            for &p in &free {
                labels[p] = exemplars[(rest % k) as usize];
                rest /= k;
            }
            out.push(labels);
        }
    }
    out
}

/// Exhaustive maximum of `score_oracle` over all valid labelings; ties keep
/// the first labeling in enumeration order.
fn brute_force_map(sim: &SimilarityModel, w: &dyn Fn(usize) -> f64) -> (Vec<usize>, f64) {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for labels in enumerate_valid_labelings(sim.n()) {
        let s = score_oracle(sim, &labels, w);
        if best.as_ref().map_or(true, |(_, bs)| s > *bs) {
            best = Some((labels, s));
        }
    }
    best.expect("at least one labeling exists")
}

/// All-pairs shortest paths by Floyd–Warshall over an undirected edge list.
fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(i, j, w) in edges {
        if w < d[i][j] {
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

fn random_inc<R: Rng>(rng: &mut R, n: usize, neg_inf_frac: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random::<f64>() < neg_inf_frac {
                f64::NEG_INFINITY
            } else {
                rng.random_range(-5.0..5.0)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Criterion 1: the column-factor kernel agrees with exhaustive enumeration
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_column_kernel_matches_enumeration() {
    let id = "criterion 1: column kernel vs exhaustive enumeration (n = 2..=12, 500 vectors each)";
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let w = |k: usize| dp_weight_oracle(k);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for n in 2..=12usize {
        let table = dp_prior().table(n);
        for _ in 0..500 {
            let inc = random_inc(&mut rng, n, 0.05);
            let j = rng.random_range(0..n);
            let got = mu_column_messages(j, &inc, &table);
            let want = mu_oracle(j, &inc, &w);
            for i in 0..n {
                if !close(got[i], want[i], 1e-9) {
                    report(
                        id,
                        false,
                        format!("n = {n}, column {j}, recipient {i}: kernel {} vs oracle {}", got[i], want[i]),
                    );
                }
                if got[i].is_finite() && want[i].is_finite() {
                    worst = worst.max((got[i] - want[i]).abs());
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let within_budget = elapsed < Duration::from_secs(120);
    report(
        id,
        within_budget,
        format!(
            "{checked} messages checked, worst absolute gap {worst:.3e}, {:.1}s (budget 120s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: the shared-sort kernel is bitwise-faithful and quadratic
// ---------------------------------------------------------------------------

struct ColumnTimer {
    table: PriorTable,
    incs: Vec<Vec<f64>>,
}

impl ColumnTimer {
    fn new(n: usize, reps: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        ColumnTimer {
            table: dp_prior().table(n),
            incs: (0..reps).map(|_| random_inc(&mut rng, n, 0.02)).collect(),
        }
    }

    /// Seconds per column for one timed sweep over the prepared inputs.
    fn trial(&self) -> f64 {
        let n = self.incs[0].len();
        let start = Instant::now();
        let mut sink = 0.0;
        for inc in &self.incs {
            let out = mu_column_messages(0, inc, &self.table);
            sink += out[n / 2];
        }
        let t = start.elapsed().as_secs_f64() / self.incs.len() as f64;
        std::hint::black_box(sink);
        t
    }
}

#[test]
fn criterion_2_shared_sort_is_bitwise_identical_and_quadratic() {
    let id = "criterion 2: shared-sort kernel bitwise equality (1000 columns) and quadratic cost";
    // Bitwise agreement with the per-recipient re-sort reference on
    // tie-heavy inputs.
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..1000 {
        let n = rng.random_range(2..=50usize);
        let table = dp_prior().table(n);
        let inc: Vec<f64> = (0..n)
            .map(|_| {
                let roll: f64 = rng.random();
                if roll < 0.05 {
                    f64::NEG_INFINITY
                } else if roll < 0.55 {
                    // Discrete values force ties and exercise stability.
                    [-2.0, -1.0, 0.0, 1.0, 2.0][rng.random_range(0..5)]
                } else {
                    rng.random_range(-5.0..5.0)
                }
            })
            .collect();
        let j = rng.random_range(0..n);
        let fast = mu_column_messages(j, &inc, &table);
        let slow = mu_resort_reference(j, &inc, &table);
        for i in 0..n {
            if fast[i].to_bits() != slow[i].to_bits() {
                report(
                    id,
                    false,
                    format!(
                        "case {case}: n = {n}, column {j}, recipient {i}: {} vs {} differ bitwise",
                        fast[i], slow[i]
                    ),
                );
            }
        }
    }

    // Per-column cost must scale roughly quadratically from n = 100 to
    // n = 800 (one shared sort plus an O(n) walk per recipient). Trials at
    // the two sizes are interleaved and the minimum kept, so ambient load
    // from other test threads cancels out of the ratio.
    let small = ColumnTimer::new(100, 2000);
    let large = ColumnTimer::new(800, 50);
    let (mut t100, mut t800) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..7 {
        t100 = t100.min(small.trial());
        t800 = t800.min(large.trial());
    }
    let exponent = (t800 / t100).ln() / 8.0f64.ln();
    let pass = (1.8..=2.4).contains(&exponent);
    report(
        id,
        pass,
        format!(
            "1000 columns bitwise-identical; cost {:.2}us -> {:.2}us per column, exponent {exponent:.2} (need 1.8..=2.4)",
            t100 * 1e6,
            t800 * 1e6
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: solvers vs exhaustive search on small instances
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_solvers_vs_exhaustive_search() {
    let id = "criterion 3: solver quality vs exhaustive search on 200 small instances";
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let dp_w = |k: usize| dp_weight_oracle(k);
    let zero_w = |_: usize| 0.0;

    let mut grid_exact = 0usize;
    let mut ap_exact = 0usize;
    let total = 200usize;
    for case in 0..total {
        let n = rng.random_range(2..=8usize);
        let cfg = GenConfig { n, seed: 10_000 + case as u64, ..GenConfig::default() };
        let ds = sample_dataset(&cfg).unwrap();
        let sim = build_similarity(&ds).unwrap();

        // The grid engine never beats the exhaustive optimum and usually
        // attains it.
        let (_, map_dp) = brute_force_map(&sim, &dp_w);
        let grid = dpap_core::run(&sim, &EngineConfig::default());
        if grid.log_joint > map_dp + 1e-9 {
            report(
                id,
                false,
                format!("case {case}: grid score {} exceeds the optimum {map_dp}", grid.log_joint),
            );
        }
        if close(grid.log_joint, map_dp, 1e-9) {
            grid_exact += 1;
        }

        // The baseline optimizes the plain similarity sum; check it against
        // that objective's own optimum.
        let (_, map_zero) = brute_force_map(&sim, &zero_w);
        let ap = ap_run(&sim, &ApConfig::default());
        if ap.log_joint > map_zero + 1e-9 {
            report(
                id,
                false,
                format!("case {case}: baseline score {} exceeds its optimum {map_zero}", ap.log_joint),
            );
        }
        if close(ap.log_joint, map_zero, 1e-9) {
            ap_exact += 1;
        }

        // Coordinate ascent from both starts: monotone passes, never above
        // the optimum.
        for init in [IcmInit::OneGroup, IcmInit::Singletons] {
            let run = icm_run(&sim, &dp_prior(), &IcmConfig { init, max_passes: 100 }).unwrap();
            let scores = &run.diagnostics.pass_scores;
            if scores.windows(2).any(|w| w[1] < w[0]) {
                report(id, false, format!("case {case}: pass scores decreased: {scores:?}"));
            }
            if run.log_joint > map_dp + 1e-9 {
                report(
                    id,
                    false,
                    format!("case {case}: ascent score {} exceeds the optimum {map_dp}", run.log_joint),
                );
            }
        }
    }
    let grid_share = grid_exact as f64 / total as f64;
    let ap_share = ap_exact as f64 / total as f64;
    let pass = grid_share >= 0.70 && ap_share >= 0.90;
    report(
        id,
        pass,
        format!(
            "grid engine exact on {grid_exact}/{total} (need >= 70%), baseline exact on its own objective on {ap_exact}/{total} (need >= 90%); neither ever exceeded its optimum and every ascent was monotone"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criteria 4-6 share one benchmark run (100 datasets, default settings),
// executed on a single thread to honor the stated time budget.
// ---------------------------------------------------------------------------

static BENCH: Lazy<(BenchSummary, Duration)> = Lazy::new(|| {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    let opts = BenchOpts {
        // Defaults (n=100, alpha=1, dim=2, variances 1/0.5) with the
        // documented acceptance input `bench --count 100 --seed 1`.
        config: GenConfig { seed: 1, ..GenConfig::default() },
        count: 100,
        data_dir: None,
        algos: None, // full roster
        timings: false,
    };
    let start = Instant::now();
    let summary = pool.install(|| run_bench(&opts)).expect("benchmark runs");
    (summary, start.elapsed())
});

fn stat<'a>(summary: &'a BenchSummary, name: &str) -> &'a dpap_cli::ops::AlgoStats {
    summary
        .stats
        .iter()
        .find(|s| s.algorithm == name)
        .unwrap_or_else(|| panic!("no stats for {name}"))
}

#[test]
fn criterion_4_benchmark_means() {
    let id = "criterion 4: benchmark means over 100 default datasets";
    let (summary, elapsed) = &*BENCH;
    let grid = stat(summary, "dpap");
    let ascent_n = stat(summary, "icmn");
    let ascent_1 = stat(summary, "icm1");
    let within_budget = *elapsed < Duration::from_secs(30 * 60);
    let pass = grid.mean_delta_loglik >= 0.0
        && grid.mean_delta_loglik >= ascent_n.mean_delta_loglik
        && grid.mean_rand_index >= ascent_1.mean_rand_index
        && within_budget;
    report(
        id,
        pass,
        format!(
            "mean score advantage: dpap {:.3} (need >= 0 and >= icmn {:.3}); mean pair accuracy: dpap {:.4} (need >= icm1 {:.4}); single-threaded wall time {:.0}s (budget 1800s)",
            grid.mean_delta_loglik,
            ascent_n.mean_delta_loglik,
            grid.mean_rand_index,
            ascent_1.mean_rand_index,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_convergence_rate() {
    let id = "criterion 5: message-passing convergence rate on the benchmark";
    let (summary, _) = &*BENCH;
    let grid = stat(summary, "dpap");
    let pass = grid.convergence_rate >= 0.85;
    report(
        id,
        pass,
        format!(
            "largest message change fell below 1e-5 within 1000 iterations on {:.0}% of 100 datasets (need >= 85%)",
            grid.convergence_rate * 100.0
        ),
    );
}

#[test]
fn criterion_6_size_histogram_recovery() {
    let id = "criterion 6: cluster-size recovery vs the swept baseline";
    let (summary, _) = &*BENCH;
    let grid_tv = stat(summary, "dpap").histogram_tv_to_truth;
    let baseline: Vec<(&str, f64)> = summary
        .stats
        .iter()
        .filter(|s| s.algorithm.starts_with("ap(d="))
        .map(|s| (s.algorithm.as_str(), s.histogram_tv_to_truth))
        .collect();
    assert_eq!(baseline.len(), 6, "expected the full offset grid");
    let best_baseline = baseline.iter().map(|(_, tv)| *tv).fold(f64::INFINITY, f64::min);
    let pass = grid_tv < best_baseline;
    report(
        id,
        pass,
        format!(
            "pooled size-histogram distance to truth: dpap {grid_tv:.4}, best swept baseline {best_baseline:.4} (grid must be strictly closer); sweep: {baseline:?}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: partition-process draws match the expected cluster count
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_partition_mean_cluster_count() {
    let id = "criterion 7: mean cluster count over 10000 partition draws";
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let draws = 10_000usize;
    let counts: Vec<f64> = (0..draws)
        .map(|_| {
            let ids = sample_partition(100, 1.0, &mut rng);
            (ids.iter().copied().max().unwrap() + 1) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / draws as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    let expected = expected_clusters(100, 1.0);
    assert!((expected - 5.187).abs() < 1e-3, "harmonic target is about 5.187");
    let gap = (mean - expected).abs();
    let pass = gap <= 3.0 * se;
    report(
        id,
        pass,
        format!("mean {mean:.4} vs expected {expected:.4}, |gap| {gap:.4} <= 3 x SE {:.4}", 3.0 * se),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: worked metric and score examples
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_worked_examples() {
    let id = "criterion 8: worked pair-accuracy and joint-score examples";

    // {12|34} vs {13|24}: 2 of 6 pairs agree.
    let a = Assignment::validate(vec![0, 0, 2, 2]).unwrap();
    let b = Assignment::validate(vec![0, 1, 0, 1]).unwrap();
    let ri = rand_index(&a, &b).unwrap();
    if ri != 1.0 / 3.0 {
        report(id, false, format!("pair accuracy {ri} is not exactly 1/3"));
    }

    // One point at the origin (2-d, unit base variance, concentration 1):
    // the full joint including the assignment-independent constant is
    // -ln(2 pi).
    let params = dpap_core::ModelParams::spherical_gaussian(1.0, 1.0, 0.5).unwrap();
    let sim1 = SimilarityModel::from_model(&[vec![0.0, 0.0]], &params).unwrap();
    let a1 = Assignment::validate(vec![0]).unwrap();
    let got1 = log_joint(&sim1, &a1, &dp_prior(), 1.0, true);
    let want1 = -(2.0 * std::f64::consts::PI).ln();
    if !close(got1, want1, 1e-9) {
        report(id, false, format!("single-point joint {got1} vs {want1}"));
    }
    if !close(want1, -1.8378770664093453, 1e-12) {
        report(id, false, "the single-point constant shifted".into());
    }

    // Two points at the origin as two singletons: twice the single-point
    // density plus the constant ln Gamma(1) - ln Gamma(3) = -ln 2.
    let sim2 = SimilarityModel::from_model(&[vec![0.0, 0.0], vec![0.0, 0.0]], &params).unwrap();
    let a2 = Assignment::validate(vec![0, 1]).unwrap();
    let got2 = log_joint(&sim2, &a2, &dp_prior(), 1.0, true);
    let want2 = 2.0 * want1 - std::f64::consts::LN_2;
    if !close(got2, want2, 1e-9) {
        report(id, false, format!("two-singleton joint {got2} vs {want2}"));
    }
    if !close(want2, -4.368901313378636, 1e-9) {
        report(id, false, "the two-singleton anchor shifted".into());
    }

    report(
        id,
        true,
        format!("pair accuracy exactly 1/3; single-point joint {got1:.15}; two-singleton joint {got2:.15}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: similarity composer invariants
// ---------------------------------------------------------------------------

/// Random superpixel graph with dyadic (k/64) responses, so path sums are
/// exact in floating point.
fn random_dyadic_graph<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> SuperpixelGraph {
    let colors: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            [
                rng.random_range(0..=64) as f64 / 64.0,
                rng.random_range(0..=64) as f64 / 64.0,
                rng.random_range(0..=64) as f64 / 64.0,
            ]
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                let m = rng.random_range(0..=64) as f64 / 64.0;
                edges.push((i, j, EdgeResponses::Mean(m)));
            }
        }
    }
    SuperpixelGraph::new(colors, edges).unwrap()
}

#[test]
fn criterion_9_composer_invariants() {
    let id = "criterion 9: composer path oracle, symmetry, and scale invariance";
    let mut rng = ChaCha8Rng::seed_from_u64(909);

    // Path term equals the cubic all-pairs oracle exactly on 100 graphs.
    for case in 0..100 {
        let n = rng.random_range(2..=50usize);
        let g = random_dyadic_graph(&mut rng, n, 0.15);
        let got = shortest_path_similarity(&g, 1.0).unwrap();
        let edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .filter_map(|e| e.mean_response.map(|m| (e.i, e.j, m)))
            .collect();
        let dist = floyd_warshall(n, &edges);
        for i in 0..n {
            for j in 0..n {
                let want = if dist[i][j].is_finite() { -dist[i][j] } else { f64::NEG_INFINITY };
                if got.at(i, j) != want {
                    report(
                        id,
                        false,
                        format!("case {case}: path term ({i}, {j}) = {} vs oracle {want}", got.at(i, j)),
                    );
                }
            }
        }
    }

    // Composed output is exactly symmetric (bit for bit), automatic
    // strengths included.
    for _ in 0..25 {
        let n = rng.random_range(2..=30usize);
        let g = random_dyadic_graph(&mut rng, n, 0.2);
        let sim = compose(&g, &SegConfig::default()).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                if sim.s(i, j).to_bits() != sim.s(j, i).to_bits() {
                    report(
                        id,
                        false,
                        format!("composed entry ({i}, {j}) differs from its mirror bitwise"),
                    );
                }
            }
        }
    }

    // Under the flat prior the exhaustive optimum is invariant to the
    // overall scale. A symmetric matrix ties the two exemplar choices of
    // any two-point cluster exactly, and a non-dyadic scale can break such
    // a tie the other way in floating point, so the general-scale check
    // compares the partitions rather than the raw label vectors; a
    // power-of-two scale commutes with every addition bitwise, so there the
    // label vectors must match exactly.
    let flat = ap_prior();
    let flat_w = |k: usize| flat.log_weight(k);
    fn canonical_partition(labels: &[usize]) -> Vec<usize> {
        let mut ids = std::collections::HashMap::new();
        labels
            .iter()
            .map(|&c| {
                let next = ids.len();
                *ids.entry(c).or_insert(next)
            })
            .collect()
    }
    for case in 0..40 {
        let n = rng.random_range(3..=8usize);
        let colors: Vec<[f64; 3]> =
            (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.5 {
                    edges.push((i, j, EdgeResponses::Mean(rng.random())));
                }
            }
        }
        let g = SuperpixelGraph::new(colors, edges).unwrap();
        let cfg = SegConfig {
            tau_color: Some(1.0),
            tau_edge: Some(1.0),
            self_sim: -1.0,
            scale: 1.0,
        };
        let base = compose(&g, &cfg).unwrap();
        let pow2 = compose(&g, &SegConfig { scale: 4.0, ..cfg.clone() }).unwrap();
        let general = compose(&g, &SegConfig { scale: 6.5, ..cfg }).unwrap();
        let (best_base, _) = brute_force_map(&base, &flat_w);
        let (best_pow2, _) = brute_force_map(&pow2, &flat_w);
        let (best_general, _) = brute_force_map(&general, &flat_w);
        if best_base != best_pow2 {
            report(
                id,
                false,
                format!("case {case}: optimum changed under a power-of-two scale: {best_base:?} vs {best_pow2:?}"),
            );
        }
        if canonical_partition(&best_base) != canonical_partition(&best_general) {
            report(
                id,
                false,
                format!("case {case}: optimal partition changed under scaling: {best_base:?} vs {best_general:?}"),
            );
        }
    }

    report(
        id,
        true,
        "path term exact on 100 graphs; 25 composed matrices bitwise symmetric; flat-prior optimum scale-invariant on 40 instances (exact labels under a power-of-two scale, same partition under a general scale)".into(),
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: documented exclusions
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_documented_exclusions() {
    let id = "criterion 10: documented exclusions";
    report(
        id,
        true,
        "not reproduced here, by design: published image-segmentation benchmark scores (they require the original image corpus and its boundary-detector preprocessing, which are not shipped) and one exact historical convergence percentage (a property of a particular run and machine). Their substance is covered by criteria 1-9: kernel exactness, optimizer quality against exhaustive search, convergence rate, size recovery, and composer invariants"
            .into(),
    );
}
