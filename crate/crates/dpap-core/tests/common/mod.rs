//! Shared test oracles: small, independent reimplementations of the math the
//! library is supposed to compute, built straight from the definitions (no
//! shared code paths with the crate). Everything here favors obviousness
//! over speed.

#![allow(dead_code)]

use dpap_core::{PriorTable, SimilarityModel};
use rand::Rng;

/// Dirichlet-process size weight computed the slow way:
/// `log (k-1)! - log k`, accumulating the factorial term by term.
pub fn dp_weight_oracle(k: usize) -> f64 {
    assert!(k >= 1);
    let mut s = 0.0;
    for m in 2..k {
        s += (m as f64).ln();
    }
    s - (k as f64).ln()
}

/// Joint score of a labeling, symbol by symbol: the sum of each point's
/// similarity to its exemplar plus one size weight per cluster.
pub fn score_oracle(sim: &SimilarityModel, labels: &[usize], w: &dyn Fn(usize) -> f64) -> f64 {
    let n = sim.n();
    assert_eq!(labels.len(), n);
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

/// Every valid labeling of `n` points: choose a non-empty exemplar set, then
/// map each remaining point to one of the exemplars. Exponential; callers
/// keep `n` small.
pub fn enumerate_valid_labelings(n: usize) -> Vec<Vec<usize>> {
    assert!((1..=9).contains(&n), "enumeration is exponential; keep n in 1..=9");
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
pub fn brute_force_map(
    sim: &SimilarityModel,
    w: &dyn Fn(usize) -> f64,
) -> (Vec<usize>, f64) {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for labels in enumerate_valid_labelings(sim.n()) {
        let s = score_oracle(sim, &labels, w);
        if best.as_ref().map_or(true, |(_, bs)| s > *bs) {
            best = Some((labels, s));
        }
    }
    best.expect("at least one labeling exists")
}

/// Column-factor messages by brute force: enumerate every on/off pattern of
/// the column, score it as the factor does (zero for the empty column, a
/// size weight when the column's own row is on, impossible otherwise, plus
/// the incoming values of the other on rows), and take the normalized
/// difference between the best pattern with the recipient on and off.
pub fn mu_oracle(j: usize, inc: &[f64], w: &dyn Fn(usize) -> f64) -> Vec<f64> {
    let n = inc.len();
    assert!(n <= 20, "oracle enumerates 2^n patterns");
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
/// same arithmetic, but re-sorting the incoming values from scratch for every
/// recipient instead of reusing one shared sort.
pub fn mu_resort_reference(j: usize, inc: &[f64], table: &PriorTable) -> Vec<f64> {
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

/// All-pairs shortest paths by Floyd–Warshall over an undirected edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
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

/// Equal, or within `tol`, with matching infinities.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

/// Random incoming-message vector: uniform values with a sprinkle of
/// forbidden entries.
pub fn random_inc<R: Rng>(rng: &mut R, n: usize, neg_inf_frac: f64) -> Vec<f64> {
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

/// Random similarity matrix: finite diagonal, off-diagonal values with an
/// optional fraction of forbidden pairs.
pub fn random_sim<R: Rng>(rng: &mut R, n: usize, neg_inf_frac: f64) -> SimilarityModel {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = if i == j {
                rng.random_range(-6.0..-1.0)
            } else if rng.random::<f64>() < neg_inf_frac {
                f64::NEG_INFINITY
            } else {
                rng.random_range(-5.0..0.0)
            };
        }
    }
    SimilarityModel::from_flat(n, data).expect("construction is valid")
}
