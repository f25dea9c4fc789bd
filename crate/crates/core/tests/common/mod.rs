#![allow(dead_code)]

use clusterlife_core::{ClusterSpec, CorrelationModel, NodeSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn nodes(rng: &mut ChaCha8Rng, n: usize, side: f64, equal_ratio: bool) -> Vec<NodeSpec> {
    (0..n)
        .map(|i| {
            let x = rng.gen_range(0.0..side);
            let y = rng.gen_range(0.0..side);
            let d = rng.gen_range(0.5..3.0);
            let e = if equal_ratio {
                d
            } else {
                rng.gen_range(0.5..3.0)
            };
            NodeSpec::new(i, x, y, e, d)
        })
        .collect()
}

/// Random Gaussian-field cluster; redraws until the model validates.
pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, equal_ratio: bool) -> ClusterSpec {
    loop {
        let model = CorrelationModel::GaussianField {
            sigma2: rng.gen_range(0.5..2.0),
            a: rng.gen_range(0.05..1.0),
            offset: rng.gen_range(0.0..1.0),
        };
        if let Ok(c) = ClusterSpec::new(nodes(rng, n, 4.0, equal_ratio), model) {
            return c;
        }
    }
}

pub fn bit_distance(rng: &mut ChaCha8Rng, n: usize, equal_ratio: bool) -> ClusterSpec {
    let bits = rng.gen_range(3..8);
    ClusterSpec::new(
        nodes(rng, n, 8.0, equal_ratio),
        CorrelationModel::BitDistance { n: bits },
    )
    .unwrap()
}

/// All permutations of `0..n` by recursive insertion, independent of the
/// library's lexicographic iterator.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn shannon(h: f64, x: f64) -> f64 {
    x * (2f64.powf(h / x) - 1.0)
}

/// max over the time simplex of min_k E_k / (f(h_k, t_k) d_k), by a grid of
/// `steps` per axis followed by local pattern-search refinement.
pub fn grid_max_min(loads: &[f64], e: &[f64], d: &[f64], steps: usize) -> f64 {
    let n = loads.len();
    let life = |t: &[f64]| -> f64 {
        (0..n)
            .map(|k| {
                if loads[k] == 0.0 {
                    f64::INFINITY
                } else if t[k] <= 0.0 {
                    0.0
                } else {
                    e[k] / (shannon(loads[k], t[k]) * d[k])
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (0.0, vec![1.0 / n as f64; n]);
    let mut t = vec![0.0; n];
    fn rec(
        k: usize,
        left: usize,
        steps: usize,
        t: &mut Vec<f64>,
        f: &dyn Fn(&[f64]) -> f64,
        best: &mut (f64, Vec<f64>),
    ) {
        let n = t.len();
        if k == n - 1 {
            t[k] = left as f64 / steps as f64;
            let v = f(t);
            if v > best.0 {
                *best = (v, t.clone());
            }
            return;
        }
        for j in 0..=left {
            t[k] = j as f64 / steps as f64;
            rec(k + 1, left - j, steps, t, f, best);
        }
    }
    rec(0, steps, steps, &mut t, &life, &mut best);
    // refine: move mass between pairs of coordinates with shrinking steps
    let (mut val, mut t) = best;
    let mut step = 1.0 / steps as f64;
    while step > 1e-12 {
        let mut moved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut c = t.clone();
                let s = step.min(c[j]);
                c[i] += s;
                c[j] -= s;
                let v = life(&c);
                if v > val {
                    val = v;
                    t = c;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    val
}
