//! Energy-space view of scheduling.
//!
//! Every schedule with every time allocation is a point in the first orthant
//! of R^N (per-slot energy of each node). Varying the allocation traces a
//! convex hypersurface per schedule; under SRRA each schedule is a single
//! point. Cooperation reaches the convex hull of all of them.
//!
//! Points are compared against the line on which all nodes die together,
//! `e_1/E_1 = ... = e_N/E_N`; with equal batteries this is the equal energy
//! diagonal.

use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::equalize;
use crate::dynamic_sched::{column_with_times, TIME_FLOOR};
use crate::energy::EnergyMode;
use crate::error::{Error, Result};
use crate::model::ClusterSpec;
use crate::perm;
use crate::static_sched::evaluate_schedule;

const MAX_SURFACE_POINTS: usize = 1_000_000;
const MAX_SUBSETS: u64 = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPoint {
    /// Per-slot energy indexed by node id.
    pub energy: Vec<f64>,
    pub order: Vec<usize>,
    /// Time per polled position; `None` for SRRA points.
    pub times: Option<Vec<f64>>,
}

impl EnergyPoint {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.energy.iter().map(|e| e * e).sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    /// Some weight is zero: the optimum lies on the boundary of the simplex
    /// (a single point when only one weight is positive).
    pub on_boundary: bool,
}

impl WeightVector {
    pub fn combine(&self, points: &[EnergyPoint]) -> Vec<f64> {
        combine(points, &self.weights)
    }
}

fn combine(points: &[EnergyPoint], weights: &[f64]) -> Vec<f64> {
    let n = points.first().map_or(0, |p| p.energy.len());
    let mut out = vec![0.0; n];
    for (p, &w) in points.iter().zip(weights) {
        for (o, &e) in out.iter_mut().zip(&p.energy) {
            *o += w * e;
        }
    }
    out
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Energy points of one schedule over a lattice of time allocations:
/// `t_k = eps + (1 - N eps) j_k / grid` for all `j` with `sum j_k = grid`.
pub fn surface_sample(
    order: &[usize],
    cluster: &ClusterSpec,
    grid_density: usize,
) -> Result<Vec<EnergyPoint>> {
    let n = cluster.len();
    if grid_density == 0 {
        return Err(Error::InvalidParameter("grid density must be >= 1"));
    }
    let count = binomial((grid_density + n - 1) as u64, (n - 1) as u64);
    if count > MAX_SURFACE_POINTS as u64 {
        return Err(Error::TooLarge {
            what: "surface sample",
            size: count as usize,
            limit: MAX_SURFACE_POINTS,
        });
    }
    let mut lattice = Vec::new();
    compositions(grid_density, n, &mut Vec::new(), &mut lattice);
    let free = 1.0 - n as f64 * TIME_FLOOR;
    lattice
        .iter()
        .map(|js| {
            let times: Vec<f64> = js
                .iter()
                .map(|&j| TIME_FLOOR + free * j as f64 / grid_density as f64)
                .collect();
            let col = column_with_times(cluster, order, &times)?;
            Ok(EnergyPoint {
                energy: col.energy,
                order: order.to_vec(),
                times: col.times,
            })
        })
        .collect()
}

/// The `N!` SRRA points, one per schedule, in lexicographic order.
pub fn srra_points(cluster: &ClusterSpec, mode: EnergyMode) -> Result<Vec<EnergyPoint>> {
    if !mode.is_srra() {
        return Err(Error::WrongModel("SRRA points need the SRRA energy mode"));
    }
    perm::all(cluster.len())
        .into_iter()
        .map(|order| {
            let r = evaluate_schedule(&order, cluster, mode)?;
            Ok(EnergyPoint {
                energy: r.energy_by_node(cluster, mode),
                order,
                times: None,
            })
        })
        .collect()
}

/// Ratio of the smallest to the largest battery-normalized coordinate; one
/// on the line where all nodes die together.
pub fn balance_ratio(point: &EnergyPoint, energies: &[f64]) -> f64 {
    let norm: Vec<f64> = point
        .energy
        .iter()
        .zip(energies)
        .map(|(e, b)| e / b)
        .collect();
    let lo = norm.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norm.iter().copied().fold(0.0, f64::max);
    if hi > 0.0 {
        lo / hi
    } else {
        1.0
    }
}

/// Index of the point closest to the equal-lifetime line by
/// [`balance_ratio`]; ties keep the earliest point.
pub fn most_balanced(points: &[EnergyPoint], energies: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let r = balance_ratio(p, energies);
        if best.map_or(true, |(_, b)| r > b + 1e-12) {
            best = Some((i, r));
        }
    }
    best.map(|(i, _)| i)
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weights of the convex combination of `points` closest to the origin.
///
/// Wolfe's minimum-norm-point method: add the point most opposed to the
/// current iterate, move to the affine minimizer of the active set, and
/// back off to the simplex boundary whenever that minimizer leaves it.
pub fn min_norm_weights(points: &[EnergyPoint]) -> Result<WeightVector> {
    let m = points.len();
    if m == 0 {
        return Err(Error::InvalidParameter("no points"));
    }
    let p: Vec<&[f64]> = points.iter().map(|q| q.energy.as_slice()).collect();
    let scale = p
        .iter()
        .map(|q| dot(q, q))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;

    let first = (0..m)
        .min_by(|&a, &b| dot(p[a], p[a]).total_cmp(&dot(p[b], p[b])))
        .expect("non-empty");
    let mut active: Vec<usize> = vec![first];
    let mut lambda: Vec<f64> = vec![1.0];
    let point_of = |active: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; p[0].len()];
        for (&i, &l) in active.iter().zip(lambda) {
            for (xv, &pv) in x.iter_mut().zip(p[i]) {
                *xv += l * pv;
            }
        }
        x
    };
    let mut x = point_of(&active, &lambda);

    for _ in 0..10_000 {
        let xx = dot(&x, &x);
        let (j, best) = (0..m)
            .map(|j| (j, dot(&x, p[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if best >= xx - tol || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        loop {
            let k = active.len();
            // [G 1; 1^T 0] [mu; nu] = [0; 1]
            let mut a = vec![vec![0.0; k + 1]; k + 1];
            for r in 0..k {
                for c in 0..k {
                    a[r][c] = dot(p[active[r]], p[active[c]]);
                }
                a[r][k] = 1.0;
                a[k][r] = 1.0;
            }
            let mut rhs = vec![0.0; k + 1];
            rhs[k] = 1.0;
            let Some(sol) = solve_dense(a, rhs) else {
                // affinely dependent active set: drop the newest point
                active.pop();
                lambda.pop();
                let sum: f64 = lambda.iter().sum();
                lambda.iter_mut().for_each(|l| *l /= sum);
                break;
            };
            let mu = &sol[..k];
            if mu.iter().all(|&v| v > 1e-15) {
                lambda = mu.to_vec();
                break;
            }
            let mut theta = 1.0f64;
            for (&l, &u) in lambda.iter().zip(mu) {
                if u <= 1e-15 && l - u > 0.0 {
                    theta = theta.min(l / (l - u));
                }
            }
            for (l, &u) in lambda.iter_mut().zip(mu) {
                *l += theta * (u - *l);
            }
            let mut keep_a = Vec::with_capacity(k);
            let mut keep_l = Vec::with_capacity(k);
            for (&i, &l) in active.iter().zip(&lambda) {
                if l > 1e-15 {
                    keep_a.push(i);
                    keep_l.push(l);
                }
            }
            active = keep_a;
            let sum: f64 = keep_l.iter().sum();
            lambda = keep_l.iter().map(|l| l / sum).collect();
            if active.len() <= 1 {
                break;
            }
        }
        x = point_of(&active, &lambda);
    }

    let mut weights = vec![0.0; m];
    for (&i, &l) in active.iter().zip(&lambda) {
        weights[i] = l;
    }
    let on_boundary = weights.iter().any(|&w| w == 0.0);
    Ok(WeightVector {
        weights,
        on_boundary,
    })
}

/// Lifetime of operating at the convex combination `weights` of `points`:
/// `min_i E_i / (sum_j r_j p_j)_i`, skipping zero coordinates.
pub fn lifetime_from_weights(
    points: &[EnergyPoint],
    weights: &[f64],
    energies: &[f64],
) -> Result<f64> {
    if points.len() != weights.len() || points.is_empty() {
        return Err(Error::InvalidParameter("one weight per point expected"));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("weights must lie on the simplex"));
    }
    let comb = combine(points, weights);
    if comb.len() != energies.len() {
        return Err(Error::InvalidParameter(
            "point dimension differs from node count",
        ));
    }
    let mut life = f64::INFINITY;
    for (&c, &e) in comb.iter().zip(energies) {
        if c > 0.0 {
            life = life.min(e / c);
        }
    }
    if life.is_infinite() {
        return Err(Error::UnboundedLifetime);
    }
    Ok(life)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetLifetime {
    pub lifetime: f64,
    /// Indices into the input points.
    pub subset: Vec<usize>,
    pub weights: Vec<f64>,
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `L_m`: best min-norm lifetime over all `m`-subsets of `points`.
pub fn best_over_subsets(
    points: &[EnergyPoint],
    energies: &[f64],
    m: usize,
) -> Result<SubsetLifetime> {
    let n = points.len();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter("subset size must be in 1..=points"));
    }
    let count = binomial(n as u64, m as u64);
    if count > MAX_SUBSETS {
        return Err(Error::TooLarge {
            what: "point subsets",
            size: count as usize,
            limit: MAX_SUBSETS as usize,
        });
    }
    let mut combo: Vec<usize> = (0..m).collect();
    let mut best: Option<SubsetLifetime> = None;
    loop {
        let chosen: Vec<EnergyPoint> = combo.iter().map(|&i| points[i].clone()).collect();
        let w = min_norm_weights(&chosen)?;
        let life = lifetime_from_weights(&chosen, &w.weights, energies)?;
        if best.as_ref().map_or(true, |b| life > b.lifetime) {
            best = Some(SubsetLifetime {
                lifetime: life,
                subset: combo.clone(),
                weights: w.weights,
            });
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    Ok(best.expect("at least one subset"))
}

/// `L_m` for every `m` and the overall maximum over `m`.
pub fn best_overall(points: &[EnergyPoint], energies: &[f64]) -> Result<(f64, Vec<f64>)> {
    let per_m = (1..=points.len())
        .map(|m| best_over_subsets(points, energies, m).map(|s| s.lifetime))
        .collect::<Result<Vec<f64>>>()?;
    let overall = per_m.iter().copied().fold(0.0, f64::max);
    Ok((overall, per_m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub order: Vec<usize>,
    /// Time of the first polled node where the curve meets the line.
    pub t: f64,
    pub point: [f64; 2],
    pub lifetime: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub crossings: [Crossing; 2],
    /// Index of the crossing nearer the origin along the line, which is the
    /// best static schedule.
    pub winner: usize,
}

fn crossing(cluster: &ClusterSpec, order: &[usize]) -> Result<Crossing> {
    let schedule = cluster.schedule(order)?;
    if schedule.loads.iter().any(|&h| h <= 0.0) {
        return Err(Error::InvalidParameter("both nodes must transmit"));
    }
    let energies = cluster.energies();
    // normalized consumption gap; strictly decreasing in t
    let gap = |t: f64| -> Result<f64> {
        let col = column_with_times(cluster, order, &[t, 1.0 - t])?;
        let a = order[0];
        let b = order[1];
        Ok(col.energy[a] / energies[a] - col.energy[b] / energies[b])
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let col = column_with_times(cluster, order, &[t, 1.0 - t])?;
    let point = [col.energy[0], col.energy[1]];
    let lifetime = (energies[0] / point[0]).min(energies[1] / point[1]);
    Ok(Crossing {
        order: order.to_vec(),
        t,
        point,
        lifetime,
        norm: libm::hypot(point[0], point[1]),
    })
}

/// Where each two-node schedule curve meets the equal-lifetime line.
pub fn equal_energy_crossing(
    cluster: &ClusterSpec,
    orders: [&[usize]; 2],
) -> Result<CrossingReport> {
    if cluster.len() != 2 {
        return Err(Error::InvalidParameter("two-node cluster required"));
    }
    let a = crossing(cluster, orders[0])?;
    let b = crossing(cluster, orders[1])?;
    let winner = usize::from(b.lifetime > a.lifetime);
    Ok(CrossingReport {
        crossings: [a, b],
        winner,
    })
}

/// Equalized allocation of a two-node order, for comparison with
/// [`equal_energy_crossing`].
pub fn equalized_first_time(cluster: &ClusterSpec, order: &[usize]) -> Result<f64> {
    let s = cluster.schedule(order)?;
    let nodes = cluster.nodes();
    let e: Vec<f64> = order.iter().map(|&i| nodes[i].energy).collect();
    let d: Vec<f64> = order.iter().map(|&i| nodes[i].path_loss).collect();
    Ok(equalize(&s.loads, &e, &d)?.times[0])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Lower convex hull (monotone chain) of 2-D points, left to right.
/// Collinear interior points are dropped.
pub fn hull_2d(points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("hull of no points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let mut lower: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    Ok(lower)
}
