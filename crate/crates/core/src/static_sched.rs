//! Single-schedule (static) lifetime maximization.
//!
//! A static schedule polls the nodes in the same order every slot. Its
//! lifetime is the equalized lifetime of [`crate::allocation::equalize`]
//! under the Shannon law, or `min_k E_k / (c h_k d_k)` under SRRA.
//!
//! Search strategies:
//! * [`brute_force`] enumerates every order (guarded to `N <= 8`).
//! * [`nnn`] (nearest neighbor next) grows the order by always polling the
//!   node with the fewest conditional bits. Under the bit-distance model the
//!   cost of a node is the `ceil` distance to its closest polled node, so the
//!   orders it builds are minimum spanning trees of the capped distance
//!   graph, which is optimal when `E_k / d_k` is the same for every node.
//! * [`mcn`] (minimum cost next) is the SRRA greedy: poll next the node with
//!   the smallest `h d / E`.
//! * [`shp_heuristic`] polls along a short Hamiltonian path (nearest
//!   neighbor construction plus 2-opt).
//!
//! Ties are always broken towards the smallest node id and, between whole
//! orders, towards the lexicographically smallest one.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::allocation::{equalize, lifetime_srra, AllocationResult};
use crate::energy::EnergyMode;
use crate::error::{Error, Result};
use crate::model::{ClusterSpec, CorrelationModel, Schedule};
use crate::perm;

/// Largest cluster [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// Relative margin a lifetime must clear to beat an earlier candidate.
pub const TIE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    Nnn,
    Mcn,
    Shp,
    Given,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::BruteForce => "brute",
            Method::Nnn => "nnn",
            Method::Mcn => "mcn",
            Method::Shp => "shp",
            Method::Given => "given",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticResult {
    pub schedule: Schedule,
    /// Time allocation; `None` under SRRA where time does not matter.
    pub allocation: Option<AllocationResult>,
    /// Node id that dies first under SRRA.
    pub bottleneck: Option<usize>,
    pub lifetime: f64,
    pub method: Method,
}

impl StaticResult {
    /// Per-slot energy of every node, indexed by node id.
    pub fn energy_by_node(&self, cluster: &ClusterSpec, mode: EnergyMode) -> Vec<f64> {
        let mut out = vec![0.0; cluster.len()];
        match (&self.allocation, mode) {
            (Some(a), _) => {
                for (&node, &e) in self.schedule.order.iter().zip(&a.per_node_energy) {
                    out[node] = e;
                }
            }
            (None, EnergyMode::Srra { c }) => {
                for (&node, &h) in self.schedule.order.iter().zip(&self.schedule.loads) {
                    out[node] = c * h * cluster.nodes()[node].path_loss;
                }
            }
            (None, EnergyMode::Shannon) => {}
        }
        out
    }

    /// Lifetime of every node on its own, indexed by node id.
    pub fn node_lifetimes(&self, cluster: &ClusterSpec, mode: EnergyMode) -> Vec<f64> {
        self.energy_by_node(cluster, mode)
            .iter()
            .zip(cluster.nodes())
            .map(|(&e, n)| if e > 0.0 { n.energy / e } else { f64::INFINITY })
            .collect()
    }

    fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// `true` when `candidate` beats `incumbent` by more than the tie margin.
pub fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + TIE_REL_TOL * incumbent.abs()
}

/// Lifetime of one fixed polling order.
pub fn evaluate_schedule(
    order: &[usize],
    cluster: &ClusterSpec,
    mode: EnergyMode,
) -> Result<StaticResult> {
    mode.validate()?;
    let schedule = cluster.schedule(order)?;
    let nodes = cluster.nodes();
    let energies: Vec<f64> = order.iter().map(|&i| nodes[i].energy).collect();
    let losses: Vec<f64> = order.iter().map(|&i| nodes[i].path_loss).collect();
    match mode {
        EnergyMode::Shannon => {
            let allocation = equalize(&schedule.loads, &energies, &losses)?;
            Ok(StaticResult {
                lifetime: allocation.lifetime,
                schedule,
                allocation: Some(allocation),
                bottleneck: None,
                method: Method::Given,
            })
        }
        EnergyMode::Srra { c } => {
            let r = lifetime_srra(&schedule.loads, &energies, &losses, c)?;
            Ok(StaticResult {
                lifetime: r.lifetime,
                bottleneck: Some(order[r.bottleneck]),
                schedule,
                allocation: None,
                method: Method::Given,
            })
        }
    }
}

/// Best order among lexicographic ranks `ranks` of the permutations.
///
/// Blocks over disjoint rank ranges can be searched independently and
/// combined with [`merge_blocks`]; the result does not depend on how the
/// range is split as long as blocks are merged in rank order.
pub fn search_block(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    ranks: Range<u64>,
) -> Result<Option<StaticResult>> {
    let n = cluster.len();
    let total = perm::factorial(n);
    let end = ranks.end.min(total);
    if ranks.start >= end {
        return Ok(None);
    }
    let mut order = perm::unrank(ranks.start, n);
    let mut best: Option<StaticResult> = None;
    for rank in ranks.start..end {
        if rank > ranks.start {
            perm::next_permutation(&mut order);
        }
        let r = evaluate_schedule(&order, cluster, mode)?;
        if best
            .as_ref()
            .map_or(true, |b| improves(r.lifetime, b.lifetime))
        {
            best = Some(r);
        }
    }
    Ok(best.map(|b| b.with_method(Method::BruteForce)))
}

/// Reduces per-block winners given in rank order.
pub fn merge_blocks<I>(blocks: I) -> Option<StaticResult>
where
    I: IntoIterator<Item = Option<StaticResult>>,
{
    blocks
        .into_iter()
        .flatten()
        .fold(None, |best, r| match best {
            Some(b) if !improves(r.lifetime, b.lifetime) => Some(b),
            _ => Some(r),
        })
}

pub fn check_brute_force_size(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "exhaustive schedule search",
            size: n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    Ok(())
}

/// Exhaustive search over all `N!` polling orders.
pub fn brute_force(cluster: &ClusterSpec, mode: EnergyMode) -> Result<StaticResult> {
    check_brute_force_size(cluster.len())?;
    search_block(cluster, mode, 0..perm::factorial(cluster.len()))?
        .ok_or(Error::InvalidParameter("empty cluster"))
}

fn best_of<I>(
    candidates: I,
    cluster: &ClusterSpec,
    mode: EnergyMode,
    method: Method,
) -> Result<StaticResult>
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let mut best: Option<StaticResult> = None;
    for order in candidates {
        let r = evaluate_schedule(&order, cluster, mode)?;
        let better = match &best {
            None => true,
            Some(b) => {
                improves(r.lifetime, b.lifetime)
                    || (!improves(b.lifetime, r.lifetime) && r.schedule.order < b.schedule.order)
            }
        };
        if better {
            best = Some(r);
        }
    }
    best.map(|b| b.with_method(method))
        .ok_or(Error::InvalidParameter("empty cluster"))
}

/// Greedy order from `start`, always polling the node with the fewest
/// conditional bits next (bit-distance model).
pub fn nnn_order(cluster: &ClusterSpec, start: usize) -> Result<Vec<usize>> {
    let CorrelationModel::BitDistance { n } = cluster.correlation() else {
        return Err(Error::WrongModel(
            "nearest neighbor next needs the bit-distance model",
        ));
    };
    let size = cluster.len();
    if start >= size {
        return Err(Error::UnknownNode(start));
    }
    let mut polled = vec![false; size];
    let mut bits = vec![n; size];
    let mut order = Vec::with_capacity(size);
    let mut next = start;
    loop {
        polled[next] = true;
        order.push(next);
        if order.len() == size {
            break;
        }
        for j in 0..size {
            if !polled[j] {
                bits[j] = bits[j].min(cluster.bits_bitdist(j, &[next])?);
            }
        }
        next = (0..size)
            .filter(|&j| !polled[j])
            .min_by_key(|&j| (bits[j], j))
            .expect("unpolled node left");
    }
    Ok(order)
}

/// Nearest neighbor next: best of the greedy orders from every start node.
pub fn nnn(cluster: &ClusterSpec, mode: EnergyMode) -> Result<StaticResult> {
    let orders = (0..cluster.len())
        .map(|s| nnn_order(cluster, s))
        .collect::<Result<Vec<_>>>()?;
    best_of(orders, cluster, mode, Method::Nnn)
}

/// Minimum cost next: repeatedly poll the node with the smallest
/// `h_{i|polled} d_i / E_i` (SRRA only).
pub fn mcn(cluster: &ClusterSpec, mode: EnergyMode) -> Result<StaticResult> {
    if !mode.is_srra() {
        return Err(Error::WrongModel(
            "minimum cost next needs the SRRA energy mode",
        ));
    }
    let size = cluster.len();
    let nodes = cluster.nodes();
    let mut order: Vec<usize> = Vec::with_capacity(size);
    let mut polled = vec![false; size];
    while order.len() < size {
        let mut pick: Option<(f64, usize)> = None;
        for i in (0..size).filter(|&i| !polled[i]) {
            let cost = cluster.conditional_bits(i, &order)? * nodes[i].path_loss / nodes[i].energy;
            // strictly smaller cost wins, so equal costs keep the smaller id
            if pick.map_or(true, |(c, _)| cost < c) {
                pick = Some((cost, i));
            }
        }
        let (_, i) = pick.expect("unpolled node left");
        polled[i] = true;
        order.push(i);
    }
    Ok(evaluate_schedule(&order, cluster, mode)?.with_method(Method::Mcn))
}

/// Length of the open path visiting `order`.
pub fn path_length(cluster: &ClusterSpec, order: &[usize]) -> Result<f64> {
    order
        .windows(2)
        .map(|w| cluster.pairwise_distance(w[0], w[1]))
        .sum()
}

/// Open path built by always moving to the nearest unvisited node.
pub fn nearest_neighbor_path(cluster: &ClusterSpec, start: usize) -> Result<Vec<usize>> {
    let size = cluster.len();
    if start >= size {
        return Err(Error::UnknownNode(start));
    }
    let mut visited = vec![false; size];
    let mut path = vec![start];
    visited[start] = true;
    while path.len() < size {
        let last = *path.last().expect("non-empty path");
        let mut pick: Option<(f64, usize)> = None;
        for j in (0..size).filter(|&j| !visited[j]) {
            let d = cluster.pairwise_distance(last, j)?;
            if pick.map_or(true, |(bd, _)| d < bd) {
                pick = Some((d, j));
            }
        }
        let (_, j) = pick.expect("unvisited node left");
        visited[j] = true;
        path.push(j);
    }
    Ok(path)
}

/// 2-opt for open paths: reverse `path[i..=j]` while that shortens the path.
pub fn two_opt(cluster: &ClusterSpec, mut path: Vec<usize>) -> Result<Vec<usize>> {
    let n = path.len();
    let dist = |a: usize, b: usize| cluster.pairwise_distance(a, b);
    loop {
        let mut improved = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let mut delta = 0.0;
                if i > 0 {
                    delta += dist(path[i - 1], path[j])? - dist(path[i - 1], path[i])?;
                }
                if j + 1 < n {
                    delta += dist(path[i], path[j + 1])? - dist(path[j], path[j + 1])?;
                }
                if delta < -1e-12 {
                    path[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return Ok(path);
        }
    }
}

/// Shortest path found by nearest neighbor + 2-opt over every start node.
pub fn short_hamiltonian_path(cluster: &ClusterSpec) -> Result<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for start in 0..cluster.len() {
        let path = two_opt(cluster, nearest_neighbor_path(cluster, start)?)?;
        let len = path_length(cluster, &path)?;
        if best.as_ref().map_or(true, |(_, b)| len < b - 1e-12) {
            best = Some((path, len));
        }
    }
    best.ok_or(Error::InvalidParameter("empty cluster"))
}

/// Polls along a short Hamiltonian path (Gaussian field model).
pub fn shp_heuristic(cluster: &ClusterSpec, mode: EnergyMode) -> Result<StaticResult> {
    if !matches!(
        cluster.correlation(),
        CorrelationModel::GaussianField { .. }
    ) {
        return Err(Error::WrongModel(
            "the path heuristic needs the Gaussian field model",
        ));
    }
    let (order, _) = short_hamiltonian_path(cluster)?;
    Ok(evaluate_schedule(&order, cluster, mode)?.with_method(Method::Shp))
}
