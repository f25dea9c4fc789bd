//! Multi-schedule cooperation.
//!
//! Nodes may switch polling order from slot to slot. Each *column* is one
//! schedule with one concrete time allocation and the per-slot energy it
//! costs every node. Using column `c` for `tau_c` slots, the longest
//! lifetime is the linear program
//!
//! ```text
//! max sum_c tau_c   s.t.  sum_c tau_c e_c(k) <= E_k  for every node k,  tau >= 0
//! ```
//!
//! Under SRRA every schedule has exactly one column. Under the Shannon law
//! each schedule spans a whole surface of allocations; it is represented by
//! its equalized allocation plus a few deterministic low-discrepancy samples
//! of the time simplex, which gives an inner approximation of the joint
//! problem.

use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::{equalize, AllocationResult};
use crate::energy::{tx_energy, EnergyMode};
use crate::error::{Error, Result};
use crate::lp::{self, LpStatus};
use crate::model::ClusterSpec;
use crate::perm;
use crate::static_sched::evaluate_schedule;

/// Largest cluster whose `N!` schedules are enumerated as columns.
pub const FULL_ENUMERATION_MAX_N: usize = 7;

/// Lower bound on any sampled transmission time.
pub const TIME_FLOOR: f64 = 1e-4;

/// Feasibility slack on returned plans, relative to the battery.
const PLAN_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub order: Vec<usize>,
    /// Time per polled position; `None` under SRRA.
    pub times: Option<Vec<f64>>,
    /// Per-slot energy indexed by node id.
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub column: Column,
    /// Index of the column in the solver input.
    pub index: usize,
    pub slots: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicPlan {
    /// Columns with positive slot count, in input order.
    pub entries: Vec<PlanEntry>,
    pub lifetime: f64,
    /// Nodes whose battery is exhausted by the plan.
    pub active_nodes: Vec<usize>,
    /// Largest battery overrun `sum_c tau_c e_c(k) / E_k - 1` over nodes (<= 0 when feasible).
    pub max_violation: f64,
}

impl DynamicPlan {
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    /// Energy the plan drains from each node.
    pub fn consumption(&self, n: usize) -> Vec<f64> {
        let mut used = vec![0.0; n];
        for e in &self.entries {
            for (u, &c) in used.iter_mut().zip(&e.column.energy) {
                *u += e.slots * c;
            }
        }
        used
    }
}

fn energy_from_times(
    loads: &[f64],
    times: &[f64],
    order: &[usize],
    losses: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    let mut energy = vec![0.0; n];
    for ((&node, &h), &t) in order.iter().zip(loads).zip(times) {
        energy[node] = tx_energy(h, t, EnergyMode::Shannon)? * losses[node];
    }
    Ok(energy)
}

/// Column for a schedule under an explicit time allocation (Shannon law).
pub fn column_with_times(cluster: &ClusterSpec, order: &[usize], times: &[f64]) -> Result<Column> {
    let schedule = cluster.schedule(order)?;
    if times.len() != order.len() {
        return Err(Error::InvalidParameter("one time per polled node expected"));
    }
    let energy = energy_from_times(
        &schedule.loads,
        times,
        order,
        &cluster.path_losses(),
        cluster.len(),
    )?;
    Ok(Column {
        order: order.to_vec(),
        times: Some(times.to_vec()),
        energy,
    })
}

fn column_from_allocation(order: &[usize], a: &AllocationResult, n: usize) -> Column {
    let mut energy = vec![0.0; n];
    for (&node, &e) in order.iter().zip(&a.per_node_energy) {
        energy[node] = e;
    }
    Column {
        order: order.to_vec(),
        times: Some(a.times.clone()),
        energy,
    }
}

/// Root of `x^(d+1) = x + 1`, the generalized golden ratio for dimension `d`.
fn golden(d: usize) -> f64 {
    let mut x = 2.0;
    for _ in 0..64 {
        x = libm::pow(1.0 + x, 1.0 / (d as f64 + 1.0));
    }
    x
}

/// `count` deterministic points of the open `dim`-simplex, each coordinate
/// at least [`TIME_FLOOR`]. An additive recurrence on the cube is pushed
/// through normalized exponential spacings.
pub fn simplex_samples(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 0 {
        return Vec::new();
    }
    if dim == 1 {
        return vec![vec![1.0]; count];
    }
    let g = golden(dim);
    let alpha: Vec<f64> = (1..=dim)
        .map(|k| libm::pow(1.0 / g, k as f64) % 1.0)
        .collect();
    let free = 1.0 - dim as f64 * TIME_FLOOR;
    (1..=count)
        .map(|j| {
            let w: Vec<f64> = alpha
                .iter()
                .map(|a| {
                    let u = (0.5 + a * j as f64) % 1.0;
                    -libm::log(u.max(1e-300))
                })
                .collect();
            let total: f64 = w.iter().sum();
            w.iter().map(|v| TIME_FLOOR + free * v / total).collect()
        })
        .collect()
}

/// Columns for the given orders: the equalized column first, then
/// `samples_per_schedule - 1` sampled allocations (Shannon only).
pub fn columns_for_orders(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    orders: &[Vec<usize>],
    samples_per_schedule: usize,
) -> Result<Vec<Column>> {
    orders
        .iter()
        .map(|o| columns_for_order(cluster, mode, o, samples_per_schedule))
        .try_fold(Vec::new(), |mut acc, cols| {
            acc.extend(cols?);
            Ok(acc)
        })
}

/// Columns contributed by one schedule.
pub fn columns_for_order(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    order: &[usize],
    samples_per_schedule: usize,
) -> Result<Vec<Column>> {
    if samples_per_schedule == 0 {
        return Err(Error::InvalidParameter("samples per schedule must be >= 1"));
    }
    mode.validate()?;
    let n = cluster.len();
    let schedule = cluster.schedule(order)?;
    let losses = cluster.path_losses();
    match mode {
        EnergyMode::Srra { c } => {
            let mut energy = vec![0.0; n];
            for (&node, &h) in order.iter().zip(&schedule.loads) {
                energy[node] = c * h * losses[node];
            }
            Ok(vec![Column {
                order: order.to_vec(),
                times: None,
                energy,
            }])
        }
        EnergyMode::Shannon => {
            let energies: Vec<f64> = order.iter().map(|&i| cluster.nodes()[i].energy).collect();
            let pos_losses: Vec<f64> = order.iter().map(|&i| losses[i]).collect();
            let eq = equalize(&schedule.loads, &energies, &pos_losses)?;
            let mut cols = vec![column_from_allocation(order, &eq, n)];
            // sample only over positions that transmit
            let busy: Vec<usize> = (0..n).filter(|&k| schedule.loads[k] > 0.0).collect();
            for point in simplex_samples(busy.len(), samples_per_schedule - 1) {
                let mut times = vec![0.0; n];
                for (&k, &t) in busy.iter().zip(&point) {
                    times[k] = t;
                }
                let energy = energy_from_times(&schedule.loads, &times, order, &losses, n)?;
                cols.push(Column {
                    order: order.to_vec(),
                    times: Some(times),
                    energy,
                });
            }
            Ok(cols)
        }
    }
}

/// Columns for all `N!` schedules in lexicographic order.
pub fn build_columns(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    samples_per_schedule: usize,
) -> Result<Vec<Column>> {
    if cluster.len() > FULL_ENUMERATION_MAX_N {
        return Err(Error::TooLarge {
            what: "schedule enumeration for cooperation",
            size: cluster.len(),
            limit: FULL_ENUMERATION_MAX_N,
        });
    }
    columns_for_orders(
        cluster,
        mode,
        &perm::all(cluster.len()),
        samples_per_schedule,
    )
}

/// Optimal slot counts for the given columns and batteries.
pub fn solve_lp(columns: &[Column], energies: &[f64]) -> Result<DynamicPlan> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter("no columns"));
    }
    let n = energies.len();
    if columns.iter().any(|c| c.energy.len() != n) {
        return Err(Error::InvalidParameter(
            "column energy length differs from node count",
        ));
    }
    if columns.iter().any(|c| c.energy.iter().all(|&e| e <= 0.0)) {
        return Err(Error::UnboundedLifetime);
    }
    if energies.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter(
            "energies must be positive and finite",
        ));
    }
    // Work in battery fractions with every column scaled so its largest
    // fraction is 1; columns from near-zero slot times can otherwise carry
    // energies many orders of magnitude above the rest.
    let scale: Vec<f64> = columns
        .iter()
        .map(|c| {
            c.energy
                .iter()
                .zip(energies)
                .map(|(e, b)| e / b)
                .fold(0.0, f64::max)
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            columns
                .iter()
                .zip(&scale)
                .map(|(c, s)| c.energy[k] / energies[k] / s)
                .collect()
        })
        .collect();
    let gain: Vec<f64> = scale.iter().map(|s| 1.0 / s).collect();
    let sol = match lp::maximize(&gain, &rows, &vec![1.0; n])? {
        LpStatus::Optimal(s) => s,
        LpStatus::Unbounded => return Err(Error::UnboundedLifetime),
    };
    let entries: Vec<PlanEntry> = sol
        .x
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0)
        .map(|(index, &y)| PlanEntry {
            column: columns[index].clone(),
            index,
            slots: y / scale[index],
        })
        .collect();
    let active_nodes = (0..n).filter(|&k| sol.slack[k] <= PLAN_SLACK).collect();
    let max_violation = sol
        .slack
        .iter()
        .map(|s| -s)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_violation > PLAN_SLACK {
        return Err(Error::Numeric("simplex returned an infeasible plan"));
    }
    let lifetime = entries.iter().map(|e| e.slots).sum();
    Ok(DynamicPlan {
        entries,
        lifetime,
        active_nodes,
        max_violation,
    })
}

/// Cooperation over all `N!` schedules.
pub fn dynamic_lifetime(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    samples_per_schedule: usize,
) -> Result<DynamicPlan> {
    let cols = build_columns(cluster, mode, samples_per_schedule)?;
    solve_lp(&cols, &cluster.energies())
}

/// `L_m` for `m = 1..=groups.len()`: the best LP lifetime when only `m`
/// schedules (each contributing all of its columns) may cooperate.
pub fn cooperation_curve(groups: &[Vec<Column>], energies: &[f64]) -> Result<Vec<f64>> {
    let g = groups.len();
    if g > 16 {
        return Err(Error::TooLarge {
            what: "schedule subsets",
            size: g,
            limit: 16,
        });
    }
    let mut best = vec![0.0f64; g];
    for mask in 1u32..(1u32 << g) {
        let cols: Vec<Column> = (0..g)
            .filter(|&i| mask & (1 << i) != 0)
            .flat_map(|i| groups[i].iter().cloned())
            .collect();
        let m = mask.count_ones() as usize;
        let l = solve_lp(&cols, energies)?.lifetime;
        best[m - 1] = best[m - 1].max(l);
    }
    Ok(best)
}

/// A pair of allocations, one on each schedule curve, whose mixture beats
/// the best static schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// Time of the first polled node on the static optimum's curve.
    pub r: f64,
    /// Time of that same node on the other schedule's curve.
    pub s: f64,
    pub lifetime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoNodeGain {
    /// Best static order; its first node is the one called "node 1".
    pub static_order: Vec<usize>,
    pub static_lifetime: f64,
    /// Equalized time of node 1 under the static optimum.
    pub static_time: f64,
    /// Marginal load of node 1 and conditional load of node 2.
    pub h: f64,
    pub h_cond: f64,
    pub dynamic_lifetime: f64,
    pub improvement: f64,
    /// Lower bound on `s` in the improvement region (`r < t` and `s > s_min`).
    pub s_min: f64,
    /// Best grid pair inside that region, if it strictly improves.
    pub witness: Option<Witness>,
}

/// Two-node static vs dynamic comparison under the Shannon law.
///
/// Both curves are sampled on a uniform grid of `grid` interior times; the
/// dynamic lifetime is the LP over those samples and both equalized points.
pub fn two_node_gain(cluster: &ClusterSpec, grid: usize) -> Result<TwoNodeGain> {
    if cluster.len() != 2 {
        return Err(Error::InvalidParameter("two-node cluster required"));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points"));
    }
    let mode = EnergyMode::Shannon;
    let a = evaluate_schedule(&[0, 1], cluster, mode)?;
    let b = evaluate_schedule(&[1, 0], cluster, mode)?;
    let (best, other) = if b.lifetime > a.lifetime {
        (b, a)
    } else {
        (a, b)
    };
    let alloc = best
        .allocation
        .as_ref()
        .expect("Shannon evaluation has an allocation");
    let t = alloc.times[0];
    let h = best.schedule.loads[0];
    let h_cond = best.schedule.loads[1];
    let first = best.schedule.order.clone();
    let second = other.schedule.order.clone();

    let energies = cluster.energies();
    let times: Vec<f64> = (1..=grid).map(|i| i as f64 / (grid as f64 + 1.0)).collect();
    // curve of `first`: node 1 gets r; curve of `second`: node 1 (polled
    // last there) gets s
    let first_cols = times
        .iter()
        .map(|&r| column_with_times(cluster, &first, &[r, 1.0 - r]))
        .collect::<Result<Vec<_>>>()?;
    let second_cols = times
        .iter()
        .map(|&s| column_with_times(cluster, &second, &[1.0 - s, s]))
        .collect::<Result<Vec<_>>>()?;

    let mut all = vec![
        column_from_allocation(&first, alloc, 2),
        column_from_allocation(&second, other.allocation.as_ref().expect("allocation"), 2),
    ];
    all.extend(first_cols.iter().cloned());
    all.extend(second_cols.iter().cloned());
    let dynamic = solve_lp(&all, &energies)?.lifetime;

    let s_min = if h_cond > 0.0 {
        (h * t - (h - h_cond)) / h_cond
    } else {
        f64::NEG_INFINITY
    };
    let mut witness: Option<Witness> = None;
    for (i, &r) in times.iter().enumerate() {
        if r >= t {
            continue;
        }
        for (j, &s) in times.iter().enumerate() {
            if s <= s_min {
                continue;
            }
            let pair = [first_cols[i].clone(), second_cols[j].clone()];
            let l = solve_lp(&pair, &energies)?.lifetime;
            if l > best.lifetime && witness.map_or(true, |w| l > w.lifetime) {
                witness = Some(Witness { r, s, lifetime: l });
            }
        }
    }

    Ok(TwoNodeGain {
        static_order: first,
        static_lifetime: best.lifetime,
        static_time: t,
        h,
        h_cond,
        dynamic_lifetime: dynamic,
        improvement: dynamic - best.lifetime,
        s_min,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CorrelationModel, NodeSpec};

    fn col(e: &[f64]) -> Column {
        Column {
            order: Vec::new(),
            times: None,
            energy: e.to_vec(),
        }
    }

    #[test]
    fn worked_lp() {
        let plan = solve_lp(&[col(&[1.0, 0.5]), col(&[0.5, 1.0])], &[1.0, 1.0]).unwrap();
        assert!((plan.lifetime - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(plan.support(), 2);
        for e in &plan.entries {
            assert!((e.slots - 2.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(plan.active_nodes, vec![0, 1]);
    }

    #[test]
    fn single_column_ratio() {
        let plan = solve_lp(&[col(&[1.0, 1.0])], &[2.0, 2.0]).unwrap();
        assert!((plan.lifetime - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_do_not_change_lifetime() {
        let base = solve_lp(&[col(&[1.0, 0.5]), col(&[0.5, 1.0])], &[1.0, 2.0]).unwrap();
        let dup = solve_lp(
            &[
                col(&[1.0, 0.5]),
                col(&[0.5, 1.0]),
                col(&[1.0, 0.5]),
                col(&[0.5, 1.0]),
            ],
            &[1.0, 2.0],
        )
        .unwrap();
        assert!((base.lifetime - dup.lifetime).abs() < 1e-12);
    }

    #[test]
    fn all_zero_column_is_unbounded() {
        assert_eq!(
            solve_lp(&[col(&[0.0, 0.0])], &[1.0, 1.0]),
            Err(Error::UnboundedLifetime)
        );
    }

    fn pair(model: CorrelationModel) -> ClusterSpec {
        ClusterSpec::new(
            vec![
                NodeSpec::new(0, 0.0, 0.0, 1.0, 1.0),
                NodeSpec::new(1, 1.0, 0.0, 1.0, 1.0),
            ],
            model,
        )
        .unwrap()
    }

    #[test]
    fn column_counts() {
        let c = pair(CorrelationModel::BitDistance { n: 3 });
        assert_eq!(build_columns(&c, EnergyMode::srra(), 5).unwrap().len(), 2);
        assert_eq!(build_columns(&c, EnergyMode::Shannon, 1).unwrap().len(), 2);
        let cols = build_columns(&c, EnergyMode::Shannon, 4).unwrap();
        assert_eq!(cols.len(), 8);
        assert!(cols.iter().all(|c| c.energy.iter().all(|&e| e > 0.0)));
        assert!(build_columns(&c, EnergyMode::Shannon, 0).is_err());
    }

    #[test]
    fn simplex_samples_are_interior() {
        for dim in 1..6 {
            for p in simplex_samples(dim, 20) {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|&t| t >= TIME_FLOOR * (1.0 - 1e-12)));
            }
        }
        assert_eq!(simplex_samples(3, 4), simplex_samples(3, 4));
    }

    #[test]
    fn single_node_dynamic_equals_static() {
        let c = ClusterSpec::new(
            vec![NodeSpec::new(0, 0.0, 0.0, 2.0, 1.5)],
            CorrelationModel::BitDistance { n: 2 },
        )
        .unwrap();
        let s = evaluate_schedule(&[0], &c, EnergyMode::Shannon).unwrap();
        let d = dynamic_lifetime(&c, EnergyMode::Shannon, 8).unwrap();
        assert!((s.lifetime - d.lifetime).abs() < 1e-9 * s.lifetime);
    }

    #[test]
    fn guard() {
        let nodes = (0..8)
            .map(|i| NodeSpec::new(i, i as f64, 0.0, 1.0, 1.0))
            .collect();
        let c = ClusterSpec::new(nodes, CorrelationModel::BitDistance { n: 3 }).unwrap();
        assert!(matches!(
            build_columns(&c, EnergyMode::srra(), 1),
            Err(Error::TooLarge { .. })
        ));
    }
}
