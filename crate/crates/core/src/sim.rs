//! Integral slot-by-slot execution of a schedule or a cooperation plan.
//!
//! Lifetimes elsewhere are real valued. Here every slot either runs in full
//! (every node can pay its per-slot energy) or not at all, which checks the
//! analytic numbers against an explicit battery walk.

use alloc::vec::Vec;

use crate::dynamic_sched::DynamicPlan;
use crate::error::{Error, Result};

/// Absolute slack when comparing a battery with a per-slot cost.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// Largest number of slots a simulation will execute.
pub const MAX_SLOTS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot: u64,
    /// Column of the plan used in this slot (always 0 for a static plan).
    pub column: usize,
    pub spent: Vec<f64>,
    pub remaining: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub slots: Vec<SlotRecord>,
    /// Node that could not pay for the first slot that failed to run.
    pub first_dead: Option<usize>,
    pub completed: u64,
}

/// A plan to execute: one per-slot energy vector per column with a slot
/// budget, tried in the given order.
#[derive(Debug, Clone, PartialEq)]
pub enum SimPlan {
    /// Repeat one per-slot energy vector (indexed by node id) until a node
    /// cannot pay.
    Static { energy: Vec<f64> },
    /// Columns with real-valued slot counts.
    Dynamic { columns: Vec<(Vec<f64>, f64)> },
}

impl SimPlan {
    pub fn from_dynamic(plan: &DynamicPlan) -> Self {
        SimPlan::Dynamic {
            columns: plan
                .entries
                .iter()
                .map(|e| (e.column.energy.clone(), e.slots))
                .collect(),
        }
    }
}

struct Walk {
    remaining: Vec<f64>,
    slots: Vec<SlotRecord>,
}

impl Walk {
    /// First node that cannot pay `cost`, if any.
    fn blocker(&self, cost: &[f64]) -> Option<usize> {
        self.remaining
            .iter()
            .zip(cost)
            .position(|(&r, &c)| c > 0.0 && r < c - FEASIBILITY_SLACK)
    }

    fn pay(&mut self, column: usize, cost: &[f64]) {
        for (r, &c) in self.remaining.iter_mut().zip(cost) {
            *r -= c;
        }
        self.slots.push(SlotRecord {
            slot: self.slots.len() as u64,
            column,
            spent: cost.to_vec(),
            remaining: self.remaining.clone(),
        });
    }
}

fn check_vector(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::UnknownNode(v.len().max(n) - 1));
    }
    if !v.iter().all(|&c| c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(
            "per-slot energy must be finite and >= 0",
        ));
    }
    Ok(())
}

/// Runs `plan` against the batteries `energies` (indexed by node id).
///
/// Static: repeat until some node cannot pay. Dynamic: run each column
/// `floor(tau)` times in descending `tau` order, then try every column once
/// more in that order while it is still affordable.
pub fn simulate(plan: &SimPlan, energies: &[f64]) -> Result<SimTrace> {
    let n = energies.len();
    let mut walk = Walk {
        remaining: energies.to_vec(),
        slots: Vec::new(),
    };
    let mut first_dead = None;
    match plan {
        SimPlan::Static { energy } => {
            check_vector(energy, n)?;
            if energy.iter().all(|&c| c == 0.0) {
                return Err(Error::UnboundedLifetime);
            }
            loop {
                if let Some(k) = walk.blocker(energy) {
                    first_dead = Some(k);
                    break;
                }
                if walk.slots.len() as u64 >= MAX_SLOTS {
                    return Err(Error::TooLarge {
                        what: "simulated slots",
                        size: MAX_SLOTS as usize,
                        limit: MAX_SLOTS as usize,
                    });
                }
                walk.pay(0, energy);
            }
        }
        SimPlan::Dynamic { columns } => {
            for (cost, slots) in columns {
                check_vector(cost, n)?;
                if !(*slots >= 0.0) || !slots.is_finite() {
                    return Err(Error::InvalidParameter(
                        "slot counts must be finite and >= 0",
                    ));
                }
            }
            let total: f64 = columns.iter().map(|(_, s)| libm::floor(*s)).sum();
            if total > MAX_SLOTS as f64 {
                return Err(Error::TooLarge {
                    what: "simulated slots",
                    size: total as usize,
                    limit: MAX_SLOTS as usize,
                });
            }
            let mut by_tau: Vec<usize> = (0..columns.len()).collect();
            by_tau.sort_by(|&a, &b| columns[b].1.total_cmp(&columns[a].1).then(a.cmp(&b)));
            for &c in &by_tau {
                let (cost, slots) = &columns[c];
                for _ in 0..libm::floor(*slots) as u64 {
                    if let Some(k) = walk.blocker(cost) {
                        first_dead.get_or_insert(k);
                        break;
                    }
                    walk.pay(c, cost);
                }
            }
            for &c in &by_tau {
                let cost = &columns[c].0;
                match walk.blocker(cost) {
                    Some(k) => {
                        first_dead.get_or_insert(k);
                    }
                    None => walk.pay(c, cost),
                }
            }
        }
    }
    let completed = walk.slots.len() as u64;
    Ok(SimTrace {
        slots: walk.slots,
        first_dead,
        completed,
    })
}
