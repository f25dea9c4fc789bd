//! Lifetime maximization for a single-hop, TDMA, correlated-data sensor
//! cluster.
//!
//! Every node is polled once per slot by the base station. Data is decoded
//! instantaneously, so the number of bits a node transmits is its
//! information conditioned on every node polled before it in the slot. The
//! crate computes those conditional loads ([`model`]), the transmit energy
//! for a load and a transmission time ([`energy`]), the per-schedule
//! lifetime-equalizing time split ([`allocation`]), single-schedule search
//! ([`static_sched`]), multi-schedule cooperation through a linear program
//! ([`dynamic_sched`], [`lp`]), the energy-space view of both
//! ([`geometry`]) and an integral slot-by-slot battery walk ([`sim`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod allocation;
pub mod dynamic_sched;
pub mod energy;
mod error;
pub mod geometry;
pub mod lp;
pub mod model;
pub mod perm;
pub mod sim;
pub mod static_sched;

pub use allocation::{equalize, lifetime_srra, AllocationResult, SrraLifetime};
pub use dynamic_sched::{
    build_columns, columns_for_orders, dynamic_lifetime, solve_lp, two_node_gain, Column,
    DynamicPlan, PlanEntry, TwoNodeGain,
};
pub use energy::{min_time_for_energy, srra_error, tx_energy, EnergyMode};
pub use error::{Error, Result};
pub use model::{ClusterSpec, CorrelationModel, NodeSpec, Schedule};
pub use static_sched::{
    brute_force, evaluate_schedule, mcn, nnn, shp_heuristic, Method, StaticResult,
};
