//! Multi-threaded schedule search and column construction.
//!
//! Work is split into contiguous blocks whose results are reduced in block
//! order, so the answer never depends on the thread count.

use clusterlife_core::dynamic_sched::{columns_for_order, FULL_ENUMERATION_MAX_N};
use clusterlife_core::static_sched::{check_brute_force_size, merge_blocks, search_block};
use clusterlife_core::{perm, ClusterSpec, Column, EnergyMode, Error, StaticResult};
use rayon::prelude::*;

use crate::error::Result;

pub const THREADS_ENV: &str = "CLUSTERLIFE_THREADS";

/// Runs `f` on a pool of `threads` workers, or on rayon's default pool
/// (sized by the machine) when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()?
            .install(f)),
    }
}

const BLOCKS_PER_THREAD: u64 = 8;

/// Exhaustive search over all `N!` orders, same result as the sequential
/// search.
pub fn par_brute_force(cluster: &ClusterSpec, mode: EnergyMode) -> Result<StaticResult> {
    check_brute_force_size(cluster.len())?;
    let total = perm::factorial(cluster.len());
    let blocks = (rayon::current_num_threads() as u64 * BLOCKS_PER_THREAD).clamp(1, total);
    let size = total.div_ceil(blocks);
    let found: Vec<Option<StaticResult>> = (0..blocks)
        .into_par_iter()
        .map(|b| search_block(cluster, mode, b * size..((b + 1) * size).min(total)))
        .collect::<std::result::Result<_, Error>>()?;
    Ok(merge_blocks(found).ok_or(Error::InvalidParameter("empty cluster"))?)
}

/// Columns for every order, concatenated in input order.
pub fn par_columns_for_orders(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    orders: &[Vec<usize>],
    samples: usize,
) -> Result<Vec<Column>> {
    let groups: Vec<Vec<Column>> = orders
        .par_iter()
        .map(|o| columns_for_order(cluster, mode, o, samples))
        .collect::<std::result::Result<_, Error>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Columns for all `N!` orders in lexicographic order.
pub fn par_build_columns(
    cluster: &ClusterSpec,
    mode: EnergyMode,
    samples: usize,
) -> Result<Vec<Column>> {
    if cluster.len() > FULL_ENUMERATION_MAX_N {
        return Err(Error::TooLarge {
            what: "schedule enumeration for cooperation",
            size: cluster.len(),
            limit: FULL_ENUMERATION_MAX_N,
        }
        .into());
    }
    par_columns_for_orders(cluster, mode, &perm::all(cluster.len()), samples)
}
