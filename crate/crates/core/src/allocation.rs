//! Per-schedule time allocation.
//!
//! For a fixed polling order the best split of the unit slot gives every
//! transmitting node the same lifetime `L = E_k / (f(h_k, t_k) d_k)`. For a
//! candidate `L` each node needs at least `t_k(L)` time to stay alive for
//! `L` slots, and `sum_k t_k(L)` grows strictly with `L`; the equalized
//! lifetime is where that sum hits one.
//!
//! All slices here are indexed by polling position: `loads[k]`,
//! `energies[k]` and `path_losses[k]` describe the same node.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::energy::{min_time_for_energy, tx_energy, EnergyMode};
use crate::error::{Error, Result};

const MAX_OUTER_ITERS: usize = 300;
const SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Transmission time per polled position; sums to one.
    pub times: Vec<f64>,
    /// Equalized lifetime in slots (real valued).
    pub lifetime: f64,
    /// Per-slot energy `f(h_k, t_k) d_k` per polled position.
    pub per_node_energy: Vec<f64>,
}

impl AllocationResult {
    /// `E_k / per_node_energy[k]`, infinite for nodes that send nothing.
    pub fn node_lifetimes(&self, energies: &[f64]) -> Vec<f64> {
        energies
            .iter()
            .zip(&self.per_node_energy)
            .map(|(&e, &c)| if c > 0.0 { e / c } else { f64::INFINITY })
            .collect()
    }
}

/// Lifetime under SRRA together with the polled position that dies first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrraLifetime {
    pub lifetime: f64,
    pub bottleneck: usize,
}

fn check_inputs(loads: &[f64], energies: &[f64], path_losses: &[f64]) -> Result<()> {
    if loads.len() != energies.len() || loads.len() != path_losses.len() {
        return Err(Error::InvalidParameter(
            "loads, energies and path losses differ in length",
        ));
    }
    if loads.is_empty() {
        return Err(Error::InvalidParameter("empty schedule"));
    }
    if !loads.iter().all(|&h| h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter("loads must be finite and >= 0"));
    }
    if !energies
        .iter()
        .chain(path_losses)
        .all(|&v| v > 0.0 && v.is_finite())
    {
        return Err(Error::InvalidParameter(
            "energies and path losses must be > 0",
        ));
    }
    if loads.iter().all(|&h| h == 0.0) {
        return Err(Error::UnboundedLifetime);
    }
    Ok(())
}

fn times_for(
    loads: &[f64],
    energies: &[f64],
    path_losses: &[f64],
    lifetime: f64,
) -> Result<Vec<f64>> {
    loads
        .iter()
        .zip(energies)
        .zip(path_losses)
        .map(|((&h, &e), &d)| {
            if h == 0.0 {
                Ok(0.0)
            } else {
                min_time_for_energy(h, e / (lifetime * d))
            }
        })
        .collect()
}

fn time_sum(loads: &[f64], energies: &[f64], path_losses: &[f64], lifetime: f64) -> f64 {
    match times_for(loads, energies, path_losses, lifetime) {
        Ok(t) => t.iter().sum(),
        // only reachable right at the lifetime cap, where the sum diverges
        Err(_) => f64::INFINITY,
    }
}

/// Lifetime-equalizing time allocation for one schedule (Shannon law).
pub fn equalize(loads: &[f64], energies: &[f64], path_losses: &[f64]) -> Result<AllocationResult> {
    check_inputs(loads, energies, path_losses)?;

    // L must stay below E_k / (d_k h_k ln 2) or node k needs infinite time.
    let cap = loads
        .iter()
        .zip(energies)
        .zip(path_losses)
        .filter(|((&h, _), _)| h > 0.0)
        .map(|((&h, &e), &d)| e / (d * h * LN_2))
        .fold(f64::INFINITY, f64::min);

    let mut hi = 0.999 * cap;
    let mut grow = 0;
    while time_sum(loads, energies, path_losses, hi) < 1.0 {
        hi = cap - (cap - hi) * 0.1;
        grow += 1;
        if grow > 60 {
            return Err(Error::Numeric("could not bracket the equalized lifetime"));
        }
    }
    // Bracketed root of sum_t(L) - 1 on (0, hi]: Illinois false position,
    // falling back to bisection while the upper residual is still infinite.
    let (mut lo, mut r_lo) = (0.0, -1.0);
    let mut r_hi = time_sum(loads, energies, path_losses, hi) - 1.0;
    let mut lifetime = hi;
    let mut last_side = 0i8;
    for _ in 0..MAX_OUTER_ITERS {
        let mut mid = if r_hi.is_finite() {
            lo - r_lo * (hi - lo) / (r_hi - r_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let r = time_sum(loads, energies, path_losses, mid) - 1.0;
        lifetime = mid;
        if r.abs() <= SUM_TOL {
            break;
        }
        if r < 0.0 {
            lo = mid;
            r_lo = r;
            if last_side < 0 {
                r_hi *= 0.5;
            }
            last_side = -1;
        } else {
            hi = mid;
            r_hi = r;
            if last_side > 0 {
                r_lo *= 0.5;
            }
            last_side = 1;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }

    let times = times_for(loads, energies, path_losses, lifetime)?;
    let total: f64 = times.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Numeric("equalized times do not sum to one"));
    }
    let per_node_energy = loads
        .iter()
        .zip(&times)
        .zip(path_losses)
        .map(|((&h, &t), &d)| Ok(tx_energy(h, t, EnergyMode::Shannon)? * d))
        .collect::<Result<Vec<f64>>>()?;
    Ok(AllocationResult {
        times,
        lifetime,
        per_node_energy,
    })
}

/// SRRA lifetime `min_k E_k / (c h_k d_k)` over transmitting positions.
pub fn lifetime_srra(
    loads: &[f64],
    energies: &[f64],
    path_losses: &[f64],
    c: f64,
) -> Result<SrraLifetime> {
    check_inputs(loads, energies, path_losses)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter("srra constant c must be > 0"));
    }
    let mut best = SrraLifetime {
        lifetime: f64::INFINITY,
        bottleneck: 0,
    };
    for (k, ((&h, &e), &d)) in loads.iter().zip(energies).zip(path_losses).enumerate() {
        if h > 0.0 {
            let l = e / (c * h * d);
            if l < best.lifetime {
                best = SrraLifetime {
                    lifetime: l,
                    bottleneck: k,
                };
            }
        }
    }
    Ok(best)
}
