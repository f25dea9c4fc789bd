//! Transmission energy as a function of bits and transmission time.
//!
//! The default law inverts the AWGN capacity formula: sending `h` bits in
//! time `x` over a unit path loss costs `f(h, x) = x (2^(h/x) - 1)`. At low
//! rates this is close to linear in `h`, which gives the small rate region
//! approximation (SRRA) `f = c h`, independent of time.

use core::f64::consts::LN_2;

use crate::error::{Error, Result};

const BRACKET_STEPS: usize = 2100;
const BISECTION_ITERS: usize = 200;

/// Energy law used to turn a per-slot load into per-slot energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyMode {
    /// `f(h, x) = x (2^(h/x) - 1)`.
    Shannon,
    /// `f(h, x) = c h`; transmission time is irrelevant.
    Srra { c: f64 },
}

impl EnergyMode {
    /// SRRA with the first-order Taylor constant `c = ln 2`.
    pub fn srra() -> Self {
        EnergyMode::Srra { c: LN_2 }
    }

    pub fn is_srra(&self) -> bool {
        matches!(self, EnergyMode::Srra { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnergyMode::Shannon => Ok(()),
            EnergyMode::Srra { c } if c > 0.0 && c.is_finite() => Ok(()),
            EnergyMode::Srra { .. } => Err(Error::InvalidParameter("srra constant c must be > 0")),
        }
    }
}

#[inline]
fn shannon(h: f64, x: f64) -> f64 {
    // expm1 keeps full precision in the low-rate regime where 2^(h/x) ~ 1.
    x * libm::expm1(h / x * LN_2)
}

/// Energy to send `h` bits in time `x` over a unit path loss.
pub fn tx_energy(h: f64, x: f64, mode: EnergyMode) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::InvalidParameter("bits must be >= 0"));
    }
    match mode {
        EnergyMode::Srra { c } => Ok(c * h),
        EnergyMode::Shannon => {
            if h == 0.0 {
                Ok(0.0)
            } else if !(x > 0.0) {
                Err(Error::InvalidParameter("transmission time must be > 0"))
            } else {
                Ok(shannon(h, x))
            }
        }
    }
}

/// Shortest transmission time in which `h > 0` bits can be sent with
/// energy `e` under the Shannon law.
///
/// `f(h, .)` is strictly decreasing with infimum `h ln 2`, so a unique root
/// exists iff `e > h ln 2`. The root is bracketed by doubling/halving and
/// then refined by bisection safeguarded Newton steps.
pub fn min_time_for_energy(h: f64, e: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter("bits must be > 0"));
    }
    if !(e > h * LN_2) {
        return Err(Error::InfeasibleEnergy { bits: h, energy: e });
    }
    if e.is_infinite() {
        return Ok(0.0);
    }

    let (mut lo, mut hi);
    if shannon(h, h) > e {
        hi = 2.0 * h;
        let mut steps = 0;
        while shannon(h, hi) > e {
            hi *= 2.0;
            steps += 1;
            if steps > BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::Numeric("energy too close to h ln 2 to invert"));
            }
        }
        lo = hi / 2.0;
    } else {
        lo = h / 2.0;
        let mut steps = 0;
        while shannon(h, lo) <= e {
            lo /= 2.0;
            steps += 1;
            if steps > BRACKET_STEPS || lo == 0.0 {
                return Err(Error::Numeric("energy too large to invert"));
            }
        }
        hi = 2.0 * lo;
    }

    // invariant: f(lo) > e >= f(hi). Newton runs on ln f, which is close to
    // linear in 1/t where f blows up; steps leaving the bracket bisect.
    let target = libm::log(e);
    let mut t = 0.5 * (lo + hi);
    for _ in 0..BISECTION_ITERS {
        let u = h / t * LN_2;
        let g = ln_shannon(u, t) - target;
        if g == 0.0 {
            return Ok(t);
        }
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let slope = (1.0 + u / libm::expm1(-u)) / t;
        let newton = t - g / slope;
        let next = if newton > lo && newton < hi && slope < 0.0 {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= 2.0 * f64::EPSILON * t {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

/// `ln f(h, t)` with `u = h ln 2 / t`, finite even where `f` overflows.
fn ln_shannon(u: f64, t: f64) -> f64 {
    let tail = if u > 1.0 {
        u + libm::log1p(-libm::exp(-u))
    } else {
        libm::log(libm::expm1(u))
    };
    libm::log(t) + tail
}

/// Excess of the Shannon energy over its SRRA limit, `f(h, x) - h ln 2`.
pub fn srra_error(h: f64, x: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    (shannon(h, x) - h * LN_2).max(0.0)
}
