//! Primal simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! Revised form: the basis matrix is refactorized from the original data at
//! every iteration, which is cheap because the row count is small (one per
//! node) and keeps long pivot chains free of accumulated drift. The slack
//! basis is feasible from the start, so no phase one is needed. Entering
//! columns are priced by largest reduced cost until the first degenerate
//! pivot; from then on the smallest-index (Bland) rule is used, which rules
//! out cycling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `b - A x` per row.
    pub slack: Vec<f64>,
    /// Basic variable per row; indices `>= n` are slacks.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Unbounded,
}

/// Dense LU factorization with partial pivoting, `P B = L U`.
struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<Vec<f64>>) -> Option<Self> {
        let m = a.len();
        let mut perm: Vec<usize> = (0..m).collect();
        for c in 0..m {
            let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
            if !(a[p][c].abs() > 1e-14) {
                return None;
            }
            a.swap(p, c);
            perm.swap(p, c);
            for r in c + 1..m {
                let f = a[r][c] / a[c][c];
                a[r][c] = f;
                if f != 0.0 {
                    for k in c + 1..m {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    /// `B x = rhs`.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for r in 0..m {
            for k in 0..r {
                x[r] -= self.lu[r][k] * x[k];
            }
        }
        for r in (0..m).rev() {
            for k in r + 1..m {
                x[r] -= self.lu[r][k] * x[k];
            }
            x[r] /= self.lu[r][r];
        }
        x
    }

    /// `B^T y = rhs`.
    fn solve_transposed(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut z = rhs.to_vec();
        for r in 0..m {
            for k in 0..r {
                z[r] -= self.lu[k][r] * z[k];
            }
            z[r] /= self.lu[r][r];
        }
        for r in (0..m).rev() {
            for k in r + 1..m {
                z[r] -= self.lu[k][r] * z[k];
            }
        }
        let mut y = vec![0.0; m];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

/// Solves the LP; `rows[i][j]` is the coefficient of `x_j` in row `i`.
pub fn maximize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<LpStatus> {
    let n = c.len();
    let m = b.len();
    if rows.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("constraint matrix shape mismatch"));
    }
    if !b.iter().all(|&v| v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(
            "right-hand side must be finite and >= 0",
        ));
    }
    if !c.iter().chain(rows.iter().flatten()).all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("coefficients must be finite"));
    }
    // column j of [A I]
    let column = |j: usize| -> Vec<f64> {
        if j < n {
            rows.iter().map(|r| r[j]).collect()
        } else {
            (0..m).map(|i| if i == j - n { 1.0 } else { 0.0 }).collect()
        }
    };
    let cost = |j: usize| if j < n { c[j] } else { 0.0 };
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;
    let mut bland = false;

    let xb = loop {
        let bmat: Vec<Vec<f64>> = {
            let cols: Vec<Vec<f64>> = basis.iter().map(|&j| column(j)).collect();
            (0..m)
                .map(|i| cols.iter().map(|col| col[i]).collect())
                .collect()
        };
        let lu = Lu::new(bmat).ok_or(Error::Numeric("singular simplex basis"))?;
        let xb: Vec<f64> = lu.solve(b).into_iter().map(|v| v.max(0.0)).collect();
        let cb: Vec<f64> = basis.iter().map(|&j| cost(j)).collect();
        let y = lu.solve_transposed(&cb);

        let reduced = |j: usize| -> f64 {
            if j < n {
                c[j] - rows.iter().zip(&y).map(|(r, yi)| r[j] * yi).sum::<f64>()
            } else {
                -y[j - n]
            }
        };
        let mut in_basis = vec![false; n + m];
        for &j in &basis {
            in_basis[j] = true;
        }
        let mut entering: Option<(usize, f64)> = None;
        for j in (0..n + m).filter(|&j| !in_basis[j]) {
            let r = reduced(j);
            if r > COST_TOL {
                if bland {
                    entering = Some((j, r));
                    break;
                }
                if entering.map_or(true, |(_, best)| r > best) {
                    entering = Some((j, r));
                }
            }
        }
        let Some((q, _)) = entering else { break xb };

        let d = lu.solve(&column(q));
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if d[i] > PIVOT_TOL {
                let ratio = xb[i] / d[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                        if ratio < best && !tie || tie && basis[i] < basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
        }
        let Some((p, ratio)) = leave else {
            return Ok(LpStatus::Unbounded);
        };
        basis[p] = q;
        bland |= ratio <= 1e-12;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Numeric("simplex pivot limit reached"));
        }
    };

    let mut x = vec![0.0; n];
    for (&j, v) in basis.iter().zip(xb) {
        if j < n {
            x[j] = v;
        }
    }
    let slack = rows
        .iter()
        .zip(b)
        .map(|(r, &bi)| bi - r.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>())
        .collect();
    let objective = c.iter().zip(&x).map(|(a, v)| a * v).sum();
    Ok(LpStatus::Optimal(LpSolution {
        x,
        objective,
        slack,
        basis,
        pivots,
    }))
}
