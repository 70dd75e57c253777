//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`,
//! so the all-slack basis is feasible and no phase one is needed.

use crate::{Error, Result};

const PIVOT_BUDGET: usize = 10_000;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Bland's rule throughout (lowest-index entering and leaving variables), which
/// rules out cycling on the degenerate vertices these problems start from.
/// An unbounded objective is reported as `None`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Option<LpSolution>> {
    let m = a.len();
    let nv = c.len();
    debug_assert!(b.iter().all(|&x| x >= 0.0), "origin must be feasible");
    let width = nv + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..nv].copy_from_slice(&a[i]);
        t[i][nv + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..nv {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    for _ in 0..PIVOT_BUDGET {
        let Some(enter) = (0..width - 1).find(|&j| t[m][j] < -EPS) else {
            let mut x = vec![0.0; nv];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < nv {
                    x[bv] = t[i][width - 1];
                }
            }
            return Ok(Some(LpSolution {
                x,
                objective: t[m][width - 1],
            }));
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i][enter];
            if coef > EPS {
                let ratio = t[i][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Ok(None);
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
    }
    Err(Error::LpNumericalFailure {
        pivots: PIVOT_BUDGET,
    })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for x in t[row].iter_mut() {
        *x /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
        }
    }
}
