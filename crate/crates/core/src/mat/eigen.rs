use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{char_poly, cubic_roots, poly_roots, RealMatrix};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_EIGEN_CAP: usize = 8;

/// A real eigenvalue with normalized right/left eigenvectors and its simplicity gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    #[serde(rename = "lambda")]
    pub value: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// Distance to the nearest other root; zero when the eigenspace is
    /// numerically more than one-dimensional.
    pub gap: f64,
}

impl EigenPair {
    pub fn min_entry(&self) -> f64 {
        self.right
            .iter()
            .chain(&self.left)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Full root multiset of the characteristic polynomial.
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<Complex64>> {
    let p = char_poly(a);
    if a.n() == 3 {
        Ok(cubic_roots(p.coeffs[2], p.coeffs[1], p.coeffs[0]).to_vec())
    } else {
        poly_roots(&p.coeffs)
    }
}

/// Every real eigenvalue of `a` (realness: `|Im| <= tol (1 + |root|)`) with
/// its eigenvectors, sorted by decreasing value.
pub fn eigen_all(a: &RealMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    if a.n() > DEFAULT_EIGEN_CAP {
        return Err(Error::TooLarge {
            n: a.n(),
            cap: DEFAULT_EIGEN_CAP,
        });
    }
    let roots = eigenvalues(a)?;
    let at = a.transpose();
    let pivot_tol = tol * a.norm_inf().max(f64::MIN_POSITIVE);
    let mut pairs = Vec::new();
    for (k, z) in roots.iter().enumerate() {
        if z.im.abs() > tol * (1.0 + z.norm()) {
            continue;
        }
        let lambda = z.re;
        let mut gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, w)| (w - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        let right = null_space(&a.shift(-lambda), pivot_tol);
        let left = null_space(&at.shift(-lambda), pivot_tol);
        if right.len() > 1 || left.len() > 1 {
            gap = 0.0;
        }
        pairs.push(EigenPair {
            value: lambda,
            right: normalize(right.into_iter().next().expect("null space is never empty")),
            left: normalize(left.into_iter().next().expect("null space is never empty")),
            gap,
        });
    }
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

/// Basis of the numerical null space of `m`, by row reduction with partial
/// pivoting. Columns whose best pivot falls below `pivot_tol` are free. When
/// every column pivots, the column with the smallest pivot is forced free, so
/// the result always has at least one vector.
pub fn null_space(m: &RealMatrix, pivot_tol: f64) -> Vec<Vec<f64>> {
    let red = Reduction::new(m, pivot_tol, None);
    if !red.free.is_empty() {
        return red.basis();
    }
    let weakest = red
        .pivots
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|p| p.1)
        .expect("nonempty matrix");
    Reduction::new(m, pivot_tol, Some(weakest)).basis()
}

/// Reduced row echelon form with the bookkeeping needed to read off a null-space basis.
struct Reduction {
    rows: Vec<Vec<f64>>,
    /// `(row, column, |pivot|)`
    pivots: Vec<(usize, usize, f64)>,
    free: Vec<usize>,
}

impl Reduction {
    fn new(m: &RealMatrix, pivot_tol: f64, forced_free: Option<usize>) -> Self {
        let n = m.n();
        let mut r = m.rows();
        let mut free = Vec::new();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if Some(col) == forced_free || row == n {
                free.push(col);
                continue;
            }
            let (best, mag) = (row..n)
                .map(|i| (i, r[i][col].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("row < n");
            if mag <= pivot_tol {
                free.push(col);
                continue;
            }
            r.swap(row, best);
            let p = r[row][col];
            for x in r[row].iter_mut() {
                *x /= p;
            }
            let pivot = r[row].clone();
            for (i, ri) in r.iter_mut().enumerate() {
                let f = ri[col];
                if i != row && f != 0.0 {
                    for (x, p) in ri.iter_mut().zip(&pivot) {
                        *x -= f * p;
                    }
                }
            }
            pivots.push((row, col, mag));
            row += 1;
        }
        Self {
            rows: r,
            pivots,
            free,
        }
    }

    fn basis(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        self.free
            .iter()
            .map(|&f| {
                let mut v = vec![0.0; n];
                v[f] = 1.0;
                for &(r, c, _) in &self.pivots {
                    v[c] = -self.rows[r][f];
                }
                v
            })
            .collect()
    }
}

/// Unit max-norm, first clearly nonzero coordinate positive.
fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return v;
    }
    for x in v.iter_mut() {
        *x /= max;
    }
    let first = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if first < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    v
}
