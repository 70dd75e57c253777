//! Dense small-matrix numerics.

mod eigen;
mod poly;
mod roots;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use eigen::{eigen_all, eigenvalues, null_space, EigenPair, DEFAULT_EIGEN_CAP, DEFAULT_TOL};
pub use poly::{char_poly, poly_eval_matrix, Polynomial};
pub use roots::{cubic_roots, poly_roots};

/// Dense square matrix stored row-major. Entries are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::NotSquare { n, len: data.len() });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    n,
                    len: rows.iter().map(Vec::len).sum(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Panics on a non-finite value; callers build entries from finite arithmetic.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(v.is_finite(), "non-finite matrix entry");
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self + s * I`
    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `P A P^T` for the permutation matrix with `P[i][perm[i]] = 1`,
    /// i.e. entry `(i, j)` of the result is `A[perm[i]][perm[j]]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        assert_eq!(perm.len(), n, "permutation length");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[perm[i] * n + perm[j]];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest entry off the diagonal, `+inf` for n = 1.
    pub fn min_offdiag(&self) -> f64 {
        let n = self.n;
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.min(self.data[i * n + j]);
                }
            }
        }
        m
    }
}

impl TryFrom<Vec<Vec<f64>>> for RealMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<RealMatrix> for Vec<Vec<f64>> {
    fn from(m: RealMatrix) -> Self {
        m.rows()
    }
}

/// Text form: rows separated by `;`, entries by whitespace or `,`.
impl FromStr for RealMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let body = s.trim().strip_suffix(';').unwrap_or(s.trim());
        for (r, line) in body.split(';').enumerate() {
            let row = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number {t:?} in row {}", r + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.is_empty() {
                return Err(Error::Parse(format!("row {} is empty", r + 1)));
            }
            rows.push(row);
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {n}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_format() {
        let m: RealMatrix = "1 2, 3; 4e0,5 6; -7 8 9.5".parse().unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.get(2, 0), -7.0);
        assert_eq!(m.get(2, 2), 9.5);
        let back: RealMatrix = m.to_string().parse().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!("1 2; 3".parse::<RealMatrix>().is_err());
        assert!("1 x; 3 4".parse::<RealMatrix>().is_err());
        assert!("1 inf; 3 4".parse::<RealMatrix>().is_err());
        assert!("".parse::<RealMatrix>().is_err());
    }

    #[test]
    fn permute_matches_definition() {
        let a: RealMatrix = "1 2 3; 4 5 6; 7 8 9".parse().unwrap();
        let p = a.permute(&[2, 0, 1]);
        assert_eq!(p.get(0, 0), 9.0);
        assert_eq!(p.get(0, 1), 7.0);
        assert_eq!(p.get(1, 2), 2.0);
    }

    #[test]
    fn json_round_trip() {
        let a: RealMatrix = "1 -2; 0.5 3".parse().unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,3.0]]");
        let b: RealMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
