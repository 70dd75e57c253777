//! The two algebraic-positivity oracles and their reconciliation.
//!
//! The spectral oracle looks for a simple real eigenvalue whose left and right
//! eigenvectors are both entrywise positive. The certificate oracle searches
//! for `k_1..k_d` with `|k_i| <= 1` maximizing the smallest off-diagonal entry
//! of `sum k_i A^i`; a positive optimum plus a constant shift `k_0` gives a
//! polynomial with `p(A) > 0`.

mod simplex;

use serde::{Deserialize, Serialize};

use crate::mat::{eigen_all, poly_eval_matrix, EigenPair, Polynomial, RealMatrix, DEFAULT_TOL};
use crate::{Error, Result};

pub use simplex::{maximize, LpSolution};

pub const DEFAULT_BORDERLINE: f64 = 1e-6;
pub const DEFAULT_LP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Realness, positivity and simplicity threshold of the spectral oracle.
    pub tol: f64,
    /// Oracle disagreements with a margin inside this band are reported as borderline.
    pub borderline: f64,
    /// Smallest LP optimum accepted as a certificate.
    pub lp_eps: f64,
    /// Degree of the certificate polynomial; `None` means `n - 1`.
    pub max_degree: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            borderline: DEFAULT_BORDERLINE,
            lp_eps: DEFAULT_LP_EPS,
            max_degree: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCertificate {
    #[serde(flatten)]
    pub pair: EigenPair,
    /// Smallest coordinate across the left and right vectors.
    pub min_entry: f64,
}

impl EigenCertificate {
    pub fn gap(&self) -> f64 {
        self.pair.gap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCertificate {
    /// `k_1..k_d`, scaled so that the largest magnitude is 1.
    #[serde(rename = "k")]
    pub offdiag_coeffs: Vec<f64>,
    pub k0: f64,
    /// Smallest entry of `p(A)`.
    pub margin: f64,
}

impl PolyCertificate {
    pub fn polynomial(&self) -> Polynomial {
        let mut c = vec![self.k0];
        c.extend_from_slice(&self.offdiag_coeffs);
        Polynomial::new(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Agreement {
    Agree,
    EigenOnly,
    PolyOnly,
    Borderline,
}

/// Scale-free margins of both oracles, recorded whether or not a certificate was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// Best (largest) eigenvector minimum over the real eigenpairs; absent without real eigenvalues.
    pub eigen_min_entry: Option<f64>,
    /// Simplicity gap of that pair divided by `||A||_inf`.
    pub eigen_gap: Option<f64>,
    /// LP optimum on the power-normalized problem.
    pub lp_t: f64,
}

impl Margins {
    /// True when any margin is inside `band`, i.e. a verdict could flip under rounding.
    /// The LP optimum is never negative (`k = 0` is feasible) and is exactly 0 for
    /// every matrix without a certificate, so only a small positive optimum counts.
    pub fn near_boundary(&self, band: f64) -> bool {
        self.eigen_min_entry.is_some_and(|m| m.abs() < band)
            || self.eigen_gap.is_some_and(|g| g < band)
            || (self.lp_t > 0.0 && self.lp_t < band)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApVerdict {
    pub is_ap: bool,
    pub eigen: Option<EigenCertificate>,
    pub poly: Option<PolyCertificate>,
    pub agreement: Agreement,
    pub margins: Margins,
}

/// Result of scanning every real eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenScan {
    pub certificate: Option<EigenCertificate>,
    pub best_min_entry: Option<f64>,
    pub best_relative_gap: Option<f64>,
}

impl EigenScan {
    pub fn near_boundary(&self, band: f64) -> bool {
        self.best_min_entry.is_some_and(|m| m.abs() < band)
            || self.best_relative_gap.is_some_and(|g| g < band)
    }
}

pub fn eigen_scan(a: &RealMatrix, tol: f64) -> Result<EigenScan> {
    let pairs = eigen_all(a, tol)?;
    let scale = a.norm_inf().max(f64::MIN_POSITIVE);
    let gap_floor = tol * scale.max(1.0);
    let mut certificate = None;
    let mut best: Option<&EigenPair> = None;
    // pairs come sorted by decreasing value, so the first qualifying one is the largest
    for p in &pairs {
        let me = p.min_entry();
        if certificate.is_none() && me > tol && p.gap > gap_floor {
            certificate = Some(EigenCertificate {
                pair: p.clone(),
                min_entry: me,
            });
        }
        if best.is_none_or(|b| me > b.min_entry()) {
            best = Some(p);
        }
    }
    let best = match &certificate {
        Some(c) => Some(&c.pair),
        None => best,
    };
    Ok(EigenScan {
        best_min_entry: best.map(EigenPair::min_entry),
        best_relative_gap: best.map(|p| p.gap / scale),
        certificate,
    })
}

/// Spectral oracle: the largest simple real eigenvalue with strictly positive
/// left and right eigenvectors, if any.
pub fn eigen_ap_check(a: &RealMatrix, tol: f64) -> Result<Option<EigenCertificate>> {
    Ok(eigen_scan(a, tol)?.certificate)
}

/// Optimal LP value `t` and coefficients for the columns `A^i / ||A^i||`.
fn lp_search(a: &RealMatrix, max_degree: usize) -> Result<(f64, Vec<f64>)> {
    let n = a.n();
    let mut powers = Vec::with_capacity(max_degree);
    let mut norms = Vec::with_capacity(max_degree);
    let mut p = a.clone();
    for _ in 0..max_degree {
        let norm = p.norm_inf();
        powers.push(if norm > 0.0 { p.scale(1.0 / norm) } else { p.clone() });
        norms.push(norm);
        p = p.mul(a);
    }
    // variables: t, k+_1..k+_d, k-_1..k-_d (all >= 0)
    let d = max_degree;
    let nv = 1 + 2 * d;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..n {
        for s in 0..n {
            if r == s {
                continue;
            }
            let mut row = vec![0.0; nv];
            row[0] = 1.0;
            for i in 0..d {
                let v = powers[i].get(r, s);
                row[1 + i] = -v;
                row[1 + d + i] = v;
            }
            rows.push(row);
            rhs.push(0.0);
        }
    }
    for j in 1..nv {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        rows.push(row);
        rhs.push(1.0);
    }
    let mut c = vec![0.0; nv];
    c[0] = 1.0;
    let sol = maximize(&c, &rows, &rhs)?.ok_or(Error::LpNumericalFailure { pivots: 0 })?;
    let k: Vec<f64> = (0..d)
        .map(|i| {
            let kk = sol.x[1 + i] - sol.x[1 + d + i];
            if norms[i] > 0.0 {
                kk / norms[i]
            } else {
                0.0
            }
        })
        .collect();
    Ok((sol.objective, k))
}

/// Certificate oracle. Returns the certificate when the LP optimum exceeds `eps`.
pub fn certificate_search(a: &RealMatrix, max_degree: usize, eps: f64) -> Result<Option<PolyCertificate>> {
    Ok(certificate_with_t(a, max_degree, eps)?.1)
}

fn certificate_with_t(a: &RealMatrix, max_degree: usize, eps: f64) -> Result<(f64, Option<PolyCertificate>)> {
    assert!(max_degree >= 1, "max_degree must be at least 1");
    let (t, k) = lp_search(a, max_degree)?;
    if t <= eps {
        return Ok((t, None));
    }
    let kmax = k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let k: Vec<f64> = k.iter().map(|x| x / kmax).collect();
    let mut coeffs = vec![0.0];
    coeffs.extend_from_slice(&k);
    let homogeneous = poly_eval_matrix(&Polynomial::new(coeffs), a);
    let off = homogeneous.min_offdiag();
    if off <= 0.0 {
        return Ok((t, None));
    }
    let deficit = (0..a.n())
        .map(|i| -homogeneous.get(i, i))
        .fold(f64::NEG_INFINITY, f64::max);
    let k0 = deficit + off;
    let mut cert = PolyCertificate {
        offdiag_coeffs: k,
        k0,
        margin: 0.0,
    };
    cert.margin = poly_eval_matrix(&cert.polynomial(), a).min_entry();
    Ok((t, Some(cert)))
}

/// Runs both oracles. The verdict follows the spectral oracle.
pub fn is_ap(a: &RealMatrix, cfg: &Tolerances) -> Result<ApVerdict> {
    let scan = eigen_scan(a, cfg.tol)?;
    let degree = cfg.max_degree.unwrap_or(a.n() - 1).max(1);
    let (lp_t, poly) = certificate_with_t(a, degree, cfg.lp_eps)?;
    let margins = Margins {
        eigen_min_entry: scan.best_min_entry,
        eigen_gap: scan.best_relative_gap,
        lp_t,
    };
    let agreement = match (scan.certificate.is_some(), poly.is_some()) {
        (e, p) if e == p => Agreement::Agree,
        _ if margins.near_boundary(cfg.borderline) => Agreement::Borderline,
        (true, false) => Agreement::EigenOnly,
        _ => Agreement::PolyOnly,
    };
    Ok(ApVerdict {
        is_ap: scan.certificate.is_some(),
        eigen: scan.certificate,
        poly,
        agreement,
        margins,
    })
}

/// The transformations that preserve algebraic positivity.
#[derive(Debug, Clone, PartialEq)]
pub enum Closure {
    Transpose,
    Negate,
    /// `(i, j) -> (perm[i], perm[j])`
    PermSim(Vec<usize>),
    /// `beta * A + alpha * I`
    Affine { alpha: f64, beta: f64 },
}

pub fn closure_transform(a: &RealMatrix, which: &Closure) -> Result<RealMatrix> {
    Ok(match which {
        Closure::Transpose => a.transpose(),
        Closure::Negate => a.scale(-1.0),
        Closure::PermSim(p) => {
            let mut seen = vec![false; a.n()];
            if p.len() != a.n() || p.iter().any(|&i| i >= a.n() || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::DimensionMismatch {
                    left: a.n(),
                    right: p.len(),
                });
            }
            a.permute(p)
        }
        Closure::Affine { beta, .. } if *beta == 0.0 => return Err(Error::DegenerateScale),
        Closure::Affine { alpha, beta } => a.scale(*beta).shift(*alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> RealMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn rank_one_positive() {
        let c = eigen_ap_check(&m("1 1; 1 1"), DEFAULT_TOL).unwrap().unwrap();
        assert!((c.pair.value - 2.0).abs() < 1e-12);
        assert_eq!(c.pair.right, vec![1.0, 1.0]);
        assert_eq!(c.pair.left, vec![1.0, 1.0]);
    }

    #[test]
    fn positive_matrix_certificate_is_identity_power() {
        let a = m("1 2 3; 4 5 6; 7 8 9");
        let c = certificate_search(&a, 2, DEFAULT_LP_EPS).unwrap().unwrap();
        assert!(c.margin > 0.0);
        let p = poly_eval_matrix(&c.polynomial(), &a);
        assert!(p.min_entry() > 0.0);
        assert!(c.offdiag_coeffs.iter().any(|k| (k.abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cyclic_skew_needs_square() {
        let a = m("0 -1 1; 1 0 -1; -1 1 0");
        let c = certificate_search(&a, 2, DEFAULT_LP_EPS).unwrap().unwrap();
        assert!(c.margin > 0.0);
        // A alone has negative off-diagonal entries on both sides, so k_1 must vanish
        assert!(c.offdiag_coeffs[0].abs() < 1e-12);
        assert!((c.offdiag_coeffs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_not_ap() {
        let v = is_ap(&m("0 1; -1 0"), &Tolerances::default()).unwrap();
        assert!(!v.is_ap);
        assert!(v.poly.is_none());
        assert_eq!(v.agreement, Agreement::Agree);
    }

    #[test]
    fn closure_errors_and_identities() {
        let a = m("1 2; 3 4");
        assert!(matches!(
            closure_transform(&a, &Closure::Affine { alpha: 1.0, beta: 0.0 }),
            Err(Error::DegenerateScale)
        ));
        assert_eq!(closure_transform(&a, &Closure::Affine { alpha: 0.0, beta: 1.0 }).unwrap(), a);
        let twice = closure_transform(&closure_transform(&a, &Closure::Negate).unwrap(), &Closure::Negate).unwrap();
        assert_eq!(twice, a);
        assert!(closure_transform(&a, &Closure::PermSim(vec![0, 0])).is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let v = is_ap(&m("1 1; 1 1"), &Tolerances::default()).unwrap();
        let e = serde_json::to_value(v.eigen.unwrap()).unwrap();
        for key in ["lambda", "left", "right", "gap"] {
            assert!(e.get(key).is_some(), "{key}");
        }
        let p = serde_json::to_value(v.poly.unwrap()).unwrap();
        for key in ["k", "k0", "margin"] {
            assert!(p.get(key).is_some(), "{key}");
        }
    }
}
