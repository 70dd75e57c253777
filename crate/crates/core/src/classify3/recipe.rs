//! Constructive certificates `p(x) = k2 x^2 + k1 x + k0` for RAP rows.

use serde::{Deserialize, Serialize};

use super::expr::{Expr, Var};
use super::table::TableEntry;
use crate::ap::PolyCertificate;
use crate::mat::{poly_eval_matrix, Polynomial, RealMatrix};
use crate::signpat::pattern_of;
use crate::{Error, Result};

/// `k2 = +-1`; the ratio `k1/k2` is either fixed or chosen strictly inside
/// `(ratio_lo, ratio_hi)`; `k0` is chosen above the `k0` bound, or above the
/// largest diagonal deficit of `k1 X + k2 X^2` when no bound is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub k2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_lo: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_hi: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<Expr>,
}

impl Recipe {
    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        if self.k2.abs() != 1.0 {
            return Err(format!("recipe k2 must be 1 or -1, found {}", self.k2));
        }
        let bounded = self.ratio_lo.is_some() || self.ratio_hi.is_some();
        if self.ratio.is_some() == bounded {
            return Err("recipe needs either ratio or ratio_lo/ratio_hi".into());
        }
        for e in [&self.ratio, &self.ratio_lo, &self.ratio_hi].into_iter().flatten() {
            let mut vars = Vec::new();
            e.vars(&mut vars);
            if vars.iter().any(|v| !matches!(v, Var::Entry(i, j) if *i < 3 && *j < 3)) {
                return Err(format!("ratio bound {e} uses symbols other than a11..a33"));
            }
        }
        if let Some(e) = &self.k0 {
            let mut vars = Vec::new();
            e.vars(&mut vars);
            if vars.iter().any(|v| matches!(v, Var::Entry(i, j) if *i >= 3 || *j >= 3)) {
                return Err(format!("k0 bound {e} names an entry outside 3x3"));
            }
        }
        Ok(())
    }
}

/// A value strictly above `b`: twice a positive bound, else `b + 1`.
pub fn above(b: f64) -> f64 {
    if b > 0.0 {
        2.0 * b
    } else {
        b + 1.0
    }
}

/// A value strictly below `b`: half a positive bound, else `b - 1`.
pub fn below(b: f64) -> f64 {
    if b > 0.0 {
        b / 2.0
    } else {
        b - 1.0
    }
}

/// Instantiates the row's recipe on `x` and re-evaluates `p(x)`. The result is
/// scaled so that `max(|k1|, |k2|) = 1`.
pub fn recipe_certificate(entry: &TableEntry, x: &RealMatrix) -> Result<PolyCertificate> {
    let recipe = entry
        .recipe
        .as_ref()
        .ok_or_else(|| Error::Table(format!("entry {} has no recipe", entry.id)))?;
    let pattern = pattern_of(x, 0.0);
    if !entry.template.matches(&pattern) {
        return Err(Error::TemplateMismatch {
            entry: entry.id.clone(),
            template: entry.template.to_string(),
            pattern: pattern.to_string(),
        });
    }
    let violation = |detail: String| Error::RecipeViolation {
        entry: entry.id.clone(),
        detail,
    };
    let entries = |v: Var| match v {
        Var::Entry(i, j) => x.get(i, j),
        _ => f64::NAN,
    };
    let ratio = match (&recipe.ratio, &recipe.ratio_lo, &recipe.ratio_hi) {
        (Some(r), _, _) => r.eval(&entries),
        (None, Some(lo), Some(hi)) => {
            let (lo, hi) = (lo.eval(&entries), hi.eval(&entries));
            if !(lo < hi) {
                return Err(violation(format!("empty ratio interval ({lo}, {hi})")));
            }
            (lo + hi) / 2.0
        }
        (None, Some(lo), None) => above(lo.eval(&entries)),
        (None, None, Some(hi)) => below(hi.eval(&entries)),
        (None, None, None) => unreachable!("validated at load"),
    };
    let k2 = recipe.k2;
    let k1 = ratio * k2;
    let homogeneous = poly_eval_matrix(&Polynomial::new(vec![0.0, k1, k2]), x);
    let bound = match &recipe.k0 {
        Some(e) => e.eval(&|v| match v {
            Var::K1 => k1,
            Var::K2 => k2,
            v => entries(v),
        }),
        None => (0..x.n())
            .map(|i| -homogeneous.get(i, i))
            .fold(f64::NEG_INFINITY, f64::max),
    };
    let k0 = above(bound);
    if !ratio.is_finite() || !k0.is_finite() {
        return Err(violation(format!("non-finite coefficients k1/k2 = {ratio}, k0 = {k0}")));
    }
    let s = k1.abs().max(k2.abs());
    let cert = PolyCertificate {
        offdiag_coeffs: vec![k1 / s, k2 / s],
        k0: k0 / s,
        margin: 0.0,
    };
    let p = poly_eval_matrix(&cert.polynomial(), x);
    let n = x.n();
    let (worst, margin) = (0..n * n)
        .map(|k| (k, p.get(k / n, k % n)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty matrix");
    if !(margin > 0.0) {
        return Err(violation(format!(
            "p(X)[{}][{}] = {margin} with k1/k2 = {ratio}, k0 = {k0}",
            worst / n + 1,
            worst % n + 1
        )));
    }
    Ok(PolyCertificate { margin, ..cert })
}
