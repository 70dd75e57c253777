//! Explicit example matrices attached to table rows, and their verification.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::expr::{Expr, Var};
use super::table::{SuspectPart, TableEntry};
use crate::ap::{is_ap, Agreement, Tolerances};
use crate::mat::RealMatrix;
use crate::signpat::pattern_of;
use crate::{Error, Result};

/// One entry in an assignment chain: `sign * a_ij = value`, or both signs for `+-`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    i: usize,
    j: usize,
    negated: bool,
    either_sign: bool,
    value: f64,
}

/// Entry values written as chains, e.g. `+-a11=a12=-a21=1; a23=10`.
/// Unassigned entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    text: String,
    terms: Vec<Term>,
}

impl Assignment {
    /// Every cell assigned once, indices inside an `n x n` matrix.
    pub fn validate(&self, n: usize) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for t in &self.terms {
            if t.i >= n || t.j >= n {
                return Err(format!("witness {:?} names a{}{} outside {n}x{n}", self.text, t.i + 1, t.j + 1));
            }
            if !seen.insert((t.i, t.j)) {
                return Err(format!("witness {:?} assigns a{}{} twice", self.text, t.i + 1, t.j + 1));
            }
        }
        Ok(())
    }

    /// One matrix per sign choice of the `+-` terms, in a fixed order.
    pub fn matrices(&self, n: usize) -> Vec<RealMatrix> {
        let free: Vec<&Term> = self.terms.iter().filter(|t| t.either_sign).collect();
        (0..free.len())
            .map(|_| [1.0, -1.0])
            .multi_cartesian_product()
            .map(|signs| {
                let mut m = RealMatrix::zeros(n);
                for t in &self.terms {
                    m.set(t.i, t.j, if t.negated { -t.value } else { t.value });
                }
                for (t, s) in free.iter().zip(&signs) {
                    m.set(t.i, t.j, s * t.value);
                }
                m
            })
            .collect()
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("witness {s:?}: {why}"));
        let mut terms = Vec::new();
        for chain in s.split(';') {
            let parts: Vec<&str> = chain.split('=').map(str::trim).collect();
            let (value, names) = parts.split_last().ok_or_else(|| bad("empty chain"))?;
            if names.is_empty() {
                return Err(bad("chain without an entry"));
            }
            let value: f64 = value.parse().map_err(|_| bad("chain must end in a number"))?;
            if !value.is_finite() {
                return Err(bad("value is not finite"));
            }
            for name in names {
                let (either_sign, negated, rest) = if let Some(r) = name.strip_prefix("+-") {
                    (true, false, r)
                } else if let Some(r) = name.strip_prefix('-') {
                    (false, true, r)
                } else {
                    (false, false, *name)
                };
                let Ok(Expr::Var(Var::Entry(i, j))) = rest.parse() else {
                    return Err(bad(&format!("{name:?} is not an entry")));
                };
                terms.push(Term {
                    i,
                    j,
                    negated,
                    either_sign,
                    value,
                });
            }
        }
        Ok(Self {
            text: s.to_string(),
            terms,
        })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub assign: Assignment,
    /// Expected verdict.
    pub ap: bool,
    /// Original text when `assign` corrects it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed: Option<String>,
}

impl Witness {
    /// The matrices this witness stands for. Sign choices that leave the
    /// template are dropped unless none fits, in which case all are kept
    /// (and reported as outside the class).
    pub fn matrices(&self, entry: &TableEntry) -> Vec<RealMatrix> {
        let all = self.assign.matrices(entry.template.n());
        let fitting: Vec<RealMatrix> = all
            .iter()
            .filter(|m| entry.template.matches(&pattern_of(m, 0.0)))
            .cloned()
            .collect();
        if fitting.is_empty() {
            all
        } else {
            fitting
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub entry: String,
    pub assign: String,
    pub matrix: RealMatrix,
    pub expected_ap: bool,
    /// Spectral verdict.
    pub eigen_ap: bool,
    /// Certificate verdict.
    pub lp_ap: bool,
    pub agreement: Agreement,
    /// Either oracle margin is inside the borderline band.
    pub borderline: bool,
    pub eigen_margin: Option<f64>,
    pub lp_margin: f64,
    /// The matrix belongs to the row's pattern class.
    pub in_class: bool,
    /// The printed condition evaluated on the matrix, when the row has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_slack: Option<f64>,
    /// `eigen_ap == expected_ap`.
    #[serde(rename = "match")]
    pub matches: bool,
    /// The row's witnesses are marked suspect.
    pub suspect: bool,
}

/// Builds every witness matrix of the row and runs both oracles on it.
pub fn verify_witnesses(entry: &TableEntry, tol: &Tolerances) -> Result<Vec<WitnessCheck>> {
    let mut out = Vec::new();
    for w in &entry.witnesses {
        for m in w.matrices(entry) {
            let v = is_ap(&m, tol)?;
            let env = |var: Var| match var {
                Var::Entry(i, j) => m.get(i, j),
                _ => f64::NAN,
            };
            out.push(WitnessCheck {
                entry: entry.id.clone(),
                assign: w.assign.to_string(),
                expected_ap: w.ap,
                eigen_ap: v.is_ap,
                lp_ap: v.poly.is_some(),
                agreement: v.agreement,
                borderline: v.margins.near_boundary(tol.borderline),
                eigen_margin: v.margins.eigen_min_entry,
                lp_margin: v.margins.lp_t,
                in_class: entry.template.matches(&pattern_of(&m, 0.0)),
                condition: entry.condition.as_ref().map(|c| c.holds(&env)),
                condition_slack: entry.condition.as_ref().map(|c| c.slack(&env)),
                matches: v.is_ap == w.ap,
                suspect: entry.suspects(SuspectPart::Witness),
                matrix: m,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_and_signs() {
        let a: Assignment = "+-a11=a12=-a21=1; a23=a31=10".parse().unwrap();
        assert!(a.validate(3).is_ok());
        let ms = a.matrices(3);
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].to_string(), "1 1 0; -1 0 10; 10 0 0");
        assert_eq!(ms[1].get(0, 0), -1.0);
        assert_eq!(a.to_string(), "+-a11=a12=-a21=1; a23=a31=10");
    }

    #[test]
    fn malformed_assignments() {
        assert!("a11=".parse::<Assignment>().is_err());
        assert!("1".parse::<Assignment>().is_err());
        assert!("a11=x".parse::<Assignment>().is_err());
        assert!("b11=1".parse::<Assignment>().is_err());
        let twice: Assignment = "a11=a12=1; a11=2".parse().unwrap();
        assert!(twice.validate(3).is_err());
        let outside: Assignment = "a14=1".parse().unwrap();
        assert!(outside.validate(3).is_err());
    }
}
