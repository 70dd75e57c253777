//! Sign patterns: matrices over `{-, 0, +}` standing for the class of real
//! matrices with those entry signs.

mod group;
mod subclass;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{digraph_of, strongly_connected};
use crate::mat::RealMatrix;
use crate::{Error, Result};

pub use group::{canonical_form, equivalent, orbit, EquivTransform};
pub use subclass::{subclass_check, ShiftRule, SubclassVerdict};

/// Ordered `Minus < Zero < Plus`, which fixes the lexicographic canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of(x: f64, zero_tol: f64) -> Self {
        if x.abs() <= zero_tol {
            Sign::Zero
        } else if x > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Plus),
            _ => None,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
            Sign::Plus => 1.0,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern {
    n: usize,
    cells: Vec<Sign>,
}

impl SignPattern {
    pub fn new(n: usize, cells: Vec<Sign>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::NotSquare { n, len: cells.len() });
        }
        Ok(Self { n, cells })
    }

    pub fn filled(n: usize, s: Sign) -> Self {
        Self {
            n,
            cells: vec![s; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Sign] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> Sign {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Sign) {
        self.cells[i * self.n + j] = s;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.cells[j * n + i] = self.cells[i * n + j];
            }
        }
        out
    }

    pub fn negate(&self) -> Self {
        Self {
            n: self.n,
            cells: self.cells.iter().map(|&s| -s).collect(),
        }
    }

    /// Digraph strongly connected.
    pub fn is_irreducible(&self) -> bool {
        strongly_connected(&digraph_of(self))
    }

    /// Mixed-radix code with base 3 digits `Minus=0, Zero=1, Plus=2`, first cell most significant.
    pub fn code(&self) -> u64 {
        self.cells.iter().fold(0u64, |acc, &s| acc * 3 + s as u64)
    }

    pub fn from_code(n: usize, mut code: u64) -> Self {
        let mut cells = vec![Sign::Zero; n * n];
        for c in cells.iter_mut().rev() {
            *c = match code % 3 {
                0 => Sign::Minus,
                1 => Sign::Zero,
                _ => Sign::Plus,
            };
            code /= 3;
        }
        Self { n, cells }
    }
}

/// Rows separated by `/`, cells from `+ - 0`, e.g. `0+0/+0-/+0+`.
impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.trim().split('/').collect();
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let row: Vec<char> = row.chars().filter(|c| !c.is_whitespace()).collect();
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "pattern row {} has {} cells, expected {n}",
                    r + 1,
                    row.len()
                )));
            }
            for c in row {
                cells.push(
                    Sign::from_char(c)
                        .ok_or_else(|| Error::Parse(format!("bad sign {c:?} in pattern {s:?}")))?,
                );
            }
        }
        Self::new(n, cells)
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.cells.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for s in row {
                write!(f, "{}", s.to_char())?;
            }
        }
        Ok(())
    }
}

impl Serialize for SignPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Entrywise sign; `|x| <= zero_tol` maps to zero.
pub fn pattern_of(x: &RealMatrix, zero_tol: f64) -> SignPattern {
    SignPattern {
        n: x.n(),
        cells: x.as_slice().iter().map(|&v| Sign::of(v, zero_tol)).collect(),
    }
}

/// Magnitudes drawn log-uniformly from `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeProfile {
    pub lo: f64,
    pub hi: f64,
}

impl Default for MagnitudeProfile {
    fn default() -> Self {
        Self { lo: 1e-2, hi: 1e2 }
    }
}

impl MagnitudeProfile {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.lo.log10(), self.hi.log10());
        10f64.powf(rng.gen_range(a..=b))
    }
}

/// A member of the pattern class, from a caller-supplied generator.
pub fn sample_with<R: Rng + ?Sized>(s: &SignPattern, rng: &mut R, profile: MagnitudeProfile) -> RealMatrix {
    let data = s
        .cells
        .iter()
        .map(|&c| match c {
            Sign::Zero => 0.0,
            _ => c.factor() * profile.draw(rng),
        })
        .collect();
    RealMatrix::new(s.n, data).expect("finite by construction")
}

/// A member of the pattern class, deterministic in `seed`.
pub fn sample(s: &SignPattern, seed: u64, profile: MagnitudeProfile) -> RealMatrix {
    sample_with(s, &mut ChaCha8Rng::seed_from_u64(seed), profile)
}

/// `(A+, A-)`: the Plus cells and the Minus cells.
pub fn decompose(s: &SignPattern) -> (SignPattern, SignPattern) {
    let keep = |want: Sign| SignPattern {
        n: s.n,
        cells: s.cells.iter().map(|&c| if c == want { c } else { Sign::Zero }).collect(),
    };
    (keep(Sign::Plus), keep(Sign::Minus))
}

/// `A+ - A-^T`: Plus where `S` is Plus or `S^T` is Minus.
pub fn b_matrix(s: &SignPattern) -> SignPattern {
    let n = s.n;
    let mut out = SignPattern::filled(n, Sign::Zero);
    for i in 0..n {
        for j in 0..n {
            if s.get(i, j) == Sign::Plus || s.get(j, i) == Sign::Minus {
                out.set(i, j, Sign::Plus);
            }
        }
    }
    out
}

/// `S` irreducible and `B_S` reducible. True proves the pattern excludes AP.
pub fn theorem4_excludes(s: &SignPattern) -> bool {
    s.is_irreducible() && !b_matrix(s).is_irreducible()
}

/// Every row and column holds a Plus, or every row and column holds a Minus.
/// False proves the pattern excludes AP.
pub fn row_col_necessary(s: &SignPattern) -> bool {
    let n = s.n;
    let covers = |want: Sign| {
        (0..n).all(|i| (0..n).any(|j| s.get(i, j) == want)) && (0..n).all(|j| (0..n).any(|i| s.get(i, j) == want))
    };
    covers(Sign::Plus) || covers(Sign::Minus)
}
