use std::fmt;

use serde::{Deserialize, Serialize};

use super::RealMatrix;

/// Real polynomial; `coeffs[i]` is the coefficient of `x^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Self { coeffs }
    }

    /// Nominal degree (length - 1); the leading coefficient may be zero.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Highest power first, zero terms dropped: `x^2 - 0.5 x + 3`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            match (first, c < 0.0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag != 1.0 => write!(f, "{mag} ")?,
                _ => {}
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `det(xI - A)` by the Faddeev-LeVerrier recurrence. Leading coefficient is exactly 1.
pub fn char_poly(a: &RealMatrix) -> Polynomial {
    let n = a.n();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = RealMatrix::zeros(n);
    for k in 1..=n {
        m = a.mul(&m).shift(coeffs[n - k + 1]);
        coeffs[n - k] = -a.mul(&m).trace() / k as f64;
    }
    Polynomial { coeffs }
}

/// Horner evaluation `p(A) = (((c_d A + c_{d-1} I) A + ...) A + c_0 I`.
pub fn poly_eval_matrix(p: &Polynomial, a: &RealMatrix) -> RealMatrix {
    let n = a.n();
    let mut acc = RealMatrix::zeros(n).shift(p.coeffs[p.degree()]);
    for &c in p.coeffs.iter().rev().skip(1) {
        acc = acc.mul(a).shift(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> RealMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::new(vec![3.0, -0.5, 1.0]).to_string(), "x^2 - 0.5 x + 3");
        assert_eq!(Polynomial::new(vec![0.0, 2.0, -1.0]).to_string(), "-x^2 + 2 x");
        assert_eq!(Polynomial::new(vec![0.0]).to_string(), "0");
    }

    #[test]
    fn identity_and_cycle() {
        assert_eq!(char_poly(&RealMatrix::identity(2)).coeffs, vec![1.0, -2.0, 1.0]);
        assert_eq!(
            char_poly(&m("0 1 0; 0 0 1; 1 0 0")).coeffs,
            vec![-1.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn horner_examples() {
        let a = m("0 -1 1; 1 0 -1; -1 1 0");
        assert_eq!(poly_eval_matrix(&Polynomial::new(vec![0.0, 1.0]), &a), a);
        let p = poly_eval_matrix(&Polynomial::new(vec![5.0, 0.0, 1.0]), &a);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), if i == j { 3.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn constant_polynomial() {
        let a = m("1 2; 3 4");
        assert_eq!(
            poly_eval_matrix(&Polynomial::new(vec![2.5]), &a),
            RealMatrix::identity(2).scale(2.5)
        );
    }
}
