use num_complex::Complex64;

use crate::{Error, Result};

const MAX_ITER: usize = 500;

/// Roots of the monic cubic `x^3 + b x^2 + c x + d` in closed form,
/// each polished by Newton steps that are kept only when they reduce `|p|`.
pub fn cubic_roots(b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if disc < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [0.0, 1.0, 2.0].map(|k| Complex64::new(r * (phi - tau * k).cos() - shift, 0.0))
    } else {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let re = -(u + v) / 2.0 - shift;
        let im = 3f64.sqrt() / 2.0 * (u - v);
        [
            Complex64::new(u + v - shift, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    };
    let coeffs = [d, c, b, 1.0];
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (pz, dz) = eval_with_derivative(&coeffs, *z);
            if dz.norm() == 0.0 {
                break;
            }
            let next = *z - pz / dz;
            // a real root must stay real
            let next = if z.im == 0.0 { Complex64::new(next.re, 0.0) } else { next };
            if eval_with_derivative(&coeffs, next).0.norm() < pz.norm() {
                *z = next;
            } else {
                break;
            }
        }
    }
    roots
}

/// All complex roots of `sum coeffs[i] x^i` by Aberth-Ehrlich simultaneous iteration.
/// Leading zero coefficients are dropped; exact zero roots are split off first.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let mut roots = Vec::new();
    while c.len() > 1 && c[0] == 0.0 {
        roots.push(Complex64::new(0.0, 0.0));
        c.remove(0);
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(roots);
    }
    let lead = c[deg];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    if deg == 1 {
        roots.push(Complex64::new(-c[0], 0.0));
        return Ok(roots);
    }

    let radius = c[0].abs().powf(1.0 / deg as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4))
        .collect();
    let abs_c: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    let mut done = vec![false; deg];
    for _ in 0..MAX_ITER {
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&c, z[i]);
            let bound = horner_abs(&abs_c, z[i].norm());
            if p.norm() <= 8.0 * deg as f64 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            roots.extend(z);
            return Ok(roots);
        }
    }
    Err(Error::RootFindingFailure {
        iterations: MAX_ITER,
    })
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn horner_abs(abs_coeffs: &[f64], r: f64) -> f64 {
    abs_coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn cubic_three_real() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let r = sorted_re(cubic_roots(-6.0, 11.0, -6.0).to_vec());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_complex_pair() {
        // x^3 - 1
        let r = cubic_roots(0.0, 0.0, -1.0);
        assert!((r[0].re - 1.0).abs() < 1e-14 && r[0].im == 0.0);
        assert!((r[1].im.abs() - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((r[1].re + 0.5).abs() < 1e-14);
    }

    #[test]
    fn aberth_quartic() {
        // (x^2+1)(x-2)(x+3) = x^4 + x^3 - 5x^2 + x - 6
        let r = poly_roots(&[-6.0, 1.0, -5.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.len(), 4);
        let real: Vec<f64> = sorted_re(r.iter().copied().filter(|z| z.im.abs() < 1e-9).collect());
        assert_eq!(real.len(), 2);
        assert!((real[0] + 3.0).abs() < 1e-12 && (real[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn aberth_multiple_root_terminates() {
        // (x-1)^4
        let r = poly_roots(&[1.0, -4.0, 6.0, -4.0, 1.0]).unwrap();
        for z in r {
            assert!((z - 1.0).norm() < 1e-3);
        }
    }

    #[test]
    fn zero_roots_split_off() {
        let r = poly_roots(&[0.0, 0.0, -1.0, 1.0]).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }
}
