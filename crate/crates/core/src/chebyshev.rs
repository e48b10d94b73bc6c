//! Chebyshev polynomials of the first kind and the inverse branch on the ray
//! `[cos(pi/(2n)), +inf)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::moebius::{ExtReal, ExtendedPoint};
use crate::poly::Polynomial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChebError {
    #[error("Chebyshev degree must be at least 2, got {0}")]
    Degree(usize),
    #[error("inverse branch needs y >= 0, got {0}")]
    Negative(f64),
    #[error("polynomial has degree {got}, expected {expected}")]
    DegreeMismatch { expected: usize, got: usize },
}

/// Degree `n >= 2` of a Chebyshev polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChebDegree(usize);

impl ChebDegree {
    pub fn new(n: usize) -> Result<Self, ChebError> {
        if n < 2 {
            Err(ChebError::Degree(n))
        } else {
            Ok(ChebDegree(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// `T_n(x)` for real `x`: trigonometric on `[-1, 1]`, hyperbolic outside.
pub fn cheb_eval_real(n: ChebDegree, x: f64) -> f64 {
    let nf = n.0 as f64;
    if x.abs() <= 1.0 {
        (nf * x.acos()).cos()
    } else if x > 1.0 {
        (nf * x.acosh()).cosh()
    } else {
        let v = (nf * (-x).acosh()).cosh();
        if n.0.is_multiple_of(2) {
            v
        } else {
            -v
        }
    }
}

/// `T_n(z) = ((z + s)^n + (z - s)^n) / 2` with `s = sqrt(z^2 - 1)`, using the
/// branch of `w = z +- s` with `|w| >= 1` so that `T_n = (w^n + w^-n) / 2`
/// never cancels.
pub fn cheb_eval(n: ChebDegree, z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(cheb_eval_real(n, z.re), 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    let s = (z - one).sqrt() * (z + one).sqrt();
    let mut w = z + s;
    if w.norm() < 1.0 {
        w = z - s;
    }
    let wn = w.powu(n.0 as u32);
    if !(wn.re.is_finite() && wn.im.is_finite()) {
        return wn;
    }
    (wn + wn.inv()) * 0.5
}

/// Integer coefficients of `T_n` from `T_{k+1} = 2 z T_k - T_{k-1}`.
pub fn cheb_coeffs(n: ChebDegree) -> Polynomial {
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    for _ in 1..n.0 {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] += 2.0 * c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    Polynomial::from_real(&cur).expect("Chebyshev coefficients are finite and nonzero")
}

/// `cos(pi / (2n))`, the largest zero of `T_n`.
pub fn largest_zero(n: ChebDegree) -> f64 {
    (PI / (2.0 * n.0 as f64)).cos()
}

/// The unique `x >= cos(pi/(2n))` with `T_n(x) = y`.  Values within `1e-15`
/// below zero are clamped; `+inf` maps to `+inf`.
pub fn cheb_inverse_ray(n: ChebDegree, y: f64) -> Result<f64, ChebError> {
    if y.is_nan() || y < -1e-15 {
        return Err(ChebError::Negative(y));
    }
    let y = y.max(0.0);
    let nf = n.0 as f64;
    Ok(if y <= 1.0 {
        (y.acos() / nf).cos()
    } else if y.is_infinite() {
        f64::INFINITY
    } else {
        (y.acosh() / nf).cosh()
    })
}

/// `x_P(z)`: the point of the ray where `T_n` equals `|P(z)|`.
pub fn x_of(p: &Polynomial, n: ChebDegree, z: ExtendedPoint) -> Result<ExtReal, ChebError> {
    if p.degree() != n.0 {
        return Err(ChebError::DegreeMismatch {
            expected: n.0,
            got: p.degree(),
        });
    }
    let Some(z) = z.finite() else {
        return Ok(ExtReal::PosInf);
    };
    let modulus = p.evaluate(z).norm();
    Ok(ExtReal::from_f64(cheb_inverse_ray(n, modulus)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(n: usize) -> ChebDegree {
        ChebDegree::new(n).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cheb_eval_real(deg(2), 3.0), 17.0);
        assert!((cheb_eval_real(deg(3), 2.0) - 26.0).abs() < 1e-12);
        assert!((cheb_eval_real(deg(5), 1.0) - 1.0).abs() < 1e-15);
        assert!((cheb_eval_real(deg(3), -2.0) + 26.0).abs() < 1e-12);
    }

    #[test]
    fn complex_eval_matches_coefficients() {
        for n in 2..=12 {
            let p = cheb_coeffs(deg(n));
            for z in [
                Complex64::new(0.3, 0.4),
                Complex64::new(-2.0, 1.5),
                Complex64::new(0.0, -3.0),
            ] {
                let a = cheb_eval(deg(n), z);
                let b = p.evaluate(z);
                assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(cheb_coeffs(deg(2)), Polynomial::from_real(&[-1.0, 0.0, 2.0]).unwrap());
        assert_eq!(
            cheb_coeffs(deg(3)),
            Polynomial::from_real(&[0.0, -3.0, 0.0, 4.0]).unwrap()
        );
        assert_eq!(
            cheb_coeffs(deg(4)),
            Polynomial::from_real(&[1.0, 0.0, -8.0, 0.0, 8.0]).unwrap()
        );
        assert_eq!(cheb_coeffs(deg(11)).leading().re, 1024.0);
    }

    #[test]
    fn largest_zero_examples() {
        assert!((largest_zero(deg(2)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((largest_zero(deg(3)) - 0.75f64.sqrt()).abs() < 1e-15);
        // beyond n ~ 20 the rounding of the zero itself, amplified by
        // T_n' ~ 2n^2/pi, exceeds 1e-14
        for n in 2..=20 {
            assert!(cheb_eval_real(deg(n), largest_zero(deg(n))).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_examples() {
        assert!((cheb_inverse_ray(deg(2), 17.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(cheb_inverse_ray(deg(5), 1.0).unwrap(), 1.0);
        assert!((cheb_inverse_ray(deg(3), 0.0).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(cheb_inverse_ray(deg(3), f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(cheb_inverse_ray(deg(3), -1e-16).unwrap(), largest_zero(deg(3)));
        assert_eq!(cheb_inverse_ray(deg(3), -0.1), Err(ChebError::Negative(-0.1)));
    }

    #[test]
    fn x_of_examples() {
        let t2 = cheb_coeffs(deg(2));
        let x = x_of(&t2, deg(2), ExtendedPoint::real(-3.0)).unwrap();
        assert!((x.finite().unwrap() - 3.0).abs() < 1e-15);
        let t3 = cheb_coeffs(deg(3));
        let z = largest_zero(deg(3));
        let x = x_of(&t3, deg(3), ExtendedPoint::real(z)).unwrap().finite().unwrap();
        assert!((x - z).abs() < 1e-8);
        assert_eq!(x_of(&t3, deg(3), ExtendedPoint::Infinity), Ok(ExtReal::PosInf));
        assert!(x_of(&t3, deg(2), ExtendedPoint::real(1.0)).is_err());
    }

    #[test]
    fn degree_below_two_rejected() {
        assert_eq!(ChebDegree::new(1), Err(ChebError::Degree(1)));
    }
}
