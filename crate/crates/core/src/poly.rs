//! Dense complex polynomials: evaluation, differentiation, Taylor shifts and a
//! simultaneous (Aberth–Ehrlich) root finder.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::compensated::CDd;

/// Coefficients whose modulus is below this fraction of the largest
/// coefficient modulus are dropped from the top so that the degree is exact.
pub const TRIM_TOL: f64 = 1e-13;

/// Scale-aware residual tolerance accepted from the root finder.
pub const ROOT_TOL: f64 = 1e-10;

const ABERTH_MAX_ITER: usize = 500;
const ABERTH_STEP_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("the zero polynomial is not allowed")]
    Zero,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("constant polynomial has no nonzero derivative")]
    ConstantDerivative,
    #[error("leading coefficient must be nonzero")]
    ZeroLeading,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial of degree 0 has no roots")]
    Constant,
    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize, best: RootSet },
    #[error("root residual {worst:e} exceeds the scale-aware tolerance")]
    Residual { worst: f64, best: RootSet },
}

/// A complex polynomial `c_0 + c_1 z + ... + c_n z^n` with `c_n != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

/// All roots of a polynomial, with multiplicity, and the residual `|P(r)|` at
/// each.  Sorted by real part, then imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Wire form: ascending `[re, im]` pairs.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Polynomial::new(pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).map_err(de::Error::custom)
    }
}

fn lexicographic(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming negligible
    /// leading terms.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite { index });
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(PolyError::Zero);
        }
        while coeffs.last().is_some_and(|c| c.norm() <= TRIM_TOL * scale) {
            coeffs.pop();
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Expands `leading * prod (z - r)`.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Result<Self, PolyError> {
        if leading.norm() == 0.0 {
            return Err(PolyError::ZeroLeading);
        }
        let mut coeffs = vec![leading];
        for &r in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - r * coeffs[k];
            }
            coeffs[0] *= -r;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is negligible against the coefficient
    /// scale.
    pub fn is_real(&self) -> bool {
        let scale = self.max_coeff_modulus();
        self.coeffs.iter().all(|c| c.im.abs() <= TRIM_TOL * scale)
    }

    /// Compensated Horner evaluation: the result is as accurate as if the
    /// nested scheme were run in twice the working precision.  Overflow falls
    /// back to plain Horner so that infinities propagate.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = CDd::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_c64(z).add_c64(c);
        }
        let value = acc.to_c64();
        if value.re.is_finite() && value.im.is_finite() {
            return value;
        }
        let plain = self.evaluate_plain(z);
        if plain.re.is_nan() || plain.im.is_nan() {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            plain
        }
    }

    /// Ordinary Horner evaluation in working precision.
    pub fn evaluate_plain(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the scale of the rounding error in evaluation.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Result<Polynomial, PolyError> {
        if self.degree() == 0 {
            return Err(PolyError::ConstantDerivative);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Ok(Polynomial { coeffs })
    }

    pub fn scale(&self, s: Complex64) -> Result<Polynomial, PolyError> {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// The polynomial `z -> P(z + a)`, computed with double-double
    /// accumulation.
    pub fn shift(&self, a: Complex64) -> Polynomial {
        let n = self.degree();
        let mut b: Vec<CDd> = self.coeffs.iter().map(|&c| CDd::from_c64(c)).collect();
        for i in 0..n {
            for j in (i..n).rev() {
                b[j] = b[j].add(b[j + 1].mul_c64(a));
            }
        }
        let coeffs = b.into_iter().map(CDd::to_c64).collect();
        // the leading coefficient is untouched by the shift
        Polynomial { coeffs }
    }

    /// All roots with multiplicity.  Exact zero roots are split off first;
    /// the rest are found by Gauss–Seidel Aberth–Ehrlich iteration started
    /// on the Cauchy-bound circle.
    pub fn roots(&self) -> Result<RootSet, RootError> {
        let n = self.degree();
        if n == 0 {
            return Err(RootError::Constant);
        }
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let reduced = &self.coeffs[zeros..];
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        let outcome = match reduced.len() - 1 {
            0 => Ok(Vec::new()),
            1 => Ok(vec![-reduced[0] / reduced[1]]),
            _ => aberth(reduced),
        };
        let (found, converged) = match outcome {
            Ok(found) => (found, None),
            Err((found, iterations)) => (found, Some(iterations)),
        };
        roots.extend(found);
        roots.sort_by(lexicographic);
        let residuals: Vec<f64> = roots.iter().map(|&r| self.evaluate(r).norm()).collect();
        let best = RootSet { roots, residuals };
        if let Some(iterations) = converged {
            return Err(RootError::NoConvergence { iterations, best });
        }
        let scale = self.max_coeff_modulus();
        let worst = best
            .roots
            .iter()
            .zip(&best.residuals)
            .map(|(r, &res)| res / (scale * r.norm().max(1.0).powi(n as i32)))
            .fold(0.0, f64::max);
        if !(worst <= ROOT_TOL) {
            return Err(RootError::Residual { worst, best });
        }
        Ok(best)
    }
}

/// Positive root of `|c_n| x^n = sum_{k<n} |c_k| x^k`, an upper bound on the
/// root moduli.
fn cauchy_radius(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let excess = |x: f64| {
        let lower = coeffs[..n].iter().rev().fold(0.0, |acc, c| acc * x + c.norm());
        lead * x.powi(n as i32) - lower
    };
    let mut hi = 1.0 + coeffs[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, (Vec<Complex64>, usize)> {
    let n = coeffs.len() - 1;
    let deriv: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
    let horner = |cs: &[Complex64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let radius = cauchy_radius(coeffs);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.7))
        .collect();
    let mut done = vec![false; n];
    let err_scale = 8.0 * (n as f64 + 1.0) * f64::EPSILON;

    for iteration in 0..ABERTH_MAX_ITER {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let p = horner(coeffs, zi);
            let bound = err_scale * coeffs.iter().rev().fold(0.0, |acc, c| acc * zi.norm() + c.norm());
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let dp = horner(&deriv, zi);
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // dp == 0 or a collision: nudge deterministically
                z[i] = zi + Complex64::from_polar(1e-8 * radius.max(1.0), i as f64);
                continue;
            }
            z[i] = zi - step;
            if step.norm() <= ABERTH_STEP_TOL * z[i].norm() || p.norm() <= bound {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
        if z.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err((z, iteration + 1));
        }
    }
    Err((z, ABERTH_MAX_ITER))
}
