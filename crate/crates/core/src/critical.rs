//! Critical points and values, membership in the class of polynomials whose
//! critical values lie in the closed unit disk, and the two-sided bounds on
//! the largest critical value of a polynomial vanishing at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{PolyError, Polynomial, RootError, TRIM_TOL};

/// `|c_0| <= ZERO_CONST_TOL * max |c_k|` counts as `P(0) = 0`.
pub const ZERO_CONST_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("need degree >= 2, got {0}")]
    Degree(usize),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("all critical values vanish; the polynomial is already in the class")]
    ZeroCriticalValues,
    #[error("hypothesis failed: {0}")]
    Hypothesis(BoundHypothesis),
    #[error("sampling gave no usable polynomial after {0} attempts")]
    RetriesExhausted(u32),
}

/// Named precondition of the critical-value bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundHypothesis {
    DegreeAtLeastTwo,
    ConstantTermZero,
    LinearTermNonzero,
}

impl std::fmt::Display for BoundHypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundHypothesis::DegreeAtLeastTwo => "degree >= 2",
            BoundHypothesis::ConstantTermZero => "P(0) = 0",
            BoundHypothesis::LinearTermNonzero => "P'(0) != 0",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalProfile {
    pub critical_points: Vec<Complex64>,
    pub critical_values: Vec<Complex64>,
    /// Largest `|P(zeta)|`.
    pub max_modulus: f64,
}

impl CriticalProfile {
    pub fn min_modulus(&self) -> f64 {
        self.critical_values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn critical_profile(p: &Polynomial) -> Result<CriticalProfile, CriticalError> {
    if p.degree() < 2 {
        return Err(CriticalError::Degree(p.degree()));
    }
    let critical_points = p.derivative()?.roots()?.roots;
    let critical_values: Vec<Complex64> = critical_points.iter().map(|&z| p.evaluate(z)).collect();
    let max_modulus = critical_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(CriticalProfile {
        critical_points,
        critical_values,
        max_modulus,
    })
}

/// Whether every critical value has modulus at most `1 + tol`.
pub fn is_in_class(p: &Polynomial, tol: f64) -> Result<(bool, CriticalProfile), CriticalError> {
    let profile = critical_profile(p)?;
    Ok((profile.max_modulus <= 1.0 + tol, profile))
}

/// `P / M` with `M` the largest critical-value modulus.
pub fn normalize_to_class(p: &Polynomial) -> Result<Polynomial, CriticalError> {
    let m = critical_profile(p)?.max_modulus;
    if m == 0.0 {
        return Err(CriticalError::ZeroCriticalValues);
    }
    Ok(p.scale(Complex64::new(1.0 / m, 0.0))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMode {
    Real,
    #[default]
    Complex,
    /// Each polynomial is real or complex with equal probability.
    Mixed,
}

/// Coefficient sampling for random class members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    /// Real and imaginary parts are drawn uniformly from `[-range, range]`.
    pub coeff_range: f64,
    pub mode: CoeffMode,
    /// Lower bound on `|c_n| / range`.
    pub min_leading: f64,
    /// Force `c_0 = 0`.
    pub zero_constant: bool,
    pub retry_cap: u32,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            coeff_range: 1.0,
            mode: CoeffMode::Complex,
            min_leading: 0.05,
            zero_constant: false,
            retry_cap: 16,
        }
    }
}

impl SamplingConfig {
    pub fn real() -> Self {
        SamplingConfig {
            mode: CoeffMode::Real,
            ..Self::default()
        }
    }

    pub fn with_zero_constant(mut self) -> Self {
        self.zero_constant = true;
        self
    }
}

fn sample_coeff(rng: &mut impl Rng, r: f64, complex: bool) -> Complex64 {
    let re = rng.random_range(-r..=r);
    let im = if complex { rng.random_range(-r..=r) } else { 0.0 };
    Complex64::new(re, im)
}

/// Arbitrary degree-`n` polynomial drawn from `cfg`, not normalized.
pub fn random_polynomial(n: usize, rng: &mut impl Rng, cfg: &SamplingConfig) -> Result<Polynomial, CriticalError> {
    for _ in 0..cfg.retry_cap.max(1) {
        let complex = match cfg.mode {
            CoeffMode::Real => false,
            CoeffMode::Complex => true,
            CoeffMode::Mixed => rng.random_bool(0.5),
        };
        let mut coeffs: Vec<Complex64> = (0..=n).map(|_| sample_coeff(rng, cfg.coeff_range, complex)).collect();
        if cfg.zero_constant {
            coeffs[0] = Complex64::new(0.0, 0.0);
        }
        if coeffs[n].norm() < cfg.min_leading * cfg.coeff_range {
            continue;
        }
        if cfg.zero_constant && coeffs[1].norm() <= TRIM_TOL * cfg.coeff_range {
            continue;
        }
        if let Ok(p) = Polynomial::new(coeffs) {
            if p.degree() == n {
                return Ok(p);
            }
        }
    }
    Err(CriticalError::RetriesExhausted(cfg.retry_cap))
}

/// A reproducible random member of the class with largest critical-value
/// modulus equal to one.
pub fn random_in_class(n: usize, seed: u64, cfg: &SamplingConfig) -> Result<Polynomial, CriticalError> {
    if n < 2 {
        return Err(CriticalError::Degree(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.retry_cap.max(1) {
        let Ok(p) = random_polynomial(n, &mut rng, cfg) else {
            continue;
        };
        match normalize_to_class(&p) {
            Ok(q) => return Ok(q),
            Err(CriticalError::ZeroCriticalValues | CriticalError::Roots(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CriticalError::RetriesExhausted(cfg.retry_cap))
}

/// `(n, |c_1|, |c_n|)` after checking `n >= 2`, `c_0 = 0`, `c_1 != 0`.
fn bound_inputs(p: &Polynomial) -> Result<(f64, f64, f64), CriticalError> {
    let n = p.degree();
    if n < 2 {
        return Err(CriticalError::Hypothesis(BoundHypothesis::DegreeAtLeastTwo));
    }
    let scale = p.max_coeff_modulus();
    if p.coeff(0).norm() > ZERO_CONST_TOL * scale {
        return Err(CriticalError::Hypothesis(BoundHypothesis::ConstantTermZero));
    }
    let c1 = p.coeff(1).norm();
    if c1 <= TRIM_TOL * scale {
        return Err(CriticalError::Hypothesis(BoundHypothesis::LinearTermNonzero));
    }
    Ok((n as f64, c1, p.leading().norm()))
}

/// `ln |c_1^n / c_n|^(1/(n-1))`.
fn log_coefficient_factor(n: f64, c1: f64, cn: f64) -> f64 {
    (n * c1.ln() - cn.ln()) / (n - 1.0)
}

/// Lower bound on the largest critical-value modulus:
/// `2 (sin(pi/(2n)) / n)^(n/(n-1)) |c_1^n / c_n|^(1/(n-1))`.
pub fn cor4_lower_bound(p: &Polynomial) -> Result<f64, CriticalError> {
    let (n, c1, cn) = bound_inputs(p)?;
    let log_shape = (n / (n - 1.0)) * ((PI / (2.0 * n)).sin() / n).ln();
    Ok((2f64.ln() + log_shape + log_coefficient_factor(n, c1, cn)).exp())
}

/// `(n - 1) (1/n)^(n/(n-1)) |c_1^n / c_n|^(1/(n-1))`.
pub fn cor4_upper_bound(p: &Polynomial) -> Result<f64, CriticalError> {
    let (n, c1, cn) = bound_inputs(p)?;
    let log_shape = (n - 1.0).ln() - (n / (n - 1.0)) * n.ln();
    Ok((log_shape + log_coefficient_factor(n, c1, cn)).exp())
}
