//! Conformal modulus of the complement of two disjoint real intervals.
//!
//! The modulus is taken with respect to curves separating the two boundary
//! components and normalized so that the annulus `1 < |z| < R` has modulus
//! `ln(R) / (2 pi)`.
//!
//! [`two_slit_modulus`] is the closed form: a real linear fractional map takes
//! `(a, b, c, d)` to `(-1, 0, t, inf)`, and the ring
//! `C \ ([-1, 0] u [t, inf])` has modulus `mu(1/sqrt(1+t)) / pi` where `mu` is
//! the Grötzsch ring function.  [`modulus_oracle`] estimates the same number
//! by a finite-difference Dirichlet problem and exists to validate that
//! closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::moebius::{cross_ratio, ExtReal, ExtendedPoint};

const AGM_MAX_ITER: usize = 64;
const AGM_TOL: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulusError {
    #[error("Grötzsch argument must lie in (0, 1), got {0}")]
    OutOfRange(f64),
    #[error("slit endpoints must satisfy a < b < c < d with only a = -inf or d = +inf allowed")]
    BadDomain,
    #[error("oracle resolution {0} is too coarse (need at least 4)")]
    TooCoarse(usize),
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `mu(r)` from `r` and `r' = sqrt(1 - r^2)` supplied separately, so callers
/// can avoid the cancellation in `1 - r^2`.
fn mu_from_pair(r: f64, r_comp: f64) -> f64 {
    // K(k) = pi / (2 agm(1, k')), so K(r') / K(r) = agm(1, r') / agm(1, r)
    FRAC_PI_2 * agm(1.0, r_comp) / agm(1.0, r)
}

/// The Grötzsch ring function `mu(r) = (pi/2) K(r') / K(r)`, the log-modulus
/// of the unit disk slit along `[0, r]`.
pub fn grotzsch_mu(r: f64) -> Result<f64, ModulusError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(ModulusError::OutOfRange(r));
    }
    Ok(mu_from_pair(r, ((1.0 - r) * (1.0 + r)).sqrt()))
}

/// `C \ ([a, b] u [c, d])` with `a < b < c < d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSlitDomain {
    ends: [ExtReal; 4],
}

impl TwoSlitDomain {
    pub fn new(a: ExtReal, b: ExtReal, c: ExtReal, d: ExtReal) -> Result<Self, ModulusError> {
        let ends = [a, b, c, d];
        let inner_finite = b.is_finite() && c.is_finite();
        let outer_ok = matches!(a, ExtReal::Finite(_) | ExtReal::NegInf)
            && matches!(d, ExtReal::Finite(_) | ExtReal::PosInf)
            && !(a == ExtReal::NegInf && d == ExtReal::PosInf);
        let ordered = ends.windows(2).all(|w| w[0] < w[1]);
        if !(inner_finite && outer_ok && ordered) || ends.iter().any(|e| e.to_f64().is_nan()) {
            return Err(ModulusError::BadDomain);
        }
        Ok(TwoSlitDomain { ends })
    }

    pub fn finite(a: f64, b: f64, c: f64, d: f64) -> Result<Self, ModulusError> {
        Self::new(
            ExtReal::from_f64(a),
            ExtReal::from_f64(b),
            ExtReal::from_f64(c),
            ExtReal::from_f64(d),
        )
    }

    pub fn ends(&self) -> [ExtReal; 4] {
        self.ends
    }

    /// `t > 0` such that a real linear fractional map sends the endpoints to
    /// `(-1, 0, t, inf)`; equal to `-(c, a, b, d)`.
    pub fn normalized_gap(&self) -> f64 {
        let [a, b, c, d] = self.ends.map(ExtendedPoint::from);
        let cr = cross_ratio(c, a, b, d).expect("endpoints are distinct by construction");
        match cr {
            ExtendedPoint::Finite(z) => -z.re,
            ExtendedPoint::Infinity => f64::INFINITY,
        }
    }
}

/// Modulus of the two-slit domain.
pub fn two_slit_modulus(domain: &TwoSlitDomain) -> f64 {
    let t = domain.normalized_gap();
    if t.is_infinite() {
        return f64::INFINITY;
    }
    let r = 1.0 / (1.0 + t).sqrt();
    let r_comp = (t / (1.0 + t)).sqrt();
    mu_from_pair(r, r_comp) / PI
}

/// A grid estimate together with the change produced by the last refinement
/// step after extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

/// Grid parameters for [`modulus_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Intervals across the short side of the coarsest grid; two further
    /// levels double it.
    pub resolution: usize,
    /// Extra length of the truncated half-strip beyond the slit.
    pub padding: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            resolution: 24,
            padding: 7.0,
        }
    }
}

/// Dirichlet energy of the discrete harmonic function on a uniform
/// `nx x ny` rectangle grid.  `fixed(i, j)` gives Dirichlet data; every other
/// boundary node is natural (Neumann).  Five-point stencil, conjugate
/// gradients with Jacobi preconditioning.
fn grid_energy(nx: usize, ny: usize, hx: f64, hy: f64, fixed: impl Fn(usize, usize) -> Option<f64>) -> f64 {
    let w = nx + 1;
    let idx = |i: usize, j: usize| j * w + i;
    let count = w * (ny + 1);
    let wx = hy / hx;
    let wy = hx / hy;

    let mut dirichlet = vec![None; count];
    for j in 0..=ny {
        for i in 0..=nx {
            dirichlet[idx(i, j)] = fixed(i, j);
        }
    }
    let base: Vec<f64> = dirichlet.iter().map(|d| d.unwrap_or(0.0)).collect();

    // edge list with weights; boundary edges carry half weight
    let mut edges = Vec::with_capacity(2 * count);
    for j in 0..=ny {
        for i in 0..=nx {
            if i < nx {
                let half = j == 0 || j == ny;
                edges.push((idx(i, j), idx(i + 1, j), if half { 0.5 * wx } else { wx }));
            }
            if j < ny {
                let half = i == 0 || i == nx;
                edges.push((idx(i, j), idx(i, j + 1), if half { 0.5 * wy } else { wy }));
            }
        }
    }

    let free: Vec<bool> = dirichlet.iter().map(|d| d.is_none()).collect();
    let mut diag = vec![0.0; count];
    for &(p, q, we) in &edges {
        diag[p] += we;
        diag[q] += we;
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(p, q, we) in &edges {
            let flux = we * (v[p] - v[q]);
            out[p] += flux;
            out[q] -= flux;
        }
        for (o, &f) in out.iter_mut().zip(&free) {
            if !f {
                *o = 0.0;
            }
        }
    };

    // solve A v = -A base on free nodes; u = base + v
    let mut rhs = vec![0.0; count];
    apply(&base, &mut rhs);
    rhs.iter_mut().for_each(|r| *r = -*r);
    let mut v = vec![0.0; count];
    let mut res = rhs.clone();
    let precond = |r: &[f64], z: &mut [f64]| {
        for k in 0..count {
            z[k] = if free[k] { r[k] / diag[k] } else { 0.0 };
        }
    };
    let mut z = vec![0.0; count];
    precond(&res, &mut z);
    let mut dir = z.clone();
    let mut rz: f64 = res.iter().zip(&z).map(|(a, b)| a * b).sum();
    let stop = 1e-13 * rhs.iter().map(|r| r * r).sum::<f64>().sqrt();
    let mut ad = vec![0.0; count];
    for _ in 0..20 * count {
        if res.iter().map(|r| r * r).sum::<f64>().sqrt() <= stop {
            break;
        }
        apply(&dir, &mut ad);
        let alpha = rz / dir.iter().zip(&ad).map(|(a, b)| a * b).sum::<f64>();
        for k in 0..count {
            v[k] += alpha * dir[k];
            res[k] -= alpha * ad[k];
        }
        precond(&res, &mut z);
        let rz_next: f64 = res.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..count {
            dir[k] = z[k] + beta * dir[k];
        }
    }

    let u: Vec<f64> = base.iter().zip(&v).map(|(b, v)| b + v).collect();
    edges.iter().map(|&(p, q, we)| we * (u[p] - u[q]).powi(2)).sum()
}

/// Richardson extrapolation of three energies on grids refined by two.
fn extrapolate(e: [f64; 3]) -> (f64, f64) {
    let d1 = e[0] - e[1];
    let d2 = e[1] - e[2];
    let ratio = d1 / d2;
    let factor = if ratio.is_finite() && ratio > 1.2 && ratio < 10.0 {
        ratio
    } else {
        2.0
    };
    let best = e[2] - d2 / (factor - 1.0);
    (best, (best - e[2]).abs())
}

/// Grid estimate of [`two_slit_modulus`].
///
/// A real linear fractional map takes the domain to the slits
/// `[-1/A, -A]` and `[A, 1/A]`, which is invariant under `z -> 1/conj(z)`,
/// `z -> conj(z)` and, up to swapping the slits, `z -> -conj(z)`.  Those
/// symmetries reduce the problem to an eighth: under `w = log z` it lives on
/// the half-strip `Re w < 0, 0 < Im w < pi/2` with `u = 1` on
/// `[log A, 0]`, `u = 1/2` on `Im w = pi/2` and natural conditions elsewhere.
/// The strip is truncated `padding` beyond the slit.
pub fn modulus_oracle(domain: &TwoSlitDomain, config: &OracleConfig) -> Result<OracleEstimate, ModulusError> {
    if config.resolution < 4 {
        return Err(ModulusError::TooCoarse(config.resolution));
    }
    let t = domain.normalized_gap();
    if t > 1.0 {
        // the slits [b, c] and [d, a] give the conjugate ring, with gap 1/t and
        // reciprocal extremal length: mod(G) mod(G*) = 1/4
        let dual = strip_oracle(1.0 / t, config);
        let value = 0.25 / dual.value;
        return Ok(OracleEstimate {
            value,
            error_estimate: value * dual.error_estimate / dual.value,
        });
    }
    Ok(strip_oracle(t, config))
}

fn strip_oracle(t: f64, config: &OracleConfig) -> OracleEstimate {
    let a = t.sqrt() / (1.0 + (1.0 + t).sqrt());
    let slit = -a.ln();

    let mut energies = [0.0; 3];
    for (level, energy) in energies.iter_mut().enumerate() {
        let ny = config.resolution << level;
        let hy = FRAC_PI_2 / ny as f64;
        let m = ((slit / hy).round() as usize).max(2 << level);
        let hx = slit / m as f64;
        let k = (config.padding / hx).ceil() as usize;
        let nx = m + k;
        let quarter = grid_energy(nx, ny, hx, hy, |i, j| {
            if j == ny || i == 0 {
                Some(0.5)
            } else if j == 0 && i >= k {
                Some(1.0)
            } else {
                None
            }
        });
        *energy = 8.0 * quarter;
    }
    let (energy, err) = extrapolate(energies);
    let value = 1.0 / energy;
    OracleEstimate {
        value,
        error_estimate: value * err / energy,
    }
}

/// The same solver on `1 < |z| < R` (in logarithmic coordinates a rectangle
/// with `u = 0` and `u = 1` on the ends).
pub fn annulus_oracle(outer_radius: f64, resolution: usize) -> Result<OracleEstimate, ModulusError> {
    if resolution < 4 {
        return Err(ModulusError::TooCoarse(resolution));
    }
    if !(outer_radius > 1.0) {
        return Err(ModulusError::BadDomain);
    }
    let width = outer_radius.ln();
    let mut energies = [0.0; 3];
    for (level, energy) in energies.iter_mut().enumerate() {
        let ny = resolution << level;
        let hy = 2.0 * PI / ny as f64;
        let nx = ((width / hy).round() as usize).max(2);
        let hx = width / nx as f64;
        *energy = grid_energy(nx, ny, hx, hy, |i, _| match i {
            0 => Some(0.0),
            i if i == nx => Some(1.0),
            _ => None,
        });
    }
    let (energy, err) = extrapolate(energies);
    Ok(OracleEstimate {
        value: 1.0 / energy,
        error_estimate: err / (energy * energy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_examples() {
        let m = grotzsch_mu(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((m - FRAC_PI_2).abs() < 1e-14);
        for r in [0.01, 0.3, 0.5, 0.9, 0.999] {
            let rc = (1.0f64 - r * r).sqrt();
            let prod = grotzsch_mu(r).unwrap() * grotzsch_mu(rc).unwrap();
            assert!((prod - PI * PI / 4.0).abs() < 1e-13, "r={r}");
        }
        let mut last = f64::INFINITY;
        for k in 1..53 {
            let r = 1.0 - 0.5f64.powi(k);
            let m = grotzsch_mu(r).unwrap();
            assert!(m < last && m > 0.0);
            last = m;
        }
        // mu(r) ~ pi^2 / (4 ln(4/r')) as r -> 1
        let eps = 0.5f64.powi(52);
        let rc = (eps * (2.0 - eps)).sqrt();
        assert!((last - PI * PI / (4.0 * (4.0 / rc).ln())).abs() < 1e-6);
        // small r: mu(r) ~ ln(4/r)
        let r = 1e-8;
        assert!((grotzsch_mu(r).unwrap() - (4.0 / r).ln()).abs() < 1e-12);
    }

    #[test]
    fn mu_rejects_out_of_range() {
        for r in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(grotzsch_mu(r).is_err());
        }
    }

    #[test]
    fn scaling_invariance() {
        let a = two_slit_modulus(&TwoSlitDomain::finite(-3.0, -1.0, 1.0, 3.0).unwrap());
        let b = two_slit_modulus(&TwoSlitDomain::finite(-6.0, -2.0, 2.0, 6.0).unwrap());
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn symmetric_limits() {
        let wide = two_slit_modulus(&TwoSlitDomain::finite(-1e6, -1.0, 1.0, 1e6).unwrap());
        let thin = two_slit_modulus(&TwoSlitDomain::finite(-1.0 - 1e-6, -1.0, 1.0, 1.0 + 1e-6).unwrap());
        assert!(wide < 0.2, "{wide}");
        assert!(thin > 2.0, "{thin}");
    }

    #[test]
    fn infinite_endpoint_matches_limit() {
        let inf = TwoSlitDomain::new(
            ExtReal::Finite(-1.0),
            ExtReal::Finite(0.0),
            ExtReal::Finite(2.0),
            ExtReal::PosInf,
        )
        .unwrap();
        let far = TwoSlitDomain::finite(-1.0, 0.0, 2.0, 1e12).unwrap();
        assert!((two_slit_modulus(&inf) - two_slit_modulus(&far)).abs() < 1e-10);
        assert!((inf.normalized_gap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_agrees_with_closed_form() {
        for ends in [(-3.0, -1.0, 1.0, 3.0), (0.0, 1.0, 1.5, 40.0), (-2.0, 0.5, 0.6, 0.7)] {
            let dom = TwoSlitDomain::finite(ends.0, ends.1, ends.2, ends.3).unwrap();
            let exact = two_slit_modulus(&dom);
            let est = modulus_oracle(&dom, &OracleConfig::default()).unwrap();
            assert!(
                (est.value - exact).abs() <= 1e-3 * exact,
                "{ends:?}: {} vs {exact}",
                est.value
            );
        }
    }

    #[test]
    fn oracle_reflection_symmetry() {
        let cfg = OracleConfig {
            resolution: 12,
            padding: 6.0,
        };
        let a = modulus_oracle(&TwoSlitDomain::finite(-4.0, -1.0, 0.5, 2.0).unwrap(), &cfg).unwrap();
        let b = modulus_oracle(&TwoSlitDomain::finite(-2.0, -0.5, 1.0, 4.0).unwrap(), &cfg).unwrap();
        assert!((a.value - b.value).abs() <= 1e-12 * a.value);
    }

    #[test]
    fn annulus_sanity() {
        for r in [1.5, 4.0, 50.0] {
            let est = annulus_oracle(r, 12).unwrap();
            let exact = f64::ln(r) / (2.0 * PI);
            assert!((est.value - exact).abs() <= 1e-3 * exact);
        }
        assert!(annulus_oracle(2.0, 3).is_err());
        assert!(annulus_oracle(0.5, 8).is_err());
    }

    #[test]
    fn bad_domains() {
        assert!(TwoSlitDomain::finite(0.0, 0.0, 1.0, 2.0).is_err());
        assert!(TwoSlitDomain::finite(0.0, 2.0, 1.0, 3.0).is_err());
        assert!(TwoSlitDomain::new(
            ExtReal::NegInf,
            ExtReal::Finite(0.0),
            ExtReal::Finite(1.0),
            ExtReal::PosInf
        )
        .is_err());
        assert_eq!(
            modulus_oracle(
                &TwoSlitDomain::finite(-3.0, -1.0, 1.0, 3.0).unwrap(),
                &OracleConfig {
                    resolution: 2,
                    padding: 7.0
                }
            ),
            Err(ModulusError::TooCoarse(2))
        );
    }
}
