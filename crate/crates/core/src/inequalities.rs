//! One checker per inequality.  Every checker returns an [`InequalityReport`]
//! with the two sides arranged as `lhs <= rhs`.
//!
//! A checker returns `Err` only when the numerics themselves fail (for
//! example a critical-point solve that does not converge).  Unmet hypotheses
//! are reported with `hypothesis_ok = false` and `holds = false`, and a note
//! naming the hypothesis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chebyshev::{cheb_eval_real, cheb_inverse_ray, x_of, ChebDegree, ChebError};
use crate::critical::{
    cor4_lower_bound, cor4_upper_bound, critical_profile, is_in_class, CriticalError, ZERO_CONST_TOL,
};
use crate::modulus::{two_slit_modulus, TwoSlitDomain};
use crate::moebius::{cross_ratio, CollinearQuad, ExtReal, ExtendedPoint, GeometryError};
use crate::poly::{Polynomial, TRIM_TOL};

/// Relative part of the comparison `lhs <= rhs (1 + HOLD_REL) + HOLD_ABS`.
pub const HOLD_REL: f64 = 1e-9;
/// Absolute part of the comparison.
pub const HOLD_ABS: f64 = 1e-12;
/// Default tolerance for class membership and other hypotheses.
pub const DEFAULT_TOL: f64 = 1e-9;
/// The derivative ratio is compared with one at this tolerance, which covers
/// the central-difference error.
pub const EQ8_TOL: f64 = 1e-6;
/// Largest accepted `|Im| / |value|` of a cross ratio of collinear points.
pub const REALIFY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Chebyshev(#[from] ChebError),
    #[error("coefficients are not real")]
    ComplexCoefficients,
    #[error("need degree >= 2, got {0}")]
    Degree(usize),
    #[error("cross ratio of collinear points has imaginary part {residue:e} relative to its modulus")]
    NotReal { residue: f64 },
}

/// The statements that have a checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    Theorem1,
    Corollary1,
    Corollary2,
    Corollary3,
    Corollary4,
    Corollary4Upper,
    Corollary5,
    Eq8,
    Remark1,
}

impl Statement {
    pub const ALL: [Statement; 9] = [
        Statement::Theorem1,
        Statement::Corollary1,
        Statement::Corollary2,
        Statement::Corollary3,
        Statement::Corollary4,
        Statement::Corollary4Upper,
        Statement::Corollary5,
        Statement::Eq8,
        Statement::Remark1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Statement::Theorem1 => "theorem1",
            Statement::Corollary1 => "corollary1",
            Statement::Corollary2 => "corollary2",
            Statement::Corollary3 => "corollary3",
            Statement::Corollary4 => "corollary4",
            Statement::Corollary4Upper => "corollary4_upper",
            Statement::Corollary5 => "corollary5",
            Statement::Eq8 => "eq8",
            Statement::Remark1 => "remark1",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Statement::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Statement::ALL.iter().map(|s| s.as_str()).collect();
            format!("unknown statement {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Serializable form of a [`CollinearQuad`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub base: [f64; 2],
    pub direction: [f64; 2],
    pub t: [ExtReal; 4],
}

impl QuadSpec {
    pub fn to_quad(&self) -> Result<CollinearQuad, GeometryError> {
        CollinearQuad::new(
            Complex64::new(self.base[0], self.base[1]),
            Complex64::new(self.direction[0], self.direction[1]),
            self.t,
        )
    }
}

impl From<&CollinearQuad> for QuadSpec {
    fn from(q: &CollinearQuad) -> Self {
        QuadSpec {
            base: [q.base().re, q.base().im],
            direction: [q.direction().re, q.direction().im],
            t: q.params(),
        }
    }
}

/// Inputs and intermediate quantities of a check.  Only `quad`, `x`, `h` and
/// `tol` are read back as inputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// `x_P(z_k)` for the points of the check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_p: Option<Vec<ExtReal>>,
    /// Ray parameter of the point in the Chebyshev growth check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fired: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_critical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_critical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_within_upper: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Everything needed to rerun a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub poly: Polynomial,
    #[serde(default)]
    pub points: Vec<ExtendedPoint>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: Statement,
    pub n: usize,
    pub holds: bool,
    pub hypothesis_ok: bool,
    pub degenerate: bool,
    pub lhs: Option<ExtReal>,
    pub rhs: Option<ExtReal>,
    /// `rhs - lhs`; `+inf` when `rhs` is infinite.
    pub slack: Option<ExtReal>,
    pub witnesses: Witnesses,
    pub seed: Option<u64>,
}

impl InequalityReport {
    /// `(rhs - lhs) / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub fn relative_slack(&self) -> Option<f64> {
        let (lhs, rhs) = (self.lhs?, self.rhs?);
        if rhs == ExtReal::PosInf {
            return Some(f64::INFINITY);
        }
        let (l, r) = (lhs.to_f64(), rhs.to_f64());
        let scale = l.abs().max(r.abs());
        Some(if scale == 0.0 { 0.0 } else { (r - l) / scale })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// The mixed comparison used by every checker.
pub fn within(lhs: f64, rhs: ExtReal) -> bool {
    match rhs {
        ExtReal::PosInf => true,
        ExtReal::NegInf => false,
        ExtReal::Finite(r) => lhs <= r * (1.0 + HOLD_REL) + HOLD_ABS,
    }
}

fn slack_of(lhs: f64, rhs: ExtReal) -> ExtReal {
    match rhs {
        ExtReal::PosInf => ExtReal::PosInf,
        _ => ExtReal::from_f64(rhs.to_f64() - lhs),
    }
}

struct Draft {
    id: Statement,
    witnesses: Witnesses,
}

impl Draft {
    fn new(id: Statement, p: &Polynomial, points: Vec<ExtendedPoint>, tol: f64) -> Self {
        Draft {
            id,
            witnesses: Witnesses {
                poly: p.clone(),
                points,
                params: Params {
                    tol: Some(tol),
                    ..Params::default()
                },
            },
        }
    }

    fn params(&mut self) -> &mut Params {
        &mut self.witnesses.params
    }

    fn compared(self, lhs: f64, rhs: ExtReal, degenerate: bool) -> InequalityReport {
        self.decided(lhs, rhs, within(lhs, rhs), degenerate)
    }

    fn decided(self, lhs: f64, rhs: ExtReal, holds: bool, degenerate: bool) -> InequalityReport {
        InequalityReport {
            id: self.id,
            n: self.witnesses.poly.degree(),
            holds,
            hypothesis_ok: true,
            degenerate,
            lhs: Some(ExtReal::from_f64(lhs)),
            rhs: Some(rhs),
            slack: Some(slack_of(lhs, rhs)),
            witnesses: self.witnesses,
            seed: None,
        }
    }

    fn failed(mut self, note: impl Into<String>) -> InequalityReport {
        self.params().note = Some(note.into());
        InequalityReport {
            id: self.id,
            n: self.witnesses.poly.degree(),
            holds: false,
            hypothesis_ok: false,
            degenerate: false,
            lhs: None,
            rhs: None,
            slack: None,
            witnesses: self.witnesses,
            seed: None,
        }
    }
}

/// Report for inputs rejected before any checker could run.
pub fn hypothesis_failure(id: Statement, witnesses: Witnesses, note: impl Into<String>) -> InequalityReport {
    let tol = witnesses.params.tol.unwrap_or(DEFAULT_TOL);
    let mut draft = Draft::new(id, &witnesses.poly, witnesses.points, tol);
    draft.witnesses.params = witnesses.params;
    draft.failed(note)
}

/// `Some(note)` when `p` is not of degree >= 2 with critical values in the
/// closed unit disk.
fn class_gate(p: &Polynomial, tol: f64, params: &mut Params) -> Result<Option<String>, CheckError> {
    if p.degree() < 2 {
        return Ok(Some(format!("degree {} < 2", p.degree())));
    }
    let (ok, profile) = is_in_class(p, tol)?;
    params.max_critical = Some(profile.max_modulus);
    Ok((!ok).then(|| format!("largest critical value modulus {} exceeds 1", profile.max_modulus)))
}

fn degree(p: &Polynomial) -> ChebDegree {
    ChebDegree::new(p.degree()).expect("degree checked by the caller")
}

/// `-(z_3, z_1, z_2, z_4)` realified.
fn line_cross_ratio(points: &[ExtendedPoint; 4]) -> Result<f64, CheckError> {
    let [z1, z2, z3, z4] = *points;
    match cross_ratio(z3, z1, z2, z4)? {
        ExtendedPoint::Finite(v) => {
            let residue = if v.norm() == 0.0 { 0.0 } else { v.im.abs() / v.norm() };
            if residue > REALIFY_TOL {
                return Err(CheckError::NotReal { residue });
            }
            Ok(-v.re)
        }
        ExtendedPoint::Infinity => Ok(f64::INFINITY),
    }
}

/// Theorem 1: `-(z_3, z_1, z_2, z_4) <= |(x_3, -x_1, -x_2, x_4)|` with
/// `x_k = x_P(z_k)`.  Coincident `x` pairs make the right side infinite.
pub fn theorem1_check(p: &Polynomial, quad: &CollinearQuad, tol: f64) -> Result<InequalityReport, CheckError> {
    let points = quad.points();
    let mut draft = Draft::new(Statement::Theorem1, p, points.to_vec(), tol);
    draft.params().quad = Some(quad.into());
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    let n = degree(p);
    let lhs = line_cross_ratio(&points)?;
    let xs = points
        .map(|z| x_of(p, n, z))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    draft.params().x_p = Some(xs.clone());
    let [a1, a2, a3, a4] = [xs[2], xs[0].neg(), xs[1].neg(), xs[3]].map(ExtendedPoint::from);
    let (rhs, degenerate) = match cross_ratio(a1, a2, a3, a4) {
        Ok(ExtendedPoint::Finite(v)) => (ExtReal::Finite(v.norm()), false),
        Ok(ExtendedPoint::Infinity) | Err(GeometryError::Coincident(..)) => (ExtReal::PosInf, true),
        Err(e) => return Err(e.into()),
    };
    Ok(draft.compared(lhs, rhs, degenerate))
}

/// Corollary 1: `|P(z)| <= T_n(|(2z - z_1 - z_2) / (z_1 - z_2)|)` for `z` on
/// the two rays of the line through `z_1, z_2` beyond those points, when
/// `|P(z_1)|, |P(z_2)| <= 1`.
pub fn corollary1_check(
    p: &Polynomial,
    z1: Complex64,
    z2: Complex64,
    z: Complex64,
    tol: f64,
) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary1, p, vec![z1.into(), z2.into(), z.into()], tol);
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    for (name, w) in [("z1", z1), ("z2", z2)] {
        let v = p.evaluate(w).norm();
        if v > 1.0 + tol {
            return Ok(draft.failed(format!("|P({name})| = {v} exceeds 1")));
        }
    }
    if z1 == z2 {
        return Ok(draft.failed("z1 and z2 coincide"));
    }
    let t = (2.0 * z - z1 - z2) / (z2 - z1);
    draft.params().ray_t = Some(t.re);
    if t.im.abs() > tol * t.norm().max(1.0) || t.re.abs() < 1.0 - tol {
        return Ok(draft.failed(format!("z is not on the rays: t = {t}")));
    }
    let lhs = p.evaluate(z).norm();
    let rhs = cheb_eval_real(degree(p), t.norm());
    Ok(draft.compared(lhs, ExtReal::from_f64(rhs), false))
}

/// `(2^(2n-1) / |c_n|)^(1/n)`.
pub fn corollary2_threshold(p: &Polynomial) -> f64 {
    let n = p.degree() as f64;
    (((2.0 * n - 1.0) * 2f64.ln() - p.leading().norm().ln()) / n).exp()
}

/// Corollary 2: if `|z_1 - z_2|` exceeds the threshold then `|P(z_1)| > 1`,
/// `|P(z_2)| > 1` or some critical value exceeds 1 in modulus.  A disjunct
/// counts as fired when the value exceeds `1 - tol`.  Reported as
/// `lhs = 1`, `rhs` = the largest of the three moduli.
pub fn corollary2_check(
    p: &Polynomial,
    z1: Complex64,
    z2: Complex64,
    tol: f64,
) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary2, p, vec![z1.into(), z2.into()], tol);
    if p.degree() < 2 {
        return Ok(draft.failed(format!("degree {} < 2", p.degree())));
    }
    let threshold = corollary2_threshold(p);
    draft.params().threshold = Some(threshold);
    let sep = (z1 - z2).norm();
    if !(sep > threshold) {
        return Ok(draft.failed(format!("separation {sep} does not exceed {threshold}")));
    }
    let m = critical_profile(p)?.max_modulus;
    draft.params().max_critical = Some(m);
    let values = [
        ("p_z1", p.evaluate(z1).norm()),
        ("p_z2", p.evaluate(z2).norm()),
        ("max_critical", m),
    ];
    let fired: Vec<String> = values
        .iter()
        .filter(|(_, v)| *v > 1.0 - tol)
        .map(|(name, _)| name.to_string())
        .collect();
    let holds = !fired.is_empty();
    draft.params().fired = Some(fired);
    let rhs = values.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(draft.decided(1.0, ExtReal::from_f64(rhs), holds, false))
}

/// `2 n cot(pi/(2n)) / |c_1|`.
pub fn corollary3_threshold(p: &Polynomial) -> f64 {
    let n = p.degree() as f64;
    2.0 * n / (PI / (2.0 * n)).tan() / p.coeff(1).norm()
}

fn origin_gate(p: &Polynomial) -> Option<String> {
    let scale = p.max_coeff_modulus();
    if p.coeff(0).norm() > ZERO_CONST_TOL * scale {
        Some(format!("P(0) = {} is not zero", p.coeff(0)))
    } else if p.coeff(1).norm() <= TRIM_TOL * scale {
        Some("P'(0) = 0".to_string())
    } else {
        None
    }
}

/// Corollary 3: `T_n(sin(pi/(2n)) |c_1 z| / n - cos(pi/(2n))) <= |P(z)|` for
/// `|z| >= 2n cot(pi/(2n)) / |c_1|`, when `P(0) = 0`.
pub fn corollary3_check(p: &Polynomial, z: Complex64, tol: f64) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary3, p, vec![z.into()], tol);
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    if let Some(note) = origin_gate(p) {
        return Ok(draft.failed(note));
    }
    let n = degree(p);
    let nf = n.get() as f64;
    let threshold = corollary3_threshold(p);
    draft.params().threshold = Some(threshold);
    if !within(threshold, ExtReal::Finite(z.norm())) {
        return Ok(draft.failed(format!("|z| = {} is below {threshold}", z.norm())));
    }
    let angle = PI / (2.0 * nf);
    let arg = angle.sin() * (p.coeff(1) * z).norm() / nf - angle.cos();
    let bound = cheb_eval_real(n, arg);
    Ok(draft.compared(bound, ExtReal::from_f64(p.evaluate(z).norm()), false))
}

fn bound_gate(p: &Polynomial, draft: &mut Draft) -> Option<String> {
    if p.degree() < 2 {
        return Some(format!("degree {} < 2", p.degree()));
    }
    let note = origin_gate(p);
    if note.is_some() {
        draft.params().note = note.clone();
    }
    note
}

/// Corollary 4: `2 (sin(pi/(2n))/n)^(n/(n-1)) |c_1^n/c_n|^(1/(n-1)) <= M`.
pub fn corollary4_check(p: &Polynomial, tol: f64) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary4, p, Vec::new(), tol);
    if let Some(note) = bound_gate(p, &mut draft) {
        return Ok(draft.failed(note));
    }
    let lower = cor4_lower_bound(p)?;
    let profile = critical_profile(p)?;
    draft.params().max_critical = Some(profile.max_modulus);
    draft.params().min_critical = Some(profile.min_modulus());
    Ok(draft.compared(lower, ExtReal::from_f64(profile.max_modulus), false))
}

/// The upper bound `(n-1) n^(-n/(n-1)) |c_1^n/c_n|^(1/(n-1))` against the
/// smallest critical value modulus.  Whether the largest one also obeys it
/// is recorded in `max_within_upper`.
pub fn corollary4_upper_check(p: &Polynomial, tol: f64) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary4Upper, p, Vec::new(), tol);
    if let Some(note) = bound_gate(p, &mut draft) {
        return Ok(draft.failed(note));
    }
    let upper = cor4_upper_bound(p)?;
    let profile = critical_profile(p)?;
    let min = profile.min_modulus();
    draft.params().max_critical = Some(profile.max_modulus);
    draft.params().min_critical = Some(min);
    draft.params().max_within_upper = Some(within(profile.max_modulus, ExtReal::Finite(upper)));
    Ok(draft.compared(min, ExtReal::from_f64(upper), false))
}

fn real_coefficients(p: &Polynomial) -> Option<Vec<f64>> {
    p.is_real().then(|| p.coeffs().iter().map(|c| c.re).collect())
}

/// The constant `d = c_{n-2}/(n c_n) - (n-1) c_{n-1}^2/(2 n^2 c_n^2) +
/// 2^(-2/n) |c_n|^(-2/n)` of a real polynomial.  `P` and `-P` give the
/// same value.
pub fn corollary5_d(p: &Polynomial) -> Result<f64, CheckError> {
    let c = real_coefficients(p).ok_or(CheckError::ComplexCoefficients)?;
    if p.degree() < 2 {
        return Err(CheckError::Degree(p.degree()));
    }
    Ok(d_from(&c))
}

fn d_from(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    let nf = n as f64;
    let (cn, cn1, cn2) = (c[n], c[n - 1], c[n - 2]);
    cn2 / (nf * cn) - (nf - 1.0) * cn1 * cn1 / (2.0 * nf * nf * cn * cn) + (-(2.0 * cn.abs().log2() + 2.0) / nf).exp2()
}

/// Corollary 5, arranged as
/// `(n-1)/(2n) c_{n-1}^2 <= c_n c_{n-2} + n 2^(-2/n) |c_n|^(2 - 2/n)`.
/// The slack equals `n c_n^2 d`; `d_agrees` records whether the sign of
/// `d` gives the same verdict.
pub fn corollary5_check(p: &Polynomial, tol: f64) -> Result<InequalityReport, CheckError> {
    let mut draft = Draft::new(Statement::Corollary5, p, Vec::new(), tol);
    let Some(c) = real_coefficients(p) else {
        return Ok(draft.failed("coefficients are not real"));
    };
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    let n = p.degree();
    let nf = n as f64;
    let (cn, cn1, cn2) = (c[n], c[n - 1], c[n - 2]);
    let lhs = (nf - 1.0) / (2.0 * nf) * cn1 * cn1;
    let rhs = cn * cn2 + nf * (((2.0 * nf - 2.0) * cn.abs().log2() - 2.0) / nf).exp2();
    let d = d_from(&c);
    let holds = within(lhs, ExtReal::Finite(rhs));
    // same comparison expressed through d = slack / (n c_n^2)
    let d_margin = (HOLD_REL * rhs + HOLD_ABS) / (nf * cn * cn);
    draft.params().d = Some(d);
    draft.params().d_agrees = Some((d >= -d_margin) == holds);
    Ok(draft.decided(lhs, ExtReal::from_f64(rhs), holds, false))
}

/// Default central-difference step at `x`.
pub fn eq8_step(x: f64) -> f64 {
    (1e-8 * x.abs()).max(1e-6)
}

/// `f(y) = sign(y) x_P(y)`, the branch of `T_n^{-1}(P)` that is positive on
/// the positive axis, valid where `|P| > 1` on both sides.
fn eq8_f(p: &Polynomial, n: ChebDegree, y: f64) -> Result<f64, ChebError> {
    let v = cheb_inverse_ray(n, p.evaluate(Complex64::new(y, 0.0)).norm())?;
    Ok(if y < 0.0 { -v } else { v })
}

/// `|4 x^2 f'(x) f'(-x) / (f(x) - f(-x))^2|` with central differences of
/// step `h`.  Requires `x > 0`, `|P(+-x)| > 1` and real coefficients.
pub fn eq8_ratio(p: &Polynomial, x: f64, h: f64) -> Result<f64, CheckError> {
    let n = ChebDegree::new(p.degree())?;
    let f = |y: f64| eq8_f(p, n, y);
    let dp = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let dm = (f(-x + h)? - f(-x - h)?) / (2.0 * h);
    let gap = f(x)? - f(-x)?;
    Ok((4.0 * x * x * dp * dm / (gap * gap)).abs())
}

/// The derivative inequality behind Corollary 5: the ratio is at most one.
/// `h = None` uses [`eq8_step`].
pub fn eq8_check(p: &Polynomial, x: f64, h: Option<f64>, tol: f64) -> Result<InequalityReport, CheckError> {
    let h = h.unwrap_or_else(|| eq8_step(x));
    let mut draft = Draft::new(Statement::Eq8, p, Vec::new(), tol);
    draft.params().x = Some(x);
    draft.params().h = Some(h);
    if real_coefficients(p).is_none() {
        return Ok(draft.failed("coefficients are not real"));
    }
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    if !(x > h && h > 0.0) {
        return Ok(draft.failed(format!("need 0 < h < x, got x = {x}, h = {h}")));
    }
    for y in [x - h, x + h, -x - h, -x + h] {
        let v = p.evaluate(Complex64::new(y, 0.0)).norm();
        if !(v > 1.0) {
            return Ok(draft.failed(format!("|P({y})| = {v} is not above 1")));
        }
    }
    let ratio = eq8_ratio(p, x, h)?;
    let holds = ratio <= 1.0 + EQ8_TOL;
    Ok(draft.decided(ratio, ExtReal::Finite(1.0), holds, false))
}

/// Remark 1 for the slit domain `C \ ([z_1, z_2] u [z_3, z_4])`: its modulus
/// is at most that of `C \ ([-x_1, -x_2] u [x_3, x_4])`, each interval taken
/// between its endpoints in whichever order.  A rigid motion puts the quad on
/// the real axis, so its line parameters are the slit endpoints.
pub fn remark1_check(p: &Polynomial, quad: &CollinearQuad, tol: f64) -> Result<InequalityReport, CheckError> {
    let points = quad.points();
    let mut draft = Draft::new(Statement::Remark1, p, points.to_vec(), tol);
    draft.params().quad = Some(quad.into());
    if let Some(note) = class_gate(p, tol, draft.params())? {
        return Ok(draft.failed(note));
    }
    let n = degree(p);
    let [t1, t2, t3, t4] = quad.params();
    let lhs = two_slit_modulus(&TwoSlitDomain::new(t1, t2, t3, t4).map_err(|_| GeometryError::NotAscending)?);
    let xs = points
        .map(|z| x_of(p, n, z))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    draft.params().x_p = Some(xs.clone());
    let sorted = |a: ExtReal, b: ExtReal| if a < b { (a, b) } else { (b, a) };
    let (lo12, hi12) = sorted(xs[0], xs[1]);
    let (lo34, hi34) = sorted(xs[2], xs[3]);
    let coincide = |a: ExtReal, b: ExtReal| match (a, b) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= 1e-13 * a.abs().max(b.abs()),
        (a, b) => a == b,
    };
    if coincide(lo12, hi12) || coincide(lo34, hi34) {
        return Ok(draft.compared(lhs, ExtReal::PosInf, true));
    }
    let domain = TwoSlitDomain::new(hi12.neg(), lo12.neg(), lo34, hi34).map_err(|_| GeometryError::NotAscending)?;
    let rhs = two_slit_modulus(&domain);
    Ok(draft.compared(lhs, ExtReal::from_f64(rhs), false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{cheb_coeffs, largest_zero};
    use crate::critical::normalize_to_class;
    use crate::moebius::make_quad;

    fn t(n: usize) -> Polynomial {
        cheb_coeffs(ChebDegree::new(n).unwrap())
    }

    fn real(c: &[f64]) -> Polynomial {
        Polynomial::from_real(c).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real_quad(ts: [f64; 4]) -> CollinearQuad {
        make_quad(c(0.0), c(1.0), ts).unwrap()
    }

    fn shifted(n: usize) -> Polynomial {
        let d = ChebDegree::new(n).unwrap();
        t(n).shift(c(-largest_zero(d)))
    }

    #[test]
    fn theorem1_chebyshev_equality() {
        let r = theorem1_check(&t(2), &real_quad([-3.0, -1.0, 1.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.hypothesis_ok && !r.degenerate);
        assert!((r.lhs.unwrap().to_f64() - 3.0).abs() < 1e-14);
        assert!((r.rhs.unwrap().to_f64() - 3.0).abs() < 1e-14);
        let r = theorem1_check(&t(5), &real_quad([-4.0, -1.2, 1.5, f64::INFINITY]), DEFAULT_TOL).unwrap();
        assert!(r.relative_slack().unwrap().abs() < 1e-12);
    }

    #[test]
    fn theorem1_strict_for_binomial() {
        let p = normalize_to_class(&real(&[0.0, 1.0, 1.0])).unwrap();
        assert!((p.coeff(1).re - 4.0).abs() < 1e-12);
        // P = w^2 - 1 with w = 2z + 1, so x_P is linear in |w| where |w| >= 1 and
        // such quads are extremal; here both sides are 15
        let r = theorem1_check(&p, &real_quad([-3.0, -2.0, 1.0, 2.0]), DEFAULT_TOL).unwrap();
        assert!(r.holds && (r.lhs.unwrap().to_f64() - 15.0).abs() < 1e-12);
        assert!(r.relative_slack().unwrap().abs() < 1e-12);
        let r = theorem1_check(&p, &real_quad([-3.0, -2.0, -0.2, 2.0]), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.relative_slack().unwrap() > 1e-3);
    }

    #[test]
    fn theorem1_degenerate_and_hypothesis() {
        // |T_2| takes the same value at -2 and 2: x_1 = x_2
        let r = theorem1_check(&t(2), &real_quad([-2.0, 2.0, 3.0, 4.0]), DEFAULT_TOL).unwrap();
        assert!(r.degenerate && r.holds);
        assert_eq!(r.slack, Some(ExtReal::PosInf));
        let big = t(3).scale(c(2.0)).unwrap();
        let r = theorem1_check(&big, &real_quad([-3.0, -1.0, 1.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(!r.hypothesis_ok && !r.holds);
        assert!(r.witnesses.params.note.is_some());
    }

    #[test]
    fn corollary1_examples() {
        let r = corollary1_check(&t(2), c(-1.0), c(1.0), c(2.0), DEFAULT_TOL).unwrap();
        assert!(r.holds && (r.lhs.unwrap().to_f64() - 7.0).abs() < 1e-14);
        assert!((r.rhs.unwrap().to_f64() - 7.0).abs() < 1e-14);
        let r = corollary1_check(&t(3), c(-1.0), c(1.0), c(-2.0), DEFAULT_TOL).unwrap();
        assert!((r.lhs.unwrap().to_f64() - 26.0).abs() < 1e-12);
        assert!((r.rhs.unwrap().to_f64() - 26.0).abs() < 1e-12);
        let p = normalize_to_class(&real(&[0.0, 1.0, 1.0])).unwrap();
        // P(z) = 4z + 4z^2 has |P| <= 1 at 0 and at -1/2
        let r = corollary1_check(&p, c(-0.5), c(0.0), c(1.0), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.slack.unwrap().to_f64() > 0.0);
        let off = corollary1_check(&t(2), c(-1.0), c(1.0), c(0.5), DEFAULT_TOL).unwrap();
        assert!(!off.hypothesis_ok);
        let off_line = corollary1_check(&t(2), c(-1.0), c(1.0), Complex64::new(2.0, 1.0), DEFAULT_TOL).unwrap();
        assert!(!off_line.hypothesis_ok);
    }

    #[test]
    fn corollary2_examples() {
        let r = corollary2_check(&real(&[0.0, 0.0, 1.0]), c(0.0), c(3.0), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.hypothesis_ok);
        assert!((r.witnesses.params.threshold.unwrap() - 8f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.witnesses.params.fired.as_deref(), Some(&["p_z2".to_string()][..]));
        let r = corollary2_check(&t(2), c(-1.9), c(1.9), DEFAULT_TOL).unwrap();
        assert!(r.holds && (r.rhs.unwrap().to_f64() - 6.22).abs() < 1e-12);
        // both endpoints in the filled region: hypothesis must fail
        let r = corollary2_check(&t(4), c(-1.0), c(1.0), DEFAULT_TOL).unwrap();
        assert!(!r.hypothesis_ok);
    }

    #[test]
    fn corollary3_examples() {
        let p = shifted(2);
        let r = corollary3_check(&p, c(2.0), DEFAULT_TOL).unwrap();
        assert!(r.holds);
        let exact = 8.0 - 4.0 * 2f64.sqrt();
        assert!((r.lhs.unwrap().to_f64() - exact).abs() < 1e-13);
        assert!((r.rhs.unwrap().to_f64() - exact).abs() < 1e-13);
        let r = corollary3_check(&shifted(3), c(3.0), DEFAULT_TOL).unwrap();
        assert!(r.relative_slack().unwrap().abs() < 1e-9);
        let q = normalize_to_class(&real(&[0.0, 1.0, 1.0])).unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(2.0, k as f64 * PI / 8.0);
            let r = corollary3_check(&q, z, DEFAULT_TOL).unwrap();
            assert!(r.holds && r.hypothesis_ok, "{z}");
        }
        assert!(!corollary3_check(&q, c(0.5), DEFAULT_TOL).unwrap().hypothesis_ok);
        assert!(!corollary3_check(&t(2), c(5.0), DEFAULT_TOL).unwrap().hypothesis_ok);
    }

    #[test]
    fn corollary4_examples() {
        let r = corollary4_check(&shifted(2), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.relative_slack().unwrap().abs() < 1e-12);
        let r = corollary4_upper_check(&real(&[0.0, 1.0, 0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert!((r.rhs.unwrap().to_f64() - 2.0 * 3f64.powf(-1.5)).abs() < 1e-14);
        assert!(r.holds && r.relative_slack().unwrap().abs() < 1e-12);
        assert_eq!(r.witnesses.params.max_within_upper, Some(true));
        assert!(!corollary4_check(&t(2), DEFAULT_TOL).unwrap().hypothesis_ok);
    }

    #[test]
    fn corollary5_d_examples() {
        assert_eq!(corollary5_d(&t(2)).unwrap(), 0.0);
        assert_eq!(corollary5_d(&t(3)).unwrap(), 0.0);
        // d decreases with |c_n|: shrinking stays in the class, growing leaves it
        assert_eq!(corollary5_d(&t(2).scale(c(0.5)).unwrap()).unwrap(), 0.25);
        assert_eq!(corollary5_d(&t(2).scale(c(2.0)).unwrap()).unwrap(), -0.125);
        assert_eq!(corollary5_d(&t(4).scale(c(-1.0)).unwrap()).unwrap(), 0.0);
        let complex = Polynomial::new(vec![Complex64::new(0.0, 1.0), c(0.0), c(1.0)]).unwrap();
        assert!(corollary5_d(&complex).is_err());
    }

    #[test]
    fn corollary5_examples() {
        for n in 2..=12 {
            let r = corollary5_check(&t(n), DEFAULT_TOL).unwrap();
            assert!(r.holds, "n={n}");
            assert_eq!(r.slack, Some(ExtReal::Finite(0.0)), "n={n}");
            assert_eq!(r.witnesses.params.d, Some(0.0));
        }
        let r = corollary5_check(&t(2), DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (Some(ExtReal::Finite(0.0)), Some(ExtReal::Finite(0.0))));
        let complex = Polynomial::new(vec![Complex64::new(0.0, 1.0), c(0.0), c(1.0)]).unwrap();
        assert!(!corollary5_check(&complex, DEFAULT_TOL).unwrap().hypothesis_ok);
    }

    #[test]
    fn eq8_chebyshev() {
        for n in [2, 3] {
            let ratio = eq8_ratio(&t(n), 5.0, eq8_step(5.0)).unwrap();
            assert!((ratio - 1.0).abs() < 2e-6, "n={n}: {ratio}");
            assert!(eq8_check(&t(n), 5.0, None, DEFAULT_TOL).unwrap().holds);
        }
        assert!(!eq8_check(&t(3), 0.5, None, DEFAULT_TOL).unwrap().hypothesis_ok);
    }

    #[test]
    fn remark1_examples() {
        let r = remark1_check(&t(2), &real_quad([-3.0, -1.0, 1.0, 3.0]), DEFAULT_TOL).unwrap();
        assert!(r.holds && r.relative_slack().unwrap().abs() < 1e-8);
        let r = remark1_check(&t(4), &real_quad([-5.0, -1.5, 1.0, f64::INFINITY]), DEFAULT_TOL).unwrap();
        assert!(r.relative_slack().unwrap().abs() < 1e-8);
        let tilted = make_quad(
            Complex64::new(0.5, 0.5),
            Complex64::new(1.0, 1.0),
            [-1.0, -0.99, 0.99, 1.0],
        )
        .unwrap();
        let p = normalize_to_class(&real(&[0.0, 1.0, 1.0])).unwrap();
        let r = remark1_check(&p, &tilted, DEFAULT_TOL).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn statement_names_round_trip() {
        for st in Statement::ALL {
            assert_eq!(st.as_str().parse::<Statement>(), Ok(st));
            assert_eq!(serde_json::to_string(&st).unwrap(), format!("\"{st}\""));
        }
        assert!("corollary9".parse::<Statement>().is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let r = theorem1_check(&t(3), &real_quad([-3.0, -1.0, 1.0, f64::INFINITY]), DEFAULT_TOL).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: InequalityReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
