//! Points of the Riemann sphere, the cross ratio, linear fractional maps and
//! quadruples of points on an oriented line.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Points closer than this fraction of the configuration scale are treated
/// as coincident.
pub const COINCIDENT_TOL: f64 = 1e-13;

/// Off-line distance, relative to the configuration size, still accepted by
/// [`CollinearQuad::from_points`].
const COLLINEAR_TOL: f64 = 1e-10;

/// Tolerance on `|direction| = 1` for a normalized quad direction.
const UNIT_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("points {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("point has a NaN component")]
    NotANumber,
    #[error("degenerate linear fractional map (ad - bc = 0)")]
    Singular,
    #[error("line parameters must be strictly ascending")]
    NotAscending,
    #[error("line direction must be a nonzero finite complex number")]
    BadDirection,
    #[error("only the last of the four line parameters may be infinite")]
    InfiniteSlot,
    #[error("points do not lie on one line")]
    NotCollinear,
}

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtendedPoint {
    /// Infinite components map to the point at infinity, NaN is rejected.
    pub fn new(z: Complex64) -> Result<Self, GeometryError> {
        if z.re.is_nan() || z.im.is_nan() {
            Err(GeometryError::NotANumber)
        } else if z.re.is_infinite() || z.im.is_infinite() {
            Ok(ExtendedPoint::Infinity)
        } else {
            Ok(ExtendedPoint::Finite(z))
        }
    }

    pub fn real(x: f64) -> Self {
        ExtendedPoint::Finite(Complex64::new(x, 0.0))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    /// Negation on the sphere; infinity is fixed.
    pub fn neg(self) -> Self {
        match self {
            ExtendedPoint::Finite(z) => ExtendedPoint::Finite(-z),
            ExtendedPoint::Infinity => ExtendedPoint::Infinity,
        }
    }
}

impl From<Complex64> for ExtendedPoint {
    fn from(z: Complex64) -> Self {
        ExtendedPoint::new(z).expect("finite or infinite complex value")
    }
}

impl From<ExtReal> for ExtendedPoint {
    fn from(x: ExtReal) -> Self {
        match x {
            ExtReal::Finite(v) => ExtendedPoint::real(v),
            ExtReal::PosInf | ExtReal::NegInf => ExtendedPoint::Infinity,
        }
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(z) => write!(f, "{z}"),
            ExtendedPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// An extended real number.  Infinite values are tagged, never stored as
/// float sentinels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Maps float infinities to the tagged variants.  NaN is not allowed.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    /// Float view, for reporting and comparisons only.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn neg(self) -> Self {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRealRepr {
    Number(f64),
    Token(String),
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ExtRealRepr::deserialize(d)? {
            ExtRealRepr::Number(x) => Ok(ExtReal::Finite(x)),
            ExtRealRepr::Token(t) => match t.as_str() {
                "inf" | "+inf" => Ok(ExtReal::PosInf),
                "-inf" => Ok(ExtReal::NegInf),
                other => Err(de::Error::custom(format!("expected number or \"inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Pair([f64; 2]),
    Token(String),
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedPoint::Finite(z) => [z.re, z.im].serialize(s),
            ExtendedPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Pair([re, im]) => ExtendedPoint::new(Complex64::new(re, im)).map_err(de::Error::custom),
            PointRepr::Token(t) if t == "inf" => Ok(ExtendedPoint::Infinity),
            PointRepr::Token(t) => Err(de::Error::custom(format!("expected [re, im] or \"inf\", got {t:?}"))),
        }
    }
}

fn check_distinct(points: &[ExtendedPoint]) -> Result<(), GeometryError> {
    let scale = points
        .iter()
        .filter_map(|p| p.finite())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let same = match (points[i], points[j]) {
                (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => true,
                (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => (a - b).norm() <= COINCIDENT_TOL * scale,
                _ => false,
            };
            if same {
                return Err(GeometryError::Coincident(i, j));
            }
        }
    }
    Ok(())
}

/// The cross ratio `(a1, a2, a3, a4) = (a3 - a1)/(a3 - a2) : (a4 - a1)/(a4 - a2)`.
///
/// A slot holding infinity is handled by taking the limit of the two factors
/// that contain it, which reduces to a ratio of the remaining differences.
pub fn cross_ratio(
    a1: ExtendedPoint,
    a2: ExtendedPoint,
    a3: ExtendedPoint,
    a4: ExtendedPoint,
) -> Result<ExtendedPoint, GeometryError> {
    check_distinct(&[a1, a2, a3, a4])?;
    use ExtendedPoint::{Finite as F, Infinity as Inf};
    let (num, den) = match (a1, a2, a3, a4) {
        (F(a1), F(a2), F(a3), F(a4)) => ((a3 - a1) * (a4 - a2), (a3 - a2) * (a4 - a1)),
        (Inf, F(a2), F(a3), F(a4)) => (a4 - a2, a3 - a2),
        (F(a1), Inf, F(a3), F(a4)) => (a3 - a1, a4 - a1),
        (F(a1), F(a2), Inf, F(a4)) => (a4 - a2, a4 - a1),
        (F(a1), F(a2), F(a3), Inf) => (a3 - a1, a3 - a2),
        _ => unreachable!("at most one point can be infinite after the distinctness check"),
    };
    Ok(ExtendedPoint::new(num / den).unwrap_or(ExtendedPoint::Infinity))
}

/// `z -> (a z + b) / (c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeometryError> {
        let scale = [a, b, c, d].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let det = a * d - b * c;
        if !(det.norm() >= 1e-13 * scale * scale) || scale == 0.0 {
            return Err(GeometryError::Singular);
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Moebius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// The unique map sending `(p1, p2, p3)` to `(-1, 0, inf)`.
    pub fn from_three_points(p1: ExtendedPoint, p2: ExtendedPoint, p3: ExtendedPoint) -> Result<Self, GeometryError> {
        check_distinct(&[p1, p2, p3])?;
        use ExtendedPoint::{Finite as F, Infinity as Inf};
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (a, b, c, d) = match (p1, p2, p3) {
            (F(p1), F(p2), F(p3)) => (-(p1 - p3), (p1 - p3) * p2, p1 - p2, -(p1 - p2) * p3),
            (F(p1), F(p2), Inf) => (-one, p2, zero, p1 - p2),
            (F(p1), Inf, F(p3)) => (zero, -(p1 - p3), one, -p3),
            (Inf, F(p2), F(p3)) => (-one, p2, one, -p3),
            _ => unreachable!("at most one point can be infinite after the distinctness check"),
        };
        Moebius::new(a, b, c, d)
    }

    pub fn apply(&self, z: ExtendedPoint) -> ExtendedPoint {
        match z {
            ExtendedPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::new((self.a * z + self.b) / den).unwrap_or(ExtendedPoint::Infinity)
                }
            }
            ExtendedPoint::Infinity => {
                if self.c.norm() == 0.0 {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite(self.a / self.c)
                }
            }
        }
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &Moebius) -> Moebius {
        Moebius {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }
}

/// Four distinct points `base + t_k * direction` with `t_1 < t_2 < t_3 < t_4`;
/// `t_4` may be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollinearQuad {
    base: Complex64,
    direction: Complex64,
    params: [ExtReal; 4],
}

impl CollinearQuad {
    pub fn new(base: Complex64, direction: Complex64, params: [ExtReal; 4]) -> Result<Self, GeometryError> {
        if !(base.re.is_finite() && base.im.is_finite()) {
            return Err(GeometryError::NotANumber);
        }
        let len = direction.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(GeometryError::BadDirection);
        }
        // already-unit directions are kept so that a quad rebuilt from its own
        // parts has bit-identical points
        let direction = if (len - 1.0).abs() <= UNIT_TOL {
            direction
        } else {
            direction / len
        };
        debug_assert!((direction.norm() - 1.0).abs() <= UNIT_TOL);
        if params[..3].iter().any(|t| !t.is_finite()) || params[3] == ExtReal::NegInf {
            return Err(GeometryError::InfiniteSlot);
        }
        if params.iter().any(|t| t.to_f64().is_nan()) {
            return Err(GeometryError::NotANumber);
        }
        if !params.windows(2).all(|w| w[0] < w[1]) {
            return Err(GeometryError::NotAscending);
        }
        let quad = CollinearQuad {
            base,
            direction,
            params,
        };
        check_distinct(&quad.points())?;
        Ok(quad)
    }

    /// Recovers the line from four points: `base = z_1`, direction towards
    /// `z_2`.  Only `z_4` may be infinite.
    pub fn from_points(points: [ExtendedPoint; 4]) -> Result<Self, GeometryError> {
        let (Some(z1), Some(z2)) = (points[0].finite(), points[1].finite()) else {
            return Err(GeometryError::InfiniteSlot);
        };
        let dir = z2 - z1;
        let len = dir.norm();
        if len == 0.0 {
            return Err(GeometryError::Coincident(0, 1));
        }
        let dir = dir / len;
        let scale = points
            .iter()
            .filter_map(|p| p.finite())
            .map(|z| (z - z1).norm())
            .fold(0.0, f64::max);
        let mut params = [ExtReal::Finite(0.0); 4];
        for (k, p) in points.iter().enumerate() {
            params[k] = match p {
                ExtendedPoint::Infinity => ExtReal::PosInf,
                ExtendedPoint::Finite(z) => {
                    let w = (z - z1) / dir;
                    if w.im.abs() > COLLINEAR_TOL * scale {
                        return Err(GeometryError::NotCollinear);
                    }
                    ExtReal::Finite(w.re)
                }
            };
        }
        Self::new(z1, dir, params)
    }

    /// Quad on the real axis.
    pub fn real(params: [ExtReal; 4]) -> Result<Self, GeometryError> {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), params)
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn direction(&self) -> Complex64 {
        self.direction
    }

    pub fn params(&self) -> [ExtReal; 4] {
        self.params
    }

    pub fn points(&self) -> [ExtendedPoint; 4] {
        self.params.map(|t| match t {
            ExtReal::Finite(t) => ExtendedPoint::Finite(self.base + self.direction * t),
            _ => ExtendedPoint::Infinity,
        })
    }
}

/// Same as [`CollinearQuad::new`], taking plain floats with `f64::INFINITY`
/// allowed for the last parameter.
pub fn make_quad(base: Complex64, direction: Complex64, t: [f64; 4]) -> Result<CollinearQuad, GeometryError> {
    if t.iter().any(|x| x.is_nan()) {
        return Err(GeometryError::NotANumber);
    }
    CollinearQuad::new(base, direction, t.map(ExtReal::from_f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(re: f64, im: f64) -> ExtendedPoint {
        ExtendedPoint::Finite(Complex64::new(re, im))
    }

    fn r(x: f64) -> ExtendedPoint {
        ExtendedPoint::real(x)
    }

    #[test]
    fn cross_ratio_examples() {
        let cr = cross_ratio(r(1.0), r(-3.0), r(-1.0), r(3.0)).unwrap();
        assert_eq!(cr, r(-3.0));

        let (a1, a2, a3) = (p(0.5, 1.0), p(-2.0, 0.25), p(3.0, -1.0));
        let cr = cross_ratio(a1, a2, a3, ExtendedPoint::Infinity).unwrap();
        let expected = (a3.finite().unwrap() - a1.finite().unwrap()) / (a3.finite().unwrap() - a2.finite().unwrap());
        assert_eq!(cr, ExtendedPoint::Finite(expected));
    }

    #[test]
    fn normalization_identity_is_exact() {
        for w in [p(2.5, 0.0), p(-7.0, 3.0), p(1e-3, -1e3)] {
            let cr = cross_ratio(w, r(-1.0), r(0.0), ExtendedPoint::Infinity).unwrap();
            assert_eq!(cr, w.neg());
        }
    }

    #[test]
    fn coincident_points_rejected() {
        assert_eq!(
            cross_ratio(r(1.0), r(2.0), r(1.0), r(3.0)),
            Err(GeometryError::Coincident(0, 2))
        );
        assert!(cross_ratio(r(1.0), ExtendedPoint::Infinity, r(2.0), ExtendedPoint::Infinity).is_err());
    }

    #[test]
    fn moebius_from_three_points_examples() {
        let m = Moebius::from_three_points(r(-1.0), r(0.0), ExtendedPoint::Infinity).unwrap();
        for z in [p(0.3, 2.0), p(-5.0, 0.0)] {
            let w = m.apply(z).finite().unwrap();
            assert!((w - z.finite().unwrap()).norm() < 1e-15);
        }

        let m = Moebius::from_three_points(r(-3.0), r(-1.0), r(3.0)).unwrap();
        let image = m.apply(r(1.0)).finite().unwrap();
        assert!((image - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        let at_inf = m.apply(ExtendedPoint::Infinity).finite().unwrap();
        let [a, _, c, _] = m.coefficients();
        assert_eq!(at_inf, a / c);
    }

    #[test]
    fn three_point_normalization_for_every_infinite_slot() {
        let pts = [p(0.5, -1.0), p(2.0, 2.0), ExtendedPoint::Infinity];
        let target = [r(-1.0), r(0.0), ExtendedPoint::Infinity];
        for rot in 0..3 {
            let (p1, p2, p3) = (pts[rot % 3], pts[(rot + 1) % 3], pts[(rot + 2) % 3]);
            let m = Moebius::from_three_points(p1, p2, p3).unwrap();
            for (src, dst) in [p1, p2, p3].into_iter().zip(target) {
                match (m.apply(src), dst) {
                    (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => {}
                    (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => assert!((a - b).norm() < 1e-12),
                    other => panic!("bad image {other:?}"),
                }
            }
        }
    }

    #[test]
    fn affine_map_and_pole() {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        let m = Moebius::new(c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(m.apply(p(1.0, 0.0)), p(3.0, 1.0));
        assert_eq!(m.apply(ExtendedPoint::Infinity), ExtendedPoint::Infinity);
        let inv = Moebius::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(inv.apply(r(0.0)), ExtendedPoint::Infinity);
        assert!(Moebius::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn quad_construction() {
        let q = make_quad(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            [-3.0, -1.0, 1.0, 3.0],
        )
        .unwrap();
        assert_eq!(q.points(), [r(-3.0), r(-1.0), r(1.0), r(3.0)]);

        let dir = Complex64::new(1.0, 1.0) / 2f64.sqrt();
        let q = make_quad(Complex64::new(0.0, 1.0), dir, [0.0, 1.0, 2.0, 3.0]).unwrap();
        for (k, pt) in q.points().iter().enumerate() {
            let z = pt.finite().unwrap() - Complex64::new(0.0, 1.0);
            assert!((z.re - z.im).abs() < 1e-15);
            assert!((z.norm() - k as f64).abs() < 1e-14);
        }

        let q = make_quad(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            [-2.0, -1.0, 1.0, f64::INFINITY],
        )
        .unwrap();
        assert_eq!(q.points()[3], ExtendedPoint::Infinity);

        let unnormalized = make_quad(Complex64::new(0.0, 0.0), Complex64::new(0.0, 3.0), [0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((unnormalized.direction().norm() - 1.0).abs() <= UNIT_TOL);
    }

    #[test]
    fn quad_rejections() {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(
            make_quad(o, one, [0.0, 2.0, 1.0, 3.0]),
            Err(GeometryError::NotAscending)
        );
        assert_eq!(make_quad(o, o, [0.0, 1.0, 2.0, 3.0]), Err(GeometryError::BadDirection));
        assert_eq!(
            make_quad(o, one, [0.0, 1.0, f64::INFINITY, f64::INFINITY]),
            Err(GeometryError::InfiniteSlot)
        );
    }

    #[test]
    fn ext_real_json() {
        let xs = vec![ExtReal::Finite(-1.5), ExtReal::PosInf, ExtReal::NegInf];
        let s = serde_json::to_string(&xs).unwrap();
        assert_eq!(s, r#"[-1.5,"inf","-inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        let pts: Vec<ExtendedPoint> = serde_json::from_str(r#"[[1,2],"inf"]"#).unwrap();
        assert_eq!(pts, vec![p(1.0, 2.0), ExtendedPoint::Infinity]);
    }

    #[test]
    fn quad_from_points() {
        let base = Complex64::new(1.0, -2.0);
        let dir = Complex64::from_polar(1.0, 0.7);
        let q = make_quad(base, dir, [-1.0, 0.5, 2.0, f64::INFINITY]).unwrap();
        let back = CollinearQuad::from_points(q.points()).unwrap();
        for (a, b) in back.points().iter().zip(q.points()) {
            match (a, b) {
                (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => assert!((a - b).norm() < 1e-14),
                (a, b) => assert_eq!(*a, b),
            }
        }
        let bent = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.1), p(3.0, 0.0)];
        assert_eq!(CollinearQuad::from_points(bent), Err(GeometryError::NotCollinear));
        let reversed = [r(0.0), r(-1.0), r(-2.0), r(-3.0)];
        assert!(CollinearQuad::from_points(reversed).is_ok());
        let unordered = [r(0.0), r(1.0), r(3.0), r(2.0)];
        assert_eq!(CollinearQuad::from_points(unordered), Err(GeometryError::NotAscending));
    }
}
