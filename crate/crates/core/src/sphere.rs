//! The Riemann sphere: points, the chordal metric and Moebius maps.
//!
//! Derivatives "in charts" use the identity chart at finite points and
//! `w = 1/z` at infinity, on both the source and the target side. Every
//! derivative in the crate follows this convention.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::C64;

/// Default chordal distance below which two points are treated as equal.
pub const DEFAULT_POINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

use SpherePoint::{Finite, Infinity};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinity)
    }

    pub fn as_finite(&self) -> Option<C64> {
        match *self {
            Finite(z) => Some(z),
            Infinity => None,
        }
    }

    /// Homogeneous coordinates `(u : v)`; infinity is `(1 : 0)`.
    pub fn homogeneous(&self) -> (C64, C64) {
        match *self {
            Finite(z) => (z, ONE),
            Infinity => (ONE, ZERO),
        }
    }

    pub fn from_homogeneous(u: C64, v: C64) -> Self {
        if v == ZERO {
            Infinity
        } else {
            Finite(u / v)
        }
    }

    /// `1/z`, swapping zero and infinity.
    pub fn reciprocal(&self) -> Self {
        let (u, v) = self.homogeneous();
        Self::from_homogeneous(v, u)
    }

    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        chordal(*self, *other)
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        if z.is_finite() {
            Finite(z)
        } else {
            Infinity
        }
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(z) => write!(f, "{z}"),
            Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Chordal distance `2|a-b| / sqrt((1+|a|^2)(1+|b|^2))`, in `[0, 2]`.
pub fn chordal(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (Infinity, Infinity) => 0.0,
        (Finite(z), Infinity) | (Infinity, Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (Finite(z), Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
        }
    }
}

fn hdet(p: (C64, C64), q: (C64, C64)) -> C64 {
    p.0 * q.1 - p.1 * q.0
}

/// Unit-norm homogeneous representative.
fn unit_homogeneous(p: SpherePoint) -> (C64, C64) {
    let (u, v) = p.homogeneous();
    let s = (u.norm_sqr() + v.norm_sqr()).sqrt();
    (u / s, v / s)
}

/// Cross-ratio `((a-c)(b-d)) / ((a-d)(b-c))`, extended to infinity by limits.
///
/// The value is itself a point of the sphere; it is infinite when `a = d`
/// or `b = c`.
pub fn cross_ratio(
    a: SpherePoint,
    b: SpherePoint,
    c: SpherePoint,
    d: SpherePoint,
    tol: f64,
) -> Result<SpherePoint> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                if pts[i].approx_eq(&pts[j], tol) && pts[j].approx_eq(&pts[k], tol) {
                    return Err(Error::UndefinedCrossRatio);
                }
            }
        }
    }
    let [ha, hb, hc, hd] = pts.map(unit_homogeneous);
    let num = hdet(ha, hc) * hdet(hb, hd);
    let den = hdet(ha, hd) * hdet(hb, hc);
    if num == ZERO && den == ZERO {
        return Err(Error::UndefinedCrossRatio);
    }
    Ok(SpherePoint::from_homogeneous(num, den))
}

/// `z -> (a z + b) / (c z + d)`, stored with `ad - bc = 1`.
#[derive(Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

impl MoebiusMap {
    /// Rejects `|ad - bc|` below `1e-14` times the squared largest entry.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = [a, b, c, d].iter().map(|e| e.norm()).fold(0.0, f64::max);
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::SingularMoebius { det: det.norm() });
        }
        let s = det.sqrt().inv();
        let mut m = MoebiusMap {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        };
        let largest =
            m.entries()
                .into_iter()
                .fold(ZERO, |acc, e| if e.norm() > acc.norm() { e } else { acc });
        if largest.re < 0.0 {
            m = MoebiusMap {
                a: -m.a,
                b: -m.b,
                c: -m.c,
                d: -m.d,
            };
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// `z -> 1/z`.
    pub fn inversion() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO).expect("nonsingular")
    }

    /// `z -> a z + b`.
    pub fn affine(a: C64, b: C64) -> Result<Self> {
        Self::new(a, b, ZERO, ONE)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        let (u, v) = z.homogeneous();
        SpherePoint::from_homogeneous(self.a * u + self.b * v, self.c * u + self.d * v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (other.a, other.b, other.c, other.d);
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
            .expect("product of invertible maps is invertible")
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::new(self.d, -self.b, -self.c, self.a).expect("invertible")
    }

    /// Sends `p1, p2, p3` to `0, 1, inf`.
    fn to_standard_triple(p1: SpherePoint, p2: SpherePoint, p3: SpherePoint) -> Result<Self> {
        let (h1, h2, h3) = (
            unit_homogeneous(p1),
            unit_homogeneous(p2),
            unit_homogeneous(p3),
        );
        let k1 = hdet(h2, h3);
        let k2 = hdet(h2, h1);
        Self::new(k1 * h1.1, -k1 * h1.0, k2 * h3.1, -k2 * h3.0)
    }

    /// The unique Moebius map with `src[i] -> dst[i]`.
    pub fn from_three_points(
        src: [SpherePoint; 3],
        dst: [SpherePoint; 3],
        tol: f64,
    ) -> Result<Self> {
        for (name, pts) in [("source", &src), ("destination", &dst)] {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let dist = pts[i].chordal(&pts[j]);
                if dist <= tol {
                    return Err(Error::CoincidentPoints(format!(
                        "{name} points {i} and {j} are {dist:.3e} apart"
                    )));
                }
            }
        }
        let s = Self::to_standard_triple(src[0], src[1], src[2])?;
        let t = Self::to_standard_triple(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().compose(&s))
    }

    /// Derivative at `z` in the standard charts of `z` and of `M(z)`.
    pub fn deriv_in_charts(&self, z: SpherePoint) -> C64 {
        let det = self.det();
        match z {
            Finite(z) => {
                let w = self.c * z + self.d;
                if w != ZERO {
                    det / (w * w)
                } else {
                    let u = self.a * z + self.b;
                    -det / (u * u)
                }
            }
            Infinity => {
                if self.c != ZERO {
                    -det / (self.c * self.c)
                } else {
                    det / (self.a * self.a)
                }
            }
        }
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Finite(z) => pair(*z).serialize(s),
            Infinity => "inf".serialize(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Pair([f64; 2]),
    Name(String),
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Pair([re, im]) if re.is_finite() && im.is_finite() => {
                Ok(SpherePoint::finite(re, im))
            }
            PointRepr::Name(s) if s == "inf" => Ok(Infinity),
            _ => Err(serde::de::Error::custom(
                "expected [re, im] with finite entries or \"inf\"",
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MoebiusRepr {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MoebiusRepr {
            a: pair(self.a),
            b: pair(self.b),
            c: pair(self.c),
            d: pair(self.d),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MoebiusRepr::deserialize(d)?;
        let c = |p: [f64; 2]| C64::new(p[0], p[1]);
        MoebiusMap::new(c(r.a), c(r.b), c(r.c), c(r.d)).map_err(serde::de::Error::custom)
    }
}
