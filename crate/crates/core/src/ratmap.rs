//! Rational self-maps of the Riemann sphere.
//!
//! A map is stored as a coprime pair `num / den` with formal degree
//! `n = max(deg num, deg den)`. Quantities at infinity are read off in the
//! chart `w = 1/z`, which for a pair of polynomials means reversing the
//! coefficient vectors with respect to the formal degree.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{gcd, roots, Polynomial, C64, DEFAULT_GCD_TOL};
use crate::sphere::{MoebiusMap, SpherePoint};

/// Leading coefficients below this multiple of the coefficient scale are
/// rounding residue of a structural cancellation.
const STRUCTURAL_ZERO: f64 = 64.0 * f64::EPSILON;

/// Multipliers smaller than this mark a fixed point as critical.
pub const CRITICAL_MULTIPLIER_TOL: f64 = 1e-8;

/// Chordal tolerance for accepting a point as fixed.
pub const FIXED_POINT_TOL: f64 = 1e-7;

/// Default cap on `deg(R)^k` for iterates.
pub const DEFAULT_ITERATE_CAP: usize = 64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
    degree: usize,
    // the same pair in the w = 1/z chart of the source
    num_rev: Polynomial,
    den_rev: Polynomial,
    wronskian: Polynomial,
}

/// A map together with the common factor removed while reducing it.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub map: RationalMap,
    pub removed: Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Side {
    /// `R ∘ M`
    Pre,
    /// `M ∘ R`
    Post,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub location: SpherePoint,
    /// Local degree, at least 2.
    pub valency: usize,
    pub critical_value: SpherePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointRecord {
    pub location: SpherePoint,
    pub multiplier: C64,
    pub multiplicity: usize,
    pub is_critical: bool,
    /// Residue fixed-point index, filled in by [`crate::index`].
    pub index: Option<C64>,
}

impl FixedPointRecord {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

/// `R' = W / den^2` with the Wronskian `W = num' den - num den'`.
#[derive(Clone, Debug)]
pub struct DerivativeQuotient {
    pub wronskian: Polynomial,
    pub den_sq: Polynomial,
}

impl DerivativeQuotient {
    pub fn eval(&self, z: C64) -> C64 {
        self.wronskian.eval(z) / self.den_sq.eval(z)
    }
}

fn wronskian_of(num: &Polynomial, den: &Polynomial, degree: usize) -> Polynomial {
    let w = &(&num.derivative() * den) - &(num * &den.derivative());
    // the z^(2n-1) terms cancel identically
    w.truncate((2 * degree).saturating_sub(2))
        .trim_relative(STRUCTURAL_ZERO)
}

fn trim_pair(num: Polynomial, den: Polynomial) -> (Polynomial, Polynomial) {
    let scale = num.norm_inf().max(den.norm_inf());
    let s = C64::new(1.0 / scale, 0.0);
    let trim = |p: Polynomial| {
        let mut c = p.scale(s).into_coeffs();
        while c.last().is_some_and(|x| x.norm() <= STRUCTURAL_ZERO) {
            c.pop();
        }
        Polynomial::new(c)
    };
    (trim(num), trim(den))
}

impl RationalMap {
    /// Reduces `num / den` to lowest terms with the default GCD tolerance.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        Ok(Self::reduce(num, den, DEFAULT_GCD_TOL)?.map)
    }

    /// Reduces to lowest terms and reports the removed common factor, so a
    /// caller can notice when the degree dropped.
    pub fn reduce(num: Polynomial, den: Polynomial, tol: f64) -> Result<Reduction> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = gcd(&num, &den, tol);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.divrem(&g)?.0, den.divrem(&g)?.0)
        } else {
            (num, den)
        };
        Ok(Reduction {
            map: Self::from_coprime(num, den)?,
            removed: g,
        })
    }

    /// Builds a map from a pair already known to be coprime.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        if degree < 1 {
            return Err(Error::MapDegree {
                needed: 1,
                got: degree,
            });
        }
        let num_rev = num.reversed(degree);
        let den_rev = den.reversed(degree);
        let wronskian = wronskian_of(&num, &den, degree);
        Ok(RationalMap {
            num,
            den,
            degree,
            num_rev,
            den_rev,
            wronskian,
        })
    }

    pub fn polynomial(p: Polynomial) -> Result<Self> {
        Self::from_coprime(p, Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn eval(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => {
                SpherePoint::from_homogeneous(self.num_rev.coeff(0), self.den_rev.coeff(0))
            }
            SpherePoint::Finite(z) if z.norm() > 1.0 => {
                let w = z.inv();
                SpherePoint::from_homogeneous(self.num_rev.eval(w), self.den_rev.eval(w))
            }
            SpherePoint::Finite(z) => {
                SpherePoint::from_homogeneous(self.num.eval(z), self.den.eval(z))
            }
        }
    }

    pub fn eval_finite(&self, z: C64) -> SpherePoint {
        self.eval(SpherePoint::Finite(z))
    }

    pub fn derivative_map(&self) -> DerivativeQuotient {
        DerivativeQuotient {
            wronskian: self.wronskian.clone(),
            den_sq: &self.den * &self.den,
        }
    }

    pub fn wronskian(&self) -> &Polynomial {
        &self.wronskian
    }

    /// Derivative at `z` in the standard charts of `z` and `R(z)`.
    pub fn chart_derivative(&self, z: SpherePoint) -> C64 {
        let (num, den, z0) = match z {
            SpherePoint::Finite(z) => (&self.num, &self.den, z),
            SpherePoint::Infinity => (&self.num_rev, &self.den_rev, ZERO),
        };
        // pointwise Wronskian: far better conditioned near clustered roots
        // of den than evaluating the expanded Wronskian coefficients
        let (n, dn) = num.eval_with_derivative(z0);
        let (d, dd) = den.eval_with_derivative(z0);
        let w = dn * d - n * dd;
        if d != ZERO {
            w / (d * d)
        } else {
            -w / (n * n)
        }
    }

    /// `w -> R(1/w)`.
    pub fn invert_input(&self) -> RationalMap {
        Self::from_coprime(self.num_rev.clone(), self.den_rev.clone()).expect("degree preserved")
    }

    /// `z -> 1/R(z)`.
    pub fn invert_output(&self) -> RationalMap {
        Self::from_coprime(self.den.clone(), self.num.clone()).expect("degree preserved")
    }

    /// Conjugate by `z -> 1/z`, i.e. `w -> 1/R(1/w)`.
    pub fn conjugate_by_inversion(&self) -> RationalMap {
        Self::from_coprime(self.den_rev.clone(), self.num_rev.clone()).expect("degree preserved")
    }

    /// Critical points with their local degrees. The valency at infinity is
    /// one more than the order of vanishing of the Wronskian in the `w = 1/z`
    /// chart, which equals the amount by which `deg W` falls short of `2n - 2`.
    pub fn critical_points(&self) -> Result<Vec<CriticalPointRecord>> {
        if self.degree < 2 {
            return Err(Error::MapDegree {
                needed: 2,
                got: self.degree,
            });
        }
        let full = 2 * self.degree - 2;
        let finite_count = self.wronskian.degree().unwrap_or(0);
        let at_infinity = full - finite_count;
        let mut out: Vec<CriticalPointRecord> = group_roots(&self.wronskian)?
            .into_iter()
            .map(|(z, k)| {
                let loc = SpherePoint::Finite(z);
                CriticalPointRecord {
                    location: loc,
                    valency: k + 1,
                    critical_value: self.eval(loc),
                }
            })
            .collect();
        if at_infinity > 0 {
            out.push(CriticalPointRecord {
                location: SpherePoint::Infinity,
                valency: at_infinity + 1,
                critical_value: self.eval(SpherePoint::Infinity),
            });
        }
        Ok(out)
    }

    /// Fixed-point polynomial `num - z den` of formal degree `n + 1`.
    fn fixed_polynomial(&self) -> Polynomial {
        let f = &self.num - &(&Polynomial::identity() * &self.den);
        let scale = self.num.norm_inf().max(self.den.norm_inf());
        let mut c = f.into_coeffs();
        while c
            .last()
            .is_some_and(|x| x.norm() <= STRUCTURAL_ZERO * scale)
        {
            c.pop();
        }
        Polynomial::new(c)
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_polynomial().is_zero()
    }

    /// Fixed points with multiplicity; these sum to `n + 1`.
    pub fn fixed_points(&self) -> Result<Vec<FixedPointRecord>> {
        let f = self.fixed_polynomial();
        if f.is_zero() {
            return Err(Error::IdentityMap);
        }
        let finite_count = f.degree().unwrap_or(0);
        let at_infinity = self.degree + 1 - finite_count;
        let mut locs: Vec<(SpherePoint, usize)> = if finite_count > 0 {
            group_roots(&f)?
                .into_iter()
                .map(|(z, k)| (SpherePoint::Finite(z), k))
                .collect()
        } else {
            Vec::new()
        };
        if at_infinity > 0 {
            locs.push((SpherePoint::Infinity, at_infinity));
        }
        Ok(locs
            .into_iter()
            .map(|(location, multiplicity)| {
                let multiplier = self.chart_derivative(location);
                FixedPointRecord {
                    location,
                    multiplier,
                    multiplicity,
                    is_critical: multiplier.norm() <= CRITICAL_MULTIPLIER_TOL,
                    index: None,
                }
            })
            .collect())
    }

    /// Multiplier at a fixed point, chart-independent.
    pub fn multiplier(&self, p: SpherePoint) -> Result<C64> {
        let distance = self.eval(p).chordal(&p);
        if distance > FIXED_POINT_TOL {
            return Err(Error::NotFixed { distance });
        }
        Ok(self.chart_derivative(p))
    }

    pub fn compose_moebius(&self, m: &MoebiusMap, side: Side) -> RationalMap {
        let [a, b, c, d] = m.entries();
        let (num, den) = match side {
            Side::Post => (
                &self.num.scale(a) + &self.den.scale(b),
                &self.num.scale(c) + &self.den.scale(d),
            ),
            Side::Pre => {
                let top = Polynomial::new(vec![b, a]);
                let bottom = Polynomial::new(vec![d, c]);
                homogeneous_substitute(&self.num, &self.den, self.degree, &top, &bottom)
            }
        };
        let (num, den) = trim_pair(num, den);
        Self::from_coprime(num, den).expect("Moebius composition preserves degree")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> RationalMap {
        let (num, den) =
            homogeneous_substitute(&self.num, &self.den, self.degree, &inner.num, &inner.den);
        let (num, den) = trim_pair(num, den);
        Self::from_coprime(num, den).expect("composition of maps of positive degree")
    }

    /// The `k`-th iterate; `deg(R)^k` must not exceed `cap`.
    pub fn self_compose(&self, k: usize, cap: usize) -> Result<RationalMap> {
        if k == 0 {
            return Err(Error::Precondition("iterate count must be >= 1".into()));
        }
        let degree = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(self.degree));
        match degree {
            Some(d) if d <= cap => {}
            _ => {
                return Err(Error::DegreeCapExceeded {
                    degree: degree.unwrap_or(usize::MAX),
                    cap,
                })
            }
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// Whether `x` lies within `tol` (chordal) of a critical point.
    pub fn is_near_critical(&self, x: SpherePoint, tol: f64) -> Result<bool> {
        Ok(self
            .critical_points()?
            .iter()
            .any(|c| c.location.chordal(&x) <= tol))
    }
}

/// Coefficients of `sum_k p_k top^k bottom^(n-k)` for `p = num` and `p = den`.
fn homogeneous_substitute(
    num: &Polynomial,
    den: &Polynomial,
    n: usize,
    top: &Polynomial,
    bottom: &Polynomial,
) -> (Polynomial, Polynomial) {
    let top_pows: Vec<Polynomial> =
        std::iter::successors(Some(Polynomial::one()), |p| Some(p * top))
            .take(n + 1)
            .collect();
    let bottom_pows: Vec<Polynomial> =
        std::iter::successors(Some(Polynomial::one()), |p| Some(p * bottom))
            .take(n + 1)
            .collect();
    let mut out_num = Polynomial::zero();
    let mut out_den = Polynomial::zero();
    for k in 0..=n {
        let term = &top_pows[k] * &bottom_pows[n - k];
        out_num = &out_num + &term.scale(num.coeff(k));
        out_den = &out_den + &term.scale(den.coeff(k));
    }
    (out_num, out_den)
}

/// Distinct roots with multiplicities. The root finder returns a multiple
/// root as exact repeats, so grouping is by equality.
fn group_roots(p: &Polynomial) -> Result<Vec<(C64, usize)>> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    for z in roots(p)? {
        match out.iter_mut().find(|(w, _)| *w == z) {
            Some((_, k)) => *k += 1,
            None => out.push((z, 1)),
        }
    }
    Ok(out)
}

/// Distinct locations among critical points, merging points within `tol`.
pub fn distinct_critical_locations(records: &[CriticalPointRecord], tol: f64) -> Vec<SpherePoint> {
    let mut out: Vec<SpherePoint> = Vec::new();
    for r in records {
        if !out.iter().any(|p| p.chordal(&r.location) <= tol) {
            out.push(r.location);
        }
    }
    out
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RationalMap")
            .field("num", &self.num)
            .field("den", &self.den)
            .finish()
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapRepr::deserialize(d)?;
        RationalMap::new(r.num, r.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }
    fn power(n: usize) -> RationalMap {
        RationalMap::polynomial(Polynomial::monomial(c(1.0, 0.0), n)).unwrap()
    }
    fn sorted_valencies(r: &RationalMap) -> Vec<usize> {
        let mut v: Vec<usize> = r
            .critical_points()
            .unwrap()
            .iter()
            .map(|c| c.valency)
            .collect();
        v.sort();
        v
    }

    #[test]
    fn eval_examples() {
        assert_eq!(power(2).eval(SpherePoint::Infinity), SpherePoint::Infinity);
        let rh = fixtures::quartic_newton_map();
        let v = rh.eval(pt(0.0, 0.0)).as_finite().unwrap();
        assert!((v - c(-0.8, 0.0)).norm() < 1e-15);
        let r = RationalMap::new(
            Polynomial::from_real(&[1.0, 0.0, 1.0]),
            Polynomial::from_real(&[0.0, 2.0]),
        )
        .unwrap();
        assert_eq!(r.eval(pt(0.0, 0.0)), SpherePoint::Infinity);
        assert_eq!(r.eval(SpherePoint::Infinity), SpherePoint::Infinity);
    }

    #[test]
    fn derivative_examples() {
        let d = power(2).derivative_map();
        assert_eq!(d.wronskian, Polynomial::from_real(&[0.0, 2.0]));
        let inv = RationalMap::new(Polynomial::one(), Polynomial::identity()).unwrap();
        let z = c(0.3, 0.4);
        assert!((inv.derivative_map().eval(z) + (z * z).inv()).norm() < 1e-14);
    }

    #[test]
    fn reduction_removes_common_factor() {
        // (z^2 - 1) / (z - 1) = z + 1, which has degree 1
        let red = RationalMap::reduce(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[-1.0, 1.0]),
            DEFAULT_GCD_TOL,
        )
        .unwrap();
        assert_eq!(red.map.degree(), 1);
        assert_eq!(red.removed.degree(), Some(1));
        assert!(matches!(
            RationalMap::new(Polynomial::from_real(&[1.0]), Polynomial::zero()),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn critical_points_of_power_map() {
        for n in 2..7 {
            let crit = power(n).critical_points().unwrap();
            assert_eq!(crit.len(), 2);
            assert!(crit.iter().all(|r| r.valency == n));
            assert!(crit.iter().any(|r| r.location == SpherePoint::Infinity));
        }
    }

    #[test]
    fn critical_points_of_p0() {
        let crit = fixtures::p0(3).critical_points().unwrap();
        let mut finite: Vec<f64> = crit
            .iter()
            .filter_map(|r| r.location.as_finite())
            .map(|z| z.re)
            .collect();
        finite.sort_by(f64::total_cmp);
        assert!((finite[0] + 1.0).abs() < 1e-14 && (finite[1] - 1.0).abs() < 1e-14);
        assert_eq!(sorted_valencies(&fixtures::p0(3)), vec![2, 2, 3]);
    }

    #[test]
    fn critical_points_of_quartic_newton_map() {
        // two points of valency three, two of valency two, nothing else
        assert_eq!(
            sorted_valencies(&fixtures::quartic_newton_map()),
            vec![2, 2, 3, 3]
        );
    }

    #[test]
    fn fixed_points_examples() {
        let fp = power(2).fixed_points().unwrap();
        assert_eq!(fp.len(), 3);
        assert_eq!(fp.iter().map(|f| f.multiplicity).sum::<usize>(), 3);
        let locs: Vec<SpherePoint> = fp.iter().map(|f| f.location).collect();
        for want in [pt(0.0, 0.0), pt(1.0, 0.0), SpherePoint::Infinity] {
            assert!(locs.iter().any(|l| l.chordal(&want) < 1e-14));
        }

        let fp = fixtures::p0(3).fixed_points().unwrap();
        for want in [
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(-1.0, 0.0),
            SpherePoint::Infinity,
        ] {
            assert!(fp.iter().any(|f| f.location.chordal(&want) < 1e-14));
        }

        let h = fixtures::quartic_h();
        let fp = fixtures::quartic_newton_map().fixed_points().unwrap();
        assert_eq!(fp.len(), 5);
        for f in &fp {
            match f.location {
                SpherePoint::Finite(z) => assert!(h.eval(z).norm() < 1e-12),
                SpherePoint::Infinity => {}
            }
        }
        assert!(matches!(
            RationalMap::polynomial(Polynomial::identity())
                .unwrap()
                .fixed_points(),
            Err(Error::IdentityMap)
        ));
    }

    #[test]
    fn multiplier_examples() {
        for n in 2..6 {
            assert_eq!(power(n).multiplier(SpherePoint::Infinity).unwrap(), ZERO);
            let p0 = fixtures::p0(n);
            let lam = p0.multiplier(pt(0.0, 0.0)).unwrap();
            assert!((lam - c(n as f64 / (n as f64 - 1.0), 0.0)).norm() < 1e-14);
        }
        let lam = fixtures::quartic_newton_map()
            .multiplier(SpherePoint::Infinity)
            .unwrap();
        assert!((lam - c(4.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            power(2).multiplier(pt(2.0, 0.0)),
            Err(Error::NotFixed { .. })
        ));
    }

    #[test]
    fn moebius_composition_examples() {
        let sq = power(2);
        let same = sq.compose_moebius(&MoebiusMap::identity(), Side::Post);
        let z = pt(0.3, 0.7);
        assert!(same.eval(z).chordal(&sq.eval(z)) < 1e-15);

        let shift = MoebiusMap::affine(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let r = sq.compose_moebius(&shift, Side::Post);
        assert!(r.is_polynomial());
        let lead = r.den().coeff(0);
        let expect = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        assert!((&r.num().scale(lead.inv()) - &expect).norm_inf() < 1e-15);

        // R_g for g = z^3 + z is conjugate to p0 (n = 3) through z -> 1/z,
        // up to an affine change of coordinates
        let g = Polynomial::from_real(&[0.0, 1.0, 0.0, 1.0]);
        let rg = crate::newton::newton_map(&g, &Polynomial::one()).unwrap();
        let conj = rg.conjugate_by_inversion();
        assert!(conj.is_polynomial());
        let p0 = fixtures::p0(3);
        // both are cubic polynomials with all finite critical points fixed and
        // multiplier 3/2 at 0
        assert!((conj.multiplier(pt(0.0, 0.0)).unwrap() - c(1.5, 0.0)).norm() < 1e-14);
        assert!((p0.multiplier(pt(0.0, 0.0)).unwrap() - c(1.5, 0.0)).norm() < 1e-14);
        for crit in conj.critical_points().unwrap() {
            assert!(conj.eval(crit.location).chordal(&crit.location) < 1e-12);
        }
    }

    #[test]
    fn self_compose_examples() {
        let z8 = power(2).self_compose(3, DEFAULT_ITERATE_CAP).unwrap();
        assert_eq!(z8.degree(), 8);
        let z = pt(0.9, 0.1);
        let w = z.as_finite().unwrap().powu(8);
        assert!((z8.eval(z).as_finite().unwrap() - w).norm() < 1e-14);
        assert!(matches!(
            power(3).self_compose(4, DEFAULT_ITERATE_CAP),
            Err(Error::DegreeCapExceeded {
                degree: 81,
                cap: 64
            })
        ));
    }

    #[test]
    fn iterate_multipliers_square() {
        let r = fixtures::quartic_newton_map();
        let r2 = r.self_compose(2, DEFAULT_ITERATE_CAP).unwrap();
        for f in r.fixed_points().unwrap() {
            let lam2 = r2.multiplier(f.location).unwrap();
            assert!(
                (lam2 - f.multiplier * f.multiplier).norm() < 1e-7,
                "{:?} {} {}",
                f.location,
                lam2,
                f.multiplier
            );
        }
    }

    #[test]
    fn iterates_keep_critical_points_and_gain_preimages() {
        // critical points of R stay critical for R∘R; preimages of them
        // become new critical points of R∘R
        let r = fixtures::p0(3);
        let r2 = r.self_compose(2, DEFAULT_ITERATE_CAP).unwrap();
        let w2 = r2.wronskian();
        for crit in r.critical_points().unwrap() {
            if let SpherePoint::Finite(z) = crit.location {
                assert!(w2.eval(z).norm() < 1e-10 * w2.norm_one());
            }
        }
        // -2 maps to the critical point 1 under p0, so it is critical for p0∘p0
        assert!(w2.eval(c(-2.0, 0.0)).norm() < 1e-10 * w2.norm_one());
        assert!(r.eval(pt(-2.0, 0.0)).chordal(&pt(1.0, 0.0)) < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let r = fixtures::quartic_newton_map();
        let s = serde_json::to_string(&r).unwrap();
        let back: RationalMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back.num(), r.num());
        assert_eq!(back.den(), r.den());
        assert!(serde_json::from_str::<RationalMap>(r#"{"num":[[1,0]],"den":[]}"#).is_err());
    }
}
