//! Residue fixed-point indices and the multiplier constraints on maps whose
//! critical points are all fixed.
//!
//! The index at an isolated fixed point `z0` is `(1/2πi) ∮ dz / (z - R(z))`,
//! computed as `∮ den / (z den - num)` so poles of `R` inside the contour do
//! no harm. Points outside the unit disc (and ∞) are handled in the chart
//! `w = 1/z`, where the index is the same.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::newton::all_critical_fixed;
use crate::poly::C64;
use crate::ratmap::{
    distinct_critical_locations, FixedPointRecord, RationalMap, DEFAULT_ITERATE_CAP,
};
use crate::smale::CRITICAL_MERGE_TOL;
use crate::sphere::SpherePoint;

/// `|λ - 1|` below this: formula path disabled, quadrature only.
pub const NEAR_PARABOLIC: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureOptions {
    pub nodes: usize,
    pub max_radius: f64,
    /// Disagreement between `N` and `2N` nodes that triggers a shrink.
    pub agreement: f64,
    pub max_shrinks: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            nodes: 256,
            max_radius: 0.1,
            agreement: 1e-8,
            max_shrinks: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndexEstimate {
    pub value: C64,
    pub radius: f64,
    pub disagreement: f64,
    /// Whether the integral was taken in the chart `w = 1/z`.
    pub inverted_chart: bool,
}

fn trapezoid(r: &RationalMap, center: C64, radius: f64, nodes: usize) -> C64 {
    let (num, den) = (r.num(), r.den());
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let t = C64::from_polar(radius, TAU * k as f64 / nodes as f64);
        let z = center + t;
        let d = den.eval(z);
        acc += t * d / (z * d - num.eval(z));
    }
    acc / nodes as f64
}

/// Index at `z0`, with `others` the remaining fixed points (used to size
/// the contour).
pub fn fixed_point_index_among(
    r: &RationalMap,
    z0: SpherePoint,
    others: &[SpherePoint],
    opts: &QuadratureOptions,
) -> Result<IndexEstimate> {
    if r.is_identity() {
        return Err(Error::IdentityMap);
    }
    let inverted_chart = match z0 {
        SpherePoint::Infinity => true,
        SpherePoint::Finite(z) => z.norm() > 1.0,
    };
    let map = if inverted_chart {
        r.conjugate_by_inversion()
    } else {
        r.clone()
    };
    let chart = |p: SpherePoint| if inverted_chart { p.reciprocal() } else { p };
    let center = chart(z0).as_finite().expect("chart centre is finite");
    let nearest: f64 = others
        .iter()
        .filter_map(|p| chart(*p).as_finite())
        .map(|w| (w - center).norm())
        .fold(f64::INFINITY, f64::min);
    if nearest == 0.0 {
        return Err(Error::Precondition(format!(
            "{z0} is listed among the other fixed points"
        )));
    }
    let mut radius = (0.5 * nearest).min(opts.max_radius);
    let mut disagreement = f64::INFINITY;
    for _ in 0..=opts.max_shrinks {
        let coarse = trapezoid(&map, center, radius, opts.nodes);
        let fine = trapezoid(&map, center, radius, 2 * opts.nodes);
        disagreement = (fine - coarse).norm();
        if disagreement <= opts.agreement * fine.norm().max(1.0) {
            return Ok(IndexEstimate {
                value: fine,
                radius,
                disagreement,
                inverted_chart,
            });
        }
        radius *= 0.5;
    }
    Err(Error::QuadratureNonConvergence { disagreement })
}

/// Index at `z0`, which must be a fixed point of `r`.
pub fn fixed_point_index(r: &RationalMap, z0: SpherePoint) -> Result<C64> {
    r.multiplier(z0)?;
    let fixed = r.fixed_points()?;
    let others: Vec<SpherePoint> = fixed
        .iter()
        .map(|f| f.location)
        .filter(|p| p.chordal(&z0) > 0.0)
        .collect();
    Ok(fixed_point_index_among(r, z0, &others, &QuadratureOptions::default())?.value)
}

/// The simple-point formula `1/(1-λ)`; `None` near multiplier 1.
pub fn index_formula(multiplier: C64) -> Option<C64> {
    let gap = C64::new(1.0, 0.0) - multiplier;
    (gap.norm() >= NEAR_PARABOLIC).then(|| gap.inv())
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexedFixedPoint {
    #[serde(flatten)]
    pub record: FixedPointRecord,
    pub radius: f64,
    pub near_parabolic: bool,
    /// `1/(1-λ)` when the point is simple and not near-parabolic.
    pub formula: Option<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexSumReport {
    pub fixed: Vec<IndexedFixedPoint>,
    pub sum: C64,
    /// `|sum - 1|`.
    pub deviation: f64,
}

/// Indices at every fixed point (including ∞) and their sum.
pub fn index_sum_check(r: &RationalMap) -> Result<IndexSumReport> {
    let records = r.fixed_points()?;
    let opts = QuadratureOptions::default();
    let mut fixed = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let others: Vec<SpherePoint> = records
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| o.location)
            .collect();
        let est = fixed_point_index_among(r, rec.location, &others, &opts)?;
        let near_parabolic = (rec.multiplier - 1.0).norm() < NEAR_PARABOLIC;
        let formula = if rec.is_simple() {
            index_formula(rec.multiplier)
        } else {
            None
        };
        let mut record = rec.clone();
        record.index = Some(est.value);
        fixed.push(IndexedFixedPoint {
            record,
            radius: est.radius,
            near_parabolic,
            formula,
        });
    }
    let sum: C64 = fixed.iter().map(|f| f.record.index.unwrap()).sum();
    Ok(IndexSumReport {
        deviation: (sum - 1.0).norm(),
        sum,
        fixed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
    pub closed: bool,
}

impl Disc {
    pub fn contains(&self, z: C64) -> bool {
        let d = (z - self.center).norm();
        if self.closed {
            d <= self.radius
        } else {
            d < self.radius
        }
    }

    /// Signed distance from the boundary circle, positive outside.
    pub fn clearance(&self, z: C64) -> f64 {
        (z - self.center).norm() - self.radius
    }
}

/// Closed disc with diameter `[1, 1 + 2/(n+m-2)]`.
pub fn forbidden_disc(n: usize, m: usize) -> Result<Disc> {
    if n < 2 || m < 1 || n + m < 3 {
        return Err(Error::Precondition(format!(
            "forbidden disc needs n >= 2, m >= 1, n + m >= 3 (got n = {n}, m = {m})"
        )));
    }
    let s = 1.0 / (n + m - 2) as f64;
    Ok(Disc {
        center: C64::new(1.0 + s, 0.0),
        radius: s,
        closed: true,
    })
}

/// Multipliers within this of `n/(n-1)` count as the boundary case.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct IterateCheck {
    pub iterate: usize,
    pub degree: usize,
    /// Multiplier of `R^k` measured on the iterate itself.
    pub multiplier: C64,
    /// `|measured - λ^k|`.
    pub power_mismatch: f64,
    pub disc: Disc,
    pub outside: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForbiddenEntry {
    pub location: SpherePoint,
    pub multiplier: C64,
    pub index: C64,
    pub is_critical: bool,
    pub on_boundary: bool,
    pub iterates: Vec<IterateCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForbiddenReport {
    pub n: usize,
    pub m: usize,
    pub disc: Disc,
    pub fixed: Vec<ForbiddenEntry>,
    pub non_critical: usize,
    /// Iterates skipped because their degree exceeds the cap.
    pub skipped_iterates: Vec<usize>,
    pub violations: Vec<String>,
}

impl ForbiddenReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the multiplier constraints for a map whose critical points are all
/// fixed. With `max_iterate > 1`, each non-critical multiplier is also
/// measured on `R^k` and checked against the `(n^k, m)` disc.
pub fn forbidden_check(r: &RationalMap, max_iterate: usize) -> Result<ForbiddenReport> {
    let cf = all_critical_fixed(r)?;
    if !cf.all_fixed {
        let worst = cf.residuals.iter().map(|x| x.1).fold(0.0, f64::max);
        return Err(Error::Precondition(format!(
            "not every critical point is fixed (worst chordal residual {worst:e})"
        )));
    }
    let n = r.degree();
    let crit = distinct_critical_locations(&r.critical_points()?, CRITICAL_MERGE_TOL);
    let m = crit.len();
    let disc = forbidden_disc(n, m)?;
    let indices = index_sum_check(r)?;
    let boundary = n as f64 / (n as f64 - 1.0);
    let mut violations = Vec::new();
    if indices.fixed.len() != n + 1 {
        violations.push(format!(
            "{} distinct fixed points, expected n + 1 = {}",
            indices.fixed.len(),
            n + 1
        ));
    }

    let mut iterates = Vec::new();
    let mut skipped_iterates = Vec::new();
    for k in 2..=max_iterate {
        match r.self_compose(k, DEFAULT_ITERATE_CAP) {
            Ok(rk) => iterates.push((k, rk)),
            Err(Error::DegreeCapExceeded { .. }) => skipped_iterates.push(k),
            Err(e) => return Err(e),
        }
    }

    let mut fixed = Vec::new();
    let mut non_critical = 0;
    for f in &indices.fixed {
        let rec = &f.record;
        let lambda = rec.multiplier;
        let is_critical = crit
            .iter()
            .any(|c| c.chordal(&rec.location) <= CRITICAL_MERGE_TOL);
        let mut entry = ForbiddenEntry {
            location: rec.location,
            multiplier: lambda,
            index: rec.index.unwrap(),
            is_critical,
            on_boundary: false,
            iterates: Vec::new(),
        };
        if is_critical {
            fixed.push(entry);
            continue;
        }
        non_critical += 1;
        let at = rec.location;
        if lambda.norm() <= 1.0 {
            violations.push(format!("|λ| = {} <= 1 at {at}", lambda.norm()));
        }
        if (1.0 / (1.0 - lambda)).re >= 0.5 {
            violations.push(format!("Re(1/(1-λ)) >= 1/2 at {at}"));
        }
        entry.on_boundary = (lambda - boundary).norm() <= BOUNDARY_TOL;
        if entry.on_boundary {
            if m != n {
                violations.push(format!("λ = n/(n-1) at {at} but m = {m} < n = {n}"));
            }
        } else if disc.contains(lambda) {
            violations.push(format!("λ = {lambda} at {at} lies in the forbidden disc"));
        }
        for (k, rk) in &iterates {
            let measured = rk.chart_derivative(at);
            let degree = rk.degree();
            let dk = forbidden_disc(degree, m)?;
            let outside = dk.clearance(measured) > BOUNDARY_TOL * measured.norm().max(1.0);
            if !outside {
                violations.push(format!(
                    "λ^{k} = {measured} at {at} lies in the ({degree}, {m}) disc"
                ));
            }
            entry.iterates.push(IterateCheck {
                iterate: *k,
                degree,
                multiplier: measured,
                power_mismatch: (measured - lambda.powu(*k as u32)).norm(),
                disc: dk,
                outside,
            });
        }
        fixed.push(entry);
    }
    if non_critical + m != n + 1 && indices.fixed.len() == n + 1 {
        violations.push(format!(
            "{non_critical} non-critical fixed points, expected n + 1 - m = {}",
            n + 1 - m
        ));
    }
    Ok(ForbiddenReport {
        n,
        m,
        disc,
        fixed,
        non_critical,
        skipped_iterates,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::Polynomial;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn simple_and_superattracting_indices() {
        let doubling = RationalMap::polynomial(Polynomial::from_real(&[0.0, 2.0])).unwrap();
        let i = fixed_point_index(&doubling, SpherePoint::finite(0.0, 0.0)).unwrap();
        assert!((i - c(-1.0)).norm() < 1e-12);
        let sq = fixtures::power(2);
        let i = fixed_point_index(&sq, SpherePoint::finite(0.0, 0.0)).unwrap();
        assert!((i - c(1.0)).norm() < 1e-12);
        let i = fixed_point_index(&sq, SpherePoint::Infinity).unwrap();
        assert!((i - c(1.0)).norm() < 1e-12);
        assert!(fixed_point_index(&sq, SpherePoint::finite(2.0, 0.0)).is_err());
    }

    #[test]
    fn parabolic_point_against_brute_force() {
        // z + z^2: fixed points 0 (double) and ∞
        let r = RationalMap::polynomial(Polynomial::from_real(&[0.0, 1.0, 1.0])).unwrap();
        let z0 = SpherePoint::finite(0.0, 0.0);
        let got = fixed_point_index(&r, z0).unwrap();
        let oracle = trapezoid(&r, c(0.0), 1e-2, 8192);
        assert!((got - oracle).norm() < 1e-10, "{got} vs {oracle}");
        // 1/(z - f(z)) = -1/z^2 has no residue; ∞ carries the whole sum
        assert!(got.norm() < 1e-10);
        assert!(index_sum_check(&r).unwrap().deviation < 1e-10);
    }

    #[test]
    fn index_sums() {
        let rep = index_sum_check(&fixtures::power(2)).unwrap();
        assert!(rep.deviation < 1e-10);
        let mut idx: Vec<f64> = rep
            .fixed
            .iter()
            .map(|f| f.record.index.unwrap().re)
            .collect();
        idx.sort_by(f64::total_cmp);
        assert!(
            (idx[0] + 1.0).abs() < 1e-10
                && (idx[1] - 1.0).abs() < 1e-10
                && (idx[2] - 1.0).abs() < 1e-10
        );

        let rep = index_sum_check(&fixtures::p0(3)).unwrap();
        assert!(rep.deviation < 1e-10);
        for f in &rep.fixed {
            let want = if f.record.is_critical { 1.0 } else { -2.0 };
            assert!((f.record.index.unwrap() - c(want)).norm() < 1e-9);
        }
        assert!(index_sum_check(
            &RationalMap::polynomial(Polynomial::from_real(&[0.0, 1.0])).unwrap()
        )
        .is_err());
    }

    #[test]
    fn discs() {
        let d = forbidden_disc(3, 2).unwrap();
        assert!((d.center - c(4.0 / 3.0)).norm() < 1e-15 && (d.radius - 1.0 / 3.0).abs() < 1e-15);
        for n in 2..8 {
            let d = forbidden_disc(n, n).unwrap();
            let b = c(n as f64 / (n as f64 - 1.0));
            assert!(d.clearance(b).abs() < 1e-14 && d.clearance(c(1.0)).abs() < 1e-14);
            for m in 1..n {
                if n + m >= 3 {
                    assert!(forbidden_disc(n, m).unwrap().clearance(b) < -1e-3);
                }
            }
        }
        assert!(forbidden_disc(2, 0).is_err());
    }

    #[test]
    fn fixture_checks() {
        let rep = forbidden_check(&fixtures::p0(3), 2).unwrap();
        assert_eq!((rep.n, rep.m, rep.non_critical), (3, 3, 1));
        let nc: Vec<_> = rep.fixed.iter().filter(|f| !f.is_critical).collect();
        assert!(
            nc[0].on_boundary && nc[0].location.chordal(&SpherePoint::finite(0.0, 0.0)) < 1e-12
        );
        assert!(nc[0].iterates[0].power_mismatch < 1e-9);
        assert!(rep.passed(), "{:?}", rep.violations);

        let rep = forbidden_check(&fixtures::quartic_newton_map(), 1).unwrap();
        assert_eq!((rep.n, rep.m), (4, 4));
        let nc: Vec<_> = rep.fixed.iter().filter(|f| !f.is_critical).collect();
        assert_eq!(nc.len(), 1);
        assert!(nc[0].location.is_infinite() && (nc[0].multiplier - c(4.0 / 3.0)).norm() < 1e-10);
        assert!(rep.passed(), "{:?}", rep.violations);

        for n in 3..7 {
            let rep = forbidden_check(&fixtures::power(n), 3).unwrap();
            assert_eq!(rep.m, 2);
            assert_eq!(rep.non_critical, n - 1);
            for f in rep.fixed.iter().filter(|f| !f.is_critical) {
                assert!((f.multiplier - c(n as f64)).norm() < 1e-9 && !f.on_boundary);
            }
            assert!(rep.passed(), "{:?}", rep.violations);
        }
        let not_pcf = RationalMap::polynomial(Polynomial::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert!(matches!(
            forbidden_check(&not_pcf, 1),
            Err(Error::Precondition(_))
        ));
    }
}
