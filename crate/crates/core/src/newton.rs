//! Newton–Raphson maps `R_g = z - g/g'` and their recognition from fixed-point data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{gcd, roots, Polynomial, C64, DEFAULT_GCD_TOL};
use crate::ratmap::{RationalMap, Reduction};
use crate::sphere::SpherePoint;

/// Default tolerance on `|1/(1-λ) - m|` for integer detection.
pub const DEFAULT_INTEGER_TOL: f64 = 1e-6;

/// `|1 - λ|` below this means the fixed point is not simple.
pub const PARABOLIC_GUARD: f64 = 1e-9;

const ONE: C64 = C64::new(1.0, 0.0);

/// Newton map of `g = g_num / g_den`, reduced to lowest terms. The removed
/// common factor is non-trivial exactly when `deg R_g < deg g`.
pub fn newton_map_reduced(g_num: &Polynomial, g_den: &Polynomial) -> Result<Reduction> {
    if g_den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    // g' = (P'Q - PQ') / Q^2, so R = (z (P'Q - PQ') - PQ) / (P'Q - PQ')
    let dg = &(&g_num.derivative() * g_den) - &(g_num * &g_den.derivative());
    if dg.is_zero() {
        return Err(Error::Precondition("g is constant".into()));
    }
    let num = &(&Polynomial::identity() * &dg) - &(g_num * g_den);
    RationalMap::reduce(num, dg, DEFAULT_GCD_TOL)
}

pub fn newton_map(g_num: &Polynomial, g_den: &Polynomial) -> Result<RationalMap> {
    Ok(newton_map_reduced(g_num, g_den)?.map)
}

/// Multiplier of `R_g` at a point where `g` has order `m` (negative for poles).
pub fn multiplier_from_order(m: i64) -> Result<C64> {
    if m == 0 {
        return Err(Error::Precondition("order must be nonzero".into()));
    }
    Ok(C64::new(1.0 - 1.0 / m as f64, 0.0))
}

/// Maximum over sample points of `|R_g'(z) - g g'' / g'^2| / (1 + |g g'' / g'^2|)`.
pub fn newton_derivative_check(g: &Polynomial, samples: usize, seed: u64) -> Result<f64> {
    if g.degree().unwrap_or(0) < 2 {
        return Err(Error::DegreeTooLow {
            needed: 2,
            got: g.degree(),
        });
    }
    let r = newton_map(g, &Polynomial::one())?;
    let d = r.derivative_map();
    let (g1, g2) = (g.derivative(), g.nth_derivative(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = g1.norm_one();
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < samples {
        let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let gp = g1.eval(z);
        // keep away from poles of R_g
        if gp.norm() < 1e-3 * scale || r.den().eval(z).norm() < 1e-3 * r.den().norm_one() {
            continue;
        }
        taken += 1;
        let rhs = g.eval(z) * g2.eval(z) / (gp * gp);
        let lhs = d.eval(z);
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct HConditionReport {
    pub holds: bool,
    pub squarefree: bool,
    /// Roots of `h''` that lie on a root of `h`.
    pub matched: Vec<C64>,
    pub unmatched: Vec<C64>,
}

/// Whether `h` has no repeated roots and every root of `h''` is a root of `h`.
pub fn h_condition_check(h: &Polynomial) -> Result<HConditionReport> {
    if h.degree().unwrap_or(0) < 2 {
        return Err(Error::DegreeTooLow {
            needed: 2,
            got: h.degree(),
        });
    }
    let squarefree = gcd(h, &h.derivative(), DEFAULT_GCD_TOL).degree() == Some(0);
    let h_roots = roots(h)?;
    let h2 = h.nth_derivative(2);
    let h2_roots = if h2.degree().unwrap_or(0) >= 1 {
        roots(&h2)?
    } else {
        Vec::new()
    };
    let (matched, unmatched): (Vec<C64>, Vec<C64>) = h2_roots.into_iter().partition(|&w| {
        h_roots
            .iter()
            .any(|&z| SpherePoint::Finite(z).chordal(&SpherePoint::Finite(w)) <= 1e-8)
    });
    Ok(HConditionReport {
        holds: squarefree && unmatched.is_empty(),
        squarefree,
        matched,
        unmatched,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalFixedReport {
    pub all_fixed: bool,
    /// `(critical point, chordal distance to its image)`.
    pub residuals: Vec<(SpherePoint, f64)>,
}

/// Whether every critical point is fixed (chordal tolerance `1e-8`).
pub fn all_critical_fixed(r: &RationalMap) -> Result<CriticalFixedReport> {
    let residuals: Vec<(SpherePoint, f64)> = r
        .critical_points()?
        .into_iter()
        .map(|c| (c.location, c.critical_value.chordal(&c.location)))
        .collect();
    Ok(CriticalFixedReport {
        all_fixed: residuals.iter().all(|(_, d)| *d <= 1e-8),
        residuals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedDatum {
    pub location: SpherePoint,
    pub multiplier: C64,
    /// `1 / (1 - λ)`; `None` when the point is not simple.
    pub index: Option<C64>,
    /// Nearest integer to the index when it is within tolerance.
    pub order: Option<i64>,
}

/// `g = prod (z - χ)^m`, with the expanded numerator and denominator.
#[derive(Clone, Debug, Serialize)]
pub struct FactoredFunction {
    pub factors: Vec<(C64, i64)>,
    pub num: Polynomial,
    pub den: Polynomial,
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonCharacterization {
    pub is_newton: bool,
    pub fixed_data: Vec<FixedDatum>,
    pub reconstructed_g: Option<FactoredFunction>,
    /// All finite orders positive, so `g` is a polynomial.
    pub is_polynomial_case: bool,
    /// Largest distance of a fixed-point index from the nearest integer.
    pub residual: f64,
    /// Largest chordal gap between `R` and the Newton map of the reconstructed `g`.
    pub roundtrip_error: Option<f64>,
    pub reason: Option<String>,
}

/// Decides whether `r` is the Newton map of a rational function: every fixed
/// point must be simple with `1/(1-λ)` an integer. When it is, `g` is
/// rebuilt as `prod (z - χ)^m` over the finite fixed points and checked by
/// recomputing its Newton map.
pub fn characterize(r: &RationalMap, tol: f64) -> Result<NewtonCharacterization> {
    let fixed = r.fixed_points()?;
    let mut data = Vec::with_capacity(fixed.len());
    let mut residual: f64 = 0.0;
    let mut reason = None;
    for f in &fixed {
        let gap = ONE - f.multiplier;
        if f.multiplicity > 1 || gap.norm() < PARABOLIC_GUARD {
            reason.get_or_insert_with(|| format!("fixed point {} is not simple", f.location));
            data.push(FixedDatum {
                location: f.location,
                multiplier: f.multiplier,
                index: None,
                order: None,
            });
            residual = f64::INFINITY;
            continue;
        }
        let index = gap.inv();
        let m = index.re.round();
        let dev = (index - C64::new(m, 0.0)).norm();
        residual = residual.max(dev);
        let order = (dev <= tol && m != 0.0).then_some(m as i64);
        if order.is_none() {
            reason.get_or_insert_with(|| {
                format!("index {index} at {} is not a nonzero integer", f.location)
            });
        }
        data.push(FixedDatum {
            location: f.location,
            multiplier: f.multiplier,
            index: Some(index),
            order,
        });
    }

    if reason.is_some() {
        return Ok(NewtonCharacterization {
            is_newton: false,
            fixed_data: data,
            reconstructed_g: None,
            is_polynomial_case: false,
            residual,
            roundtrip_error: None,
            reason,
        });
    }

    let factors: Vec<(C64, i64)> = data
        .iter()
        .filter_map(|d| Some((d.location.as_finite()?, d.order?)))
        .collect();
    let mut num = Polynomial::one();
    let mut den = Polynomial::one();
    for &(chi, m) in &factors {
        let f = Polynomial::linear(chi).pow(m.unsigned_abs() as usize);
        if m > 0 {
            num = &num * &f;
        } else {
            den = &den * &f;
        }
    }
    let is_polynomial_case = factors.iter().all(|&(_, m)| m > 0);

    let rebuilt = newton_map(&num, &den)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let roundtrip = (0..20)
        .map(|_| {
            let z = SpherePoint::finite(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            r.eval(z).chordal(&rebuilt.eval(z))
        })
        .fold(0.0, f64::max);
    let ok = roundtrip <= 1e-7;
    Ok(NewtonCharacterization {
        is_newton: ok,
        fixed_data: data,
        reconstructed_g: Some(FactoredFunction { factors, num, den }),
        is_polynomial_case,
        residual,
        roundtrip_error: Some(roundtrip),
        reason: (!ok).then(|| format!("Newton map of the rebuilt g differs by {roundtrip:.3e}")),
    })
}
