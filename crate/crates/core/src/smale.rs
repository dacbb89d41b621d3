//! Mean-value functionals.
//!
//! * `S(p, x) = min |(p(ζ) - p(x)) / ((ζ - x) p'(x))|` over critical points ζ.
//! * One-critical-point functional: for a critical point ζ, `M` is the
//!   Moebius map making `M ∘ R` fix `x`, `y` and `ζ`; the candidate value is
//!   `|(M ∘ R)#(x)|` and the report keeps the best candidate, which is always
//!   larger than 1/4.
//! * Two-critical-point functional: same with `x, ζ, κ` fixed; the best pair
//!   is always at least 1/2.
//!
//! Degenerate candidates are skipped and listed, never treated as errors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{roots, Polynomial, C64};
use crate::ratmap::{distinct_critical_locations, RationalMap};
use crate::sphere::{MoebiusMap, SpherePoint};

/// Critical points closer than this (chordal) are the same location.
pub const CRITICAL_MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct SmaleReport {
    pub value: f64,
    /// `(ζ, |(p(ζ) - p(x)) / ((ζ - x) p'(x))|)` per distinct critical point.
    pub ratios: Vec<(C64, f64)>,
    /// Smale's theorem: `S <= 4`.
    pub bound: f64,
    /// `1 - 1/n`.
    pub conjectured: f64,
}

pub fn smale_report(p: &Polynomial, x: C64, tol: f64) -> Result<SmaleReport> {
    let n = match p.degree() {
        Some(d) if d >= 2 => d,
        got => return Err(Error::DegreeTooLow { needed: 2, got }),
    };
    let dp = p.derivative();
    let slope = dp.eval(x);
    let mut crit: Vec<C64> = Vec::new();
    for z in roots(&dp)? {
        let zp = SpherePoint::Finite(z);
        if !crit
            .iter()
            .any(|&w| SpherePoint::Finite(w).chordal(&zp) <= CRITICAL_MERGE_TOL)
        {
            crit.push(z);
        }
    }
    let xp = SpherePoint::Finite(x);
    if slope == C64::new(0.0, 0.0)
        || crit
            .iter()
            .any(|&z| SpherePoint::Finite(z).chordal(&xp) <= tol)
    {
        return Err(Error::Precondition(format!("{x} is a critical point")));
    }
    let px = p.eval(x);
    let ratios: Vec<(C64, f64)> = crit
        .iter()
        .map(|&z| (z, ((p.eval(z) - px) / ((z - x) * slope)).norm()))
        .collect();
    let value = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(SmaleReport {
        value,
        ratios,
        bound: 4.0,
        conjectured: 1.0 - 1.0 / n as f64,
    })
}

pub fn smale_quantity(p: &Polynomial, x: C64, tol: f64) -> Result<f64> {
    Ok(smale_report(p, x, tol)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremKind {
    /// One critical point, two marked points.
    OneCritical,
    /// Two critical points, one marked point.
    TwoCritical,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub critical: Vec<SpherePoint>,
    pub moebius: MoebiusMap,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Skipped {
    pub critical: Vec<SpherePoint>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub kind: TheoremKind,
    pub degree: usize,
    pub candidates: Vec<Candidate>,
    /// `None` when every candidate was degenerate.
    pub best: Option<f64>,
    pub bound: f64,
    pub conjectured: f64,
    pub skipped: Vec<Skipped>,
}

impl TheoremReport {
    /// Whether the best value satisfies the proven bound (strict for the
    /// one-critical-point version). `None` if there were no candidates.
    pub fn holds(&self) -> Option<bool> {
        let best = self.best?;
        Some(match self.kind {
            TheoremKind::OneCritical => best > self.bound,
            TheoremKind::TwoCritical => best >= self.bound,
        })
    }

    fn finish(
        kind: TheoremKind,
        degree: usize,
        candidates: Vec<Candidate>,
        skipped: Vec<Skipped>,
    ) -> Self {
        let best = candidates
            .iter()
            .map(|c| c.value)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            });
        TheoremReport {
            kind,
            degree,
            candidates,
            best,
            bound: match kind {
                TheoremKind::OneCritical => 0.25,
                TheoremKind::TwoCritical => 0.5,
            },
            conjectured: degree as f64 / (degree as f64 - 1.0),
            skipped,
        }
    }
}

fn require_degree(r: &RationalMap) -> Result<()> {
    if r.degree() < 2 {
        return Err(Error::MapDegree {
            needed: 2,
            got: r.degree(),
        });
    }
    Ok(())
}

/// `|(M ∘ R)#(x)|` where `M` sends `R(src[i])` to `src[i]`.
fn normalized_multiplier(r: &RationalMap, x: SpherePoint, m: &MoebiusMap) -> f64 {
    (m.deriv_in_charts(r.eval(x)) * r.chart_derivative(x)).norm()
}

pub fn thm1_report(
    r: &RationalMap,
    x: SpherePoint,
    y: SpherePoint,
    tol: f64,
) -> Result<TheoremReport> {
    require_degree(r)?;
    let (rx, ry) = (r.eval(x), r.eval(y));
    if rx.chordal(&ry) <= tol {
        return Err(Error::Precondition(format!("R(x) = R(y) = {rx}")));
    }
    let crit = r.critical_points()?;
    let locations = distinct_critical_locations(&crit, CRITICAL_MERGE_TOL);
    if locations.iter().any(|z| z.chordal(&x) <= tol) {
        return Err(Error::Precondition(format!("x = {x} is a critical point")));
    }
    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for zeta in locations {
        let rz = r.eval(zeta);
        let reason = if zeta.chordal(&y) <= tol {
            Some("critical point coincides with y")
        } else if rz.chordal(&rx) <= tol {
            Some("critical value coincides with R(x)")
        } else if rz.chordal(&ry) <= tol {
            Some("critical value coincides with R(y)")
        } else {
            None
        };
        if let Some(reason) = reason {
            skipped.push(Skipped {
                critical: vec![zeta],
                reason: reason.into(),
            });
            continue;
        }
        let m = MoebiusMap::from_three_points([rx, ry, rz], [x, y, zeta], tol)?;
        candidates.push(Candidate {
            critical: vec![zeta],
            value: normalized_multiplier(r, x, &m),
            moebius: m,
        });
    }
    Ok(TheoremReport::finish(
        TheoremKind::OneCritical,
        r.degree(),
        candidates,
        skipped,
    ))
}

pub fn thm2_report(r: &RationalMap, x: SpherePoint, tol: f64) -> Result<TheoremReport> {
    require_degree(r)?;
    let rx = r.eval(x);
    let crit = r.critical_points()?;
    if crit.iter().any(|c| c.critical_value.chordal(&rx) <= tol) {
        return Err(Error::Precondition(format!(
            "R(x) = {rx} is a critical value"
        )));
    }
    let locations = distinct_critical_locations(&crit, CRITICAL_MERGE_TOL);
    let values: Vec<SpherePoint> = locations.iter().map(|&z| r.eval(z)).collect();
    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..locations.len() {
        for j in i + 1..locations.len() {
            let pair = vec![locations[i], locations[j]];
            if values[i].chordal(&values[j]) <= tol {
                skipped.push(Skipped {
                    critical: pair,
                    reason: "critical values coincide".into(),
                });
                continue;
            }
            let m = MoebiusMap::from_three_points(
                [rx, values[i], values[j]],
                [x, locations[i], locations[j]],
                tol,
            )?;
            candidates.push(Candidate {
                critical: pair,
                value: normalized_multiplier(r, x, &m),
                moebius: m,
            });
        }
    }
    Ok(TheoremReport::finish(
        TheoremKind::TwoCritical,
        r.degree(),
        candidates,
        skipped,
    ))
}

struct ChordData {
    lhs: f64,
    x: C64,
    y: C64,
    zeta: C64,
    rx: C64,
    ry: C64,
    rz: C64,
}

fn chord_data(r: &RationalMap, x: C64, y: C64, zeta: C64) -> Result<ChordData> {
    let finite = |p: SpherePoint, what: &str| {
        p.as_finite()
            .ok_or_else(|| Error::Precondition(format!("{what} is infinite")))
    };
    let rx = finite(r.eval_finite(x), "R(x)")?;
    let ry = finite(r.eval_finite(y), "R(y)")?;
    let rz = finite(r.eval_finite(zeta), "R(zeta)")?;
    let dx = r.chart_derivative(SpherePoint::Finite(x));
    let zero = C64::new(0.0, 0.0);
    if ry - rx == zero || rx - rz == zero || y - zeta == zero || x - zeta == zero || ry - rz == zero
    {
        return Err(Error::Precondition("degenerate chord configuration".into()));
    }
    Ok(ChordData {
        lhs: (dx * (y - x) / (ry - rx)).norm(),
        x,
        y,
        zeta,
        rx,
        ry,
        rz,
    })
}

/// The one-critical-point candidate through chords only:
/// `|R'(x)(y-x)/(R(y)-R(x))|` divided by
/// `|(R(x)-R(ζ))/(R(y)-R(ζ)) · (y-ζ)/(x-ζ)|`. Needs every point and image finite.
pub fn thm1_chord_value(r: &RationalMap, x: C64, y: C64, zeta: C64) -> Result<f64> {
    let d = chord_data(r, x, y, zeta)?;
    let factor = ((d.rx - d.rz) / (d.ry - d.rz) * (d.y - d.zeta) / (d.x - d.zeta)).norm();
    Ok(d.lhs / factor)
}

/// The chord quotient `|R'(x)(y-x)/(R(y)-R(x))|`.
pub fn chord_lhs(r: &RationalMap, x: C64, y: C64) -> Result<f64> {
    let rx = r
        .eval_finite(x)
        .as_finite()
        .ok_or_else(|| Error::Precondition("R(x) is infinite".into()))?;
    let ry = r
        .eval_finite(y)
        .as_finite()
        .ok_or_else(|| Error::Precondition("R(y) is infinite".into()))?;
    if rx == ry {
        return Err(Error::Precondition("R(x) = R(y)".into()));
    }
    Ok((r.chart_derivative(SpherePoint::Finite(x)) * (y - x) / (ry - rx)).norm())
}

/// The two arrangements of the right-hand side, each with the factor 1/4:
/// the cross-ratio form and the difference-quotient form.
pub fn chord_rhs_forms(r: &RationalMap, x: C64, y: C64, zeta: C64) -> Result<(f64, f64)> {
    let d = chord_data(r, x, y, zeta)?;
    let middle = 0.25 * ((d.rx - d.rz) / (d.ry - d.rz) * ((d.y - d.zeta) / (d.x - d.zeta))).norm();
    let rightmost =
        0.25 * ((d.rx - d.rz) / (d.x - d.zeta) * ((d.y - d.zeta) / (d.ry - d.rz))).norm();
    Ok((middle, rightmost))
}
