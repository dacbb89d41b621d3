//! Randomized verification suites. Trials are independent (seeded by
//! [`trial_seed`]) and run in parallel; rows come back in trial order so the
//! output is identical for any thread count.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::index::{forbidden_check, index_sum_check};
use crate::poly::C64;
use crate::ratmap::{RationalMap, Side};
use crate::sample::{box_c64, box_point, random_map, random_polynomial, trial_seed, TrialRng};
use crate::smale::{smale_report, thm1_report, thm2_report, TheoremReport};
use crate::sphere::{MoebiusMap, SpherePoint, DEFAULT_POINT_TOL};

/// Probe points are redrawn this many times before a trial is skipped.
const MAX_PROBE_DRAWS: usize = 100;

pub const INDEX_SUM_TOL: f64 = 1e-6;
pub const INDEX_FORMULA_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub degree: usize,
    /// The suite's per-trial statistic (best value, deviation, ...).
    pub value: Option<f64>,
    pub ok: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
    pub witness: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<TrialRow>,
    pub violations: Vec<Violation>,
    pub skipped: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Suite-specific side statistics that are recorded, never asserted.
    pub observations: serde_json::Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("trial,seed,degree,value,ok\n");
        for r in &self.rows {
            let v = r.value.map_or(String::new(), |v| format!("{v:.17e}"));
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.trial, r.seed, r.degree, v, r.ok
            ));
        }
        out
    }

    fn assemble(suite: &str, seed: u64, outcomes: Vec<(TrialRow, Option<Violation>)>) -> Self {
        let trials = outcomes.len();
        let mut rows = Vec::with_capacity(trials);
        let mut violations = Vec::new();
        for (row, v) in outcomes {
            rows.push(row);
            violations.extend(v);
        }
        let values = || rows.iter().filter_map(|r| r.value);
        SuiteReport {
            suite: suite.into(),
            trials,
            seed,
            skipped: rows.iter().filter(|r| r.value.is_none() && r.ok).count(),
            min: values().reduce(f64::min),
            max: values().reduce(f64::max),
            violations,
            rows,
            observations: serde_json::Value::Null,
        }
    }
}

fn degree_for(degrees: &[usize], trial: usize) -> usize {
    degrees[trial % degrees.len()]
}

fn map_witness(r: &RationalMap, points: &[(&str, SpherePoint)]) -> serde_json::Value {
    let mut obj = serde_json::json!({ "map": r });
    for (k, p) in points {
        obj[*k] = serde_json::to_value(p).unwrap();
    }
    obj
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremSuite {
    One,
    Two,
}

/// One trial of the thm1/thm2 suites: a random map and random valid probes.
fn theorem_trial(
    kind: TheoremSuite,
    degree: usize,
    rng: &mut TrialRng,
) -> (RationalMap, SpherePoint, SpherePoint, Option<TheoremReport>) {
    let r = random_map(rng, degree);
    for _ in 0..MAX_PROBE_DRAWS {
        let (x, y) = (box_point(rng), box_point(rng));
        let rep = match kind {
            TheoremSuite::One => thm1_report(&r, x, y, DEFAULT_POINT_TOL),
            TheoremSuite::Two => thm2_report(&r, x, DEFAULT_POINT_TOL),
        };
        if let Ok(rep) = rep {
            if rep.best.is_some() {
                return (r, x, y, Some(rep));
            }
        }
    }
    (r, SpherePoint::Infinity, SpherePoint::Infinity, None)
}

/// Random maps of each degree with random probes; a violation is a best
/// value at or below 1/4 (one critical point) or below 1/2 (two).
pub fn theorem_suite(
    kind: TheoremSuite,
    degrees: &[usize],
    trials: usize,
    seed: u64,
) -> SuiteReport {
    let name = match kind {
        TheoremSuite::One => "thm1",
        TheoremSuite::Two => "thm2",
    };
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i as u64);
            let mut rng = TrialRng::seed_from_u64(s);
            let degree = degree_for(degrees, i);
            let (r, x, y, rep) = theorem_trial(kind, degree, &mut rng);
            let mut row = TrialRow {
                trial: i,
                seed: s,
                degree,
                value: None,
                ok: true,
                note: String::new(),
            };
            let Some(rep) = rep else {
                row.note = "no valid probe points".into();
                return (row, None);
            };
            row.value = rep.best;
            row.ok = rep.holds() == Some(true);
            let violation = (!row.ok).then(|| Violation {
                trial: i,
                seed: s,
                detail: format!("best {} against bound {}", rep.best.unwrap(), rep.bound),
                witness: map_witness(&r, &[("x", x), ("y", y)]),
            });
            (row, violation)
        })
        .collect();
    let mut rep = SuiteReport::assemble(name, seed, outcomes);
    let mut per_degree = serde_json::Map::new();
    for &d in degrees {
        let vals: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.degree == d)
            .filter_map(|r| r.value)
            .collect();
        let min = vals.iter().copied().reduce(f64::min);
        let target = d as f64 / (d as f64 - 1.0);
        per_degree.insert(
            d.to_string(),
            serde_json::json!({
                "min": min,
                "conjectured": target,
                "below_conjectured": vals.iter().filter(|&&v| v < target - 1e-6).count(),
            }),
        );
    }
    rep.observations = serde_json::Value::Object(per_degree);
    rep
}

/// Random polynomials with coefficients on `[-1,1]^2` at random
/// non-critical points: `S <= 4` is asserted, `S <= 4^(1 - 1/(n-1))` only
/// counted.
pub fn smale_suite(degrees: &[usize], trials: usize, seed: u64) -> SuiteReport {
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i as u64);
            let mut rng = TrialRng::seed_from_u64(s);
            let degree = degree_for(degrees, i);
            let p = random_polynomial(&mut rng, degree);
            let mut row = TrialRow {
                trial: i,
                seed: s,
                degree,
                value: None,
                ok: true,
                note: String::new(),
            };
            let found = (0..MAX_PROBE_DRAWS).find_map(|_| {
                let x = box_c64(&mut rng);
                smale_report(&p, x, DEFAULT_POINT_TOL).ok().map(|r| (x, r))
            });
            let Some((x, rep)) = found else {
                row.note = "no non-critical probe".into();
                return (row, None);
            };
            row.value = Some(rep.value);
            row.ok = rep.value <= rep.bound;
            let violation = (!row.ok).then(|| Violation {
                trial: i,
                seed: s,
                detail: format!("S = {} > 4", rep.value),
                witness: serde_json::json!({ "polynomial": p, "x": [x.re, x.im] }),
            });
            (row, violation)
        })
        .collect();
    let mut rep = SuiteReport::assemble("smale", seed, outcomes);
    let above_known = rep
        .rows
        .iter()
        .filter(|r| {
            r.value
                .is_some_and(|v| v > 4f64.powf(1.0 - 1.0 / (r.degree as f64 - 1.0)))
        })
        .count();
    let above_conjectured = rep
        .rows
        .iter()
        .filter(|r| {
            r.value
                .is_some_and(|v| v > 1.0 - 1.0 / r.degree as f64 + 1e-12)
        })
        .count();
    rep.observations = serde_json::json!({
        "above_known_bound": above_known,
        "above_conjectured": above_conjectured,
    });
    rep
}

/// A random map; on every third trial a fixed point is moved to ∞, and on
/// every third trial (offset by one) to `|z| >= 1e3`.
fn index_corpus_map(rng: &mut TrialRng, degree: usize, trial: usize) -> Result<RationalMap> {
    let r = random_map(rng, degree);
    let eta = match trial % 3 {
        0 => return Ok(r),
        1 => C64::new(0.0, 0.0),
        _ => 1e-3 * box_c64(rng) / box_c64(rng).norm().max(0.5),
    };
    let fixed = r.fixed_points()?;
    let Some(z) = fixed
        .iter()
        .filter_map(|f| f.location.as_finite())
        .filter(|z| z.norm() > 1e-3)
        .min_by(|a, b| (a.norm().ln().abs()).total_cmp(&b.norm().ln().abs()))
    else {
        return Ok(r);
    };
    // w -> w / (1 - κ w) sends z to z/eta and moves the other fixed points
    // by a bounded amount unless they are close to z
    let kappa = (C64::new(1.0, 0.0) - eta) / z;
    let m = MoebiusMap::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        -kappa,
        C64::new(1.0, 0.0),
    )?;
    let conj = r
        .compose_moebius(&m.inverse(), Side::Pre)
        .compose_moebius(&m, Side::Post);
    Ok(conj)
}

/// Index sum within 1e-6 per map and quadrature vs `1/(1-λ)` within 1e-8
/// (relative to `max(1, |1/(1-λ)|)`) at simple fixed points.
pub fn index_suite(degrees: &[usize], trials: usize, seed: u64) -> SuiteReport {
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i as u64);
            let mut rng = TrialRng::seed_from_u64(s);
            let degree = degree_for(degrees, i);
            let mut row = TrialRow {
                trial: i,
                seed: s,
                degree,
                value: None,
                ok: true,
                note: String::new(),
            };
            let map = match index_corpus_map(&mut rng, degree, i) {
                Ok(m) => m,
                Err(e) => {
                    row.ok = false;
                    row.note = e.to_string();
                    return (
                        row,
                        Some(Violation {
                            trial: i,
                            seed: s,
                            detail: e.to_string(),
                            witness: serde_json::Value::Null,
                        }),
                    );
                }
            };
            let problem = match index_sum_check(&map) {
                Err(e) => Some(e.to_string()),
                Ok(rep) => {
                    row.value = Some(rep.deviation);
                    let worst = rep
                        .fixed
                        .iter()
                        .filter_map(|f| {
                            f.formula
                                .map(|w| (f.record.index.unwrap() - w).norm() / w.norm().max(1.0))
                        })
                        .fold(0.0, f64::max);
                    if rep.deviation > INDEX_SUM_TOL {
                        Some(format!("index sum deviation {}", rep.deviation))
                    } else if worst > INDEX_FORMULA_TOL {
                        Some(format!("quadrature vs formula {worst}"))
                    } else {
                        None
                    }
                }
            };
            row.ok = problem.is_none();
            let violation = problem.map(|detail| Violation {
                trial: i,
                seed: s,
                detail,
                witness: map_witness(&map, &[]),
            });
            (row, violation)
        })
        .collect();
    SuiteReport::assemble("index-sum", seed, outcomes)
}

/// [`forbidden_check`] on each fixture; `value` is the smallest clearance of
/// a non-critical multiplier from the disc boundary.
pub fn forbidden_suite(
    fixtures: &[Fixture],
    max_iterate: usize,
) -> (SuiteReport, Vec<serde_json::Value>) {
    let results: Vec<_> = fixtures
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut row = TrialRow {
                trial: i,
                seed: 0,
                degree: f.map.degree(),
                value: None,
                ok: true,
                note: f.name.clone(),
            };
            match forbidden_check(&f.map, max_iterate) {
                Ok(rep) => {
                    row.value = rep
                        .fixed
                        .iter()
                        .filter(|e| !e.is_critical)
                        .map(|e| rep.disc.clearance(e.multiplier))
                        .reduce(f64::min);
                    row.ok = rep.passed();
                    let v = (!row.ok).then(|| Violation {
                        trial: i,
                        seed: 0,
                        detail: rep.violations.join("; "),
                        witness: serde_json::json!({ "fixture": f.name, "map": f.map }),
                    });
                    let detail = serde_json::json!({ "fixture": f.name, "report": rep });
                    ((row, v), detail)
                }
                Err(e) => {
                    row.ok = false;
                    let v = Violation {
                        trial: i,
                        seed: 0,
                        detail: e.to_string(),
                        witness: serde_json::json!({ "fixture": f.name }),
                    };
                    (
                        (row, Some(v)),
                        serde_json::json!({ "fixture": f.name, "error": e.to_string() }),
                    )
                }
            }
        })
        .collect();
    let (outcomes, details): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    (SuiteReport::assemble("forbidden", 0, outcomes), details)
}

pub fn parse_suite_error(name: &str) -> Error {
    Error::Config(format!(
        "unknown suite {name:?}; expected thm1, thm2, index-sum, forbidden or smale"
    ))
}
