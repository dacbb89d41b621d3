//! Derivative-free extremal search.
//!
//! Gauges (justified by affine/Moebius invariance of the objectives):
//! * `smale_max`: `p = z + a_2 z^2 + ... + a_{n-1} z^{n-1} + z^n`, `x = 0`.
//! * `thm1_best_min`, `thm2_best_min`: `R = (c_1 z + ... + c_{n-1} z^{n-1} + z^n)
//!   / (1 + d_1 z + ... + d_{n-1} z^{n-1})`, `x = 0`, `y = ∞`, so that
//!   `R(x) = x` and `R(y) = y`.
//!
//! Nelder–Mead runs over the real and imaginary parts of the free
//! coefficients; restarts are independent and merged in restart order.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, C64};
use crate::ratmap::RationalMap;
use crate::sample::{trial_seed, TrialRng};
use crate::smale::{smale_quantity, thm1_report, thm2_report};
use crate::sphere::{SpherePoint, DEFAULT_POINT_TOL};

/// Added to a minimised objective when its preconditions fail.
pub const PENALTY: f64 = 1e6;

/// Archived and recomputed objectives must agree to this (relative).
pub const ARCHIVE_MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Thm1BestMin,
    Thm2BestMin,
    SmaleMax,
}

impl Objective {
    pub fn maximises(self) -> bool {
        self == Objective::SmaleMax
    }

    pub fn conjectured(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Objective::SmaleMax => 1.0 - 1.0 / n,
            _ => n / (n - 1.0),
        }
    }

    /// The proven bound the objective can never cross.
    pub fn theorem_bound(self) -> f64 {
        match self {
            Objective::Thm1BestMin => 0.25,
            Objective::Thm2BestMin => 0.5,
            Objective::SmaleMax => 4.0,
        }
    }

    fn dimension(self, n: usize) -> usize {
        match self {
            Objective::SmaleMax => 2 * (n - 2),
            _ => 4 * (n - 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub degree: usize,
    pub objective: Objective,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_simplex_tol")]
    pub simplex_tol: f64,
}

fn default_restarts() -> usize {
    20
}
fn default_max_evals() -> usize {
    4000
}
fn default_simplex_tol() -> f64 {
    1e-12
}

impl SearchConfig {
    pub fn new(degree: usize, objective: Objective) -> Self {
        SearchConfig {
            degree,
            objective,
            restarts: default_restarts(),
            max_evals: default_max_evals(),
            seed: 0,
            simplex_tol: default_simplex_tol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 {
            return Err(Error::Config(format!(
                "degree must be >= 2, got {}",
                self.degree
            )));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be >= 1".into()));
        }
        if self.max_evals < 1 {
            return Err(Error::Config("max_evals must be >= 1".into()));
        }
        if !(self.simplex_tol >= 0.0) {
            return Err(Error::Config(
                "simplex_tol must be a nonnegative number".into(),
            ));
        }
        Ok(())
    }
}

/// A concrete configuration at which the objective was evaluated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub objective: Objective,
    pub degree: usize,
    /// Set for `smale_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<Polynomial>,
    /// Set for the rational objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<RationalMap>,
    pub x: SpherePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<SpherePoint>,
}

fn complex_pairs(params: &[f64]) -> impl Iterator<Item = C64> + '_ {
    params.chunks(2).map(|c| C64::new(c[0], c[1]))
}

impl Witness {
    pub fn from_params(objective: Objective, degree: usize, params: &[f64]) -> Result<Witness> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let n = degree;
        match objective {
            Objective::SmaleMax => {
                let mut c = vec![zero, one];
                c.extend(complex_pairs(params));
                c.push(one);
                Ok(Witness {
                    objective,
                    degree,
                    polynomial: Some(Polynomial::new(c)),
                    map: None,
                    x: SpherePoint::Finite(zero),
                    y: None,
                })
            }
            _ => {
                let (cs, ds) = params.split_at(2 * (n - 1));
                let mut num = vec![zero];
                num.extend(complex_pairs(cs));
                num.push(one);
                let mut den = vec![one];
                den.extend(complex_pairs(ds));
                let map = RationalMap::new(Polynomial::new(num), Polynomial::new(den))?;
                if map.degree() != n {
                    return Err(Error::MapDegree {
                        needed: n,
                        got: map.degree(),
                    });
                }
                Ok(Witness {
                    objective,
                    degree,
                    polynomial: None,
                    map: Some(map),
                    x: SpherePoint::Finite(zero),
                    y: (objective == Objective::Thm1BestMin).then_some(SpherePoint::Infinity),
                })
            }
        }
    }

    /// Objective value from scratch: `S` for `smale_max`, otherwise the best
    /// candidate value of the theorem report.
    pub fn evaluate(&self) -> Result<f64> {
        let missing = |what: &str| Error::Parse(format!("witness lacks {what}"));
        let x = self.x;
        match self.objective {
            Objective::SmaleMax => {
                let p = self
                    .polynomial
                    .as_ref()
                    .ok_or_else(|| missing("polynomial"))?;
                let x = x.as_finite().ok_or_else(|| missing("finite x"))?;
                smale_quantity(p, x, DEFAULT_POINT_TOL)
            }
            Objective::Thm1BestMin => {
                let r = self.map.as_ref().ok_or_else(|| missing("map"))?;
                let y = self.y.ok_or_else(|| missing("y"))?;
                thm1_report(r, x, y, DEFAULT_POINT_TOL)?
                    .best
                    .ok_or_else(|| Error::Precondition("every candidate is degenerate".into()))
            }
            Objective::Thm2BestMin => {
                let r = self.map.as_ref().ok_or_else(|| missing("map"))?;
                thm2_report(r, x, DEFAULT_POINT_TOL)?
                    .best
                    .ok_or_else(|| Error::Precondition("every candidate is degenerate".into()))
            }
        }
    }
}

/// Penalised value to minimise, and the raw objective when it exists.
fn penalised(objective: Objective, degree: usize, params: &[f64]) -> (f64, Option<f64>) {
    match Witness::from_params(objective, degree, params).and_then(|w| w.evaluate()) {
        Ok(v) if v.is_finite() => (if objective.maximises() { -v } else { v }, Some(v)),
        _ => (PENALTY, None),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub best_value: Option<f64>,
    pub best_params: Vec<f64>,
    /// `(evaluation, best objective so far)` at each improvement.
    pub history: Vec<(usize, f64)>,
    /// Raw objective values that crossed the theorem bound.
    pub bound_violations: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub best_value: f64,
    pub best_params: Vec<f64>,
    pub witness: Witness,
    pub conjectured: f64,
    /// Distance past the conjectured value in the unfavourable direction is
    /// negative: `best - conjectured` when minimising, `conjectured - best`
    /// when maximising.
    pub gap: f64,
    pub theorem_bound: f64,
    pub trace: Vec<RestartSummary>,
}

impl SearchResult {
    /// `restart,evaluation,best` rows.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("restart,evaluation,best\n");
        for r in &self.trace {
            for (e, v) in &r.history {
                out.push_str(&format!("{},{},{:.17e}\n", r.restart, e, v));
            }
        }
        out
    }

    pub fn bound_violations(&self) -> usize {
        self.trace.iter().map(|r| r.bound_violations.len()).sum()
    }
}

struct Tracker {
    objective: Objective,
    degree: usize,
    evaluations: usize,
    best: Option<(f64, f64, Vec<f64>)>,
    history: Vec<(usize, f64)>,
    bound_violations: Vec<f64>,
}

impl Tracker {
    fn eval(&mut self, params: &[f64]) -> f64 {
        self.evaluations += 1;
        let (f, raw) = penalised(self.objective, self.degree, params);
        if let Some(v) = raw {
            let bound = self.objective.theorem_bound();
            let crosses = match self.objective {
                Objective::Thm1BestMin => v <= bound,
                Objective::Thm2BestMin => v < bound,
                Objective::SmaleMax => v > bound,
            };
            if crosses {
                self.bound_violations.push(v);
            }
            if self.best.as_ref().is_none_or(|b| f < b.0) {
                self.best = Some((f, v, params.to_vec()));
                self.history.push((self.evaluations, v));
            }
        }
        f
    }
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) until the budget is spent or the simplex collapses.
fn nelder_mead(t: &mut Tracker, start: Vec<f64>, step: f64, max_evals: usize, tol: f64) {
    let d = start.len();
    if d == 0 {
        t.eval(&start);
        return;
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let f0 = t.eval(&start);
    simplex.push((start.clone(), f0));
    for i in 0..d {
        let mut v = start.clone();
        v[i] += step;
        let f = t.eval(&v);
        simplex.push((v, f));
    }
    let lerp = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
    };
    while t.evaluations < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= tol && diameter <= tol {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = t.eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = t.eval(&expanded);
            simplex[d] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (towards, ft) = if fr < worst.1 {
                (&reflected, fr)
            } else {
                (&worst.0, worst.1)
            };
            let contracted = lerp(&centroid, towards, 0.5);
            let fc = t.eval(&contracted);
            if fc < ft {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v = lerp(&best, &entry.0, 0.5);
                    let f = t.eval(&v);
                    *entry = (v, f);
                }
            }
        }
    }
}

fn run_restart(cfg: &SearchConfig, restart: usize) -> RestartSummary {
    let seed = trial_seed(cfg.seed, restart as u64);
    let mut rng = TrialRng::seed_from_u64(seed);
    let dim = cfg.objective.dimension(cfg.degree);
    let start: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut t = Tracker {
        objective: cfg.objective,
        degree: cfg.degree,
        evaluations: 0,
        best: None,
        history: Vec::new(),
        bound_violations: Vec::new(),
    };
    nelder_mead(&mut t, start, 0.25, cfg.max_evals, cfg.simplex_tol);
    let (best_value, best_params) = match t.best {
        Some((_, v, p)) => (Some(v), p),
        None => (None, Vec::new()),
    };
    RestartSummary {
        restart,
        seed,
        evaluations: t.evaluations,
        best_value,
        best_params,
        history: t.history,
        bound_violations: t.bound_violations,
    }
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let trace: Vec<RestartSummary> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, i))
        .collect();
    let better = |a: f64, b: f64| {
        if cfg.objective.maximises() {
            a > b
        } else {
            a < b
        }
    };
    let winner = trace
        .iter()
        .filter(|r| r.best_value.is_some())
        .fold(None::<&RestartSummary>, |acc, r| match acc {
            Some(a) if !better(r.best_value.unwrap(), a.best_value.unwrap()) => Some(a),
            _ => Some(r),
        })
        .ok_or_else(|| Error::Precondition("no restart produced a valid evaluation".into()))?;
    let best_value = winner.best_value.unwrap();
    let best_params = winner.best_params.clone();
    let witness = Witness::from_params(cfg.objective, cfg.degree, &best_params)?;
    let conjectured = cfg.objective.conjectured(cfg.degree);
    Ok(SearchResult {
        config: cfg.clone(),
        best_value,
        best_params,
        witness,
        conjectured,
        gap: if cfg.objective.maximises() {
            conjectured - best_value
        } else {
            best_value - conjectured
        },
        theorem_bound: cfg.objective.theorem_bound(),
        trace,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessArchive {
    pub config: SearchConfig,
    pub seed: u64,
    pub witness: Witness,
    pub value: f64,
    pub recomputed: f64,
}

fn values_match(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}

/// Writes the best witness after re-evaluating it from its serialized form.
pub fn witness_archive(result: &SearchResult, path: &Path) -> Result<WitnessArchive> {
    let reparsed: Witness = serde_json::from_str(&serde_json::to_string(&result.witness)?)?;
    let recomputed = reparsed.evaluate()?;
    if !values_match(result.best_value, recomputed, ARCHIVE_MATCH_TOL) {
        return Err(Error::WitnessMismatch {
            archived: result.best_value,
            recomputed,
        });
    }
    let archive = WitnessArchive {
        config: result.config.clone(),
        seed: result.config.seed,
        witness: reparsed,
        value: result.best_value,
        recomputed,
    };
    std::fs::write(path, serde_json::to_string_pretty(&archive)?)?;
    Ok(archive)
}

pub fn load_witness(path: &Path) -> Result<WitnessArchive> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Re-evaluates a loaded archive and checks it against the stored value.
pub fn reevaluate(archive: &WitnessArchive) -> Result<f64> {
    let v = archive.witness.evaluate()?;
    if !values_match(archive.value, v, ARCHIVE_MATCH_TOL) {
        return Err(Error::WitnessMismatch {
            archived: archive.value,
            recomputed: v,
        });
    }
    Ok(v)
}
