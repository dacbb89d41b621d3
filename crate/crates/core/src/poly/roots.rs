//! Simultaneous root finding: Aberth–Ehrlich iteration from a circle of
//! starting points, then per-root Newton polishing. Approximations closer
//! than the cluster radius are merged into one multiple root and polished on
//! the matching derivative. Multiple roots of higher order scatter further
//! (like `eps^(1/k)`), so groups within a looser radius are also merged when
//! the lower derivatives vanish at the polished point.

use std::f64::consts::TAU;

use super::{Polynomial, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Relative distance below which two approximations are one multiple root.
    pub cluster_radius: f64,
    pub polish_steps: usize,
    /// Relative radius for merging groups that pass the derivative test.
    pub multiplicity_radius: f64,
    /// Acceptance bound on `|p(z)| / |p|_1` scaled by `max(1, |z|)^deg`.
    pub residual_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: 500,
            cluster_radius: 1e-6,
            polish_steps: 60,
            multiplicity_radius: 1e-2,
            residual_tol: 1e-12,
        }
    }
}

/// All `deg p` roots of `p`, repeated according to multiplicity.
pub fn roots(p: &Polynomial) -> Result<Vec<C64>> {
    roots_with(p, &RootOptions::default())
}

pub fn roots_with(p: &Polynomial, opts: &RootOptions) -> Result<Vec<C64>> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        got => return Err(Error::DegreeTooLow { needed: 1, got }),
    };
    let zero = C64::new(0.0, 0.0);
    let lowest = p.coeffs().iter().position(|c| *c != zero).unwrap_or(0);
    let mut out = vec![zero; lowest];
    let q = Polynomial::new(p.coeffs()[lowest..].to_vec());
    match q.degree() {
        Some(0) => {}
        Some(1) => out.push(-q.coeff(0) / q.coeff(1)),
        _ => out.extend(cluster_and_polish(
            &q,
            aberth(&q, opts.max_iterations),
            opts,
        )),
    }

    let norm = p.norm_one();
    let residuals: Vec<f64> = out
        .iter()
        .map(|&z| p.eval(z).norm() / (norm * z.norm().max(1.0).powi(deg as i32)))
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst <= opts.residual_tol) {
        return Err(Error::RootNonConvergence {
            worst_residual: worst,
            residuals,
        });
    }
    Ok(out)
}

/// Upper bound on root moduli: the positive root of
/// `|a_n| x^n = sum_{k<n} |a_k| x^k`, found by Newton from the Fujiwara bound.
fn cauchy_bound(p: &Polynomial) -> f64 {
    let n = p.degree().unwrap();
    let lead = p.leading().norm();
    let a: Vec<f64> = p.coeffs().iter().map(|c| c.norm() / lead).collect();
    let mut x = (0..n)
        .map(|k| {
            let scale = if k == 0 { 0.5 } else { 1.0 };
            (scale * a[k]).powf(1.0 / (n - k) as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    if x == 0.0 {
        return 1.0;
    }
    for _ in 0..50 {
        let f = x.powi(n as i32) - (0..n).map(|k| a[k] * x.powi(k as i32)).sum::<f64>();
        let df = n as f64 * x.powi(n as i32 - 1)
            - (1..n)
                .map(|k| k as f64 * a[k] * x.powi(k as i32 - 1))
                .sum::<f64>();
        let next = x - f / df;
        if !(next > 0.0) || (x - next).abs() <= 1e-12 * x {
            break;
        }
        x = next;
    }
    x
}

fn eval_with_derivative(p: &Polynomial, z: C64) -> (C64, C64, f64) {
    let zero = C64::new(0.0, 0.0);
    let mut v = zero;
    let mut d = zero;
    let mut bound = 0.0;
    let az = z.norm();
    for &c in p.coeffs().iter().rev() {
        d = d * z + v;
        v = v * z + c;
        bound = bound * az + c.norm();
    }
    (v, d, bound)
}

fn aberth(p: &Polynomial, max_iterations: usize) -> Vec<C64> {
    let n = p.degree().unwrap();
    let radius = cauchy_bound(p);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / n as f64 + 0.7))
        .collect();
    for _ in 0..max_iterations {
        let mut settled = true;
        for i in 0..n {
            let (v, d, bound) = eval_with_derivative(p, z[i]);
            if v.norm() <= 4.0 * f64::EPSILON * bound {
                continue;
            }
            settled = false;
            let ratio = v / d;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
            } else {
                // stalled on a critical point of p or a collision
                let kick = C64::from_polar(1e-8 * z[i].norm().max(1.0), 1.0 + i as f64);
                z[i] += kick;
            }
        }
        if settled {
            break;
        }
    }
    z
}

fn newton_polish(p: &Polynomial, start: C64, steps: usize) -> C64 {
    let mut z = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..steps {
        let (v, d, _) = eval_with_derivative(p, z);
        if v == C64::new(0.0, 0.0) {
            break;
        }
        let step = v / d;
        let size = step.norm();
        if !step.is_finite() || size >= last_step {
            break;
        }
        z -= step;
        last_step = size;
        if size <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    z
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[i] = r;
        r
    }

    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        self.0[a] = b;
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        groups
    }
}

fn components(points: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let scale = points[i].norm().max(points[j].norm()).max(1.0);
            if (points[i] - points[j]).norm() <= radius * scale {
                uf.union(i, j);
            }
        }
    }
    uf.groups()
}

/// Multiple root of order `k` near `center`: polish on `p^(k-1)` and keep
/// the result if it stays within `limit`.
fn polish_multiple(p: &Polynomial, center: C64, k: usize, limit: f64, steps: usize) -> (C64, bool) {
    let polished = newton_polish(&p.nth_derivative(k - 1), center, steps);
    if (polished - center).norm() <= limit || k == 1 {
        (polished, true)
    } else {
        (center, false)
    }
}

/// Whether `p, p', ..., p^(k-2)` all vanish at `w` up to rounding, and `w`
/// passes the usual residual test.
fn lower_derivatives_vanish(p: &Polynomial, w: C64, k: usize, residual_tol: f64) -> bool {
    let deg = p.degree().unwrap_or(0) as i32;
    if p.eval(w).norm() > residual_tol * p.norm_one() * w.norm().max(1.0).powi(deg) {
        return false;
    }
    let mut d = p.clone();
    for _ in 0..k.saturating_sub(1) {
        let (v, _, bound) = eval_with_derivative(&d, w);
        if v.norm() > 1e-12 * bound {
            return false;
        }
        d = d.derivative();
    }
    true
}

fn emit_tight(
    p: &Polynomial,
    group: &[usize],
    center: C64,
    opts: &RootOptions,
    out: &mut Vec<C64>,
) {
    let k = group.len();
    let limit = opts.cluster_radius * center.norm().max(1.0);
    let (w, _) = polish_multiple(p, center, k, limit, opts.polish_steps);
    out.extend(std::iter::repeat_n(w, k));
}

fn cluster_and_polish(p: &Polynomial, approx: Vec<C64>, opts: &RootOptions) -> Vec<C64> {
    let tight = components(&approx, opts.cluster_radius);
    let centers: Vec<C64> = tight
        .iter()
        .map(|g| g.iter().map(|&i| approx[i]).sum::<C64>() / g.len() as f64)
        .collect();

    let mut out = Vec::with_capacity(approx.len());
    for mut loose in components(&centers, opts.multiplicity_radius) {
        // peel off the outlying group until the rest passes as one root
        while loose.len() > 1 {
            let k: usize = loose.iter().map(|&g| tight[g].len()).sum();
            let center = loose
                .iter()
                .map(|&g| centers[g] * tight[g].len() as f64)
                .sum::<C64>()
                / k as f64;
            let limit = opts.multiplicity_radius * center.norm().max(1.0);
            let (w, inside) = polish_multiple(p, center, k, limit, opts.polish_steps);
            if inside && lower_derivatives_vanish(p, w, k, opts.residual_tol) {
                out.extend(std::iter::repeat_n(w, k));
                loose.clear();
                break;
            }
            let far = (0..loose.len())
                .max_by(|&a, &b| {
                    (centers[loose[a]] - center)
                        .norm()
                        .total_cmp(&(centers[loose[b]] - center).norm())
                })
                .unwrap();
            let g = loose.swap_remove(far);
            emit_tight(p, &tight[g], centers[g], opts, &mut out);
        }
        for g in loose {
            emit_tight(p, &tight[g], centers[g], opts, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains(rs: &[C64], z: C64, tol: f64) -> bool {
        rs.iter().any(|r| (r - z).norm() <= tol)
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 3);
        for k in 0..3 {
            assert!(contains(
                &rs,
                C64::from_polar(1.0, TAU * k as f64 / 3.0),
                1e-14
            ));
        }
    }

    #[test]
    fn quadratic_formula_oracle() {
        let p = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        let rs = roots(&p).unwrap();
        let s = 3f64.sqrt() / 2.0;
        assert!(contains(&rs, C64::new(-0.5, s), 1e-14));
        assert!(contains(&rs, C64::new(-0.5, -s), 1e-14));
    }

    #[test]
    fn quartic_roots_are_roots_of_its_factors() {
        let h = Polynomial::from_real(&[4.0, 5.0, 6.0, 2.0, 1.0]);
        let rs = roots(&h).unwrap();
        let s1 = 3f64.sqrt() / 2.0;
        let s4 = 15f64.sqrt() / 2.0;
        for z in [
            C64::new(-0.5, s1),
            C64::new(-0.5, -s1),
            C64::new(-0.5, s4),
            C64::new(-0.5, -s4),
        ] {
            assert!(contains(&rs, z, 1e-13), "{z} missing from {rs:?}");
        }
    }

    #[test]
    fn multiple_roots_are_repeated() {
        // (z - 1)^2 (z + 2)
        let p = Polynomial::from_roots(
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-2.0, 0.0)],
            C64::new(1.0, 0.0),
        );
        let rs = roots(&p).unwrap();
        let ones = rs.iter().filter(|r| (*r - 1.0).norm() < 1e-12).count();
        assert_eq!(ones, 2, "{rs:?}");
        // triple root off the real axis, next to a simple one
        let c = C64::new(0.8273606629231915, -0.6142775408708605);
        let p = Polynomial::from_roots(&[c, c, c, C64::new(0.1, 0.2)], C64::new(0.3, 0.9));
        let rs = roots(&p).unwrap();
        assert_eq!(
            rs.iter().filter(|r| (*r - c).norm() < 1e-12).count(),
            3,
            "{rs:?}"
        );
        // close but distinct roots stay distinct
        let p = Polynomial::from_roots(&[c, c + 1e-4, C64::new(0.1, 0.2)], C64::new(1.0, 0.0));
        let rs = roots(&p).unwrap();
        assert!(contains(&rs, c, 1e-9) && contains(&rs, c + 1e-4, 1e-9));
        // z^5 has a single root of multiplicity five
        let z5 = Polynomial::monomial(C64::new(1.0, 0.0), 5);
        assert_eq!(roots(&z5).unwrap(), vec![C64::new(0.0, 0.0); 5]);
    }

    #[test]
    fn constant_is_rejected() {
        assert!(matches!(
            roots(&Polynomial::from_real(&[3.0])),
            Err(Error::DegreeTooLow { .. })
        ));
    }
}
