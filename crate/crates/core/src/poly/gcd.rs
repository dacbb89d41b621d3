use super::Polynomial;

/// Relative threshold below which a Euclidean remainder counts as zero.
pub const DEFAULT_GCD_TOL: f64 = 1e-10;

/// Monic approximate GCD by the Euclidean algorithm.
///
/// A remainder is treated as zero when its coefficients are below
/// `tol * (|a| + |quot| |b|)`, the scale of the rounding error of the
/// division step that produced it. A candidate of positive degree is
/// accepted only if it divides both inputs to within `sqrt(tol)`;
/// otherwise the inputs are reported coprime.
pub fn gcd(p: &Polynomial, q: &Polynomial, tol: f64) -> Polynomial {
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let mut a = normalized(p);
    let mut b = normalized(q);
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    let candidate = loop {
        if b.degree() == Some(0) {
            return Polynomial::one();
        }
        let (quot, rem) = a.divrem(&b).expect("b is nonzero");
        let cut = tol * (a.norm_inf() + quot.norm_inf() * b.norm_inf());
        let mut rc = rem.into_coeffs();
        while rc.last().is_some_and(|c| c.norm() <= cut) {
            rc.pop();
        }
        let rem = Polynomial::new(rc);
        if rem.is_zero() {
            break b.monic();
        }
        a = b;
        b = normalized(&rem);
    };
    if candidate.degree() == Some(0)
        || divides(&candidate, p, tol.sqrt()) && divides(&candidate, q, tol.sqrt())
    {
        candidate
    } else {
        Polynomial::one()
    }
}

fn normalized(p: &Polynomial) -> Polynomial {
    let s = p.norm_inf();
    p.scale((1.0 / s).into())
}

fn divides(g: &Polynomial, p: &Polynomial, tol: f64) -> bool {
    let (quot, rem) = p.divrem(g).expect("candidate is nonzero");
    rem.norm_inf() <= tol * (p.norm_inf() + quot.norm_inf() * g.norm_inf())
}
