//! Dense complex polynomials in ascending coefficient order.
//!
//! `coeffs[k]` multiplies `z^k`. Trailing coefficients that are exactly zero
//! are dropped on construction, so the zero polynomial is the empty vector.
//! Approximate trimming is always explicit (see [`Polynomial::trim_relative`]).

mod gcd;
mod roots;

pub use gcd::{gcd, DEFAULT_GCD_TOL};
pub use roots::{roots, roots_with, RootOptions};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    /// `c * z^k`.
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// Linear factor `z - r`.
    pub fn linear(r: C64) -> Self {
        Self::new(vec![-r, C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        self.coeffs
            .iter()
            .rev()
            .fold((zero, zero), |(v, d), &c| (v * z + c, d * z + v))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Largest coefficient modulus.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli.
    pub fn norm_one(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.leading().inv())
    }

    /// Drops leading coefficients whose modulus is at most `rel * norm_inf`.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let cut = rel * self.norm_inf();
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(|c| c.norm() <= cut) {
            v.pop();
        }
        Self::new(v)
    }

    /// Keeps only the terms of degree <= `deg`.
    pub fn truncate(&self, deg: usize) -> Self {
        Self::new(self.coeffs.iter().take(deg + 1).copied().collect())
    }

    /// `z^n p(1/z)`, the reversal with respect to the formal degree `n`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(
            self.degree().is_none_or(|d| d <= n),
            "formal degree below actual degree"
        );
        let mut v = vec![C64::new(0.0, 0.0); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            v[n - k] = c;
        }
        Self::new(v)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Quotient and remainder with `self = quot * divisor + rem`, `deg rem < deg divisor`.
    pub fn divrem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let Some(dn) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if dn < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = divisor.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::new(0.0, 0.0); dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let q = rem[k + dd] * lead_inv;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            // the cancelled term is zero by construction
            rem[k + dd] = C64::new(0.0, 0.0);
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Expands `leading * prod (z - r)`.
    pub fn from_roots(roots: &[C64], leading: C64) -> Self {
        let mut v = vec![leading];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); v.len() + 1];
            for (k, &c) in v.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            v = next;
        }
        Self::new(v)
    }

    /// Composition `self(inner(z))` by Horner's scheme.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * inner) + &Self::constant(c))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// JSON: array of [re, im] pairs, ascending powers.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom(
                "non-finite polynomial coefficient",
            ));
        }
        Ok(Polynomial::new(
            pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quartic() -> Polynomial {
        Polynomial::from_real(&[4.0, 5.0, 6.0, 2.0, 1.0])
    }

    #[test]
    fn eval_examples() {
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(sq.eval(c(3.0, 0.0)), c(9.0, 0.0));
        assert_eq!(quartic().eval(c(0.0, 0.0)), c(4.0, 0.0));
        let p0 = Polynomial::from_real(&[0.0, 1.5, 0.0, -0.5]);
        assert_eq!(p0.eval(c(1.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn derivatives_of_quartic() {
        let h = quartic();
        assert_eq!(
            h.derivative(),
            Polynomial::from_real(&[5.0, 12.0, 6.0, 4.0])
        );
        assert_eq!(
            h.nth_derivative(2),
            Polynomial::from_real(&[12.0, 12.0, 12.0])
        );
        assert!(Polynomial::from_real(&[7.0]).derivative().is_zero());
        assert!(Polynomial::zero().derivative().is_zero());
    }

    #[test]
    fn product_of_factors() {
        let a = Polynomial::from_real(&[4.0, 1.0, 1.0]);
        let b = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(&a * &b, quartic());
        assert_eq!(&a + &Polynomial::zero(), a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn synthetic_division() {
        let z3 = Polynomial::monomial(c(1.0, 0.0), 3);
        let (q, r) = z3.divrem(&Polynomial::linear(c(1.0, 0.0))).unwrap();
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0, 1.0]));
        assert_eq!(r, Polynomial::from_real(&[1.0]));
        assert_eq!(z3.divrem(&Polynomial::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn from_roots_simple() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)], c(1.0, 0.0));
        assert_eq!(p, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn p0_derivative_numerator_from_roots() {
        // p0 for n = 3 is (z^3 - 3z)/(-2); p0' = (3z^2 - 3)/(-2) has roots +-1
        let p0 = Polynomial::from_real(&[0.0, 1.5, 0.0, -0.5]);
        let rebuilt = Polynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)], c(-1.5, 0.0));
        assert_eq!(p0.derivative(), rebuilt);
    }

    #[test]
    fn reversal_and_trim() {
        let p = Polynomial::from_real(&[1.0, 2.0]);
        assert_eq!(p.reversed(3), Polynomial::from_real(&[0.0, 0.0, 2.0, 1.0]));
        let q = Polynomial::new(vec![c(1.0, 0.0), c(1e-20, 0.0)]);
        assert_eq!(q.trim_relative(1e-14).degree(), Some(0));
    }

    #[test]
    fn json_encoding() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[-1.0,0.0],[0.0,0.0],[1.0,0.0]]");
        let back: Polynomial = serde_json::from_str("[[-1,0],[0,0],[1,0]]").unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Polynomial>("[[1,0],[2]]").is_err());
    }
}
