//! Reproducible random instances for the randomized suites.
//!
//! Every trial gets its own ChaCha8 stream seeded by [`trial_seed`], so
//! results do not depend on how trials are scheduled across threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::poly::{gcd, Polynomial, C64, DEFAULT_GCD_TOL};
use crate::ratmap::RationalMap;
use crate::sphere::{MoebiusMap, SpherePoint};

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 mix of the master seed and a trial index.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on the square `[-1, 1] x [-1, 1]`.
pub fn box_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Uniform on the unit square `[0, 1] x [0, 1]`.
pub fn unit_square_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

pub fn box_point(rng: &mut impl Rng) -> SpherePoint {
    SpherePoint::Finite(box_c64(rng))
}

/// Degree-`n` polynomial with coefficients uniform on `[-1,1]^2`, resampling
/// the leading coefficient if it is too small to hold the degree.
pub fn random_polynomial(rng: &mut impl Rng, n: usize) -> Polynomial {
    let mut c: Vec<C64> = (0..=n).map(|_| box_c64(rng)).collect();
    while c[n].norm() < 1e-3 {
        c[n] = box_c64(rng);
    }
    Polynomial::new(c)
}

/// Numerator and denominator of formal degree `n` with coefficients uniform
/// on `[-1,1]^2`; resampled when they share a factor or the degree drops.
pub fn random_map(rng: &mut impl Rng, n: usize) -> RationalMap {
    loop {
        let num = Polynomial::new((0..=n).map(|_| box_c64(rng)).collect());
        let den = Polynomial::new((0..=n).map(|_| box_c64(rng)).collect());
        if num.leading().norm().max(den.leading().norm()) < 1e-3 {
            continue;
        }
        if gcd(&num, &den, DEFAULT_GCD_TOL).degree() != Some(0) {
            continue;
        }
        if let Ok(r) = RationalMap::new(num, den) {
            if r.degree() == n {
                return r;
            }
        }
    }
}

/// Moebius map with entries uniform on `[-1,1]^2` and `|ad - bc| >= 0.1`.
pub fn random_moebius(rng: &mut impl Rng) -> MoebiusMap {
    loop {
        let [a, b, c, d] = [0; 4].map(|_| box_c64(rng));
        if (a * d - b * c).norm() >= 0.1 {
            return MoebiusMap::new(a, b, c, d).expect("checked determinant");
        }
    }
}

/// Affine map `z -> a z + b` with `|a| >= 0.1`.
pub fn random_affine(rng: &mut impl Rng) -> MoebiusMap {
    loop {
        let a = box_c64(rng);
        if a.norm() >= 0.1 {
            return MoebiusMap::affine(a, box_c64(rng)).expect("nonzero slope");
        }
    }
}

/// Monic polynomial whose `n` roots are uniform on the unit square with
/// pairwise distance at least `min_sep`. Returns the roots as well.
pub fn random_squarefree(rng: &mut impl Rng, n: usize, min_sep: f64) -> (Polynomial, Vec<C64>) {
    let mut rs: Vec<C64> = Vec::with_capacity(n);
    while rs.len() < n {
        let z = unit_square_c64(rng);
        if rs.iter().all(|r| (r - z).norm() >= min_sep) {
            rs.push(z);
        }
    }
    (Polynomial::from_roots(&rs, C64::new(1.0, 0.0)), rs)
}
