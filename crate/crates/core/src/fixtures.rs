//! Built-in maps: the extremal cubic family `p0`, the quartic `h` with its
//! Newton map, and the power maps `z^n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::newton::newton_map;
use crate::poly::{Polynomial, C64};
use crate::ratmap::RationalMap;

/// `(z^n - n z) / (1 - n)`.
pub fn p0_polynomial(n: usize) -> Polynomial {
    assert!(n >= 2, "p0 needs n >= 2");
    let s = 1.0 / (1.0 - n as f64);
    let mut c = vec![0.0; n + 1];
    c[1] = -(n as f64) * s;
    c[n] = s;
    Polynomial::from_real(&c)
}

pub fn p0(n: usize) -> RationalMap {
    RationalMap::polynomial(p0_polynomial(n)).expect("degree >= 2")
}

/// `h = z^4 + 2z^3 + 6z^2 + 5z + 4 = (z^2 + z + 4)(z^2 + z + 1)`.
pub fn quartic_h() -> Polynomial {
    Polynomial::from_real(&[4.0, 5.0, 6.0, 2.0, 1.0])
}

/// Newton map of [`quartic_h`]: `(3z^4 + 4z^3 + 6z^2 - 4) / (4z^3 + 6z^2 + 12z + 5)`.
pub fn quartic_newton_map() -> RationalMap {
    newton_map(&quartic_h(), &Polynomial::one()).expect("nonconstant")
}

pub fn power(n: usize) -> RationalMap {
    RationalMap::polynomial(Polynomial::monomial(C64::new(1.0, 0.0), n)).expect("degree >= 1")
}

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: String,
    pub map: RationalMap,
    /// The polynomial the map was built from, when there is one.
    pub polynomial: Option<Polynomial>,
}

/// Looks up `p0:N`, `quartic` or `power:N`.
pub fn by_name(name: &str) -> Result<Fixture> {
    let bad = || {
        Error::Parse(format!(
            "unknown fixture {name:?} (try p0:N, quartic, power:N)"
        ))
    };
    let (kind, arg) = match name.split_once(':') {
        Some((k, a)) => (k, Some(a.parse::<usize>().map_err(|_| bad())?)),
        None => (name, None),
    };
    let fixture = match (kind, arg) {
        ("p0", Some(n)) if n >= 2 => Fixture {
            name: name.into(),
            map: p0(n),
            polynomial: Some(p0_polynomial(n)),
        },
        ("power", Some(n)) if n >= 2 => Fixture {
            name: name.into(),
            map: power(n),
            polynomial: Some(Polynomial::monomial(C64::new(1.0, 0.0), n)),
        },
        ("quartic", None) => Fixture {
            name: name.into(),
            map: quartic_newton_map(),
            polynomial: Some(quartic_h()),
        },
        _ => return Err(bad()),
    };
    Ok(fixture)
}

/// The maps with every critical point fixed: `p0` for `n = 2..=6`, the
/// quartic Newton map and `z^n` for `n = 3..=6`.
pub fn all_critical_fixed_registry() -> Vec<Fixture> {
    let mut names: Vec<String> = (2..=6).map(|n| format!("p0:{n}")).collect();
    names.push("quartic".into());
    names.extend((3..=6).map(|n| format!("power:{n}")));
    names
        .iter()
        .map(|n| by_name(n).expect("registered"))
        .collect()
}
