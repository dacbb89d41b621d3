pub mod error;
pub mod fixtures;
pub mod index;
pub mod newton;
pub mod poly;
pub mod ratmap;
pub mod sample;
pub mod search;
pub mod smale;
pub mod sphere;
pub mod suite;

pub use error::{Error, Result};
pub use poly::{Polynomial, C64};
pub use ratmap::{RationalMap, Side};
pub use sphere::{MoebiusMap, SpherePoint};
