use num_traits::ToPrimitive;
use serde::Serialize;

use crate::chains::{fmt_rational, Rational};

/// A rational as `"p/q"` together with a decimal approximation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exact {
    pub exact: String,
    pub approx: f64,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact {
            exact: fmt_rational(r),
            approx: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact::from(&r)
    }
}
