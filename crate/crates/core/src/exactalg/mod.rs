//! Exact arithmetic: finite fields, truncated Laurent series, cyclotomic integers, rationals.

mod cyc;
mod fq;
mod series;

pub use cyc::CycInt;
pub use fq::{field, Field, FqElem, MAX_Q};
pub use series::{SeriesError, TruncSeries};

/// Exact rationals for Hecke algebra coefficients.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
