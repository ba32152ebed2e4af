//! Truncated Laurent series over F_q: elements of F_q((t)) known modulo t^N.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::fq::{Field, FqElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("zero class is not invertible")]
    NotInvertible,
}

/// An element of F_q((t)) known modulo t^prec.
///
/// Digits are stored densely from `val` up to `prec - 1`; the first stored digit is
/// nonzero. The zero class (every known digit vanishes) has no digits and `val == prec`.
#[derive(Clone)]
pub struct TruncSeries {
    field: &'static Field,
    val: i64,
    coeffs: Vec<FqElem>,
    prec: i64,
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.prec == other.prec
            && self.val == other.val
            && self.coeffs == other.coeffs
    }
}
impl Eq for TruncSeries {}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "O(t^{})", self.prec);
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}t^{}", c, self.val + i as i64)?;
        }
        write!(f, " + O(t^{})", self.prec)
    }
}

impl TruncSeries {
    /// Builds a normalized series from digits starting at exponent `val`; digits at or
    /// beyond `prec` are dropped.
    pub fn from_digits(field: &'static Field, val: i64, digits: &[FqElem], prec: i64) -> Self {
        let keep = (prec - val).clamp(0, digits.len() as i64) as usize;
        let lead = digits[..keep].iter().position(|c| !c.is_zero());
        match lead {
            None => Self::zero(field, prec),
            Some(k) => {
                let v = val + k as i64;
                let mut coeffs = Vec::with_capacity((prec - v) as usize);
                coeffs.extend_from_slice(&digits[k..keep]);
                coeffs.resize((prec - v) as usize, FqElem::ZERO);
                TruncSeries { field, val: v, coeffs, prec }
            }
        }
    }

    pub fn zero(field: &'static Field, prec: i64) -> Self {
        TruncSeries { field, val: prec, coeffs: Vec::new(), prec }
    }

    pub fn one(field: &'static Field, prec: i64) -> Self {
        Self::monomial(field, FqElem::ONE, 0, prec)
    }

    pub fn constant(field: &'static Field, c: FqElem, prec: i64) -> Self {
        Self::monomial(field, c, 0, prec)
    }

    /// c * t^e known modulo t^prec.
    pub fn monomial(field: &'static Field, c: FqElem, e: i64, prec: i64) -> Self {
        Self::from_digits(field, e, &[c], prec)
    }

    /// The series t known modulo t^prec.
    pub fn t(field: &'static Field, prec: i64) -> Self {
        Self::monomial(field, FqElem::ONE, 1, prec)
    }

    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero_class(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The valuation if some known digit is nonzero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    /// Lower bound on the valuation: the exact valuation, or the precision for the zero class.
    pub fn min_valuation(&self) -> i64 {
        self.val
    }

    /// Stored digits starting at `valuation()`.
    pub fn digits(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of t^e.
    pub fn coeff(&self, e: i64) -> Result<FqElem, SeriesError> {
        if e >= self.prec {
            return Err(SeriesError::PrecisionExhausted(format!(
                "coefficient of t^{e} requested, known mod t^{}",
                self.prec
            )));
        }
        if e < self.val {
            return Ok(FqElem::ZERO);
        }
        Ok(self.coeffs[(e - self.val) as usize])
    }

    /// Coefficients of t^from .. t^{to-1}.
    pub fn window(&self, from: i64, to: i64) -> Result<Vec<FqElem>, SeriesError> {
        (from..to).map(|e| self.coeff(e)).collect()
    }

    /// Whether v(self) >= k; undecidable if the known digits are all zero below a precision < k.
    pub fn val_at_least(&self, k: i64) -> Result<bool, SeriesError> {
        if !self.coeffs.is_empty() {
            return Ok(self.val >= k);
        }
        if self.prec >= k {
            Ok(true)
        } else {
            Err(SeriesError::PrecisionExhausted(format!(
                "valuation >= {k} undecided, known mod t^{}",
                self.prec
            )))
        }
    }

    /// Forget digits at and beyond t^prec.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::from_digits(self.field, self.val, &self.coeffs, prec)
    }

    /// Treat the known digits as an exact polynomial and present it modulo t^prec.
    pub fn relift(&self, prec: i64) -> Self {
        Self::from_digits(self.field, self.val, &self.coeffs, prec)
    }

    /// Multiplication by t^k (exact).
    pub fn shift(&self, k: i64) -> Self {
        TruncSeries { field: self.field, val: self.val + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    pub fn scale(&self, c: FqElem) -> Self {
        let f = self.field;
        let digits: Vec<FqElem> = self.coeffs.iter().map(|&x| f.mul(x, c)).collect();
        Self::from_digits(f, self.val, &digits, self.prec)
    }

    /// Split at exponent `cut` into the digits below `cut` and the quotient of the rest by
    /// t^cut. Both parts keep the precision of `self` (the quotient's shifted by `-cut`).
    pub fn split_at(&self, cut: i64) -> (Self, Self) {
        let f = self.field;
        let low_len = (cut - self.val).clamp(0, self.coeffs.len() as i64) as usize;
        let low = Self::from_digits(f, self.val, &self.coeffs[..low_len], self.prec);
        let high = Self::from_digits(f, self.val + low_len as i64, &self.coeffs[low_len..], self.prec);
        (low, high.shift(-cut))
    }

    /// Inverse of a nonzero class: known modulo t^{prec - 2v}.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        if self.coeffs.is_empty() {
            return Err(SeriesError::NotInvertible);
        }
        let f = self.field;
        let n = self.coeffs.len();
        let a0_inv = f.inv(self.coeffs[0]).expect("leading digit is nonzero");
        let mut b = Vec::with_capacity(n);
        b.push(a0_inv);
        for k in 1..n {
            let mut s = FqElem::ZERO;
            for i in 1..=k {
                s = f.add(s, f.mul(self.coeffs[i], b[k - i]));
            }
            b.push(f.neg(f.mul(a0_inv, s)));
        }
        Ok(Self::from_digits(f, -self.val, &b, -self.val + n as i64))
    }

    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            return Ok(Self::one(self.field, (self.prec - self.val).max(0)));
        }
        let mut acc: Option<TruncSeries> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        Ok(acc.expect("positive exponent"))
    }

    /// Whether the class is a unit (valuation exactly zero).
    pub fn is_unit(&self) -> Result<bool, SeriesError> {
        if !self.coeffs.is_empty() {
            return Ok(self.val == 0);
        }
        if self.prec >= 1 {
            Ok(false)
        } else {
            Err(SeriesError::PrecisionExhausted("unit test undecided".into()))
        }
    }

    /// Substitute t -> `image` into the known digits, applying `map` to each digit.
    /// `image` must have positive valuation.
    pub fn substitute(&self, image: &TruncSeries, map: impl Fn(FqElem) -> FqElem) -> Result<Self, SeriesError> {
        let f = self.field;
        let iv = image.valuation().filter(|&v| v >= 1).ok_or_else(|| {
            SeriesError::PrecisionExhausted("substitution needs a series of positive valuation".into())
        })?;
        // the unknown tail t^prec O lands in T^prec O
        let bound = if self.prec >= 0 { self.prec } else { self.prec * iv };
        if self.coeffs.is_empty() {
            return Ok(Self::zero(f, bound));
        }
        let mut term = if self.val == 0 {
            Self::one(f, image.prec.max(self.prec))
        } else {
            image.pow(self.val)?
        };
        let mut out: Option<TruncSeries> = None;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let piece = term.scale(map(c));
                out = Some(match out {
                    None => piece,
                    Some(o) => &o + &piece,
                });
            }
            if i + 1 < self.coeffs.len() {
                term = &term * image;
            }
        }
        let out = out.expect("nonzero class has a nonzero digit");
        Ok(out.truncate(bound))
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        assert!(self.field == rhs.field, "series over different fields");
        let f = self.field;
        let prec = self.prec.min(rhs.prec);
        let val = self.val.min(rhs.val);
        if val >= prec {
            return TruncSeries::zero(f, prec);
        }
        let len = (prec - val) as usize;
        let mut digits = vec![FqElem::ZERO; len];
        for (src, off) in [(self, self.val - val), (rhs, rhs.val - val)] {
            for (i, &c) in src.coeffs.iter().enumerate() {
                let k = off as usize + i;
                if k >= len {
                    break;
                }
                digits[k] = f.add(digits[k], c);
            }
        }
        TruncSeries::from_digits(f, val, &digits, prec)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        let f = self.field;
        TruncSeries {
            field: f,
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self + &(-rhs)
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        assert!(self.field == rhs.field, "series over different fields");
        let f = self.field;
        let prec = (self.prec.saturating_add(rhs.val)).min(rhs.prec.saturating_add(self.val));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return TruncSeries::zero(f, prec);
        }
        let val = self.val + rhs.val;
        let len = (prec - val).max(0) as usize;
        let mut digits = vec![FqElem::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(len - i) {
                digits[i + j] = f.add(digits[i + j], f.mul(a, b));
            }
        }
        TruncSeries::from_digits(f, val, &digits, prec)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        -&self
    }
}
