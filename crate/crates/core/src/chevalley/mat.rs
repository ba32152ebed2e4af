//! Square matrices over truncated Laurent series.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{Field, FqElem, TruncSeries};

pub type IntMat = Vec<Vec<i64>>;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    n: usize,
    e: Vec<TruncSeries>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "  {}", row.join(" | "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zero(field: &'static Field, n: usize, prec: i64) -> Mat {
        Mat { n, e: vec![TruncSeries::zero(field, prec); n * n] }
    }

    pub fn identity(field: &'static Field, n: usize, prec: i64) -> Mat {
        let mut m = Mat::zero(field, n, prec);
        for i in 0..n {
            m.set(i, i, TruncSeries::one(field, prec));
        }
        m
    }

    pub fn from_int(field: &'static Field, a: &IntMat, prec: i64) -> Mat {
        let n = a.len();
        let mut m = Mat::zero(field, n, prec);
        for i in 0..n {
            for j in 0..n {
                if a[i][j] != 0 {
                    m.set(i, j, TruncSeries::constant(field, field.from_int(a[i][j]), prec));
                }
            }
        }
        m
    }

    pub fn diagonal(field: &'static Field, d: Vec<TruncSeries>, prec: i64) -> Mat {
        let n = d.len();
        let mut m = Mat::zero(field, n, prec);
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &'static Field {
        self.e[0].field()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.e[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: TruncSeries) {
        self.e[i * self.n + j] = x;
    }

    pub fn entries(&self) -> &[TruncSeries] {
        &self.e
    }

    /// Smallest precision among the entries.
    pub fn precision(&self) -> i64 {
        self.e.iter().map(|x| x.precision()).min().unwrap_or(i64::MAX)
    }

    /// Smallest valuation among the entries (zero classes count at their precision).
    pub fn min_valuation(&self) -> i64 {
        self.e.iter().map(|x| x.min_valuation()).min().unwrap_or(i64::MAX)
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: Option<TruncSeries> = None;
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    let p = a * b;
                    acc = Some(match acc {
                        None => p,
                        Some(s) => &s + &p,
                    });
                }
                e.push(acc.expect("nonempty matrix"));
            }
        }
        Mat { n, e }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&rhs.e).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&rhs.e).map(|(a, b)| a + b).collect() }
    }

    pub fn scale_entries(&self, c: &TruncSeries) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut m = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(j, i).clone());
            }
        }
        m
    }

    pub fn truncate(&self, prec: i64) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|a| a.truncate(prec)).collect() }
    }

    /// Treat every entry's known digits as exact and present it modulo t^prec.
    pub fn relift(&self, prec: i64) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|a| a.relift(prec)).collect() }
    }

    /// Row-wise support of a monomial matrix with its valuations, or None.
    pub fn monomial_support(&self) -> Option<(Vec<usize>, Vec<i64>)> {
        let mut cols = Vec::with_capacity(self.n);
        let mut vals = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let nz: Vec<usize> = (0..self.n).filter(|&j| !self.get(i, j).is_zero_class()).collect();
            if nz.len() != 1 {
                return None;
            }
            cols.push(nz[0]);
            vals.push(self.get(i, nz[0]).valuation()?);
        }
        let mut seen = cols.clone();
        seen.sort_unstable();
        seen.dedup();
        (seen.len() == self.n).then_some((cols, vals))
    }

    /// Gauss-Jordan inverse, pivoting on the entry of least valuation.
    pub fn inv(&self) -> Result<Mat> {
        let n = self.n;
        let f = self.field();
        let prec = self.precision();
        let mut a = self.clone();
        let mut b = Mat::identity(f, n, prec.max(1));
        for c in 0..n {
            let pivot = (c..n)
                .filter(|&r| !a.get(r, c).is_zero_class())
                .min_by_key(|&r| a.get(r, c).min_valuation());
            let Some(r) = pivot else {
                return Err(Error::InsufficientPrecision("singular pivot column during inversion".into()));
            };
            if r != c {
                for j in 0..n {
                    a.e.swap(r * n + j, c * n + j);
                    b.e.swap(r * n + j, c * n + j);
                }
            }
            let pinv = a.get(c, c).inv()?;
            for j in 0..n {
                let x = a.get(c, j) * &pinv;
                a.set(c, j, x);
                let y = b.get(c, j) * &pinv;
                b.set(c, j, y);
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_zero_class() {
                    continue;
                }
                let factor = a.get(r, c).clone();
                for j in 0..n {
                    let x = a.get(r, j) - &(&factor * a.get(c, j));
                    a.set(r, j, x);
                    let y = b.get(r, j) - &(&factor * b.get(c, j));
                    b.set(r, j, y);
                }
            }
        }
        Ok(b)
    }

    /// Whether the two matrices agree; an agreement only known below `min_prec` is an error.
    pub fn agrees_with(&self, other: &Mat, min_prec: i64) -> Result<bool> {
        let d = self.sub(other);
        if d.e.iter().any(|x| !x.is_zero_class()) {
            return Ok(false);
        }
        let p = d.precision();
        if p < min_prec {
            return Err(Error::InsufficientPrecision(format!("matrices agree only modulo t^{p}")));
        }
        Ok(true)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero_class()))
    }

    pub fn diag(&self) -> Vec<TruncSeries> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    /// The constant-term matrix when every entry is a constant (valuation >= 0 and
    /// nothing but a constant term known to be nonzero), else None.
    pub fn constant_entries(&self) -> Option<Vec<FqElem>> {
        self.e
            .iter()
            .map(|x| {
                if x.is_zero_class() {
                    return Some(FqElem::ZERO);
                }
                if x.valuation() != Some(0) || x.digits().iter().skip(1).any(|c| !c.is_zero()) {
                    return None;
                }
                Some(x.digits()[0])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field;

    #[test]
    fn inverse_roundtrip() {
        let f = field(3).unwrap();
        let p = 8;
        let t = TruncSeries::t(f, p);
        let one = TruncSeries::one(f, p);
        let mut m = Mat::identity(f, 2, p);
        m.set(0, 1, t.inv().unwrap());
        m.set(1, 0, t.clone());
        m.set(1, 1, &one + &one);
        let prod = m.mul(&m.inv().unwrap());
        assert!(prod.agrees_with(&Mat::identity(f, 2, p), 4).unwrap());
    }
}
