//! Cyclotomic integers Z[zeta_p], reduced modulo the p-th cyclotomic polynomial.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// sum coords[i] zeta^i for i < p - 1; zeta^{p-1} is rewritten as -(1 + ... + zeta^{p-2}).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycInt {
    p: u32,
    coords: Vec<i64>,
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[z{}]{:?}", self.p, self.coords)
    }
}

impl CycInt {
    pub fn zero(p: u32) -> Self {
        CycInt { p, coords: vec![0; (p - 1) as usize] }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        let mut c = Self::zero(p);
        c.coords[0] = n;
        c
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// zeta_p^k for any integer k.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let mut full = vec![0i64; p as usize];
        full[k.rem_euclid(p as i64) as usize] = 1;
        Self::reduce(p, full)
    }

    /// Builds from reduced coordinates (length p - 1).
    pub fn from_coords(p: u32, coords: Vec<i64>) -> Self {
        assert_eq!(coords.len(), (p - 1) as usize, "expected p - 1 coordinates");
        CycInt { p, coords }
    }

    fn reduce(p: u32, mut full: Vec<i64>) -> Self {
        let top = full.pop().unwrap_or(0);
        for c in full.iter_mut() {
            *c -= top;
        }
        CycInt { p, coords: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        CycInt { p: self.p, coords: self.coords.iter().map(|c| c * k).collect() }
    }

    /// The Galois conjugate zeta -> zeta^j (j prime to p).
    pub fn galois(&self, j: u32) -> Self {
        let p = self.p as usize;
        let mut full = vec![0i64; p];
        for (i, &c) in self.coords.iter().enumerate() {
            full[(i * j as usize) % p] += c;
        }
        Self::reduce(self.p, full)
    }

    /// Product of all Galois conjugates, an ordinary integer.
    pub fn norm(&self) -> i64 {
        let mut acc = Self::one(self.p);
        for j in 1..self.p {
            acc = &acc * &self.galois(j);
        }
        debug_assert!(acc.coords[1..].iter().all(|&c| c == 0));
        acc.coords[0]
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        assert_eq!(self.p, rhs.p, "cyclotomic integers of different orders");
        CycInt { p: self.p, coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self + &(-rhs)
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        assert_eq!(self.p, rhs.p, "cyclotomic integers of different orders");
        let p = self.p as usize;
        let mut full = vec![0i64; p];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coords.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        CycInt::reduce(self.p, full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_unity_order() {
        assert_eq!(&CycInt::zeta_pow(3, 1) * &CycInt::zeta_pow(3, 2), CycInt::one(3));
    }

    #[test]
    fn cyclotomic_relation() {
        let s = &(&CycInt::one(3) + &CycInt::zeta_pow(3, 1)) + &CycInt::zeta_pow(3, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn p_equals_two() {
        assert_eq!(CycInt::zeta_pow(2, 1), CycInt::from_int(2, -1));
        assert_eq!(CycInt::zeta_pow(2, 1).norm(), -1);
    }
}
