//! Finite fields F_q for q <= 27, as lookup tables over a fixed index enumeration.
//!
//! An element of F_{p^f} is the polynomial sum c_i x^i (deg < f) reduced modulo a
//! fixed irreducible polynomial; its index is sum c_i p^i.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_Q: u32 = 27;

/// Lower coefficients a_0..a_{f-1} of the monic modulus x^f + sum a_i x^i.
fn modulus(p: u32, f: u32) -> Option<&'static [u32]> {
    Some(match (p, f) {
        (_, 1) => &[],
        (2, 2) => &[1, 1],
        (2, 3) => &[1, 1, 0],
        (2, 4) => &[1, 1, 0, 0],
        (3, 2) => &[2, 2],
        (3, 3) => &[1, 2, 0],
        (5, 2) => &[2, 4],
        _ => return None,
    })
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    let mut f = 0;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

/// An element of F_q, stored as its index in the fixed enumeration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub u8);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn value(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic tables for one field.
pub struct Field {
    q: u32,
    p: u32,
    f: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    trace: Vec<u8>,
    generator: u8,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}
impl Eq for Field {}

static FIELDS: OnceLock<Vec<OnceLock<Field>>> = OnceLock::new();

/// The shared table for F_q.
pub fn field(q: u32) -> Result<&'static Field> {
    if q > MAX_Q {
        return Err(Error::UnsupportedField(q));
    }
    let (p, f) = prime_power(q).ok_or(Error::UnsupportedField(q))?;
    let poly = modulus(p, f).ok_or(Error::UnsupportedField(q))?;
    let slots = FIELDS.get_or_init(|| (0..=MAX_Q).map(|_| OnceLock::new()).collect());
    Ok(slots[q as usize].get_or_init(|| Field::build(p, f, poly)))
}

impl Field {
    fn build(p: u32, f: u32, poly: &[u32]) -> Field {
        let q = p.pow(f);
        let digits = |v: u32| -> Vec<u32> {
            let mut d = Vec::with_capacity(f as usize);
            let mut v = v;
            for _ in 0..f {
                d.push(v % p);
                v /= p;
            }
            d
        };
        let index = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = index(&s) as u8;
                // schoolbook product, then reduce the high terms with x^f = -sum a_i x^i
                let mut prod = vec![0u32; (2 * f) as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for k in (f as usize..prod.len()).rev() {
                    let c = prod[k];
                    if c == 0 {
                        continue;
                    }
                    prod[k] = 0;
                    for (i, a_i) in poly.iter().enumerate() {
                        let pos = k - f as usize + i;
                        prod[pos] = (prod[pos] + (p - c) * a_i) % p;
                    }
                }
                mul[(a * q + b) as usize] = index(&prod[..f as usize]) as u8;
            }
        }
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        for a in 0..q {
            for b in 0..q {
                if add[(a * q + b) as usize] == 0 {
                    neg[a as usize] = b as u8;
                }
                if a != 0 && mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        let order = |g: u32| -> u32 {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = mul[(x * q + g) as usize] as u32;
                k += 1;
            }
            k
        };
        // x itself for extension fields (the moduli are primitive), smallest primitive root otherwise
        let generator = if f > 1 && order(p) == q - 1 {
            p
        } else {
            (1..q).find(|&g| order(g) == q - 1).expect("cyclic multiplicative group")
        } as u8;
        let mut trace = vec![0u8; n];
        for a in 0..q {
            let mut conj = a;
            let mut acc = 0u32;
            for _ in 0..f {
                acc = add[(acc * q + conj) as usize] as u32;
                let mut c = 1u32;
                for _ in 0..p {
                    c = mul[(c * q + conj) as usize] as u32;
                }
                conj = c;
            }
            trace[a as usize] = acc as u8;
        }
        Field { q, p, f, add, mul, neg, inv, trace, generator }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn elem(&self, v: u32) -> FqElem {
        assert!(v < self.q, "index {v} out of range for F_{}", self.q);
        FqElem(v as u8)
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(self.p as i64) as u8)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.q).map(|v| FqElem(v as u8))
    }

    pub fn units(&self) -> impl Iterator<Item = FqElem> + '_ {
        (1..self.q).map(|v| FqElem(v as u8))
    }

    /// Additive generators of F_q over F_p: 1, x, ..., x^{f-1}.
    pub fn prime_basis(&self) -> Vec<FqElem> {
        (0..self.f).map(|i| FqElem(self.p.pow(i) as u8)).collect()
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        (!a.is_zero()).then(|| FqElem(self.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        let mut acc = FqElem::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Fixed generator of the multiplicative group.
    pub fn generator(&self) -> FqElem {
        FqElem(self.generator)
    }

    /// Absolute trace to F_p, returned as an integer in [0, p).
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize] as u32
    }

    /// The k-th power of Frobenius, c -> c^{p^k}.
    pub fn frobenius(&self, a: FqElem, k: u32) -> FqElem {
        self.pow(a, (self.p as u64).pow(k % self.f))
    }

    /// The exponent k with g -> image being c -> c^{p^k}, if any.
    pub fn frobenius_power_of(&self, image: FqElem) -> Option<u32> {
        (0..self.f).find(|&k| self.frobenius(self.generator(), k) == image)
    }
}
