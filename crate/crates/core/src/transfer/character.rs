//! Additive characters x ↦ ψ(a·x) of F_q((t)) and their transfer across Λ.

use super::ring::RingIso;
use crate::error::{Error, Result};
use crate::exactalg::{CycInt, FqElem, TruncSeries};

/// ψ(x) = ζ_p^{tr(c_{-1})} on x = Σ c_i t^i, as the exponent of ζ_p.
pub fn residue_exponent(x: &TruncSeries) -> Result<u32> {
    Ok(x.field().trace(x.coeff(-1)?))
}

/// The character x ↦ ψ(a·x), with a an exact Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveChar {
    a: TruncSeries,
}

impl AdditiveChar {
    /// The character with multiplier a; the known digits of a are taken as exact.
    pub fn new(a: &TruncSeries) -> Result<AdditiveChar> {
        if a.is_zero_class() {
            return Err(Error::Invalid("the trivial character has no conductor".into()));
        }
        Ok(AdditiveChar { a: a.clone() })
    }

    /// ψ(u t^{-cond} x) for a unit u given by its leading digit.
    pub fn with_conductor(unit: FqElem, conductor: i64, q: u32) -> Result<AdditiveChar> {
        let f = crate::exactalg::field(q)?;
        if unit.is_zero() {
            return Err(Error::Invalid("multiplier must be a unit".into()));
        }
        AdditiveChar::new(&TruncSeries::monomial(f, unit, -conductor, 1 - conductor))
    }

    pub fn multiplier(&self) -> &TruncSeries {
        &self.a
    }

    /// The least n with χ trivial on p^n.
    pub fn conductor(&self) -> i64 {
        -self.a.min_valuation()
    }

    pub fn p(&self) -> u32 {
        self.a.field().p()
    }

    /// χ(x) as an exponent of ζ_p; x must be known far enough to fix the residue of a·x.
    pub fn exponent(&self, x: &TruncSeries) -> Result<u32> {
        let f = self.a.field();
        let Some(va) = self.a.valuation() else { return Ok(0) };
        let need = -1 - va;
        if x.precision() <= need {
            return Err(Error::InsufficientPrecision(format!(
                "χ needs the argument modulo t^{}, got t^{}",
                need + 1,
                x.precision()
            )));
        }
        let Some(vx) = x.valuation() else { return Ok(0) };
        let mut c = FqElem::ZERO;
        for (i, &ai) in self.a.digits().iter().enumerate() {
            let j = -1 - (va + i as i64);
            if j < vx {
                break;
            }
            c = f.add(c, f.mul(ai, x.coeff(j)?));
        }
        Ok(f.trace(c))
    }

    pub fn value(&self, x: &TruncSeries) -> Result<CycInt> {
        Ok(CycInt::zeta_pow(self.p(), i64::from(self.exponent(x)?)))
    }
}

/// χ' of the same conductor m_α with χ'(π'^k Λ(y)) = χ(π^k y) for y ∈ O/p^{m+1}, k = m_α − m − 1.
pub fn char_transfer(chi: &AdditiveChar, lambda: &RingIso, m: usize) -> Result<AdditiveChar> {
    if lambda.level() < m + 1 {
        return Err(Error::ConductorTooLarge(format!(
            "the window p^(m_α-{})/p^(m_α) needs Λ modulo p^{}, given modulo p^{}",
            m + 1,
            m + 1,
            lambda.level()
        )));
    }
    let f = lambda.field();
    let cond = chi.conductor();
    let k = cond - m as i64 - 1;
    let width = m as i64 + 1;
    let pi = lambda.source_uniformizer();
    let pi_t = lambda.uniformizer_image();
    let power = |p: &TruncSeries| -> Result<TruncSeries> {
        let lifted = p.relift(cond + 2 * k.abs() + 4);
        Ok(if k == 0 { TruncSeries::one(f, cond) } else { lifted.pow(k)?.truncate(cond) })
    };
    let (pk, pk_t) = (power(pi)?, power(pi_t)?);
    let mut window = Vec::new();
    for i in 0..width {
        for &c in &f.prime_basis() {
            let y = TruncSeries::monomial(f, c, i, width);
            let x = &pk * &y.relift(cond - k);
            let x_t = &pk_t * &lambda.apply(&y)?.relift(cond - k);
            window.push((chi.exponent(&x.truncate(cond))?, x_t.truncate(cond)));
        }
    }
    let units: Vec<FqElem> = f.units().collect();
    let all: Vec<FqElem> = f.elements().collect();
    let mut digits = vec![FqElem::ZERO; width as usize];
    let mut found = None;
    search(&mut digits, 0, &units, &all, &mut |d| {
        let cand = AdditiveChar::new(&TruncSeries::from_digits(f, -cond, d, -k))?;
        for (e, x_t) in &window {
            if cand.exponent(x_t)? != *e {
                return Ok(false);
            }
        }
        found = Some(cand);
        Ok(true)
    })?;
    found.ok_or_else(|| Error::Invalid("no character of the same conductor matches the window".into()))
}

/// Depth-first search over digit strings with a unit leading digit; stops at the first hit.
fn search(
    digits: &mut Vec<FqElem>,
    pos: usize,
    units: &[FqElem],
    all: &[FqElem],
    accept: &mut dyn FnMut(&[FqElem]) -> Result<bool>,
) -> Result<bool> {
    if pos == digits.len() {
        return accept(digits);
    }
    let pool = if pos == 0 { units } else { all };
    for &c in pool {
        digits[pos] = c;
        if search(digits, pos + 1, units, all, accept)? {
            return Ok(true);
        }
    }
    Ok(false)
}
