//! Truncated valuation rings O/p^n and ring isomorphisms between two presentations.

use crate::error::{Error, Result};
use crate::exactalg::{field, Field, FqElem, TruncSeries};

/// O/p^n presented as F_q[t]/(t^n) with a named uniformizer twist·t, together with the
/// module p/p^{n+1} and its projection onto p/p^n.
#[derive(Clone, Debug)]
pub struct TruncDVR {
    field: &'static Field,
    level: usize,
    twist: TruncSeries,
    origin: String,
}

impl TruncDVR {
    /// The truncation of F_q((t)) at level n with uniformizer twist·t.
    pub fn new(q: u32, level: usize, twist: &TruncSeries) -> Result<TruncDVR> {
        let f = field(q)?;
        if level == 0 {
            return Err(Error::Invalid("truncation level must be at least 1".into()));
        }
        if twist.field() != f {
            return Err(Error::Invalid("twist lives over a different residue field".into()));
        }
        let twist = twist.relift(level as i64);
        if !twist.is_unit()? {
            return Err(Error::Invalid("uniformizer twist must be a unit".into()));
        }
        Ok(TruncDVR { field: f, level, twist, origin: format!("F_{q}((t))") })
    }

    /// The standard presentation with uniformizer t.
    pub fn standard(q: u32, level: usize) -> Result<TruncDVR> {
        let f = field(q)?;
        TruncDVR::new(q, level, &TruncSeries::one(f, level as i64))
    }

    /// The truncation of Q_p(p^{1/e}) with uniformizer ϖ = p^{1/e}: for level ≤ e the
    /// relation ϖ^e = p vanishes and O/ϖ^level = F_p[ϖ]/(ϖ^level).
    pub fn ramified_char_zero(p: u32, e: usize, level: usize) -> Result<TruncDVR> {
        if level > e {
            return Err(Error::LevelMismatch(format!(
                "Q_{p}({p}^(1/{e})) agrees with F_{p}((t)) only up to level {e}"
            )));
        }
        let f = field(p)?;
        if f.degree() != 1 {
            return Err(Error::UnsupportedField(p));
        }
        let mut dvr = TruncDVR::standard(p, level)?;
        dvr.origin = format!("Q_{p}({p}^(1/{e}))");
        Ok(dvr)
    }

    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn twist(&self) -> &TruncSeries {
        &self.twist
    }

    /// Where the truncation came from; not part of the ring data.
    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// The uniformizer class twist·t in p/p^{n+1}.
    pub fn uniformizer(&self) -> TruncSeries {
        self.twist.relift(self.level as i64 + 1).shift(1).truncate(self.level as i64 + 1)
    }

    /// Whether two truncations present the same ring data, whatever their origin.
    pub fn same_data(&self, other: &TruncDVR) -> bool {
        self.field == other.field && self.level == other.level && self.twist == other.twist
    }

    /// All elements of O/p^n.
    pub fn ring_elements(&self) -> Vec<TruncSeries> {
        self.digit_strings(self.level).into_iter().map(|d| TruncSeries::from_digits(self.field, 0, &d, self.level as i64)).collect()
    }

    /// All elements of p/p^{n+1}.
    pub fn module_elements(&self) -> Vec<TruncSeries> {
        let n = self.level as i64;
        self.digit_strings(self.level).into_iter().map(|d| TruncSeries::from_digits(self.field, 1, &d, n + 1)).collect()
    }

    /// The projection p/p^{n+1} -> p/p^n.
    pub fn epsilon(&self, y: &TruncSeries) -> Result<TruncSeries> {
        if !y.val_at_least(1)? {
            return Err(Error::Invalid("element does not lie in p".into()));
        }
        Ok(y.truncate(self.level as i64))
    }

    fn digit_strings(&self, len: usize) -> Vec<Vec<FqElem>> {
        let mut out: Vec<Vec<FqElem>> = vec![vec![]];
        for _ in 0..len {
            out = out.iter().flat_map(|p| self.field.elements().map(move |c| [p.clone(), vec![c]].concat())).collect();
        }
        out
    }
}

/// The truncated ring of F_q((t)) at level m with uniformizer twist·t.
pub fn make_field_model(q: u32, m: usize, twist: &TruncSeries) -> Result<TruncDVR> {
    TruncDVR::new(q, m, twist)
}

/// A ring isomorphism O/p^n -> O'/p'^n sending Σ a_i π^i to Σ φ(a_i) π'^i, where φ is a
/// power of Frobenius on the residue field.
///
/// The exact polynomial lifts of π and π' determine a continuous automorphism of
/// F_q((t)) extending the truncated map; it is used to move group elements and words.
#[derive(Clone, Debug)]
pub struct RingIso {
    source: TruncDVR,
    target: TruncDVR,
    pi_from: TruncSeries,
    pi_to: TruncSeries,
    frob: u32,
}

fn uniformizer_power(pi: &TruncSeries, k: i64, prec: i64) -> Result<TruncSeries> {
    let f = pi.field();
    if k == 0 {
        return Ok(TruncSeries::one(f, prec));
    }
    let lifted = pi.relift(prec + 2 * k.abs() + 4);
    Ok(lifted.pow(k)?.truncate(prec))
}

impl RingIso {
    /// Λ with Λ(π) = `uniformizer_image` and Λ(g) = `residue_gen_image` for the fixed
    /// multiplicative generator g of the residue field.
    pub fn new(
        source: TruncDVR,
        target: TruncDVR,
        uniformizer_image: &TruncSeries,
        residue_gen_image: FqElem,
    ) -> Result<RingIso> {
        if source.field != target.field {
            return Err(Error::Invalid("presentations have different residue fields".into()));
        }
        if source.level != target.level {
            return Err(Error::LevelMismatch(format!("levels {} and {}", source.level, target.level)));
        }
        let f = source.field;
        let frob = f
            .frobenius_power_of(residue_gen_image)
            .ok_or_else(|| Error::Invalid("residue generator image is not a Galois conjugate".into()))?;
        let n = source.level as i64;
        if uniformizer_image.valuation() != Some(1) || uniformizer_image.precision() < n {
            return Err(Error::Invalid("uniformizer image must have valuation one, known modulo p^n".into()));
        }
        let pi_to = uniformizer_image.truncate(n + 1).relift(n + 1);
        let pi_from = source.uniformizer();
        Ok(RingIso { source, target, pi_from, pi_to, frob })
    }

    /// The identity of a presentation.
    pub fn identity(dvr: &TruncDVR) -> Result<RingIso> {
        let g = dvr.field.generator();
        RingIso::new(dvr.clone(), dvr.clone(), &dvr.uniformizer(), g)
    }

    /// The isomorphism of the standard presentation onto the one with uniformizer unit·t,
    /// sending t to unit·t and fixing the residue field.
    pub fn retwist(q: u32, level: usize, unit: &TruncSeries) -> Result<RingIso> {
        let source = TruncDVR::standard(q, level)?;
        let target = TruncDVR::new(q, level, unit)?;
        let image = target.uniformizer();
        RingIso::new(source, target, &image, source_generator(q)?)
    }

    pub fn source(&self) -> &TruncDVR {
        &self.source
    }

    pub fn target(&self) -> &TruncDVR {
        &self.target
    }

    pub fn level(&self) -> usize {
        self.source.level
    }

    pub fn field(&self) -> &'static Field {
        self.source.field
    }

    /// π, known modulo p^{n+1}.
    pub fn source_uniformizer(&self) -> &TruncSeries {
        &self.pi_from
    }

    /// π' = Λ(π), known modulo p'^{n+1}.
    pub fn uniformizer_image(&self) -> &TruncSeries {
        &self.pi_to
    }

    pub fn residue_gen_image(&self) -> FqElem {
        self.field().frobenius(self.field().generator(), self.frob)
    }

    /// The exponent k with φ(c) = c^{p^k}.
    pub fn frobenius_exponent(&self) -> u32 {
        self.frob
    }

    pub fn residue_map(&self, c: FqElem) -> FqElem {
        self.field().frobenius(c, self.frob)
    }

    /// Λ^{-1}.
    pub fn inverse(&self) -> RingIso {
        let deg = self.field().degree();
        RingIso {
            source: self.target.clone(),
            target: self.source.clone(),
            pi_from: self.pi_to.clone(),
            pi_to: self.pi_from.clone(),
            frob: (deg - self.frob % deg) % deg,
        }
    }

    /// The continuous automorphism of F_q((t)) sending π and π' to the polynomial lifts of
    /// their classes, applied to a series of any valuation; the precision is preserved.
    pub fn transport(&self, x: &TruncSeries) -> Result<TruncSeries> {
        let f = self.field();
        let prec = x.precision();
        let Some(v) = x.valuation() else {
            return Ok(TruncSeries::zero(f, prec));
        };
        let lead = self.pi_from.coeff(1)?;
        let lead_inv = f.inv(lead).ok_or(Error::NotInvertible)?;
        let mut from_pow = uniformizer_power(&self.pi_from, v, prec + 1)?;
        let mut to_pow = uniformizer_power(&self.pi_to, v, prec + 1)?;
        let pf = self.pi_from.relift(prec - v + 2);
        let pt = self.pi_to.relift(prec - v + 2);
        let mut rest = x.clone();
        let mut out = TruncSeries::zero(f, prec);
        for i in v..prec {
            let d = rest.coeff(i)?;
            if !d.is_zero() {
                let scale = if i >= 0 { f.pow(lead_inv, i as u64) } else { f.pow(lead, (-i) as u64) };
                let a = f.mul(d, scale);
                rest = &rest - &from_pow.scale(a);
                out = &out + &to_pow.scale(self.residue_map(a));
            }
            from_pow = (&from_pow * &pf).truncate(prec + 1);
            to_pow = (&to_pow * &pt).truncate(prec + 1);
        }
        Ok(out.truncate(prec))
    }

    /// Λ on O/p^k for k ≤ n.
    pub fn apply(&self, x: &TruncSeries) -> Result<TruncSeries> {
        if x.precision() > self.level() as i64 {
            return Err(Error::LevelMismatch(format!(
                "element known modulo p^{} but Λ is given modulo p^{}",
                x.precision(),
                self.level()
            )));
        }
        if !x.val_at_least(0)? {
            return Err(Error::Invalid("Λ applies to integral elements".into()));
        }
        self.transport(x)
    }

    /// The induced map p/p^{k+1} -> p'/p'^{k+1}, π y ↦ π' Λ(y), for k ≤ n.
    pub fn apply_shift(&self, y: &TruncSeries) -> Result<TruncSeries> {
        if y.precision() > self.level() as i64 + 1 {
            return Err(Error::LevelMismatch(format!(
                "element known modulo p^{} but Λ is given modulo p^{}",
                y.precision(),
                self.level()
            )));
        }
        if !y.val_at_least(1)? {
            return Err(Error::Invalid("element does not lie in p".into()));
        }
        self.transport(y)
    }

    /// Checks additivity, multiplicativity and Λ(1) = 1: on all pairs when q^n ≤ 81,
    /// otherwise on pairs of additive generators.
    pub fn check_homomorphism(&self) -> Result<bool> {
        let f = self.field();
        let n = self.level() as i64;
        let one = TruncSeries::one(f, n);
        if self.apply(&one)? != one {
            return Ok(false);
        }
        let elems: Vec<TruncSeries> = if u64::from(f.q()).pow(self.level() as u32) <= 81 {
            self.source.ring_elements()
        } else {
            let mut gens = vec![one.clone(), TruncSeries::constant(f, f.generator(), n)];
            for k in 0..n {
                for &c in &f.prime_basis() {
                    gens.push(TruncSeries::monomial(f, c, k, n));
                }
            }
            gens
        };
        let images: Vec<TruncSeries> = elems.iter().map(|x| self.apply(x)).collect::<Result<_>>()?;
        for (x, lx) in elems.iter().zip(&images) {
            for (y, ly) in elems.iter().zip(&images) {
                if self.apply(&(x + y))? != lx + ly || self.apply(&(x * y).truncate(n))? != (lx * ly).truncate(n) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn source_generator(q: u32) -> Result<FqElem> {
    Ok(field(q)?.generator())
}

/// x^n + π Σ a_i x^i with coefficients a_i modulo p^m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinPoly {
    pub degree: usize,
    pub uniformizer: TruncSeries,
    pub coeffs: Vec<TruncSeries>,
}

impl EisensteinPoly {
    pub fn new(uniformizer: &TruncSeries, coeffs: &[TruncSeries]) -> Result<EisensteinPoly> {
        if uniformizer.valuation() != Some(1) {
            return Err(Error::Invalid("uniformizer must have valuation one".into()));
        }
        for a in coeffs {
            if !a.val_at_least(0)? {
                return Err(Error::Invalid("Eisenstein coefficients must be integral".into()));
            }
        }
        Ok(EisensteinPoly { degree: coeffs.len(), uniformizer: uniformizer.clone(), coeffs: coeffs.to_vec() })
    }

    /// The coefficients π a_i of x^i for i < n, modulo p^{m+1}.
    pub fn lower_coefficients(&self) -> Vec<TruncSeries> {
        let prec = self.uniformizer.precision();
        self.coeffs.iter().map(|a| (&self.uniformizer * &a.relift(prec)).truncate(prec)).collect()
    }
}

/// P' = x^n + π' Σ a_i' x^i with a_i ∼_Λ a_i' and π ∼_Λ π'.
pub fn eisenstein_transfer(p: &EisensteinPoly, lambda: &RingIso) -> Result<EisensteinPoly> {
    let pi_to = lambda.apply_shift(&p.uniformizer.truncate(lambda.level() as i64 + 1))?;
    let coeffs = p.coeffs.iter().map(|a| lambda.apply(a)).collect::<Result<Vec<_>>>()?;
    EisensteinPoly::new(&pi_to, &coeffs)
}
