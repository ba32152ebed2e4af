//! Generic characters of U, the space E(χ)^m of I_m-fixed vectors in the induction of χ from U
//! to G, its basis h_{w̃b}, the Hecke action on it, and the transport κ across close presentations.
//!
//! Matrix normal forms are only available for GL_n and SL_2.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::affweyl::{ExtAffWeylElem, SKind};
use crate::chevalley::{Atom, GenWord, IwahoriCoords, Mat};
use crate::error::{Error, Result};
use crate::exactalg::{CycInt, FqElem, TruncSeries};
use crate::hecke::{HeckeAlgebra, HeckeElem, Letter};
use crate::report::Report;
use crate::rootdata::{pairing, GroupTag};
use crate::transfer::{beta_map, char_transfer, AdditiveChar, Transfer};

/// χ(u) = ∏_{α∈Δ} χ_α(x_α(u)), one additive character per simple root in the order of Δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericCharacter {
    chars: Vec<AdditiveChar>,
}

impl GenericCharacter {
    pub fn new(chars: Vec<AdditiveChar>) -> Result<GenericCharacter> {
        let Some(first) = chars.first() else {
            return Err(Error::Invalid("a generic character needs one component per simple root".into()));
        };
        if chars.iter().any(|c| c.p() != first.p()) {
            return Err(Error::Invalid("components over different residue fields".into()));
        }
        Ok(GenericCharacter { chars })
    }

    /// Every component x ↦ ψ(u t^{-c} x) for the same unit digit u and conductor c.
    pub fn uniform(q: u32, simple_count: usize, unit: FqElem, conductor: i64) -> Result<GenericCharacter> {
        let c = AdditiveChar::with_conductor(unit, conductor, q)?;
        GenericCharacter::new(vec![c; simple_count])
    }

    pub fn components(&self) -> &[AdditiveChar] {
        &self.chars
    }

    pub fn conductors(&self) -> Vec<i64> {
        self.chars.iter().map(|c| c.conductor()).collect()
    }

    pub fn p(&self) -> u32 {
        self.chars[0].p()
    }
}

/// A basis index (w, b) of h_{w̃b}.
pub type BasisKey = (ExtAffWeylElem, IwahoriCoords);

/// A finite combination Σ c·h_{w̃b} with c ∈ Z[ζ_p], indexed by normalized basis keys.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WhitVector {
    pub terms: BTreeMap<BasisKey, CycInt>,
}

impl WhitVector {
    pub fn zero() -> WhitVector {
        WhitVector::default()
    }

    pub fn basis(key: BasisKey, p: u32) -> WhitVector {
        let mut v = WhitVector::zero();
        v.add_term(key, CycInt::one(p));
        v
    }

    pub fn add_term(&mut self, key: BasisKey, c: CycInt) {
        let sum = match self.terms.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &WhitVector) -> WhitVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &CycInt) -> WhitVector {
        let mut out = WhitVector::zero();
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// E(χ)^m over one Hecke algebra.
pub struct WhittakerModel<'a> {
    h: &'a HeckeAlgebra,
    chi: GenericCharacter,
    /// Matrix position and structure constant of each simple root group.
    simple_pos: Vec<(usize, usize, i64)>,
    /// (w, b) ↦ (b0, e) with h_{w̃b} = ζ^e h_{w̃b0}, or None off the support.
    normal: Mutex<HashMap<BasisKey, Option<(IwahoriCoords, u32)>>>,
}

impl<'a> WhittakerModel<'a> {
    pub fn new(h: &'a HeckeAlgebra, chi: GenericCharacter) -> Result<WhittakerModel<'a>> {
        if !matches!(h.tag(), GroupTag::SL2 | GroupTag::GL(_)) {
            return Err(Error::UnsupportedCell(format!("Whittaker normal forms for {}", h.tag())));
        }
        let d = h.ch.datum();
        if chi.components().len() != d.simples.len() {
            return Err(Error::Invalid(format!(
                "{} character components for {} simple roots",
                chi.components().len(),
                d.simples.len()
            )));
        }
        if chi.p() != h.ch.field.p() {
            return Err(Error::Invalid("character and group over different residue fields".into()));
        }
        let mut simple_pos = Vec::new();
        for &a in &d.simples {
            let rm = h.ch.root_matrix(a);
            let nz: Vec<(usize, usize, i64)> = rm
                .iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, &k)| k != 0).map(move |(j, &k)| (i, j, k)))
                .collect();
            match nz.as_slice() {
                [one] if one.2.abs() == 1 => simple_pos.push(*one),
                _ => return Err(Error::UnsupportedCell("simple root group is not elementary".into())),
            }
        }
        Ok(WhittakerModel { h, chi, simple_pos, normal: Mutex::new(HashMap::new()) })
    }

    pub fn algebra(&self) -> &HeckeAlgebra {
        self.h
    }

    pub fn character(&self) -> &GenericCharacter {
        &self.chi
    }

    pub fn p(&self) -> u32 {
        self.chi.p()
    }

    fn zeta(&self, e: u32) -> CycInt {
        CycInt::zeta_pow(self.p(), i64::from(e))
    }

    fn add_exp(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p()
    }

    fn sub_exp(&self, a: u32, b: u32) -> u32 {
        (a + self.p() - b % self.p()) % self.p()
    }

    /// χ(u) as an exponent of ζ_p for u ∈ U(F).
    pub fn char_exponent(&self, u: &Mat) -> Result<u32> {
        let n = u.size();
        for i in 0..n {
            for j in 0..=i {
                let x = u.get(i, j);
                let off = if i == j { (x - &TruncSeries::one(x.field(), x.precision())).is_zero_class() } else { x.is_zero_class() };
                if !off {
                    return Err(Error::Invalid("element is not upper unipotent".into()));
                }
            }
        }
        let f = u.field();
        let mut e = 0;
        for (chi, &(r, c, k)) in self.chi.components().iter().zip(&self.simple_pos) {
            let x = u.get(r, c).scale(f.from_int(k));
            e = self.add_exp(e, chi.exponent(&x)?);
        }
        Ok(e)
    }

    pub fn char_value(&self, u: &Mat) -> Result<CycInt> {
        Ok(self.zeta(self.char_exponent(u)?))
    }

    /// χ on a word of positive root group elements.
    pub fn char_value_word(&self, word: &GenWord) -> Result<CycInt> {
        let d = self.h.ch.datum();
        if !word.0.iter().all(|a| matches!(a, Atom::U { root, .. } if d.is_positive(*root))) {
            return Err(Error::Invalid("χ is only defined on positive root group elements".into()));
        }
        self.char_value(&self.h.ch.eval(word, self.h.precision())?)
    }

    /// Whether χ is trivial on U ∩ w̃I_mw̃^{-1}, by the affine root inequalities.
    pub fn in_wa1(&self, w: &ExtAffWeylElem) -> bool {
        let d = self.h.ch.datum();
        let m = self.h.m as i64;
        let conds = self.chi.conductors();
        (0..d.n_roots()).all(|a| {
            let image = d.weyl_root(w.x, a);
            match d.simples.iter().position(|&s| s == image) {
                Some(i) => {
                    let shift = if d.is_positive(a) { 0 } else { 1 };
                    pairing(&d.roots[image], &w.lambda) >= conds[i] - m - shift
                }
                None => true,
            }
        })
    }

    /// χ(w̃vw̃^{-1}) as an exponent of ζ_p.
    fn conj_exponent(&self, rep: &Mat, rep_inv: &Mat, v: &Mat) -> Result<u32> {
        self.char_exponent(&rep.mul(v).mul(rep_inv))
    }

    /// Generators u_β(c t^k) of (I ∩ w̃^{-1}Uw̃) modulo I_m, with χ(w̃·w̃^{-1}) exponents.
    fn stabilizer_gens(&self, w: &ExtAffWeylElem) -> Result<Vec<(Mat, u32)>> {
        let h = self.h;
        let ch = &h.ch;
        let d = ch.datum();
        let (rep, rep_inv) = h.exact_rep(w)?;
        let mut out = Vec::new();
        for b in 0..d.n_roots() {
            if !d.is_positive(d.weyl_root(w.x, b)) {
                continue;
            }
            let lo = i64::from(!d.is_positive(b));
            for k in lo..lo + h.m as i64 {
                for &c in &ch.field.prime_basis() {
                    let v = ch.u(b, &TruncSeries::monomial(ch.field, c, k, h.precision()));
                    let e = self.conj_exponent(&rep, &rep_inv, &v)?;
                    out.push((v, e));
                }
            }
        }
        Ok(out)
    }

    /// (b0, e) with h_{w̃b} = ζ^e h_{w̃b0} and b0 the least coordinate tuple of the orbit;
    /// None when w ∉ W̃_a¹.
    pub fn normalize(&self, w: &ExtAffWeylElem, b: &IwahoriCoords) -> Result<Option<(IwahoriCoords, u32)>> {
        let key = (w.clone(), b.clone());
        if let Some(hit) = self.normal.lock().expect("normal form cache").get(&key) {
            return Ok(hit.clone());
        }
        if !self.in_wa1(w) {
            self.normal.lock().expect("normal form cache").insert(key, None);
            return Ok(None);
        }
        let gens = self.stabilizer_gens(w)?;
        let mut seen: BTreeMap<IwahoriCoords, u32> = BTreeMap::new();
        seen.insert(b.clone(), 0);
        let mut queue = VecDeque::from([b.clone()]);
        while let Some(y) = queue.pop_front() {
            let ey = seen[&y];
            let ym = self.h.from_coords(&y)?;
            for (v, ev) in &gens {
                let z = self.h.coords(&v.mul(&ym))?;
                let ez = self.add_exp(ey, *ev);
                match seen.get(&z) {
                    Some(&old) if old != ez => {
                        return Err(Error::Invalid(format!("χ is not trivial on a stabilizer for {w}")));
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(z.clone(), ez);
                        queue.push_back(z);
                    }
                }
            }
        }
        let (b0, e0) = seen.iter().next().map(|(k, &e)| (k.clone(), e)).expect("orbit is nonempty");
        let mut cache = self.normal.lock().expect("normal form cache");
        for (y, ey) in &seen {
            cache.insert((w.clone(), y.clone()), Some((b0.clone(), self.sub_exp(e0, *ey))));
        }
        Ok(cache[&key].clone())
    }

    /// The fixed representatives R(w̃) of (I ∩ w̃^{-1}Uw̃)\I/I_m; empty off the support.
    pub fn representatives(&self, w: &ExtAffWeylElem) -> Result<Vec<IwahoriCoords>> {
        let mut out = BTreeSet::new();
        for b in self.h.ch.enumerate_quotient(self.h.m) {
            if let Some((b0, _)) = self.normalize(w, &b)? {
                out.insert(b0);
            } else {
                return Ok(Vec::new());
            }
        }
        Ok(out.into_iter().collect())
    }

    /// h_{w̃b} for any b ∈ I/I_m, in the normalized basis.
    pub fn vector_at(&self, w: &ExtAffWeylElem, b: &IwahoriCoords) -> Result<WhitVector> {
        let mut out = WhitVector::zero();
        if let Some((b0, e)) = self.normalize(w, b)? {
            out.add_term((w.clone(), b0), self.zeta(e));
        }
        Ok(out)
    }

    /// g = u^{-1}·w̃·b with u ∈ U, b ∈ I; returns (w, coords of b, χ(u)).
    pub fn iwasawa(&self, g: &Mat) -> Result<(ExtAffWeylElem, IwahoriCoords, u32)> {
        let n = g.size();
        let f = g.field();
        let mut a = g.clone();
        let mut used = vec![false; n];
        let mut sigma = vec![0; n];
        let mut vals = vec![0; n];
        let mut e = 0;
        for i in (0..n).rev() {
            let j = (0..n)
                .filter(|&j| !used[j] && !a.get(i, j).is_zero_class())
                .min_by_key(|&j| n as i64 * a.get(i, j).min_valuation() + j as i64)
                .ok_or_else(|| Error::InsufficientPrecision("no pivot in the Iwasawa reduction".into()))?;
            let pinv = a.get(i, j).inv()?;
            for r in 0..i {
                if a.get(r, j).is_zero_class() {
                    continue;
                }
                let c = -&(a.get(r, j) * &pinv);
                for l in 0..n {
                    let x = a.get(r, l) + &(&c * a.get(i, l));
                    a.set(r, l, x);
                }
                if let Some(k) = self.simple_pos.iter().position(|&(pr, pc, _)| pr == r && pc == i) {
                    let x = c.scale(f.from_int(self.simple_pos[k].2));
                    e = self.add_exp(e, self.chi.components()[k].exponent(&x)?);
                }
            }
            used[j] = true;
            sigma[i] = j;
            vals[i] = a.get(i, j).min_valuation();
        }
        let w = self.h.cell_of_pattern(&sigma, &vals)?;
        let (_, rep_inv) = self.h.exact_rep(&w)?;
        let b = self.h.coords(&rep_inv.mul(&a)).map_err(|err| match err {
            Error::NotInIwahori => Error::FoldingStuck(format!("Iwasawa remainder for {w} left the Iwahori subgroup")),
            other => other,
        })?;
        Ok((w, b, e))
    }

    /// h_g in the normalized basis.
    pub fn vector_of(&self, g: &Mat) -> Result<WhitVector> {
        let (w, b, e) = self.iwasawa(g)?;
        Ok(self.vector_at(&w, &b)?.scale(&self.zeta(e)))
    }

    /// The group element w̃·b of a basis key.
    pub fn element(&self, key: &BasisKey) -> Result<Mat> {
        let (rep, _) = self.h.exact_rep(&key.0)?;
        Ok(rep.mul(&self.h.from_coords(&key.1)?))
    }

    /// Right factors y with σ(f_letter)h_g = Σ_y h_{gy}.
    fn letter_factors(&self, letter: &Letter) -> Result<Vec<Mat>> {
        let h = self.h;
        let ch = &h.ch;
        Ok(match letter {
            Letter::Iwahori(b) => vec![b.inv()?],
            Letter::Omega(_, r) => vec![r.inv()?],
            Letter::S(k) => {
                let s_inv = h.letter_matrix(letter).inv()?;
                let (root, level) = match ch.aw.s_kind(*k) {
                    SKind::Finite(a) => (a, h.m as i64),
                    SKind::Affine { highest, .. } => (ch.datum().neg(highest), h.m as i64 + 1),
                };
                let pik = h.uniformizer().pow(level)?;
                ch.field
                    .elements()
                    .map(|t| ch.u(root, &pik.scale(t)).mul(&s_inv))
                    .collect()
            }
        })
    }

    /// σ(f_letter) on a vector.
    pub fn act_letter(&self, letter: &Letter, v: &WhitVector) -> Result<WhitVector> {
        let factors = self.letter_factors(letter)?;
        let parts = v
            .terms
            .par_iter()
            .map(|(key, c)| {
                let g = self.element(key)?;
                let mut acc = WhitVector::zero();
                for y in &factors {
                    acc = acc.add(&self.vector_of(&g.mul(y))?);
                }
                Ok(acc.scale(c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.iter().fold(WhitVector::zero(), |acc, x| acc.add(x)))
    }

    /// σ(f) on a vector, through b1, s̃…, ρ̃…, b2 of each label; coefficients of f must be integers.
    pub fn act(&self, f: &HeckeElem, v: &WhitVector) -> Result<WhitVector> {
        let mut out = WhitVector::zero();
        for (label, c) in &f.terms {
            if !c.is_integer() {
                return Err(Error::Invalid(format!("non-integral Hecke coefficient {c}")));
            }
            let c = i64::try_from(c.to_integer()).map_err(|_| Error::Invalid("Hecke coefficient too large".into()))?;
            let mut cur = v.clone();
            for letter in self.h.label_letters(label)?.iter().rev() {
                cur = self.act_letter(letter, &cur)?;
            }
            out = out.add(&cur.scale(&CycInt::from_int(self.p(), c)));
        }
        Ok(out)
    }

    /// χ(w̃_0 u_α(x) w̃_0^{-1}) = χ(u_α(x)) for α ∈ θ, with θ given by indices into Δ.
    pub fn compatible_with(&self, theta: &[usize], w0: usize) -> Result<bool> {
        let h = self.h;
        let ch = &h.ch;
        let d = ch.datum();
        let prec = h.precision();
        let rep = ch.eval(&ch.finite_rep_word(w0, prec), prec)?;
        let rep_inv = rep.inv()?;
        let chars = self.chi.components();
        let window = |c: &AdditiveChar| {
            let a = c.multiplier();
            let top = a.min_valuation() + a.digits().len() as i64 - 1;
            (-1 - top, c.conductor() - 1)
        };
        for &i in theta {
            let alpha = *d.simples.get(i).ok_or_else(|| Error::Invalid(format!("no simple root {i}")))?;
            let image = d.weyl_root(w0, alpha);
            let j = d
                .simples
                .iter()
                .position(|&s| s == image)
                .ok_or_else(|| Error::Invalid("w_0 must carry θ into Δ".into()))?;
            let (lo1, hi1) = window(&chars[i]);
            let (lo2, hi2) = window(&chars[j]);
            for k in lo1.min(lo2)..=hi1.max(hi2) {
                for c in ch.field.elements() {
                    let u = ch.u(alpha, &TruncSeries::monomial(ch.field, c, k, prec));
                    if self.char_exponent(&rep.mul(&u).mul(&rep_inv))? != self.char_exponent(&u)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// κ: E(χ)^m -> E(χ')^m across a transfer whose Λ is known modulo p^{m+1}.
pub struct WhittakerTransfer<'a> {
    pub transfer: &'a Transfer,
    pub source: WhittakerModel<'a>,
    pub target: WhittakerModel<'a>,
}

impl<'a> WhittakerTransfer<'a> {
    pub fn new(transfer: &'a Transfer, chi: GenericCharacter) -> Result<WhittakerTransfer<'a>> {
        let m = transfer.m();
        if transfer.lambda.level() < m + 1 {
            return Err(Error::LevelMismatch(format!(
                "κ needs Λ modulo p^{}, given modulo p^{}",
                m + 1,
                transfer.lambda.level()
            )));
        }
        let moved = chi
            .components()
            .iter()
            .map(|c| char_transfer(c, &transfer.lambda, m))
            .collect::<Result<Vec<_>>>()?;
        let source = WhittakerModel::new(&transfer.source, chi)?;
        let target = WhittakerModel::new(&transfer.target, GenericCharacter::new(moved)?)?;
        Ok(WhittakerTransfer { transfer, source, target })
    }

    /// h_{w̃b} ↦ h'_{w̃'β(b)} for any b, normalized in the target.
    pub fn kappa_at(&self, w: &ExtAffWeylElem, b: &IwahoriCoords) -> Result<WhitVector> {
        self.target.vector_at(w, &self.transfer.beta(b)?)
    }

    pub fn kappa(&self, v: &WhitVector) -> Result<WhitVector> {
        self.map_terms(v, |w, b| self.kappa_at(w, b))
    }

    /// κ^{-1}, through β^{-1} built from Λ^{-1}.
    pub fn kappa_inverse(&self, v: &WhitVector) -> Result<WhitVector> {
        let inv = self.transfer.lambda.inverse();
        self.map_terms(v, |w, b| self.source.vector_at(w, &beta_map(&self.transfer.target.ch, b, &inv)?))
    }

    fn map_terms(&self, v: &WhitVector, f: impl Fn(&ExtAffWeylElem, &IwahoriCoords) -> Result<WhitVector>) -> Result<WhitVector> {
        let mut out = WhitVector::zero();
        for ((w, b), c) in &v.terms {
            let image = f(w, b)?;
            if image.is_zero() {
                return Err(Error::Invalid(format!("κ leaves the support at {w}")));
            }
            out = out.add(&image.scale(c));
        }
        Ok(out)
    }

    /// Basis vectors h_{w̃b}, b ∈ R(w̃), over the cells of length at most max_len in the support.
    pub fn basis(&self, max_len: usize) -> Result<Vec<BasisKey>> {
        let mut out = Vec::new();
        for w in self.transfer.source.ch.aw.ball(max_len, 1) {
            for b in self.source.representatives(&w)? {
                out.push((w.clone(), b));
            }
        }
        Ok(out)
    }

    /// κ∘σ(f) = σ'(ζ(f))∘κ on every generator and basis vector up to max_len, with κ well
    /// defined on all of I/I_m and inverted by κ^{-1}.
    pub fn verify_equivariance(&self, max_len: usize) -> Result<Report> {
        let mut report = Report::default();
        let p = self.source.p();
        let gens = self
            .transfer
            .generators()?
            .into_iter()
            .map(|(name, f)| Ok((name, self.transfer.zeta(&f)?, f)))
            .collect::<Result<Vec<_>>>()?;
        let basis = self.basis(max_len)?;
        let quotient = self.transfer.source.ch.enumerate_quotient(self.transfer.m());
        let results = basis
            .par_iter()
            .map(|key| {
                let (w, b) = key;
                let v = WhitVector::basis(key.clone(), p);
                let kv = self.kappa(&v)?;
                let mut checks = Vec::new();
                checks.push(("kappa-inverse", format!("κ^-1 κ h[{w}, {b:?}]"), self.kappa_inverse(&kv)? == v));
                for (name, zf, f) in &gens {
                    let lhs = self.kappa(&self.source.act(f, &v)?)?;
                    let rhs = self.target.act(zf, &kv)?;
                    checks.push(("whittaker-equivariance", format!("{name} on h[{w}, {b:?}]"), lhs == rhs));
                }
                Ok(checks)
            })
            .collect::<Result<Vec<_>>>()?;
        for (family, instance, holds) in results.into_iter().flatten() {
            report.push(family, instance, holds);
        }
        let mut cells: Vec<ExtAffWeylElem> = basis.iter().map(|(w, _)| w.clone()).collect();
        cells.dedup();
        for w in &cells {
            for b in &quotient {
                let via_normal = self.kappa(&self.source.vector_at(w, b)?)?;
                let direct = self.kappa_at(w, b)?;
                report.push("kappa-well-defined", format!("h[{w}, {b:?}]"), via_normal == direct);
            }
        }
        Ok(report)
    }
}
