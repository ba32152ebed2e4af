//! The Hecke algebra H(G, I_m) of compactly supported I_m-bi-invariant functions,
//! with the Haar measure normalized by vol(I_m) = 1.
//!
//! Basis elements are characteristic functions of double cosets I_m b1 w̃ b2 I_m,
//! named by canonical labels. Products are computed in two independent ways: by
//! folding generator words through the defining relations, and by convolution over
//! explicit left-coset representatives.

pub mod lattice;
mod presentation;


use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::affweyl::{ExtAffWeylElem, SKind};
use crate::chevalley::{working_precision, Atom, Chevalley, GenWord, IwahoriCoords, Mat};
use crate::error::{Error, Result};
use crate::exactalg::{FqElem, Rational, TruncSeries};
use crate::rootdata::{pairing, GroupTag};
use lattice::{filtration_key, iwahori_key, CosetKey};

/// Largest |I/I_m| for which labels are minimized over the full Γ-orbit.
pub const GAMMA_THRESHOLD: u128 = 64;
/// Largest total cell length accepted by the convolution oracle.
pub const DEFAULT_ORACLE_LEN: usize = 4;
/// Extra digits carried when representatives involve inverses of a non-monomial uniformizer.
pub const EXTRA_PRECISION: i64 = 8;

/// Canonical name of a double coset I_m b1 w̃ b2 I_m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    pub w: ExtAffWeylElem,
    pub b1: IwahoriCoords,
    pub b2: IwahoriCoords,
}

impl CosetLabel {
    pub fn level(&self) -> usize {
        self.b1.level()
    }
}

/// A finite rational combination of basis functions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElem {
    pub terms: BTreeMap<CosetLabel, Rational>,
}

impl HeckeElem {
    pub fn zero() -> HeckeElem {
        HeckeElem::default()
    }

    pub fn basis(label: CosetLabel) -> HeckeElem {
        let mut h = HeckeElem::zero();
        h.add_term(label, Rational::one());
        h
    }

    pub fn add_term(&mut self, label: CosetLabel, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(label).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            let key = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &HeckeElem) -> HeckeElem {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &HeckeElem) -> HeckeElem {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> HeckeElem {
        if c.is_zero() {
            return HeckeElem::zero();
        }
        HeckeElem { terms: self.terms.iter().map(|(l, v)| (l.clone(), v * c)).collect() }
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

/// Which normal form names the double cosets of an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Canonicalization {
    /// Minimum of (b1, b2) over the Γ_w̃-orbit.
    GammaOrbit,
    /// Minimum over the left cosets of the double coset, with b1 restricted to a
    /// fixed transversal of I/(I ∩ w̃Iw̃^{-1}).
    Reduction,
}

/// One right factor of a generator word.
#[derive(Clone, Debug)]
pub enum Letter {
    /// An element of I.
    Iwahori(Mat),
    /// The representative s̃ of the k-th element of S.
    S(usize),
    /// A length-zero element with its representative.
    Omega(ExtAffWeylElem, Mat),
}

/// A product of root-group elements with its inverse and parameters.
struct Product {
    mat: Mat,
    inv: Mat,
    params: Vec<(usize, TruncSeries)>,
}

struct Cell {
    len: usize,
    rep: Mat,
    rep_inv: Mat,
    /// Transversal of I/(I ∩ w̃Iw̃^{-1}), indexed by the lattice key of u·w̃·I.
    transversal: Vec<Product>,
    by_key: HashMap<CosetKey, usize>,
    /// x_j ∈ I_m with I_m w̃ I_m = ⊔ x_j w̃ I_m.
    left: Vec<Product>,
    gamma: OnceLock<std::result::Result<Vec<(Mat, Mat)>, Error>>,
}

type LabelKey = (ExtAffWeylElem, IwahoriCoords, IwahoriCoords);

/// H(G, I_m) for one split group, residue field and level.
pub struct HeckeAlgebra {
    pub ch: Chevalley,
    pub m: usize,
    prec: i64,
    pi: TruncSeries,
    exact_pi: bool,
    oracle_len: usize,
    quotient_size: u128,
    s_reps: Vec<Mat>,
    s_invs: Vec<Mat>,
    finite_supports: Vec<Vec<usize>>,
    cells: Mutex<HashMap<ExtAffWeylElem, Arc<Cell>>>,
    labels: Mutex<HashMap<LabelKey, CosetLabel>>,
}

fn pow_q(q: u32, e: usize) -> Rational {
    Rational::from_integer(BigInt::from(q).pow(e as u32))
}

impl HeckeAlgebra {
    pub fn new(tag: GroupTag, q: u32, m: usize) -> Result<HeckeAlgebra> {
        HeckeAlgebra::with_precision(tag, q, m, working_precision(m, 2 * DEFAULT_ORACLE_LEN))
    }

    pub fn with_precision(tag: GroupTag, q: u32, m: usize, prec: i64) -> Result<HeckeAlgebra> {
        let f = Chevalley::new(tag, q)?.field;
        HeckeAlgebra::build(tag, q, m, prec, TruncSeries::t(f, prec))
    }

    /// The algebra with representatives built from the uniformizer unit·t, for a polynomial unit.
    pub fn with_uniformizer(tag: GroupTag, q: u32, m: usize, unit: &TruncSeries) -> Result<HeckeAlgebra> {
        if !unit.is_unit()? {
            return Err(Error::Invalid("uniformizer twist must be a unit".into()));
        }
        let prec = working_precision(m, 2 * DEFAULT_ORACLE_LEN) + EXTRA_PRECISION;
        let pi = unit.relift(prec).shift(1).truncate(prec);
        HeckeAlgebra::build(tag, q, m, prec, pi)
    }

    fn build(tag: GroupTag, q: u32, m: usize, prec: i64, pi: TruncSeries) -> Result<HeckeAlgebra> {
        if m == 0 {
            return Err(Error::Invalid("the level m must be at least 1".into()));
        }
        let ch = Chevalley::new(tag, q)?;
        let exact_pi = pi.digits().iter().skip(1).all(|c| c.is_zero());
        let exactify = |g: Mat| if exact_pi { g.relift(prec) } else { g };
        let mut s_reps = Vec::new();
        let mut s_invs = Vec::new();
        for k in 0..ch.aw.s_set().len() {
            let word = ch.s_rep_word(k, &pi)?;
            s_reps.push(exactify(ch.eval(&word, prec)?));
            s_invs.push(exactify(ch.eval(&ch.inverse_word(&word), prec)?));
        }
        let finite_supports = (0..ch.datum().weyl().len())
            .map(|x| {
                let r = ch.eval(&ch.finite_rep_word(x, prec), prec)?;
                r.monomial_support()
                    .map(|(c, _)| c)
                    .ok_or_else(|| Error::Invalid("finite representative is not monomial".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let quotient_size = ch.iwahori_quotient_size(m);
        Ok(HeckeAlgebra {
            ch,
            m,
            prec,
            pi,
            exact_pi,
            oracle_len: DEFAULT_ORACLE_LEN,
            quotient_size,
            s_reps,
            s_invs,
            finite_supports,
            cells: Mutex::new(HashMap::new()),
            labels: Mutex::new(HashMap::new()),
        })
    }

    /// Treats the known digits of a product of representatives as exact when they are monomial.
    fn exactify(&self, g: Mat) -> Mat {
        if self.exact_pi {
            g.relift(self.prec)
        } else {
            g
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.ch.tag()
    }

    pub fn q(&self) -> u32 {
        self.ch.q()
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn uniformizer(&self) -> &TruncSeries {
        &self.pi
    }

    pub fn quotient_size(&self) -> u128 {
        self.quotient_size
    }

    pub fn set_oracle_len(&mut self, len: usize) {
        self.oracle_len = len;
    }

    pub fn canonicalization(&self) -> Canonicalization {
        if self.quotient_size <= GAMMA_THRESHOLD {
            Canonicalization::GammaOrbit
        } else {
            Canonicalization::Reduction
        }
    }

    pub fn length(&self, w: &ExtAffWeylElem) -> usize {
        self.ch.aw.length(w)
    }

    // ---------- affine root bounds ----------

    fn k_iwahori(&self, b: usize) -> i64 {
        i64::from(!self.ch.datum().is_positive(b))
    }

    fn k_filtration(&self, b: usize) -> i64 {
        self.m as i64 + self.k_iwahori(b)
    }

    fn pulled(&self, w: &ExtAffWeylElem, b: usize) -> usize {
        let d = self.ch.datum();
        d.weyl_root(d.weyl().inv(w.x), b)
    }

    /// Least k with w̃^{-1} u_β(t^k) w̃ ∈ I.
    fn iwahori_bound(&self, w: &ExtAffWeylElem, b: usize) -> i64 {
        self.k_iwahori(self.pulled(w, b)) + pairing(&self.ch.datum().roots[b], &w.lambda)
    }

    /// Least k with w̃^{-1} u_β(t^k) w̃ ∈ I_m.
    fn filtration_bound(&self, w: &ExtAffWeylElem, b: usize) -> i64 {
        self.k_filtration(self.pulled(w, b)) + pairing(&self.ch.datum().roots[b], &w.lambda)
    }

    /// Least k with w̃ u_β(t^k) w̃^{-1} ∈ I_m.
    fn filtration_bound_inv(&self, w: &ExtAffWeylElem, b: usize) -> i64 {
        let d = self.ch.datum();
        let pushed = d.weyl_root(w.x, b);
        self.k_filtration(pushed) - pairing(&d.roots[pushed], &w.lambda)
    }

    fn slots(&self, lo: impl Fn(usize) -> i64, hi: impl Fn(usize) -> i64) -> Vec<(usize, i64)> {
        (0..self.ch.datum().n_roots()).flat_map(|b| (lo(b)..hi(b)).map(move |k| (b, k))).collect()
    }

    /// All products ∏_β u_β(Σ c_k t^k) over F_q-digits on the given slots, roots in index order.
    fn products(&self, slots: &[(usize, i64)]) -> Vec<Product> {
        let f = self.ch.field;
        let elems: Vec<FqElem> = f.elements().collect();
        let q = elems.len();
        let total = q.pow(slots.len() as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut digits = vec![FqElem::ZERO; slots.len()];
            for d in digits.iter_mut().rev() {
                *d = elems[rest % q];
                rest /= q;
            }
            let mut params: Vec<(usize, TruncSeries)> = Vec::new();
            for (&(b, k), &c) in slots.iter().zip(&digits) {
                let term = TruncSeries::monomial(f, c, k, self.prec);
                match params.last_mut() {
                    Some((r, s)) if *r == b => *s = &*s + &term,
                    _ => params.push((b, term)),
                }
            }
            let mut mat = self.ch.identity(self.prec);
            let mut inv = self.ch.identity(self.prec);
            for (b, s) in &params {
                mat = mat.mul(&self.ch.u(*b, s));
            }
            for (b, s) in params.iter().rev() {
                inv = inv.mul(&self.ch.u(*b, &-s));
            }
            out.push(Product { mat, inv, params });
        }
        out
    }

    /// Representative w̃ and its inverse, with exact monomial entries.
    pub fn exact_rep(&self, w: &ExtAffWeylElem) -> Result<(Mat, Mat)> {
        let rep = self.exactify(self.ch.rep(w, &self.pi)?);
        let inv = self.exactify(self.ch.rep_inv(w, &self.pi)?);
        if rep.monomial_support().is_none() {
            return Err(Error::Invalid(format!("representative of {w} is not monomial")));
        }
        Ok((rep, inv))
    }

    fn cell(&self, w: &ExtAffWeylElem) -> Result<Arc<Cell>> {
        if let Some(c) = self.cells.lock().expect("cell cache").get(w) {
            return Ok(c.clone());
        }
        let len = self.length(w);
        let (rep, rep_inv) = self.exact_rep(w)?;
        let tslots = self.slots(|b| self.k_iwahori(b), |b| self.iwahori_bound(w, b));
        let lslots = self.slots(|b| self.k_filtration(b), |b| self.filtration_bound(w, b));
        if tslots.len() != len || lslots.len() != len {
            return Err(Error::Invalid(format!("affine root count disagrees with the length of {w}")));
        }
        let transversal = self.products(&tslots);
        let mut by_key = HashMap::with_capacity(transversal.len());
        for (i, u) in transversal.iter().enumerate() {
            if by_key.insert(iwahori_key(&u.mat.mul(&rep))?, i).is_some() {
                return Err(Error::Invalid(format!("root-group transversal for {w} is not injective")));
            }
        }
        let left = self.products(&lslots);
        let cell = Arc::new(Cell { len, rep, rep_inv, transversal, by_key, left, gamma: OnceLock::new() });
        self.cells.lock().expect("cell cache").insert(w.clone(), cell.clone());
        Ok(cell)
    }

    pub fn coords(&self, b: &Mat) -> Result<IwahoriCoords> {
        self.ch.iwahori_coords(b, self.m)
    }

    /// A matrix of I with the given coordinates.
    pub fn from_coords(&self, c: &IwahoriCoords) -> Result<Mat> {
        self.ch.from_coords(c, self.prec)
    }

    /// Writes g ∈ I w̃ I as u·w̃·b with u in the fixed transversal and b ∈ I.
    fn split(&self, cell: &Cell, g: &Mat) -> Result<(Mat, Mat)> {
        let key = iwahori_key(g)?;
        let i = *cell
            .by_key
            .get(&key)
            .ok_or_else(|| Error::FoldingStuck("element is not in the expected Iwahori double coset".into()))?;
        let u = &cell.transversal[i];
        Ok((u.mat.clone(), cell.rep_inv.mul(&u.inv).mul(g)))
    }

    // ---------- Γ_w̃ ----------

    fn gamma_generators(&self, w: &ExtAffWeylElem, cell: &Cell) -> Result<Vec<(Mat, Mat)>> {
        let ch = &self.ch;
        let f = ch.field;
        let conj = |ginv: &Mat| cell.rep_inv.mul(ginv).mul(&cell.rep);
        let mut gens = Vec::new();
        for b in 0..ch.datum().n_roots() {
            let lo = self.k_iwahori(b).max(self.iwahori_bound(w, b));
            let hi = self.k_filtration(b).max(self.filtration_bound(w, b));
            for k in lo..hi {
                for &c in &f.prime_basis() {
                    let x = TruncSeries::monomial(f, c, k, self.prec);
                    let g = ch.u(b, &x);
                    let gd = self.exactify(conj(&ch.u(b, &-&x)));
                    gens.push((g, gd));
                }
            }
        }
        let rank = ch.datum().rank;
        let one = ch.one(self.prec);
        let mut units = vec![TruncSeries::constant(f, f.generator(), self.prec)];
        for k in 1..self.m as i64 {
            for &c in &f.prime_basis() {
                units.push(&one + &TruncSeries::monomial(f, c, k, self.prec));
            }
        }
        for i in 0..rank {
            for x in &units {
                let mut coords = vec![one.clone(); rank];
                coords[i] = x.clone();
                let g = ch.torus(&coords)?;
                coords[i] = x.inv()?;
                let gd = conj(&ch.torus(&coords)?);
                gens.push((g, gd));
            }
        }
        Ok(gens)
    }

    fn build_gamma(&self, w: &ExtAffWeylElem, cell: &Cell) -> Result<Vec<(Mat, Mat)>> {
        let gens = self.gamma_generators(w, cell)?;
        let id = self.ch.identity(self.prec);
        let key0 = (self.coords(&id)?, self.coords(&id)?);
        let mut seen: HashSet<(IwahoriCoords, IwahoriCoords)> = HashSet::from([key0]);
        let mut out = vec![(id.clone(), id.clone())];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (c, d) = out[i].clone();
            for (g, gd) in &gens {
                let c2 = c.mul(g);
                let d2 = gd.mul(&d);
                if seen.insert((self.coords(&c2)?, self.coords(&d2)?)) {
                    out.push((c2, d2));
                    queue.push_back(out.len() - 1);
                }
            }
        }
        Ok(out)
    }

    fn gamma_of<'a>(&self, w: &ExtAffWeylElem, cell: &'a Cell) -> Result<&'a Vec<(Mat, Mat)>> {
        cell.gamma.get_or_init(|| self.build_gamma(w, cell)).as_ref().map_err(|e| e.clone())
    }

    /// Γ_w̃ as coordinate pairs (c, w̃^{-1} c^{-1} w̃).
    pub fn gamma_coords(&self, w: &ExtAffWeylElem) -> Result<BTreeSet<(IwahoriCoords, IwahoriCoords)>> {
        let cell = self.cell(w)?;
        self.gamma_of(w, &cell)?.iter().map(|(c, d)| Ok((self.coords(c)?, self.coords(d)?))).collect()
    }

    /// |Γ_w̃| = |(I ∩ w̃Iw̃^{-1})/(I_m ∩ w̃I_mw̃^{-1})|, by closure under generators.
    pub fn gamma_size(&self, w: &ExtAffWeylElem) -> Result<usize> {
        let cell = self.cell(w)?;
        Ok(self.gamma_of(w, &cell)?.len())
    }

    // ---------- canonical labels ----------

    /// The canonical pair naming I_m b1 w̃ b2 I_m under the chosen normal form.
    pub fn canonical_pair(
        &self,
        w: &ExtAffWeylElem,
        b1: &Mat,
        b2: &Mat,
        how: Canonicalization,
    ) -> Result<(IwahoriCoords, IwahoriCoords)> {
        let cell = self.cell(w)?;
        let b1 = self.from_coords(&self.coords(b1)?)?;
        let b2 = self.from_coords(&self.coords(b2)?)?;
        let mut best: Option<(IwahoriCoords, IwahoriCoords)> = None;
        let mut offer = |k: (IwahoriCoords, IwahoriCoords)| {
            if best.as_ref().is_none_or(|b| k < *b) {
                best = Some(k);
            }
        };
        match how {
            Canonicalization::GammaOrbit => {
                for (c, d) in self.gamma_of(w, &cell)? {
                    offer((self.coords(&b1.mul(c))?, self.coords(&d.mul(&b2))?));
                }
            }
            Canonicalization::Reduction => {
                for x in &cell.left {
                    let y = b1.mul(&x.mat);
                    let (u, b) = self.split(&cell, &y.mul(&cell.rep))?;
                    offer((self.coords(&u)?, self.coords(&b.mul(&b2))?));
                }
            }
        }
        best.ok_or_else(|| Error::Invalid("empty orbit".into()))
    }

    /// Canonical label of I_m b1 w̃ b2 I_m for b1, b2 ∈ I.
    pub fn canonical(&self, w: &ExtAffWeylElem, b1: &Mat, b2: &Mat) -> Result<CosetLabel> {
        let key = (w.clone(), self.coords(b1)?, self.coords(b2)?);
        if let Some(l) = self.labels.lock().expect("label cache").get(&key) {
            return Ok(l.clone());
        }
        let (c1, c2) = self.canonical_pair(w, b1, b2, self.canonicalization())?;
        let label = CosetLabel { w: w.clone(), b1: c1, b2: c2 };
        self.labels.lock().expect("label cache").insert(key, label.clone());
        Ok(label)
    }

    /// Canonical label of I_m g I_m for g known to lie in I w̃ I.
    pub fn label_of_element(&self, g: &Mat, w: &ExtAffWeylElem) -> Result<CosetLabel> {
        let cell = self.cell(w)?;
        let (u, b) = self.split(&cell, g)?;
        self.canonical(w, &u, &b)
    }

    /// A matrix b1·w̃·b2 in the labelled double coset.
    pub fn label_matrix(&self, label: &CosetLabel) -> Result<Mat> {
        let cell = self.cell(&label.w)?;
        Ok(self.from_coords(&label.b1)?.mul(&cell.rep).mul(&self.from_coords(&label.b2)?))
    }

    pub fn identity_label(&self) -> Result<CosetLabel> {
        let id = self.ch.identity(self.prec);
        self.canonical(&self.ch.aw.identity(), &id, &id)
    }

    pub fn one(&self) -> Result<HeckeElem> {
        Ok(HeckeElem::basis(self.identity_label()?))
    }

    /// f_b for b ∈ I.
    pub fn f_iwahori(&self, b: &Mat) -> Result<HeckeElem> {
        let id = self.ch.identity(self.prec);
        Ok(HeckeElem::basis(self.canonical(&self.ch.aw.identity(), &id, b)?))
    }

    /// f_{w̃} for the fixed representative of w.
    pub fn f_rep(&self, w: &ExtAffWeylElem) -> Result<HeckeElem> {
        let id = self.ch.identity(self.prec);
        Ok(HeckeElem::basis(self.canonical(w, &id, &id)?))
    }

    /// f_g for g ∈ I w̃ I.
    pub fn f_element(&self, g: &Mat, w: &ExtAffWeylElem) -> Result<HeckeElem> {
        Ok(HeckeElem::basis(self.label_of_element(g, w)?))
    }

    /// vol(I_m w̃ I_m) = q^{l(w)}.
    pub fn volume(&self, label: &CosetLabel) -> u128 {
        u128::from(self.q()).pow(self.length(&label.w) as u32)
    }

    /// All labels of double cosets inside I w̃ I.
    pub fn cell_labels(&self, w: &ExtAffWeylElem) -> Result<Vec<CosetLabel>> {
        self.sample_cell_labels(w, 0)
    }

    /// Labels of u·w̃·b for `count` evenly spaced pairs (u, b) of transversal and I/I_m
    /// elements, deduplicated; `count = 0` takes every pair.
    pub fn sample_cell_labels(&self, w: &ExtAffWeylElem, count: usize) -> Result<Vec<CosetLabel>> {
        let cell = self.cell(w)?;
        let quotient = self.ch.enumerate_quotient(self.m);
        let total = cell.transversal.len() * quotient.len();
        let picks: Vec<usize> = if count == 0 || count >= total {
            (0..total).collect()
        } else {
            (0..count).map(|k| k * total / count).collect()
        };
        let mut out = BTreeSet::new();
        for idx in picks {
            let (i, j) = (idx / quotient.len(), idx % quotient.len());
            let b = self.from_coords(&quotient[j])?;
            out.insert(self.canonical(w, &cell.transversal[i].mat, &b)?);
        }
        Ok(out.into_iter().collect())
    }

    // ---------- words ----------

    /// Right factors s̃_{i_1}, …, ρ̃^{±1}, … whose product is w̃.
    pub fn letters_of(&self, w: &ExtAffWeylElem) -> Result<Vec<Letter>> {
        let aw = &self.ch.aw;
        let word = aw.decompose(w);
        let mut out: Vec<Letter> = word.letters.iter().map(|&k| Letter::S(k)).collect();
        let om = aw.omega();
        let gens = om.free_gens.iter().zip(&word.free).chain(om.torsion_gens.iter().zip(&word.torsion));
        for (g, &e) in gens {
            let base = self.ch.omega_rep_word(g, &self.pi);
            let (rho, word) = if e < 0 { (aw.inv(g), self.ch.inverse_word(&base)) } else { (g.clone(), base) };
            let mat = self.exactify(self.ch.eval(&word, self.prec)?);
            for _ in 0..e.unsigned_abs() {
                out.push(Letter::Omega(rho.clone(), mat.clone()));
            }
        }
        Ok(out)
    }

    pub fn letter_matrix(&self, l: &Letter) -> Mat {
        match l {
            Letter::Iwahori(b) => b.clone(),
            Letter::S(k) => self.s_reps[*k].clone(),
            Letter::Omega(_, r) => r.clone(),
        }
    }

    /// Generator word of a coordinate tuple: upper root factors, torus, lower root factors.
    pub fn coords_word(&self, c: &IwahoriCoords) -> GenWord {
        let d = self.ch.datum();
        let f = self.ch.coords_factor(c, self.prec);
        let mut atoms = Vec::new();
        for (a, x) in f.upper.into_iter().enumerate() {
            if !x.is_zero_class() {
                atoms.push(Atom::U { root: a, c: x });
            }
        }
        atoms.push(Atom::Torus(f.torus));
        for (a, y) in f.lower.into_iter().enumerate() {
            if !y.is_zero_class() {
                atoms.push(Atom::U { root: d.neg(a), c: y });
            }
        }
        GenWord(atoms)
    }

    fn params_word(params: &[(usize, TruncSeries)]) -> GenWord {
        GenWord(params.iter().filter(|(_, c)| !c.is_zero_class()).map(|(b, c)| Atom::U { root: *b, c: c.clone() }).collect())
    }

    /// Words x_j with I_m b1 w̃ b2 I_m = ⊔ x_j I_m.
    pub fn left_cosets(&self, label: &CosetLabel) -> Result<Vec<GenWord>> {
        let cell = self.cell(&label.w)?;
        let rep = self.ch.rep_of(&label.w, &self.pi)?;
        Ok(cell
            .left
            .iter()
            .map(|x| {
                self.coords_word(&label.b1)
                    .then(Self::params_word(&x.params))
                    .then(rep.clone())
                    .then(self.coords_word(&label.b2))
            })
            .collect())
    }

    /// Words y_j with I_m b1 w̃ b2 I_m = ⊔ I_m y_j.
    pub fn right_cosets(&self, label: &CosetLabel) -> Result<Vec<GenWord>> {
        let w = &label.w;
        let slots = self.slots(|b| self.k_filtration(b), |b| self.filtration_bound_inv(w, b));
        let rep = self.ch.rep_of(w, &self.pi)?;
        Ok(self
            .products(&slots)
            .iter()
            .map(|y| {
                self.coords_word(&label.b1)
                    .then(rep.clone())
                    .then(Self::params_word(&y.params))
                    .then(self.coords_word(&label.b2))
            })
            .collect())
    }

    fn left_coset_mats(&self, label: &CosetLabel) -> Result<Vec<Mat>> {
        let cell = self.cell(&label.w)?;
        let b1 = self.from_coords(&label.b1)?;
        let wb2 = cell.rep.mul(&self.from_coords(&label.b2)?);
        Ok(cell.left.iter().map(|x| b1.mul(&x.mat).mul(&wb2)).collect())
    }

    // ---------- folding of group elements ----------

    fn in_iwahori(&self, g: &Mat) -> Result<bool> {
        match self.ch.iwahori_factor(g) {
            Ok(_) => Ok(true),
            Err(Error::NotInIwahori) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Letters for a monomial matrix: a torus element of I followed by the letters of its cell.
    fn monomial_letters(&self, g: &Mat) -> Result<Option<Vec<Letter>>> {
        let Some((cols, vals)) = g.monomial_support() else {
            return Ok(None);
        };
        let Some(x) = self.finite_supports.iter().position(|s| *s == cols) else {
            return Ok(None);
        };
        let w = ExtAffWeylElem { lambda: self.ch.cochar_from_valuations(&vals), x };
        let (_, rep_inv) = self.exact_rep(&w)?;
        let tau = g.mul(&rep_inv);
        if !self.in_iwahori(&tau)? {
            return Err(Error::FoldingStuck("monomial matrix is not a torus multiple of a representative".into()));
        }
        let mut out = vec![Letter::Iwahori(tau)];
        out.extend(self.letters_of(&w)?);
        Ok(Some(out))
    }

    /// Rewrites one atom as letters.
    pub fn atom_letters(&self, atom: &Atom) -> Result<Vec<Letter>> {
        let g = self.ch.eval_atom(atom, self.prec)?;
        if self.in_iwahori(&g)? {
            return Ok(vec![Letter::Iwahori(g)]);
        }
        if let Some(ls) = self.monomial_letters(&g)? {
            return Ok(ls);
        }
        if let Atom::U { root, c } = atom {
            // u_β(d) = u_{-β}(d^{-1}) w_{-β}(-d^{-1}) u_{-β}(d^{-1}) with the outer factors in I
            let neg = self.ch.datum().neg(*root);
            let di = c.inv()?;
            let outer = self.ch.u(neg, &di);
            if !self.in_iwahori(&outer)? {
                return Err(Error::FoldingStuck("root element outside the supported generators".into()));
            }
            let mid = self.ch.w(neg, &-&di)?;
            let mut out = vec![Letter::Iwahori(outer.clone())];
            out.extend(
                self.monomial_letters(&mid)?
                    .ok_or_else(|| Error::FoldingStuck("Weyl element is not monomial".into()))?,
            );
            out.push(Letter::Iwahori(outer));
            return Ok(out);
        }
        Err(Error::FoldingStuck("atom is neither in I nor monomial".into()))
    }

    /// The F_q-digit that decides whether b·s̃ stays in the same Iwahori coset family.
    fn descent_digit(&self, b: &IwahoriCoords, s: usize) -> FqElem {
        match self.ch.aw.s_kind(s) {
            SKind::Finite(a) => b.upper[a][0],
            SKind::Affine { highest, .. } => b.lower[highest][0],
        }
    }

    /// Multiplies g ∈ I w̃ I on the right by one letter, tracking the Iwahori cell.
    pub fn fold_element_step(&self, w: &ExtAffWeylElem, g: &Mat, letter: &Letter) -> Result<(ExtAffWeylElem, Mat)> {
        let aw = &self.ch.aw;
        Ok(match letter {
            Letter::Iwahori(b) => (w.clone(), g.mul(b)),
            Letter::Omega(rho, r) => (aw.mul(w, rho), g.mul(r)),
            Letter::S(k) => {
                let ws = aw.mul(w, &aw.s_set()[*k]);
                let gs = g.mul(&self.s_reps[*k]);
                if self.length(&ws) > self.length(w) {
                    (ws, gs)
                } else {
                    let cell = self.cell(w)?;
                    let (_, b) = self.split(&cell, g)?;
                    let a = self.descent_digit(&self.coords(&b)?, *k);
                    (if a.is_zero() { ws } else { w.clone() }, gs)
                }
            }
        })
    }

    /// Cell and value of a product of letters.
    pub fn fold_letters(&self, letters: &[Letter]) -> Result<(ExtAffWeylElem, Mat)> {
        let mut w = self.ch.aw.identity();
        let mut g = self.ch.identity(self.prec);
        for l in letters {
            (w, g) = self.fold_element_step(&w, &g, l)?;
        }
        Ok((w, g))
    }

    pub fn word_letters(&self, word: &GenWord) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for a in &word.0 {
            out.extend(self.atom_letters(a)?);
        }
        Ok(out)
    }

    /// Canonical label of I_m g I_m for the value g of a generator word.
    pub fn label_of_word(&self, word: &GenWord) -> Result<CosetLabel> {
        let (w, g) = self.fold_letters(&self.word_letters(word)?)?;
        self.label_of_element(&g, &w)
    }

    // ---------- presentation-based multiplication ----------

    /// f_L * f_letter, expanded through the relations of the presentation.
    pub fn right_mul_letter(&self, label: &CosetLabel, letter: &Letter) -> Result<HeckeElem> {
        let aw = &self.ch.aw;
        let w = &label.w;
        let cell = self.cell(w)?;
        let b1 = self.from_coords(&label.b1)?;
        let b2 = self.from_coords(&label.b2)?;
        let mut out = HeckeElem::zero();
        match letter {
            Letter::Iwahori(b) => out.add_term(self.canonical(w, &b1, &b2.mul(b))?, Rational::one()),
            Letter::Omega(rho, r) => {
                let g = b1.mul(&cell.rep).mul(&b2).mul(r);
                out.add_term(self.label_of_element(&g, &aw.mul(w, rho))?, Rational::one());
            }
            Letter::S(k) => {
                let k = *k;
                let s = &self.s_reps[k];
                let ws = aw.mul(w, &aw.s_set()[k]);
                let g = b1.mul(&cell.rep).mul(&b2);
                let q = pow_q(self.q(), 1);
                if self.length(&ws) > cell.len {
                    // volumes multiply
                    out.add_term(self.label_of_element(&g.mul(s), &ws)?, Rational::one());
                } else if !self.descent_digit(&label.b2, k).is_zero() {
                    // f_s * f_{u(a)} * f_s = q f_{s̃ u(a) s̃} for a unit a
                    out.add_term(self.label_of_element(&g.mul(s), w)?, q);
                } else {
                    // f_s * f_s = q Σ_x f_{x s̃²}, x over Ad s̃(I_m)·I_m/I_m
                    let f = self.ch.field;
                    let head = b1.mul(&cell.rep).mul(&self.s_invs[k]);
                    let tail = s.mul(&b2).mul(s);
                    for c in f.elements() {
                        let x = match aw.s_kind(k) {
                            SKind::Finite(a) => {
                                self.ch.u(self.ch.datum().neg(a), &TruncSeries::monomial(f, c, self.m as i64, self.prec))
                            }
                            SKind::Affine { highest, .. } => {
                                self.ch.u(highest, &TruncSeries::monomial(f, c, self.m as i64 - 1, self.prec))
                            }
                        };
                        out.add_term(self.label_of_element(&head.mul(&x).mul(&tail), &ws)?, q.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    fn fold(&self, h: &HeckeElem, letters: &[Letter]) -> Result<HeckeElem> {
        let mut cur = h.clone();
        for l in letters {
            let mut next = HeckeElem::zero();
            for (label, c) in &cur.terms {
                next = next.add(&self.right_mul_letter(label, l)?.scale(c));
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Letters b1, s̃…, ρ̃…, b2 of a label.
    pub fn label_letters(&self, label: &CosetLabel) -> Result<Vec<Letter>> {
        let mut out = vec![Letter::Iwahori(self.from_coords(&label.b1)?)];
        out.extend(self.letters_of(&label.w)?);
        out.push(Letter::Iwahori(self.from_coords(&label.b2)?));
        Ok(out)
    }

    /// Product in H(G, I_m) through the presentation.
    pub fn hecke_mul(&self, h1: &HeckeElem, h2: &HeckeElem) -> Result<HeckeElem> {
        let mut acc = HeckeElem::zero();
        for (label, c) in &h2.terms {
            acc = acc.add(&self.fold(h1, &self.label_letters(label)?)?.scale(c));
        }
        Ok(acc)
    }

    // ---------- convolution oracle ----------

    /// Iwahori cell of a matrix in GL_n or SL_2 by valuation pivoting.
    pub fn classify(&self, g: &Mat) -> Result<ExtAffWeylElem> {
        if !matches!(self.tag(), GroupTag::SL2 | GroupTag::GL(_)) {
            return Err(Error::UnsupportedCell(format!("matrix classification for {}", self.tag())));
        }
        let n = g.size();
        let mut a = g.clone();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut sigma = vec![0; n];
        let mut vals = vec![0; n];
        let weight = |x: &TruncSeries, i: usize, j: usize| n as i64 * x.min_valuation() + j as i64 - i as i64;
        while !rows.is_empty() {
            let (i, j) = rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                .filter(|&(i, j)| !a.get(i, j).is_zero_class())
                .min_by_key(|&(i, j)| (weight(a.get(i, j), i, j), i, j))
                .ok_or_else(|| Error::InsufficientPrecision("no pivot in affine Bruhat reduction".into()))?;
            let pinv = a.get(i, j).inv()?;
            for &k in &rows {
                if k == i || a.get(k, j).is_zero_class() {
                    continue;
                }
                let factor = a.get(k, j) * &pinv;
                for &l in &cols {
                    let x = a.get(k, l) - &(&factor * a.get(i, l));
                    a.set(k, l, x);
                }
            }
            sigma[i] = j;
            vals[i] = a.get(i, j).min_valuation();
            rows.retain(|&r| r != i);
            cols.retain(|&c| c != j);
        }
        self.cell_of_pattern(&sigma, &vals)
    }

    /// The element whose representative has row i supported in column sigma[i] with valuation vals[i].
    pub fn cell_of_pattern(&self, sigma: &[usize], vals: &[i64]) -> Result<ExtAffWeylElem> {
        let x = self
            .finite_supports
            .iter()
            .position(|s| s == sigma)
            .ok_or_else(|| Error::Invalid("pivot pattern is not a Weyl group element".into()))?;
        Ok(ExtAffWeylElem { lambda: self.ch.cochar_from_valuations(vals), x })
    }

    /// f_{L1} * f_{L2} by counting products of left-coset representatives.
    pub fn oracle_basis(&self, l1: &CosetLabel, l2: &CosetLabel) -> Result<HeckeElem> {
        let (n1, n2) = (self.length(&l1.w), self.length(&l2.w));
        if n1 + n2 > self.oracle_len {
            return Err(Error::UnsupportedCell(format!(
                "oracle products are limited to total length {}",
                self.oracle_len
            )));
        }
        let mut counts: BTreeMap<CosetLabel, u64> = BTreeMap::new();
        if matches!(self.tag(), GroupTag::SL2 | GroupTag::GL(_)) {
            let right = self.left_coset_mats(l2)?;
            for a in self.left_coset_mats(l1)? {
                for b in &right {
                    let g = a.mul(b);
                    let w = self.classify(&g)?;
                    *counts.entry(self.label_of_element(&g, &w)?).or_insert(0) += 1;
                }
            }
        } else {
            let (c1, c2) = (self.cell(&l1.w)?, self.cell(&l2.w)?);
            let (b11, b12) = (self.from_coords(&l1.b1)?, self.from_coords(&l1.b2)?);
            let (b21, b22) = (self.from_coords(&l2.b1)?, self.from_coords(&l2.b2)?);
            let (w1, w2) = (self.letters_of(&l1.w)?, self.letters_of(&l2.w)?);
            for x in &c1.left {
                for y in &c2.left {
                    let mut letters = vec![Letter::Iwahori(b11.mul(&x.mat))];
                    letters.extend(w1.iter().cloned());
                    letters.push(Letter::Iwahori(b12.mul(&b21).mul(&y.mat)));
                    letters.extend(w2.iter().cloned());
                    letters.push(Letter::Iwahori(b22.clone()));
                    let (w, g) = self.fold_letters(&letters)?;
                    *counts.entry(self.label_of_element(&g, &w)?).or_insert(0) += 1;
                }
            }
        }
        let mut out = HeckeElem::zero();
        for (label, n) in counts {
            let vol = pow_q(self.q(), self.length(&label.w));
            out.add_term(label, Rational::from_integer(BigInt::from(n)) / vol);
        }
        Ok(out)
    }

    /// Product in H(G, I_m) by convolution over explicit left cosets.
    pub fn hecke_mul_oracle(&self, h1: &HeckeElem, h2: &HeckeElem) -> Result<HeckeElem> {
        let mut acc = HeckeElem::zero();
        for (l1, c1) in &h1.terms {
            for (l2, c2) in &h2.terms {
                acc = acc.add(&self.oracle_basis(l1, l2)?.scale(&(c1 * c2)));
            }
        }
        Ok(acc)
    }

    /// |I_m/(I_m ∩ w̃I_mw̃^{-1})| as the size of the orbit of w̃I_m under generators of I_m.
    pub fn counted_index(&self, w: &ExtAffWeylElem) -> Result<usize> {
        let ch = &self.ch;
        let f = ch.field;
        let (rep, _) = self.exact_rep(w)?;
        let d = ch.datum();
        let spread = (0..d.n_roots()).map(|b| pairing(&d.roots[b], &w.lambda).abs()).max().unwrap_or(0);
        let mut gens = Vec::new();
        for b in 0..d.n_roots() {
            let lo = self.k_filtration(b);
            for k in lo..lo + spread + 2 {
                for &c in &f.prime_basis() {
                    gens.push(ch.u(b, &TruncSeries::monomial(f, c, k, self.prec)));
                }
            }
        }
        let one = ch.one(self.prec);
        for i in 0..d.rank {
            for &c in &f.prime_basis() {
                let mut coords = vec![one.clone(); d.rank];
                coords[i] = &one + &TruncSeries::monomial(f, c, self.m as i64, self.prec);
                gens.push(ch.torus(&coords)?);
            }
        }
        let mut seen: HashSet<CosetKey> = HashSet::from([filtration_key(&rep, self.m)?]);
        let mut queue = VecDeque::from([rep]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = g.mul(&x);
                if seen.insert(filtration_key(&y, self.m)?) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen.len())
    }

    // ---------- the K_m subalgebra ----------

    /// e_{K_m} = vol(K_m)^{-1} char(K_m), a sum over K_m/I_m.
    pub fn km_idempotent(&self) -> Result<HeckeElem> {
        let d = self.ch.datum();
        let slots: Vec<(usize, i64)> = (0..d.n_pos).map(|a| (d.neg(a), self.m as i64)).collect();
        let weight = Rational::one() / pow_q(self.q(), d.n_pos);
        let mut out = HeckeElem::zero();
        for p in self.products(&slots) {
            out = out.add(&self.f_iwahori(&p.mat)?.scale(&weight));
        }
        Ok(out)
    }

    /// t_x = vol(K_m)^{-1} char(K_m x K_m) for x = a_i π_λ a_j^{-1}, with λ antidominant.
    pub fn km_basis(&self, lambda: &[i64], a_i: &GenWord, a_j: &GenWord) -> Result<HeckeElem> {
        let d = self.ch.datum();
        if (0..d.n_pos).any(|a| pairing(&d.roots[a], lambda) > 0) {
            return Err(Error::NotAntiDominant);
        }
        let word = a_i
            .clone()
            .then(GenWord(vec![Atom::Pi { lambda: lambda.to_vec(), pi: self.pi.clone() }]))
            .then(self.ch.inverse_word(a_j));
        self.km_element(&self.label_of_word(&word)?)
    }

    /// vol(K_m)^{-1} char(K_m g K_m) for g in the labelled double coset.
    pub fn km_element(&self, label: &CosetLabel) -> Result<HeckeElem> {
        let n_pos = self.ch.datum().n_pos;
        let e = self.km_idempotent()?;
        let r = self.hecke_mul(&self.hecke_mul(&e, &HeckeElem::basis(label.clone()))?, &e)?;
        let c = r.terms.values().next().cloned().ok_or_else(|| Error::Invalid("e f e vanished".into()))?;
        if r.terms.values().any(|v| *v != c) {
            return Err(Error::Invalid("e f e is not constant on its support".into()));
        }
        Ok(r.scale(&(Rational::one() / (c * pow_q(self.q(), n_pos)))))
    }

    /// Whether e_{K_m} h e_{K_m} = h.
    pub fn is_km_invariant(&self, h: &HeckeElem) -> Result<bool> {
        let e = self.km_idempotent()?;
        Ok(self.hecke_mul(&self.hecke_mul(&e, h)?, &e)? == *h)
    }
}
