//! Transfer of H(G, I_m) across two presentations of the same truncated data.

mod character;
mod ring;

pub use character::{char_transfer, residue_exponent, AdditiveChar};
pub use ring::{eisenstein_transfer, make_field_model, EisensteinPoly, RingIso, TruncDVR};

use std::collections::BTreeSet;

use crate::chevalley::{Atom, Chevalley, GenWord, IwahoriCoords, IwahoriFactor, Mat};
use crate::error::{Error, Result};
use crate::exactalg::{Rational, TruncSeries};
use crate::hecke::{CosetLabel, HeckeAlgebra, HeckeElem};
use crate::report::Report;
use crate::rootdata::GroupTag;

/// β on coordinates of I/I_m: Λ on upper and torus digits, π y ↦ π' Λ(y) on lower ones.
pub fn beta_map(ch: &Chevalley, c: &IwahoriCoords, lambda: &RingIso) -> Result<IwahoriCoords> {
    let m = c.level();
    if m > lambda.level() {
        return Err(Error::LevelMismatch(format!("coordinates at level {m}, Λ at level {}", lambda.level())));
    }
    let f = ch.coords_factor(c, m as i64 + 1);
    let integral = |xs: &[TruncSeries]| -> Result<Vec<TruncSeries>> {
        xs.iter().map(|x| lambda.apply(&x.truncate(m as i64))).collect()
    };
    let image = IwahoriFactor {
        upper: integral(&f.upper)?,
        torus: integral(&f.torus)?,
        lower: f.lower.iter().map(|y| lambda.apply_shift(y)).collect::<Result<_>>()?,
    };
    ch.factor_coords(&image, m)
}

/// The Hecke algebra whose representatives are built from the uniformizer π.
pub fn algebra_for(tag: GroupTag, m: usize, pi: &TruncSeries) -> Result<HeckeAlgebra> {
    let q = pi.field().q();
    let unit = pi.shift(-1);
    let standard = unit.digits().first().is_some_and(|c| c.value() == 1) && unit.digits().iter().skip(1).all(|c| c.is_zero());
    if standard {
        HeckeAlgebra::new(tag, q, m)
    } else {
        HeckeAlgebra::with_uniformizer(tag, q, m, &unit)
    }
}

/// How much of the label space `verify_iso` sweeps.
#[derive(Clone, Debug)]
pub struct IsoBudget {
    /// Largest Weyl length of the cells whose labels are tested.
    pub max_len: usize,
    /// Labels drawn per cell; 0 takes every label.
    pub per_cell: usize,
    /// Number of label-by-label products tested beyond the generator sweep.
    pub pairs: usize,
    /// Largest Weyl length for the Γ transport check.
    pub gamma_len: usize,
}

impl Default for IsoBudget {
    fn default() -> Self {
        IsoBudget { max_len: 2, per_cell: 0, pairs: 400, gamma_len: 3 }
    }
}

/// ζ_m: H(G, I_m) -> H(G, I_m') for a ring isomorphism Λ of the level-m truncations.
pub struct Transfer {
    pub lambda: RingIso,
    pub source: HeckeAlgebra,
    pub target: HeckeAlgebra,
}

impl Transfer {
    pub fn new(tag: GroupTag, m: usize, lambda: RingIso) -> Result<Transfer> {
        if m > lambda.level() {
            return Err(Error::LevelMismatch(format!("H(G, I_{m}) needs Λ modulo p^{m}, given modulo p^{}", lambda.level())));
        }
        let source = algebra_for(tag, m, lambda.source_uniformizer())?;
        let target = algebra_for(tag, m, lambda.uniformizer_image())?;
        Ok(Transfer { lambda, source, target })
    }

    pub fn m(&self) -> usize {
        self.source.m
    }

    pub fn beta(&self, c: &IwahoriCoords) -> Result<IwahoriCoords> {
        beta_map(&self.source.ch, c, &self.lambda)
    }

    /// The label of I_m' β(b1) w̃' β(b2) I_m'.
    pub fn zeta_label(&self, label: &CosetLabel) -> Result<CosetLabel> {
        let b1 = self.target.from_coords(&self.beta(&label.b1)?)?;
        let b2 = self.target.from_coords(&self.beta(&label.b2)?)?;
        self.target.canonical(&label.w, &b1, &b2)
    }

    /// ζ_m, termwise on labels with coefficients unchanged.
    pub fn zeta(&self, h: &HeckeElem) -> Result<HeckeElem> {
        let mut out = HeckeElem::zero();
        for (label, c) in &h.terms {
            out.add_term(self.zeta_label(label)?, c.clone());
        }
        Ok(out)
    }

    /// Moves a group element entrywise through the automorphism extending Λ.
    pub fn transport_matrix(&self, g: &Mat) -> Result<Mat> {
        let n = g.size();
        let mut out = g.clone();
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.lambda.transport(g.get(i, j))?);
            }
        }
        Ok(out)
    }

    /// Moves a generator word: parameters through Λ, π_λ to π'_λ.
    pub fn transport_word(&self, w: &GenWord) -> Result<GenWord> {
        let tr = |c: &TruncSeries| self.lambda.transport(c);
        let pi_t = self.target.uniformizer().clone();
        w.0.iter()
            .map(|a| {
                Ok(match a {
                    Atom::U { root, c } => Atom::U { root: *root, c: tr(c)? },
                    Atom::Coroot { root, c } => Atom::Coroot { root: *root, c: tr(c)? },
                    Atom::W { root, c } => Atom::W { root: *root, c: tr(c)? },
                    Atom::Pi { lambda, .. } => Atom::Pi { lambda: lambda.clone(), pi: pi_t.clone() },
                    Atom::Torus(cs) => Atom::Torus(cs.iter().map(tr).collect::<Result<_>>()?),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(GenWord)
    }

    /// Kazhdan's map t_{a_i π_λ a_j^{-1}} ↦ t_{a_i' π'_λ a_j'^{-1}} on one basis element.
    pub fn kaz_basis(&self, lambda: &[i64], a_i: &GenWord, a_j: &GenWord) -> Result<HeckeElem> {
        self.target.km_basis(lambda, &self.transport_word(a_i)?, &self.transport_word(a_j)?)
    }

    /// Kazhdan's map on the K_m-subalgebra: h is written in the basis t_x of K_m double
    /// cosets and each x is moved entrywise to x'.
    pub fn kaz(&self, h: &HeckeElem) -> Result<HeckeElem> {
        if !self.source.is_km_invariant(h)? {
            return Err(Error::NotKmInvariant);
        }
        let vol = Rational::from_integer(num_bigint::BigInt::from(self.source.q()).pow(self.source.ch.datum().n_pos as u32));
        let mut rest = h.clone();
        let mut out = HeckeElem::zero();
        while let Some((label, c)) = rest.terms.iter().next().map(|(l, c)| (l.clone(), c.clone())) {
            let coeff = &c * &vol;
            rest = rest.sub(&self.source.km_element(&label)?.scale(&coeff));
            let x = self.transport_matrix(&self.source.label_matrix(&label)?)?;
            let moved = self.target.label_of_element(&x, &label.w)?;
            out = out.add(&self.target.km_element(&moved)?.scale(&coeff));
        }
        Ok(out)
    }

    /// Generators of H(G, I_m): f_s for s ∈ S, the length-zero generators and their
    /// inverses, and f_b for root-group and torus generators b of I/I_m.
    pub fn generators(&self) -> Result<Vec<(String, HeckeElem)>> {
        let h = &self.source;
        let ch = &h.ch;
        let mut out = Vec::new();
        for (k, s) in ch.aw.s_set().iter().enumerate() {
            out.push((format!("s{k}"), h.f_rep(s)?));
        }
        for (name, elem, _, _) in ch.omega_reps(h.uniformizer())? {
            out.push((name, h.f_rep(&elem)?));
        }
        for (name, b) in iwahori_generators(h)? {
            out.push((name, h.f_iwahori(&b)?));
        }
        Ok(out)
    }

    /// Sampled labels of every cell of length at most `max_len` (free Ω exponents in -1..=1).
    pub fn sample_labels(&self, max_len: usize, per_cell: usize) -> Result<Vec<CosetLabel>> {
        let mut out = Vec::new();
        for w in self.source.ch.aw.ball(max_len, 1) {
            out.extend(self.source.sample_cell_labels(&w, per_cell)?);
        }
        Ok(out)
    }

    /// ζ_m(h1 h2) = ζ_m(h1) ζ_m(h2) with the oracle on both sides, β a group isomorphism,
    /// Γ-orbits carried to Γ-orbits, and ζ_m(e_{K_m}) = e_{K_m'}.
    pub fn verify_iso(&self, budget: &IsoBudget) -> Result<Report> {
        let mut report = Report::default();
        report.push("ring-homomorphism", "Λ additive and multiplicative", self.lambda.check_homomorphism()?);
        self.check_beta(&mut report)?;
        self.check_labels(budget, &mut report)?;
        self.check_gamma(budget, &mut report)?;
        let e = self.source.km_idempotent()?;
        report.push("km-idempotent", "ζ(e_K) = e_K'", self.zeta(&e)? == self.target.km_idempotent()?);
        self.check_products(budget, &mut report)?;
        Ok(report)
    }

    fn check_beta(&self, report: &mut Report) -> Result<()> {
        let (h, h2) = (&self.source, &self.target);
        let inverse = self.lambda.inverse();
        let gens = iwahori_generators(h)?;
        let quotient = h.ch.enumerate_quotient(h.m);
        let stride = (quotient.len() / 24).max(1);
        for c in quotient.iter().step_by(stride) {
            let b = h.from_coords(c)?;
            let bc = self.beta(c)?;
            let back = beta_map(&h2.ch, &bc, &inverse)?;
            report.push("beta-inverse", format!("{c:?}"), back == *c);
            for (name, g) in &gens {
                let lhs = self.beta(&h.coords(&b.mul(g))?)?;
                let rhs = h2.coords(&h2.from_coords(&bc)?.mul(&h2.from_coords(&self.beta(&h.coords(g)?)?)?))?;
                report.push("beta-homomorphism", format!("{c:?} * {name}"), lhs == rhs);
            }
        }
        Ok(())
    }

    fn check_labels(&self, budget: &IsoBudget, report: &mut Report) -> Result<()> {
        for w in self.source.ch.aw.ball(budget.max_len, 1) {
            let labels = self.source.sample_cell_labels(&w, budget.per_cell)?;
            let images: BTreeSet<CosetLabel> = labels.iter().map(|l| self.zeta_label(l)).collect::<Result<_>>()?;
            report.push("label-injective", format!("{w}"), images.len() == labels.len());
            if budget.per_cell == 0 {
                let full = self.target.cell_labels(&w)?.into_iter().collect::<BTreeSet<_>>();
                report.push("label-bijective", format!("{w}"), full == images);
            }
        }
        Ok(())
    }

    fn check_gamma(&self, budget: &IsoBudget, report: &mut Report) -> Result<()> {
        for w in self.source.ch.aw.ball(budget.gamma_len, 0) {
            let moved = self
                .source
                .gamma_coords(&w)?
                .iter()
                .map(|(c, d)| Ok((self.beta(c)?, self.beta(d)?)))
                .collect::<Result<BTreeSet<_>>>()?;
            report.push("gamma-transport", format!("{w}"), moved == self.target.gamma_coords(&w)?);
        }
        Ok(())
    }

    fn check_products(&self, budget: &IsoBudget, report: &mut Report) -> Result<()> {
        use rayon::prelude::*;
        let labels = self.sample_labels(budget.max_len, budget.per_cell)?;
        let gens = self.generators()?;
        let mut tasks: Vec<(&'static str, String, HeckeElem, HeckeElem)> = Vec::new();
        for (name, g) in &gens {
            for l in &labels {
                let f = HeckeElem::basis(l.clone());
                tasks.push(("generator-left", format!("{name} * {l:?}"), g.clone(), f.clone()));
                tasks.push(("generator-right", format!("{l:?} * {name}"), f, g.clone()));
            }
        }
        let n = labels.len();
        let total = n * n;
        let count = budget.pairs.min(total);
        for k in 0..count {
            let idx = k * total / count.max(1);
            let (a, b) = (&labels[idx / n], &labels[idx % n]);
            tasks.push(("label-pairs", format!("{a:?} * {b:?}"), HeckeElem::basis(a.clone()), HeckeElem::basis(b.clone())));
        }
        let results: Vec<Result<(&'static str, String, bool)>> = tasks
            .into_par_iter()
            .map(|(fam, inst, x, y)| {
                let lhs = self.zeta(&self.source.hecke_mul_oracle(&x, &y)?)?;
                let rhs = self.target.hecke_mul_oracle(&self.zeta(&x)?, &self.zeta(&y)?)?;
                Ok((fam, inst, lhs == rhs))
            })
            .collect();
        for r in results {
            let (fam, inst, holds) = r?;
            report.push(fam, inst, holds);
        }
        Ok(())
    }
}

/// Root-group elements u_α(c t^k) of I with k below the level-m threshold, and torus
/// elements with one coordinate a generator of F_q^× or 1 + c t^k.
pub fn iwahori_generators(h: &HeckeAlgebra) -> Result<Vec<(String, Mat)>> {
    let ch = &h.ch;
    let f = ch.field;
    let d = ch.datum();
    let prec = h.precision();
    let m = h.m as i64;
    let mut out = Vec::new();
    for a in 0..d.n_roots() {
        let range = if d.is_positive(a) { 0..m } else { 1..m + 1 };
        for k in range {
            for &c in &f.prime_basis() {
                out.push((format!("u{a}({c:?}t^{k})"), ch.u(a, &TruncSeries::monomial(f, c, k, prec))));
            }
        }
    }
    let one = ch.one(prec);
    let mut units = vec![TruncSeries::constant(f, f.generator(), prec)];
    for k in 1..m {
        for &c in &f.prime_basis() {
            units.push(&one + &TruncSeries::monomial(f, c, k, prec));
        }
    }
    for i in 0..d.rank {
        for x in &units {
            let mut coords = vec![one.clone(); d.rank];
            coords[i] = x.clone();
            out.push((format!("torus{i}({x:?})"), ch.torus(&coords)?));
        }
    }
    Ok(out)
}
