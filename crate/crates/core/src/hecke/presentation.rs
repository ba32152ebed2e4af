//! Relation checks for the generators-and-relations presentation of H(G, I_m),
//! evaluated with the convolution oracle.

use std::sync::Arc;

use rayon::prelude::*;

use super::{HeckeAlgebra, HeckeElem};
use crate::affweyl::{ExtAffWeylElem, SKind};
use crate::chevalley::Mat;
use crate::error::{Error, Result};
use crate::exactalg::{Rational, TruncSeries};
use crate::report::{Check, Report};

type Side<'a> = Box<dyn Fn() -> Result<(HeckeElem, HeckeElem)> + Send + Sync + 'a>;

struct Instance<'a> {
    family: &'static str,
    instance: String,
    sides: Side<'a>,
}

/// A length-zero generator: its class, representative, and the representative standing for its inverse.
struct OmegaGen {
    name: String,
    elem: ExtAffWeylElem,
    rep: Mat,
    back: Mat,
    back_elem: ExtAffWeylElem,
    inverse: Mat,
    order: Option<i64>,
}

impl HeckeAlgebra {
    fn product(&self, factors: &[HeckeElem]) -> Result<HeckeElem> {
        let mut acc = self.one()?;
        for f in factors {
            acc = self.hecke_mul_oracle(&acc, f)?;
        }
        Ok(acc)
    }

    fn f_s(&self, k: usize) -> Result<HeckeElem> {
        self.f_element(&self.s_reps[k], &self.ch.aw.s_set()[k])
    }

    fn omega_gens(&self) -> Result<Vec<Arc<OmegaGen>>> {
        let om = self.ch.aw.omega();
        let n_free = 2 * om.free_gens.len();
        let mut out = Vec::new();
        for (i, (name, elem, rep, back)) in self.ch.omega_reps(&self.pi)?.into_iter().enumerate() {
            let rep = self.exactify(rep);
            let back = self.exactify(back);
            let order = (i >= n_free).then(|| om.torsion_functionals[i - n_free].1);
            let back_elem = self.ch.aw.inv(&elem);
            let inverse = self.exactify(rep.inv()?);
            out.push(Arc::new(OmegaGen { name, elem, rep, back, back_elem, inverse, order }));
        }
        Ok(out)
    }

    /// The torus factor t with a = t·b, required to lie in I.
    fn iwahori_quotient(&self, a: &Mat, b_inv: &Mat) -> Result<Mat> {
        let t = a.mul(b_inv);
        if !self.in_iwahori(&t)? {
            return Err(Error::Invalid("relation twist does not lie in the Iwahori subgroup".into()));
        }
        Ok(t)
    }

    fn quotient_reps(&self) -> Result<Vec<Mat>> {
        self.ch.enumerate_quotient(self.m).iter().map(|c| self.from_coords(c)).collect()
    }

    /// Generators of I used as right factors in product checks.
    fn iwahori_generators(&self) -> Result<Vec<Mat>> {
        let f = self.ch.field;
        let d = self.ch.datum();
        let mut out = Vec::new();
        for b in 0..d.n_roots() {
            let k = self.k_iwahori(b);
            for &c in &f.prime_basis() {
                out.push(self.ch.u(b, &TruncSeries::monomial(f, c, k, self.prec)));
            }
        }
        let one = self.ch.one(self.prec);
        for i in 0..d.rank {
            let mut coords = vec![one.clone(); d.rank];
            coords[i] = TruncSeries::constant(f, f.generator(), self.prec);
            out.push(self.ch.torus(&coords)?);
        }
        Ok(out)
    }

    /// Units of O modulo p^m.
    fn units_mod(&self) -> Vec<TruncSeries> {
        let f = self.ch.field;
        let elems: Vec<_> = f.elements().collect();
        let mut out = Vec::new();
        for lead in elems.iter().filter(|c| !c.is_zero()) {
            let mut partial = vec![vec![*lead]];
            for _ in 1..self.m {
                partial = partial.into_iter().flat_map(|p| elems.iter().map(move |c| [p.clone(), vec![*c]].concat())).collect();
            }
            for digits in partial {
                out.push(TruncSeries::from_digits(f, 0, &digits, self.prec).relift(self.prec));
            }
        }
        out
    }

    fn relation_instances(&self, max_len: usize) -> Result<Vec<Instance<'_>>> {
        let aw = &self.ch.aw;
        let d = self.ch.datum();
        let n_s = aw.s_set().len();
        let q = Rational::from_integer(self.q().into());
        let mut out: Vec<Instance<'_>> = Vec::new();
        let reps = self.quotient_reps()?;
        let omegas = self.omega_gens()?;

        // braid relations
        for i in 0..n_s {
            for j in i + 1..n_s {
                let Some(mij) = self.ch.braid_order(i, j) else { continue };
                if mij > max_len {
                    continue;
                }
                out.push(Instance {
                    family: "braid",
                    instance: format!("s{i}, s{j}, order {mij}"),
                    sides: Box::new(move || {
                        let (a, b) = (self.f_s(i)?, self.f_s(j)?);
                        let lhs: Vec<_> = (0..mij).map(|k| if k % 2 == 0 { a.clone() } else { b.clone() }).collect();
                        let rhs: Vec<_> = (0..mij).map(|k| if k % 2 == 0 { b.clone() } else { a.clone() }).collect();
                        Ok((self.product(&lhs)?, self.product(&rhs)?))
                    }),
                });
            }
        }

        // quadratic relation
        if max_len >= 2 {
            for k in 0..n_s {
                let q = q.clone();
                out.push(Instance {
                    family: "quadratic",
                    instance: format!("s{k}"),
                    sides: Box::new(move || {
                        let f = self.ch.field;
                        let one = self.ch.one(self.prec);
                        let minus = -&one;
                        let (root, x_of): (usize, Box<dyn Fn(_) -> Mat>) = match aw.s_kind(k) {
                            SKind::Finite(a) => (a, Box::new(move |c| {
                                self.ch.u(d.neg(a), &TruncSeries::monomial(f, c, self.m as i64, self.prec))
                            })),
                            SKind::Affine { highest, .. } => (highest, Box::new(move |c| {
                                self.ch.u(highest, &TruncSeries::monomial(f, c, self.m as i64 - 1, self.prec))
                            })),
                        };
                        let lhs = self.product(&[self.f_s(k)?, self.f_s(k)?, self.f_iwahori(&self.ch.coroot(root, &minus)?)?])?;
                        let mut rhs = HeckeElem::zero();
                        for c in f.elements() {
                            rhs = rhs.add(&self.f_iwahori(&x_of(c))?);
                        }
                        Ok((lhs, rhs.scale(&q)))
                    }),
                });
            }
        }

        for g in &omegas {
            // torsion power
            if let Some(order) = g.order {
                let g = g.clone();
                out.push(Instance {
                    family: "torsion-power",
                    instance: g.name.clone(),
                    sides: Box::new(move || {
                        let mut p = self.ch.identity(self.prec);
                        for _ in 0..order {
                            p = p.mul(&g.rep);
                        }
                        let c = self.iwahori_quotient(&p, &self.ch.identity(self.prec))?;
                        let f = self.f_element(&g.rep, &g.elem)?;
                        let lhs = self.product(&vec![f; order as usize])?;
                        Ok((lhs, self.f_iwahori(&c)?))
                    }),
                });
            }
            // conjugation of simple reflections
            for i in 0..n_s {
                let Some(j) = aw.conjugate_s(&g.elem, i) else { continue };
                let g = g.clone();
                let finite = matches!(aw.s_kind(i), SKind::Finite(_)) && matches!(aw.s_kind(j), SKind::Finite(_));
                out.push(Instance {
                    family: if g.order.is_some() { "torsion-conjugates-simple" } else { "omega-conjugates-simple" },
                    instance: format!("{}, s{i} -> s{j}", g.name),
                    sides: Box::new(move || {
                        let conj = g.rep.mul(&self.s_reps[i]).mul(&g.back);
                        let t = self.iwahori_quotient(&conj, &self.s_invs[j])?;
                        let lhs =
                            self.product(&[self.f_element(&g.rep, &g.elem)?, self.f_s(i)?, self.f_element(&g.back, &g.back_elem)?])?;
                        let rhs = if finite && g.order.is_none() {
                            self.f_s(j)?
                        } else {
                            self.product(&[self.f_iwahori(&t)?, self.f_s(j)?])?
                        };
                        Ok((lhs, rhs))
                    }),
                });
            }
            // conjugation of I
            for (bi, b) in reps.iter().enumerate() {
                let (g, b) = (g.clone(), b.clone());
                out.push(Instance {
                    family: "omega-conjugates-iwahori",
                    instance: format!("{}, b #{bi}", g.name),
                    sides: Box::new(move || {
                        let lhs = self.product(&[
                            self.f_element(&g.rep, &g.elem)?,
                            self.f_iwahori(&b)?,
                            self.f_element(&g.inverse, &g.back_elem)?,
                        ])?;
                        Ok((lhs, self.f_iwahori(&g.rep.mul(&b).mul(&g.inverse))?))
                    }),
                });
            }
            // commutation of length-zero generators
            for h in &omegas {
                let (g, h) = (g.clone(), h.clone());
                out.push(Instance {
                    family: "omega-commutation",
                    instance: format!("{}, {}", g.name, h.name),
                    sides: Box::new(move || {
                        let ab = g.rep.mul(&h.rep);
                        let ba_inv = self.exactify(g.inverse.mul(&h.inverse));
                        let t = self.iwahori_quotient(&ab, &ba_inv)?;
                        let (fg, fh) = (self.f_element(&g.rep, &g.elem)?, self.f_element(&h.rep, &h.elem)?);
                        Ok((self.product(&[fg.clone(), fh.clone()])?, self.product(&[self.f_iwahori(&t)?, fh, fg])?))
                    }),
                });
            }
        }

        // unit
        let mut unit_labels = Vec::new();
        for w in aw.s_set().iter().chain(omegas.iter().map(|g| &g.elem)).chain([&aw.identity()]) {
            unit_labels.extend(self.cell_labels(w)?);
        }
        for l in unit_labels {
            out.push(Instance {
                family: "unit",
                instance: format!("{} with b1 {:?}, b2 {:?}", l.w, l.b1, l.b2),
                sides: Box::new(move || {
                    let f = HeckeElem::basis(l.clone());
                    let one = self.one()?;
                    let (a, b) = (self.hecke_mul_oracle(&one, &f)?, self.hecke_mul_oracle(&f, &one)?);
                    Ok((a.add(&b), f.scale(&Rational::from_integer(2.into()))))
                }),
            });
        }

        // products in I
        let gens = self.iwahori_generators()?;
        for (bi, b) in reps.iter().enumerate() {
            for (gi, g) in gens.iter().enumerate() {
                let (b, g) = (b.clone(), g.clone());
                out.push(Instance {
                    family: "iwahori-product",
                    instance: format!("b #{bi}, generator #{gi}"),
                    sides: Box::new(move || {
                        Ok((self.product(&[self.f_iwahori(&b)?, self.f_iwahori(&g)?])?, self.f_iwahori(&b.mul(&g))?))
                    }),
                });
            }
        }

        // simple reflections conjugating I ∩ Ad s̃(I)
        for k in 0..n_s {
            for (bi, b) in reps.iter().enumerate() {
                if !self.in_iwahori(&self.s_invs[k].mul(b).mul(&self.s_reps[k]))? {
                    continue;
                }
                let b = b.clone();
                out.push(Instance {
                    family: "simple-conjugates-iwahori",
                    instance: format!("s{k}, b #{bi}"),
                    sides: Box::new(move || {
                        let conj = self.s_reps[k].mul(&b).mul(&self.s_invs[k]);
                        Ok((
                            self.product(&[self.f_s(k)?, self.f_iwahori(&b)?])?,
                            self.product(&[self.f_iwahori(&conj)?, self.f_s(k)?])?,
                        ))
                    }),
                });
            }
        }

        // rank-one relations
        if max_len >= 2 {
            let units = self.units_mod();
            for k in 0..n_s {
                for x in &units {
                    let q = q.clone();
                    let x = x.clone();
                    let (family, instance) = match aw.s_kind(k) {
                        SKind::Finite(_) => ("finite-rank-one", format!("s{k}, x = {x:?}")),
                        SKind::Affine { .. } => ("affine-rank-one", format!("s{k}, x = {x:?}")),
                    };
                    out.push(Instance {
                        family,
                        instance,
                        sides: Box::new(move || {
                            let ch = &self.ch;
                            let xi = x.inv()?;
                            let minus = -&ch.one(self.prec);
                            let fs = self.f_s(k)?;
                            let fu = |root: usize, c: &TruncSeries| self.f_iwahori(&ch.u(root, c));
                            let fc = |root: usize, c: &TruncSeries| -> Result<HeckeElem> { self.f_iwahori(&ch.coroot(root, c)?) };
                            let (lhs, rhs) = match aw.s_kind(k) {
                                SKind::Finite(a) => (
                                    vec![fs.clone(), fu(a, &x)?, fs.clone(), fc(a, &minus)?],
                                    vec![fu(a, &-&xi)?, fs, fc(a, &x)?, fu(a, &-&xi)?],
                                ),
                                SKind::Affine { highest, .. } => {
                                    let na = d.neg(highest);
                                    let px = &self.pi * &x;
                                    let pxi = -&(&self.pi * &xi);
                                    (
                                        vec![fs.clone(), fu(na, &px)?, fs.clone(), fc(highest, &minus)?],
                                        vec![fu(na, &pxi)?, fs, fc(highest, &-&xi)?, fu(na, &pxi)?],
                                    )
                                }
                            };
                            Ok((self.product(&lhs)?, self.product(&rhs)?.scale(&q)))
                        }),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Checks every relation instance whose generator word has length at most `max_len`
    /// with the convolution oracle.
    pub fn verify_presentation(&self, max_len: usize) -> Result<Report> {
        let instances = self.relation_instances(max_len)?;
        let checks = instances
            .par_iter()
            .map(|inst| {
                let (lhs, rhs) = (inst.sides)()?;
                Ok(Check { family: inst.family, instance: inst.instance.clone(), holds: lhs == rhs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Report { checks })
    }
}
