use heckelab::affweyl::ExtAffWeylElem;
use heckelab::chevalley::{Atom, GenWord, IwahoriCoords, Mat};
use heckelab::exactalg::{field, CycInt, FqElem, TruncSeries};
use heckelab::hecke::HeckeAlgebra;
use heckelab::rootdata::GroupTag;
use heckelab::transfer::{AdditiveChar, RingIso, Transfer, TruncDVR};
use heckelab::whittaker::*;
use heckelab::Error;
use proptest::prelude::*;

fn series(q: u32, val: i64, digits: &[u32], prec: i64) -> TruncSeries {
    let f = field(q).unwrap();
    let d: Vec<FqElem> = digits.iter().map(|&v| f.elem(v)).collect();
    TruncSeries::from_digits(f, val, &d, prec)
}

fn retwist(q: u32, level: usize) -> RingIso {
    RingIso::retwist(q, level, &series(q, 0, &[1, 1], level as i64)).unwrap()
}

fn identity_iso(q: u32, level: usize) -> RingIso {
    RingIso::identity(&TruncDVR::standard(q, level).unwrap()).unwrap()
}

fn uniform(h: &HeckeAlgebra, conductor: i64) -> GenericCharacter {
    GenericCharacter::uniform(h.q(), h.ch.datum().simples.len(), FqElem::ONE, conductor).unwrap()
}

fn identity_coords(h: &HeckeAlgebra) -> IwahoriCoords {
    h.identity_label().unwrap().b1
}

fn assert_all_hold(tag: GroupTag, q: u32, m: usize, conductor: i64, lambda: RingIso) {
    let tr = Transfer::new(tag, m, lambda).unwrap();
    let chi = uniform(&tr.source, conductor);
    let wt = WhittakerTransfer::new(&tr, chi).unwrap();
    let report = wt.verify_equivariance(2).unwrap();
    let bad: Vec<String> = report.mismatches().iter().map(|c| format!("{}: {}", c.family, c.instance)).collect();
    assert!(bad.is_empty(), "{tag} q={q} m={m}: {bad:?}");
    assert!(report.checks.iter().any(|c| c.family == "whittaker-equivariance"));
}

#[test]
fn character_values() {
    let h = HeckeAlgebra::new(GroupTag::SL2, 2, 1).unwrap();
    let model = WhittakerModel::new(&h, uniform(&h, 0)).unwrap();
    let word = GenWord(vec![Atom::U { root: 0, c: series(2, -1, &[1], 4) }]);
    assert_eq!(model.char_value_word(&word).unwrap(), CycInt::zeta_pow(2, 1));
    let integral = GenWord(vec![Atom::U { root: 0, c: series(2, 0, &[1, 1], 4) }]);
    assert_eq!(model.char_value_word(&integral).unwrap(), CycInt::one(2));
    let lower = GenWord(vec![Atom::U { root: 1, c: series(2, 0, &[1], 4) }]);
    assert!(model.char_value_word(&lower).is_err());

    let h3 = HeckeAlgebra::new(GroupTag::GL(3), 3, 1).unwrap();
    let model3 = WhittakerModel::new(&h3, uniform(&h3, 0)).unwrap();
    let d = h3.ch.datum();
    let long = (0..d.n_pos).find(|&a| !d.simples.contains(&a)).unwrap();
    let word = GenWord(vec![Atom::U { root: long, c: series(3, -3, &[1, 2], 4) }]);
    assert_eq!(model3.char_value_word(&word).unwrap(), CycInt::one(3));
}

#[test]
fn support_inequalities() {
    let h = HeckeAlgebra::new(GroupTag::SL2, 3, 1).unwrap();
    let within = WhittakerModel::new(&h, uniform(&h, 1)).unwrap();
    let id = h.ch.aw.identity();
    assert!(within.in_wa1(&id));
    let beyond = WhittakerModel::new(&h, uniform(&h, 2)).unwrap();
    assert!(!beyond.in_wa1(&id));
    let shift = h.ch.aw.translation(vec![-1]);
    assert_eq!(heckelab::rootdata::pairing(&h.ch.datum().roots[0], &shift.lambda), -2);
    let shallow = WhittakerModel::new(&h, uniform(&h, 0)).unwrap();
    assert!(!shallow.in_wa1(&shift));
    let deep = WhittakerModel::new(&h, uniform(&h, -1)).unwrap();
    assert!(deep.in_wa1(&shift));
    assert!(beyond.representatives(&id).unwrap().is_empty());
}

/// χ on every u ∈ U ∩ w̃I_mw̃^{-1} of the form w̃u_β(ct^k)w̃^{-1}, u_β(ct^k) ∈ I_m.
fn trivial_on_filtration(h: &HeckeAlgebra, model: &WhittakerModel, w: &ExtAffWeylElem) -> bool {
    let d = h.ch.datum();
    let (rep, rep_inv) = h.exact_rep(w).unwrap();
    (0..d.n_roots()).filter(|&b| d.is_positive(d.weyl_root(w.x, b))).all(|b| {
        let lo = h.m as i64 + i64::from(!d.is_positive(b));
        (lo..lo + 8).all(|k| {
            h.ch.field.elements().all(|c| {
                let u = h.ch.u(b, &TruncSeries::monomial(h.ch.field, c, k, h.precision()));
                model.char_exponent(&rep.mul(&u).mul(&rep_inv)).unwrap() == 0
            })
        })
    })
}

#[test]
fn support_matches_direct_evaluation() {
    for (tag, q) in [(GroupTag::SL2, 3), (GroupTag::GL(2), 2), (GroupTag::GL(3), 2)] {
        let h = HeckeAlgebra::new(tag, q, 1).unwrap();
        for cond in -1..=2 {
            let model = WhittakerModel::new(&h, uniform(&h, cond)).unwrap();
            for w in h.ch.aw.ball(3, 1) {
                assert_eq!(model.in_wa1(&w), trivial_on_filtration(&h, &model, &w), "{tag} cond {cond} {w}");
            }
        }
    }
}

#[test]
fn hecke_action_examples() {
    let h = HeckeAlgebra::new(GroupTag::SL2, 2, 1).unwrap();
    let model = WhittakerModel::new(&h, uniform(&h, 1)).unwrap();
    let id = h.ch.aw.identity();
    let v = WhitVector::basis((id.clone(), identity_coords(&h)), 2);
    assert_eq!(model.act(&h.one().unwrap(), &v).unwrap(), v);

    let s1 = h.ch.aw.s_set()[0].clone();
    let image = model.act(&h.f_rep(&s1).unwrap(), &v).unwrap();
    let (_, s_inv) = h.exact_rep(&s1).unwrap();
    let pi = h.uniformizer().clone();
    let mut terms = WhitVector::zero();
    for t in h.ch.field.elements() {
        let g = h.ch.u(0, &pi.scale(t)).mul(&s_inv);
        let term = model.vector_of(&g).unwrap();
        assert_eq!(term.len(), 1);
        let c = term.terms.values().next().unwrap();
        assert!((0..2).any(|k| *c == CycInt::zeta_pow(2, k)));
        terms = terms.add(&term);
    }
    assert_eq!(image, terms);
    assert_eq!(image.terms.values().map(|c| c.coords()[0]).sum::<i64>(), 2);

    let g2 = HeckeAlgebra::new(GroupTag::GL(2), 3, 1).unwrap();
    let model2 = WhittakerModel::new(&g2, uniform(&g2, 1)).unwrap();
    let (w, b) = g2
        .ch
        .aw
        .ball(2, 1)
        .into_iter()
        .filter(|w| g2.length(w) > 0)
        .find_map(|w| model2.representatives(&w).unwrap().pop().map(|b| (w, b)))
        .unwrap();
    let v = WhitVector::basis((w.clone(), b.clone()), 3);
    let g = model2.element(&(w, b)).unwrap();
    for (name, rho, r, r_inv) in g2.ch.omega_reps(g2.uniformizer()).unwrap() {
        let out = model2.act(&g2.f_rep(&rho).unwrap(), &v).unwrap();
        assert_eq!(out.len(), 1, "{name}");
        assert_eq!(out, model2.vector_of(&g.mul(&r_inv)).unwrap(), "{name}");
        let back = model2.act(&g2.f_rep(&g2.ch.aw.inv(&rho)).unwrap(), &out).unwrap();
        assert_eq!(back, v, "{name}");
        let _ = r;
    }
}

#[test]
fn action_respects_products() {
    for (tag, q) in [(GroupTag::SL2, 3), (GroupTag::GL(2), 2)] {
        let tr = Transfer::new(tag, 1, identity_iso(q, 2)).unwrap();
        let h = &tr.source;
        let model = WhittakerModel::new(h, uniform(h, 1)).unwrap();
        let gens = tr.generators().unwrap();
        let wt = WhittakerTransfer::new(&tr, uniform(h, 1)).unwrap();
        for key in wt.basis(1).unwrap() {
            let v = WhitVector::basis(key.clone(), q);
            for (n1, f1) in &gens {
                for (n2, f2) in &gens {
                    let lhs = model.act(&h.hecke_mul(f1, f2).unwrap(), &v).unwrap();
                    let rhs = model.act(f1, &model.act(f2, &v).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "{tag} {n1}·{n2} on {key:?}");
                }
            }
        }
    }
}

#[test]
fn kappa_examples() {
    let tr = Transfer::new(GroupTag::SL2, 1, identity_iso(2, 2)).unwrap();
    let wt = WhittakerTransfer::new(&tr, uniform(&tr.source, 1)).unwrap();
    for key in wt.basis(2).unwrap() {
        let v = WhitVector::basis(key, 2);
        assert_eq!(wt.kappa(&v).unwrap(), v);
    }

    let tr = Transfer::new(GroupTag::SL2, 1, retwist(2, 2)).unwrap();
    let wt = WhittakerTransfer::new(&tr, uniform(&tr.source, 1)).unwrap();
    let s1 = tr.source.ch.aw.s_set()[0].clone();
    let zero = identity_coords(&tr.source);
    let image = wt.kappa_at(&s1, &zero).unwrap();
    assert_eq!(image, wt.target.vector_at(&s1, &identity_coords(&tr.target)).unwrap());
    assert_eq!(image.len(), 1);

    let tr = Transfer::new(GroupTag::SL2, 2, retwist(2, 3)).unwrap();
    let wt = WhittakerTransfer::new(&tr, uniform(&tr.source, 1)).unwrap();
    let mut b = identity_coords(&tr.source);
    b.lower = vec![vec![FqElem::ONE, FqElem::ZERO]];
    let moved = tr.beta(&b).unwrap();
    assert_eq!(moved.lower, vec![vec![FqElem::ONE, FqElem::ONE]]);
    let id = tr.source.ch.aw.identity();
    let image = wt.kappa(&wt.source.vector_at(&id, &b).unwrap()).unwrap();
    let (key, c) = image.terms.iter().next().unwrap();
    assert_eq!(image.len(), 1);
    assert_eq!(key.1.lower, moved.lower);
    assert_eq!(*c, CycInt::one(2));
}

#[test]
fn kappa_needs_the_next_level() {
    let tr = Transfer::new(GroupTag::SL2, 1, retwist(2, 1)).unwrap();
    let chi = uniform(&tr.source, 1);
    assert!(matches!(WhittakerTransfer::new(&tr, chi), Err(Error::LevelMismatch(_))));
}

#[test]
fn unsupported_groups() {
    let h = HeckeAlgebra::new(GroupTag::Sp4, 2, 1).unwrap();
    assert!(matches!(WhittakerModel::new(&h, uniform(&h, 1)), Err(Error::UnsupportedCell(_))));
}

#[test]
fn equivariance_identity_transfer() {
    assert_all_hold(GroupTag::SL2, 2, 1, 1, identity_iso(2, 2));
}

#[test]
fn equivariance_sl2_retwist() {
    for q in [2, 3] {
        for cond in [0, 1] {
            assert_all_hold(GroupTag::SL2, q, 1, cond, retwist(q, 2));
        }
    }
}

#[test]
fn equivariance_gl2_retwist() {
    for q in [2, 3] {
        assert_all_hold(GroupTag::GL(2), q, 1, 1, retwist(q, 2));
    }
}

#[test]
fn equivariance_detects_a_wrong_character() {
    let tr = Transfer::new(GroupTag::SL2, 1, retwist(3, 2)).unwrap();
    let mut wt = WhittakerTransfer::new(&tr, uniform(&tr.source, 1)).unwrap();
    let f = field(3).unwrap();
    let other = GenericCharacter::uniform(3, 1, f.elem(2), 1).unwrap();
    wt.target = WhittakerModel::new(&tr.target, other).unwrap();
    assert!(!wt.verify_equivariance(1).unwrap().all_hold());
}

/// The block swap of GL_4 carrying α_1 to α_3 and back.
fn block_swap(h: &HeckeAlgebra) -> usize {
    let d = h.ch.datum();
    let (a1, a3) = (d.simples[0], d.simples[2]);
    (0..d.weyl().len())
        .find(|&x| d.weyl_root(x, a1) == a3 && d.weyl_root(x, a3) == a1)
        .unwrap()
}

#[test]
fn compatibility_with_longest_block_elements() {
    let h = HeckeAlgebra::new(GroupTag::GL(4), 3, 1).unwrap();
    let f = field(3).unwrap();
    let model = WhittakerModel::new(&h, uniform(&h, 1)).unwrap();
    assert!(model.compatible_with(&[0, 1, 2], 0).unwrap());
    let swap = block_swap(&h);
    assert!(model.compatible_with(&[0, 2], swap).unwrap());
    assert!(model.compatible_with(&[1], swap).is_err());

    let unit = |v: u32| AdditiveChar::with_conductor(f.elem(v), 1, 3).unwrap();
    let mixed = GenericCharacter::new(vec![unit(1), unit(1), unit(2)]).unwrap();
    let model = WhittakerModel::new(&h, mixed).unwrap();
    assert!(!model.compatible_with(&[0, 2], swap).unwrap());
}

fn positive_unipotent(h: &HeckeAlgebra, digits: &[(u32, i64)]) -> Mat {
    let d = h.ch.datum();
    let mut u = h.ch.identity(h.precision());
    for (a, &(v, k)) in (0..d.n_pos).zip(digits) {
        u = u.mul(&h.ch.u(a, &TruncSeries::monomial(h.ch.field, h.ch.field.elem(v % h.q()), k, h.precision())));
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneity_of_the_normal_form(
        which in 0usize..3,
        cond in 0i64..2,
        cell in 0usize..40,
        coord in 0usize..400,
        digits in proptest::collection::vec((0u32..3, -3i64..3), 6),
    ) {
        let (tag, q) = [(GroupTag::SL2, 3), (GroupTag::GL(2), 3), (GroupTag::GL(3), 2)][which];
        let h = HeckeAlgebra::new(tag, q, 1).unwrap();
        let model = WhittakerModel::new(&h, uniform(&h, cond)).unwrap();
        let cells = h.ch.aw.ball(2, 1);
        let w = &cells[cell % cells.len()];
        let quotient = h.ch.enumerate_quotient(1);
        let b = &quotient[coord % quotient.len()];
        let u = positive_unipotent(&h, &digits);
        let g = u.mul(&model.element(&(w.clone(), b.clone())).unwrap());
        let e = model.char_exponent(&u).unwrap();
        let expected = model.vector_at(w, b).unwrap().scale(&CycInt::zeta_pow(q, -i64::from(e)));
        prop_assert_eq!(model.vector_of(&g).unwrap(), expected);
    }

    #[test]
    fn character_is_multiplicative(x in proptest::collection::vec(0u32..3, 5), y in proptest::collection::vec(0u32..3, 5)) {
        let h = HeckeAlgebra::new(GroupTag::SL2, 3, 1).unwrap();
        let model = WhittakerModel::new(&h, uniform(&h, 2)).unwrap();
        let sx = series(3, -3, &x, 6);
        let sy = series(3, -3, &y, 6);
        let ux = h.ch.u(0, &sx);
        let uy = h.ch.u(0, &sy);
        let both = model.char_value(&h.ch.u(0, &(&sx + &sy))).unwrap();
        prop_assert_eq!(both.clone(), &model.char_value(&ux).unwrap() * &model.char_value(&uy).unwrap());
        prop_assert_eq!(model.char_value(&ux.mul(&uy)).unwrap(), both);
    }
}
