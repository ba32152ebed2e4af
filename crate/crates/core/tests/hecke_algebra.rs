use heckelab::chevalley::{Atom, GenWord, Level};
use heckelab::exactalg::{Rational, TruncSeries};
use heckelab::hecke::{Canonicalization, CosetLabel, HeckeAlgebra, HeckeElem};
use heckelab::rootdata::GroupTag;
use heckelab::Error;
use proptest::prelude::*;

fn algebra(tag: GroupTag, q: u32, m: usize) -> HeckeAlgebra {
    HeckeAlgebra::new(tag, q, m).unwrap()
}

fn labels_up_to(h: &HeckeAlgebra, len: usize) -> Vec<CosetLabel> {
    let mut out = Vec::new();
    for w in h.ch.aw.ball(len, 1) {
        out.extend(h.cell_labels(&w).unwrap());
    }
    out
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Whether the value of a word lies in the labelled double coset, by direct membership in a left coset.
fn word_in_label(h: &HeckeAlgebra, word: &GenWord, label: &CosetLabel) -> bool {
    let p = h.precision();
    let g = h.ch.eval(word, p).unwrap();
    h.left_cosets(label).unwrap().iter().any(|x| {
        let xi = h.ch.eval(&h.ch.inverse_word(x), p).unwrap();
        h.ch.in_level(&xi.mul(&g), Level::Filtration, h.m).unwrap()
    })
}

#[test]
fn counted_index_is_a_power_of_q() {
    for tag in [GroupTag::SL2, GroupTag::GL(2), GroupTag::GL(3), GroupTag::Sp4] {
        for q in [2, 3] {
            for m in [1, 2] {
                let h = algebra(tag, q, m);
                for w in h.ch.aw.ball(4, 1) {
                    let expected = u128::from(q).pow(h.length(&w) as u32);
                    assert_eq!(h.counted_index(&w).unwrap() as u128, expected, "{tag} q={q} m={m} w={w}");
                }
            }
        }
    }
}

#[test]
fn presentation_relations_hold() {
    for (tag, q, m) in [
        (GroupTag::SL2, 2, 1),
        (GroupTag::SL2, 3, 1),
        (GroupTag::GL(2), 2, 1),
        (GroupTag::GL(2), 3, 1),
        (GroupTag::SL2, 2, 2),
        (GroupTag::SL2, 3, 2),
    ] {
        let h = algebra(tag, q, m);
        let report = h.verify_presentation(4).unwrap();
        assert!(report.checks.len() > 10);
        assert!(report.all_hold(), "{tag} q={q} m={m}: {:?}", report.mismatches());
    }
}

#[test]
fn presentation_covers_length_zero_generators_for_gl2() {
    let h = algebra(GroupTag::GL(2), 3, 1);
    let fams = h.verify_presentation(4).unwrap().families();
    for f in ["quadratic", "omega-conjugates-simple", "omega-conjugates-iwahori", "omega-commutation", "finite-rank-one", "affine-rank-one"] {
        assert!(fams.contains(&f), "{f}");
    }
}

#[test]
fn engines_agree_on_short_cells() {
    for q in [2, 3] {
        let h = algebra(GroupTag::SL2, q, 1);
        let labels = labels_up_to(&h, 2);
        for a in &labels {
            for b in &labels {
                let (x, y) = (HeckeElem::basis(a.clone()), HeckeElem::basis(b.clone()));
                assert_eq!(h.hecke_mul(&x, &y).unwrap(), h.hecke_mul_oracle(&x, &y).unwrap(), "{a:?} * {b:?}");
            }
        }
    }
}

#[test]
fn engines_agree_beyond_rank_one() {
    for (tag, q) in [(GroupTag::GL(2), 3), (GroupTag::Sp4, 2), (GroupTag::GL(3), 2)] {
        let h = algebra(tag, q, 1);
        let mut gens = Vec::new();
        for w in h.ch.aw.ball(1, 1) {
            gens.push(h.f_rep(&w).unwrap());
        }
        for a in &gens {
            for b in &gens {
                assert_eq!(h.hecke_mul(a, b).unwrap(), h.hecke_mul_oracle(a, b).unwrap(), "{tag}");
            }
        }
    }
}

#[test]
fn orbit_stabilizer_accounting() {
    let h = algebra(GroupTag::SL2, 2, 1);
    let n = h.quotient_size() as usize;
    for w in h.ch.aw.ball(3, 0) {
        assert_eq!(h.gamma_size(&w).unwrap() * h.cell_labels(&w).unwrap().len(), n * n, "{w}");
    }
}

#[test]
fn both_normal_forms_count_the_same_double_cosets() {
    let h = algebra(GroupTag::SL2, 2, 1);
    assert_eq!(h.canonicalization(), Canonicalization::GammaOrbit);
    for w in h.ch.aw.ball(2, 0) {
        let cell = h.cell_labels(&w).unwrap();
        let mut reduced = std::collections::BTreeSet::new();
        for b in h.ch.enumerate_quotient(1) {
            let b = h.ch.from_coords(&b, h.precision()).unwrap();
            for c in h.ch.enumerate_quotient(1) {
                let c = h.ch.from_coords(&c, h.precision()).unwrap();
                reduced.insert(h.canonical_pair(&w, &b, &c, Canonicalization::Reduction).unwrap());
            }
        }
        assert_eq!(reduced.len(), cell.len(), "{w}");
    }
}

#[test]
fn quadratic_relation_example() {
    let h = algebra(GroupTag::SL2, 2, 1);
    let s = h.f_rep(&h.ch.aw.s_set()[0]).unwrap();
    let minus = -&h.ch.one(h.precision());
    let t = h.f_iwahori(&h.ch.coroot(0, &minus).unwrap()).unwrap();
    let lhs = h.hecke_mul(&h.hecke_mul(&s, &s).unwrap(), &t).unwrap();
    assert_eq!(lhs.len(), 2);
    assert!(lhs.terms.iter().all(|(l, c)| h.length(&l.w) == 0 && *c == rat(2)));
}

#[test]
fn identity_and_iwahori_products() {
    let h = algebra(GroupTag::SL2, 3, 1);
    let one = h.one().unwrap();
    assert_eq!(h.hecke_mul_oracle(&one, &one).unwrap(), one);
    let reps: Vec<_> = h.ch.enumerate_quotient(1).iter().map(|c| h.ch.from_coords(c, h.precision()).unwrap()).collect();
    for b in reps.iter().step_by(5) {
        for c in reps.iter().step_by(7) {
            let prod = h.hecke_mul(&h.f_iwahori(b).unwrap(), &h.f_iwahori(c).unwrap()).unwrap();
            assert_eq!(prod, h.f_iwahori(&b.mul(c)).unwrap());
        }
    }
}

#[test]
fn volumes_multiply_when_lengths_add() {
    let h = algebra(GroupTag::GL(2), 3, 1);
    let s = h.ch.aw.s_set();
    let (f0, f1) = (h.f_rep(&s[1]).unwrap(), h.f_rep(&s[0]).unwrap());
    let prod = h.hecke_mul_oracle(&f0, &f1).unwrap();
    assert_eq!(prod.len(), 1);
    let (label, c) = prod.terms.iter().next().unwrap();
    assert_eq!(*c, rat(1));
    assert_eq!(label.w, h.ch.aw.mul(&s[1], &s[0]));
    assert_eq!(h.volume(label), 9);
}

#[test]
fn volume_examples() {
    let h = algebra(GroupTag::SL2, 3, 1);
    assert_eq!(h.volume(&h.identity_label().unwrap()), 1);
    let s1 = h.f_rep(&h.ch.aw.s_set()[0]).unwrap();
    assert_eq!(h.volume(s1.terms.keys().next().unwrap()), 3);
    let w = h.ch.aw.translation(vec![-1]);
    let lw = h.f_rep(&w).unwrap();
    assert_eq!(h.volume(lw.terms.keys().next().unwrap()), 9);
}

#[test]
fn coset_representatives() {
    for (tag, q, m) in [(GroupTag::SL2, 3, 1), (GroupTag::GL(2), 2, 2), (GroupTag::Sp4, 2, 1)] {
        let h = algebra(tag, q, m);
        for w in h.ch.aw.ball(2, 0) {
            let label = h.f_rep(&w).unwrap().terms.into_keys().next().unwrap();
            let n = u128::from(q).pow(h.length(&w) as u32) as usize;
            let left = h.left_cosets(&label).unwrap();
            let right = h.right_cosets(&label).unwrap();
            assert_eq!(left.len(), n);
            assert_eq!(right.len(), n);
            for x in left.iter().chain(&right) {
                assert!(word_in_label(&h, x, &label), "{tag} {w}");
            }
        }
    }
    let h = algebra(GroupTag::SL2, 3, 1);
    assert_eq!(h.left_cosets(&h.identity_label().unwrap()).unwrap().len(), 1);
}

#[test]
fn folding_a_word_through_the_rank_one_relation() {
    let h = algebra(GroupTag::SL2, 2, 1);
    let p = h.precision();
    let s = h.ch.s_rep_word(0, h.uniformizer()).unwrap();
    let u = GenWord(vec![Atom::U { root: 0, c: h.ch.one(p) }]);
    let word = s.clone().then(u.clone()).then(s);
    let label = h.label_of_word(&word).unwrap();
    assert_eq!(h.length(&label.w), 1);
    assert!(word_in_label(&h, &word, &label));

    let already = u.then(h.ch.s_rep_word(0, h.uniformizer()).unwrap());
    let label = h.label_of_word(&already).unwrap();
    assert_eq!(label.w, h.ch.aw.s_set()[0]);
    assert!(word_in_label(&h, &already, &label));
    assert_eq!(h.label_of_word(&GenWord(vec![])).unwrap(), h.identity_label().unwrap());
}

#[test]
fn label_of_word_agrees_with_membership() {
    let h = algebra(GroupTag::Sp4, 2, 1);
    let p = h.precision();
    let f = h.ch.field;
    let pi = h.uniformizer().clone();
    let words = [
        GenWord(vec![Atom::U { root: 1, c: TruncSeries::monomial(f, f.elem(1), -1, p) }]),
        GenWord(vec![Atom::Pi { lambda: vec![1, -2], pi: pi.clone() }, Atom::U { root: 4, c: h.ch.one(p) }]),
        h.ch.s_rep_word(2, &pi).unwrap().then(GenWord(vec![Atom::U { root: 5, c: h.ch.one(p) }])).then(h.ch.s_rep_word(1, &pi).unwrap()),
    ];
    for w in &words {
        let label = h.label_of_word(w).unwrap();
        assert!(word_in_label(&h, w, &label), "{label:?}");
    }
}

#[test]
fn km_idempotent_is_idempotent() {
    for (tag, q, m) in [(GroupTag::SL2, 2, 1), (GroupTag::GL(2), 3, 1), (GroupTag::SL2, 2, 2)] {
        let h = algebra(tag, q, m);
        let e = h.km_idempotent().unwrap();
        assert_eq!(h.hecke_mul(&e, &e).unwrap(), e);
        assert_eq!(h.hecke_mul_oracle(&e, &e).unwrap(), e);
        let one = h.one().unwrap();
        assert_eq!(h.hecke_mul(&h.hecke_mul(&e, &one).unwrap(), &e).unwrap(), e);
        let mass: Rational = e.terms.values().sum();
        assert_eq!(mass, rat(1));
    }
}

#[test]
fn km_basis_elements() {
    let h = algebra(GroupTag::SL2, 2, 1);
    let empty = GenWord(vec![]);
    assert_eq!(h.km_basis(&[0], &empty, &empty).unwrap(), h.km_idempotent().unwrap());
    assert!(matches!(h.km_basis(&[1], &empty, &empty), Err(Error::NotAntiDominant)));
    let t = h.km_basis(&[-1], &empty, &empty).unwrap();
    assert!(h.is_km_invariant(&t).unwrap());
    for label in t.terms.keys() {
        assert!(label.w.lambda == vec![-1] || label.w.lambda == vec![1], "{label:?}");
    }

    let g = algebra(GroupTag::GL(2), 2, 1);
    let t = g.km_basis(&[-1, 0], &empty, &empty).unwrap();
    assert!(g.is_km_invariant(&t).unwrap());
    for label in t.terms.keys() {
        let mut l = label.w.lambda.clone();
        l.sort();
        assert_eq!(l, vec![-1, 0], "{label:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unit_and_associativity(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let h = algebra(GroupTag::GL(2), 2, 1);
        let labels = labels_up_to(&h, 1);
        let pick = |n: usize| HeckeElem::basis(labels[n % labels.len()].clone());
        let (a, b, c) = (pick(i), pick(j), pick(k));
        let one = h.one().unwrap();
        prop_assert_eq!(h.hecke_mul(&one, &a).unwrap(), a.clone());
        prop_assert_eq!(h.hecke_mul(&a, &one).unwrap(), a.clone());
        let left = h.hecke_mul(&h.hecke_mul(&a, &b).unwrap(), &c).unwrap();
        let right = h.hecke_mul(&a, &h.hecke_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_is_bilinear(i in 0usize..64, j in 0usize..64, k in 0usize..64, c in -3i64..4) {
        let h = algebra(GroupTag::SL2, 3, 1);
        let labels = labels_up_to(&h, 1);
        let pick = |n: usize| HeckeElem::basis(labels[n % labels.len()].clone());
        let (a, b, d) = (pick(i), pick(j), pick(k));
        let sum = a.scale(&rat(c)).add(&b);
        let lhs = h.hecke_mul(&sum, &d).unwrap();
        let rhs = h.hecke_mul(&a, &d).unwrap().scale(&rat(c)).add(&h.hecke_mul(&b, &d).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
