use heckelab::affweyl::ExtAffWeylElem;
use heckelab::chevalley::{Chevalley, IntMat, Level, Mat};
use heckelab::exactalg::{FqElem, TruncSeries};
use heckelab::rootdata::GroupTag;
use proptest::prelude::*;

const P: i64 = 14;

fn series(g: &Chevalley, digits: &[u32], val: i64) -> TruncSeries {
    let ds: Vec<FqElem> = digits.iter().map(|&d| g.field.elem(d % g.q())).collect();
    TruncSeries::from_digits(g.field, val, &ds, P)
}

#[test]
fn braid_identities_gl3_sp4() {
    for (tag, q) in [(GroupTag::GL(3), 2), (GroupTag::GL(3), 3), (GroupTag::Sp4, 3), (GroupTag::GSp4, 3)] {
        let g = Chevalley::new(tag, q).unwrap();
        let pi = g.uniformizer(P);
        let ns = g.aw.s_set().len();
        for i in 0..ns {
            for j in 0..ns {
                if i != j {
                    assert!(g.verify_braid(i, j, &pi).unwrap(), "{tag} s{i} s{j}");
                }
            }
        }
    }
    let sp = Chevalley::new(GroupTag::Sp4, 2).unwrap();
    assert_eq!(sp.braid_order(0, 1), Some(4));
    let sl = Chevalley::new(GroupTag::SL2, 2).unwrap();
    assert_eq!(sl.braid_order(0, 1), None);
}

#[test]
fn rank_one_identities() {
    for (tag, q) in [(GroupTag::SL2, 2), (GroupTag::SL2, 3), (GroupTag::GL(3), 3), (GroupTag::Sp4, 3), (GroupTag::GSp4, 2)] {
        let g = Chevalley::new(tag, q).unwrap();
        let pi = g.uniformizer(P);
        for s in 0..g.aw.s_set().len() {
            for x in [series(&g, &[1], 0), series(&g, &[q - 1, 1], 0), series(&g, &[1, 0, 1], 0)] {
                assert!(g.verify_rank1(&x, s, &pi).unwrap(), "{tag} q={q} s{s}");
            }
        }
    }
}

#[test]
fn length_zero_conjugation() {
    for (tag, q) in [(GroupTag::GL(3), 2), (GroupTag::GL(3), 3), (GroupTag::GL(2), 3), (GroupTag::GSp4, 3)] {
        let g = Chevalley::new(tag, q).unwrap();
        let pi = g.uniformizer(P);
        let checks = g.verify_rho_s(&pi).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.holds, "{tag}: {c:?}");
            assert_ne!(c.closed_form, Some(false), "{tag}: {c:?}");
        }
        assert!(checks.iter().any(|c| c.closed_form == Some(true)), "{tag}: the finite-to-affine case occurs");
        for (a, b, ok) in g.verify_rho_commutators(&pi).unwrap() {
            assert!(ok, "{tag}: {a} {b}");
        }
    }
}

/// All reduced words of w, by descent search.
fn reduced_words(g: &Chevalley, w: &ExtAffWeylElem) -> Vec<Vec<usize>> {
    let aw = &g.aw;
    let l = aw.length(w);
    if l == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (k, s) in aw.s_set().iter().enumerate() {
        let rest = aw.mul(s, w);
        if aw.length(&rest) + 1 == l {
            for mut tail in reduced_words(g, &rest) {
                tail.insert(0, k);
                out.push(tail);
            }
        }
    }
    out
}

#[test]
fn representatives_do_not_depend_on_reduced_word() {
    for (tag, q) in [(GroupTag::GL(3), 2), (GroupTag::Sp4, 3)] {
        let g = Chevalley::new(tag, q).unwrap();
        let pi = g.uniformizer(P);
        for w in g.aw.coxeter_ball(4) {
            let words = reduced_words(&g, &w);
            let mats: Vec<Mat> = words
                .iter()
                .map(|word| {
                    word.iter().fold(g.identity(P), |acc, &s| {
                        acc.mul(&g.eval(&g.s_rep_word(s, &pi).unwrap(), P).unwrap())
                    })
                })
                .collect();
            let canonical = g.rep(&w, &pi).unwrap();
            for m in &mats {
                assert!(m.agrees_with(&canonical, 1).unwrap(), "{tag} {w}");
            }
        }
    }
}

#[test]
fn quotient_count_matches_formula() {
    for (tag, q, m) in [(GroupTag::SL2, 2, 1), (GroupTag::SL2, 3, 2), (GroupTag::GL(2), 2, 2), (GroupTag::GL(3), 2, 1)] {
        let g = Chevalley::new(tag, q).unwrap();
        let all = g.enumerate_quotient(m);
        assert_eq!(all.len() as u128, g.iwahori_quotient_size(m));
        let distinct: std::collections::BTreeSet<_> =
            all.iter().step_by(5).map(|c| g.iwahori_coords(&g.from_coords(c, P).unwrap(), m).unwrap()).collect();
        assert_eq!(distinct.len(), all.iter().step_by(5).count());
    }
}

#[test]
fn sl2_lower_corner_example() {
    let g = Chevalley::new(GroupTag::SL2, 3).unwrap();
    let c = series(&g, &[2], 0);
    let td = series(&g, &[1], 1);
    let mut b = g.identity(P);
    b.set(0, 1, c.clone());
    b.set(1, 0, td.clone());
    b.set(1, 1, &g.one(P) + &(&c * &td));
    let key = g.iwahori_coords(&b, 1).unwrap();
    assert_eq!(key.upper[0], c.window(0, 1).unwrap());
    assert_eq!(key.lower[0], td.window(1, 2).unwrap());
    assert!(g.in_level(&b, Level::Iwahori, 1).unwrap());
}

#[test]
fn sp4_commutator_support() {
    let g = Chevalley::new(GroupTag::Sp4, 3).unwrap();
    let d = g.datum();
    let a = d.root_index(&[1, -1]).unwrap();
    let b = d.root_index(&[0, 2]).unwrap();
    let consts = g.structure_constants(a, b);
    let targets: Vec<Vec<i64>> = consts.iter().map(|&(_, _, r, _)| d.roots[r].clone()).collect();
    assert!(targets.contains(&vec![1, 1]));
    assert!(targets.contains(&vec![2, 0]));
    assert!(consts.iter().all(|&(i, j, _, _)| i + j <= 3));
    for (x, y) in [(a, d.neg(b)), (d.root_index(&[2, 0]).unwrap(), d.root_index(&[0, 2]).unwrap())] {
        let _ = g.structure_constants(x, y);
    }
    let long1 = d.root_index(&[2, 0]).unwrap();
    let long2 = d.root_index(&[0, 2]).unwrap();
    assert!(g.structure_constants(long1, long2).is_empty());
}

fn symplectic_form(tag: GroupTag) -> IntMat {
    assert!(matches!(tag, GroupTag::Sp4 | GroupTag::GSp4));
    vec![vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![0, -1, 0, 0], vec![-1, 0, 0, 0]]
}

fn strat_digits() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..27, 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_parameter_and_commutators(tag in prop_oneof![Just(GroupTag::GL(3)), Just(GroupTag::Sp4), Just(GroupTag::GSp4)],
                                     q in prop_oneof![Just(2u32), Just(3u32), Just(5u32)],
                                     s in strat_digits(), t in strat_digits()) {
        let g = Chevalley::new(tag, q).unwrap();
        let d = g.datum();
        let s = series(&g, &s, 0);
        let t = series(&g, &t, 0);
        for a in 0..d.n_roots() {
            let lhs = g.u(a, &s).mul(&g.u(a, &t));
            prop_assert!(lhs.agrees_with(&g.u(a, &(&s + &t)), 1).unwrap());
            for b in 0..d.n_roots() {
                if a == b || a == d.neg(b) {
                    continue;
                }
                let comm = g.u(a, &s).mul(&g.u(b, &t)).mul(&g.u(a, &-&s)).mul(&g.u(b, &-&t));
                let mut rhs = g.identity(P);
                for (i, j, r, c) in g.structure_constants(a, b) {
                    let coeff = (&s.pow(i).unwrap() * &t.pow(j).unwrap()).scale(g.field.from_int(c));
                    rhs = rhs.mul(&g.u(r, &coeff));
                }
                prop_assert!(comm.agrees_with(&rhs, 1).unwrap());
                let eps = g.weyl_sign(a, b);
                prop_assert!(eps == 1 || eps == -1);
            }
        }
    }

    #[test]
    fn symplectic_form_preserved(tag in prop_oneof![Just(GroupTag::Sp4), Just(GroupTag::GSp4)], s in strat_digits()) {
        let g = Chevalley::new(tag, 3).unwrap();
        let j = Mat::from_int(g.field, &symplectic_form(tag), P);
        let c = series(&g, &s, 0);
        for a in 0..g.datum().n_roots() {
            let x = g.u(a, &c);
            prop_assert!(x.transpose().mul(&j).mul(&x).agrees_with(&j, 1).unwrap());
        }
        let pi = g.uniformizer(P);
        for w in g.aw.ball(2, 1) {
            let r = g.rep(&w, &pi).unwrap();
            let form = r.transpose().mul(&j).mul(&r);
            // similitude: g^T J g = sim(g) J
            let sim = form.get(0, 3).clone();
            prop_assert!(form.agrees_with(&j.scale_entries(&sim), 1).unwrap());
        }
    }

    #[test]
    fn coordinates_are_constant_on_cosets(tag in prop_oneof![Just(GroupTag::SL2), Just(GroupTag::GL(2)), Just(GroupTag::Sp4)],
                                          m in 1usize..=2, seed in proptest::collection::vec(0u32..9, 40)) {
        let g = Chevalley::new(tag, 3).unwrap();
        let d = g.datum();
        let mut it = seed.into_iter();
        let mut next = |len: usize| -> Vec<u32> { (0..len).map(|_| it.next().unwrap_or(1)).collect() };
        let upper: Vec<TruncSeries> = (0..d.n_pos).map(|_| series(&g, &next(3), 0)).collect();
        let torus: Vec<TruncSeries> = (0..d.rank).map(|_| { let mut v = next(3); v[0] = 1 + v[0] % (g.q() - 1); series(&g, &v, 0) }).collect();
        let lower: Vec<TruncSeries> = (0..d.n_pos).map(|_| series(&g, &next(3), 1)).collect();
        let b = g.assemble(&heckelab::chevalley::IwahoriFactor { upper, torus, lower }, P).unwrap();
        let key = g.iwahori_coords(&b, m).unwrap();
        let mi = m as i64;
        let mut k = g.identity(P);
        for a in 0..d.n_pos {
            k = k.mul(&g.u(a, &series(&g, &next(2), mi)));
            k = k.mul(&g.u(d.neg(a), &series(&g, &next(2), mi + 1)));
        }
        prop_assert!(g.in_level(&k, Level::Filtration, m).unwrap());
        prop_assert_eq!(g.iwahori_coords(&b.mul(&k), m).unwrap(), key);
    }
}
