use heckelab::affweyl::{AffineWeyl, ExtAffWeylElem};
use heckelab::exactalg::Rational;
use heckelab::rootdata::{build_root_datum, pairing, GroupTag};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn aw(tag: GroupTag) -> AffineWeyl {
    AffineWeyl::new(build_root_datum(tag).unwrap())
}

/// A point of the base alcove: every simple root takes the value 1/(2h), and the
/// central directions are pinned by the Ω functionals.
fn alcove_point(a: &AffineWeyl) -> Vec<Rational> {
    let d = &a.datum;
    let h = d.highest.iter().map(|&r| d.height(r)).max().unwrap() + 1;
    let eps = Rational::new(1.into(), (2 * h).into());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for &s in &d.simples {
        rows.push(d.roots[s].iter().map(|&x| Rational::from_integer(x.into())).collect());
        rhs.push(eps.clone());
    }
    for f in &a.omega().free_functionals {
        rows.push(f.iter().map(|&x| Rational::from_integer(x.into())).collect());
        rhs.push(Rational::zero());
    }
    let n = d.rank;
    assert_eq!(rows.len(), n);
    // Gauss-Jordan over Q
    for c in 0..n {
        let p = (c..n).find(|&r| !rows[r][c].is_zero()).unwrap();
        rows.swap(c, p);
        rhs.swap(c, p);
        let inv = rows[c][c].recip();
        for k in 0..n {
            rows[c][k] = &rows[c][k] * &inv;
        }
        rhs[c] = &rhs[c] * &inv;
        for r in 0..n {
            if r != c && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for k in 0..n {
                    rows[r][k] = &rows[r][k] - &f * &rows[c][k];
                }
                rhs[r] = &rhs[r] - &f * &rhs[c];
            }
        }
    }
    rhs
}

fn eval(chi: &[i64], p: &[Rational]) -> Rational {
    chi.iter().zip(p).fold(Rational::zero(), |acc, (&c, v)| acc + v * Rational::from_integer(c.into()))
}

/// Number of affine root hyperplanes separating p from w·p, with w acting by v -> x·v - λ.
fn hyperplane_count(a: &AffineWeyl, w: &ExtAffWeylElem, p: &[Rational]) -> usize {
    let d = &a.datum;
    let xinv = a.weyl().inv(w.x);
    (0..d.n_pos)
        .map(|r| {
            let pulled = &d.roots[d.weyl_root(xinv, r)];
            let y = eval(pulled, p) - Rational::from_integer(pairing(&d.roots[r], &w.lambda).into());
            assert!(!y.is_integer(), "point landed on a wall");
            let f = y.numer().div_floor(y.denom());
            usize::try_from(f.abs()).unwrap()
        })
        .sum()
}

#[test]
fn length_matches_hyperplane_count() {
    for tag in [GroupTag::SL2, GroupTag::GL(2), GroupTag::GL(3), GroupTag::Sp4, GroupTag::GSp4] {
        let a = aw(tag);
        let p = alcove_point(&a);
        for w in a.ball(5, 1) {
            assert_eq!(a.length(&w), hyperplane_count(&a, &w, &p), "{tag} {w}");
        }
    }
}

#[test]
fn s_elements_have_length_one_and_omega_length_zero() {
    for tag in [GroupTag::SL2, GroupTag::GL(3), GroupTag::Sp4, GroupTag::GSp4] {
        let a = aw(tag);
        for s in a.s_set() {
            assert_eq!(a.length(s), 1);
        }
        for g in a.omega().free_gens.iter().chain(&a.omega().torsion_gens) {
            assert_eq!(a.length(g), 0);
            for s in 0..a.s_set().len() {
                assert!(a.conjugate_s(g, s).is_some(), "{tag}: Ω must normalize S");
            }
        }
    }
}

#[test]
fn length_and_adjoint_predicates_agree() {
    for tag in [GroupTag::SL2, GroupTag::GL(2), GroupTag::Sp4] {
        let a = aw(tag);
        for w in a.ball(4, 1) {
            for s in 0..a.s_set().len() {
                let (l, ad) = a.conj_iwahori_predicate(&w, s);
                assert_eq!(l, ad, "{tag} {w} s{s}");
            }
        }
    }
}

#[test]
fn weyl_lengths_count_inversions() {
    for tag in [GroupTag::GL(4), GroupTag::Sp4, GroupTag::GSp4] {
        let d = build_root_datum(tag).unwrap();
        let w = d.weyl();
        for x in 0..w.len() {
            let inv = (0..d.n_pos).filter(|&r| !d.is_positive(d.weyl_root(x, r))).count();
            assert_eq!(inv, w.elem(x).length());
            assert_eq!(w.from_word(&w.elem(x).word), x);
        }
        let lo = w.longest();
        assert!((0..d.n_pos).all(|r| !d.is_positive(d.weyl_root(lo, r))));
    }
}

fn arb_elem(tag: GroupTag) -> impl Strategy<Value = ExtAffWeylElem> {
    let d = build_root_datum(tag).unwrap();
    let nw = d.weyl().len();
    (proptest::collection::vec(-3i64..=3, d.rank), 0..nw).prop_map(|(lambda, x)| ExtAffWeylElem { lambda, x })
}

fn tags() -> impl Strategy<Value = GroupTag> {
    prop_oneof![Just(GroupTag::SL2), Just(GroupTag::GL(2)), Just(GroupTag::GL(3)), Just(GroupTag::Sp4), Just(GroupTag::GSp4)]
}

proptest! {
    #[test]
    fn group_laws((tag, x, y, z) in tags().prop_flat_map(|t| (Just(t), arb_elem(t), arb_elem(t), arb_elem(t)))) {
        let a = aw(tag);
        prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
        prop_assert_eq!(a.mul(&x, &a.inv(&x)), a.identity());
        prop_assert_eq!(a.length(&x), a.length(&a.inv(&x)));
        prop_assert!(a.length(&a.mul(&x, &y)) <= a.length(&x) + a.length(&y));
        let word = a.decompose(&x);
        prop_assert_eq!(word.letters.len(), a.length(&x));
        prop_assert_eq!(a.evaluate(&word), x);
    }

    #[test]
    fn reflections_are_involutive(tag in tags(), v in proptest::collection::vec(-5i64..=5, 3)) {
        let d = build_root_datum(tag).unwrap();
        let v = &v[..d.rank];
        for r in 0..d.n_roots() {
            prop_assert_eq!(d.reflect_char(r, &d.reflect_char(r, v)), v.to_vec());
            prop_assert_eq!(d.reflect_cochar(r, &d.reflect_cochar(r, v)), v.to_vec());
            prop_assert_eq!(pairing(&d.roots[r], &d.coroots[r]), 2);
            for s in 0..d.n_roots() {
                prop_assert!(d.root_index(&d.reflect_char(r, &d.roots[s])).is_some());
            }
        }
    }
}

#[test]
fn positive_roots_are_nonnegative_combinations() {
    for tag in [GroupTag::SL2, GroupTag::GL(4), GroupTag::Sp4, GroupTag::GSp4] {
        let d = build_root_datum(tag).unwrap();
        for r in 0..d.n_pos {
            assert!(d.simple_coords[r].iter().all(|&c| c >= 0));
            let recon: Vec<i64> = (0..d.rank)
                .map(|i| d.simples.iter().zip(&d.simple_coords[r]).map(|(&s, &c)| c * d.roots[s][i]).sum())
                .collect();
            assert_eq!(recon, d.roots[r]);
        }
    }
}
