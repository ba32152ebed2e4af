//! Verification sweeps shared by the command-line front end and the acceptance target.
//! Each runner returns a [`Report`] with one check per tested instance.

use num_rational::Rational64;
use rayon::prelude::*;

use crate::chevalley::{Atom, Chevalley, GenWord};
use crate::error::{Error, Result};
use crate::exactalg::{field, FqElem, TruncSeries};
use crate::hecke::{HeckeAlgebra, HeckeElem};
use crate::mprad::{alcove_grid, depth_from_conductor, depth_sandwich, verify_mpuc};
use crate::report::Report;
use crate::rootdata::GroupTag;
use crate::transfer::{IsoBudget, RingIso, Transfer};
use crate::whittaker::{GenericCharacter, WhittakerTransfer};

/// Working precision for the matrix identities on representatives.
const REP_PRECISION: i64 = 14;

/// Depth values for (n, conductor) pairs, computed by hand from max(0, (c − n)/n).
pub const DEPTH_TABLE: [(i64, i64, i64, i64); 20] = [
    (1, 0, 0, 1),
    (1, 1, 0, 1),
    (1, 2, 1, 1),
    (1, 5, 4, 1),
    (2, 0, 0, 1),
    (2, 2, 0, 1),
    (2, 3, 1, 2),
    (2, 4, 1, 1),
    (2, 7, 5, 2),
    (3, 2, 0, 1),
    (3, 4, 1, 3),
    (3, 5, 2, 3),
    (3, 9, 2, 1),
    (4, 4, 0, 1),
    (4, 6, 1, 2),
    (4, 7, 3, 4),
    (4, 13, 9, 4),
    (5, 6, 1, 5),
    (5, 12, 7, 5),
    (6, 15, 3, 2),
];

/// The isomorphism of the standard presentation onto the one with uniformizer (1 + t)·t.
pub fn one_plus_t_retwist(q: u32, level: usize) -> Result<RingIso> {
    let f = field(q)?;
    let unit = TruncSeries::from_digits(f, 0, &[FqElem::ONE, FqElem::ONE], level as i64);
    RingIso::retwist(q, level, &unit)
}

/// Counted index of I_m ∩ w̃I_mw̃⁻¹ in I_m against q^{l(w)}, over the ball of Weyl length ≤ `max_len`.
pub fn volume_law(tag: GroupTag, q: u32, m: usize, max_len: usize) -> Result<Report> {
    let h = HeckeAlgebra::new(tag, q, m)?;
    let ball = h.ch.aw.ball(max_len, 1);
    let results = ball
        .par_iter()
        .map(|w| {
            let l = h.length(w);
            let expected = u128::from(q).pow(l as u32);
            let got = h.counted_index(w)? as u128;
            Ok((format!("{tag} q={q} m={m} w={w}: index {got}, q^{l} = {expected}"), got == expected))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::default();
    for (instance, holds) in results {
        report.push("volume", instance, holds);
    }
    Ok(report)
}

/// Every relation family of the presentation, checked with the convolution oracle.
pub fn presentation(tag: GroupTag, q: u32, m: usize) -> Result<Report> {
    HeckeAlgebra::new(tag, q, m)?.verify_presentation(4)
}

/// Products of two basis elements with cells of length ≤ `max_len`, compared across both engines.
/// `per_cell` labels are taken from each cell, 0 meaning all of them.
pub fn dual_engine(tag: GroupTag, q: u32, m: usize, max_len: usize, per_cell: usize) -> Result<Report> {
    let h = HeckeAlgebra::new(tag, q, m)?;
    let mut labels = Vec::new();
    for w in h.ch.aw.ball(max_len, 1) {
        labels.extend(h.sample_cell_labels(&w, per_cell)?);
    }
    let pairs: Vec<(usize, usize)> = (0..labels.len()).flat_map(|i| (0..labels.len()).map(move |j| (i, j))).collect();
    let results = pairs
        .par_iter()
        .map(|&(i, j)| {
            let x = HeckeElem::basis(labels[i].clone());
            let y = HeckeElem::basis(labels[j].clone());
            let holds = h.hecke_mul(&x, &y)? == h.hecke_mul_oracle(&x, &y)?;
            Ok((format!("{tag} q={q} m={m}: {:?} * {:?}", labels[i], labels[j]), holds))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::default();
    for (instance, holds) in results {
        report.push("engines", instance, holds);
    }
    Ok(report)
}

/// Braid and rank-one identities of the S representatives, and the conjugation and torus
/// commutator identities of the length-zero representatives.
pub fn representatives(tag: GroupTag, q: u32) -> Result<Report> {
    let g = Chevalley::new(tag, q)?;
    let pi = g.uniformizer(REP_PRECISION);
    let f = g.field;
    let ns = g.aw.s_set().len();
    let mut report = Report::default();
    for i in 0..ns {
        for j in 0..ns {
            if i != j {
                report.push("braid", format!("{tag} q={q} s{i} s{j}"), g.verify_braid(i, j, &pi)?);
            }
        }
    }
    let samples = [
        TruncSeries::from_digits(f, 0, &[FqElem::ONE], REP_PRECISION),
        TruncSeries::from_digits(f, 0, &[f.from_int(-1), FqElem::ONE], REP_PRECISION),
        TruncSeries::from_digits(f, 0, &[FqElem::ONE, f.elem(0), FqElem::ONE], REP_PRECISION),
    ];
    for s in 0..ns {
        for (k, x) in samples.iter().enumerate() {
            report.push("rank-one", format!("{tag} q={q} s{s} sample {k}"), g.verify_rank1(x, s, &pi)?);
        }
    }
    for c in g.verify_rho_s(&pi)? {
        let instance = format!("{tag} q={q} {c:?}");
        report.push("length-zero-conjugation", instance.clone(), c.holds);
        if c.closed_form.is_some() {
            report.push("conjugation-constant", instance, c.closed_form == Some(true));
        }
    }
    for (a, b, ok) in g.verify_rho_commutators(&pi)? {
        report.push("torus-commutator", format!("{tag} q={q} {a} {b}"), ok);
    }
    Ok(report)
}

/// The length criterion and the adjoint criterion for s̃ ∈ w̃Iw̃⁻¹ agree.
pub fn length_adjoint(tag: GroupTag, max_len: usize) -> Result<Report> {
    let aw = crate::affweyl::AffineWeyl::new(crate::rootdata::build_root_datum(tag)?);
    let mut report = Report::default();
    for w in aw.ball(max_len, 1) {
        for s in 0..aw.s_set().len() {
            let (by_length, by_adjoint) = aw.conj_iwahori_predicate(&w, s);
            report.push(
                "length-adjoint",
                format!("{tag} w={w} s{s}: length {by_length}, adjoint {by_adjoint}"),
                by_length == by_adjoint,
            );
        }
    }
    Ok(report)
}

/// ζ_m for the (1 + t) retwist: structure constants, generators, Γ transport and e_K.
pub fn zeta_iso(tag: GroupTag, q: u32, m: usize, budget: &IsoBudget) -> Result<Report> {
    Transfer::new(tag, m, one_plus_t_retwist(q, m)?)?.verify_iso(budget)
}

/// The Cartan-cell words used on both sides of a K_m-basis element.
pub fn cartan_words(h: &HeckeAlgebra) -> Vec<GenWord> {
    let f = h.ch.field;
    let prec = h.precision();
    let mut out = vec![GenWord::default()];
    out.push(h.ch.finite_rep_word(h.ch.datum().weyl().longest(), prec));
    for c in f.units() {
        out.push(GenWord(vec![Atom::U { root: 0, c: TruncSeries::constant(f, c, prec) }]));
    }
    out
}

/// Antidominant cocharacters with |⟨α, λ⟩| ≤ 2 for every root.
pub fn small_antidominant(tag: GroupTag) -> Result<Vec<Vec<i64>>> {
    match tag {
        GroupTag::SL2 => Ok(vec![vec![0], vec![-1]]),
        GroupTag::GL(2) => Ok(vec![vec![0, 0], vec![-1, 0], vec![-1, 1], vec![1, 1], vec![0, 1], vec![-2, 0]]),
        other => Err(Error::UnsupportedGroup(format!("{other}: no Cartan-cell table"))),
    }
}

/// Kazhdan's basis map against ζ_m on K_m-bi-invariant basis elements, and ζ_m(e_K) = e_K'.
pub fn kazhdan(tag: GroupTag, q: u32, m: usize) -> Result<Report> {
    let tr = Transfer::new(tag, m, one_plus_t_retwist(q, m + 1)?)?;
    let mut report = Report::default();
    let e = tr.source.km_idempotent()?;
    let e_target = tr.target.km_idempotent()?;
    report.push("km-idempotent", format!("{tag} q={q} m={m}: zeta(e_K)"), tr.zeta(&e)? == e_target);
    report.push("km-idempotent", format!("{tag} q={q} m={m}: kaz(e_K)"), tr.kaz(&e)? == e_target);
    let words = cartan_words(&tr.source);
    for lam in small_antidominant(tag)? {
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                let t = tr.source.km_basis(&lam, a, b)?;
                let z = tr.zeta(&t)?;
                let instance = format!("{tag} q={q} m={m} lambda={lam:?} words ({i}, {j})");
                report.push("kaz-on-elements", instance.clone(), tr.kaz(&t)? == z);
                report.push("kaz-on-basis", instance, tr.kaz_basis(&lam, a, b)? == z);
            }
        }
    }
    Ok(report)
}

/// Equivariance of κ for a uniform generic character of the given conductor, with Λ the
/// (1 + t) retwist at level m + 1.
pub fn whittaker(tag: GroupTag, q: u32, m: usize, conductor: i64, max_len: usize) -> Result<Report> {
    let tr = Transfer::new(tag, m, one_plus_t_retwist(q, m + 1)?)?;
    let chi = GenericCharacter::uniform(q, tr.source.ch.datum().simples.len(), FqElem::ONE, conductor)?;
    WhittakerTransfer::new(&tr, chi)?.verify_equivariance(max_len)
}

/// I_{⌈r⌉+1} ⊆ G_{x,r+} on the first `points` alcove grid points for r ∈ {0, 1/2, 1, 3/2}.
pub fn moy_prasad(tag: GroupTag, q: u32, points: usize) -> Result<Report> {
    let ch = Chevalley::new(tag, q)?;
    let grid = alcove_grid(ch.datum(), points);
    let rs = [Rational64::new(0, 1), Rational64::new(1, 2), Rational64::new(1, 1), Rational64::new(3, 2)];
    verify_mpuc(&ch, &grid, &rs)
}

/// The depth formula on the frozen table, with the conductor sandwich.
pub fn depth_table() -> Result<Report> {
    let mut report = Report::default();
    for &(n, c, num, den) in &DEPTH_TABLE {
        let got = depth_from_conductor(n, c)?;
        let expected = Rational64::new(num, den);
        report.push("depth", format!("n={n} c={c}: {got}, expected {expected}"), got == expected);
        report.push("depth-sandwich", format!("n={n} c={c}"), depth_sandwich(n, c)?);
    }
    Ok(report)
}

/// |Γ_w̃| · #(labels in the cell) = |I/I_m|² over the ball of Weyl length ≤ `max_len`.
pub fn orbit_stabilizer(tag: GroupTag, q: u32, m: usize, max_len: usize) -> Result<Report> {
    let h = HeckeAlgebra::new(tag, q, m)?;
    let n = h.quotient_size();
    let mut report = Report::default();
    for w in h.ch.aw.ball(max_len, 0) {
        let gamma = h.gamma_size(&w)? as u128;
        let cells = h.cell_labels(&w)?.len() as u128;
        report.push("orbit-stabilizer", format!("{tag} q={q} m={m} w={w}: {gamma} * {cells} vs {}", n * n), gamma * cells == n * n);
    }
    Ok(report)
}
