//! Lattice keys for left cosets gI and gI_m inside GL_n(F_q((t))).
//!
//! Column j of the standard lattice chain is L_j = O e_0 ⊕ … ⊕ O e_j ⊕ t O e_{j+1} ⊕ …;
//! I is the stabilizer of the chain and gI_m = {h : h e_j ∈ g e_j + t^m g L_j for all j}.
//! Both cosets are therefore determined by Hermite normal forms of the lattices g L_j
//! and, for I_m, the residues of the columns of g modulo t^m g L_j.

use crate::chevalley::Mat;
use crate::error::{Error, Result};
use crate::exactalg::{FqElem, TruncSeries};

pub type CosetKey = Vec<i64>;

/// Upper triangular basis with pivots t^{exps[i]} and reduced entries above them.
struct Hnf {
    exps: Vec<i64>,
    cols: Vec<Vec<TruncSeries>>,
}

fn sub_multiple(col: &mut [TruncSeries], c: &TruncSeries, other: &[TruncSeries]) {
    for (x, y) in col.iter_mut().zip(other) {
        *x = &*x - &(c * y);
    }
}

fn lost(what: &str) -> Error {
    Error::InsufficientPrecision(format!("lattice key: {what}"))
}

fn hnf(mut cols: Vec<Vec<TruncSeries>>) -> Result<Hnf> {
    let n = cols.len();
    let mut exps = vec![0; n];
    for i in (0..n).rev() {
        let j = (0..=i)
            .filter(|&j| !cols[j][i].is_zero_class())
            .min_by_key(|&j| cols[j][i].min_valuation())
            .ok_or_else(|| lost("no pivot"))?;
        cols.swap(i, j);
        let a = cols[i][i].min_valuation();
        let unit_inv = cols[i][i].shift(-a).inv()?;
        for x in cols[i].iter_mut() {
            *x = &*x * &unit_inv;
        }
        let f = cols[i][i].field();
        cols[i][i] = TruncSeries::monomial(f, FqElem::ONE, a, cols[i][i].precision());
        let (head, tail) = cols.split_at_mut(i);
        let piv = &tail[0];
        for col in head.iter_mut() {
            let c = col[i].shift(-a);
            if !c.is_zero_class() {
                sub_multiple(col, &c, piv);
            }
        }
        exps[i] = a;
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let e = &cols[j][i];
            if e.precision() < exps[i] {
                return Err(lost("entry above pivot"));
            }
            let (_, hi) = e.split_at(exps[i]);
            if !hi.is_zero_class() {
                let (head, tail) = cols.split_at_mut(j);
                sub_multiple(&mut tail[0], &hi, &head[i]);
            }
        }
    }
    Ok(Hnf { exps, cols })
}

/// Digits of x from min(v(x), to) up to t^{to-1}, with their start and count.
fn encode_window(out: &mut CosetKey, x: &TruncSeries, to: i64) -> Result<()> {
    if x.precision() < to {
        return Err(lost("digits below the cut are unknown"));
    }
    let lo = x.valuation().unwrap_or(to).min(to);
    let digits = x.window(lo, to)?;
    out.push(lo);
    out.push(digits.len() as i64);
    out.extend(digits.iter().map(|d| i64::from(d.value())));
    Ok(())
}

fn encode_lattice(out: &mut CosetKey, h: &Hnf) -> Result<()> {
    let n = h.exps.len();
    for j in 0..n {
        out.push(h.exps[j]);
        for i in 0..j {
            encode_window(out, &h.cols[j][i], h.exps[i])?;
        }
    }
    Ok(())
}

/// Reduces v modulo t^m·M where `h` is the normal form of M, then encodes it.
fn encode_residue(out: &mut CosetKey, mut v: Vec<TruncSeries>, h: &Hnf, m: i64) -> Result<()> {
    let n = v.len();
    for i in (0..n).rev() {
        let cut = h.exps[i] + m;
        if v[i].precision() < cut {
            return Err(lost("residue digits unknown"));
        }
        let (_, hi) = v[i].split_at(cut);
        if !hi.is_zero_class() {
            let c = hi.shift(m);
            sub_multiple(&mut v, &c, &h.cols[i]);
        }
    }
    for (i, x) in v.iter().enumerate() {
        encode_window(out, x, h.exps[i] + m)?;
    }
    Ok(())
}

fn chain_lattice(g: &Mat, j: usize) -> Vec<Vec<TruncSeries>> {
    let n = g.size();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| if k <= j { g.get(i, k).clone() } else { g.get(i, k).shift(1) })
                .collect()
        })
        .collect()
}

fn column(g: &Mat, j: usize) -> Vec<TruncSeries> {
    (0..g.size()).map(|i| g.get(i, j).clone()).collect()
}

/// Complete invariant of the left coset gI.
pub fn iwahori_key(g: &Mat) -> Result<CosetKey> {
    let mut out = Vec::new();
    for j in 0..g.size() {
        encode_lattice(&mut out, &hnf(chain_lattice(g, j))?)?;
    }
    Ok(out)
}

/// Complete invariant of the left coset gI_m.
pub fn filtration_key(g: &Mat, m: usize) -> Result<CosetKey> {
    let mut out = Vec::new();
    for j in 0..g.size() {
        let h = hnf(chain_lattice(g, j))?;
        encode_lattice(&mut out, &h)?;
        encode_residue(&mut out, column(g, j), &h, m as i64)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::Chevalley;
    use crate::rootdata::GroupTag;

    #[test]
    fn keys_see_filtration_cosets() {
        let g = Chevalley::new(GroupTag::SL2, 3).unwrap();
        let p = 12;
        let all = g.enumerate_quotient(1);
        let keys: std::collections::HashSet<CosetKey> =
            all.iter().map(|c| filtration_key(&g.from_coords(c, p).unwrap(), 1).unwrap()).collect();
        assert_eq!(keys.len(), all.len());
        let ik: std::collections::HashSet<CosetKey> =
            all.iter().map(|c| iwahori_key(&g.from_coords(c, p).unwrap()).unwrap()).collect();
        assert_eq!(ik.len(), 1);
    }
}
