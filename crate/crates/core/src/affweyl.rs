//! The extended affine Weyl group X_*(T) ⋊ W, its length function and the
//! decomposition into a Coxeter part and the length-zero subgroup.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::rootdata::{pairing, IVec, RootDatum, WeylGroup};

/// A pair (λ, x) with λ a cocharacter and x an index into the finite Weyl group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtAffWeylElem {
    pub lambda: IVec,
    pub x: usize,
}

impl fmt::Display for ExtAffWeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, w{})", self.lambda, self.x)
    }
}

/// A reduced word in S followed by the exponents of the length-zero part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SWord {
    /// Indices into the ordered generating set S.
    pub letters: Vec<usize>,
    /// Exponents of the free generators of Ω.
    pub free: Vec<i64>,
    /// Exponents of the torsion generators, reduced into [0, order).
    pub torsion: Vec<i64>,
}

/// Presentation of Ω ≅ X_*(T)/Q∨ by integer functionals.
#[derive(Clone, Debug)]
pub struct OmegaData {
    /// Functionals on X_* giving the free coordinates.
    pub free_functionals: Vec<IVec>,
    /// Functionals and moduli giving the torsion coordinates.
    pub torsion_functionals: Vec<(IVec, i64)>,
    pub free_gens: Vec<ExtAffWeylElem>,
    pub torsion_gens: Vec<ExtAffWeylElem>,
}

/// Which root an element of S reflects in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SKind {
    /// A finite simple reflection, with the index of its root.
    Finite(usize),
    /// The affine reflection of a component, with the root index of that component's highest root.
    Affine { component: usize, highest: usize },
}

/// The extended affine Weyl group of a root datum.
#[derive(Clone, Debug)]
pub struct AffineWeyl {
    pub datum: RootDatum,
    s_elems: Vec<ExtAffWeylElem>,
    s_kinds: Vec<SKind>,
    omega: OmegaData,
}

fn neg(v: &[i64]) -> IVec {
    v.iter().map(|x| -x).collect()
}

fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Smith normal form of an integer matrix: returns (U, U^{-1}, diagonal) with U·A·V diagonal.
fn smith_rows(a: &[IVec], rows: usize, cols: usize) -> (Vec<IVec>, Vec<IVec>, Vec<i64>) {
    let mut m: Vec<IVec> = a.to_vec();
    let mut u: Vec<IVec> = (0..rows).map(|i| (0..rows).map(|j| i64::from(i == j)).collect()).collect();
    let mut uinv = u.clone();
    // row_j += c * row_i on m and u; the inverse column op on uinv
    let row_add = |m: &mut Vec<IVec>, u: &mut Vec<IVec>, uinv: &mut Vec<IVec>, j: usize, i: usize, c: i64| {
        for k in 0..cols {
            m[j][k] += c * m[i][k];
        }
        for k in 0..rows {
            u[j][k] += c * u[i][k];
        }
        for row in uinv.iter_mut() {
            row[i] -= c * row[j];
        }
    };
    let row_swap = |m: &mut Vec<IVec>, u: &mut Vec<IVec>, uinv: &mut Vec<IVec>, i: usize, j: usize| {
        m.swap(i, j);
        u.swap(i, j);
        for row in uinv.iter_mut() {
            row.swap(i, j);
        }
    };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| (m[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            row_swap(&mut m, &mut u, &mut uinv, t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    row_add(&mut m, &mut u, &mut uinv, i, t, -q);
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                for row in m.iter_mut() {
                    row[j] -= q * row[t];
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % m[t][t] != 0));
            match bad {
                Some(i) => row_add(&mut m, &mut u, &mut uinv, t, i, 1),
                None => break,
            }
        }
        if m[t][t] < 0 {
            for k in 0..cols {
                m[t][k] = -m[t][k];
            }
            for k in 0..rows {
                u[t][k] = -u[t][k];
            }
            for row in uinv.iter_mut() {
                row[t] = -row[t];
            }
        }
        diag.push(m[t][t]);
    }
    (u, uinv, diag)
}

impl AffineWeyl {
    pub fn new(datum: RootDatum) -> AffineWeyl {
        let r = datum.simples.len();
        let mut s_elems = Vec::new();
        let mut s_kinds = Vec::new();
        for (k, &alpha) in datum.simples.iter().enumerate() {
            s_elems.push(ExtAffWeylElem { lambda: vec![0; datum.rank], x: datum.weyl().simple(k) });
            s_kinds.push(SKind::Finite(alpha));
        }
        for (c, &h) in datum.highest.iter().enumerate() {
            s_elems.push(ExtAffWeylElem { lambda: neg(&datum.coroots[h]), x: datum.reflection_index(h) });
            s_kinds.push(SKind::Affine { component: c, highest: h });
        }
        debug_assert_eq!(s_elems.len(), r + datum.components.len());
        let mut aw = AffineWeyl {
            datum,
            s_elems,
            s_kinds,
            omega: OmegaData { free_functionals: vec![], torsion_functionals: vec![], free_gens: vec![], torsion_gens: vec![] },
        };
        aw.omega = aw.build_omega();
        aw
    }

    fn build_omega(&self) -> OmegaData {
        let d = &self.datum;
        let rows = d.rank;
        let cols = d.simples.len();
        let cmat: Vec<IVec> = (0..rows).map(|i| d.simples.iter().map(|&s| d.coroots[s][i]).collect()).collect();
        let (u, uinv, diag) = smith_rows(&cmat, rows, cols);
        let orient = |mut f: IVec| -> IVec {
            if f.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                f = neg(&f);
            }
            f
        };
        let mut free_functionals = Vec::new();
        let mut torsion_functionals = Vec::new();
        let mut free_lifts = Vec::new();
        let mut torsion_lifts = Vec::new();
        for k in 0..rows {
            let dk = diag.get(k).copied().unwrap_or(0);
            if dk == 1 {
                continue;
            }
            let f = orient(u[k].clone());
            let sign = if f == u[k] { 1 } else { -1 };
            let lift: IVec = (0..rows).map(|i| sign * uinv[i][k]).collect();
            if dk == 0 {
                free_functionals.push(f);
                free_lifts.push(lift);
            } else {
                let f = f.iter().map(|x| x.rem_euclid(dk)).collect();
                torsion_functionals.push((f, dk));
                torsion_lifts.push(lift);
            }
        }
        let reduce = |lambda: IVec| self.length_zero_part(&ExtAffWeylElem { lambda, x: WeylGroup::IDENTITY });
        OmegaData {
            free_functionals,
            torsion_functionals,
            free_gens: free_lifts.into_iter().map(reduce).collect(),
            torsion_gens: torsion_lifts.into_iter().map(reduce).collect(),
        }
    }

    pub fn weyl(&self) -> &WeylGroup {
        self.datum.weyl()
    }

    pub fn identity(&self) -> ExtAffWeylElem {
        ExtAffWeylElem { lambda: vec![0; self.datum.rank], x: WeylGroup::IDENTITY }
    }

    /// The ordered set S: finite simple reflections, then one affine reflection per component.
    pub fn s_set(&self) -> &[ExtAffWeylElem] {
        &self.s_elems
    }

    pub fn s_kind(&self, k: usize) -> SKind {
        self.s_kinds[k]
    }

    pub fn n_finite_simple(&self) -> usize {
        self.datum.simples.len()
    }

    pub fn translation(&self, lambda: IVec) -> ExtAffWeylElem {
        ExtAffWeylElem { lambda, x: WeylGroup::IDENTITY }
    }

    pub fn finite(&self, x: usize) -> ExtAffWeylElem {
        ExtAffWeylElem { lambda: vec![0; self.datum.rank], x }
    }

    pub fn mul(&self, a: &ExtAffWeylElem, b: &ExtAffWeylElem) -> ExtAffWeylElem {
        let w = self.weyl();
        ExtAffWeylElem { lambda: add(&a.lambda, &w.elem(a.x).apply_cochar(&b.lambda)), x: w.mul(a.x, b.x) }
    }

    pub fn inv(&self, a: &ExtAffWeylElem) -> ExtAffWeylElem {
        let w = self.weyl();
        let xi = w.inv(a.x);
        ExtAffWeylElem { lambda: neg(&w.elem(xi).apply_cochar(&a.lambda)), x: xi }
    }

    pub fn length(&self, w: &ExtAffWeylElem) -> usize {
        let d = &self.datum;
        let xinv = self.weyl().inv(w.x);
        (0..d.n_pos)
            .map(|a| {
                let k = pairing(&d.roots[a], &w.lambda);
                if d.is_positive(d.weyl_root(xinv, a)) {
                    k.unsigned_abs() as usize
                } else {
                    (k + 1).unsigned_abs() as usize
                }
            })
            .sum()
    }

    /// Strips left descents until the length-zero part remains.
    fn length_zero_part(&self, w: &ExtAffWeylElem) -> ExtAffWeylElem {
        self.strip(w).1
    }

    fn strip(&self, w: &ExtAffWeylElem) -> (Vec<usize>, ExtAffWeylElem) {
        let mut cur = w.clone();
        let mut len = self.length(&cur);
        let mut letters = Vec::with_capacity(len);
        while len > 0 {
            let (k, next) = self
                .s_elems
                .iter()
                .enumerate()
                .map(|(k, s)| (k, self.mul(s, &cur)))
                .find(|(_, next)| self.length(next) < len)
                .expect("an element of positive length has a left descent");
            letters.push(k);
            cur = next;
            len -= 1;
        }
        (letters, cur)
    }

    pub fn omega(&self) -> &OmegaData {
        &self.omega
    }

    /// Coordinates of λ in X_*/Q∨ under the fixed presentation.
    pub fn omega_class(&self, lambda: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let free = self.omega.free_functionals.iter().map(|f| pairing(f, lambda)).collect();
        let torsion = self.omega.torsion_functionals.iter().map(|(f, n)| pairing(f, lambda).rem_euclid(*n)).collect();
        (free, torsion)
    }

    /// The length-zero element with the given Ω coordinates.
    pub fn omega_elem(&self, free: &[i64], torsion: &[i64]) -> ExtAffWeylElem {
        let mut acc = self.identity();
        for (g, &e) in self.omega.free_gens.iter().zip(free) {
            acc = self.mul(&acc, &self.pow(g, e));
        }
        for (g, &e) in self.omega.torsion_gens.iter().zip(torsion) {
            acc = self.mul(&acc, &self.pow(g, e));
        }
        acc
    }

    pub fn pow(&self, g: &ExtAffWeylElem, e: i64) -> ExtAffWeylElem {
        let base = if e < 0 { self.inv(g) } else { g.clone() };
        (0..e.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
    }

    /// Lexicographically least reduced S-word followed by normalized Ω exponents.
    pub fn decompose(&self, w: &ExtAffWeylElem) -> SWord {
        let (letters, rest) = self.strip(w);
        let (free, torsion) = self.omega_class(&rest.lambda);
        debug_assert_eq!(self.omega_elem(&free, &torsion), rest);
        SWord { letters, free, torsion }
    }

    pub fn evaluate(&self, word: &SWord) -> ExtAffWeylElem {
        let s = word.letters.iter().fold(self.identity(), |acc, &k| self.mul(&acc, &self.s_elems[k]));
        self.mul(&s, &self.omega_elem(&word.free, &word.torsion))
    }

    /// The two sides of the descent criterion for right multiplication by `s`:
    /// whether the length goes up, and whether conjugation by a representative of `w`
    /// carries the corresponding root subgroup into the Iwahori subgroup.
    pub fn conj_iwahori_predicate(&self, w: &ExtAffWeylElem, s: usize) -> (bool, bool) {
        let d = &self.datum;
        let length_side = self.length(&self.mul(w, &self.s_elems[s])) == self.length(w) + 1;
        let (beta, shift) = match self.s_kinds[s] {
            SKind::Finite(a) => (d.weyl_root(w.x, a), 0),
            SKind::Affine { highest, .. } => (d.weyl_root(w.x, d.neg(highest)), 1),
        };
        let e = pairing(&d.roots[beta], &w.lambda) + shift;
        let adjoint_side = if d.is_positive(beta) { e >= 0 } else { e >= 1 };
        (length_side, adjoint_side)
    }

    /// Minimal-length representatives of W_θ\W, as Weyl group indices.
    pub fn minimal_coset_reps(&self, theta: &[usize]) -> Vec<usize> {
        let d = &self.datum;
        let w = self.weyl();
        (0..w.len())
            .filter(|&x| {
                let xi = w.inv(x);
                theta.iter().all(|&k| d.is_positive(d.weyl_root(xi, d.simples[k])))
            })
            .collect()
    }

    /// All elements of the Coxeter part of length at most `max_len`.
    pub fn coxeter_ball(&self, max_len: usize) -> Vec<ExtAffWeylElem> {
        let mut seen: HashSet<ExtAffWeylElem> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut queue = VecDeque::from([(self.identity(), 0usize)]);
        while let Some((w, l)) = queue.pop_front() {
            if l == max_len {
                continue;
            }
            for s in &self.s_elems {
                let ws = self.mul(&w, s);
                if self.length(&ws) == l + 1 && seen.insert(ws.clone()) {
                    out.push(ws.clone());
                    queue.push_back((ws, l + 1));
                }
            }
        }
        out
    }

    /// Elements of length at most `max_len` whose free Ω exponents lie in `-spread..=spread`.
    pub fn ball(&self, max_len: usize, spread: i64) -> Vec<ExtAffWeylElem> {
        let cox = self.coxeter_ball(max_len);
        let nfree = self.omega.free_gens.len();
        let mut omegas = vec![self.identity()];
        for g in 0..nfree {
            let mut next = Vec::new();
            for o in &omegas {
                for e in -spread..=spread {
                    next.push(self.mul(o, &self.pow(&self.omega.free_gens[g], e)));
                }
            }
            omegas = next;
        }
        for (g, (_, n)) in self.omega.torsion_gens.iter().zip(&self.omega.torsion_functionals) {
            omegas = omegas.iter().flat_map(|o| (0..*n).map(move |e| (o.clone(), e))).map(|(o, e)| self.mul(&o, &self.pow(g, e))).collect();
        }
        cox.iter().flat_map(|w| omegas.iter().map(move |o| (w, o))).map(|(w, o)| self.mul(w, o)).collect()
    }

    /// Index in S of ω s ω^{-1}, when that conjugate lies in S.
    pub fn conjugate_s(&self, omega: &ExtAffWeylElem, s: usize) -> Option<usize> {
        let c = self.mul(&self.mul(omega, &self.s_elems[s]), &self.inv(omega));
        self.s_elems.iter().position(|t| *t == c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_datum, GroupTag};

    fn aw(tag: GroupTag) -> AffineWeyl {
        AffineWeyl::new(build_root_datum(tag).unwrap())
    }

    #[test]
    fn sl2_affine_reflection_product() {
        let a = aw(GroupTag::SL2);
        let s1 = a.s_set()[0].clone();
        let s0 = a.s_set()[1].clone();
        assert_eq!(s0.lambda, vec![-1]);
        let p = a.mul(&s0, &s1);
        assert_eq!(p, a.translation(vec![-1]));
        assert_eq!(a.length(&p), 2);
        assert_eq!(a.length(&s0), 1);
        let w = a.decompose(&p);
        assert_eq!(w.letters, vec![1, 0]);
    }

    #[test]
    fn gl2_shift_has_length_zero() {
        let a = aw(GroupTag::GL(2));
        let s = a.weyl().simple(0);
        let rho = ExtAffWeylElem { lambda: vec![0, 1], x: s };
        assert_eq!(a.length(&rho), 0);
        assert_eq!(a.omega().free_gens, vec![rho]);
        assert_eq!(a.omega().free_functionals, vec![vec![1, 1]]);
        let w = a.decompose(&a.translation(vec![1, 1]));
        assert!(w.letters.is_empty());
        assert_eq!(w.free, vec![2]);
    }

    #[test]
    fn omega_trivial_for_simply_connected() {
        for tag in [GroupTag::SL2, GroupTag::Sp4] {
            let a = aw(tag);
            assert!(a.omega().free_gens.is_empty());
            assert!(a.omega().torsion_gens.is_empty());
        }
        let g = aw(GroupTag::GSp4);
        assert_eq!(g.omega().free_gens.len(), 1);
        assert_eq!(g.length(&g.omega().free_gens[0]), 0);
    }

    #[test]
    fn conj_examples() {
        let a = aw(GroupTag::SL2);
        assert_eq!(a.conj_iwahori_predicate(&a.identity(), 0), (true, true));
        let s1 = a.s_set()[0].clone();
        let s0 = a.s_set()[1].clone();
        assert_eq!(a.conj_iwahori_predicate(&s1, 0), (false, false));
        assert_eq!(a.conj_iwahori_predicate(&s0, 0), (true, true));
    }

    #[test]
    fn coset_reps_gl3() {
        let a = aw(GroupTag::GL(3));
        assert_eq!(a.minimal_coset_reps(&[0]).len(), 3);
        assert_eq!(a.minimal_coset_reps(&[0, 1]), vec![0]);
        assert_eq!(a.minimal_coset_reps(&[]).len(), 6);
    }
}
