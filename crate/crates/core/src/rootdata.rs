//! Root data of the supported split groups and their finite Weyl groups.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupTag {
    SL2,
    GL(usize),
    Sp4,
    GSp4,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::SL2 => write!(f, "SL2"),
            GroupTag::GL(n) => write!(f, "GL{n}"),
            GroupTag::Sp4 => write!(f, "Sp4"),
            GroupTag::GSp4 => write!(f, "GSp4"),
        }
    }
}

impl FromStr for GroupTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SL2" => Ok(GroupTag::SL2),
            "Sp4" => Ok(GroupTag::Sp4),
            "GSp4" => Ok(GroupTag::GSp4),
            _ => match s.strip_prefix("GL").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (2..=4).contains(&n) => Ok(GroupTag::GL(n)),
                _ => Err(Error::UnsupportedGroup(s.to_string())),
            },
        }
    }
}

pub type IVec = Vec<i64>;

pub fn pairing(chi: &[i64], lambda: &[i64]) -> i64 {
    assert_eq!(chi.len(), lambda.len(), "rank mismatch in pairing");
    chi.iter().zip(lambda).map(|(a, b)| a * b).sum()
}

fn mat_vec(m: &[IVec], v: &[i64]) -> IVec {
    m.iter().map(|row| pairing(row, v)).collect()
}

fn mat_mul(a: &[IVec], b: &[IVec]) -> Vec<IVec> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

fn identity(n: usize) -> Vec<IVec> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// An element of the finite Weyl group.
#[derive(Clone, Debug)]
pub struct WeylElem {
    /// Action on X^*(T), acting on column vectors.
    pub action: Vec<IVec>,
    /// Action on X_*(T).
    pub coaction: Vec<IVec>,
    /// Shortlex-least reduced word in the simple reflections (indices into the simple roots).
    pub word: Vec<usize>,
    /// Permutation of root indices.
    pub perm: Vec<usize>,
}

impl WeylElem {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn apply_char(&self, v: &[i64]) -> IVec {
        mat_vec(&self.action, v)
    }

    pub fn apply_cochar(&self, v: &[i64]) -> IVec {
        mat_vec(&self.coaction, v)
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    elems: Vec<WeylElem>,
    by_perm: HashMap<Vec<usize>, usize>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    simple_refl: Vec<usize>,
}

impl WeylGroup {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: usize) -> &WeylElem {
        &self.elems[i]
    }

    pub fn elements(&self) -> impl Iterator<Item = &WeylElem> {
        self.elems.iter()
    }

    pub const IDENTITY: usize = 0;

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Index of the simple reflection s_i.
    pub fn simple(&self, i: usize) -> usize {
        self.simple_refl[i]
    }

    pub fn index_of_perm(&self, perm: &[usize]) -> Option<usize> {
        self.by_perm.get(perm).copied()
    }

    /// The element whose reduced word is given (any word is accepted).
    pub fn from_word(&self, word: &[usize]) -> usize {
        word.iter().fold(Self::IDENTITY, |acc, &s| self.mul(acc, self.simple(s)))
    }

    /// The longest element.
    pub fn longest(&self) -> usize {
        (0..self.len()).max_by_key(|&i| self.elems[i].length()).unwrap_or(0)
    }
}

/// Root datum with a fixed enumeration of roots.
///
/// Positive roots come first, sorted by height and then by descending coordinates;
/// root `i + n_pos` is the negative of root `i`.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub tag: GroupTag,
    pub rank: usize,
    pub roots: Vec<IVec>,
    pub coroots: Vec<IVec>,
    pub n_pos: usize,
    /// Root indices of the simple roots, in order.
    pub simples: Vec<usize>,
    /// Coefficients of each positive root in the simple basis.
    pub simple_coords: Vec<IVec>,
    /// Simple-root indices (into `simples`) of each irreducible component.
    pub components: Vec<Vec<usize>>,
    /// Root index of the highest root of each component.
    pub highest: Vec<usize>,
    by_vec: HashMap<IVec, usize>,
    weyl: WeylGroup,
}

fn raw_roots(tag: GroupTag) -> (usize, Vec<(IVec, IVec)>) {
    match tag {
        GroupTag::SL2 => (1, vec![(vec![2], vec![1])]),
        GroupTag::GL(n) => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v[j] = -1;
                    out.push((v.clone(), v));
                }
            }
            (n, out)
        }
        GroupTag::Sp4 => (
            2,
            vec![
                (vec![1, -1], vec![1, -1]),
                (vec![0, 2], vec![0, 1]),
                (vec![1, 1], vec![1, 1]),
                (vec![2, 0], vec![1, 0]),
            ],
        ),
        GroupTag::GSp4 => (
            3,
            vec![
                (vec![1, -1, 0], vec![1, -1, 0]),
                (vec![0, 2, -1], vec![0, 1, 0]),
                (vec![1, 1, -1], vec![1, 1, 0]),
                (vec![2, 0, -1], vec![1, 0, 0]),
            ],
        ),
    }
}

pub fn build_root_datum(tag: GroupTag) -> Result<RootDatum> {
    if let GroupTag::GL(n) = tag {
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedGroup(tag.to_string()));
        }
    }
    let (rank, pos) = raw_roots(tag);
    let pos_set: HashMap<IVec, usize> = pos.iter().enumerate().map(|(i, (r, _))| (r.clone(), i)).collect();
    // a positive root is simple when it is not the sum of two positive roots
    let is_simple: Vec<bool> = pos
        .iter()
        .map(|(r, _)| {
            !pos.iter().any(|(a, _)| {
                let diff: IVec = r.iter().zip(a).map(|(x, y)| x - y).collect();
                pos_set.contains_key(&diff)
            })
        })
        .collect();
    fn height(i: usize, pos: &[(IVec, IVec)], set: &HashMap<IVec, usize>, simple: &[bool], memo: &mut HashMap<usize, i64>) -> i64 {
        if let Some(&h) = memo.get(&i) {
            return h;
        }
        let h = if simple[i] {
            1
        } else {
            let r = &pos[i].0;
            let (j, _) = pos
                .iter()
                .enumerate()
                .find(|(j, (a, _))| {
                    simple[*j] && {
                        let diff: IVec = r.iter().zip(a).map(|(x, y)| x - y).collect();
                        set.contains_key(&diff)
                    }
                })
                .expect("non-simple positive root has a simple predecessor");
            let diff: IVec = r.iter().zip(&pos[j].0).map(|(x, y)| x - y).collect();
            1 + height(set[&diff], pos, set, simple, memo)
        };
        memo.insert(i, h);
        h
    }
    let mut memo = HashMap::new();
    let mut order: Vec<usize> = (0..pos.len()).collect();
    let heights: Vec<i64> = (0..pos.len()).map(|i| height(i, &pos, &pos_set, &is_simple, &mut memo)).collect();
    order.sort_by(|&a, &b| heights[a].cmp(&heights[b]).then_with(|| pos[b].0.cmp(&pos[a].0)));
    let n_pos = pos.len();
    let mut roots: Vec<IVec> = order.iter().map(|&i| pos[i].0.clone()).collect();
    let mut coroots: Vec<IVec> = order.iter().map(|&i| pos[i].1.clone()).collect();
    for i in 0..n_pos {
        roots.push(roots[i].iter().map(|x| -x).collect());
        coroots.push(coroots[i].iter().map(|x| -x).collect());
    }
    let simples: Vec<usize> = (0..n_pos).filter(|&i| is_simple[order[i]]).collect();
    let by_vec: HashMap<IVec, usize> = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    // simple coordinates, computed in height order
    let mut simple_coords: Vec<IVec> = vec![Vec::new(); n_pos];
    for i in 0..n_pos {
        if let Some(k) = simples.iter().position(|&s| s == i) {
            let mut c = vec![0; simples.len()];
            c[k] = 1;
            simple_coords[i] = c;
            continue;
        }
        let (k, prev) = simples
            .iter()
            .enumerate()
            .find_map(|(k, &s)| {
                let diff: IVec = roots[i].iter().zip(&roots[s]).map(|(x, y)| x - y).collect();
                by_vec.get(&diff).filter(|&&j| j < n_pos).map(|&j| (k, j))
            })
            .expect("positive root decomposes");
        let mut c = simple_coords[prev].clone();
        c[k] += 1;
        simple_coords[i] = c;
    }
    // components: connected pieces of the Dynkin graph
    let r = simples.len();
    let mut comp_of = vec![usize::MAX; r];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..r {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let c = components.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        comp_of[start] = c;
        while let Some(a) = stack.pop() {
            members.push(a);
            for b in 0..r {
                if comp_of[b] == usize::MAX && pairing(&roots[simples[a]], &coroots[simples[b]]) != 0 {
                    comp_of[b] = c;
                    stack.push(b);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    let highest: Vec<usize> = components
        .iter()
        .map(|members| {
            (0..n_pos)
                .filter(|&i| simple_coords[i].iter().enumerate().all(|(k, &c)| c == 0 || members.contains(&k)))
                .max_by_key(|&i| (simple_coords[i].iter().sum::<i64>(), std::cmp::Reverse(i)))
                .expect("component has roots")
        })
        .collect();
    let mut datum = RootDatum {
        tag,
        rank,
        roots,
        coroots,
        n_pos,
        simples,
        simple_coords,
        components,
        highest,
        by_vec,
        weyl: WeylGroup { elems: vec![], by_perm: HashMap::new(), mul: vec![], inv: vec![], simple_refl: vec![] },
    };
    datum.weyl = datum.build_weyl();
    Ok(datum)
}

impl RootDatum {
    pub fn n_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.n_pos
    }

    pub fn neg(&self, i: usize) -> usize {
        (i + self.n_pos) % (2 * self.n_pos)
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.by_vec.get(v).copied()
    }

    pub fn height(&self, i: usize) -> i64 {
        if i < self.n_pos {
            self.simple_coords[i].iter().sum()
        } else {
            -self.height(self.neg(i))
        }
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    /// s_alpha on a character.
    pub fn reflect_char(&self, alpha: usize, v: &[i64]) -> IVec {
        let k = pairing(v, &self.coroots[alpha]);
        v.iter().zip(&self.roots[alpha]).map(|(x, a)| x - k * a).collect()
    }

    /// s_alpha on a cocharacter.
    pub fn reflect_cochar(&self, alpha: usize, v: &[i64]) -> IVec {
        let k = pairing(&self.roots[alpha], v);
        v.iter().zip(&self.coroots[alpha]).map(|(x, a)| x - k * a).collect()
    }

    fn reflection(&self, alpha: usize) -> (Vec<IVec>, Vec<IVec>) {
        let r = self.rank;
        let a = &self.roots[alpha];
        let c = &self.coroots[alpha];
        let act = (0..r).map(|i| (0..r).map(|j| i64::from(i == j) - a[i] * c[j]).collect()).collect();
        let coact = (0..r).map(|i| (0..r).map(|j| i64::from(i == j) - c[i] * a[j]).collect()).collect();
        (act, coact)
    }

    fn perm_of(&self, action: &[IVec]) -> Vec<usize> {
        self.roots
            .iter()
            .map(|r| self.root_index(&mat_vec(action, r)).expect("Weyl action permutes roots"))
            .collect()
    }

    fn build_weyl(&self) -> WeylGroup {
        let r = self.rank;
        let gens: Vec<(Vec<IVec>, Vec<IVec>)> = self.simples.iter().map(|&s| self.reflection(s)).collect();
        let id = identity(r);
        let mut elems = vec![WeylElem { action: id.clone(), coaction: id.clone(), word: vec![], perm: self.perm_of(&id) }];
        let mut by_perm = HashMap::new();
        by_perm.insert(elems[0].perm.clone(), 0);
        let mut head = 0;
        while head < elems.len() {
            for (k, (ga, gc)) in gens.iter().enumerate() {
                let action = mat_mul(&elems[head].action, ga);
                let perm = self.perm_of(&action);
                if by_perm.contains_key(&perm) {
                    continue;
                }
                let coaction = mat_mul(&elems[head].coaction, gc);
                let mut word = elems[head].word.clone();
                word.push(k);
                by_perm.insert(perm.clone(), elems.len());
                elems.push(WeylElem { action, coaction, word, perm });
            }
            head += 1;
        }
        let n = elems.len();
        let mul: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let perm: Vec<usize> = elems[b].perm.iter().map(|&i| elems[a].perm[i]).collect();
                        by_perm[&perm]
                    })
                    .collect()
            })
            .collect();
        let inv: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("group inverse")).collect();
        let simple_refl = (0..self.simples.len()).map(|k| by_perm[&self.perm_of(&gens[k].0)]).collect();
        WeylGroup { elems, by_perm, mul, inv, simple_refl }
    }

    /// Weyl group index of the reflection s_alpha.
    pub fn reflection_index(&self, alpha: usize) -> usize {
        let (act, _) = self.reflection(alpha);
        self.weyl.by_perm[&self.perm_of(&act)]
    }

    /// Image of root index `i` under the Weyl element `w`.
    pub fn weyl_root(&self, w: usize, i: usize) -> usize {
        self.weyl.elems[w].perm[i]
    }
}

pub fn weyl_elements(datum: &RootDatum) -> impl Iterator<Item = &WeylElem> {
    datum.weyl().elements()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_datum() {
        let d = build_root_datum(GroupTag::SL2).unwrap();
        assert_eq!(d.roots, vec![vec![2], vec![-2]]);
        assert_eq!(pairing(&d.roots[0], &d.coroots[0]), 2);
        assert_eq!(d.weyl().len(), 2);
    }

    #[test]
    fn gl3_highest_root() {
        let d = build_root_datum(GroupTag::GL(3)).unwrap();
        assert_eq!(d.roots[d.highest[0]], vec![1, 0, -1]);
        assert_eq!(d.simples, vec![0, 1]);
        assert_eq!(d.roots[0], vec![1, -1, 0]);
        assert_eq!(d.weyl().len(), 6);
    }

    #[test]
    fn sp4_simples_and_highest() {
        let d = build_root_datum(GroupTag::Sp4).unwrap();
        assert_eq!(d.roots[d.simples[0]], vec![1, -1]);
        assert_eq!(d.roots[d.simples[1]], vec![0, 2]);
        assert_eq!(d.roots[d.highest[0]], vec![2, 0]);
        assert_eq!(d.weyl().len(), 8);
    }

    #[test]
    fn gl3_reflection() {
        let d = build_root_datum(GroupTag::GL(3)).unwrap();
        let a = d.root_index(&[1, -1, 0]).unwrap();
        assert_eq!(d.reflect_char(a, &[0, 1, -1]), vec![1, 0, -1]);
    }

    #[test]
    fn parse_tags() {
        assert_eq!("GL3".parse::<GroupTag>().unwrap(), GroupTag::GL(3));
        assert!("GL7".parse::<GroupTag>().is_err());
        assert!("SO5".parse::<GroupTag>().is_err());
    }
}
