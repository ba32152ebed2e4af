//! Moy–Prasad filtration subgroups G_{x,r} and G_{x,r+} at points of the closed fundamental
//! alcove, membership by Iwahori factorization, and depth from conductor for GL_n.

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::chevalley::{Chevalley, Mat};
use crate::error::{Error, Result};
use crate::exactalg::TruncSeries;
use crate::report::Report;
use crate::rootdata::{GroupTag, RootDatum};

/// A point x of the closed fundamental alcove, recorded by the values α(x) on Δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlcovePoint {
    simple_values: Vec<Rational64>,
}

impl AlcovePoint {
    /// Checks 0 ≤ α(x) on Δ and α_0(x) ≤ 1 for the highest root of each component.
    pub fn new(datum: &RootDatum, simple_values: Vec<Rational64>) -> Result<AlcovePoint> {
        if simple_values.len() != datum.simples.len() {
            return Err(Error::Invalid(format!(
                "{} simple values for {} simple roots",
                simple_values.len(),
                datum.simples.len()
            )));
        }
        if simple_values.iter().any(|v| *v < Rational64::zero()) {
            return Err(Error::Invalid("a simple root is negative at x".into()));
        }
        let x = AlcovePoint { simple_values };
        for &h in &datum.highest {
            if x.root_value(datum, h) > Rational64::one() {
                return Err(Error::Invalid("the highest root exceeds 1 at x".into()));
            }
        }
        Ok(x)
    }

    pub fn origin(datum: &RootDatum) -> AlcovePoint {
        AlcovePoint { simple_values: vec![Rational64::zero(); datum.simples.len()] }
    }

    pub fn simple_values(&self) -> &[Rational64] {
        &self.simple_values
    }

    /// α(x) for any root index.
    pub fn root_value(&self, datum: &RootDatum, root: usize) -> Rational64 {
        let (pos, sign) = if datum.is_positive(root) { (root, 1) } else { (datum.neg(root), -1) };
        let v: Rational64 = datum.simple_coords[pos]
            .iter()
            .zip(&self.simple_values)
            .map(|(&c, v)| Rational64::from_integer(c) * v)
            .sum();
        v * Rational64::from_integer(sign)
    }

    fn midpoint(&self, other: &AlcovePoint) -> AlcovePoint {
        let half = Rational64::new(1, 2);
        AlcovePoint {
            simple_values: self.simple_values.iter().zip(&other.simple_values).map(|(a, b)| (a + b) * half).collect(),
        }
    }
}

/// Vertices of the closed alcove (origin first), the barycenter, then midpoints, up to `count`.
pub fn alcove_grid(datum: &RootDatum, count: usize) -> Vec<AlcovePoint> {
    let r = datum.simples.len();
    let mut vertices = vec![AlcovePoint::origin(datum)];
    for i in 0..r {
        let comp = datum.components.iter().position(|c| c.contains(&i)).expect("every simple root has a component");
        let h = datum.highest[comp];
        let coeff = datum.simple_coords[h][i];
        let mut v = vec![Rational64::zero(); r];
        v[i] = Rational64::new(1, coeff);
        vertices.push(AlcovePoint { simple_values: v });
    }
    let n = Rational64::from_integer(vertices.len() as i64);
    let bary = AlcovePoint {
        simple_values: (0..r).map(|i| vertices.iter().map(|v| v.simple_values[i]).sum::<Rational64>() / n).collect(),
    };
    let mut out = vertices.clone();
    out.push(bary.clone());
    for v in &vertices {
        out.push(bary.midpoint(v));
    }
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            out.push(a.midpoint(b));
        }
    }
    let mut unique: Vec<AlcovePoint> = Vec::new();
    for p in out {
        if !unique.contains(&p) {
            unique.push(p);
        }
    }
    unique.truncate(count);
    unique
}

/// The group G_{x,r} or its derived-group counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// G_{x,r} ∩ G^der; for the groups handled here this adds det = 1 on GL_n.
    Derived,
}

/// Root-group exponents e_α with U_α(p^{e_α}) and the torus level k with T_{p^k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpExponents {
    pub roots: Vec<i64>,
    pub torus: i64,
}

impl MpExponents {
    /// Whether e_α + e_{-α} ≥ 1 for all α, so that the group factors as U^+·T·U^- inside I.
    pub fn factorizable(&self, datum: &RootDatum) -> bool {
        (0..datum.n_pos).all(|a| self.roots[a] + self.roots[datum.neg(a)] >= 1)
    }

    /// Componentwise ≥, so that the group of `self` lies in the group of `other`.
    pub fn refines(&self, other: &MpExponents) -> bool {
        self.torus >= other.torus && self.roots.iter().zip(&other.roots).all(|(a, b)| a >= b)
    }
}

/// Exponents of G_{x,r} (plus = false) or G_{x,r+} (plus = true).
pub fn mp_exponents(datum: &RootDatum, x: &AlcovePoint, r: Rational64, plus: bool) -> Result<MpExponents> {
    if r < Rational64::zero() {
        return Err(Error::Invalid("depth must be nonnegative".into()));
    }
    let roots = (0..datum.n_roots())
        .map(|a| {
            let s = x.root_value(datum, a) - r;
            if plus {
                1 - s.ceil().to_integer()
            } else {
                -s.floor().to_integer()
            }
        })
        .collect();
    let torus = if plus { 1 + r.floor().to_integer() } else { r.ceil().to_integer() };
    Ok(MpExponents { roots, torus })
}

/// Membership of g in G_{x,r} or G_{x,r+} through the Iwahori factorization.
pub fn mp_contains(ch: &Chevalley, g: &Mat, x: &AlcovePoint, r: Rational64, plus: bool, variant: Variant) -> Result<bool> {
    let d = ch.datum();
    let e = mp_exponents(d, x, r, plus)?;
    if !e.factorizable(d) {
        return Err(Error::UnsupportedCell("parahoric levels without an Iwahori factorization".into()));
    }
    let f = match ch.iwahori_factor(g) {
        Ok(f) => f,
        Err(Error::NotInIwahori) => return Ok(false),
        Err(err) => return Err(err),
    };
    for (a, y) in f.upper.iter().enumerate() {
        if !y.val_at_least(e.roots[a])? {
            return Ok(false);
        }
    }
    for (a, y) in f.lower.iter().enumerate() {
        if !y.val_at_least(e.roots[d.neg(a)])? {
            return Ok(false);
        }
    }
    let one = ch.one(g.precision());
    for c in &f.torus {
        if !(c - &one).val_at_least(e.torus)? {
            return Ok(false);
        }
    }
    if variant == Variant::Derived && matches!(ch.tag(), GroupTag::GL(_)) {
        let diag = ch.torus(&f.torus)?.diag();
        let det = diag.iter().skip(1).fold(diag[0].clone(), |acc, x| &acc * x);
        if !(&det - &one).is_zero_class() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generators of I_m: u_α(c t^k) over the two lowest allowed layers and torus elements 1 + c t^k.
pub fn filtration_generators(ch: &Chevalley, m: i64, prec: i64) -> Result<Vec<(String, Mat)>> {
    let f = ch.field;
    let d = ch.datum();
    let mut out = Vec::new();
    for a in 0..d.n_roots() {
        let lo = m + i64::from(!d.is_positive(a));
        for k in lo..lo + 2 {
            for &c in &f.prime_basis() {
                out.push((format!("u{a}({c:?}t^{k})"), ch.u(a, &TruncSeries::monomial(f, c, k, prec))));
            }
        }
    }
    let rank = d.rank;
    for i in 0..rank {
        for k in m..m + 2 {
            for &c in &f.prime_basis() {
                let mut coords = vec![ch.one(prec); rank];
                coords[i] = &ch.one(prec) + &TruncSeries::monomial(f, c, k, prec);
                out.push((format!("e{i}(1+{c:?}t^{k})"), ch.torus(&coords)?));
            }
        }
    }
    Ok(out)
}

/// I_{⌈r⌉+1} ⊆ G_{x,r+} on every grid point and depth, generator by generator.
pub fn verify_mpuc(ch: &Chevalley, xs: &[AlcovePoint], rs: &[Rational64]) -> Result<Report> {
    let prec = 16;
    let cases: Vec<(usize, Rational64)> = (0..xs.len()).flat_map(|i| rs.iter().map(move |&r| (i, r))).collect();
    let results = cases
        .par_iter()
        .map(|&(i, r)| {
            let m = r.ceil().to_integer() + 1;
            let gens = filtration_generators(ch, m, prec)?;
            let mut holds = true;
            for (_, g) in &gens {
                holds &= mp_contains(ch, g, &xs[i], r, true, Variant::Full)?;
            }
            Ok((format!("x = {:?}, r = {r}: I_{m} in G_(x,r+)", xs[i].simple_values()), holds))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::default();
    for (instance, holds) in results {
        report.push("mpuc", instance, holds);
    }
    Ok(report)
}

/// depth = max(0, (c − n)/n) for an n-dimensional representation of conductor c.
pub fn depth_from_conductor(n: i64, c: i64) -> Result<Rational64> {
    if n < 1 || c < 0 {
        return Err(Error::Invalid("need n ≥ 1 and c ≥ 0".into()));
    }
    Ok(Rational64::new(c - n, n).max(Rational64::zero()))
}

/// depth ≤ cond ≤ n²·depth + n².
pub fn depth_sandwich(n: i64, c: i64) -> Result<bool> {
    let depth = depth_from_conductor(n, c)?;
    let cond = Rational64::from_integer(c);
    let n2 = Rational64::from_integer(n * n);
    Ok(depth <= cond && cond <= n2 * depth + n2)
}
