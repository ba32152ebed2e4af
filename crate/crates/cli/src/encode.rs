//! JSON encodings of Weyl elements, coset labels, Hecke elements, Whittaker vectors and series.

use heckelab::affweyl::ExtAffWeylElem;
use heckelab::chevalley::{Chevalley, IwahoriCoords};
use heckelab::exactalg::{CycInt, Field, FqElem, Rational, TruncSeries};
use heckelab::hecke::{CosetLabel, HeckeAlgebra, HeckeElem};
use heckelab::report::Report;
use heckelab::whittaker::WhitVector;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "heckelab/1";

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn as_array<'a>(v: &'a Value, what: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| usage(format!("{what} must be an array")))
}

fn as_i64(v: &Value, what: &str) -> CliResult<i64> {
    v.as_i64().ok_or_else(|| usage(format!("{what} must be an integer")))
}

fn int_vec(v: &Value, what: &str) -> CliResult<Vec<i64>> {
    as_array(v, what)?.iter().map(|x| as_i64(x, what)).collect()
}

fn field_elem(f: &Field, v: &Value) -> CliResult<FqElem> {
    let code = as_i64(v, "field element")?;
    if code < 0 || code >= i64::from(f.q()) {
        return Err(usage(format!("field element code {code} out of range for q = {}", f.q())));
    }
    Ok(f.elem(code as u32))
}

/// A Weyl element as its translation part and a reduced word of its finite part.
pub fn weyl_to_json(ch: &Chevalley, w: &ExtAffWeylElem) -> Value {
    json!({ "lambda": w.lambda, "weyl": ch.datum().weyl().elem(w.x).word })
}

pub fn weyl_from_json(ch: &Chevalley, v: &Value) -> CliResult<ExtAffWeylElem> {
    let lambda = int_vec(&v["lambda"], "lambda")?;
    if lambda.len() != ch.datum().rank {
        return Err(usage(format!("lambda has {} entries, the torus has rank {}", lambda.len(), ch.datum().rank)));
    }
    let word: Vec<usize> = int_vec(&v["weyl"], "weyl")?
        .into_iter()
        .map(|k| {
            usize::try_from(k)
                .ok()
                .filter(|&k| k < ch.datum().simples.len())
                .ok_or_else(|| usage(format!("no simple reflection {k}")))
        })
        .collect::<CliResult<_>>()?;
    Ok(ExtAffWeylElem { lambda, x: ch.datum().weyl().from_word(&word) })
}

fn digits_to_json(rows: &[Vec<FqElem>]) -> Value {
    json!(rows.iter().map(|r| r.iter().map(|c| c.value()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn digits_from_json(f: &Field, v: &Value, rows: usize, width: usize, what: &str) -> CliResult<Vec<Vec<FqElem>>> {
    let arr = as_array(v, what)?;
    if arr.len() != rows {
        return Err(usage(format!("{what} needs {rows} rows")));
    }
    arr.iter()
        .map(|r| {
            let r = as_array(r, what)?;
            if r.len() != width {
                return Err(usage(format!("{what} rows need {width} digits")));
            }
            r.iter().map(|c| field_elem(f, c)).collect()
        })
        .collect()
}

pub fn coords_to_json(c: &IwahoriCoords) -> Value {
    json!({ "upper": digits_to_json(&c.upper), "torus": digits_to_json(&c.torus), "lower": digits_to_json(&c.lower) })
}

pub fn coords_from_json(h: &HeckeAlgebra, v: &Value) -> CliResult<IwahoriCoords> {
    let d = h.ch.datum();
    let f = h.ch.field;
    Ok(IwahoriCoords {
        upper: digits_from_json(f, &v["upper"], d.n_pos, h.m, "upper")?,
        torus: digits_from_json(f, &v["torus"], d.rank, h.m, "torus")?,
        lower: digits_from_json(f, &v["lower"], d.n_pos, h.m, "lower")?,
    })
}

pub fn label_to_json(ch: &Chevalley, l: &CosetLabel) -> Value {
    let w = weyl_to_json(ch, &l.w);
    json!({ "lambda": w["lambda"], "weyl": w["weyl"], "b1": coords_to_json(&l.b1), "b2": coords_to_json(&l.b2) })
}

pub fn hecke_to_json(h: &HeckeAlgebra, e: &HeckeElem) -> Value {
    let terms: Vec<Value> = e
        .terms
        .iter()
        .map(|(l, c)| json!({ "coeff": c.to_string(), "label": label_to_json(&h.ch, l) }))
        .collect();
    json!({ "terms": terms })
}

/// The element itself, or the "product" or "image" field of an earlier report.
fn element_body(v: &Value) -> &Value {
    ["product", "image"].iter().map(|k| &v[*k]).find(|x| x.is_object()).unwrap_or(v)
}

/// Labels are re-canonicalized, so any representative pair (b1, b2) of the double coset is accepted.
pub fn hecke_from_json(h: &HeckeAlgebra, v: &Value) -> CliResult<HeckeElem> {
    let v = element_body(v);
    let mut out = HeckeElem::zero();
    for t in as_array(&v["terms"], "terms")? {
        let coeff: Rational = t["coeff"]
            .as_str()
            .ok_or_else(|| usage("coeff must be a string \"num/den\""))?
            .parse()
            .map_err(|_| usage("coeff must be a rational \"num/den\""))?;
        let l = &t["label"];
        let w = weyl_from_json(&h.ch, l)?;
        let b1 = h.from_coords(&coords_from_json(h, &l["b1"])?)?;
        let b2 = h.from_coords(&coords_from_json(h, &l["b2"])?)?;
        out.add_term(h.canonical(&w, &b1, &b2)?, coeff);
    }
    Ok(out)
}

pub fn vector_to_json(ch: &Chevalley, v: &WhitVector, p: u32) -> Value {
    let terms: Vec<Value> = v
        .terms
        .iter()
        .map(|((w, b), c)| json!({ "coeff": c.coords(), "w": weyl_to_json(ch, w), "b": coords_to_json(b) }))
        .collect();
    json!({ "p": p, "terms": terms })
}

pub fn vector_from_json(h: &HeckeAlgebra, v: &Value, p: u32) -> CliResult<WhitVector> {
    let v = element_body(v);
    let mut out = WhitVector::zero();
    for t in as_array(&v["terms"], "terms")? {
        let coeff = CycInt::from_coords(p, int_vec(&t["coeff"], "coeff")?);
        out.add_term((weyl_from_json(&h.ch, &t["w"])?, coords_from_json(h, &t["b"])?), coeff);
    }
    Ok(out)
}

pub fn series_to_json(x: &TruncSeries) -> Value {
    json!({
        "valuation": x.min_valuation(),
        "digits": x.digits().iter().map(|c| c.value()).collect::<Vec<_>>(),
        "precision": x.precision(),
    })
}

/// {"valuation": v, "digits": [...]} read modulo t^prec.
pub fn series_from_json(f: &'static Field, v: &Value, prec: i64) -> CliResult<TruncSeries> {
    let val = if v["valuation"].is_null() { 0 } else { as_i64(&v["valuation"], "valuation")? };
    let digits: Vec<FqElem> = as_array(&v["digits"], "digits")?.iter().map(|c| field_elem(f, c)).collect::<CliResult<_>>()?;
    Ok(TruncSeries::from_digits(f, val, &digits, prec))
}

pub fn report_to_json(r: &Report) -> Value {
    let families: serde_json::Map<String, Value> = r
        .counts()
        .into_iter()
        .map(|(fam, ok, n)| (fam.to_string(), json!({ "passed": ok, "total": n })))
        .collect();
    let first = r.mismatches().first().map(|c| json!({ "family": c.family, "instance": c.instance }));
    json!({
        "passed": r.checks.iter().filter(|c| c.holds).count(),
        "total": r.checks.len(),
        "families": families,
        "first_failure": first,
    })
}
