//! Handlers for each subcommand. Each returns a JSON body, a one-line summary and the first
//! failing identity, if any.

use heckelab::affweyl::SKind;
use heckelab::exactalg::field;
use heckelab::hecke::{HeckeElem, GAMMA_THRESHOLD};
use heckelab::mprad::{depth_from_conductor, mp_exponents, AlcovePoint};
use heckelab::report::Report;
use heckelab::rootdata::{build_root_datum, pairing, GroupTag};
use heckelab::suites;
use heckelab::transfer::{eisenstein_transfer, EisensteinPoly, IsoBudget, Transfer};
use heckelab::whittaker::{WhitVector, WhittakerTransfer};
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::encode::*;
use crate::error::{CliError, CliResult};
use crate::scenario::{parse_element, parse_ints, parse_weyl, read_json, Scenario};

pub struct Outcome {
    pub body: Value,
    pub summary: String,
    pub failure: Option<String>,
}

impl Outcome {
    fn value(body: Value, summary: String) -> Outcome {
        Outcome { body, summary, failure: None }
    }

    fn report(name: &str, r: &Report) -> Outcome {
        let passed = r.checks.iter().filter(|c| c.holds).count();
        let failure = r.mismatches().first().map(|c| format!("[{}] {}", c.family, c.instance));
        let failure = failure.or_else(|| r.checks.is_empty().then(|| format!("{name}: no checks ran")));
        Outcome { body: report_to_json(r), summary: format!("{name}: {passed}/{} checks pass", r.checks.len()), failure }
    }
}

fn filter(r: Report, families: &[&str]) -> Report {
    Report { checks: r.checks.into_iter().filter(|c| families.contains(&c.family)).collect() }
}

/// The choices downstream values depend on: the ordering of S, the named Ω
/// representatives, the uniformizer and the label normal form.
pub fn conventions(s: &Scenario) -> CliResult<Value> {
    let ch = s.chevalley()?;
    let aw = &ch.aw;
    let s_set: Vec<Value> = aw
        .s_set()
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let kind = match aw.s_kind(k) {
                SKind::Finite(root) => json!({ "finite_simple_root": root }),
                SKind::Affine { highest, .. } => json!({ "affine_highest_root": highest }),
            };
            json!({ "name": format!("s{k}"), "element": weyl_to_json(&ch, w), "reflects": kind })
        })
        .collect();
    let omega: Vec<Value> = ch
        .omega_reps(&ch.uniformizer(8))?
        .iter()
        .map(|(name, w, ..)| json!({ "name": name, "element": weyl_to_json(&ch, w) }))
        .collect();
    let canonicalization = if ch.iwahori_quotient_size(s.m) <= GAMMA_THRESHOLD { "gamma-orbit" } else { "reduction" };
    Ok(json!({ "s": s_set, "omega": omega, "uniformizer": "t", "label_canonicalization": canonicalization }))
}

pub fn root_data(s: &Scenario) -> CliResult<Outcome> {
    let d = build_root_datum(s.tag)?;
    let cartan: Vec<Vec<i64>> = d
        .simples
        .iter()
        .map(|&i| d.simples.iter().map(|&j| pairing(&d.roots[i], &d.coroots[j])).collect())
        .collect();
    let body = json!({
        "group": s.tag.to_string(),
        "rank": d.rank,
        "roots": d.roots,
        "coroots": d.coroots,
        "positive_count": d.n_pos,
        "simples": d.simples,
        "highest": d.highest,
        "pairing": cartan,
    });
    Ok(Outcome::value(body, format!("{}: {} roots in rank {}", s.tag, d.roots.len(), d.rank)))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum WeylOp {
    Length,
    Decompose,
    Omega,
}

pub fn weyl(s: &Scenario, op: WeylOp, word: &str) -> CliResult<Outcome> {
    let ch = s.chevalley()?;
    let aw = &ch.aw;
    let w = parse_weyl(&ch, word)?;
    let element = weyl_to_json(&ch, &w);
    Ok(match op {
        WeylOp::Length => {
            let l = aw.length(&w);
            Outcome::value(json!({ "element": element, "length": l }), format!("length {l}"))
        }
        WeylOp::Decompose => {
            let d = aw.decompose(&w);
            let letters: Vec<String> = d.letters.iter().map(|k| format!("s{k}")).collect();
            let summary = format!("{} with length-zero part free {:?} torsion {:?}", letters.join(" "), d.free, d.torsion);
            Outcome::value(
                json!({ "element": element, "letters": letters, "omega": { "free": d.free, "torsion": d.torsion } }),
                summary,
            )
        }
        WeylOp::Omega => {
            let om = aw.omega();
            let (free, torsion) = aw.omega_class(&w.lambda);
            let gens: Vec<Value> = om.free_gens.iter().chain(&om.torsion_gens).map(|g| weyl_to_json(&ch, g)).collect();
            let orders: Vec<i64> = om.torsion_functionals.iter().map(|(_, n)| *n).collect();
            Outcome::value(
                json!({ "element": element, "generators": gens, "torsion_orders": orders, "class": { "free": free, "torsion": torsion } }),
                format!("class free {free:?} torsion {torsion:?}"),
            )
        }
    })
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ChevalleyOp {
    Braid,
    Rank1,
    #[value(name = "rhoS")]
    RhoS,
}

pub fn chevalley(s: &Scenario, op: Option<ChevalleyOp>) -> CliResult<Outcome> {
    let r = suites::representatives(s.tag, s.q)?;
    let r = match op {
        None => r,
        Some(ChevalleyOp::Braid) => filter(r, &["braid"]),
        Some(ChevalleyOp::Rank1) => filter(r, &["rank-one"]),
        Some(ChevalleyOp::RhoS) => filter(r, &["length-zero-conjugation", "conjugation-constant", "torus-commutator"]),
    };
    let mut out = Outcome::report("chevalley", &r);
    if r.checks.is_empty() {
        out.failure = None;
        out.summary = format!("chevalley: no instances for {}", s.tag);
    }
    Ok(out)
}

pub fn hecke_volume(s: &Scenario, word: &str) -> CliResult<Outcome> {
    let h = s.algebra()?;
    let w = parse_weyl(&h.ch, word)?;
    let volume = h.counted_index(&w)?;
    let l = h.length(&w);
    Ok(Outcome::value(
        json!({ "element": weyl_to_json(&h.ch, &w), "length": l, "volume": volume.to_string() }),
        format!("vol(I_m w I_m) = {volume} for length {l}"),
    ))
}

pub fn hecke_verify(s: &Scenario) -> CliResult<Outcome> {
    let len = s.budget.unwrap_or(4);
    let mut r = s.algebra()?.verify_presentation(len)?;
    r.extend(suites::volume_law(s.tag, s.q, s.m, len)?);
    Ok(Outcome::report("hecke verify", &r))
}

pub fn hecke_mul(s: &Scenario, left: &str, right: &str) -> CliResult<Outcome> {
    let h = s.algebra()?;
    let (a, b) = (parse_element(&h, left)?, parse_element(&h, right)?);
    let product = h.hecke_mul(&a, &b)?;
    let n = product.len();
    Ok(Outcome::value(json!({ "product": hecke_to_json(&h, &product) }), format!("product with {n} terms")))
}

fn transfer(s: &Scenario) -> CliResult<Transfer> {
    Ok(Transfer::new(s.tag, s.m, s.ring_iso()?)?)
}

pub fn transfer_zeta(s: &Scenario, element: &str) -> CliResult<Outcome> {
    let tr = transfer(s)?;
    let image = tr.zeta(&parse_element(&tr.source, element)?)?;
    Ok(Outcome::value(json!({ "image": hecke_to_json(&tr.target, &image) }), format!("zeta image with {} terms", image.len())))
}

pub fn transfer_kaz(s: &Scenario, element: Option<&str>, km: Option<&str>) -> CliResult<Outcome> {
    let tr = transfer(s)?;
    let source: HeckeElem = match (element, km) {
        (Some(e), None) => parse_element(&tr.source, e)?,
        (None, Some(lam)) => tr.source.km_basis(&parse_ints(lam)?, &Default::default(), &Default::default())?,
        (None, None) => tr.source.km_idempotent()?,
        (Some(_), Some(_)) => return Err(CliError::Usage("give --element or --km, not both".into())),
    };
    let image = tr.kaz(&source)?;
    let agrees = image == tr.zeta(&source)?;
    let body = json!({ "image": hecke_to_json(&tr.target, &image), "agrees_with_zeta": agrees });
    let failure = (!agrees).then(|| "Kazhdan's map and zeta differ on the given element".to_string());
    Ok(Outcome { body, summary: format!("kaz image with {} terms, agrees with zeta: {agrees}", image.len()), failure })
}

pub fn transfer_eisenstein(s: &Scenario, poly: &std::path::Path) -> CliResult<Outcome> {
    let iso = s.ring_iso()?;
    let f = field(s.q)?;
    let spec = read_json(poly)?;
    let level = iso.level() as i64;
    let coeffs = spec["coeffs"]
        .as_array()
        .ok_or_else(|| CliError::Usage("polynomial spec needs an array \"coeffs\"".into()))?
        .iter()
        .map(|c| series_from_json(f, c, level))
        .collect::<CliResult<Vec<_>>>()?;
    let p = EisensteinPoly::new(iso.source_uniformizer(), &coeffs)?;
    let moved = eisenstein_transfer(&p, &iso)?;
    let lower: Vec<Value> = moved.lower_coefficients().iter().map(series_to_json).collect();
    let body = json!({
        "uniformizer": series_to_json(&moved.uniformizer),
        "coeffs": moved.coeffs.iter().map(series_to_json).collect::<Vec<_>>(),
        "lower_coefficients": lower,
    });
    Ok(Outcome::value(body, format!("transferred Eisenstein polynomial of degree {}", moved.degree)))
}

pub fn transfer_verify(s: &Scenario) -> CliResult<Outcome> {
    let budget = IsoBudget { per_cell: s.budget.unwrap_or(0), ..IsoBudget::default() };
    let mut r = transfer(s)?.verify_iso(&budget)?;
    if suites::small_antidominant(s.tag).is_ok() && s.lambda.is_none() {
        r.extend(suites::kazhdan(s.tag, s.q, s.m)?);
    }
    Ok(Outcome::report("transfer verify", &r))
}

fn vector_arg(wt: &WhittakerTransfer, arg: &str) -> CliResult<WhitVector> {
    let h = &wt.transfer.source;
    let path = std::path::Path::new(arg);
    if path.is_file() {
        return vector_from_json(h, &read_json(path)?, wt.source.p());
    }
    let w = parse_weyl(&h.ch, arg)?;
    Ok(wt.source.vector_at(&w, &h.identity_label()?.b1)?)
}

pub fn whittaker_act(s: &Scenario, element: &str, vector: &str) -> CliResult<Outcome> {
    let tr = transfer(s)?;
    let wt = WhittakerTransfer::new(&tr, s.character(tr.source.ch.datum().simples.len())?)?;
    let f = parse_element(&tr.source, element)?;
    let v = vector_arg(&wt, vector)?;
    let image = wt.source.act(&f, &v)?;
    let p = wt.source.p();
    Ok(Outcome::value(
        json!({ "input": vector_to_json(&tr.source.ch, &v, p), "image": vector_to_json(&tr.source.ch, &image, p) }),
        format!("image with {} terms", image.len()),
    ))
}

pub fn whittaker_kappa(s: &Scenario, vector: &str) -> CliResult<Outcome> {
    let tr = transfer(s)?;
    let wt = WhittakerTransfer::new(&tr, s.character(tr.source.ch.datum().simples.len())?)?;
    let v = vector_arg(&wt, vector)?;
    let image = wt.kappa(&v)?;
    let p = wt.source.p();
    Ok(Outcome::value(
        json!({ "input": vector_to_json(&tr.source.ch, &v, p), "image": vector_to_json(&tr.target.ch, &image, p) }),
        format!("kappa image with {} terms", image.len()),
    ))
}

pub fn whittaker_verify(s: &Scenario) -> CliResult<Outcome> {
    let tr = transfer(s)?;
    let wt = WhittakerTransfer::new(&tr, s.character(tr.source.ch.datum().simples.len())?)?;
    Ok(Outcome::report("whittaker verify", &wt.verify_equivariance(s.budget.unwrap_or(2))?))
}

pub fn depth_mpuc(s: &Scenario) -> CliResult<Outcome> {
    Ok(Outcome::report("verify-mpuc", &suites::moy_prasad(s.tag, s.q, s.budget.unwrap_or(5))?))
}

fn parse_rational(t: &str) -> CliResult<Rational64> {
    t.trim().parse().map_err(|_| CliError::Usage(format!("{t} is not a rational number")))
}

pub fn depth_exponents(s: &Scenario, x: &str, r: &str, plus: bool) -> CliResult<Outcome> {
    let d = build_root_datum(s.tag)?;
    let values = x.split(',').filter(|t| !t.trim().is_empty()).map(parse_rational).collect::<CliResult<Vec<_>>>()?;
    let x = AlcovePoint::new(&d, values)?;
    let e = mp_exponents(&d, &x, parse_rational(r)?, plus)?;
    let body = json!({ "roots": d.roots, "root_exponents": e.roots, "torus": e.torus });
    Ok(Outcome::value(body, format!("root exponents {:?}, torus level {}", e.roots, e.torus)))
}

pub fn depth_from_cond(n: i64, c: i64) -> CliResult<Outcome> {
    let depth = depth_from_conductor(n, c)?;
    Ok(Outcome::value(json!({ "n": n, "conductor": c, "depth": depth.to_string() }), format!("depth {depth}")))
}

/// Every suite that applies to the scenario's group.
pub fn verify_all(s: &Scenario) -> CliResult<Outcome> {
    let (tag, q, m) = (s.tag, s.q, s.m);
    let whittaker_group = matches!(tag, GroupTag::SL2 | GroupTag::GL(_));
    let mut suites_out = Vec::new();
    let mut summary = Vec::new();
    let mut failure = None;
    let mut run = |name: &str, applies: bool, f: &dyn Fn() -> heckelab::Result<Report>| -> CliResult<()> {
        if !applies {
            suites_out.push(json!({ "name": name, "skipped": true }));
            return Ok(());
        }
        let r = f()?;
        let mut entry = report_to_json(&r);
        entry["name"] = json!(name);
        suites_out.push(entry);
        let passed = r.checks.iter().filter(|c| c.holds).count();
        summary.push(format!("{name} {passed}/{}", r.checks.len()));
        if failure.is_none() {
            failure = r.mismatches().first().map(|c| format!("{name}: [{}] {}", c.family, c.instance));
        }
        Ok(())
    };
    let len = 4;
    let iso = IsoBudget { per_cell: s.budget.unwrap_or(0), ..IsoBudget::default() };
    run("volume-law", true, &|| suites::volume_law(tag, q, m, len))?;
    run("presentation", true, &|| suites::presentation(tag, q, m))?;
    run("dual-engine", tag == GroupTag::SL2, &|| suites::dual_engine(tag, q, m, 2, s.budget.unwrap_or(0)))?;
    run("representatives", true, &|| suites::representatives(tag, q))?;
    run("length-adjoint", true, &|| suites::length_adjoint(tag, len))?;
    run("zeta-isomorphism", true, &|| suites::zeta_iso(tag, q, m, &iso))?;
    run("kazhdan", suites::small_antidominant(tag).is_ok(), &|| suites::kazhdan(tag, q, m))?;
    run("whittaker", whittaker_group, &|| {
        let mut r = Report::default();
        for conductor in 0..=m as i64 {
            r.extend(suites::whittaker(tag, q, m, conductor, 2)?);
        }
        Ok(r)
    })?;
    run("moy-prasad", true, &|| suites::moy_prasad(tag, q, 5))?;
    run("depth", true, &suites::depth_table)?;
    run("orbit-stabilizer", tag == GroupTag::SL2, &|| suites::orbit_stabilizer(tag, q, m, 3))?;
    Ok(Outcome { body: json!({ "suites": suites_out }), summary: summary.join(", "), failure })
}
