//! Common parameters shared by every subcommand, and the objects they determine.

use std::path::{Path, PathBuf};

use heckelab::affweyl::ExtAffWeylElem;
use heckelab::chevalley::Chevalley;
use heckelab::exactalg::{field, FqElem};
use heckelab::hecke::{HeckeAlgebra, HeckeElem};
use heckelab::rootdata::GroupTag;
use heckelab::suites::one_plus_t_retwist;
use heckelab::transfer::{AdditiveChar, RingIso, TruncDVR};
use heckelab::whittaker::GenericCharacter;
use serde_json::Value;

use crate::encode::{hecke_from_json, series_from_json};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub tag: GroupTag,
    pub q: u32,
    pub m: usize,
    pub prec: Option<i64>,
    pub budget: Option<usize>,
    pub lambda: Option<PathBuf>,
    pub chi: Option<PathBuf>,
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

impl Scenario {
    pub fn validate(&self) -> CliResult<()> {
        field(self.q)?;
        if self.m == 0 {
            return Err(CliError::Usage("--m must be at least 1".into()));
        }
        if matches!(self.prec, Some(p) if p < 1) {
            return Err(CliError::Usage("--prec must be positive".into()));
        }
        Ok(())
    }

    pub fn chevalley(&self) -> CliResult<Chevalley> {
        Ok(Chevalley::new(self.tag, self.q)?)
    }

    pub fn algebra(&self) -> CliResult<HeckeAlgebra> {
        Ok(match self.prec {
            Some(p) => HeckeAlgebra::with_precision(self.tag, self.q, self.m, p)?,
            None => HeckeAlgebra::new(self.tag, self.q, self.m)?,
        })
    }

    /// Λ from `--lambda`, or the (1 + t) retwist modulo p^{m+1}.
    pub fn ring_iso(&self) -> CliResult<RingIso> {
        let Some(path) = &self.lambda else {
            return Ok(one_plus_t_retwist(self.q, self.m + 1)?);
        };
        let spec = read_json(path)?;
        let f = field(self.q)?;
        let level = match &spec["level"] {
            Value::Null => self.m + 1,
            v => v.as_u64().ok_or_else(|| CliError::Usage("level must be a positive integer".into()))? as usize,
        };
        let prec = level as i64;
        match spec["kind"].as_str() {
            Some("identity") => Ok(RingIso::identity(&TruncDVR::standard(self.q, level)?)?),
            Some("retwist") => {
                let unit = match &spec["unit"] {
                    Value::Array(_) => series_from_json(f, &serde_json::json!({ "digits": spec["unit"] }), prec)?,
                    v => series_from_json(f, v, prec)?,
                };
                Ok(RingIso::retwist(self.q, level, &unit)?)
            }
            Some(other) => Err(CliError::Usage(format!("unknown lambda kind {other}"))),
            None => {
                let image = series_from_json(f, &spec["uniformizer_image"], prec + 1)?;
                let code = spec["residue_gen_image"]
                    .as_u64()
                    .filter(|&c| c < u64::from(self.q))
                    .ok_or_else(|| CliError::Usage("residue_gen_image must be a field element code".into()))?;
                if image.valuation() != Some(1) {
                    return Err(CliError::Usage("uniformizer_image must have valuation one".into()));
                }
                let target = TruncDVR::new(self.q, level, &image.shift(-1).truncate(prec))?;
                Ok(RingIso::new(TruncDVR::standard(self.q, level)?, target, &image, f.elem(code as u32))?)
            }
        }
    }

    /// χ from `--char`, or unit 1 with conductor m on every simple root.
    pub fn character(&self, simple_count: usize) -> CliResult<GenericCharacter> {
        let Some(path) = &self.chi else {
            return Ok(GenericCharacter::uniform(self.q, simple_count, FqElem::ONE, self.m as i64)?);
        };
        let spec = read_json(path)?;
        let f = field(self.q)?;
        let ints = |key: &str| -> CliResult<Vec<i64>> {
            spec[key]
                .as_array()
                .ok_or_else(|| CliError::Usage(format!("character spec needs an array \"{key}\"")))?
                .iter()
                .map(|v| v.as_i64().ok_or_else(|| CliError::Usage(format!("{key} must hold integers"))))
                .collect()
        };
        let units = ints("units")?;
        let conductors = ints("conductors")?;
        if units.len() != simple_count || conductors.len() != simple_count {
            return Err(CliError::Usage(format!("character spec needs {simple_count} units and conductors")));
        }
        let chars = units
            .iter()
            .zip(&conductors)
            .map(|(&u, &c)| {
                if u <= 0 || u >= i64::from(self.q) {
                    return Err(CliError::Usage(format!("unit code {u} is not a nonzero field element")));
                }
                Ok(AdditiveChar::with_conductor(f.elem(u as u32), c, self.q)?)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(GenericCharacter::new(chars)?)
    }
}

/// Words in s<k>, the named length-zero elements (rho<k>, rho<k>^-1, mu<k>) and 1 or e,
/// separated by spaces, commas or '*'; or a JSON object {"lambda": [...], "weyl": [...]}.
pub fn parse_weyl(ch: &Chevalley, text: &str) -> CliResult<ExtAffWeylElem> {
    let text = text.trim();
    if text.starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("weyl element: {e}")))?;
        return crate::encode::weyl_from_json(ch, &v);
    }
    let aw = &ch.aw;
    let omega = ch.omega_reps(&ch.uniformizer(8))?;
    let mut acc = aw.identity();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',' || c == '*').filter(|t| !t.is_empty()) {
        let g = if tok == "1" || tok == "e" {
            aw.identity()
        } else if let Some(k) = tok.strip_prefix('s').and_then(|k| k.parse::<usize>().ok()) {
            aw.s_set().get(k).cloned().ok_or_else(|| CliError::Usage(format!("{tok}: S has {} elements", aw.s_set().len())))?
        } else {
            omega
                .iter()
                .find(|(name, ..)| name == tok)
                .map(|(_, w, ..)| w.clone())
                .ok_or_else(|| CliError::Usage(format!("unknown generator {tok}")))?
        };
        acc = aw.mul(&acc, &g);
    }
    Ok(acc)
}

/// A Hecke element from a JSON file, or the basis function of a representative given as a word.
pub fn parse_element(h: &HeckeAlgebra, arg: &str) -> CliResult<HeckeElem> {
    let path = Path::new(arg);
    if path.is_file() {
        return hecke_from_json(h, &read_json(path)?);
    }
    let w = parse_weyl(&h.ch, arg)?;
    Ok(h.f_rep(&w)?)
}

pub fn parse_ints(text: &str) -> CliResult<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| CliError::Usage(format!("{t} is not an integer"))))
        .collect()
}
