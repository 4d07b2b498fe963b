//! Parser for the `--potential` specification string.
//!
//! Grammar: `kind:key=value,key=value,...` with kinds `hardrod`,
//! `hardcore` and `squarewell`.  Keys: `sigma` (all kinds, required),
//! `d` (dimension, defaults to 1; fixed at 1 for hard rods), and for the
//! square well `eps` (depth, required) and `width` (well width, required).
//! Errors name the offending token so usage mistakes are self-explaining.

use clex_core::potentials::PairPotential;
use serde::Serialize;

/// Echo of the parsed potential for the `resolved_config` block.
#[derive(Serialize)]
pub struct PotentialConfig {
    pub kind: &'static str,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    pub d: usize,
}

pub fn describe(p: &PairPotential) -> PotentialConfig {
    match *p {
        PairPotential::HardRod { sigma } => PotentialConfig {
            kind: "hardrod",
            sigma,
            eps: None,
            width: None,
            d: 1,
        },
        PairPotential::HardCore { sigma, dim } => PotentialConfig {
            kind: "hardcore",
            sigma,
            eps: None,
            width: None,
            d: dim,
        },
        PairPotential::SquareWell {
            sigma,
            epsilon,
            well_width,
            dim,
        } => PotentialConfig {
            kind: "squarewell",
            sigma,
            eps: Some(epsilon),
            width: Some(well_width),
            d: dim,
        },
    }
}

pub fn parse(spec: &str) -> Result<PairPotential, String> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| format!("potential spec `{spec}` is missing the `kind:` prefix"))?;

    let mut sigma = None;
    let mut eps = None;
    let mut width = None;
    let mut dim = None;
    for token in rest.split(',').filter(|t| !t.is_empty()) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format!("expected `key=value`, got `{token}`"))?;
        let number: f64 = value
            .parse()
            .map_err(|_| format!("invalid number `{value}` for key `{key}`"))?;
        let slot = match key {
            "sigma" => &mut sigma,
            "eps" => &mut eps,
            "width" => &mut width,
            "d" => {
                if number.fract() != 0.0 || number < 1.0 {
                    return Err(format!("dimension `d={value}` must be a positive integer"));
                }
                &mut dim
            }
            other => {
                return Err(format!(
                    "unknown key `{other}` (expected sigma, eps, width, d)"
                ))
            }
        };
        if slot.replace(number).is_some() {
            return Err(format!("key `{key}` given twice"));
        }
    }

    let sigma = sigma.ok_or_else(|| format!("kind `{kind}` requires `sigma=`"))?;
    let d = dim.map(|x| x as usize).unwrap_or(1);
    let reject = |key: &str| format!("key `{key}` is not valid for kind `{kind}`");

    let built = match kind {
        "hardrod" => {
            if eps.is_some() {
                return Err(reject("eps"));
            }
            if width.is_some() {
                return Err(reject("width"));
            }
            if d != 1 {
                return Err("hard rods are one-dimensional; drop `d` or use hardcore".into());
            }
            PairPotential::hard_rod(sigma)
        }
        "hardcore" => {
            if eps.is_some() {
                return Err(reject("eps"));
            }
            if width.is_some() {
                return Err(reject("width"));
            }
            PairPotential::hard_core(sigma, d)
        }
        "squarewell" => {
            let eps = eps.ok_or_else(|| format!("kind `{kind}` requires `eps=`"))?;
            let width = width.ok_or_else(|| format!("kind `{kind}` requires `width=`"))?;
            PairPotential::square_well(sigma, eps, width, d)
        }
        other => {
            return Err(format!(
                "unknown potential kind `{other}` (expected hardrod, hardcore, squarewell)"
            ))
        }
    };
    built.map_err(|e| e.to_string())
}
