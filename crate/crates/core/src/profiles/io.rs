//! Plain-text profile document: `key = value` parameters followed by a knot
//! table. Floats are written in shortest round-trip form so parameters
//! survive a round trip bit for bit.

use std::fmt::Write as _;

use super::{build_profile, perturb_profile, Profile, ProfileParams, ProfileSample};
use crate::{Error, Result};

const HEADER: &str = "# holo-openbook profile v1";
const COLUMNS: &str = "rho f g fp gp d beta h";

/// Radii tabulated in the knot table.
pub fn knot_radii(p: &ProfileParams) -> Vec<f64> {
    vec![0.0, p.rho1, p.rho2, 1.0 - p.delta_prime, 1.0 - p.delta, 1.0]
}

pub fn to_text(profile: &Profile) -> String {
    let p = profile.params();
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    for (k, v) in [
        ("c", p.c),
        ("kappa", p.kappa),
        ("delta", p.delta),
        ("delta_prime", p.delta_prime),
        ("rho1", p.rho1),
        ("rho2", p.rho2),
    ] {
        writeln!(out, "{k} = {v:?}").unwrap();
    }
    match profile.eps() {
        Some(e) => writeln!(out, "eps = {e:?}").unwrap(),
        None => writeln!(out, "eps = none").unwrap(),
    }
    if let Some(entry) = p.kappa_entry_name() {
        writeln!(out, "kappa_name = {entry}").unwrap();
    }
    writeln!(out, "\n[knots]\n{COLUMNS}").unwrap();
    for r in knot_radii(p) {
        let s = profile.sample_unchecked(r);
        writeln!(
            out,
            "{:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?}",
            s.rho, s.f, s.g, s.fp, s.gp, s.d, s.beta, s.h
        )
        .unwrap();
    }
    out
}

impl ProfileParams {
    fn kappa_entry_name(&self) -> Option<String> {
        self.kappa_entry().map(|e| e.to_string())
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{what}: `{s}`: {e}")))
}

/// Parses a document back into the profile it describes plus its knot table.
pub fn from_text(text: &str) -> Result<(Profile, Vec<ProfileSample>)> {
    let mut lines = text.lines().map(str::trim);
    if lines.next() != Some(HEADER) {
        return Err(Error::Parse("missing profile header".into()));
    }
    let mut vals = std::collections::BTreeMap::new();
    let mut knots = Vec::new();
    let mut in_table = false;
    for line in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[knots]" {
            in_table = true;
            continue;
        }
        if in_table {
            if line == COLUMNS {
                continue;
            }
            let cols = line
                .split_whitespace()
                .map(|c| parse_f64(c, "knot table"))
                .collect::<Result<Vec<_>>>()?;
            if cols.len() != 8 {
                return Err(Error::Parse(format!("knot row has {} columns, want 8", cols.len())));
            }
            knots.push(ProfileSample {
                rho: cols[0],
                f: cols[1],
                g: cols[2],
                fp: cols[3],
                gp: cols[4],
                fpp: f64::NAN,
                gpp: f64::NAN,
                d: cols[5],
                beta: cols[6],
                h: cols[7],
            });
        } else {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            vals.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| -> Result<f64> {
        let v = vals.get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")))?;
        parse_f64(v, k)
    };
    let params = ProfileParams {
        c: get("c")?,
        kappa: get("kappa")?,
        delta: get("delta")?,
        delta_prime: get("delta_prime")?,
        rho1: get("rho1")?,
        rho2: get("rho2")?,
    };
    let base = build_profile(params)?;
    let profile = match vals.get("eps").map(String::as_str) {
        None | Some("none") => base,
        Some(_) => perturb_profile(&base, get("eps")?)?,
    };
    Ok((profile, knots))
}
