//! Catalogue of admissible slope constants.
//!
//! Irrationality cannot be decided from a float, so the slope constant must be
//! one of a fixed list of negative multiples of sqrt(2), sqrt(3) and pi. A
//! value is in the catalogue iff it is bit-identical to an entry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrrationalBase {
    Sqrt2,
    Sqrt3,
    Pi,
}

impl IrrationalBase {
    fn value(self) -> f64 {
        match self {
            IrrationalBase::Sqrt2 => std::f64::consts::SQRT_2,
            IrrationalBase::Sqrt3 => 3f64.sqrt(),
            IrrationalBase::Pi => std::f64::consts::PI,
        }
    }

    fn name(self) -> &'static str {
        match self {
            IrrationalBase::Sqrt2 => "sqrt2",
            IrrationalBase::Sqrt3 => "sqrt3",
            IrrationalBase::Pi => "pi",
        }
    }
}

/// `-base / 10^k` for the square roots and `-pi / 10^(k+1)`, with `k` in 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KappaEntry {
    pub base: IrrationalBase,
    pub k: u32,
}

impl KappaEntry {
    pub fn new(base: IrrationalBase, k: u32) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::Domain(format!("kappa exponent k = {k} not in 1..=3")));
        }
        Ok(Self { base, k })
    }

    fn denominator_exponent(&self) -> u32 {
        match self.base {
            IrrationalBase::Pi => self.k + 1,
            _ => self.k,
        }
    }

    pub fn value(&self) -> f64 {
        -self.base.value() / 10f64.powi(self.denominator_exponent() as i32)
    }
}

impl fmt::Display for KappaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}/1{}", self.base.name(), "0".repeat(self.denominator_exponent() as usize))
    }
}

impl FromStr for KappaEntry {
    type Err = Error;

    /// Parses names like `-sqrt2/100` or `-pi/1000`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognised kappa catalogue name `{s}`"));
        let body = s.trim().strip_prefix('-').ok_or_else(bad)?;
        let (base, denom) = body.split_once('/').ok_or_else(bad)?;
        let base = match base {
            "sqrt2" => IrrationalBase::Sqrt2,
            "sqrt3" => IrrationalBase::Sqrt3,
            "pi" => IrrationalBase::Pi,
            _ => return Err(bad()),
        };
        let zeros = denom.strip_prefix('1').ok_or_else(bad)?;
        if zeros.is_empty() || zeros.chars().any(|c| c != '0') {
            return Err(bad());
        }
        let exp = zeros.len() as u32;
        let k = match base {
            IrrationalBase::Pi => exp.checked_sub(1).ok_or_else(bad)?,
            _ => exp,
        };
        KappaEntry::new(base, k).map_err(|_| bad())
    }
}

pub fn catalogue() -> Vec<KappaEntry> {
    let mut out = Vec::with_capacity(9);
    for base in [IrrationalBase::Sqrt2, IrrationalBase::Sqrt3, IrrationalBase::Pi] {
        for k in 1..=3 {
            out.push(KappaEntry { base, k });
        }
    }
    out
}

pub fn lookup(kappa: f64) -> Option<KappaEntry> {
    catalogue().into_iter().find(|e| e.value().to_bits() == kappa.to_bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in catalogue() {
            let parsed: KappaEntry = e.to_string().parse().unwrap();
            assert_eq!(parsed, e);
            assert_eq!(lookup(e.value()), Some(e));
        }
        assert_eq!("-pi/1000".parse::<KappaEntry>().unwrap().value(), -std::f64::consts::PI / 1000.0);
        assert!("-pi/10".parse::<KappaEntry>().is_err());
        assert!("-e/100".parse::<KappaEntry>().is_err());
    }

    #[test]
    fn rationals_are_rejected() {
        assert_eq!(lookup(-0.01), None);
        assert_eq!(lookup(0.0), None);
    }
}
