//! Bundled repunit factor table: parsing, verification, lookup.
//!
//! File format, one entry per line:
//!
//! ```text
//! <base> <exponent>: <factor>[^<power>] ... [C<composite>]   # comment
//! ```
//!
//! Verification is all-or-nothing: every named factor must pass the full
//! primality test, an optional `C`-prefixed cofactor must be composite,
//! and the product of all parts must equal `(base^e - 1)/(base - 1)`
//! exactly. A table that fails any check is rejected whole; partial trust
//! in factor data is how silent wrong answers happen.

use super::{is_prime, repunit, Factorization};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Environment variable naming an external table to use instead of the
/// bundled one.
pub const DB_ENV_VAR: &str = "SIGMAPQ_FACTOR_DB";

const BUNDLED: &str = include_str!("../../data/factor-db.txt");

#[derive(Clone, Debug)]
pub struct FactorDb {
    entries: BTreeMap<(u32, u64), Factorization>,
}

impl FactorDb {
    /// Parse and fully verify a table.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::FactorTable(format!("line {}: {}", lineno + 1, msg));
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| err("missing ':'".into()))?;
            let mut hw = head.split_whitespace();
            let base: u32 = hw
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad base".into()))?;
            let e: u64 = hw
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad exponent".into()))?;
            if hw.next().is_some() {
                return Err(err("trailing tokens before ':'".into()));
            }
            if !matches!(base, 2 | 3 | 5) || e < 2 {
                return Err(err(format!("unsupported entry ({base}, {e})")));
            }

            let mut factors: Vec<(BigUint, u32)> = Vec::new();
            let mut cofactor = None;
            for tok in tail.split_whitespace() {
                if let Some(c) = tok.strip_prefix('C') {
                    let c: BigUint = c
                        .parse()
                        .map_err(|_| err(format!("bad cofactor '{tok}'")))?;
                    if c <= BigUint::one() || is_prime(&c) {
                        return Err(err(format!("cofactor {c} is not composite")));
                    }
                    if cofactor.replace(c).is_some() {
                        return Err(err("two cofactors".into()));
                    }
                    continue;
                }
                let (p, k) = match tok.split_once('^') {
                    Some((p, k)) => (
                        p.parse::<BigUint>()
                            .map_err(|_| err(format!("bad factor '{tok}'")))?,
                        k.parse::<u32>()
                            .map_err(|_| err(format!("bad power '{tok}'")))?,
                    ),
                    None => (
                        tok.parse::<BigUint>()
                            .map_err(|_| err(format!("bad factor '{tok}'")))?,
                        1,
                    ),
                };
                if !is_prime(&p) {
                    return Err(err(format!("named factor {p} is not prime")));
                }
                factors.push((p, k));
            }
            factors.sort();
            for w in factors.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(err(format!("duplicate factor {}", w[0].0)));
                }
            }
            let fac = Factorization { factors, cofactor };
            if fac.value() != repunit(base, e) {
                return Err(err(format!("product mismatch for ({base}, {e})")));
            }
            if entries.insert((base, e), fac).is_some() {
                return Err(err(format!("duplicate entry ({base}, {e})")));
            }
        }
        Ok(FactorDb { entries })
    }

    /// The table compiled into the binary, verified once per process.
    pub fn bundled() -> Result<&'static FactorDb> {
        static CELL: OnceLock<std::result::Result<FactorDb, String>> = OnceLock::new();
        match CELL.get_or_init(|| FactorDb::parse(BUNDLED).map_err(|e| e.to_string())) {
            Ok(db) => Ok(db),
            Err(msg) => Err(Error::FactorTable(format!("bundled table: {msg}"))),
        }
    }

    /// Load from `SIGMAPQ_FACTOR_DB` if set, else the bundled table.
    pub fn load_default() -> Result<FactorDb> {
        match std::env::var(DB_ENV_VAR) {
            Ok(path) if !path.is_empty() => {
                let text = std::fs::read_to_string(&path)?;
                FactorDb::parse(&text)
            }
            _ => Ok(Self::bundled()?.clone()),
        }
    }

    pub fn get(&self, base: u32, e: u64) -> Option<&Factorization> {
        self.entries.get(&(base, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u64), &Factorization)> {
        self.entries.iter()
    }
}
