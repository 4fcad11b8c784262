//! Classification of repunits by number of distinct prime factors.
//!
//! The survey only ever needs to decide: is `x = (a^e - 1)/(a - 1)` a
//! prime, a prime power, a product of exactly two distinct primes, or
//! does it have at least three? The decision procedure is layered by
//! cost:
//!
//! 1. primality and perfect-power tests on `x` itself (no factoring);
//! 2. the bundled factor table;
//! 3. bounded runtime factoring (trial, class trial, rho);
//! 4. for `e = r^2`, the algebraic split `x = R * (x/R)` with
//!    `R = (a^r - 1)/(a - 1)`: when the parts are coprime,
//!    `omega(x) = omega(R) + omega(x/R)` and each side needs only
//!    primality/power tests, never a factor hunt.
//!
//! Anything still undecided is an `UnresolvedCandidate` error: the run
//! fails loudly rather than guessing.

use super::{factor_bounded, is_prime, perfect_power, repunit, Budget, FactorDb, Factorization};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

/// Decision for one repunit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateClass {
    Prime,
    PrimePower { p: BigUint, k: u32 },
    /// Exactly two distinct primes: `x = p^f * q^g`, `p < q`.
    Omega2 { p: BigUint, f: u32, q: BigUint, g: u32 },
    /// At least three distinct primes; witnesses name those found.
    Omega3Plus { witnesses: Vec<BigUint> },
}

impl CandidateClass {
    pub fn omega_at_most_two(&self) -> bool {
        !matches!(self, CandidateClass::Omega3Plus { .. })
    }
}

fn class_from_complete(fac: &Factorization) -> Option<CandidateClass> {
    if !fac.complete() {
        return None;
    }
    match fac.factors.len() {
        1 => {
            let (p, k) = &fac.factors[0];
            Some(if *k == 1 {
                CandidateClass::Prime
            } else {
                CandidateClass::PrimePower { p: p.clone(), k: *k }
            })
        }
        2 => Some(CandidateClass::Omega2 {
            p: fac.factors[0].0.clone(),
            f: fac.factors[0].1,
            q: fac.factors[1].0.clone(),
            g: fac.factors[1].1,
        }),
        _ => Some(CandidateClass::Omega3Plus {
            witnesses: fac.factors.iter().map(|(p, _)| p.clone()).collect(),
        }),
    }
}

fn class_from_partial(fac: &Factorization) -> Option<CandidateClass> {
    if fac.omega_lower_bound() >= 3 {
        return Some(CandidateClass::Omega3Plus {
            witnesses: fac.factors.iter().map(|(p, _)| p.clone()).collect(),
        });
    }
    class_from_complete(fac)
}

/// omega bounds of a number from primality/power tests alone:
/// `(lower, upper)` with `upper = usize::MAX` when unknown.
fn omega_shape(n: &BigUint) -> (usize, usize) {
    if n.is_one() {
        return (0, 0);
    }
    if is_prime(n) {
        return (1, 1);
    }
    match perfect_power(n) {
        Some((r, _)) if is_prime(&r) => (1, 1),
        Some(_) => (2, usize::MAX), // power of a composite
        None => (2, usize::MAX),    // composite non-power: >= 2 primes
    }
}

/// Classify `(base^e - 1)/(base - 1)`.
pub fn screen_omega(
    base: u32,
    e: u64,
    db: &FactorDb,
    budget: &Budget,
) -> Result<CandidateClass> {
    let x = repunit(base, e);

    if is_prime(&x) {
        return Ok(CandidateClass::Prime);
    }
    if let Some((r, k)) = perfect_power(&x) {
        if is_prime(&r) {
            return Ok(CandidateClass::PrimePower { p: r, k });
        }
    }

    if let Some(fac) = db.get(base, e) {
        if let Some(c) = class_from_partial(fac) {
            return Ok(c);
        }
    }

    // Runtime factoring.
    let class_mod = crate::factor::is_prime_u64(e).then_some(e);
    let fac = factor_bounded(&x, class_mod, budget);
    if let Some(c) = class_from_partial(&fac) {
        return Ok(c);
    }

    // Algebraic split for square exponents.
    let r = e.isqrt();
    if r * r == e && r >= 2 {
        let a = repunit(base, r);
        let b = &x / &a;
        if a.gcd(&b).is_one() {
            let (alo, ahi) = omega_shape(&a);
            let (blo, bhi) = omega_shape(&b);
            if alo + blo >= 3 {
                let mut witnesses: Vec<BigUint> = Vec::new();
                for part in [&a, &b] {
                    if is_prime(part) {
                        witnesses.push(part.clone());
                    }
                }
                return Ok(CandidateClass::Omega3Plus { witnesses });
            }
            if ahi == 1 && bhi == 1 {
                // Each side is p^k with p prime; reconstruct exponents.
                let unwrap = |n: &BigUint| match perfect_power(n) {
                    Some((root, k)) if is_prime(&root) => (root, k),
                    _ => (n.clone(), 1),
                };
                let (pa, ka) = unwrap(&a);
                let (pb, kb) = unwrap(&b);
                let (lo, hi) = if pa < pb { ((pa, ka), (pb, kb)) } else { ((pb, kb), (pa, ka)) };
                return Ok(CandidateClass::Omega2 { p: lo.0, f: lo.1, q: hi.0, g: hi.1 });
            }
        }
    }

    Err(Error::UnresolvedCandidate {
        base,
        exponent: e,
        reason: format!(
            "omega undecided: {} named factors, cofactor {}",
            fac.factors.len(),
            fac.cofactor.as_ref().map(|c| c.bits()).unwrap_or(0)
        ),
    })
}
