//! Multiplicative-order oracle.
//!
//! Everything the elimination stage knows about a prime modulus `q` is
//! carried as an [`OrderFact`]: either the exact multiplicative order of a
//! base modulo `q`, or a certified "the order is a multiple of `m`"
//! statement. Facts are produced from whatever factorization of `q - 1` is
//! available — complete, or only its small-prime part — and every fact can
//! be re-verified from raw modular arithmetic alone via
//! [`OrderFact::verify`].
//!
//! The admissibility predicates encode the structure theorem for repunits
//! `(a^e - 1)/(a - 1)` with at most two distinct prime factors: the
//! exponent must be a prime `r` or the square of a prime (plus two
//! exceptional shapes), and residual orders must land in
//! `{1} ∪ primes ∪ prime squares`. Elimination uses these only as
//! necessary conditions.

use crate::factor::{self, is_prime, is_prime_u64, perfect_power, Factorization};
use crate::mp::pow_mod;
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;

/// A verified statement about the multiplicative order of `base` modulo
/// the prime `modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderFact {
    pub base: BigUint,
    pub modulus: BigUint,
    pub kind: OrderKind,
}

/// The two strengths of order knowledge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// The exact order: `base^n ≡ 1` and `base^(n/r) ≢ 1` for every
    /// prime `r | n`.
    Exact(BigUint),
    /// `m` divides the true order, certified by prime-power valuation
    /// checks; nothing is claimed about the cofactor of the order.
    MultipleOf(BigUint),
}

impl fmt::Display for OrderKind {
    /// Table rendering: exact orders print bare, partial facts print in
    /// parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderKind::Exact(n) => write!(f, "{n}"),
            OrderKind::MultipleOf(m) => write!(f, "({m})"),
        }
    }
}

impl OrderFact {
    /// Re-verify this fact from raw modular arithmetic.
    ///
    /// Exact facts check `a^n ≡ 1` plus `a^(n/r) ≢ 1` for every prime
    /// `r | n` (the order value itself must be factorable within the
    /// default budget). Multiple-of facts check, for each maximal prime
    /// power `r^v ∥ m`, that `a^((q-1)/r^(t-v+1)) ≢ 1` where
    /// `r^t ∥ q - 1` — which certifies `v_r(order) ≥ v`.
    pub fn verify(&self) -> Result<()> {
        let a = &self.base;
        let q = &self.modulus;
        let qm1 = q - 1u32;
        if (a % q).is_zero() {
            return Err(Error::Config(format!(
                "order fact base {a} is divisible by modulus {q}"
            )));
        }
        match &self.kind {
            OrderKind::Exact(n) => {
                if !pow_mod(a, n, q).is_one() {
                    return Err(Error::Config(format!(
                        "claimed order {n} does not satisfy a^n = 1 mod {q}"
                    )));
                }
                let fac = factor::factor_bounded(n, None, &factor::Budget::default());
                if !fac.complete() {
                    return Err(Error::IncompleteFactorization(format!(
                        "cannot verify exact order: {n} resists factoring"
                    )));
                }
                for (r, _) in &fac.factors {
                    if pow_mod(a, &(n / r), q).is_one() {
                        return Err(Error::Config(format!(
                            "claimed order {n} is not minimal: a^(n/{r}) = 1"
                        )));
                    }
                }
                Ok(())
            }
            OrderKind::MultipleOf(m) => {
                let fac = factor::factor_bounded(m, None, &factor::Budget::default());
                if !fac.complete() {
                    return Err(Error::IncompleteFactorization(format!(
                        "cannot verify multiple-of fact: {m} resists factoring"
                    )));
                }
                for (r, v) in &fac.factors {
                    let t = valuation(&qm1, r);
                    if t < *v {
                        return Err(Error::Config(format!(
                            "claimed multiple {m} has v_{r} = {v} exceeding v_{r}(q-1) = {t}"
                        )));
                    }
                    let exponent = &qm1 / r.pow(t - v + 1);
                    if pow_mod(a, &exponent, q).is_one() {
                        return Err(Error::Config(format!(
                            "valuation certificate fails: a^((q-1)/{r}^{}) = 1",
                            t - v + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// `v_r(n)`: the exponent of the prime `r` in `n`.
fn valuation(n: &BigUint, r: &BigUint) -> u32 {
    let mut t = 0u32;
    let mut rest = n.clone();
    loop {
        let (div, rem) = num_integer::Integer::div_rem(&rest, r);
        if !rem.is_zero() {
            return t;
        }
        rest = div;
        t += 1;
    }
}

/// The exact multiplicative order of `a` modulo the prime `q`, computed by
/// divisor descent over a complete factorization of `q - 1`.
///
/// `qm1_factors` must multiply out to exactly `q - 1`; otherwise
/// [`Error::IncompleteFactorization`] is returned.
pub fn exact_order(a: &BigUint, q: &BigUint, qm1_factors: &[(BigUint, u32)]) -> Result<BigUint> {
    let qm1 = q - 1u32;
    let mut product = BigUint::one();
    for (r, t) in qm1_factors {
        product *= r.pow(*t);
    }
    if product != qm1 {
        return Err(Error::IncompleteFactorization(format!(
            "product of supplied factors is {product}, expected {qm1}"
        )));
    }
    if (a % q).is_zero() {
        return Err(Error::Config(format!("base {a} divisible by modulus {q}")));
    }
    let mut ord = qm1;
    for (r, t) in qm1_factors {
        for _ in 0..*t {
            let candidate = &ord / r;
            if pow_mod(a, &candidate, q).is_one() {
                ord = candidate;
            } else {
                break;
            }
        }
    }
    Ok(ord)
}

/// The valuation `v_r(order of a mod q)`, given the exact valuation
/// `t = v_r(q - 1)`.
///
/// Computed as `t - max{ j ≤ t : a^((q-1)/r^j) ≡ 1 (mod q) }`. The
/// supplied `t` is re-checked against `q - 1`; `j = 0` always succeeds for
/// prime `q` by Fermat, which is also verified.
pub fn order_r_valuation(a: &BigUint, q: &BigUint, r: &BigUint, t: u32) -> Result<u32> {
    let qm1 = q - 1u32;
    let actual = valuation(&qm1, r);
    if actual != t {
        return Err(Error::Config(format!(
            "stated valuation {t} of {r} in q-1 is wrong (actual {actual})"
        )));
    }
    for j in (0..=t).rev() {
        let exponent = &qm1 / r.pow(j);
        if pow_mod(a, &exponent, q).is_one() {
            return Ok(t - j);
        }
    }
    Err(Error::Config(format!(
        "a^(q-1) is not 1 mod {q}: modulus not prime or base not coprime"
    )))
}

/// A certified multiple of the order of `a` mod `q`, using only the
/// `smooth_bound`-smooth part of `q - 1`.
///
/// For each prime `r ≤ smooth_bound` dividing `q - 1`, trial division
/// pins the exact valuation `t = v_r(q - 1)` (no matter how large the
/// remaining cofactor is), and a valuation check contributes
/// `r^{v_r(order)}` to the result.
pub fn multiple_fact(a: &BigUint, q: &BigUint, smooth_bound: u64) -> Result<OrderFact> {
    let qm1 = q - 1u32;
    let mut m = BigUint::one();
    for r in factor::primes_upto(smooth_bound) {
        let rb = BigUint::from(r);
        let t = valuation(&qm1, &rb);
        if t == 0 {
            continue;
        }
        let v = order_r_valuation(a, q, &rb, t)?;
        m *= rb.pow(v);
    }
    Ok(OrderFact {
        base: a.clone(),
        modulus: q.clone(),
        kind: OrderKind::MultipleOf(m),
    })
}

/// The strongest order fact obtainable within a factoring budget.
///
/// Trial division up to `smooth_bound` is followed by a bounded attack on
/// the remaining cofactor of `q - 1`. Every prime found contributes its
/// exact order valuation. If `q - 1` is completely factored the result is
/// exact; otherwise the certified multiple `m` is upgraded to exact when
/// `a^m ≡ 1 (mod q)` (then `ord | m` and `m | ord`).
pub fn refined_fact(
    a: &BigUint,
    q: &BigUint,
    smooth_bound: u64,
    budget: &factor::Budget,
) -> Result<OrderFact> {
    let qm1 = q - 1u32;
    let mut pairs: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = qm1.clone();
    for r in factor::primes_upto(smooth_bound) {
        let rb = BigUint::from(r);
        let t = valuation(&rest, &rb);
        if t > 0 {
            rest /= rb.pow(t);
            pairs.push((rb, t));
        }
    }
    let complete = if rest.is_one() {
        true
    } else {
        let fac = factor::factor_bounded(&rest, None, budget);
        let complete = fac.complete();
        pairs.extend(fac.factors);
        complete
    };

    let mut m = BigUint::one();
    for (r, t) in &pairs {
        let v = order_r_valuation(a, q, r, *t)?;
        m *= r.pow(v);
    }
    let kind = if complete || pow_mod(a, &m, q).is_one() {
        OrderKind::Exact(m)
    } else {
        OrderKind::MultipleOf(m)
    };
    Ok(OrderFact {
        base: a.clone(),
        modulus: q.clone(),
        kind,
    })
}

/// Is `n` equal to 1, a prime, or the square of a prime?
fn shape_is_admissible(n: &BigUint) -> bool {
    if n.is_one() || is_prime(n) {
        return true;
    }
    matches!(perfect_power(n), Some((r, 2)) if is_prime(&r))
}

/// Is `n` a divisor of some admissible repunit exponent for this base?
///
/// Admissible exponents are primes, squares of primes, and — for base 2
/// only — the Zsigmondy-exceptional exponent 6. Their divisors are exactly
/// `{1} ∪ primes ∪ prime squares`, plus `6` itself when the base is 2
/// (1, 2 and 3 are already covered).
fn divides_admissible_exponent(n: &BigUint, base: &BigUint) -> bool {
    shape_is_admissible(n) || (*base == BigUint::from(2u32) && *n == BigUint::from(6u32))
}

/// Decide whether an order fact leaves any admissible exponent open for
/// the repunit base it constrains.
///
/// A prime `P` with `o_P(a) = n` can divide `(a^e - 1)/(a - 1)` only when
/// `n | e` (and, for `n = 1`, additionally `P | e`; callers handle that
/// refinement). Exponents of two-prime repunits are primes, prime squares,
/// or — in base 2 — the exceptional 6, so:
///
/// * `Exact(n)`: `n` must divide one of those shapes, i.e. be `1`, a prime
///   `r` (exponent `r` or `r^2`), a prime square, or `6` when
///   `fact.base = 2`.
/// * `MultipleOf(m)`: same test on `m`, since `m | order | e`.
pub fn admissible_order(fact: &OrderFact) -> bool {
    match &fact.kind {
        OrderKind::Exact(n) => divides_admissible_exponent(n, &fact.base),
        OrderKind::MultipleOf(m) => divides_admissible_exponent(m, &fact.base),
    }
}

/// The structural shapes a repunit with at most two distinct prime factors
/// can occupy (writing `(a^e - 1)/(a - 1) = p^{f1} q^{f2}`, `p ≤ q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Base 2, exponent 6: the lone Zsigmondy-exceptional repunit
    /// `63 = 3^2 · 7`.
    ZsigmondyGap,
    /// Exponent a prime `r` with `p = r`.
    PrimeExpSmallFactorIsR,
    /// Exponent a prime `r` with `o_q(a) = r`.
    PrimeExpOrderQ,
    /// Exponent a prime `r` with `o_p(a) = o_q(a) = r`.
    PrimeExpBothOrders,
    /// Exponent `r^2` with `p, q` the two repunit layers
    /// `(a^r-1)/(a-1)` and `(a^{r^2}-1)/(a^r-1)`, both to the first power.
    SquareExpLayers,
    /// Base of the form `2^m - 1`, exponent 4, `p = 2` with `f1 = m + 1`.
    SquareExpMersenneBase,
}

/// Verdict of the structure check for one `(base, exponent)` instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureVerdict {
    /// The instance can occupy the listed shapes (necessary conditions
    /// hold; sufficiency is never claimed).
    Admissible { shapes: Vec<Shape> },
    /// No structural shape fits; the instance is impossible.
    Excluded { reason: String },
}

impl StructureVerdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, StructureVerdict::Admissible { .. })
    }
}

/// Structure check for `(a^e - 1)/(a - 1) = p^{f1} q^{f2}`.
///
/// `record` must be the complete factorization of the repunit and have at
/// most two distinct prime factors. The verdict lists every structural
/// shape the instance satisfies:
///
/// * exponent 6 in base 2 (the Zsigmondy gap `63 = 3^2 · 7`);
/// * exponent a prime `r`: `p = r`, or `o_q(a) = r`, or both orders `= r`;
/// * exponent `r^2`: the two repunit layers are exactly `p` and `q`, or
///   the base is `2^m - 1` with exponent 4 and `2^{m+1} ∥` the repunit.
///
/// Anything else is excluded.
pub fn repunit_structure(a: u32, e: u64, record: &Factorization) -> Result<StructureVerdict> {
    // The exponent shape is decided first: with an inadmissible exponent
    // the instance is excluded no matter what the factorization says.
    let square_root_prime = {
        let root = e.isqrt();
        root * root == e && is_prime_u64(root)
    };
    if !(a == 2 && e == 6) && !is_prime_u64(e) && !square_root_prime {
        return Ok(StructureVerdict::Excluded {
            reason: format!("exponent {e} is neither prime nor the square of a prime"),
        });
    }

    let x = factor::repunit(a, e);
    if !record.complete() || record.value() != x {
        return Err(Error::Config(format!(
            "record is not the complete factorization of the base-{a} repunit with exponent {e}"
        )));
    }
    if record.factors.len() > 2 {
        return Err(Error::Config(format!(
            "record has {} distinct primes; the structure check applies to at most two",
            record.factors.len()
        )));
    }

    if a == 2 && e == 6 {
        return Ok(StructureVerdict::Admissible {
            shapes: vec![Shape::ZsigmondyGap],
        });
    }

    let mut shapes = Vec::new();
    let ab = BigUint::from(a);
    // Order of `a` modulo a prime divisor ℓ of the repunit with prime
    // exponent r: always r unless ℓ | a - 1 (then 1).
    let order_is = |ell: &BigUint, r: u64| -> bool {
        pow_mod(&ab, &BigUint::from(r), ell).is_one() && !(&ab % ell).is_one()
    };

    if is_prime_u64(e) {
        let r = e;
        if let Some((p, _)) = record.factors.first() {
            if *p == BigUint::from(r) {
                shapes.push(Shape::PrimeExpSmallFactorIsR);
            }
        }
        if let Some((q, _)) = record.factors.last() {
            if order_is(q, r) {
                shapes.push(Shape::PrimeExpOrderQ);
                if let Some((p, _)) = record.factors.first() {
                    if order_is(p, r) {
                        shapes.push(Shape::PrimeExpBothOrders);
                    }
                }
            }
        }
    } else {
        let r = e.isqrt();
        // Layer shape: (a^r-1)/(a-1) and (a^{r^2}-1)/(a^r-1), both prime,
        // both to the first power.
        let low = factor::repunit(a, r);
        let high = &x / &low;
        let layer_record = record.factors.len() == 2
            && record.factors[0] == (low.clone(), 1)
            && record.factors[1] == (high.clone(), 1);
        if layer_record && is_prime(&low) && is_prime(&high) {
            shapes.push(Shape::SquareExpLayers);
        }
        // Mersenne-form base: a = 2^m - 1, e = 4, p = 2 with f1 = m + 1.
        if e == 4 && (a + 1).is_power_of_two() {
            let m = (a + 1).trailing_zeros();
            let two = BigUint::from(2u32);
            if record.factors.iter().any(|(p, k)| *p == two && *k == m + 1) {
                shapes.push(Shape::SquareExpMersenneBase);
            }
        }
    }

    if shapes.is_empty() {
        Ok(StructureVerdict::Excluded {
            reason: "no structural shape matches the factorization".into(),
        })
    } else {
        Ok(StructureVerdict::Admissible { shapes })
    }
}

/// Zsigmondy primitive-divisor predicate for `a^n - b^n` (`a > b ≥ 1`
/// coprime): does some prime divide `a^n - b^n` but no `a^m - b^m` with
/// `m < n`?
///
/// False exactly for `n = 1` with `a - b = 1`, for `n = 2` with `a + b` a
/// power of two, and for `(a, b, n) = (2, 1, 6)`.
pub fn zsigmondy_has_primitive(a: u64, b: u64, n: u64) -> bool {
    debug_assert!(a > b && b >= 1 && n >= 1);
    debug_assert_eq!(num_integer::gcd(a, b), 1);
    match n {
        1 => a - b > 1,
        2 => !(a + b).is_power_of_two(),
        6 if a == 2 && b == 1 => false,
        _ => true,
    }
}
