//! Certified natural logarithm and exponential on rational inputs.
//!
//! `ln(n/d)` is computed by decimal normalization to `y in [1/sqrt(10), sqrt(10))`
//! followed by the atanh series
//!
//! ```text
//! ln y = 2 atanh(z),  z = (n - d)/(n + d),  atanh z = z + z^3/3 + z^5/5 + ...
//! ```
//!
//! with every term rounded outward at a guarded working scale and the tail
//! bounded by the geometric majorant
//! `sum_{j>k} 2 z^(2j+1)/(2j+1) <= t_{k+1} * v^2/(v^2 - u^2)` for `z = u/v`.
//! Normalization contributes `k * ln 10`, where `ln 10 = 3 ln 2 + ln(5/4)`
//! is evaluated by the same series on inputs that need no normalization
//! (avoiding any recursion). Per-precision values of `ln 10` are cached.
//!
//! `exp(n)` for small non-negative integers `n` uses the exact partial sum
//! `sum_{k<=K} n^k/k!` over the common denominator `K!`, with the tail
//! majorized by twice the first omitted term once `K >= 2n`.

use super::{ten_pow, FixedReal, RealInterval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Guard digits appended to the working scale of every series evaluation.
const GUARD: u32 = 12;

/// Scaled series for `ln(n/d)` with `n/d` in `[1/sqrt(10), sqrt(10))`.
/// Returns `(lo, hi)` mantissas at scale `w`.
fn ln_core(n: &BigInt, d: &BigInt, w: u32) -> (BigInt, BigInt) {
    assert!(n.is_positive() && d.is_positive());
    // Range check (loose): (n/d)^2 < 10 and (d/n)^2 < 10.
    debug_assert!(n * n < BigInt::from(10) * d * d);
    debug_assert!(d * d < BigInt::from(10) * n * n);

    if n == d {
        return (BigInt::zero(), BigInt::zero());
    }
    // Arrange n > d so all series terms are positive; negate at the end.
    let flipped = n < d;
    let (n, d) = if flipped { (d, n) } else { (n, d) };

    let u = n - d;
    let v = n + d;
    let u2 = &u * &u;
    let v2 = &v * &v;
    let gap = &v2 - &u2; // 4nd > 0
    let scale = ten_pow(w);

    let mut acc_lo = BigInt::zero();
    let mut acc_hi = BigInt::zero();
    let mut pu = u.clone(); // u^(2k+1)
    let mut pv = v.clone(); // v^(2k+1)
    let mut k: u64 = 0;
    loop {
        let num = BigInt::from(2) * &pu * &scale;
        let den = &pv * BigInt::from(2 * k + 1);
        acc_lo += num.div_floor(&den);
        acc_hi += num.div_ceil(&den);

        pu *= &u2;
        pv *= &v2;
        k += 1;
        // Tail after k-1: bounded by term_k * v^2/(v^2-u^2).
        let tail_num = BigInt::from(2) * &pu * &scale * &v2;
        let tail_den = &pv * BigInt::from(2 * k + 1) * &gap;
        let tail = tail_num.div_ceil(&tail_den);
        if tail <= BigInt::from(2) {
            acc_hi += tail;
            break;
        }
        assert!(k < 1_000_000, "ln series failed to converge");
    }
    if flipped {
        (-acc_hi, -acc_lo)
    } else {
        (acc_lo, acc_hi)
    }
}

/// `(lo, hi)` mantissas of `ln 10` at scale `w`, cached per scale.
fn ln10_scaled(w: u32) -> (BigInt, BigInt) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&w) {
        return v.clone();
    }
    // ln 10 = 3 ln 2 + ln(5/4); both arguments already lie in range.
    let (l2_lo, l2_hi) = ln_core(&BigInt::from(2), &BigInt::from(1), w);
    let (l54_lo, l54_hi) = ln_core(&BigInt::from(5), &BigInt::from(4), w);
    let out = (BigInt::from(3) * l2_lo + l54_lo, BigInt::from(3) * l2_hi + l54_hi);
    cache.lock().unwrap().insert(w, out.clone());
    out
}

/// Certified `ln(num/den)` at scale `prec`. Requires `num, den > 0`.
pub fn ln_rational(num: &BigInt, den: &BigInt, prec: u32) -> RealInterval {
    assert!(num.is_positive() && den.is_positive(), "ln of non-positive rational");
    let w = prec + GUARD;

    // Find k with num/(den*10^k) in [1/sqrt(10), sqrt(10)), i.e.
    // 10 n'^2 >= d'^2 and n'^2 < 10 d'^2.
    let k_guess = num.to_string().len() as i64 - den.to_string().len() as i64;
    let mut chosen = None;
    for k in [k_guess - 1, k_guess, k_guess + 1] {
        let (np, dp) = shift(num, den, k);
        let n2 = &np * &np;
        let d2 = &dp * &dp;
        if BigInt::from(10) * &n2 >= d2 && n2 < BigInt::from(10) * &d2 {
            chosen = Some((k, np, dp));
            break;
        }
    }
    let (k, np, dp) = chosen.expect("decimal normalization failed");

    let (mut lo, mut hi) = ln_core(&np, &dp, w);
    if k != 0 {
        let (l10_lo, l10_hi) = ln10_scaled(w);
        let kk = BigInt::from(k);
        if k > 0 {
            lo += &kk * l10_lo;
            hi += &kk * l10_hi;
        } else {
            lo += &kk * l10_hi;
            hi += &kk * l10_lo;
        }
    }
    RealInterval::new(FixedReal::new(lo, w), FixedReal::new(hi, w)).round_out(prec)
}

fn shift(num: &BigInt, den: &BigInt, k: i64) -> (BigInt, BigInt) {
    if k >= 0 {
        (num.clone(), den * ten_pow(k as u32))
    } else {
        (num * ten_pow((-k) as u32), den.clone())
    }
}

/// Certified `ln` of an interval with positive lower endpoint.
pub fn ln_interval(x: &RealInterval, prec: u32) -> RealInterval {
    assert!(x.lo.mantissa.is_positive(), "ln of interval reaching zero");
    let lo = ln_rational(&x.lo.mantissa, &ten_pow(x.lo.scale), prec);
    let hi = ln_rational(&x.hi.mantissa, &ten_pow(x.hi.scale), prec);
    RealInterval::new(lo.lo, hi.hi)
}

/// Certified `exp(n)` for a small non-negative integer `n`.
pub fn exp_integer(n: u32, prec: u32) -> RealInterval {
    let w = prec + GUARD;
    let nn = BigInt::from(n);
    let threshold = ten_pow(w); // stop when K! > n^(K+1) * 10^w roughly
    let mut numer = BigInt::from(1); // sum_{k<=K} n^k * K!/k!
    let mut factorial = BigInt::from(1); // K!
    let mut power = BigInt::from(1); // n^K
    let mut k: u32 = 0;
    loop {
        k += 1;
        factorial *= k;
        numer = numer * k + {
            power *= &nn;
            power.clone()
        };
        // First omitted term n^(K+1)/(K+1)!; stop once it is < 10^-w and
        // the doubling majorant applies (K >= 2n).
        if k >= 2 * n.max(1) {
            let next = &power * &nn * &threshold;
            let nextden = &factorial * BigInt::from(k + 1);
            if next.div_ceil(&nextden) <= BigInt::one() {
                let lo = (&numer * &threshold).div_floor(&factorial);
                let hi = (&numer * &threshold).div_ceil(&factorial) + BigInt::from(2);
                return RealInterval::new(FixedReal::new(lo, w), FixedReal::new(hi, w))
                    .round_out(prec);
            }
        }
        assert!(k < 100_000, "exp series failed to converge");
    }
}
