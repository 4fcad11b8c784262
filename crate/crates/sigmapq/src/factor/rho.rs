//! Pollard rho factor finding, Brent's cycle variant, for u64 and BigUint.
//!
//! Seeding is deterministic (splitmix-style increments over the attempt
//! index) so identical inputs always factor identically; there is no
//! dependence on a global RNG.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// One Brent rho run on u64; returns a nontrivial factor if found.
fn brent_u64(n: u64, c: u64, budget: u64) -> Option<u64> {
    let f = |x: u64| (mulmod(x, x, n) + c) % n;
    let mut y: u64 = 2;
    let (mut r, mut q, mut g) = (1u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    let m = 128u64;
    let mut spent = 0u64;
    while g == 1 && spent < budget {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        spent += r;
        r *= 2;
    }
    if g == n {
        // Backtrack one step at a time.
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g > 1 && g < n).then_some(g)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd_u64(b % a, a)
    }
}

/// Nontrivial factor of composite odd n (u64), trying several constants.
pub fn rho_u64(n: u64) -> Option<u64> {
    for attempt in 1..=20u64 {
        if let Some(f) = brent_u64(n, attempt.wrapping_mul(0x9e3779b9) % (n - 1) + 1, 1 << 24) {
            return Some(f);
        }
    }
    None
}

/// One Brent rho run on BigUint with batched gcds and an iteration budget.
pub fn rho_biguint(n: &BigUint, budget: u64) -> Option<BigUint> {
    for attempt in 1u64..=4 {
        let c = BigUint::from(attempt.wrapping_mul(0x9e3779b97f4a7c15) | 1) % n;
        if let Some(f) = brent_biguint(n, &c, budget) {
            return Some(f);
        }
    }
    None
}

fn brent_biguint(n: &BigUint, c: &BigUint, budget: u64) -> Option<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 128u64;
    let mut spent = 0u64;
    while g.is_one() && spent < budget {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                if !diff.is_zero() {
                    q = (&q * diff) % n;
                }
            }
            g = q.gcd(n);
            k += m;
        }
        spent += r;
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            if diff.is_zero() {
                return None;
            }
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (!g.is_one() && &g < n).then_some(g)
}
