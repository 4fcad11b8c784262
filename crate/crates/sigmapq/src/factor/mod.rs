//! Integer factorization: primality testing, Pollard rho, perfect powers,
//! repunits, and the bundled factor table.
//!
//! The solver's factoring needs are deliberately bounded: complete
//! factorizations come from the bundled, verified table ([`db::FactorDb`]);
//! runtime factoring (trial division, Brent rho, perfect-power splitting)
//! handles desk-scale numbers and produces *partial* factorizations whose
//! omega lower bounds are still certified:
//!
//! * a named prime contributes 1;
//! * a composite cofactor contributes 1, or 2 when it is not a perfect
//!   power (a composite non-power has at least two distinct prime
//!   divisors).

pub mod db;
pub mod primality;
pub mod rho;
pub mod screen;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use db::FactorDb;
pub use primality::{is_prime, is_prime_u64};

/// `(base^e - 1)/(base - 1)`, the base-`base` number of `e` ones.
pub fn repunit(base: u32, e: u64) -> BigUint {
    assert!(base >= 2 && e >= 1);
    (BigUint::from(base).pow(e as u32) - 1u32) / BigUint::from(base - 1)
}

/// A (possibly partial) factorization: named prime powers and an optional
/// composite remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Distinct primes with exponents, ascending by prime.
    pub factors: Vec<(BigUint, u32)>,
    /// Composite unfactored remainder, if any (> 1, never prime).
    pub cofactor: Option<BigUint>,
}

impl Factorization {
    pub fn complete(&self) -> bool {
        self.cofactor.is_none()
    }

    /// Product of all parts; equals the factored number.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::one();
        for (p, k) in &self.factors {
            v *= p.pow(*k);
        }
        if let Some(c) = &self.cofactor {
            v *= c;
        }
        v
    }

    /// Exact omega when complete.
    pub fn omega(&self) -> Option<usize> {
        self.complete().then_some(self.factors.len())
    }

    /// Certified lower bound on omega. The cofactor is coprime to all
    /// named primes, so it contributes at least one new prime, and at
    /// least two when composite but not a perfect power.
    pub fn omega_lower_bound(&self) -> usize {
        match &self.cofactor {
            None => self.factors.len(),
            Some(c) => {
                let extra = match perfect_power(c) {
                    Some(_) => 1,
                    None => 2,
                };
                self.factors.len() + extra
            }
        }
    }

    fn push(&mut self, p: BigUint) {
        if let Some(slot) = self.factors.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += 1;
        } else {
            self.factors.push((p, 1));
            self.factors.sort();
        }
    }
}

/// `n = root^k` with `k >= 2` maximal, if n is a nontrivial perfect power.
pub fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    if n <= &BigUint::one() {
        return None;
    }
    let bits = n.bits();
    // Largest possible exponent: n >= 2^k.
    let mut best: Option<(BigUint, u32)> = None;
    for k in 2..=bits as u32 {
        let r = n.nth_root(k);
        if r < BigUint::from(2u32) {
            break;
        }
        if r.pow(k) == *n {
            best = Some((r, k));
        }
    }
    best
}

/// Primes `<= bound` by a plain sieve of Eratosthenes.
pub fn primes_upto(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            if i <= n / i {
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
    }
    out
}

/// Complete deterministic factorization of a u64.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| {
        if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
        while n.is_multiple_of(p) {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, &mut out);
            continue;
        }
        // Trial a bit further before rho.
        let mut found = 0u64;
        let mut d = 67u64;
        while d * d <= m && d < 10_000 {
            if m % d == 0 {
                found = d;
                break;
            }
            d += 2;
        }
        if found == 0 {
            found = rho::rho_u64(m).expect("rho failed on u64 composite");
        }
        stack.push(found);
        stack.push(m / found);
    }
    out.sort();
    out
}

/// Effort knobs for bounded factorization.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Trial-divide by every prime below this.
    pub trial: u64,
    /// For prime e, also trial the 2ke+1 class with k below this.
    pub class_k: u64,
    /// Brent rho iteration budget per composite.
    pub rho_iters: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { trial: 100_000, class_k: 100_000, rho_iters: 1 << 22 }
    }
}

/// Bounded factorization of `n`; `class_modulus`, when given, restricts
/// extended trial division to primes `2km + 1` (the shape of primitive
/// factors of `(a^m - 1)/(a - 1)` for prime `m`).
pub fn factor_bounded(n: &BigUint, class_modulus: Option<u64>, budget: &Budget) -> Factorization {
    let mut fac = Factorization { factors: Vec::new(), cofactor: None };
    let mut rest = n.clone();

    let strip = |rest: &mut BigUint, p: &BigUint, fac: &mut Factorization| {
        while (&*rest % p).is_zero() {
            *rest /= p;
            fac.push(p.clone());
        }
    };

    // Trial by small primes.
    let mut d = 2u64;
    while d < budget.trial {
        if rest.is_one() {
            break;
        }
        if is_prime_u64(d) {
            let dp = BigUint::from(d);
            if &dp * &dp > rest {
                break;
            }
            strip(&mut rest, &dp, &mut fac);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if !rest.is_one() && is_prime(&rest) {
        let r = rest.clone();
        strip(&mut rest, &r, &mut fac);
    }
    // Class trial 2km + 1.
    if let Some(m) = class_modulus {
        let step = 2 * m;
        let mut q = 1u64;
        for _ in 0..budget.class_k {
            q = match q.checked_add(step) {
                Some(v) => v,
                None => break,
            };
            if rest.is_one() {
                break;
            }
            let qb = BigUint::from(q);
            if &qb * &qb > rest {
                break;
            }
            if (&rest % &qb).is_zero() && is_prime_u64(q) {
                strip(&mut rest, &qb, &mut fac);
                if !rest.is_one() && is_prime(&rest) {
                    let r = rest.clone();
                    strip(&mut rest, &r, &mut fac);
                }
            }
        }
    }

    // Rho / perfect-power loop.
    let mut stack = Vec::new();
    if !rest.is_one() {
        stack.push(rest);
    }
    let mut cof = BigUint::one();
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            fac.push(c);
            continue;
        }
        if let Some((r, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(r.clone());
            }
            continue;
        }
        match rho::rho_biguint(&c, budget.rho_iters) {
            Some(f) => {
                stack.push(&c / &f);
                stack.push(f);
            }
            None => cof *= c,
        }
    }
    if !cof.is_one() {
        fac.cofactor = Some(cof);
    }
    debug_assert_eq!(&fac.value(), n);
    fac
}
