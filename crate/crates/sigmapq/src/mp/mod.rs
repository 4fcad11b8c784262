//! Directed-rounding fixed-point arithmetic over [`BigInt`].
//!
//! Every proof-relevant quantity in the pipeline is carried as a
//! [`RealInterval`]: a pair of decimal fixed-point numbers `[lo, hi]`
//! guaranteed to bracket the exact real value. Operations round `lo` down
//! and `hi` up, so enclosure is preserved through arbitrarily long
//! computation chains; a comparison certified on an interval is a theorem
//! about the exact value.
//!
//! Decimal scales (a mantissa over `10^scale`) are used instead of binary
//! because the lattice stage needs exact floors of `C * ln a` with
//! `C = 10^k`, and the acceptance targets are printed in decimal.
//!
//! No floating point participates in any comparison; `f64` appears only in
//! test oracles (as a loose cross-check) and display code.

pub mod ln;

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for scale conversions and division.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

pub(crate) fn ten_pow(k: u32) -> BigInt {
    BigInt::from(10).pow(k)
}

/// Modular exponentiation `a^e mod m` on unsigned big integers.
///
/// Thin, named wrapper so every order/sieve congruence check routes through
/// one auditable entry point.
pub fn pow_mod(
    a: &num_bigint::BigUint,
    e: &num_bigint::BigUint,
    m: &num_bigint::BigUint,
) -> num_bigint::BigUint {
    a.modpow(e, m)
}

fn div_dir(num: &BigInt, den: &BigInt, dir: Dir) -> BigInt {
    debug_assert!(den.is_positive());
    match dir {
        Dir::Down => num.div_floor(den),
        Dir::Up => num.div_ceil(den),
    }
}

/// A decimal fixed-point number: `mantissa / 10^scale`. Exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedReal {
    pub mantissa: BigInt,
    pub scale: u32,
}

impl FixedReal {
    pub fn new(mantissa: BigInt, scale: u32) -> Self {
        FixedReal { mantissa, scale }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        FixedReal { mantissa: v.into(), scale: 0 }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// `num/den` rounded in direction `dir` at scale `scale`. `den > 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, scale: u32, dir: Dir) -> Self {
        assert!(den.is_positive(), "denominator must be positive");
        FixedReal { mantissa: div_dir(&(num * ten_pow(scale)), den, dir), scale }
    }

    /// Re-express at `scale`, rounding in `dir` when precision is lost.
    pub fn rescale(&self, scale: u32, dir: Dir) -> Self {
        if scale >= self.scale {
            FixedReal { mantissa: &self.mantissa * ten_pow(scale - self.scale), scale }
        } else {
            FixedReal {
                mantissa: div_dir(&self.mantissa, &ten_pow(self.scale - scale), dir),
                scale,
            }
        }
    }

    /// Exact sum (at the finer of the two scales).
    pub fn add(&self, rhs: &Self) -> Self {
        let s = self.scale.max(rhs.scale);
        let a = &self.mantissa * ten_pow(s - self.scale);
        let b = &rhs.mantissa * ten_pow(s - rhs.scale);
        FixedReal { mantissa: a + b, scale: s }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact product (scales add).
    pub fn mul(&self, rhs: &Self) -> Self {
        FixedReal { mantissa: &self.mantissa * &rhs.mantissa, scale: self.scale + rhs.scale }
    }

    pub fn neg(&self) -> Self {
        FixedReal { mantissa: -&self.mantissa, scale: self.scale }
    }

    pub fn abs(&self) -> Self {
        FixedReal { mantissa: self.mantissa.abs(), scale: self.scale }
    }

    /// `floor` of the exact value, as an integer.
    pub fn floor_int(&self) -> BigInt {
        self.mantissa.div_floor(&ten_pow(self.scale))
    }

    /// Compare exact values (scales need not match).
    pub fn cmp_value(&self, rhs: &Self) -> Ordering {
        let s = self.scale.max(rhs.scale);
        let a = &self.mantissa * ten_pow(s - self.scale);
        let b = &rhs.mantissa * ten_pow(s - rhs.scale);
        a.cmp(&b)
    }

    /// Compare the exact value against the rational `num/den` (`den > 0`).
    pub fn cmp_ratio(&self, num: &BigInt, den: &BigInt) -> Ordering {
        assert!(den.is_positive());
        (&self.mantissa * den).cmp(&(num * ten_pow(self.scale)))
    }

    /// Largest `FixedReal` at `self.scale` whose square does not exceed
    /// `self` (which must be non-negative).
    pub fn sqrt_down(&self) -> Self {
        assert!(!self.is_negative());
        let m = &self.mantissa * ten_pow(self.scale);
        FixedReal { mantissa: m.sqrt(), scale: self.scale }
    }

    /// Scientific notation with `sig` significant digits (display only;
    /// rounding here is not directed and must not feed comparisons).
    pub fn to_sci(&self, sig: usize) -> String {
        if self.mantissa.is_zero() {
            return "0".into();
        }
        let neg = self.mantissa.is_negative();
        let digits = self.mantissa.abs().to_string();
        let exp10 = digits.len() as i64 - 1 - self.scale as i64;
        let (digits, exp10) = round_digits(&digits, sig, exp10);
        let mantissa = if digits.len() > 1 {
            format!("{}.{}", &digits[..1], &digits[1..])
        } else {
            digits
        };
        format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, exp10)
    }
}

fn round_digits(digits: &str, sig: usize, exp10: i64) -> (String, i64) {
    if digits.len() <= sig {
        return (digits.trim_end_matches('0').to_string(), exp10);
    }
    let keep: BigInt = digits[..sig].parse().unwrap();
    let next = digits.as_bytes()[sig] - b'0';
    let rounded = if next >= 5 { keep + 1 } else { keep };
    let mut s = rounded.to_string();
    let mut e = exp10;
    if s.len() > sig {
        s.truncate(sig);
        e += 1;
    }
    (s.trim_end_matches('0').to_string(), e)
}

impl PartialOrd for FixedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let neg = self.mantissa.is_negative();
        let digits = self.mantissa.abs().to_string();
        let s = self.scale as usize;
        let (int_part, frac_part) = if digits.len() > s {
            (digits[..digits.len() - s].to_string(), digits[digits.len() - s..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", digits, width = s))
        };
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            write!(f, "{}{}", if neg { "-" } else { "" }, int_part)
        } else {
            write!(f, "{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
        }
    }
}

/// A closed interval `[lo, hi]` certified to contain an exact real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: FixedReal,
    pub hi: FixedReal,
}

impl RealInterval {
    pub fn new(lo: FixedReal, hi: FixedReal) -> Self {
        debug_assert!(lo.cmp_value(&hi) != Ordering::Greater, "inverted interval");
        RealInterval { lo, hi }
    }

    pub fn exact(v: FixedReal) -> Self {
        RealInterval { lo: v.clone(), hi: v }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::exact(FixedReal::from_int(v))
    }

    /// `[num/den, num/den]` outward-rounded at `prec`. `den > 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        RealInterval {
            lo: FixedReal::from_ratio(num, den, prec, Dir::Down),
            hi: FixedReal::from_ratio(num, den, prec, Dir::Up),
        }
    }

    /// Outward rescale of both endpoints to `prec`.
    pub fn round_out(&self, prec: u32) -> Self {
        RealInterval {
            lo: self.lo.rescale(prec, Dir::Down),
            hi: self.hi.rescale(prec, Dir::Up),
        }
    }

    pub fn add(&self, rhs: &Self, prec: u32) -> Self {
        RealInterval { lo: self.lo.add(&rhs.lo), hi: self.hi.add(&rhs.hi) }.round_out(prec)
    }

    pub fn sub(&self, rhs: &Self, prec: u32) -> Self {
        RealInterval { lo: self.lo.sub(&rhs.hi), hi: self.hi.sub(&rhs.lo) }.round_out(prec)
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, rhs: &Self, prec: u32) -> Self {
        let cands = [
            self.lo.mul(&rhs.lo),
            self.lo.mul(&rhs.hi),
            self.hi.mul(&rhs.lo),
            self.hi.mul(&rhs.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp_value(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_value(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        RealInterval { lo, hi }.round_out(prec)
    }

    /// Interval division; errors if `rhs` contains zero.
    pub fn div(&self, rhs: &Self, prec: u32) -> Result<Self> {
        if rhs.lo.is_negative() != rhs.hi.is_negative() || rhs.lo.is_zero() || rhs.hi.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Endpoint quotients as exact rationals (num, den) with den > 0.
        let quot = |a: &FixedReal, b: &FixedReal| -> (BigInt, BigInt) {
            let mut num = &a.mantissa * ten_pow(b.scale);
            let mut den = &b.mantissa * ten_pow(a.scale);
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            (num, den)
        };
        let cands = [
            quot(&self.lo, &rhs.lo),
            quot(&self.lo, &rhs.hi),
            quot(&self.hi, &rhs.lo),
            quot(&self.hi, &rhs.hi),
        ];
        let less = |a: &(BigInt, BigInt), b: &(BigInt, BigInt)| (&a.0 * &b.1) < (&b.0 * &a.1);
        let mut lo = &cands[0];
        let mut hi = &cands[0];
        for c in &cands[1..] {
            if less(c, lo) {
                lo = c;
            }
            if less(hi, c) {
                hi = c;
            }
        }
        Ok(RealInterval {
            lo: FixedReal::from_ratio(&lo.0, &lo.1, prec, Dir::Down),
            hi: FixedReal::from_ratio(&hi.0, &hi.1, prec, Dir::Up),
        })
    }

    /// Integer power by repeated squaring (outward at each step).
    pub fn powi(&self, mut e: u32, prec: u32) -> Self {
        let mut base = self.clone();
        let mut acc = RealInterval::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, prec);
            }
        }
        acc
    }

    pub fn width(&self) -> FixedReal {
        self.hi.sub(&self.lo)
    }

    pub fn contains_value(&self, v: &FixedReal) -> bool {
        self.lo.cmp_value(v) != Ordering::Greater && v.cmp_value(&self.hi) != Ordering::Greater
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo.cmp_value(&other.lo) != Ordering::Greater
            && other.hi.cmp_value(&self.hi) != Ordering::Greater
    }

    /// Certified `value < num/den`.
    pub fn lt_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        self.hi.cmp_ratio(num, den) == Ordering::Less
    }

    /// Certified `value > num/den`.
    pub fn gt_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        self.lo.cmp_ratio(num, den) == Ordering::Greater
    }

    /// Certified containment in `[target*(1-tol), target*(1+tol)]` for
    /// rational `target = t_num/t_den > 0` and `tol = tol_num/tol_den`.
    pub fn within_rel_tol(
        &self,
        t_num: &BigInt,
        t_den: &BigInt,
        tol_num: &BigInt,
        tol_den: &BigInt,
    ) -> bool {
        assert!(t_num.is_positive() && t_den.is_positive());
        let lo_num = t_num * (tol_den - tol_num);
        let lo_den = t_den * tol_den;
        let hi_num = t_num * (tol_den + tol_num);
        let hi_den = lo_den.clone();
        self.lo.cmp_ratio(&lo_num, &lo_den) != Ordering::Less
            && self.hi.cmp_ratio(&hi_num, &hi_den) != Ordering::Greater
    }

    /// Floor of the exact value, certified unambiguous.
    pub fn floor_certified(&self) -> Result<BigInt> {
        let f_lo = self.lo.floor_int();
        let f_hi = self.hi.floor_int();
        if f_lo == f_hi {
            Ok(f_lo)
        } else {
            Err(Error::AmbiguousFloor {
                lo: self.lo.mantissa.clone(),
                hi: self.hi.mantissa.clone(),
                scale: self.lo.scale.max(self.hi.scale),
            })
        }
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(m: i64, s: u32) -> FixedReal {
        FixedReal::new(BigInt::from(m), s)
    }

    #[test]
    fn fixed_real_arithmetic_is_exact() {
        let a = fr(12345, 3); // 12.345
        let b = fr(-2, 1); // -0.2
        assert_eq!(a.add(&b), fr(12145, 3));
        assert_eq!(a.mul(&b).cmp_value(&fr(-24690, 4)), Ordering::Equal);
        assert_eq!(a.floor_int(), BigInt::from(12));
        assert_eq!(fr(-15, 1).floor_int(), BigInt::from(-2));
    }

    #[test]
    fn rescale_rounds_in_the_stated_direction() {
        let a = fr(12345, 3);
        assert_eq!(a.rescale(1, Dir::Down), fr(123, 1));
        assert_eq!(a.rescale(1, Dir::Up), fr(124, 1));
        let b = fr(-12345, 3);
        assert_eq!(b.rescale(1, Dir::Down), fr(-124, 1));
        assert_eq!(b.rescale(1, Dir::Up), fr(-123, 1));
    }

    #[test]
    fn interval_division_brackets_the_quotient() {
        let a = RealInterval::new(fr(10, 0), fr(11, 0));
        let b = RealInterval::new(fr(3, 0), fr(4, 0));
        let q = a.div(&b, 6).unwrap();
        // 10/4 = 2.5, 11/3 = 3.666...
        assert!(q.lo.cmp_ratio(&BigInt::from(5), &BigInt::from(2)) != Ordering::Greater);
        assert!(q.hi.cmp_ratio(&BigInt::from(11), &BigInt::from(3)) != Ordering::Less);
        let z = RealInterval::new(fr(-1, 0), fr(1, 0));
        assert!(a.div(&z, 6).is_err());
    }

    #[test]
    fn floor_certified_detects_straddles() {
        let ok = RealInterval::new(fr(19999, 4), fr(19999, 4));
        assert_eq!(ok.floor_certified().unwrap(), BigInt::from(1));
        let bad = RealInterval::new(fr(19999, 4), fr(20001, 4));
        assert!(matches!(bad.floor_certified(), Err(Error::AmbiguousFloor { .. })));
    }

    #[test]
    fn sci_rendering() {
        assert_eq!(fr(14204, 0).to_sci(3), "1.42e4");
        assert_eq!(fr(-9999, 2).to_sci(2), "-1e2");
        assert_eq!(fr(1, 3).to_sci(3), "1e-3");
    }

    #[test]
    fn display_trims_zeros() {
        assert_eq!(fr(12000, 3).to_string(), "12");
        assert_eq!(fr(-101, 2).to_string(), "-1.01");
        assert_eq!(fr(7, 3).to_string(), "0.007");
    }

    #[test]
    fn rel_tol_check() {
        // [1.405, 1.406] is within 1% of 1.405465
        let x = RealInterval::new(fr(1405, 3), fr(1406, 3));
        let (tn, td) = (BigInt::from(1405465), BigInt::from(1000000));
        assert!(x.within_rel_tol(&tn, &td, &BigInt::from(1), &BigInt::from(100)));
        assert!(!x.within_rel_tol(&tn, &td, &BigInt::from(1), &BigInt::from(10000)));
    }
}
