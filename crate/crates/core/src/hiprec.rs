//! Double-double arithmetic: a value is the unevaluated sum `hi + lo` of two
//! `f64` with `|lo| <= ulp(hi) / 2`, giving about 106 significant bits.
//!
//! Only what entropy and log-bound evaluation need is implemented: the four
//! operations, `exp`, `ln`, and exact conversion from big integers.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::exactnum::Rat;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleF64 {
    hi: f64,
    lo: f64,
}

/// Unit roundoff of the double-double format (2^-104).
pub const EPSILON: f64 = 4.930380657631324e-32;

pub const LN_2: DoubleF64 = DoubleF64 {
    hi: core::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

pub const PI: DoubleF64 = DoubleF64 {
    hi: core::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl DoubleF64 {
    pub const ZERO: DoubleF64 = DoubleF64 { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleF64 = DoubleF64 { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleF64 { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        DoubleF64 { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplies by `2^exp` exactly (barring overflow/underflow).
    pub fn ldexp(self, exp: i32) -> Self {
        DoubleF64 {
            hi: libm::ldexp(self.hi, exp),
            lo: libm::ldexp(self.lo, exp),
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleF64 { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        self / DoubleF64::from_f64(b)
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    /// Exact conversion of an integer below 2^106.
    fn from_u128(m: u128) -> Self {
        let hi = m as f64;
        // hi is an integer of magnitude < 2^107, so the subtraction is exact.
        let rest = m as i128 - hi as i128;
        DoubleF64::new(hi, rest as f64)
    }

    /// Returns `(mantissa, exponent)` with `value ≈ mantissa · 2^exponent`,
    /// where the mantissa keeps the top 106 bits (truncated).
    pub fn from_biguint_scaled(value: &BigUint) -> (Self, i64) {
        let bits = value.bits();
        if bits <= 106 {
            let m = value.to_u128().unwrap_or(0);
            return (Self::from_u128(m), 0);
        }
        let shift = bits - 106;
        let top = (value >> shift).to_u128().unwrap_or(0);
        (Self::from_u128(top), shift as i64)
    }

    pub fn from_biguint(value: &BigUint) -> Self {
        let (m, e) = Self::from_biguint_scaled(value);
        m.ldexp(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    pub fn from_bigint(value: &BigInt) -> Self {
        let magnitude = Self::from_biguint(value.magnitude());
        if value.sign() == Sign::Minus {
            -magnitude
        } else {
            magnitude
        }
    }

    /// Nearest double-double to a rational (relative error ≈ 2^-104).
    pub fn from_rat(value: &Rat) -> Self {
        if value.is_zero() {
            return Self::ZERO;
        }
        let (n, ne) = Self::from_biguint_scaled(value.numer().magnitude());
        let (d, de) = Self::from_biguint_scaled(value.denom().magnitude());
        let q = (n / d).ldexp((ne - de).clamp(i32::MIN as i64, i32::MAX as i64) as i32);
        if value.numer().sign() == Sign::Minus {
            -q
        } else {
            q
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return DoubleF64::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        const SQUARINGS: i32 = 10;
        let k = libm::round(self.hi / LN_2.hi);
        let r = (self - LN_2.mul_f64(k)).ldexp(-SQUARINGS);
        // Taylor series for exp(r) - 1 with |r| < 2^-10·ln2/2.
        let mut term = r;
        let mut sum = r;
        for n in 2..40 {
            term = (term * r).div_f64(n as f64);
            sum = sum + term;
            if libm::fabs(term.hi) < 1e-36 {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s², applied once per halving.
        for _ in 0..SQUARINGS {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    /// Natural logarithm; one Newton step on `exp` refines the `f64` seed.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleF64::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        let x = DoubleF64::from_f64(libm::log(self.hi));
        x + self * (-x).exp() - Self::ONE
    }

    pub fn ln_biguint(value: &BigUint) -> Self {
        let (m, e) = Self::from_biguint_scaled(value);
        m.ln() + LN_2.mul_f64(e as f64)
    }

    /// `ln` of a positive rational, computed as `ln(numer) - ln(denom)`.
    pub fn ln_rat(value: &Rat) -> Self {
        Self::ln_biguint(value.numer().magnitude()) - Self::ln_biguint(value.denom().magnitude())
    }

    /// `ln(2πe)`.
    pub fn ln_2pi_e() -> Self {
        LN_2 + PI.ln() + Self::ONE
    }
}

impl Add for DoubleF64 {
    type Output = DoubleF64;

    fn add(self, b: DoubleF64) -> DoubleF64 {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleF64 { hi, lo }
    }
}

impl Sub for DoubleF64 {
    type Output = DoubleF64;

    fn sub(self, b: DoubleF64) -> DoubleF64 {
        self + (-b)
    }
}

impl Neg for DoubleF64 {
    type Output = DoubleF64;

    fn neg(self) -> DoubleF64 {
        DoubleF64 {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleF64 {
    type Output = DoubleF64;

    fn mul(self, b: DoubleF64) -> DoubleF64 {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleF64 { hi, lo }
    }
}

impl Div for DoubleF64 {
    type Output = DoubleF64;

    fn div(self, b: DoubleF64) -> DoubleF64 {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleF64 { hi, lo } + DoubleF64::from_f64(q3)
    }
}

impl PartialOrd for DoubleF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}
