//! Power-of-two scaled numbers.
//!
//! Recurrence values for orthogonal polynomials grow geometrically off the
//! spectrum. Every value is kept as `mantissa * 2^exponent`, with the mantissa
//! held inside `[2^-512, 2^512]`, so tables of arbitrary length stay finite.
//! Rescaling only multiplies by powers of two and is therefore exact.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Upper edge of the mantissa window, as a binary exponent.
pub const WINDOW_EXP: i32 = 512;

/// Real or complex field the recurrences run over.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_real(0.0)
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    /// Modulus.
    fn modulus(self) -> f64;
    /// Cheap magnitude used for window checks: max of component moduli.
    fn max_component(self) -> f64;
    fn finite(self) -> bool;
    fn ldexp(self, e: i32) -> Self;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn max_component(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn ldexp(self, e: i32) -> Self {
        ldexp(self, e)
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn max_component(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn ldexp(self, e: i32) -> Self {
        Complex64::new(ldexp(self.re, e), ldexp(self.im, e))
    }
}

/// `x * 2^e`, exact unless the result over- or underflows.
pub fn ldexp(mut x: f64, mut e: i32) -> f64 {
    // 2^e is only representable as a normal double for e in [-1022, 1023].
    while e > 1023 {
        x *= f64::from_bits(((1023 + 1023) as u64) << 52);
        e -= 1023;
        if !x.is_finite() {
            return x;
        }
    }
    while e < -1022 {
        x *= f64::from_bits(1u64 << 52); // 2^-1022
        e += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((e + 1023) as u64) << 52)
}

/// Binary exponent `e` with `2^e <= |x| < 2^(e+1)`; `None` for zero or non-finite.
pub fn ilogb(x: f64) -> Option<i32> {
    if x == 0.0 || !x.is_finite() {
        return None;
    }
    let bits = x.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal
        let y = x.abs() * f64::from_bits(((64 + 1023) as u64) << 52);
        return ilogb(y).map(|e| e - 64);
    }
    Some(raw - 1023)
}

/// A value stored as `mantissa * 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<T> {
    pub mantissa: T,
    pub exponent: i32,
}

// explicit methods rather than operator traits: every call site is a scaled op
#[allow(clippy::should_implement_trait)]
impl<T: Scalar> Scaled<T> {
    pub fn new(mantissa: T, exponent: i32) -> Self {
        Scaled { mantissa, exponent }
    }

    pub fn from_value(v: T) -> Self {
        Scaled::new(v, 0).normalized()
    }

    pub fn zero() -> Self {
        Scaled::new(T::zero(), 0)
    }

    /// Unscaled value; may overflow to infinity or underflow to zero.
    pub fn value(&self) -> T {
        self.mantissa.ldexp(self.exponent)
    }

    /// Re-centre the mantissa near 1 when it has left the window.
    pub fn normalized(self) -> Self {
        let m = self.mantissa.max_component();
        match ilogb(m) {
            Some(e) if !(-WINDOW_EXP..=WINDOW_EXP).contains(&e) => {
                Scaled::new(self.mantissa.ldexp(-e), self.exponent + e)
            }
            _ => self,
        }
    }

    /// Same value expressed with the given exponent (may lose low bits).
    pub fn at_exponent(&self, exponent: i32) -> T {
        self.mantissa.ldexp(self.exponent - exponent)
    }

    /// log2 of the modulus, `-inf` for zero.
    pub fn log2_modulus(&self) -> f64 {
        let m = self.mantissa.modulus();
        if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            m.log2() + self.exponent as f64
        }
    }

    pub fn modulus(&self) -> Scaled<f64> {
        Scaled::new(self.mantissa.modulus(), self.exponent)
    }

    /// Same value with the largest mantissa component in `[1, 2)`. Products of
    /// window-edge mantissas would overflow, so `mul` and `div` work at this scale.
    fn unit(self) -> Self {
        match ilogb(self.mantissa.max_component()) {
            Some(e) if e != 0 => Scaled::new(self.mantissa.ldexp(-e), self.exponent + e),
            _ => self,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        let (x, y) = (self.unit(), other.unit());
        Scaled::new(x.mantissa * y.mantissa, x.exponent + y.exponent).normalized()
    }

    pub fn div(self, other: Self) -> Self {
        let (x, y) = (self.unit(), other.unit());
        Scaled::new(x.mantissa / y.mantissa, x.exponent - y.exponent).normalized()
    }

    pub fn scale(self, f: T) -> Self {
        Scaled::new(self.mantissa * f, self.exponent).normalized()
    }

    pub fn add(self, other: Self) -> Self {
        if self.mantissa == T::zero() {
            return other;
        }
        if other.mantissa == T::zero() {
            return self;
        }
        let e = self.exponent.max(other.exponent);
        Scaled::new(self.at_exponent(e) + other.at_exponent(e), e).normalized()
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(Scaled::new(-other.mantissa, other.exponent))
    }
}

impl Scaled<f64> {
    /// Ratio `self / other` as a plain number.
    pub fn ratio(&self, other: &Self) -> f64 {
        let (x, y) = (self.unit(), other.unit());
        ldexp(x.mantissa / y.mantissa, x.exponent - y.exponent)
    }
}

impl Scaled<Complex64> {
    pub fn ratio(&self, other: &Self) -> Complex64 {
        let (x, y) = (self.unit(), other.unit());
        (x.mantissa / y.mantissa).ldexp(x.exponent - y.exponent)
    }
}

/// Error-free `a*b - c*d` (Kahan's algorithm), accurate to a few ulps of the result.
pub fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let e = (-c).mul_add(d, w);
    let f = a.mul_add(b, -w);
    f + e
}
