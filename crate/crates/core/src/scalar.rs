//! Field backends: exact rationals and configurable-precision binary floats.
//!
//! Every numeric routine in the crate is generic over [`Scalar`]. The exact
//! backend ([`BigRational`]) makes identities checkable with `== 0`; the float
//! backend ([`Float`]) carries its binary precision in every value, so mixed
//! operations run at the larger of the two precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_base::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num::BigRational as Rational;

/// Default binary precision of the float backend.
pub const DEFAULT_PRECISION: usize = 128;

/// A field element as used by the pipeline.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// What is needed to build constants: nothing for rationals, the precision for floats.
    type Context: Copy + fmt::Debug + PartialEq + Send + Sync + 'static;

    /// Whether arithmetic is exact.
    const EXACT: bool;

    fn context(&self) -> Self::Context;
    fn from_rational(q: &Rational, ctx: Self::Context) -> Self;
    fn is_exact_zero(&self) -> bool;
    fn approx_f64(&self) -> f64;

    /// Round to a float of the given precision.
    fn to_float(&self, precision: usize) -> Float;

    /// Inverse of [`Scalar::to_float`]; `None` on the exact backend.
    fn from_float(x: &Float, ctx: Self::Context) -> Option<Self>;

    /// Working precision when values come from quadrature; `None` for exact backends.
    fn quadrature_precision(ctx: Self::Context) -> Option<usize>;

    fn exp(&self) -> Result<Self>;
    fn ln(&self) -> Result<Self>;

    /// `self^q` for rational `q`. The exact backend errors unless the root is exact.
    fn pow_rational(&self, q: &Rational) -> Result<Self>;

    /// True when a Gauss-Borel pivot of this size must be treated as zero.
    fn below_pivot_floor(&self) -> bool;

    fn from_i64(n: i64, ctx: Self::Context) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()), ctx)
    }

    fn zero_in(ctx: Self::Context) -> Self {
        Self::from_i64(0, ctx)
    }

    fn one_in(ctx: Self::Context) -> Self {
        Self::from_i64(1, ctx)
    }

    fn magnitude(&self) -> Self {
        if self.is_neg() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_neg(&self) -> bool {
        *self < Self::zero_in(self.context())
    }

    fn pow_u32(&self, n: u32) -> Self {
        let mut acc = Self::one_in(self.context());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Exact rational value of `self` (floats are dyadic rationals).
    fn to_rational(&self) -> Rational;

    /// Fixed-point rendering with `digits` decimals.
    fn to_fixed(&self, digits: usize) -> String {
        fixed_point(&self.to_rational(), digits)
    }

    /// Lossless text: `num/den` for rationals, shortest exact decimal for floats.
    fn to_exact_string(&self) -> String;
}

/// Larger of two absolute values, used for residual maxima.
pub fn max_abs<T: Scalar>(a: T, b: &T) -> T {
    let b = b.magnitude();
    if b > a {
        b
    } else {
        a
    }
}

/// Convenience: rational from a ratio of machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

fn fixed_point(q: &Rational, digits: usize) -> String {
    let scale = num::pow(BigInt::from(10), digits);
    let scaled = q * Rational::from_integer(scale.clone());
    // round half away from zero
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let mag = rounded.abs();
    let int_part = &mag / &scale;
    let frac_part = &mag % &scale;
    let sign = if neg && !mag.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

fn big_to_ibig(n: &BigInt) -> IBig {
    IBig::from_le_bytes(&n.to_signed_bytes_le())
}

fn ibig_to_big(n: &IBig) -> BigInt {
    BigInt::from_signed_bytes_le(&n.to_le_bytes())
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (num::pow(r.clone(), k as usize) == *n).then_some(r)
}

impl Scalar for BigRational {
    type Context = ();
    const EXACT: bool = true;

    fn context(&self) {}

    fn from_rational(q: &Rational, _: ()) -> Self {
        q.clone()
    }

    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn approx_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_float(&self, precision: usize) -> Float {
        Float::from_rational(self, precision)
    }

    fn from_float(_: &Float, _: ()) -> Option<Self> {
        None
    }

    fn quadrature_precision(_: ()) -> Option<usize> {
        None
    }

    fn exp(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Ok(One::one())
        } else {
            Err(Error::NotExact(format!("exp({self})")))
        }
    }

    fn ln(&self) -> Result<Self> {
        if One::is_one(self) {
            Ok(Zero::zero())
        } else {
            Err(Error::NotExact(format!("ln({self})")))
        }
    }

    fn pow_rational(&self, q: &Rational) -> Result<Self> {
        let a = q.numer();
        let b = q
            .denom()
            .to_u32()
            .ok_or_else(|| Error::NotExact(format!("root of order {}", q.denom())))?;
        if Zero::is_zero(self) {
            return match a.sign() {
                num::bigint::Sign::Plus => Ok(Zero::zero()),
                num::bigint::Sign::NoSign => Ok(One::one()),
                num::bigint::Sign::Minus => Err(Error::Domain(format!("0^({q})"))),
            };
        }
        if Signed::is_negative(self) && b % 2 == 0 {
            return Err(Error::Domain(format!("({self})^({q}) is not real")));
        }
        let base = if b == 1 {
            self.clone()
        } else {
            let n = exact_root(self.numer(), b);
            let d = exact_root(self.denom(), b);
            match (n, d) {
                (Some(n), Some(d)) => Rational::new(n, d),
                _ => return Err(Error::NotExact(format!("({self})^(1/{b})"))),
            }
        };
        let e = a
            .abs()
            .to_i32()
            .ok_or_else(|| Error::Domain(format!("exponent {q} too large")))?;
        let p = num::pow(base, e as usize);
        Ok(if a.is_negative() { p.recip() } else { p })
    }

    fn below_pivot_floor(&self) -> bool {
        Zero::is_zero(self)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn to_exact_string(&self) -> String {
        if One::is_one(self.denom()) {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

type Fb = FBig<HalfEven, 2>;

/// Binary floating-point number with an explicit precision in bits.
#[derive(Clone)]
pub struct Float(Fb);

impl Float {
    pub fn from_rational(q: &Rational, precision: usize) -> Self {
        let num = Fb::from(big_to_ibig(q.numer()))
            .with_precision(precision)
            .value();
        let den = Fb::from(big_to_ibig(q.denom()))
            .with_precision(precision)
            .value();
        Float(num / den)
    }

    pub fn from_f64(x: f64, precision: usize) -> Self {
        let r = Rational::from_float(x).expect("finite f64");
        Self::from_rational(&r, precision)
    }

    pub fn from_i64(n: i64, precision: usize) -> Self {
        Float(Fb::from(n).with_precision(precision).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.0 < Fb::ZERO {
            return Err(Error::Domain(format!("sqrt of negative {}", self.approx_f64())));
        }
        Ok(Float(self.0.sqrt()))
    }

    /// `2^-bits` at this value's precision.
    pub fn pow2(bits: isize, precision: usize) -> Self {
        Float(
            Fb::from_parts(IBig::ONE, bits)
                .with_precision(precision)
                .value(),
        )
    }

    /// pi to the given precision (Machin's formula; only used for node guesses and tests).
    pub fn pi(precision: usize) -> Self {
        let p = precision + 16;
        let atan_inv = |k: i64| {
            let x = Float::from_i64(1, p) / Float::from_i64(k, p);
            let x2 = x.clone() * x.clone();
            let mut term = x.clone();
            let mut sum = x;
            let eps = Float::pow2(-(p as isize), p);
            let mut n = 1i64;
            loop {
                term = -(term * x2.clone());
                let t = term.clone() / Float::from_i64(2 * n + 1, p);
                if t.magnitude() < eps {
                    break;
                }
                sum = sum + t;
                n += 1;
            }
            sum
        };
        let pi = Float::from_i64(16, p) * atan_inv(5) - Float::from_i64(4, p) * atan_inv(239);
        pi.with_precision(precision)
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        Float(self.0.clone().with_precision(precision).value())
    }
}

impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Float({:e}, {} bits)", self.approx_f64(), self.precision())
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.approx_f64())
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! float_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Float {
            type Output = Float;
            fn $method(self, rhs: Float) -> Float {
                Float($trait::$method(self.0, rhs.0))
            }
        }
    };
}

float_binop!(Add, add);
float_binop!(Sub, sub);
float_binop!(Mul, mul);
float_binop!(Div, div);

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl Scalar for Float {
    type Context = usize;
    const EXACT: bool = false;

    fn context(&self) -> usize {
        self.precision()
    }

    fn from_rational(q: &Rational, precision: usize) -> Self {
        Float::from_rational(q, precision)
    }

    fn from_i64(n: i64, precision: usize) -> Self {
        Float::from_i64(n, precision)
    }

    fn is_exact_zero(&self) -> bool {
        self.0.repr().is_zero()
    }

    fn approx_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn to_float(&self, precision: usize) -> Float {
        self.with_precision(precision)
    }

    fn from_float(x: &Float, precision: usize) -> Option<Self> {
        Some(x.with_precision(precision))
    }

    fn quadrature_precision(precision: usize) -> Option<usize> {
        Some(precision)
    }

    fn exp(&self) -> Result<Self> {
        Ok(Float(self.0.exp()))
    }

    fn ln(&self) -> Result<Self> {
        if self.0 <= Fb::ZERO {
            return Err(Error::Domain(format!("ln of non-positive {}", self.approx_f64())));
        }
        Ok(Float(self.0.ln()))
    }

    fn pow_rational(&self, q: &Rational) -> Result<Self> {
        let p = self.precision();
        if q.is_integer() {
            let n = q
                .numer()
                .to_i64()
                .ok_or_else(|| Error::Domain(format!("exponent {q} too large")))?;
            if n < 0 && Scalar::is_exact_zero(self) {
                return Err(Error::Domain(format!("0^({q})")));
            }
            let v = Scalar::pow_u32(self, n.unsigned_abs() as u32);
            return Ok(if n < 0 { Float::from_i64(1, p) / v } else { v });
        }
        if Scalar::is_exact_zero(self) {
            return if Signed::is_negative(q) {
                Err(Error::Domain(format!("0^({q})")))
            } else {
                Ok(Float::from_i64(0, p))
            };
        }
        if self.is_neg() {
            let odd_root = q.denom() % BigInt::from(2) == BigInt::one();
            if !odd_root {
                return Err(Error::Domain(format!("({})^({q}) is not real", self.approx_f64())));
            }
            let mag = (-self.clone()).pow_rational(q)?;
            let odd_power = q.numer() % BigInt::from(2) != BigInt::zero();
            return Ok(if odd_power { -mag } else { mag });
        }
        if *q.denom() == BigInt::from(2) {
            let root = self.sqrt()?;
            let half = Rational::from_integer(q.numer().clone());
            return root.pow_rational(&half);
        }
        let qf = Float::from_rational(q, p);
        (qf * self.ln()?).exp()
    }

    fn below_pivot_floor(&self) -> bool {
        let floor = Float::pow2(-((self.precision() / 2) as isize), self.precision());
        self.magnitude() < floor
    }

    fn to_rational(&self) -> Rational {
        let repr = self.0.repr();
        let sig = ibig_to_big(repr.significand());
        let e = repr.exponent();
        if e >= 0 {
            Rational::from_integer(sig * num::pow(BigInt::from(2), e as usize))
        } else {
            Rational::new(sig, num::pow(BigInt::from(2), (-e) as usize))
        }
    }

    fn to_exact_string(&self) -> String {
        // enough decimal digits to round-trip the binary significand
        let digits = (self.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        let q = self.to_rational();
        if Zero::is_zero(&q) {
            return "0".into();
        }
        let mag = Signed::abs(&q);
        let mut exp10: i64 = 0;
        let ten = Rational::from_integer(10.into());
        let mut m = mag.clone();
        while m >= ten {
            m /= ten.clone();
            exp10 += 1;
        }
        while m < <Rational as One>::one() {
            m *= ten.clone();
            exp10 -= 1;
        }
        let mantissa = fixed_point(&m, digits - 1);
        let sign = if Signed::is_negative(&q) { "-" } else { "" };
        format!("{sign}{mantissa}e{exp10}")
    }
}
