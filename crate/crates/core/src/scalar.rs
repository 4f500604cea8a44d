//! Scalar abstractions shared by the exact and floating kernels.
//!
//! Exact code (linear algebra, group rings, kernel projections) is generic
//! over [`Field`]; anything that needs the involution of a group ring also
//! requires [`StarField`]. The floating cross-checks are generic over
//! [`Real`], implemented for `f64` and for the double-double [`DoubleDouble`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// Exact rationals.
pub type Rational = BigRational;

/// An exact field.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn from_rational(q: Rational) -> Self;

    /// The value as a rational, if it is one.
    fn to_rational(&self) -> Option<Rational>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }
}

/// A subfield of the complex numbers closed under complex conjugation.
pub trait StarField: Field {
    fn conj(&self) -> Self;

    /// Complex embedding, used only for reporting and floating cross-checks.
    fn to_complex<R: Real>(&self) -> Complex<R>;
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(q: Rational) -> Self {
        q
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl StarField for Rational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn to_complex<R: Real>(&self) -> Complex<R> {
        Complex::new(R::from_rational(self), R::zero())
    }
}

/// Floating scalars usable by the numerical cross-checks.
///
/// Only ring operations, ordering, `sqrt` and `abs` are needed, so this is
/// deliberately narrower than `num_traits::Float`.
pub trait Real: Num + Copy + PartialOrd + Neg<Output = Self> + fmt::Debug + Send + Sync + 'static {
    /// Approximate decimal digits carried by the type.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    fn sqrt(self) -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn epsilon() -> Self;

    fn from_big_int(n: &BigInt) -> Self;

    fn from_rational(q: &Rational) -> Self {
        Self::from_big_int(q.numer()) / Self::from_big_int(q.denom())
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or_else(|| Self::from_big_int(q.numer()) / Self::from_big_int(q.denom()))
    }

    fn from_big_int(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
    }
}

/// Double-double scalar with roughly 31 significant digits.
///
/// Wraps [`TwoFloat`] and refines its quotient with two residual
/// corrections, since the raw quotient is only good to double precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble(TwoFloat::from(x))
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DoubleDouble(self.0 + o.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        DoubleDouble(self.0 - o.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DoubleDouble(self.0 * o.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut q = self.0 / o.0;
        if !q.is_valid() || o.0 == TwoFloat::from(0.0) {
            return DoubleDouble(q);
        }
        for _ in 0..2 {
            let r = self.0 - q * o.0;
            q += TwoFloat::from(r.hi() / o.0.hi());
        }
        DoubleDouble(q)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        DoubleDouble(self.0 % o.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::from(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == TwoFloat::from(0.0)
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::from(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(DoubleDouble::from)
    }
}

impl Real for DoubleDouble {
    const DIGITS: u32 = 31;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }

    fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }

    fn sqrt(self) -> Self {
        // TwoFloat's sqrt returns NaN at zero; one Newton step from the f64 root suffices
        let hi = self.0.hi();
        if hi <= 0.0 {
            return if hi == 0.0 { DoubleDouble::zero() } else { DoubleDouble::from(f64::NAN) };
        }
        let x = DoubleDouble::from(hi.sqrt());
        x + (self - x * x) / (x + x)
    }

    fn epsilon() -> Self {
        DoubleDouble::from(1e-32)
    }

    fn from_big_int(n: &BigInt) -> Self {
        // hi carries the leading 53 bits, lo the next 53
        let hi = n.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return DoubleDouble::from(hi);
        }
        let rest = n - BigInt::from_f64(hi).unwrap_or_default();
        let lo = rest.to_f64().unwrap_or(0.0);
        DoubleDouble(TwoFloat::new_add(hi, lo))
    }
}

/// Primitive `order`-th root of unity `exp(2πi/order)` to the full precision
/// of `R`, refined by Newton iteration on `z^order = 1` from an `f64` start.
pub fn root_of_unity<R: Real>(order: u64) -> Complex<R> {
    let angle = 2.0 * std::f64::consts::PI / order as f64;
    let mut z = Complex::new(R::from_f64(angle.cos()), R::from_f64(angle.sin()));
    if order <= 2 {
        return z;
    }
    let m = R::from_f64(order as f64);
    for _ in 0..3 {
        let zm1 = complex_powu(z, order - 1);
        let f = zm1 * z - Complex::new(R::one(), R::zero());
        let df = zm1 * Complex::new(m, R::zero());
        z = z - f / df;
    }
    z
}

pub(crate) fn complex_powu<R: Real>(mut base: Complex<R>, mut exp: u64) -> Complex<R> {
    let mut acc = Complex::new(R::one(), R::zero());
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        exp >>= 1;
    }
    acc
}

/// Renders a rational as the `p/q` wire form.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn rational_to_decimal(q: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (q.abs() * Rational::from_integer(scale.clone()) + Rational::new(1.into(), 2.into())).floor().to_integer();
    let (int, frac) = (&scaled / &scale, &scaled % &scale);
    let sign = if q.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0>digits$}", frac = frac.to_string())
    }
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> crate::Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| crate::Error::Parse(format!("invalid rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(crate::Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// `serialize_with` helper for rationals in the `p/q` wire form.
pub fn serialize_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(q))
}

pub fn serialize_rationals<S: serde::Serializer>(qs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(rational_to_string))
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(rational_to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(rational_to_decimal(&rat(2, 3), 2), "0.67");
        assert_eq!(rational_to_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(rational_to_decimal(&rat(-1, 1000), 2), "0.00");
        assert_eq!(rational_to_decimal(&rat(7, 2), 0), "4");
        assert_eq!(rational_to_decimal(&rat(1, 12), 3), "0.083");
    }

    #[test]
    fn rational_wire_form() {
        assert_eq!(rational_to_string(&rat(-6, 4)), "-3/2");
        assert_eq!(rational_to_string(&rat(3, 1)), "3/1");
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn twofloat_roots_are_accurate() {
        for order in [3u64, 5, 7, 12, 24] {
            let z: Complex<DoubleDouble> = root_of_unity(order);
            let zn = complex_powu(z, order);
            let err = (zn.re - DoubleDouble::one()).abs() + zn.im.abs();
            assert!(err < DoubleDouble::from(1e-29), "order {order}: {err:?}");
        }
    }

    #[test]
    fn twofloat_from_big_rational_keeps_low_bits() {
        let big = BigInt::from(1u64 << 60) + BigInt::from(1);
        let x = DoubleDouble::from_big_int(&big);
        let back = x - DoubleDouble::from((1u64 << 60) as f64);
        assert_eq!(back, DoubleDouble::one());
    }

    #[test]
    fn double_double_sqrt() {
        assert_eq!(Real::sqrt(DoubleDouble::zero()), DoubleDouble::zero());
        let two = DoubleDouble::from(2.0);
        let r = Real::sqrt(two);
        assert!(Real::abs(r * r - two).to_f64() < 1e-30);
        assert!(Real::sqrt(DoubleDouble::from(-1.0)).to_f64().is_nan());
    }

    #[test]
    fn double_double_division_is_accurate() {
        let three = DoubleDouble::from(3.0);
        let third = DoubleDouble::one() / three;
        assert!((third * three - DoubleDouble::one()).abs() < DoubleDouble::from(1e-31));
        let x = DoubleDouble(TwoFloat::new_add(0.75, 1e-17));
        assert!((x / x - DoubleDouble::one()).abs() < DoubleDouble::from(1e-31));
    }
}
