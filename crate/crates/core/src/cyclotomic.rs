//! Exact arithmetic in cyclotomic fields `Q(ω_M)`.
//!
//! Elements are stored in the power basis `1, ω, …, ω^(φ(M)−1)` reduced
//! modulo the `M`-th cyclotomic polynomial, so two equal elements of the
//! same order have identical coefficient vectors. Operands of different
//! orders are lifted to the least common multiple of their orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_string, root_of_unity, Field, Rational, Real, StarField};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

static CYCLOTOMIC_POLYS: LazyLock<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Coefficients (low to high) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = CYCLOTOMIC_POLYS.read().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = exact_div_monic(&num, &phi_d);
    }
    let poly = Arc::new(num);
    CYCLOTOMIC_POLYS.write().unwrap().insert(n, poly.clone());
    poly
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (k, dk) in den.iter().enumerate() {
            rem[i + k] -= &c * dk;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Reduces a dense polynomial in `ω_order` (index = exponent) to canonical form.
fn reduce(order: u64, mut poly: Vec<Rational>) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(order);
    let deg = phi.len() - 1;
    // fold exponents modulo the order first: ω^order = 1
    if poly.len() > order as usize {
        let mut folded = vec![Rational::zero(); order as usize];
        for (k, c) in poly.into_iter().enumerate() {
            if !c.is_zero() {
                folded[k % order as usize] += c;
            }
        }
        poly = folded;
    }
    if poly.len() < deg {
        poly.resize(deg, Rational::zero());
        return poly;
    }
    for i in (deg..poly.len()).rev() {
        if poly[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut poly[i], Rational::zero());
        for (k, pk) in phi.iter().enumerate().take(deg) {
            if pk.is_zero() {
                continue;
            }
            let idx = i - deg + k;
            if pk.is_one() {
                poly[idx] -= &c;
            } else if (-pk).is_one() {
                poly[idx] += &c;
            } else {
                poly[idx] -= &c * Rational::from_integer(pk.clone());
            }
        }
    }
    poly.truncate(deg);
    poly
}

/// An element of the cyclotomic field `Q(ω_order)`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    /// Builds an element from power-basis coordinates, reducing if needed.
    pub fn new(order: u64, coeffs: Vec<Rational>) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        Self { order, coeffs: reduce(order, coeffs) }
    }

    /// `Σ_k coeffs[k] ω^k` for arbitrary exponents `k`.
    pub fn from_exponents(order: u64, terms: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut dense = vec![Rational::zero(); order as usize];
        for (k, c) in terms {
            dense[(k % order) as usize] += c;
        }
        Self::new(order, dense)
    }

    pub fn rational(q: Rational) -> Self {
        Self { order: 1, coeffs: vec![q] }
    }

    /// `ω_order^k`.
    pub fn root_of_unity(order: u64, k: u64) -> Self {
        Self::from_exponents(order, [(k, Rational::one())])
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Re-expresses the element in `Q(ω_target)`; `order` must divide `target`.
    pub fn lift(&self, target: u64) -> Self {
        assert!(target.is_multiple_of(self.order), "cannot lift order {} to {}", self.order, target);
        if target == self.order {
            return self.clone();
        }
        let step = target / self.order;
        Self::from_exponents(
            target,
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as u64 * step, c.clone())),
        )
    }

    fn aligned(&self, other: &Self) -> (std::borrow::Cow<'_, Self>, Self, u64) {
        if self.order == other.order {
            (std::borrow::Cow::Borrowed(self), other.clone(), self.order)
        } else {
            let m = lcm(self.order, other.order);
            (std::borrow::Cow::Owned(self.lift(m)), other.lift(m), m)
        }
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        if self.order == other.order {
            let coeffs = self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect();
            return Self { order: self.order, coeffs };
        }
        let (a, b, _) = self.aligned(other);
        a.add_impl(&b, negate)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.order != other.order {
            if other.order == 1 {
                return self.scale(&other.coeffs[0]);
            }
            if self.order == 1 {
                return other.scale(&self.coeffs[0]);
            }
            let (a, b, _) = self.aligned(other);
            return a.mul_impl(&b);
        }
        if self.coeffs.len() == 1 {
            return Self { order: self.order, coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] };
        }
        let n = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self { order: self.order, coeffs: reduce(self.order, prod) }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Exact inverse by the extended Euclidean algorithm against `Φ_order`.
    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.len() == 1 {
            return Ok(Self { order: self.order, coeffs: vec![self.coeffs[0].recip()] });
        }
        let modulus: Vec<Rational> =
            cyclotomic_polynomial(self.order).iter().map(|c| Rational::from_integer(c.clone())).collect();
        let s = poly::inverse_mod(&self.coeffs, &modulus);
        Ok(Self::new(self.order, s))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_impl(&other.try_inv()?))
    }

    /// Field automorphism `ω_M ↦ ω_M^j`.
    pub fn galois_apply(&self, j: u64) -> Result<Self> {
        let m = self.order;
        if gcd(j % m.max(1), m) != 1 && m > 1 {
            return Err(Error::NotAUnit { j, modulus: m });
        }
        Ok(self.galois_unchecked(j))
    }

    fn galois_unchecked(&self, j: u64) -> Self {
        let m = self.order;
        if m <= 2 {
            return self.clone();
        }
        Self::from_exponents(
            m,
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| ((k as u64 * j) % m, c.clone())),
        )
    }

    /// Complex conjugation `ω_M ↦ ω_M^(M−1)`.
    pub fn conjugate(&self) -> Self {
        self.galois_unchecked(self.order.saturating_sub(1).max(1))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.order <= 2 || self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn to_complex_generic<R: Real>(&self) -> Complex<R> {
        let z: Complex<R> = root_of_unity(self.order);
        let mut acc = Complex::new(R::zero(), R::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex::new(R::from_rational(c), R::zero());
        }
        acc
    }

    /// Floating embedding under `ω_M ↦ exp(2πi/M)` accurate to `precision`
    /// decimal digits, for `precision` up to 15. Higher precision goes
    /// through [`Cyclotomic::to_complex_generic`] with a wider [`Real`].
    pub fn embed_complex(&self, precision: u32) -> Result<Complex<f64>> {
        match precision {
            1..=15 => {
                let z = self.to_complex_generic::<crate::scalar::DoubleDouble>();
                Ok(Complex::new(z.re.to_f64(), z.im.to_f64()))
            }
            p => Err(Error::InvalidPrecision(p)),
        }
    }
}

pub(crate) mod poly {
    use num_traits::{One, Zero};

    use crate::scalar::Rational;

    fn trim(p: &mut Vec<Rational>) {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    fn degree(p: &[Rational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect()
    }

    pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let db = degree(b).expect("division by zero polynomial");
        let lead = b[db].clone();
        let mut rem = a.to_vec();
        let Some(da) = degree(&rem) else {
            return (vec![Rational::zero()], vec![Rational::zero()]);
        };
        if da < db {
            trim(&mut rem);
            return (vec![Rational::zero()], rem);
        }
        let mut quot = vec![Rational::zero(); da - db + 1];
        for i in (0..=da - db).rev() {
            let c = &rem[i + db] / &lead;
            if c.is_zero() {
                continue;
            }
            for k in 0..=db {
                rem[i + k] -= &c * &b[k];
            }
            quot[i] = c;
        }
        rem.truncate(db.max(1));
        trim(&mut rem);
        (quot, rem)
    }

    /// `s` with `s·a ≡ 1 (mod m)`, assuming `gcd(a, m) = 1`.
    pub fn inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
        while degree(&r1).is_some_and(|d| d > 0) {
            let (q, r) = divrem(&r0, &r1);
            let s2 = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let c = r1[0].clone();
        assert!(!c.is_zero(), "polynomial not invertible modulo the cyclotomic polynomial");
        s1.iter().map(|x| x / &c).collect()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let m = lcm(self.order, other.order);
        self.lift(m).coeffs == other.lift(m).coeffs
    }
}

impl Eq for Cyclotomic {}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::rational(Rational::one())
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        -(self.clone())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                let f: fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic = $body;
                f(self, rhs)
            }
        }
        impl $trait<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                (&self).$method(rhs)
            }
        }
        impl $trait<Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.checked_div(b).expect("cyclotomic division by zero"));

impl Field for Cyclotomic {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }

    fn from_rational(q: Rational) -> Self {
        Self::rational(q)
    }

    fn to_rational(&self) -> Option<Rational> {
        self.as_rational()
    }
}

impl StarField for Cyclotomic {
    fn conj(&self) -> Self {
        self.conjugate()
    }

    fn to_complex<R: Real>(&self) -> Complex<R> {
        self.to_complex_generic()
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Self::rational(q)
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "w{}^{k}", self.order)?,
                _ => write!(f, "{mag}*w{}^{k}", self.order)?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Binary field operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic; with `lift` disabled, operands must share an order.
pub fn arith(a: &Cyclotomic, b: &Cyclotomic, op: ArithOp, lift: bool) -> Result<Cyclotomic> {
    if !lift && a.order != b.order {
        return Err(Error::IncompatibleOrders(a.order, b.order));
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

#[derive(Serialize, Deserialize)]
struct CyclotomicWire {
    order: u64,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicWire { order: self.order, coeffs: self.coeffs.iter().map(rational_to_string).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Full(CyclotomicWire),
            Rational(String),
            Int(i64),
        }
        use serde::de::Error as _;
        match Either::deserialize(d)? {
            Either::Full(w) => {
                if w.order == 0 {
                    return Err(D::Error::custom("cyclotomic order must be positive"));
                }
                let coeffs = w
                    .coeffs
                    .iter()
                    .map(|c| parse_rational(c))
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                if coeffs.len() as u64 > w.order {
                    return Err(D::Error::custom("too many coefficients for the order"));
                }
                Ok(Cyclotomic::new(w.order, coeffs))
            }
            Either::Rational(s) => parse_rational(&s).map(Cyclotomic::rational).map_err(D::Error::custom),
            Either::Int(n) => Ok(Cyclotomic::from(n)),
        }
    }
}

/// Coefficient field `K = Q(ω_m)` inside the ambient `L = Q(ω_M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub base_order: u64,
    pub ambient_order: u64,
}

impl FieldSpec {
    pub fn new(base_order: u64, ambient_order: u64) -> Result<Self> {
        if base_order == 0 || ambient_order == 0 {
            return Err(Error::InvalidInput("field orders must be positive".into()));
        }
        if !ambient_order.is_multiple_of(base_order) {
            return Err(Error::InvalidInput(format!(
                "base order {base_order} does not divide ambient order {ambient_order}"
            )));
        }
        Ok(Self { base_order, ambient_order })
    }

    /// `K = Q(ω_m)` with the ambient order raised to cover the given exponents.
    pub fn covering(base_order: u64, exponents: impl IntoIterator<Item = u64>) -> Self {
        let ambient = exponents.into_iter().fold(base_order, lcm);
        Self { base_order, ambient_order: ambient }
    }

    /// `Gal(L/K)` as the units `j mod M` with `ω_m^j = ω_m`.
    pub fn galois_group(&self) -> Vec<u64> {
        let m = self.ambient_order;
        (1..=m.max(1))
            .map(|j| j % m.max(1))
            .filter(|&j| gcd(j, m) == 1 || m == 1)
            .filter(|&j| (j as i64 - 1).rem_euclid(self.base_order as i64) == 0)
            .map(|j| if m == 1 { 1 } else { j })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// True when `x` is fixed by every element of `Gal(L/K)`.
    pub fn contains(&self, x: &Cyclotomic) -> bool {
        self.galois_group().into_iter().all(|j| {
            let order = lcm(x.order(), self.ambient_order);
            x.lift(order).galois_unchecked(j) == *x
        })
    }

    pub fn is_rational_base(&self) -> bool {
        self.base_order <= 2
    }
}
