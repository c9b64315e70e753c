//! Exact arithmetic in imaginary quadratic orders.
//!
//! Elements are stored in half-coordinates `(p + q*sqrt(d))/2` with
//! `p ≡ q*d (mod 2)`, so the order generator `(d - sqrt(d))/2` and the ideal
//! generators `(b ± sqrt(d))/2` are ordinary values without rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{check_same_d, Error, Result};

/// A negative discriminant `d = f^2 * D_K`.
///
/// Cloning is cheap; the conductor and fundamental part are computed on first
/// use, since they require factoring `d`.
#[derive(Clone)]
pub struct Discriminant(Arc<DiscInner>);

struct DiscInner {
    d: BigInt,
    parts: OnceLock<(BigInt, BigInt)>,
}

impl Discriminant {
    pub fn new(d: BigInt) -> Result<Self> {
        let r = d.mod_floor(&BigInt::from(4));
        if !d.is_negative() || !(r.is_zero() || r.is_one()) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(Discriminant(Arc::new(DiscInner {
            d,
            parts: OnceLock::new(),
        })))
    }

    pub fn from_i64(d: i64) -> Result<Self> {
        Self::new(BigInt::from(d))
    }

    pub fn value(&self) -> &BigInt {
        &self.0.d
    }

    /// Index `f` of the order of discriminant `d` in the maximal order.
    pub fn conductor(&self) -> &BigInt {
        &self.parts().0
    }

    /// The field discriminant `D_K = d / f^2`.
    pub fn fundamental(&self) -> &BigInt {
        &self.parts().1
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor().is_one()
    }

    /// Discriminant of the maximal order containing this one.
    pub fn maximal(&self) -> Discriminant {
        Discriminant::new(self.fundamental().clone()).expect("fundamental discriminants are valid")
    }

    /// `d mod 2`, i.e. the parity every `b` coefficient must share with `d`.
    pub fn parity(&self) -> BigInt {
        self.0.d.mod_floor(&BigInt::from(2))
    }

    fn parts(&self) -> &(BigInt, BigInt) {
        self.0.parts.get_or_init(|| split_conductor(&self.0.d))
    }
}

fn split_conductor(d: &BigInt) -> (BigInt, BigInt) {
    // Squarefree kernel with sign, then adjust by 4 when it is 2 or 3 mod 4.
    let mut kernel = -BigInt::one();
    for (p, e) in prime_factors(&d.abs()) {
        if e % 2 == 1 {
            kernel *= p;
        }
    }
    let fundamental = if kernel.mod_floor(&BigInt::from(4)).is_one() {
        kernel
    } else {
        kernel * 4
    };
    let f_squared = d / &fundamental;
    let f = f_squared.sqrt();
    debug_assert_eq!(&f * &f, f_squared);
    (f, fundamental)
}

impl PartialEq for Discriminant {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.d == other.0.d
    }
}

impl Eq for Discriminant {}

impl std::hash::Hash for Discriminant {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.d.hash(state)
    }
}

impl fmt::Debug for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Discriminant({})", self.0.d)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.d)
    }
}

impl FromStr for Discriminant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = parse_int(s)?;
        Discriminant::new(d)
    }
}

impl Serialize for Discriminant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.d.to_string())
    }
}

/// The element `(p + q*sqrt(d))/2` of the order of discriminant `d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    p: BigInt,
    q: BigInt,
    d: Discriminant,
}

impl QuadInt {
    pub fn new(p: BigInt, q: BigInt, d: &Discriminant) -> Result<Self> {
        if (&p - &q * d.value()).is_odd() {
            return Err(Error::Parity {
                p,
                q,
                d: d.value().clone(),
            });
        }
        Ok(QuadInt { p, q, d: d.clone() })
    }

    pub fn from_i64(p: i64, q: i64, d: &Discriminant) -> Result<Self> {
        Self::new(BigInt::from(p), BigInt::from(q), d)
    }

    pub fn from_int(n: BigInt, d: &Discriminant) -> Self {
        QuadInt {
            p: n * 2,
            q: BigInt::zero(),
            d: d.clone(),
        }
    }

    pub fn zero(d: &Discriminant) -> Self {
        Self::from_int(BigInt::zero(), d)
    }

    pub fn one(d: &Discriminant) -> Self {
        Self::from_int(BigInt::one(), d)
    }

    /// The order generator `omega = (d - sqrt(d))/2`.
    pub fn omega(d: &Discriminant) -> Self {
        QuadInt {
            p: d.value().clone(),
            q: -BigInt::one(),
            d: d.clone(),
        }
    }

    /// Builds `x + y*omega` from coordinates over the integral basis `(1, omega)`.
    pub fn from_coords(x: BigInt, y: BigInt, d: &Discriminant) -> Self {
        QuadInt {
            p: x * 2 + &y * d.value(),
            q: -y,
            d: d.clone(),
        }
    }

    /// Coordinates `(x, y)` with `self = x + y*omega`.
    pub fn coords(&self) -> (BigInt, BigInt) {
        let x = (&self.p + &self.q * self.d.value()) / 2;
        (x, -self.q.clone())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        (&self.p * &self.p - &self.q * &self.q * self.d.value()) / 4
    }

    pub fn trace(&self) -> BigInt {
        self.p.clone()
    }

    pub fn conj(&self) -> Self {
        QuadInt {
            p: self.p.clone(),
            q: -&self.q,
            d: self.d.clone(),
        }
    }

    /// `(norm, trace, conjugate)` in one call.
    pub fn norm_trace_conj(&self) -> (BigInt, BigInt, QuadInt) {
        (self.norm(), self.trace(), self.conj())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d.value(), other.d.value())?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d.value(), other.d.value())?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d.value(), other.d.value())?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        QuadInt {
            p: &self.p * k,
            q: &self.q * k,
            d: self.d.clone(),
        }
    }

    /// Image in the maximal order, where `sqrt(d) = f*sqrt(D_K)`.
    pub fn to_maximal(&self) -> QuadInt {
        QuadInt {
            p: self.p.clone(),
            q: &self.q * self.d.conductor(),
            d: self.d.maximal(),
        }
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        QuadInt {
            p: &self.p + &other.p,
            q: &self.q + &other.q,
            d: self.d.clone(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.d.value();
        // (p1 + q1 s)(p2 + q2 s)/4 with s^2 = d; both halves are even by parity.
        let p = (&self.p * &other.p + &self.q * &other.q * d) / 2;
        let q = (&self.p * &other.q + &other.p * &self.q) / 2;
        QuadInt {
            p,
            q,
            d: self.d.clone(),
        }
    }
}

// Operator forms panic on a discriminant mismatch; use the `checked_*`
// methods at API boundaries.
impl Add for &QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        self.checked_add(rhs)
            .expect("QuadInt discriminant mismatch")
    }
}

impl Sub for &QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        self.checked_sub(rhs)
            .expect("QuadInt discriminant mismatch")
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: &QuadInt) -> QuadInt {
        self.checked_mul(rhs)
            .expect("QuadInt discriminant mismatch")
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            p: -&self.p,
            q: -&self.q,
            d: self.d.clone(),
        }
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadInt({}, {}; d={})", self.p, self.q, self.d)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", &self.p / 2);
        }
        let sign = if self.q.is_negative() { '-' } else { '+' };
        let mag = self.q.abs();
        let sqrt = format!("sqrt({})", self.d);
        let tail = if mag.is_one() {
            sqrt
        } else {
            format!("{mag}*{sqrt}")
        };
        if self.p.is_zero() {
            let lead = if self.q.is_negative() { "-" } else { "" };
            write!(f, "({lead}{tail})/2")
        } else {
            write!(f, "({}{sign}{tail})/2", self.p)
        }
    }
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadInt", 3)?;
        st.serialize_field("p", &self.p.to_string())?;
        st.serialize_field("q", &self.q.to_string())?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

pub(crate) fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    t.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("expected an integer, got {s:?}")))
}

/// Returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a*x + b*y = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Prime factorisation of `n > 0` by trial division.
pub fn prime_factors(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n.is_positive(), "prime_factors needs a positive integer");
    if let Some(small) = n.to_u64() {
        return prime_factors_u64(small)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect();
    }
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

fn prime_factors_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
