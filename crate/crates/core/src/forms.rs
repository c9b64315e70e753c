//! Primitive positive-definite binary quadratic forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{ext_gcd, parse_int, Discriminant};
use crate::error::{check_same_d, Error, Result};
use crate::lattice::IntMatrix;
use crate::par::{self, Strategy};

/// `a x^2 + b xy + c y^2` with `b^2 - 4ac = d < 0`, `a > 0`, `gcd(a, b, c) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: Discriminant,
}

impl BinaryForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: &Discriminant) -> Result<Self> {
        let actual = &b * &b - BigInt::from(4) * &a * &c;
        if &actual != d.value() {
            return Err(Error::FormDiscriminant {
                form: format!("({a},{b},{c})"),
                actual,
                expected: d.value().clone(),
            });
        }
        if !a.is_positive() {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        if !a.gcd(&b).gcd(&c).is_one() {
            return Err(Error::NotPrimitive { a, b, c });
        }
        Ok(BinaryForm {
            a,
            b,
            c,
            d: d.clone(),
        })
    }

    /// Builds the form, deriving `d = b^2 - 4ac`.
    pub fn from_abc(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let d = &b * &b - BigInt::from(4) * &a * &c;
        if !d.is_negative() {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        let d = Discriminant::new(d)?;
        Self::new(a, b, c, &d)
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::from_abc(a.into(), b.into(), c.into())
    }

    /// The form `(a, b, (b^2 - d)/(4a))`.
    pub fn from_ab(a: BigInt, b: BigInt, d: &Discriminant) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::NotPositiveDefinite {
                a,
                b,
                c: BigInt::zero(),
            });
        }
        let (c, r) = (&b * &b - d.value()).div_rem(&(BigInt::from(4) * &a));
        if !r.is_zero() {
            return Err(Error::InvalidIdeal {
                a,
                b,
                d: d.value().clone(),
                reason: "b^2 is not congruent to d mod 4a",
            });
        }
        Self::new(a, b, c, d)
    }

    /// Parses `(a,b,c)` and checks it against `d`.
    pub fn parse(s: &str, d: &Discriminant) -> Result<Self> {
        let (a, b, c) = parse_triple(s)?;
        Self::new(a, b, c, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        if abs_b > self.a || self.a > self.c {
            return false;
        }
        !((abs_b == self.a || self.a == self.c) && self.b.is_negative())
    }

    /// Reduced equivalent form and the determinant-1 matrix `m` with
    /// `reduced(z) = self(m z)`.
    pub fn reduce(&self) -> (BinaryForm, IntMatrix) {
        let mut w = Reducer::new(self, true);
        w.run();
        let m = w.matrix();
        (w.into_form(&self.d), m)
    }

    /// Reduced equivalent form, without tracking the transformation.
    pub fn reduced(&self) -> BinaryForm {
        let mut w = Reducer::new(self, false);
        w.run();
        w.into_form(&self.d)
    }

    /// Substitution by the 2x2 matrix `m`: `(x, y) -> (m00 x + m01 y, m10 x + m11 y)`.
    /// `m` must have determinant 1 for the result to stay primitive.
    pub fn transform(&self, m: &IntMatrix) -> Result<BinaryForm> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: m.dim(),
            });
        }
        let (x, u, y, v) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
        let a = self.evaluate(x, y);
        let b = BigInt::from(2) * &self.a * x * u
            + &self.b * (x * v + u * y)
            + BigInt::from(2) * &self.c * y * v;
        let c = self.evaluate(u, v);
        BinaryForm::new(a, b, c, &self.d)
    }

    /// `(a, -b, c)`, the inverse class, reduced.
    pub fn inverse(&self) -> BinaryForm {
        BinaryForm {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
        .reduced()
    }

    pub fn is_equivalent(&self, other: &BinaryForm) -> bool {
        self.d == other.d && self.reduced() == other.reduced()
    }
}

struct Reducer {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    // columns of the accumulated matrix: (m00, m10) and (m01, m11)
    m: Option<[BigInt; 4]>,
}

impl Reducer {
    fn new(f: &BinaryForm, track: bool) -> Self {
        Reducer {
            a: f.a.clone(),
            b: f.b.clone(),
            c: f.c.clone(),
            m: track.then(|| [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()]),
        }
    }

    /// Moves `b` into `(-a, a]` with `x -> x + t y`.
    fn normalize(&mut self) {
        let two_a = &self.a * 2;
        let t = (&self.a - &self.b).div_floor(&two_a);
        if t.is_zero() {
            return;
        }
        self.c += (&self.a * &t + &self.b) * &t;
        self.b += &two_a * &t;
        if let Some(m) = self.m.as_mut() {
            m[2] += &t * &m[0];
            m[3] += &t * &m[1];
        }
    }

    /// `(a, b, c) -> (c, -b, a)` with `(x, y) -> (-y, x)`.
    fn swap(&mut self) {
        std::mem::swap(&mut self.a, &mut self.c);
        self.b = -&self.b;
        if let Some(m) = self.m.as_mut() {
            let (c0, c1) = (m[0].clone(), m[1].clone());
            m[0] = m[2].clone();
            m[1] = m[3].clone();
            m[2] = -c0;
            m[3] = -c1;
        }
    }

    fn run(&mut self) {
        self.normalize();
        while self.a > self.c {
            self.swap();
            self.normalize();
        }
        if self.a == self.c && self.b.is_negative() {
            self.swap();
        }
    }

    fn matrix(&self) -> IntMatrix {
        let m = self.m.as_ref().expect("matrix was not tracked");
        IntMatrix::new(vec![
            vec![m[0].clone(), m[2].clone()],
            vec![m[1].clone(), m[3].clone()],
        ])
        .expect("2x2")
    }

    fn into_form(self, d: &Discriminant) -> BinaryForm {
        BinaryForm {
            a: self.a,
            b: self.b,
            c: self.c,
            d: d.clone(),
        }
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}; d={})", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BinaryForm", 4)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("c", &self.c.to_string())?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

/// Parses `(a,b,c)`; whitespace is ignored and the parentheses are optional.
pub fn parse_triple(s: &str) -> Result<(BigInt, BigInt, BigInt)> {
    let t = s.trim();
    let t = t.strip_prefix('(').unwrap_or(t);
    let t = t.strip_suffix(')').unwrap_or(t);
    let parts: Vec<&str> = t.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected (a,b,c), got {s:?}")));
    }
    Ok((
        parse_int(parts[0])?,
        parse_int(parts[1])?,
        parse_int(parts[2])?,
    ))
}

/// `(1, b0, (b0^2 - d)/4)` with `b0 = d mod 2`.
pub fn principal_form(d: &Discriminant) -> BinaryForm {
    let b0 = d.parity();
    let c = (&b0 * &b0 - d.value()) / 4;
    BinaryForm {
        a: BigInt::one(),
        b: b0,
        c,
        d: d.clone(),
    }
}

/// All reduced primitive forms of discriminant `d`, sorted by `(a, b)`.
pub fn enumerate_reduced(d: &Discriminant) -> Result<Vec<BinaryForm>> {
    enumerate_reduced_with(d, Strategy::default())
}

pub fn enumerate_reduced_with(d: &Discriminant, strategy: Strategy) -> Result<Vec<BinaryForm>> {
    let dv = d
        .value()
        .to_i64()
        .filter(|v| *v > i64::MIN / 4)
        .ok_or_else(|| Error::TooLarge(d.value().clone()))?;
    let dv = i128::from(dv);
    // reduced forms have a <= sqrt(|d|/3)
    let mut a_max = ((-dv / 3) as f64).sqrt() as i128 + 1;
    while 3 * a_max * a_max > -dv {
        a_max -= 1;
    }
    let leading: Vec<i128> = (1..=a_max).collect();
    let rows = par::map(strategy, &leading, |&a| forms_with_leading(a, dv, d));
    Ok(rows.into_iter().flatten().collect())
}

fn forms_with_leading(a: i128, d: i128, disc: &Discriminant) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    let start = if (-a + 1 - d).rem_euclid(2) == 0 {
        -a + 1
    } else {
        -a + 2
    };
    let mut b = start;
    while b <= a {
        let num = b * b - d;
        if num % (4 * a) == 0 {
            let c = num / (4 * a);
            let ok = c >= a && !(b < 0 && c == a) && gcd_i128(gcd_i128(a, b), c) == 1;
            if ok {
                out.push(BinaryForm {
                    a: a.into(),
                    b: b.into(),
                    c: c.into(),
                    d: disc.clone(),
                });
            }
        }
        b += 2;
    }
    out
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `gcd(a, a', (b + b')/2)`; the pair is concordant when this is 1.
pub fn concordance_gcd(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    let s: BigInt = (&f.b + &g.b) / 2;
    f.a.gcd(&g.a).gcd(&s)
}

pub fn is_concordant(f: &BinaryForm, g: &BinaryForm) -> bool {
    concordance_gcd(f, g).is_one()
}

/// An equivalent of `g` whose leading coefficient is coprime to `2 a d`,
/// where `a` is the leading coefficient of `f`, together with the
/// determinant-1 matrix producing it. Returns `g` unchanged if the pair is
/// already concordant.
pub fn concordant_partner(f: &BinaryForm, g: &BinaryForm) -> (BinaryForm, IntMatrix) {
    if is_concordant(f, g) {
        return (g.clone(), IntMatrix::identity(2));
    }
    let modulus = BigInt::from(2) * &f.a * f.d.value();
    let mut bound = 1i64;
    loop {
        if let Some((x, y)) = coprime_value(g, &modulus, bound) {
            let (one, s, t) = ext_gcd(&x, &y);
            debug_assert!(one.is_one());
            // [[x, -t], [y, s]] has determinant x s + y t = 1
            let m = IntMatrix::new(vec![vec![x, -t], vec![y, s]]).expect("2x2");
            let g2 = g
                .transform(&m)
                .expect("unimodular image of a primitive form");
            debug_assert!(is_concordant(f, &g2));
            return (g2, m);
        }
        bound = bound
            .checked_mul(2)
            .expect("primitive forms represent integers coprime to any modulus");
    }
}

/// Smallest value `g(x, y)` coprime to `modulus` over coprime `(x, y)` with
/// `|x|, |y| <= bound`, `y >= 0`; ties go to the first point scanned.
fn coprime_value(g: &BinaryForm, modulus: &BigInt, bound: i64) -> Option<(BigInt, BigInt)> {
    let mut best: Option<(BigInt, BigInt, BigInt)> = None;
    for y in 0..=bound {
        for x in -bound..=bound {
            if gcd_i128(x.into(), y.into()) != 1 {
                continue;
            }
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            let v = g.evaluate(&x, &y);
            if !v.gcd(modulus).is_one() {
                continue;
            }
            if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
                best = Some((v, x, y));
            }
        }
    }
    best.map(|(_, x, y)| (x, y))
}

/// Solves `B ≡ b (2a)`, `B ≡ b' (2a')`, `B^2 ≡ d (4aa')` for a concordant
/// pair; returns the least non-negative residue mod `2aa'`.
pub(crate) fn crt_middle(f: &BinaryForm, g: &BinaryForm) -> Result<BigInt> {
    let s: BigInt = (&f.b + &g.b) / 2;
    let (g1, x1, y1) = ext_gcd(&f.a, &g.a);
    let (e, x2, w) = ext_gcd(&g1, &s);
    if !e.is_one() {
        return Err(Error::NonConcordant(e));
    }
    let (u, v) = (x1 * &x2, y1 * &x2);
    let big_b: BigInt = u * &f.a * &g.b + v * &g.a * &f.b + w * ((&f.b * &g.b + f.d.value()) / 2);
    let modulus = BigInt::from(2) * &f.a * &g.a;
    Ok(big_b.mod_floor(&modulus))
}

/// Composition by the congruence solution for the middle coefficient.
pub fn compose_crt(f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    check_same_d(f.d.value(), g.d.value())?;
    let (g, _) = concordant_partner(f, g);
    let big_b = crt_middle(f, &g)?;
    let aa = &f.a * &g.a;
    let (c, r) = (&big_b * &big_b - f.d.value()).div_rem(&(BigInt::from(4) * &aa));
    assert!(r.is_zero(), "B^2 is not congruent to d mod 4aa'");
    let raw =
        BinaryForm::new(aa, big_b, c, &f.d).expect("composite of primitive forms is primitive");
    Ok(raw.reduced())
}
