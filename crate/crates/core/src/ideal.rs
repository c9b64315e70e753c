//! Orders of conductor `f`, their proper invertible ideals in standard
//! basis, the ideal/form dictionary, and composition through the explicit
//! shear matrices `h_alpha` and `tau_1`, `tau_2`.
//!
//! An ideal is written `[a, (-b + sqrt(d))/2]`. Its generator tuple stores
//! the second generator with the opposite sign, `(a, (b - sqrt(d))/2)`;
//! both span the same lattice. The conversion happens only in
//! [`OrderIdeal::tuple`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{parse_int, Discriminant, QuadInt};
use crate::error::{check_same_d, Error, Result};
use crate::forms::{concordance_gcd, concordant_partner, BinaryForm};
use crate::lattice::{hnf_basis, module_mul, GenTuple, IntMatrix};
use crate::norm_form::{form_action, norm_form, principal_norm_form};

/// The order `O_f = Z + f O_K`, with Z-basis `[1, (d - sqrt(d))/2]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Order {
    d: Discriminant,
}

impl Order {
    pub fn new(d: &Discriminant) -> Self {
        Order { d: d.clone() }
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn tuple(&self) -> GenTuple {
        GenTuple::integral_basis(&self.d)
    }

    pub fn conductor(&self) -> &BigInt {
        self.d.conductor()
    }

    /// Index of this order's lattice inside the maximal order, computed from
    /// the embedded basis rather than from the factorisation of `d`.
    pub fn index_in_maximal(&self) -> BigInt {
        let embedded: Vec<QuadInt> = self
            .tuple()
            .coeffs()
            .iter()
            .map(QuadInt::to_maximal)
            .collect();
        let basis = hnf_basis(&GenTuple::new(embedded).expect("non-empty"));
        basis.index().expect("orders have rank 2")
    }

    /// The order itself as the ideal `[1, (-b0 + sqrt(d))/2]`.
    pub fn unit_ideal(&self) -> OrderIdeal {
        OrderIdeal {
            a: BigInt::one(),
            b: self.d.parity(),
            d: self.d.clone(),
        }
    }
}

/// Proper invertible ideal `[a, (-b + sqrt(d))/2]` of the order of
/// discriminant `d`: `a > 0`, `b^2 ≡ d (mod 4a)`, `gcd(a, b, c) = 1` for
/// `c = (b^2 - d)/(4a)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OrderIdeal {
    a: BigInt,
    b: BigInt,
    d: Discriminant,
}

impl OrderIdeal {
    pub fn new(a: BigInt, b: BigInt, d: &Discriminant) -> Result<Self> {
        let invalid = |a: BigInt, b: BigInt, reason| Error::InvalidIdeal {
            a,
            b,
            d: d.value().clone(),
            reason,
        };
        if !a.is_positive() {
            return Err(invalid(a, b, "a must be positive"));
        }
        let four_a = BigInt::from(4) * &a;
        let (c, r) = (&b * &b - d.value()).div_rem(&four_a);
        if !r.is_zero() {
            return Err(invalid(a, b, "b^2 is not congruent to d mod 4a"));
        }
        if !a.gcd(&b).gcd(&c).is_one() {
            return Err(invalid(a, b, "gcd(a, b, c) is not 1"));
        }
        Ok(OrderIdeal { a, b, d: d.clone() })
    }

    pub fn from_i64(a: i64, b: i64, d: &Discriminant) -> Result<Self> {
        Self::new(a.into(), b.into(), d)
    }

    /// Accepts `[a, (-b+sqrt(d))/2]`, `[a, b]` or `a,b`.
    pub fn parse(s: &str, d: &Discriminant) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('[').unwrap_or(t);
        let t = t.strip_suffix(']').unwrap_or(t);
        let (a_str, rest) = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected [a, b], got {s:?}")))?;
        let a = parse_int(a_str)?;
        let rest: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
        let b = if let Some(inner) = rest.strip_prefix('(') {
            // (-b+sqrt(d))/2
            let (neg_b, tail) = inner
                .split_once("+sqrt(")
                .ok_or_else(|| Error::Parse(format!("expected (-b+sqrt(d))/2, got {rest:?}")))?;
            let (d_str, tail) = tail
                .split_once(')')
                .ok_or_else(|| Error::Parse(format!("unterminated sqrt in {rest:?}")))?;
            if tail != ")/2" {
                return Err(Error::Parse(format!(
                    "expected (-b+sqrt(d))/2, got {rest:?}"
                )));
            }
            check_same_d(&parse_int(d_str)?, d.value())?;
            -parse_int(neg_b)?
        } else {
            parse_int(&rest)?
        };
        Self::new(a, b, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> BigInt {
        (&self.b * &self.b - self.d.value()) / (BigInt::from(4) * &self.a)
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    /// Generator tuple `(a, (b - sqrt(d))/2)`.
    pub fn tuple(&self) -> GenTuple {
        GenTuple::new(vec![
            QuadInt::from_int(self.a.clone(), &self.d),
            QuadInt::new(self.b.clone(), -BigInt::one(), &self.d).expect("b ≡ d (mod 2)"),
        ])
        .expect("non-empty")
    }

    /// The Galois conjugate `[a, (b + sqrt(d))/2]`.
    pub fn conjugate(&self) -> OrderIdeal {
        OrderIdeal {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    /// Same ideal with `b` reduced into `[0, 2a)`.
    pub fn normalized(&self) -> OrderIdeal {
        OrderIdeal {
            a: self.a.clone(),
            b: self.b.mod_floor(&(BigInt::from(2) * &self.a)),
            d: self.d.clone(),
        }
    }

    /// Equality as lattices (`b` only matters mod `2a`).
    pub fn same_ideal(&self, other: &OrderIdeal) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, ({}+sqrt({}))/2]", self.a, -&self.b, self.d)
    }
}

impl Serialize for OrderIdeal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OrderIdeal", 3)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

/// Product of two ideals, `content * ideal` with `ideal` primitive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdealProduct {
    pub content: BigInt,
    pub ideal: OrderIdeal,
}

impl Serialize for IdealProduct {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IdealProduct", 2)?;
        st.serialize_field("content", &self.content.to_string())?;
        st.serialize_field("ideal", &self.ideal)?;
        st.end()
    }
}

/// `[a, (-b + sqrt(d))/2]` for the form `(a, b, c)`.
pub fn form_to_ideal(f: &BinaryForm) -> OrderIdeal {
    OrderIdeal {
        a: f.a().clone(),
        b: f.b().clone(),
        d: f.discriminant().clone(),
    }
}

/// `N(a x + (b - sqrt(d))/2 y) / a`, which is `(a, b, c)`.
pub fn ideal_to_form(alpha: &OrderIdeal) -> BinaryForm {
    let nf = norm_form(&alpha.tuple());
    let scaled = nf
        .div_exact(&alpha.a)
        .expect("norm form of a standard ideal is divisible by a");
    let (a, b, c) = scaled.as_binary().expect("two variables");
    BinaryForm::new(a, b, c, &alpha.d).expect("valid ideal gives a primitive form")
}

/// Product of the generated lattices, brought back to standard shape.
pub fn ideal_mul(alpha: &OrderIdeal, beta: &OrderIdeal) -> Result<IdealProduct> {
    check_same_d(alpha.d.value(), beta.d.value())?;
    let product = module_mul(&alpha.tuple(), &beta.tuple())?;
    let basis = hnf_basis(&product);
    let (a, k, n) = basis.entries();
    assert_eq!(basis.rank(), 2, "product of ideals has rank 2");
    // content * [a', k' + omega]
    let content = n.clone();
    let (a1, ra) = a.div_rem(&content);
    let (k1, rk) = k.div_rem(&content);
    assert!(
        ra.is_zero() && rk.is_zero(),
        "ideal lattice is not a multiple of its content"
    );
    let b = (BigInt::from(2) * k1 + alpha.d.value()).mod_floor(&(BigInt::from(2) * &a1));
    let ideal = OrderIdeal::new(a1, b, &alpha.d).expect("primitive part of an invertible ideal");
    Ok(IdealProduct { content, ideal })
}

/// `[[a, (b - d)/2], [0, 1]]`, carrying the order's tuple onto the ideal's.
pub fn h_alpha(alpha: &OrderIdeal) -> IntMatrix {
    let off = (&alpha.b - alpha.d.value()) / 2;
    IntMatrix::shear(alpha.a.clone(), off)
}

/// Shear matrices carrying each factor's tuple onto the product's tuple
/// `(aa', (B - sqrt(d))/2)`, where `B = b + 2 k1 a = b' + 2 k2 a'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TauPair {
    pub tau1: IntMatrix,
    pub tau2: IntMatrix,
    pub big_b: BigInt,
    pub k1: BigInt,
    pub k2: BigInt,
}

impl Serialize for TauPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TauPair", 5)?;
        st.serialize_field("tau1", &self.tau1)?;
        st.serialize_field("tau2", &self.tau2)?;
        st.serialize_field("B", &self.big_b.to_string())?;
        st.serialize_field("k1", &self.k1.to_string())?;
        st.serialize_field("k2", &self.k2.to_string())?;
        st.end()
    }
}

/// Shear pair for a concordant pair of ideals. `B` is read off the lattice
/// product, and `k1` is the least non-negative solution.
pub fn tau_pair(alpha: &OrderIdeal, beta: &OrderIdeal) -> Result<TauPair> {
    check_same_d(alpha.d.value(), beta.d.value())?;
    let e = concordance_gcd(&ideal_to_form(alpha), &ideal_to_form(beta));
    if !e.is_one() {
        return Err(Error::NonConcordant(e));
    }
    let product = ideal_mul(alpha, beta)?;
    let (a, a2) = (&alpha.a, &beta.a);
    assert!(product.content.is_one(), "concordant product is primitive");
    assert_eq!(
        &product.ideal.a,
        &(a * a2),
        "concordant product has norm aa'"
    );

    let two_a = BigInt::from(2) * a;
    let (q, r) = (&product.ideal.b - &alpha.b).div_rem(&two_a);
    assert!(r.is_zero(), "B ≡ b (mod 2a)");
    let k1 = q.mod_floor(a2);
    let big_b = &alpha.b + &two_a * &k1;
    let (k2, r2) = (&big_b - &beta.b).div_rem(&(BigInt::from(2) * a2));
    assert!(r2.is_zero(), "B ≡ b' (mod 2a')");

    Ok(TauPair {
        tau1: IntMatrix::shear(a2.clone(), k1.clone()),
        tau2: IntMatrix::shear(a.clone(), k2.clone()),
        big_b,
        k1,
        k2,
    })
}

/// Intermediate values of the matrix composition route.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixComposition {
    /// Second factor after the concordance repair.
    pub partner: BinaryForm,
    pub tau: TauPair,
    /// `tau_1 ∘ h_alpha`, i.e. `h_alpha * tau_1`.
    pub composite: IntMatrix,
    /// Substituted principal norm form divided by `aa'`.
    pub raw: BinaryForm,
    pub reduced: BinaryForm,
}

/// Composition as `(1/aa') (tau_1 ∘ h_alpha)[x^2 + d xy + (d^2 - d)/4 y^2]`.
pub fn compose_via_matrices_traced(f: &BinaryForm, g: &BinaryForm) -> Result<MatrixComposition> {
    check_same_d(f.discriminant().value(), g.discriminant().value())?;
    let d = f.discriminant();
    let (partner, _) = concordant_partner(f, g);
    let alpha = form_to_ideal(f);
    let beta = form_to_ideal(&partner);
    let tau = tau_pair(&alpha, &beta)?;
    let composite = h_alpha(&alpha).mul(&tau.tau1)?;
    let substituted = form_action(&composite, &principal_norm_form(d))?;
    let aa = f.a() * partner.a();
    let scaled = substituted
        .div_exact(&aa)
        .expect("substituted principal form is divisible by aa'");
    let (a, b, c) = scaled.as_binary().expect("two variables");
    let raw = BinaryForm::new(a, b, c, d).expect("product form is primitive");
    let reduced = raw.reduced();
    Ok(MatrixComposition {
        partner,
        tau,
        composite,
        raw,
        reduced,
    })
}

pub fn compose_via_matrices(f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    Ok(compose_via_matrices_traced(f, g)?.reduced)
}

/// Composition through the lattice product of the corresponding ideals.
pub fn compose_via_ideals(f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    let product = ideal_mul(&form_to_ideal(f), &form_to_ideal(g))?;
    Ok(ideal_to_form(&product.ideal).reduced())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{compose_crt, principal_form};
    use crate::lattice::{apply_transform, modules_equal};

    fn disc(d: i64) -> Discriminant {
        Discriminant::from_i64(d).unwrap()
    }

    fn ideal(a: i64, b: i64, d: &Discriminant) -> OrderIdeal {
        OrderIdeal::from_i64(a, b, d).unwrap()
    }

    fn form(a: i64, b: i64, c: i64) -> BinaryForm {
        BinaryForm::from_i64(a, b, c).unwrap()
    }

    #[test]
    fn order_basics() {
        let d = disc(-92);
        let o = Order::new(&d);
        assert_eq!(o.conductor(), &BigInt::from(2));
        assert_eq!(o.index_in_maximal(), BigInt::from(2));
        assert_eq!(hnf_basis(&o.tuple()).rank(), 2);
        let d = disc(-300);
        assert_eq!(Order::new(&d).index_in_maximal(), BigInt::from(10));
        assert_eq!(Order::new(&disc(-23)).index_in_maximal(), BigInt::one());
    }

    #[test]
    fn validation() {
        let d = disc(-23);
        assert!(OrderIdeal::from_i64(0, 1, &d).is_err());
        assert!(OrderIdeal::from_i64(2, 0, &d).is_err());
        assert!(OrderIdeal::from_i64(3, 1, &d).is_ok());
        // (2, 2, 2) has discriminant -12 but is imprimitive
        assert!(OrderIdeal::from_i64(2, 2, &disc(-12)).is_err());
    }

    #[test]
    fn parse_and_display() {
        let d = disc(-23);
        let i = ideal(2, 1, &d);
        assert_eq!(i.to_string(), "[2, (-1+sqrt(-23))/2]");
        assert_eq!(OrderIdeal::parse(&i.to_string(), &d).unwrap(), i);
        assert_eq!(OrderIdeal::parse("[4, 5]", &d).unwrap(), ideal(4, 5, &d));
        assert_eq!(OrderIdeal::parse("2,-1", &d).unwrap(), ideal(2, -1, &d));
        assert!(OrderIdeal::parse("[2, (-1+sqrt(-4))/2]", &d).is_err());
    }

    #[test]
    fn dictionary_examples() {
        let d = disc(-23);
        assert_eq!(form_to_ideal(&form(2, 1, 3)), ideal(2, 1, &d));
        assert_eq!(form_to_ideal(&form(4, 5, 3)), ideal(4, 5, &d));
        assert_eq!(form_to_ideal(&form(1, 1, 6)), Order::new(&d).unit_ideal());
        assert_eq!(ideal_to_form(&ideal(2, 1, &d)), form(2, 1, 3));
        assert_eq!(ideal_to_form(&ideal(4, 5, &d)), form(4, 5, 3));
        assert_eq!(
            ideal_to_form(&Order::new(&d).unit_ideal()),
            principal_form(&d)
        );
        // the displayed generator spans the same lattice as the stored one
        let i = ideal(2, 1, &d);
        let shown = GenTuple::new(vec![
            QuadInt::from_int(BigInt::from(2), &d),
            QuadInt::from_i64(-1, 1, &d).unwrap(),
        ])
        .unwrap();
        assert!(modules_equal(&i.tuple(), &shown).unwrap());
    }

    #[test]
    fn multiplication_examples() {
        let d = disc(-23);
        let alpha = ideal(2, 1, &d);
        let unit = Order::new(&d).unit_ideal();
        let p = ideal_mul(&alpha, &unit).unwrap();
        assert!(p.content.is_one());
        assert!(p.ideal.same_ideal(&alpha));

        let sq = ideal_mul(&alpha, &alpha).unwrap();
        assert_eq!(sq.content, BigInt::one());
        assert_eq!(sq.ideal, ideal(4, 5, &d));

        let norm = ideal_mul(&alpha, &alpha.conjugate()).unwrap();
        assert_eq!(norm.content, BigInt::from(2));
        assert!(norm.ideal.same_ideal(&unit));

        assert!(ideal_mul(&alpha, &ideal(1, 0, &disc(-4))).is_err());
    }

    #[test]
    fn h_alpha_examples() {
        let d = disc(-23);
        assert_eq!(
            h_alpha(&ideal(2, 1, &d)),
            IntMatrix::from_i64([[2, 12], [0, 1]])
        );
        assert_eq!(
            h_alpha(&ideal(4, 5, &d)),
            IntMatrix::from_i64([[4, 14], [0, 1]])
        );
        let unit = Order::new(&d).unit_ideal();
        assert_eq!(h_alpha(&unit), IntMatrix::from_i64([[1, 12], [0, 1]]));
        for i in [ideal(2, 1, &d), ideal(4, 5, &d), ideal(3, -1, &d), unit] {
            let image = apply_transform(&h_alpha(&i), &Order::new(&d).tuple()).unwrap();
            assert_eq!(image, i.tuple());
        }
    }

    #[test]
    fn tau_pair_examples() {
        let d = disc(-23);
        let alpha = ideal(2, 1, &d);
        let t = tau_pair(&alpha, &alpha).unwrap();
        assert_eq!(t.big_b, BigInt::from(5));
        assert_eq!(t.k1, BigInt::one());
        assert_eq!(t.tau1, IntMatrix::from_i64([[2, 1], [0, 1]]));
        assert_eq!(t.tau2, IntMatrix::from_i64([[2, 1], [0, 1]]));
        let composite = h_alpha(&alpha).mul(&t.tau1).unwrap();
        assert_eq!(composite, IntMatrix::from_i64([[4, 14], [0, 1]]));

        let target = ideal(4, 5, &d).tuple();
        assert_eq!(apply_transform(&t.tau1, &alpha.tuple()).unwrap(), target);
        assert_eq!(apply_transform(&t.tau2, &alpha.tuple()).unwrap(), target);

        // principal times anything
        let unit = Order::new(&d).unit_ideal();
        let beta = ideal(3, -1, &d);
        let t = tau_pair(&unit, &beta).unwrap();
        assert_eq!(t.tau1, IntMatrix::shear(BigInt::from(3), t.k1.clone()));
        assert!(t.k1 >= BigInt::zero() && t.k1 < BigInt::from(3));
        assert_eq!(
            (&t.big_b - beta.b()).mod_floor(&BigInt::from(6)),
            BigInt::zero()
        );

        assert!(matches!(
            tau_pair(&alpha, &alpha.conjugate()),
            Err(Error::NonConcordant(_))
        ));
    }

    #[test]
    fn matrix_composition_examples() {
        let d = disc(-23);
        let f = form(2, 1, 3);
        let trace = compose_via_matrices_traced(&f, &f).unwrap();
        assert_eq!(trace.raw, form(4, 5, 3));
        assert_eq!(trace.reduced, form(2, -1, 3));
        assert_eq!(compose_via_matrices(&f, &principal_form(&d)).unwrap(), f);
        assert_eq!(
            compose_via_matrices(&f, &f.inverse()).unwrap(),
            principal_form(&d)
        );

        for (x, y) in [
            ((2, 1, 6), (3, -1, 4)),
            ((3, 1, 4), (3, 1, 4)),
            ((2, -1, 6), (6, 5, 3)),
        ] {
            let f = form(x.0, x.1, x.2);
            let g = form(y.0, y.1, y.2);
            let crt = compose_crt(&f, &g).unwrap();
            assert_eq!(compose_via_matrices(&f, &g).unwrap(), crt);
            assert_eq!(compose_via_ideals(&f, &g).unwrap(), crt);
        }
    }
}
