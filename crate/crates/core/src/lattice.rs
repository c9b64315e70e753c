//! Z-modules inside a quadratic order, presented by generator tuples.
//!
//! A [`GenTuple`] `(a_1, ..., a_m)` stands for the linear polynomial
//! `a_1 z_1 + ... + a_m z_m`; its module is the Z-span of the `a_i`. An
//! [`IntMatrix`] `h` acts on the variables by `z_j -> sum_i h[j][i] z_i`, so
//! with coefficients written as a row vector the action is `a -> a * h`, and
//! applying `h` then `t` is the single matrix `h * t`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{ext_gcd, parse_int, Discriminant, QuadInt};
use crate::error::{check_same_d, Error, Result};

/// Square integer matrix acting on tuple variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: bad.len(),
            });
        }
        Ok(IntMatrix { rows })
    }

    pub fn from_i64<const M: usize>(rows: [[i64; M]; M]) -> Self {
        IntMatrix {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::scalar(m, &BigInt::one())
    }

    pub fn scalar(m: usize, k: &BigInt) -> Self {
        let mut rows = vec![vec![BigInt::zero(); m]; m];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = k.clone();
        }
        IntMatrix { rows }
    }

    /// The upper-triangular 2x2 matrix `[[a, k], [0, 1]]`.
    pub fn shear(a: BigInt, k: BigInt) -> Self {
        IntMatrix {
            rows: vec![vec![a, k], vec![BigInt::zero(), BigInt::one()]],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let m = self.dim();
        if other.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: other.dim(),
            });
        }
        let rows = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).map(|k| &self.rows[i][k] * &other.rows[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(IntMatrix { rows })
    }

    pub fn transpose(&self) -> IntMatrix {
        let m = self.dim();
        IntMatrix {
            rows: (0..m)
                .map(|i| (0..m).map(|j| self.rows[j][i].clone()).collect())
                .collect(),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let m = self.dim();
        let mut a = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..m {
            if a[k][k].is_zero() {
                match (k + 1..m).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[m - 1][m - 1]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Parses rows separated by `;` with entries separated by `,`, e.g. `2,12;0,1`.
impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(';')
            .map(|row| row.split(',').map(parse_int).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::new(rows)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Ordered coefficient tuple `(a_1, ..., a_m)` over a common discriminant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GenTuple {
    coeffs: Vec<QuadInt>,
    d: Discriminant,
}

impl GenTuple {
    pub fn new(coeffs: Vec<QuadInt>) -> Result<Self> {
        let d = coeffs
            .first()
            .ok_or(Error::EmptyTuple)?
            .discriminant()
            .clone();
        for c in &coeffs[1..] {
            check_same_d(d.value(), c.discriminant().value())?;
        }
        Ok(GenTuple { coeffs, d })
    }

    /// The integral basis tuple `(1, omega)`.
    pub fn integral_basis(d: &Discriminant) -> Self {
        GenTuple {
            coeffs: vec![QuadInt::one(d), QuadInt::omega(d)],
            d: d.clone(),
        }
    }

    pub fn coeffs(&self) -> &[QuadInt] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    /// Extends with zero coefficients up to `m` variables.
    pub fn padded(&self, m: usize) -> GenTuple {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < m {
            coeffs.push(QuadInt::zero(&self.d));
        }
        GenTuple {
            coeffs,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> GenTuple {
        GenTuple {
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
            d: self.d.clone(),
        }
    }
}

impl fmt::Display for GenTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for GenTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// Canonical basis of a module, in coordinates over `(1, omega)`.
///
/// As columns the basis is the upper-triangular matrix `[[a, k], [0, n]]`
/// with `n > 0`, `a > 0` and `0 <= k < a` when both are present. Missing
/// pivots are stored as zero; equal modules give equal values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ZModuleBasis {
    a: BigInt,
    k: BigInt,
    n: BigInt,
    d: Discriminant,
}

impl ZModuleBasis {
    pub fn rank(&self) -> usize {
        usize::from(!self.a.is_zero()) + usize::from(!self.n.is_zero())
    }

    /// Basis vectors as order elements: `a`, then `k + n*omega`.
    pub fn vectors(&self) -> Vec<QuadInt> {
        let mut out = Vec::with_capacity(2);
        if !self.a.is_zero() {
            out.push(QuadInt::from_int(self.a.clone(), &self.d));
        }
        if !self.n.is_zero() {
            out.push(QuadInt::from_coords(
                self.k.clone(),
                self.n.clone(),
                &self.d,
            ));
        }
        out
    }

    /// `(a, k, n)`; absent pivots are zero.
    pub fn entries(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.k, &self.n)
    }

    /// Index in the full order; `None` unless the rank is 2.
    pub fn index(&self) -> Option<BigInt> {
        (self.rank() == 2).then(|| &self.a * &self.n)
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn to_tuple(&self) -> Option<GenTuple> {
        let v = self.vectors();
        (!v.is_empty()).then(|| GenTuple {
            coeffs: v,
            d: self.d.clone(),
        })
    }

    /// Integer coordinates of `target` against the basis vectors, if any.
    fn express(&self, target: &QuadInt) -> Option<(BigInt, BigInt)> {
        let (x, y) = target.coords();
        let s_n = if self.n.is_zero() {
            if !y.is_zero() {
                return None;
            }
            BigInt::zero()
        } else {
            let (q, r) = y.div_rem(&self.n);
            if !r.is_zero() {
                return None;
            }
            q
        };
        let rest = x - &s_n * &self.k;
        let s_a = if self.a.is_zero() {
            if !rest.is_zero() {
                return None;
            }
            BigInt::zero()
        } else {
            let (q, r) = rest.div_rem(&self.a);
            if !r.is_zero() {
                return None;
            }
            q
        };
        Some((s_a, s_n))
    }
}

impl fmt::Display for ZModuleBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vectors().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Echelon form together with the unimodular column transform producing it.
struct Echelon {
    basis: ZModuleBasis,
    // generators * transform = [pivot columns..., zero columns...]
    transform: Vec<Vec<BigInt>>,
    col_a: Option<usize>,
    col_n: Option<usize>,
}

struct Columns {
    xs: Vec<BigInt>,
    ys: Vec<BigInt>,
    // u[r][c]: column c of the transform, row r
    u: Vec<Vec<BigInt>>,
}

impl Columns {
    fn sub_multiple(&mut self, target: usize, src: usize, q: &BigInt) {
        let dx = q * &self.xs[src];
        self.xs[target] -= dx;
        let dy = q * &self.ys[src];
        self.ys[target] -= dy;
        for row in self.u.iter_mut() {
            let v = q * &row[src];
            row[target] -= v;
        }
    }

    fn negate(&mut self, c: usize) {
        self.xs[c] = -&self.xs[c];
        self.ys[c] = -&self.ys[c];
        for row in self.u.iter_mut() {
            row[c] = -&row[c];
        }
    }

    /// Unimodular combination of columns `i`, `j` leaving `gcd` of the
    /// chosen row in column `i` and zero in column `j`.
    fn combine(&mut self, i: usize, j: usize, use_y: bool) {
        let (vi, vj) = if use_y {
            (self.ys[i].clone(), self.ys[j].clone())
        } else {
            (self.xs[i].clone(), self.xs[j].clone())
        };
        if vj.is_zero() {
            return;
        }
        let (g, s, t) = ext_gcd(&vi, &vj);
        let ci = &vi / &g;
        let cj = &vj / &g;
        // [col_i, col_j] <- [s col_i + t col_j, -cj col_i + ci col_j]; det = 1
        let mix = |a: &BigInt, b: &BigInt| (&s * a + &t * b, &ci * b - &cj * a);
        let (nx_i, nx_j) = mix(&self.xs[i], &self.xs[j]);
        self.xs[i] = nx_i;
        self.xs[j] = nx_j;
        let (ny_i, ny_j) = mix(&self.ys[i], &self.ys[j]);
        self.ys[i] = ny_i;
        self.ys[j] = ny_j;
        for row in self.u.iter_mut() {
            let (a, b) = mix(&row[i], &row[j]);
            row[i] = a;
            row[j] = b;
        }
    }
}

fn echelon(x: &GenTuple) -> Echelon {
    let m = x.len();
    let (xs, ys): (Vec<_>, Vec<_>) = x.coeffs.iter().map(QuadInt::coords).unzip();
    let mut u = vec![vec![BigInt::zero(); m]; m];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    let mut cols = Columns { xs, ys, u };

    let col_n = (0..m).find(|&c| !cols.ys[c].is_zero());
    if let Some(p) = col_n {
        for j in 0..m {
            if j != p {
                cols.combine(p, j, true);
            }
        }
        if cols.ys[p].is_negative() {
            cols.negate(p);
        }
    }
    let col_a = (0..m).find(|&c| Some(c) != col_n && !cols.xs[c].is_zero());
    if let Some(p) = col_a {
        for j in 0..m {
            if j != p && Some(j) != col_n {
                cols.combine(p, j, false);
            }
        }
        if cols.xs[p].is_negative() {
            cols.negate(p);
        }
        if let Some(pn) = col_n {
            let q = cols.xs[pn].div_floor(&cols.xs[p]);
            cols.sub_multiple(pn, p, &q);
        }
    }

    let zero = BigInt::zero();
    let basis = ZModuleBasis {
        a: col_a.map_or(zero.clone(), |c| cols.xs[c].clone()),
        k: col_n.map_or(zero.clone(), |c| cols.xs[c].clone()),
        n: col_n.map_or(zero, |c| cols.ys[c].clone()),
        d: x.d.clone(),
    };
    Echelon {
        basis,
        transform: cols.u,
        col_a,
        col_n,
    }
}

/// Canonical triangular basis of the module generated by `x`.
pub fn hnf_basis(x: &GenTuple) -> ZModuleBasis {
    echelon(x).basis
}

/// Whether every coefficient of `y` lies in the module generated by `x`.
pub fn contains(x: &GenTuple, y: &GenTuple) -> Result<bool> {
    check_same_d(x.d.value(), y.d.value())?;
    let basis = hnf_basis(x);
    Ok(y.coeffs.iter().all(|c| basis.express(c).is_some()))
}

pub fn modules_equal(x: &GenTuple, y: &GenTuple) -> Result<bool> {
    check_same_d(x.d.value(), y.d.value())?;
    Ok(hnf_basis(x) == hnf_basis(y))
}

/// Substitutes `z_j -> sum_i h[j][i] z_i` into `x`.
pub fn apply_transform(h: &IntMatrix, x: &GenTuple) -> Result<GenTuple> {
    let m = x.len();
    if h.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: h.dim(),
        });
    }
    let coeffs = (0..m)
        .map(|i| {
            x.coeffs
                .iter()
                .enumerate()
                .fold(QuadInt::zero(&x.d), |acc, (j, a)| {
                    &acc + &a.scale(&h.rows[j][i])
                })
        })
        .collect();
    Ok(GenTuple {
        coeffs,
        d: x.d.clone(),
    })
}

/// Finds `h` with `apply_transform(h, x) == y` whenever `y`'s module lies
/// in `x`'s. The shorter tuple is padded with zeros. Among the solutions the
/// one from back-substitution with free coordinates zeroed is returned.
pub fn solve_transform(x: &GenTuple, y: &GenTuple) -> Result<IntMatrix> {
    check_same_d(x.d.value(), y.d.value())?;
    let m = x.len().max(y.len());
    let x = x.padded(m);
    let y = y.padded(m);
    let ech = echelon(&x);

    let mut rows = vec![vec![BigInt::zero(); m]; m];
    for (i, target) in y.coeffs.iter().enumerate() {
        let (s_a, s_n) = ech.basis.express(target).ok_or(Error::NotSubmodule)?;
        for (j, row) in rows.iter_mut().enumerate() {
            let mut c = BigInt::zero();
            if let Some(ca) = ech.col_a {
                c += &s_a * &ech.transform[j][ca];
            }
            if let Some(cn) = ech.col_n {
                c += &s_n * &ech.transform[j][cn];
            }
            row[i] = c;
        }
    }
    Ok(IntMatrix { rows })
}

/// All pairwise products `a_i * b_j`, `i` major.
pub fn module_mul(x: &GenTuple, y: &GenTuple) -> Result<GenTuple> {
    check_same_d(x.d.value(), y.d.value())?;
    let coeffs = x
        .coeffs
        .iter()
        .flat_map(|a| y.coeffs.iter().map(move |b| a * b))
        .collect();
    Ok(GenTuple {
        coeffs,
        d: x.d.clone(),
    })
}
