//! Multi-variable norm forms `N(a_1 z_1 + ... + a_m z_m)` and the
//! substitution action of integer matrices on them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::Discriminant;
use crate::error::{Error, Result};
use crate::lattice::{apply_transform, solve_transform, GenTuple, IntMatrix};

/// Integral quadratic form `sum_i q_ii z_i^2 + sum_{i<j} q_ij z_i z_j`.
///
/// `coeffs` is symmetric: `coeffs[i][i] = q_ii` and
/// `coeffs[i][j] = coeffs[j][i] = q_ij` is the full cross coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiQuadraticForm {
    coeffs: Vec<Vec<BigInt>>,
    d: Discriminant,
}

impl MultiQuadraticForm {
    /// Builds from the symmetric coefficient array described on the type.
    pub fn from_coeffs(coeffs: Vec<Vec<BigInt>>, d: &Discriminant) -> Result<Self> {
        let m = coeffs.len();
        if m == 0 {
            return Err(Error::EmptyTuple);
        }
        for (i, row) in coeffs.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: row.len(),
                });
            }
            if (0..i).any(|j| coeffs[i][j] != coeffs[j][i]) {
                return Err(Error::Parse("coefficient array is not symmetric".into()));
            }
        }
        Ok(MultiQuadraticForm {
            coeffs,
            d: d.clone(),
        })
    }

    /// The two-variable form `a x^2 + b xy + c y^2`.
    pub fn binary(a: BigInt, b: BigInt, c: BigInt, d: &Discriminant) -> Self {
        MultiQuadraticForm {
            coeffs: vec![vec![a, b.clone()], vec![b, c]],
            d: d.clone(),
        }
    }

    pub fn vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    /// Coefficient of `z_i^2` for `i == j`, of `z_i z_j` otherwise.
    pub fn coeff(&self, i: usize, j: usize) -> &BigInt {
        &self.coeffs[i][j]
    }

    /// `(a, b, c)` for a two-variable form.
    pub fn as_binary(&self) -> Option<(BigInt, BigInt, BigInt)> {
        (self.vars() == 2).then(|| {
            (
                self.coeffs[0][0].clone(),
                self.coeffs[0][1].clone(),
                self.coeffs[1][1].clone(),
            )
        })
    }

    pub fn evaluate(&self, z: &[BigInt]) -> Result<BigInt> {
        let m = self.vars();
        if z.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: z.len(),
            });
        }
        let mut total = BigInt::zero();
        for i in 0..m {
            total += &self.coeffs[i][i] * &z[i] * &z[i];
            for j in i + 1..m {
                total += &self.coeffs[i][j] * &z[i] * &z[j];
            }
        }
        Ok(total)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        MultiQuadraticForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|v| v * k).collect())
                .collect(),
            d: self.d.clone(),
        }
    }

    /// Divides every coefficient by `k`, failing unless all divide exactly.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let mut coeffs = self.coeffs.clone();
        for v in coeffs.iter_mut().flatten() {
            let (q, r) = v.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            *v = q;
        }
        Some(MultiQuadraticForm {
            coeffs,
            d: self.d.clone(),
        })
    }

    /// Gram matrix `G` with `f(z) = z^T G z / 2`.
    fn gram(&self) -> Vec<Vec<BigInt>> {
        let m = self.vars();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            &self.coeffs[i][i] * 2
                        } else {
                            self.coeffs[i][j].clone()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for MultiQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.vars();
        let var = |i: usize| {
            if m == 2 {
                ["x", "y"][i].to_string()
            } else {
                format!("z{}", i + 1)
            }
        };
        let mut terms = Vec::new();
        for i in 0..m {
            for j in i..m {
                let c = &self.coeffs[i][j];
                if c.is_zero() {
                    continue;
                }
                let mono = if i == j {
                    format!("{}^2", var(i))
                } else {
                    format!("{}{}", var(i), var(j))
                };
                terms.push((c.clone(), mono));
            }
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, mono)) in terms.iter().enumerate() {
            let mag = c.abs();
            let head = if mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            match (k, c.is_negative()) {
                (0, false) => write!(f, "{head}{mono}")?,
                (0, true) => write!(f, "-{head}{mono}")?,
                (_, false) => write!(f, " + {head}{mono}")?,
                (_, true) => write!(f, " - {head}{mono}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for MultiQuadraticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        let mut st = s.serialize_struct("MultiQuadraticForm", 3)?;
        st.serialize_field("vars", &self.vars().to_string())?;
        st.serialize_field("coeffs", &coeffs)?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

/// Norm form of a generator tuple: `q_ii = N(a_i)`, `q_ij = Tr(a_i conj(a_j))`.
pub fn norm_form(x: &GenTuple) -> MultiQuadraticForm {
    let a = x.coeffs();
    let m = a.len();
    let mut coeffs = vec![vec![BigInt::zero(); m]; m];
    for i in 0..m {
        coeffs[i][i] = a[i].norm();
        for j in i + 1..m {
            let t = (&a[i] * &a[j].conj()).trace();
            coeffs[i][j] = t.clone();
            coeffs[j][i] = t;
        }
    }
    MultiQuadraticForm {
        coeffs,
        d: x.discriminant().clone(),
    }
}

/// `f(h(z_1), ..., h(z_m))` where `h(z_j) = sum_i h[j][i] z_i`.
pub fn form_action(h: &IntMatrix, f: &MultiQuadraticForm) -> Result<MultiQuadraticForm> {
    let m = f.vars();
    if h.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: h.dim(),
        });
    }
    // new Gram = H^T G H
    let g = f.gram();
    let gh: Vec<Vec<BigInt>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| (0..m).map(|k| &g[j][k] * h.get(k, i)).sum())
                .collect()
        })
        .collect();
    let coeffs = (0..m)
        .map(|i| {
            (0..m)
                .map(|l| {
                    let v: BigInt = (0..m).map(|j| h.get(j, i) * &gh[j][l]).sum();
                    if i == l {
                        v / 2
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Ok(MultiQuadraticForm {
        coeffs,
        d: f.d.clone(),
    })
}

/// Matrix `h` with `h ∘ norm_form(x) = norm_form(y)`, for `y` inside `x`.
pub fn factor_witness(x: &GenTuple, y: &GenTuple) -> Result<IntMatrix> {
    let h = solve_transform(x, y)?;
    let m = h.dim();
    let lhs = form_action(&h, &norm_form(&x.padded(m)))?;
    assert_eq!(
        lhs,
        norm_form(&y.padded(m)),
        "factor witness does not transform the norm form"
    );
    Ok(h)
}

/// Norm form of the integral basis, `x^2 + d xy + (d^2 - d)/4 y^2`.
pub fn principal_norm_form(d: &Discriminant) -> MultiQuadraticForm {
    norm_form(&GenTuple::integral_basis(d))
}

/// Matrix `h` with `h ∘ f_o = norm_form(source)`, where `f_o` is the norm form
/// of the integral basis padded to the length of `source`.
pub fn represent_from_fo(source: &GenTuple) -> Result<IntMatrix> {
    let fo = GenTuple::integral_basis(source.discriminant());
    factor_witness(&fo, source)
}

/// Checks `form_action(h, norm_form(x)) == norm_form(apply_transform(h, x))`.
pub fn naturality_holds(h: &IntMatrix, x: &GenTuple) -> Result<bool> {
    let lhs = form_action(h, &norm_form(x))?;
    let rhs = norm_form(&apply_transform(h, x)?);
    Ok(lhs == rhs)
}
