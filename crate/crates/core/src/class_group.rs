//! Form class groups as Cayley tables, their invariant factors, ambiguous
//! classes and the quotient by squares.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{prime_factors, Discriminant};
use crate::error::Result;
use crate::forms::{compose_crt, enumerate_reduced_with, principal_form, BinaryForm};
use crate::par::{self, Strategy};

#[derive(Clone, Debug)]
pub struct ClassGroup {
    d: Discriminant,
    elements: Vec<BinaryForm>,
    table: Vec<Vec<usize>>,
    structure: Vec<u64>,
}

impl ClassGroup {
    pub fn compute(d: &Discriminant) -> Result<Self> {
        Self::compute_with(d, Strategy::default())
    }

    pub fn compute_with(d: &Discriminant, strategy: Strategy) -> Result<Self> {
        let elements = enumerate_reduced_with(d, strategy)?;
        let index: HashMap<(BigInt, BigInt), usize> = elements
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.a().clone(), f.b().clone()), i))
            .collect();
        let rows: Vec<usize> = (0..elements.len()).collect();
        let table = par::map(strategy, &rows, |&i| {
            elements
                .iter()
                .map(|g| {
                    let h = compose_crt(&elements[i], g).expect("same discriminant");
                    index[&(h.a().clone(), h.b().clone())]
                })
                .collect()
        });
        debug_assert_eq!(elements[0], principal_form(d));
        let structure = invariant_factors(&table);
        Ok(ClassGroup {
            d: d.clone(),
            elements,
            table,
            structure,
        })
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn class_number(&self) -> usize {
        self.elements.len()
    }

    /// Reduced forms sorted by `(a, b)`; index 0 is the principal form.
    pub fn elements(&self) -> &[BinaryForm] {
        &self.elements
    }

    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Invariant factors `n_1 | n_2 | ...`, ascending; empty for the trivial group.
    pub fn structure(&self) -> &[u64] {
        &self.structure
    }

    pub fn index_of(&self, f: &BinaryForm) -> Option<usize> {
        let r = f.reduced();
        self.elements
            .binary_search_by(|e| (e.a(), e.b()).cmp(&(r.a(), r.b())))
            .ok()
    }

    pub fn element_order(&self, x: usize) -> usize {
        element_orders(&self.table)[x]
    }

    /// Classes of order dividing 2, identity included.
    pub fn two_torsion(&self) -> Vec<BinaryForm> {
        (0..self.class_number())
            .filter(|&x| self.table[x][x] == self.identity())
            .map(|x| self.elements[x].clone())
            .collect()
    }

    /// The quotient by the subgroup of squares.
    pub fn cl_mod_squares(&self) -> SquareQuotient {
        let h = self.class_number();
        let mut squares: Vec<usize> = (0..h).map(|x| self.table[x][x]).collect();
        squares.sort_unstable();
        squares.dedup();
        let mut coset_of = vec![usize::MAX; h];
        let mut reps = Vec::new();
        // elements are in lexicographic order, so the first unassigned one
        // is the least member of its coset
        for x in 0..h {
            if coset_of[x] != usize::MAX {
                continue;
            }
            reps.push(x);
            for &s in &squares {
                coset_of[self.table[x][s]] = x;
            }
        }
        SquareQuotient {
            order: reps.len(),
            coset_reps: reps.iter().map(|&x| self.elements[x].clone()).collect(),
            coset_of,
        }
    }

    pub fn report(&self, include_table: bool) -> ClassGroupReport {
        ClassGroupReport {
            d: self.d.clone(),
            h: self.class_number().to_string(),
            structure: self.structure.iter().map(u64::to_string).collect(),
            elements: self.elements.clone(),
            two_torsion: self.two_torsion(),
            genus_order: self.cl_mod_squares().order.to_string(),
            table: include_table.then(|| {
                self.table
                    .iter()
                    .map(|r| r.iter().map(usize::to_string).collect())
                    .collect()
            }),
        }
    }
}

/// `Cl / Cl^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareQuotient {
    pub order: usize,
    /// Least reduced form of each coset, in lexicographic order.
    pub coset_reps: Vec<BinaryForm>,
    /// For each element index, the index of its coset representative.
    pub coset_of: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassGroupReport {
    pub d: Discriminant,
    pub h: String,
    pub structure: Vec<String>,
    pub elements: Vec<BinaryForm>,
    pub two_torsion: Vec<BinaryForm>,
    pub genus_order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<String>>>,
}

fn element_orders(table: &[Vec<usize>]) -> Vec<usize> {
    (0..table.len())
        .map(|x| {
            let (mut y, mut n) = (x, 1);
            while y != 0 {
                y = table[y][x];
                n += 1;
            }
            n
        })
        .collect()
}

/// Invariant factors from counts of elements killed by `p^k`: in
/// `prod Z/p^{e_i}` there are `p^{sum min(k, e_i)}` of them, so the ratio of
/// consecutive counts gives the number of `e_i >= k`.
fn invariant_factors(table: &[Vec<usize>]) -> Vec<u64> {
    let h = table.len() as u64;
    if h == 1 {
        return Vec::new();
    }
    let orders = element_orders(table);
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for (p, v) in prime_factors(&BigInt::from(h)) {
        let p: u64 = p.try_into().expect("small prime");
        let mut exps_at_least = Vec::new();
        let mut prev = 1u64;
        let mut pk = 1u64;
        for _ in 0..v {
            pk *= p;
            let count = orders
                .iter()
                .filter(|&&o| pk.is_multiple_of(o as u64))
                .count() as u64;
            let mut ratio = count / prev;
            let mut r = 0u32;
            while ratio > 1 {
                ratio /= p;
                r += 1;
            }
            if r == 0 {
                break;
            }
            exps_at_least.push(r);
            prev = count;
        }
        // exponent of the i-th largest cyclic factor = #{k : r_k > i}
        let cyclic = exps_at_least.first().copied().unwrap_or(0) as usize;
        let exps = (0..cyclic)
            .map(|i| exps_at_least.iter().filter(|&&r| r as usize > i).count() as u32)
            .collect();
        per_prime.push((p, exps));
    }
    let count = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..count)
        .map(|i| {
            per_prime
                .iter()
                .map(|(p, e)| p.pow(e.get(i).copied().unwrap_or(0)))
                .product()
        })
        .collect();
    factors.reverse();
    factors
}
