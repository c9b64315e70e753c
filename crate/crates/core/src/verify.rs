//! Agreement check of the three composition routes over a discriminant range.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::Discriminant;
use crate::error::{Error, Result};
use crate::forms::{compose_crt, enumerate_reduced, BinaryForm};
use crate::ideal::{compose_via_ideals, compose_via_matrices};
use crate::par::{self, Strategy};

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub d: Discriminant,
    pub f: BinaryForm,
    pub g: BinaryForm,
    pub crt: String,
    pub matrix: String,
    pub ideal: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub range: [String; 2],
    #[serde(serialize_with = "decimal")]
    pub discriminants: usize,
    #[serde(serialize_with = "decimal")]
    pub pairs: usize,
    pub mismatches: Vec<Mismatch>,
}

fn decimal<S: serde::Serializer>(n: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Pairs per discriminant; every pair is checked when `h^2` fits.
    pub samples: usize,
    pub fundamental_only: bool,
    pub seed: u64,
    pub strategy: Strategy,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 50,
            fundamental_only: false,
            seed: 0,
            strategy: Strategy::default(),
        }
    }
}

/// Compares `compose_crt`, `compose_via_matrices` and `compose_via_ideals`
/// for every valid discriminant between `from` and `to` (inclusive, either
/// order). Results are deterministic for a given seed.
pub fn verify_range(from: i64, to: i64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let (lo, hi) = (from.min(to), from.max(to));
    if hi >= 0 {
        return Err(Error::InvalidDiscriminant(BigInt::from(hi)));
    }
    let discs: Vec<Discriminant> = (lo..=hi)
        .rev()
        .filter_map(|d| Discriminant::from_i64(d).ok())
        .filter(|d| !opts.fundamental_only || d.is_fundamental())
        .collect();
    let per_d = par::map(opts.strategy, &discs, |d| check_discriminant(d, opts));
    let mut pairs = 0;
    let mut mismatches = Vec::new();
    for r in per_d {
        let (n, mut m) = r?;
        pairs += n;
        mismatches.append(&mut m);
    }
    Ok(VerifyReport {
        range: [from.to_string(), to.to_string()],
        discriminants: discs.len(),
        pairs,
        mismatches,
    })
}

fn check_discriminant(d: &Discriminant, opts: &VerifyOptions) -> Result<(usize, Vec<Mismatch>)> {
    let forms = enumerate_reduced(d)?;
    let h = forms.len();
    let pairs: Vec<(usize, usize)> = if h * h <= opts.samples {
        (0..h).flat_map(|i| (0..h).map(move |j| (i, j))).collect()
    } else {
        let tag = d.value().abs().to_u64().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ tag.rotate_left(17));
        (0..opts.samples)
            .map(|_| (rng.gen_range(0..h), rng.gen_range(0..h)))
            .collect()
    };
    let mut mismatches = Vec::new();
    for &(i, j) in &pairs {
        let (f, g) = (&forms[i], &forms[j]);
        let crt = compose_crt(f, g)?;
        let matrix = compose_via_matrices(f, g)?;
        let ideal = compose_via_ideals(f, g)?;
        if crt != matrix || crt != ideal {
            mismatches.push(Mismatch {
                d: d.clone(),
                f: f.clone(),
                g: g.clone(),
                crt: crt.to_string(),
                matrix: matrix.to_string(),
                ideal: ideal.to_string(),
            });
        }
    }
    Ok((pairs.len(), mismatches))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_range_has_no_mismatches() {
        let r = verify_range(-3, -400, &VerifyOptions::default()).unwrap();
        assert!(r.mismatches.is_empty());
        // valid discriminants in [-400, -3]: those congruent to 0 or 1 mod 4
        assert_eq!(r.discriminants, 200);
        assert!(r.pairs > r.discriminants);
    }

    #[test]
    fn deterministic_and_strategy_independent() {
        let opts = VerifyOptions {
            samples: 5,
            ..Default::default()
        };
        let seq = VerifyOptions {
            strategy: Strategy::Sequential,
            ..opts.clone()
        };
        let a = verify_range(-1000, -1200, &opts).unwrap();
        let b = verify_range(-1200, -1000, &seq).unwrap();
        assert_eq!(a.pairs, b.pairs);
        assert_eq!(a.discriminants, b.discriminants);
    }

    #[test]
    fn rejects_non_negative_range() {
        assert!(verify_range(-4, 4, &VerifyOptions::default()).is_err());
    }
}
