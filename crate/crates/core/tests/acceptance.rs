//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qg_core::forms::is_concordant;
use qg_core::norm_form::principal_norm_form;
use qg_core::par::{self, Strategy};
use qg_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

// Independent oracles: plain machine-integer arithmetic, no library calls.

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn distinct_primes(mut n: i64) -> Vec<i64> {
    n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn squarefree(n: i64) -> bool {
    let n = n.abs();
    (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0)
}

fn is_fundamental_oracle(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

fn fundamental_discriminants(max_abs: i64) -> Vec<i64> {
    (3..=max_abs)
        .map(|n| -n)
        .filter(|&d| is_fundamental_oracle(d))
        .collect()
}

/// Counts reduced primitive triples `(a, b, c)` with `b^2 - 4ac = d` by a
/// direct scan over all three coefficients.
fn brute_force_class_number(d: i64) -> usize {
    let n = -d;
    let mut count = 0;
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a..=a {
            for c in a..=n {
                if b * b - 4 * a * c != d {
                    continue;
                }
                let boundary = b.abs() == a || a == c;
                if boundary && b < 0 {
                    continue;
                }
                if gcd(gcd(a, b), c) == 1 {
                    count += 1;
                }
            }
        }
        a += 1;
    }
    count
}

fn disc(d: i64) -> Discriminant {
    Discriminant::from_i64(d).unwrap()
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Random primitive positive-definite form with coefficients up to `bound`.
fn random_form(rng: &mut ChaCha8Rng, bound: i64) -> BinaryForm {
    loop {
        let a = rng.gen_range(1..=bound);
        let c = rng.gen_range(1..=bound);
        let b = rng.gen_range(-bound..=bound);
        if b * b >= 4 * a * c || gcd(gcd(a, b), c) != 1 {
            continue;
        }
        return BinaryForm::from_i64(a, b, c).unwrap();
    }
}

fn random_sl2(rng: &mut ChaCha8Rng) -> IntMatrix {
    loop {
        let (x, y) = (rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6));
        if gcd(x, y) != 1 {
            continue;
        }
        // complete (x, y) to a determinant-1 matrix
        let (u, v) = (-6i64..=6)
            .flat_map(|u| (-6i64..=6).map(move |v| (u, v)))
            .find(|&(u, v)| x * v - u * y == 1)
            .unwrap_or((0, 0));
        if x * v - u * y == 1 {
            return IntMatrix::from_i64([[x, u], [y, v]]);
        }
    }
}

/// Random pair of forms of one discriminant, not necessarily reduced.
fn random_pair(rng: &mut ChaCha8Rng) -> (BinaryForm, BinaryForm) {
    let f = random_form(rng, 120);
    let forms = enumerate_reduced(f.discriminant()).unwrap();
    let g = forms[rng.gen_range(0..forms.len())].clone();
    let g = g.transform(&random_sl2(rng)).unwrap();
    let f = f.transform(&random_sl2(rng)).unwrap();
    (f, g)
}

fn random_concordant_pairs(seed: u64, n: usize) -> Vec<(BinaryForm, BinaryForm)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (f, g) = random_pair(&mut rng);
        if is_concordant(&f, &g) {
            out.push((f, g));
        }
    }
    out
}

fn ac1_dual_oracle() -> Outcome {
    let start = Instant::now();
    let discs = fundamental_discriminants(2000);
    let results = par::map(Strategy::default(), &discs, |&d| {
        let forms = enumerate_reduced(&disc(d)).unwrap();
        let mut pairs = 0usize;
        let mut bad = Vec::new();
        for f in &forms {
            for g in &forms {
                pairs += 1;
                let crt = compose_crt(f, g).unwrap();
                let matrix = compose_via_matrices(f, g).unwrap();
                let ideal = compose_via_ideals(f, g).unwrap();
                if crt != matrix || crt != ideal {
                    bad.push(format!(
                        "d={d} {f}*{g}: crt {crt} matrix {matrix} ideal {ideal}"
                    ));
                }
            }
        }
        (pairs, bad)
    });
    let elapsed = start.elapsed();
    let pairs: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let msg = format!(
        "{} discriminants, {pairs} pairs, {} mismatches, {:.2?} (limit 60s)",
        discs.len(),
        bad.len(),
        elapsed
    );
    if bad.is_empty() && elapsed < Duration::from_secs(60) {
        Ok(msg)
    } else {
        Err(format!("{msg}; first: {:?}", bad.first()))
    }
}

fn ac2_closed_form() -> Outcome {
    for (f, g) in random_concordant_pairs(2, 1000) {
        let d = f.discriminant().value().clone();
        let alpha = form_to_ideal(&f);
        let beta = form_to_ideal(&g);
        let tau = tau_pair(&alpha, &beta).map_err(|e| e.to_string())?;
        let (a, a2, b) = (f.a(), g.a(), &tau.big_b);
        let aa = a * a2;
        // B solves the three congruences
        if !((b - f.b()) % (big(2) * a)).is_zero()
            || !((b - g.b()) % (big(2) * a2)).is_zero()
            || !((b * b - &d) % (big(4) * &aa)).is_zero()
        {
            return Err(format!("{f}*{g}: B={b} violates the congruences"));
        }
        let composite = h_alpha(&alpha).mul(&tau.tau1).unwrap();
        let expected = IntMatrix::shear(aa.clone(), (b - &d) / 2);
        if composite != expected {
            return Err(format!("{f}*{g}: composite {composite} != {expected}"));
        }
        let substituted = form_action(&composite, &principal_norm_form(f.discriminant())).unwrap();
        let scaled = substituted.div_exact(&aa).ok_or("not divisible by aa'")?;
        let want = (aa.clone(), b.clone(), (b * b - &d) / (big(4) * &aa));
        if scaled.as_binary().unwrap() != want {
            return Err(format!("{f}*{g}: scaled form {scaled} != {want:?}"));
        }
    }
    Ok("1000 concordant pairs, composite and scaled form exact".into())
}

fn ac3_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut by_m = [0usize; 5];
    for _ in 0..1000 {
        let d = loop {
            let v = -rng.gen_range(3i64..5000);
            if let Ok(d) = Discriminant::from_i64(v) {
                break d;
            }
        };
        let m = rng.gen_range(2usize..=4);
        by_m[m] += 1;
        let coeffs = (0..m)
            .map(|_| {
                QuadInt::from_coords(
                    big(rng.gen_range(-50..=50)),
                    big(rng.gen_range(-50..=50)),
                    &d,
                )
            })
            .collect();
        let x = GenTuple::new(coeffs).unwrap();
        let rows = (0..m)
            .map(|_| (0..m).map(|_| big(rng.gen_range(-9..=9))).collect())
            .collect();
        let h = IntMatrix::new(rows).unwrap();
        let y = apply_transform(&h, &x).unwrap();
        let solved = solve_transform(&x, &y).map_err(|e| format!("{x} -> {y}: {e}"))?;
        if apply_transform(&solved, &x).unwrap() != y {
            return Err(format!("solved transform does not reproduce {y}"));
        }
        for g in [&h, &solved] {
            if form_action(g, &norm_form(&x)).unwrap()
                != norm_form(&apply_transform(g, &x).unwrap())
            {
                return Err(format!("naturality fails for {g} on {x}"));
            }
        }
    }
    Ok(format!(
        "1000 cases (m=2: {}, m=3: {}, m=4: {}), image and norm forms exact",
        by_m[2], by_m[3], by_m[4]
    ))
}

fn ac4_class_numbers() -> Outcome {
    let start = Instant::now();
    let cases = [
        (-3, 1),
        (-4, 1),
        (-23, 3),
        (-47, 5),
        (-71, 7),
        (-84, 4),
        (-163, 1),
    ];
    let mut seen = Vec::new();
    for (d, h) in cases {
        let oracle = brute_force_class_number(d);
        let group = ClassGroup::compute(&disc(d)).unwrap();
        if oracle != h || group.class_number() != h {
            return Err(format!(
                "h({d}): oracle {oracle}, class_group {}, expected {h}",
                group.class_number()
            ));
        }
        seen.push(format!("h({d})={h}"));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("took {elapsed:.2?} (limit 5s)"));
    }
    Ok(format!("{} in {elapsed:.2?} (limit 5s)", seen.join(" ")))
}

fn ac5_group_axioms() -> Outcome {
    let discs = fundamental_discriminants(2000);
    let results = par::map(
        Strategy::default(),
        &discs,
        |&d| -> std::result::Result<(usize, bool), String> {
            let g = ClassGroup::compute(&disc(d)).unwrap();
            let t = g.table();
            let h = g.class_number();
            let e = g.identity();
            if g.elements()[e] != principal_form(g.discriminant()) {
                return Err(format!("d={d}: identity is not the principal form"));
            }
            for (x, row) in t.iter().enumerate() {
                if row.len() != h || row.iter().any(|&v| v >= h) {
                    return Err(format!("d={d}: row {x} not closed"));
                }
                if t[e][x] != x || t[x][e] != x {
                    return Err(format!("d={d}: identity fails at {x}"));
                }
                let inv = g
                    .index_of(&g.elements()[x].inverse())
                    .ok_or("inverse not reduced form")?;
                if t[x][inv] != e || t[inv][x] != e {
                    return Err(format!("d={d}: inverse fails at {x}"));
                }
            }
            let assoc = |x: usize, y: usize, z: usize| t[t[x][y]][z] == t[x][t[y][z]];
            if h <= 50 {
                for x in 0..h {
                    for y in 0..h {
                        for z in 0..h {
                            if !assoc(x, y, z) {
                                return Err(format!("d={d}: associativity fails at {x},{y},{z}"));
                            }
                        }
                    }
                }
                Ok((h, true))
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64((-d) as u64);
                for _ in 0..10_000 {
                    let (x, y, z) = (
                        rng.gen_range(0..h),
                        rng.gen_range(0..h),
                        rng.gen_range(0..h),
                    );
                    if !assoc(x, y, z) {
                        return Err(format!("d={d}: associativity fails at {x},{y},{z}"));
                    }
                }
                Ok((h, false))
            }
        },
    );
    let mut max_h = 0;
    let mut sampled = 0;
    for r in results {
        let (h, exhaustive) = r?;
        max_h = max_h.max(h);
        sampled += usize::from(!exhaustive);
    }
    Ok(format!(
        "{} discriminants, max h = {max_h}, {sampled} with sampled associativity",
        discs.len()
    ))
}

fn ac6_genus_count() -> Outcome {
    let discs = fundamental_discriminants(2000);
    let results = par::map(Strategy::default(), &discs, |&d| {
        let g = ClassGroup::compute(&disc(d)).unwrap();
        let t = distinct_primes(d).len() as u32;
        let expected = 1usize << (t - 1);
        let got = g.cl_mod_squares().order;
        (d, got, expected, g.two_torsion().len())
    });
    if let Some((d, got, want, _)) = results.iter().find(|r| r.1 != r.2 || r.3 != r.2) {
        return Err(format!("d={d}: |Cl/Cl^2| = {got}, 2^(t-1) = {want}"));
    }
    let largest = results.iter().map(|r| r.2).max().unwrap_or(1);
    Ok(format!(
        "{} discriminants, |Cl/Cl^2| = |Cl[2]| = 2^(t-1) throughout (largest {largest})",
        results.len()
    ))
}

fn ac7_representation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        // a random primitive form gives a random discriminant and a valid ideal
        let f = random_form(&mut rng, 1_000_000);
        let d = f.discriminant();
        let alpha = OrderIdeal::new(f.a().clone(), f.b().clone(), d).map_err(|e| e.to_string())?;
        let h = represent_from_fo(&alpha.tuple()).map_err(|e| e.to_string())?;
        let fo = principal_norm_form(d);
        if form_action(&h, &fo).unwrap() != norm_form(&alpha.tuple()) {
            return Err(format!("{alpha}: h[f_o] differs from the ideal norm form"));
        }
        let expected = IntMatrix::shear(f.a().clone(), (f.b() - d.value()) / 2);
        if h != expected || h_alpha(&alpha) != expected {
            return Err(format!("{alpha}: got {h}, expected {expected}"));
        }
    }
    Ok("500 random ideals, h[f_o] and [[a,(b-d)/2],[0,1]] exact".into())
}

fn ac8_multiplicativity() -> Outcome {
    for (f, g) in random_concordant_pairs(8, 1000) {
        let alpha = form_to_ideal(&f);
        let beta = form_to_ideal(&g);
        if ideal_to_form(&alpha) != f || ideal_to_form(&beta) != g {
            return Err(format!("form round trip fails for {f} or {g}"));
        }
        if form_to_ideal(&ideal_to_form(&alpha)) != alpha {
            return Err(format!("ideal round trip fails for {alpha}"));
        }
        let product = ideal_mul(&alpha, &beta).map_err(|e| e.to_string())?;
        if !product.content.is_one() || product.ideal.a() != &(f.a() * g.a()) {
            return Err(format!(
                "{alpha} * {beta}: norm {} * content {} != {}",
                product.ideal.a(),
                product.content,
                f.a() * g.a()
            ));
        }
        let via_ideal = ideal_to_form(&product.ideal);
        if !via_ideal.is_equivalent(&compose_crt(&f, &g).unwrap()) {
            return Err(format!(
                "{f}*{g}: ideal route {via_ideal} not equivalent to crt"
            ));
        }
    }
    Ok("1000 concordant pairs, N(aa') and round trips exact".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 dual-oracle composition", ac1_dual_oracle),
        ("AC2 product matrix closed form", ac2_closed_form),
        ("AC3 transform round trip and naturality", ac3_round_trip),
        ("AC4 class numbers", ac4_class_numbers),
        ("AC5 group axioms", ac5_group_axioms),
        ("AC6 genus count", ac6_genus_count),
        ("AC7 representation from f_o", ac7_representation),
        (
            "AC8 norm multiplicativity and round trips",
            ac8_multiplicativity,
        ),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
