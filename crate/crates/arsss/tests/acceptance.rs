//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use arsss::array_codes::{check_block_rank_conditions, evenodd_generator, ring_block_matrix};
use arsss::circle::{circle_decode, matrix_circle_mul, matrix_inverse_exact};
use arsss::generator::{cauchy_generator, check_rank_conditions, random_generator, score, vandermonde_generator};
use arsss::leakage::{conditional_entropy, count_secret_solutions, DEFAULT_ENUM_CAP};
use arsss::matrix::IntMatrix;
use arsss::prob::{enumerate_restricted, ProbSequence, ProbVector};
use arsss::scheme::{
    encode, make_auxiliary, naive_baseline, plan_mixture, recover_from_bundle, AnyGenerator,
    MixtureMethod,
};
use arsss::snf::enumerate_box_solutions;
use num::bigint::{BigInt, BigUint};
use num::traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use std::time::Instant;

fn ex4_matrix() -> IntMatrix {
    IntMatrix::from_i64_rows(&[vec![1, 1], vec![1, -1]]).unwrap()
}

fn verdict(name: &str, ok: bool, detail: &str) {
    println!("ACCEPTANCE {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn table1_reproduction() {
    let start = Instant::now();
    let expected = [(4i64, 0.7084f64), (8, 0.7773), (12, 0.8072), (16, 0.8247)];
    let mut got = Vec::new();
    let mut ok = true;
    for &(q, want) in &expected {
        let r = conditional_entropy(&ex4_matrix(), &[1], q, 2, 1, DEFAULT_ENUM_CAP).unwrap();
        ok &= (r.ratio - want).abs() <= 5e-4;
        got.push((q, r.ratio));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 1.0;
    verdict(
        "table-1",
        ok,
        &format!("ratios {:?} vs (0.7084, 0.7773, 0.8072, 0.8247), {elapsed:?}", got),
    );
    assert!(ok, "table 1 ratios {got:?}, elapsed {elapsed:?}");
}

/// Independent oracle for the m=4 single-share analysis: plain enumeration
/// of restricted pairs and direct vector sums, no circle-product machinery.
fn table2_oracle(q: i64) -> (f64, f64) {
    let alphabet = enumerate_restricted(q, 4).unwrap();
    let mut counts: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for s in &alphabet {
        for t in &alphabet {
            let y: Vec<i64> = s.values().iter().zip(t.values()).map(|(a, b)| a + b).collect();
            *counts.entry(y).or_default() += 1;
        }
    }
    let total = (alphabet.len() * alphabet.len()) as f64;
    let h: f64 = counts.values().map(|&n| n as f64 / total * (n as f64).log2()).sum();
    let h_s = (alphabet.len() as f64).log2();
    (h, h / h_s)
}

#[test]
fn table2_reproduction_or_report() {
    let start = Instant::now();
    let reference = [(4i64, 0.4757f64), (8, 0.5594), (12, 0.5972), (16, 0.6191)];
    // frozen from the independent oracle; the enumeration reading is pinned
    let frozen = [(4i64, 0.5670f64), (8, 0.6832), (12, 0.7343), (16, 0.7638)];
    let mut ok = true;
    let mut reported = 0;
    let mut ratios = Vec::new();
    for (&(q, ref_ratio), &(_, frozen_ratio)) in reference.iter().zip(&frozen) {
        let r = conditional_entropy(&ex4_matrix(), &[1], q, 4, 1, DEFAULT_ENUM_CAP).unwrap();
        let (oracle_h, oracle_ratio) = table2_oracle(q);
        // implementation must agree exactly with the independent oracle
        ok &= (r.h_s_given - oracle_h).abs() < 1e-9;
        ok &= (r.ratio - oracle_ratio).abs() < 1e-12;
        ok &= (r.ratio - frozen_ratio).abs() <= 5e-4;
        ratios.push((q, r.ratio));
        if (r.ratio - ref_ratio).abs() > 5e-3 {
            reported += 1;
            println!(
                "REPORTED MISMATCH (table 2, q={q}): computed {:.4} vs reference value {ref_ratio} \
                 under the pinned reading (uniform restricted pairs, first share observed)",
                r.ratio
            );
        }
    }
    // ratios grow with q, as the reference table also shows
    ok &= ratios.windows(2).all(|w| w[1].1 > w[0].1);
    // the mismatch is real and must have been reported, not absorbed
    ok &= reported == reference.len();
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 120.0;
    verdict(
        "table-2",
        ok,
        &format!("computed {ratios:?}; reference values differ and were reported ({reported}/4); {elapsed:?}"),
    );
    assert!(ok, "table 2: {ratios:?}, reported {reported}, elapsed {elapsed:?}");
}

#[test]
fn example1_golden() {
    let g = IntMatrix::from_i64_rows(&[vec![1, -2, 2]]).unwrap();
    let x = ProbSequence::new(vec![
        ProbVector::from_scalar(2, 6).unwrap(),
        ProbVector::from_scalar(4, 8).unwrap(),
        ProbVector::from_scalar(2, 10).unwrap(),
    ])
    .unwrap();
    let y = matrix_circle_mul(&g, &x).unwrap();
    let value = y.symbols()[0].scalar().unwrap();
    let resolution = y.symbols()[0].resolution();
    // resolution follows |G|Q = 1*6 + 2*8 + 2*10 = 42 (the criterion text
    // says 24, which contradicts the resolution law it cites; see notes)
    let ok = value == 14 && resolution == 42;
    verdict("example-1", ok, &format!("value {value} at resolution {resolution} (|G|Q = 42)"));
    assert!(ok);
}

#[test]
fn example3_golden() {
    let g = ex4_matrix();
    let x = ProbSequence::new(vec![
        ProbVector::from_scalar(2, 8).unwrap(),
        ProbVector::from_scalar(4, 8).unwrap(),
    ])
    .unwrap();
    let y = matrix_circle_mul(&g, &x).unwrap();
    let vals: Vec<i64> = y.symbols().iter().map(|s| s.scalar().unwrap()).collect();
    let res = y.resolutions();
    let back = circle_decode(&g, &y).unwrap();
    let ok = vals == [6, 6] && res == [16, 16] && back == x;
    verdict("example-3", ok, &format!("shares {vals:?} at {res:?}, decode exact: {}", back == x));
    assert!(ok);
}

#[test]
fn example5_goldens() {
    let vand = vandermonde_generator(5, 3, 1).unwrap();
    let cauchy = cauchy_generator(5, 3, 1).unwrap();
    let printed_random = IntMatrix::from_i64_rows(&[
        vec![18, 9, 10],
        vec![15, 8, 9],
        vec![6, 16, 14],
        vec![20, 17, 15],
        vec![0, 4, 16],
    ])
    .unwrap();
    let vs = vand.score();
    let cs = cauchy.score();
    let rs = score(&printed_random);

    let mut ok = vs.oc == BigUint::from(10u32);
    ok &= cs.oc == BigUint::from(22u32) && cs.il == BigUint::from(1_989_680u64);
    ok &= check_rank_conditions(&printed_random, 3, 1).unwrap().is_ok();
    ok &= rs.oc == BigUint::from(52u32) && rs.il == BigUint::from(44_328_960u64);

    // Vandermonde IL: row-sum product arithmetic gives 8820; the reference
    // figure 8830 does not match and is logged, not hard-coded.
    let il = vs.il.to_u64().unwrap();
    ok &= il == 8820 && il != 8830;
    println!(
        "NOTE (example 5): Vandermonde IL computed as {il} = 3*7*6*7*10; the reference value 8830 \
         differs by {}",
        8830 - il as i64
    );
    verdict(
        "example-5",
        ok,
        &format!("vandermonde OC=10 IL={il}; cauchy OC=22 IL=1989680; random OC=52 IL=44328960"),
    );
    assert!(ok);
}

#[test]
fn evenodd_p3_golden() {
    let g = evenodd_generator(3, 4, 1).unwrap();
    let s = g.score();
    let conditions =
        check_block_rank_conditions(g.matrix(), g.n(), g.k(), g.l_secret(), g.block()).unwrap();
    let ok = s.oc == BigUint::from(3u32) && s.il == BigUint::from(24u32) && conditions.is_ok();
    verdict("evenodd-p3", ok, &format!("OC={} IL={} conditions ok={}", s.oc, s.il, conditions.is_ok()));
    assert!(ok);
}

#[test]
fn ring_block_golden() {
    let printed = IntMatrix::from_i64_rows(&[
        vec![0, 1, 1, 0],
        vec![0, 1, 0, 1],
        vec![0, 1, 0, 0],
        vec![1, 1, 0, 0],
    ])
    .unwrap();
    let mut ok = ring_block_matrix(3, 5).unwrap() == printed;
    let mut law = true;
    for t in 0..5u64 {
        for s in 0..5u64 {
            let prod = ring_block_matrix(t, 5)
                .unwrap()
                .mul(&ring_block_matrix(s, 5).unwrap())
                .unwrap();
            let mut reduced = IntMatrix::zeros(4, 4);
            for r in 0..4 {
                for c in 0..4 {
                    if prod.get(r, c).bit(0) {
                        reduced.set(r, c, BigInt::from(1));
                    }
                }
            }
            law &= reduced == ring_block_matrix((t + s) % 5, 5).unwrap();
        }
    }
    ok &= law;
    verdict("ring-block", ok, &format!("p=5 t=3 matrix matches, composition law over F2: {law}"));
    assert!(ok);
}

#[test]
fn roundtrip_500_instances() {
    let start = Instant::now();
    // (2,1,2) in the (k,L,n) order used by the worked examples = (n,k,L) (2,2,1)
    let configs: [(usize, usize, usize); 5] = [(2, 2, 1), (3, 2, 1), (5, 3, 1), (5, 3, 2), (6, 4, 2)];
    let ms = [2usize, 4];
    let qs = [4i64, 8, 16];
    let mut instances = 0usize;
    let mut failures = 0usize;
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE97);
    'outer: for rep in 0..17usize {
        for &(n, k, l_secret) in &configs {
            for &m in &ms {
                for &q in &qs {
                    if instances == 500 {
                        break 'outer;
                    }
                    let gen = match rep % 3 {
                        0 => vandermonde_generator(n, k, l_secret).unwrap(),
                        1 => cauchy_generator(n, k, l_secret).unwrap(),
                        _ => random_generator(n, k, l_secret, rng.random()).unwrap(),
                    };
                    let gen = AnyGenerator::Scalar(gen);
                    let secret = ProbSequence::new(
                        (0..l_secret)
                            .map(|_| arsss::scheme::sample_restricted(q, m, &mut rng).unwrap())
                            .collect(),
                    )
                    .unwrap();
                    let x = make_auxiliary(&secret, k, &mut rng).unwrap();
                    let bundle = encode(&gen, &x, false).unwrap();
                    // every k-subset of shares must recover the secret
                    for subset in combinations(n, k) {
                        let idx: Vec<usize> = subset.iter().map(|&i| i + 1).collect();
                        match recover_from_bundle(&gen, &bundle, &idx) {
                            Ok(rec) if rec.symbols() == secret.symbols() => {}
                            _ => failures += 1,
                        }
                    }
                    instances += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && instances == 500 && elapsed.as_secs_f64() < 60.0;
    verdict(
        "roundtrip-500",
        ok,
        &format!("{instances} instances, {failures} subset failures, {elapsed:?}"),
    );
    assert!(ok, "instances {instances}, failures {failures}, elapsed {elapsed:?}");
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[test]
fn snf_counting_oracle_200_systems() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x51AF);
    let mut checked = 0usize;
    let mut failures = 0usize;
    while checked < 200 {
        let rows = rng.random_range(1..=3usize);
        let cols = rng.random_range(rows.max(2)..=4usize);
        let q = rng.random_range(1..=12i64);
        let mut data: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(-5..=5)).collect())
            .collect();
        if checked % 10 == 3 && rows >= 2 {
            data[1] = data[0].clone(); // force a rank-deficient system
        }
        let g = IntMatrix::from_i64_rows(&data).unwrap();
        // half solvable-by-construction, half arbitrary right-hand sides
        let y: Vec<BigInt> = if checked % 2 == 0 {
            let x0: Vec<i64> = (0..cols).map(|_| rng.random_range(0..=q)).collect();
            (0..rows)
                .map(|r| BigInt::from(data[r].iter().zip(&x0).map(|(a, b)| a * b).sum::<i64>()))
                .collect()
        } else {
            (0..rows).map(|_| BigInt::from(rng.random_range(-30..=30i64))).collect()
        };
        let lo = vec![BigInt::zero(); cols];
        let hi = vec![BigInt::from(q); cols];
        let mut fast = enumerate_box_solutions(&g, &y, &lo, &hi, 1 << 24).unwrap();
        fast.sort();

        let mut brute: Vec<Vec<BigInt>> = Vec::new();
        let mut x = vec![0i64; cols];
        loop {
            if (0..rows).all(|r| {
                BigInt::from(data[r].iter().zip(&x).map(|(a, b)| a * b).sum::<i64>()) == y[r]
            }) {
                brute.push(x.iter().map(|&v| BigInt::from(v)).collect());
            }
            let mut pos = cols;
            while pos > 0 {
                x[pos - 1] += 1;
                if x[pos - 1] <= q {
                    break;
                }
                x[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
        brute.sort();
        if fast != brute {
            failures += 1;
            eprintln!("counting mismatch on {data:?} rhs {y:?}: {} vs {}", fast.len(), brute.len());
        }
        checked += 1;
    }
    let ok = failures == 0;
    verdict("snf-counting-oracle", ok, &format!("200 systems, {failures} mismatches"));
    assert!(ok);
}

#[test]
fn bound_sandwich_everywhere() {
    let mut checked = 0usize;
    let mut ok = true;
    let mut worst = f64::INFINITY;
    // every instance the analysis path touches: both tables, plus assorted
    // generators, subset sizes and widths
    let mut cases: Vec<(IntMatrix, Vec<usize>, i64, usize, usize)> = Vec::new();
    for q in [4i64, 8, 12, 16] {
        cases.push((ex4_matrix(), vec![1], q, 2, 1));
        cases.push((ex4_matrix(), vec![2], q, 2, 1));
    }
    for q in [4i64, 8] {
        cases.push((ex4_matrix(), vec![1], q, 4, 1));
    }
    let vand = vandermonde_generator(5, 3, 1).unwrap();
    for subset in [vec![1], vec![2], vec![1, 2], vec![3, 5], vec![1, 4]] {
        cases.push((vand.matrix().clone(), subset, 4, 2, 1));
    }
    let cauchy = cauchy_generator(4, 3, 2).unwrap();
    for subset in [vec![1], vec![2], vec![1, 3], vec![2, 4]] {
        cases.push((cauchy.matrix().clone(), subset, 4, 2, 2));
    }
    let circ = arsss::generator::circulant_generator(3).unwrap();
    for subset in [vec![1], vec![2, 3], vec![1, 2]] {
        cases.push((circ.matrix().clone(), subset, 8, 2, 1));
    }
    for (g, subset, q, m, l_secret) in cases {
        let r = conditional_entropy(&g, &subset, q, m, l_secret, DEFAULT_ENUM_CAP).unwrap();
        let sandwich = r.lower_bound <= r.h_s_given + 1e-9 && r.h_s_given <= r.upper_bound + 1e-9;
        if !sandwich {
            eprintln!(
                "sandwich broken: subset {:?} q={q} m={m}: {} <= {} <= {}",
                subset, r.lower_bound, r.h_s_given, r.upper_bound
            );
        }
        worst = worst.min((r.h_s_given - r.lower_bound).min(r.upper_bound - r.h_s_given));
        ok &= sandwich;
        checked += 1;
    }
    verdict(
        "bound-sandwich",
        ok,
        &format!("{checked} instances, slack never below {worst:.3e} bits"),
    );
    assert!(ok);
}

#[test]
fn sequencing_cost_claims() {
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let gen = AnyGenerator::Scalar(vandermonde_generator(5, 3, 1).unwrap());
    let (n, k, l_secret, q) = (5usize, 3usize, 1usize, 8i64);
    let secret = ProbSequence::new(vec![ProbVector::from_scalar(3, q).unwrap()]).unwrap();
    let x = make_auxiliary(&secret, k, &mut rng).unwrap();

    let with_neg = encode(&gen, &x, true).unwrap();
    let without = encode(&gen, &x, false).unwrap();

    // decode row for the secret through shares {1,2,3}
    let sub = gen.matrix().select_rows(&[0, 1, 2]);
    let inv = matrix_inverse_exact(&sub).unwrap();
    let resolutions: Vec<i64> = with_neg.resolutions[..k].to_vec();
    let plan_i =
        plan_mixture(inv.row(0), &resolutions, MixtureMethod::NegativeShares, true).unwrap();
    let plan_ii = plan_mixture(inv.row(0), &resolutions, MixtureMethod::TwoSamples, false).unwrap();
    let (_, report) = naive_baseline(&secret, n, k, 1 << 20, &mut rng).unwrap();

    let ok = plan_i.sequencing_reads == 1
        && plan_ii.sequencing_reads == 2
        && report.naive_sequencing_reads == 3
        && without.synthesis_ops == k
        && with_neg.synthesis_ops == 2 * k
        && report.method_i_reads == l_secret;
    verdict(
        "sequencing-costs",
        ok,
        &format!(
            "method i: {} read, method ii: {} reads, naive: {} reads; synthesis {} vs {}",
            plan_i.sequencing_reads,
            plan_ii.sequencing_reads,
            report.naive_sequencing_reads,
            without.synthesis_ops,
            with_neg.synthesis_ops
        ),
    );
    assert!(ok);
}

#[test]
fn monotone_ratio_and_m4_counting_oracle() {
    // finite-grid stand-in for the q -> infinity limits: monotone ratios on
    // both table grids plus exact m=4 counting against brute force
    let series = arsss::leakage::asymptotic_check(
        &ex4_matrix(),
        &[1],
        &[4, 8, 12, 16],
        2,
        1,
        DEFAULT_ENUM_CAP,
    )
    .unwrap();
    let mut ok = series.nondecreasing && series.bounds_ok;

    let series4 =
        arsss::leakage::asymptotic_check(&ex4_matrix(), &[1], &[4, 8], 4, 1, DEFAULT_ENUM_CAP)
            .unwrap();
    ok &= series4.nondecreasing && series4.bounds_ok;

    // m=4 solution counting vs brute force over restricted pairs
    let q = 4i64;
    let alphabet = enumerate_restricted(q, 4).unwrap();
    let g1 = IntMatrix::from_i64_rows(&[vec![1, 1]]).unwrap();
    let mut mismatches = 0;
    for (si, s) in alphabet.iter().enumerate().step_by(3) {
        let t = &alphabet[(si * 7 + 2) % alphabet.len()];
        let y = ProbVector::new(
            s.values().iter().zip(t.values()).map(|(a, b)| a + b).collect(),
            4,
        )
        .unwrap();
        let obs = ProbSequence::new(vec![y.clone()]).unwrap();
        let counts = count_secret_solutions(&g1, &obs, q, 4, 1, 1 << 24).unwrap();
        let brute: u64 = alphabet
            .iter()
            .flat_map(|a| alphabet.iter().map(move |b| (a, b)))
            .filter(|(a, b)| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .zip(y.values())
                    .all(|((va, vb), vy)| va + vb == *vy)
            })
            .count() as u64;
        if counts.total != BigUint::from(brute) {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    verdict(
        "monotone-and-m4-counting",
        ok,
        &format!(
            "m=2 grid {:?} nondecreasing, m=4 grid {:?} nondecreasing, counting mismatches {mismatches}",
            series.ratios, series4.ratios
        ),
    );
    assert!(ok);
}
