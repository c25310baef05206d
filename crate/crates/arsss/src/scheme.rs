//! End-to-end sharing: auxiliary randomness, share generation (with optional
//! negative shares), recovery from any k shares, mixture planning with
//! sequencing-cost accounting, and the finite-field baseline it is measured
//! against.

use crate::array_codes::BlockGeneratorMatrix;
use crate::circle::{matrix_circle_mul, circle_decode};
use crate::error::{Error, Result};
use crate::generator::{check_rank_conditions, smallest_prime_geq, GeneratorMatrix, RankCheck};
use crate::matrix::IntMatrix;
use crate::prob::{enumerate_restricted, ProbSequence, ProbVector};
use crate::array_codes::check_block_rank_conditions;
use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Secret shape: L symbols of width m at resolution q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretSpec {
    pub l_secret: usize,
    pub q: i64,
    pub m: usize,
}

impl SecretSpec {
    pub fn new(l_secret: usize, q: i64, m: usize) -> Result<Self> {
        if q < 1 {
            return Err(Error::BadParams(format!("secret resolution must be >= 1, got {q}")));
        }
        if m < 2 || q % m as i64 != 0 {
            return Err(Error::NotDivisible { q, m });
        }
        if l_secret == 0 {
            return Err(Error::BadParams("secret length must be >= 1".into()));
        }
        Ok(SecretSpec { l_secret, q, m })
    }
}

/// Either a plain generator or a block (multi-vessel) generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyGenerator {
    Scalar(GeneratorMatrix),
    Block(BlockGeneratorMatrix),
}

impl AnyGenerator {
    pub fn matrix(&self) -> &IntMatrix {
        match self {
            AnyGenerator::Scalar(g) => g.matrix(),
            AnyGenerator::Block(g) => g.matrix(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyGenerator::Scalar(g) => g.n(),
            AnyGenerator::Block(g) => g.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            AnyGenerator::Scalar(g) => g.k(),
            AnyGenerator::Block(g) => g.k(),
        }
    }

    pub fn l_secret(&self) -> usize {
        match self {
            AnyGenerator::Scalar(g) => g.l_secret(),
            AnyGenerator::Block(g) => g.l_secret(),
        }
    }

    /// Vessels per share.
    pub fn block(&self) -> usize {
        match self {
            AnyGenerator::Scalar(_) => 1,
            AnyGenerator::Block(g) => g.block(),
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            AnyGenerator::Scalar(g) => g.kind(),
            AnyGenerator::Block(g) => g.kind(),
        }
    }

    pub fn check(&self) -> Result<RankCheck> {
        match self {
            AnyGenerator::Scalar(g) => check_rank_conditions(g.matrix(), g.k(), g.l_secret()),
            AnyGenerator::Block(g) => {
                check_block_rank_conditions(g.matrix(), g.n(), g.k(), g.l_secret(), g.block())
            }
        }
    }

    /// Matrix text with a header line for block generators.
    pub fn to_text(&self) -> String {
        match self {
            AnyGenerator::Scalar(g) => g.matrix().to_text(),
            AnyGenerator::Block(g) => format!(
                "# block n={} k={} l={} kind={}\n{}",
                g.n(),
                g.k(),
                g.block(),
                g.kind(),
                g.matrix().to_text()
            ),
        }
    }

    /// Parse the matrix text format. A `# block ...` header selects the
    /// block form; otherwise the matrix is a plain generator.
    pub fn parse_text(text: &str, l_secret: usize) -> Result<Self> {
        let header = text.lines().find(|l| l.trim_start().starts_with("# block"));
        let matrix = IntMatrix::parse_text(text)?;
        match header {
            None => Ok(AnyGenerator::Scalar(GeneratorMatrix::from_matrix(
                matrix, l_secret, "file",
            )?)),
            Some(h) => {
                let mut n = None;
                let mut k = None;
                let mut l = None;
                let mut kind = String::from("file-block");
                for tok in h.trim_start().trim_start_matches("# block").split_whitespace() {
                    match tok.split_once('=') {
                        Some(("n", v)) => n = v.parse::<usize>().ok(),
                        Some(("k", v)) => k = v.parse::<usize>().ok(),
                        Some(("l", v)) => l = v.parse::<usize>().ok(),
                        Some(("kind", v)) => kind = v.to_string(),
                        _ => {}
                    }
                }
                let (n, k, l) = match (n, k, l) {
                    (Some(n), Some(k), Some(l)) => (n, k, l),
                    _ => return Err(Error::Parse("block header needs n=, k=, l=".into())),
                };
                Ok(AnyGenerator::Block(BlockGeneratorMatrix::from_matrix(
                    matrix, n, k, l_secret, l, &kind,
                )?))
            }
        }
    }

    /// Hash of the canonical matrix text; bundles carry it so recovery can
    /// refuse shares from a different generator.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_text().as_bytes());
        let out = h.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Sample one vector uniformly from the restricted alphabet: every value
/// uniform on [0, 2q/m], accepted when the sum hits q. Each member of the
/// alphabet is equally likely, which the secrecy analysis requires.
pub fn sample_restricted<R: Rng + ?Sized>(q: i64, m: usize, rng: &mut R) -> Result<ProbVector> {
    if (2 * q) % m as i64 != 0 {
        return Err(Error::NotDivisible { q, m });
    }
    let cap = 2 * q / m as i64;
    loop {
        let values: Vec<i64> = (0..m).map(|_| rng.random_range(0..=cap)).collect();
        if values.iter().sum::<i64>() == q {
            return ProbVector::new(values, m);
        }
    }
}

/// Extend the secret to the auxiliary sequence of `target_len` symbols: the
/// first L are the secret, the rest are uniform restricted vectors. For
/// block schemes pass `k * l` as the target and the secret's vessels flat.
pub fn make_auxiliary<R: Rng + ?Sized>(
    secret: &ProbSequence,
    target_len: usize,
    rng: &mut R,
) -> Result<ProbSequence> {
    if secret.is_empty() || secret.len() > target_len {
        return Err(Error::BadParams(format!(
            "secret length {} does not fit auxiliary length {target_len}",
            secret.len()
        )));
    }
    let m = secret.m().expect("nonempty");
    let q = secret.resolutions()[0];
    if q < 1 {
        return Err(Error::BadParams("secrets need resolution q >= 1".into()));
    }
    for s in secret.iter() {
        if s.resolution() != q {
            return Err(Error::BadParams("secret symbols must share one resolution".into()));
        }
        if !s.is_restricted() {
            return Err(Error::NotRestricted {
                index: 0,
                value: *s.values().iter().max().expect("nonempty"),
                cap: 2 * q / m as i64,
            });
        }
    }
    let mut symbols: Vec<ProbVector> = secret.symbols().to_vec();
    while symbols.len() < target_len {
        symbols.push(sample_restricted(q, m, rng)?);
    }
    ProbSequence::new(symbols)
}

/// Encoded shares plus provenance. Vessels are stored flat, `block_len` per
/// share, in share order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharesBundle {
    pub generator_fingerprint: String,
    pub m: usize,
    pub q: i64,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l_secret: usize,
    #[serde(rename = "l")]
    pub block_len: usize,
    /// 1-based share indices present, in storage order.
    pub indices: Vec<usize>,
    /// Per-vessel resolutions (the row sums of |G| times q), block_len per
    /// share; vessels of one share may differ, e.g. EVENODD parity rows.
    pub resolutions: Vec<i64>,
    pub shares: Vec<ProbVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negatives: Option<Vec<ProbVector>>,
    /// Synthesis operations spent: k without negatives, 2k with.
    pub synthesis_ops: usize,
}

impl SharesBundle {
    /// Vessels of one 1-based share index.
    pub fn share(&self, index: usize) -> Result<&[ProbVector]> {
        let pos = self
            .indices
            .iter()
            .position(|&i| i == index)
            .ok_or_else(|| Error::BadParams(format!("share {index} is not in the bundle")))?;
        Ok(&self.shares[pos * self.block_len..(pos + 1) * self.block_len])
    }
}

/// Encode the auxiliary sequence into n shares `Y = G (*) X`, optionally
/// with the negative shares `Y_- = G (*) X_-`.
pub fn encode(gen: &AnyGenerator, x: &ProbSequence, with_negatives: bool) -> Result<SharesBundle> {
    gen.check()?.into_result()?;
    let k = gen.k();
    let l = gen.block();
    if x.len() != k * l {
        return Err(Error::DimensionMismatch { expected: k * l, got: x.len() });
    }
    let m = x.m().ok_or_else(|| Error::BadParams("empty input".into()))?;
    let q = x.resolutions()[0];
    for s in x.iter() {
        if s.resolution() != q {
            return Err(Error::BadParams("input symbols must share one resolution".into()));
        }
        if !s.is_restricted() {
            return Err(Error::NotRestricted {
                index: 0,
                value: *s.values().iter().max().expect("nonempty"),
                cap: 2 * q / m as i64,
            });
        }
    }

    let y = matrix_circle_mul(gen.matrix(), x)?;
    // negatives via the commutation law Y_- = G (*) X_-; equal to per-share
    // negation of Y, which the tests assert
    let negatives = if with_negatives {
        Some(matrix_circle_mul(gen.matrix(), &x.negate()?)?.symbols().to_vec())
    } else {
        None
    };

    let vessel_res = y.resolutions();

    Ok(SharesBundle {
        generator_fingerprint: gen.fingerprint(),
        m,
        q,
        n: gen.n(),
        k,
        l_secret: gen.l_secret(),
        block_len: l,
        indices: (1..=gen.n()).collect(),
        resolutions: vessel_res,
        shares: y.symbols().to_vec(),
        negatives,
        synthesis_ops: if with_negatives { 2 * k * l } else { k * l },
    })
}

/// Recover the secret from any k of the shares. `available` holds 1-based
/// share indices matching `shares` (block_len vessels each, flat). Returns
/// the first L symbols of the decoded input.
pub fn recover(gen: &AnyGenerator, available: &[usize], shares: &ProbSequence) -> Result<ProbSequence> {
    let k = gen.k();
    let l = gen.block();
    let mut seen = available.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() < k {
        return Err(Error::NotEnoughShares { needed: k, got: seen.len() });
    }
    if seen.len() != available.len() {
        return Err(Error::BadParams("duplicate share indices".into()));
    }
    if available.iter().any(|&i| i < 1 || i > gen.n()) {
        return Err(Error::BadParams(format!("share index outside 1..={}", gen.n())));
    }
    if shares.len() != available.len() * l {
        return Err(Error::DimensionMismatch { expected: available.len() * l, got: shares.len() });
    }

    // decode through the first k provided shares (ascending index)
    let mut order: Vec<usize> = (0..available.len()).collect();
    order.sort_by_key(|&p| available[p]);
    let chosen = &order[..k];

    let mut rows = Vec::with_capacity(k * l);
    let mut vessels = Vec::with_capacity(k * l);
    for &p in chosen {
        let share_row = available[p] - 1;
        rows.extend(share_row * l..(share_row + 1) * l);
        vessels.extend(shares.symbols()[p * l..(p + 1) * l].iter().cloned());
    }
    let square = gen.matrix().select_rows(&rows);
    let x = circle_decode(&square, &ProbSequence::new(vessels)?)?;
    ProbSequence::new(x.symbols()[..gen.l_secret() * l].to_vec())
}

/// Recover from a bundle, verifying the generator fingerprint first.
pub fn recover_from_bundle(
    gen: &AnyGenerator,
    bundle: &SharesBundle,
    indices: &[usize],
) -> Result<ProbSequence> {
    if bundle.generator_fingerprint != gen.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let mut vessels = Vec::with_capacity(indices.len() * bundle.block_len);
    for &i in indices {
        vessels.extend(bundle.share(i)?.iter().cloned());
    }
    recover(gen, indices, &ProbSequence::new(vessels)?)
}

/// The two mixture-based read strategies for one decode row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixtureMethod {
    /// (i): negative coefficients draw from the stored negative shares; one
    /// mixed vessel, one sequencing read.
    NegativeShares,
    /// (ii): a positive and a negative sample, combined after sequencing;
    /// two reads (one when no coefficient is negative).
    TwoSamples,
}

impl MixtureMethod {
    pub fn label(&self) -> &'static str {
        match self {
            MixtureMethod::NegativeShares => "i",
            MixtureMethod::TwoSamples => "ii",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PortionSource {
    Share,
    NegativeShare,
}

/// One measured draw: `units` of the (possibly negative) share at
/// `share_pos`, into mix vessel `vessel`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixturePortion {
    pub share_pos: usize,
    pub source: PortionSource,
    pub vessel: usize,
    /// Integer units after scaling the whole plan by `scale`.
    pub units: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixturePlan {
    pub method: MixtureMethod,
    pub portions: Vec<MixturePortion>,
    pub mix_vessels: usize,
    pub sequencing_reads: usize,
    /// Common denominator cleared from the rational portions |a_i| q_i.
    pub scale: i64,
}

/// Plan the mixture realizing one decode row `A` against shares with the
/// given resolutions. Portions are `|a_i| q_i` units, scaled to integers.
pub fn plan_mixture(
    decode_row: &[BigRational],
    resolutions: &[i64],
    method: MixtureMethod,
    negatives_available: bool,
) -> Result<MixturePlan> {
    if decode_row.len() != resolutions.len() {
        return Err(Error::DimensionMismatch { expected: decode_row.len(), got: resolutions.len() });
    }
    let has_negative = decode_row.iter().any(|a| a.is_negative());
    if method == MixtureMethod::NegativeShares && has_negative && !negatives_available {
        return Err(Error::NegativesUnavailable);
    }

    let amounts: Vec<BigRational> = decode_row
        .iter()
        .zip(resolutions)
        .map(|(a, &q)| a.abs() * BigRational::from(BigInt::from(q)))
        .collect();
    let scale = amounts
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()));

    let scale = scale
        .to_i64()
        .ok_or_else(|| Error::Overflow("mixture scale".into()))?;
    let mut portions = Vec::new();
    for (i, (a, amount)) in decode_row.iter().zip(&amounts).enumerate() {
        if a.is_zero() {
            continue;
        }
        let units = (amount * BigRational::from(BigInt::from(scale)))
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Overflow("mixture portion".into()))?;
        let (source, vessel) = match (method, a.is_negative()) {
            (MixtureMethod::NegativeShares, true) => (PortionSource::NegativeShare, 0),
            (MixtureMethod::NegativeShares, false) => (PortionSource::Share, 0),
            (MixtureMethod::TwoSamples, false) => (PortionSource::Share, 0),
            (MixtureMethod::TwoSamples, true) => (PortionSource::Share, 1),
        };
        portions.push(MixturePortion { share_pos: i, source, vessel, units });
    }

    let (mix_vessels, sequencing_reads) = match method {
        MixtureMethod::NegativeShares => (1, 1),
        MixtureMethod::TwoSamples => {
            if has_negative {
                (2, 2)
            } else {
                (1, 1)
            }
        }
    };
    Ok(MixturePlan { method, portions, mix_vessels, sequencing_reads, scale })
}

/// Simulate a planned mix vessel: combine the portions and return the exact
/// per-coordinate probabilities of the resulting sample plus its total units.
pub fn simulate_mix(
    plan: &MixturePlan,
    vessel: usize,
    shares: &ProbSequence,
    negatives: Option<&ProbSequence>,
) -> Result<(Vec<BigRational>, BigRational)> {
    let m = shares.m().ok_or_else(|| Error::BadParams("empty sequence".into()))?;
    let mut mass = vec![BigRational::zero(); m];
    let mut units = BigRational::zero();
    for p in plan.portions.iter().filter(|p| p.vessel == vessel) {
        let source = match p.source {
            PortionSource::Share => &shares.symbols()[p.share_pos],
            PortionSource::NegativeShare => {
                &negatives.ok_or(Error::NegativesUnavailable)?.symbols()[p.share_pos]
            }
        };
        let q = BigRational::from(BigInt::from(source.resolution()));
        let amount = BigRational::from(BigInt::from(p.units));
        for (acc, &v) in mass.iter_mut().zip(source.values()) {
            // portion carries its probability mass v/q
            *acc += &amount * BigRational::from(BigInt::from(v)) / &q;
        }
        units += amount;
    }
    if units.is_zero() {
        return Err(Error::BadParams(format!("vessel {vessel} receives no portions")));
    }
    let probs = mass.iter().map(|v| v / &units).collect();
    Ok((probs, units))
}

/// Cost comparison of the proposed scheme against the finite-field baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub field_size: u64,
    pub k: usize,
    pub l_secret: usize,
    pub naive_sequencing_reads: usize,
    pub naive_synthesis_ops: usize,
    pub method_i_reads: usize,
    pub method_ii_reads: usize,
    pub synthesis_without_negatives: usize,
    pub synthesis_with_negatives: usize,
}

/// Linear ramp scheme over the smallest prime field holding the restricted
/// alphabet; every recovery sequences all k shares individually.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveScheme {
    pub field_size: u64,
    pub n: usize,
    pub k: usize,
    pub l_secret: usize,
    /// Secret symbols as field elements (alphabet indices).
    pub secret_elems: Vec<u64>,
    pub shares: Vec<u64>,
}

fn vandermonde_row(a: u64, k: usize, p: u64) -> Vec<u64> {
    let mut row = Vec::with_capacity(k);
    let mut acc = 1u64;
    for _ in 0..k {
        row.push(acc);
        acc = acc * a % p;
    }
    row
}

/// The naive baseline of the comparison figure: map symbols into a prime
/// field of size >= |Q'_{q,m}|, run a linear ramp scheme there, and read
/// every share individually at recovery.
pub fn naive_baseline<R: Rng + ?Sized>(
    secret: &ProbSequence,
    n: usize,
    k: usize,
    field_cap: u64,
    rng: &mut R,
) -> Result<(NaiveScheme, CostReport)> {
    let l_secret = secret.len();
    if l_secret == 0 || l_secret > k || k > n {
        return Err(Error::BadParams(format!("naive baseline n={n} k={k} L={l_secret}")));
    }
    let m = secret.m().expect("nonempty");
    let q = secret.resolutions()[0];
    let alphabet = enumerate_restricted(q, m)?;
    let needed = alphabet.len() as u64;
    let p = smallest_prime_geq(needed.max(n as u64 + 1));
    if p > field_cap {
        return Err(Error::FieldTooLarge { needed: p, cap: field_cap });
    }

    let secret_elems: Vec<u64> = secret
        .iter()
        .map(|s| {
            alphabet
                .iter()
                .position(|a| a == s)
                .map(|i| i as u64)
                .ok_or_else(|| Error::NotRestricted {
                    index: 0,
                    value: *s.values().iter().max().expect("nonempty"),
                    cap: 2 * q / m as i64,
                })
        })
        .collect::<Result<_>>()?;
    let mut x = secret_elems.clone();
    while x.len() < k {
        x.push(rng.random_range(0..p));
    }
    let shares: Vec<u64> = (1..=n as u64)
        .map(|a| {
            vandermonde_row(a, k, p)
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v % p)
                .fold(0u64, |acc, t| (acc + t) % p)
        })
        .collect();

    let report = CostReport {
        field_size: p,
        k,
        l_secret,
        naive_sequencing_reads: k,
        naive_synthesis_ops: n,
        method_i_reads: l_secret,
        method_ii_reads: 2 * l_secret,
        synthesis_without_negatives: k,
        synthesis_with_negatives: 2 * k,
    };
    Ok((NaiveScheme { field_size: p, n, k, l_secret, secret_elems, shares }, report))
}

/// Recover the naive scheme's secret from k shares (1-based indices),
/// reading each one; returns the recovered field elements.
pub fn naive_recover(scheme: &NaiveScheme, indices: &[usize]) -> Result<Vec<u64>> {
    let k = scheme.k;
    if indices.len() < k {
        return Err(Error::NotEnoughShares { needed: k, got: indices.len() });
    }
    let p = scheme.field_size;
    let idx = &indices[..k];
    let rows: Vec<Vec<i64>> = idx
        .iter()
        .map(|&i| {
            if i < 1 || i > scheme.n {
                return Err(Error::BadParams(format!("share index {i}")));
            }
            Ok(vandermonde_row(i as u64, k, p).iter().map(|&v| v as i64).collect())
        })
        .collect::<Result<_>>()?;
    let mat = IntMatrix::from_i64_rows(&rows)?.to_rationals();
    let rhs: Vec<BigRational> = idx
        .iter()
        .map(|&i| BigRational::from(BigInt::from(scheme.shares[i - 1])))
        .collect();
    // rational solve, then reduce mod p: the integer solution of the lifted
    // system is unique mod p because the Vandermonde determinant is a unit
    let sol = mat.solve(&rhs)?;
    let p_big = BigInt::from(p);
    let mut out = Vec::with_capacity(scheme.l_secret);
    for v in sol.iter().take(scheme.l_secret) {
        let denom_inv = mod_inverse_big(v.denom(), &p_big)?;
        let num = v.numer().mod_floor(&p_big);
        out.push(((num * denom_inv).mod_floor(&p_big)).to_u64().expect("mod p"));
    }
    Ok(out)
}

fn mod_inverse_big(a: &BigInt, p: &BigInt) -> Result<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Err(Error::Singular);
    }
    // extended Euclid
    let (mut t, mut new_t) = (BigInt::zero(), BigInt::one());
    let (mut r, mut new_r) = (p.clone(), a);
    while !new_r.is_zero() {
        let quot = &r / &new_r;
        let tmp_t = &t - &quot * &new_t;
        t = std::mem::replace(&mut new_t, tmp_t);
        let tmp_r = &r - &quot * &new_r;
        r = std::mem::replace(&mut new_r, tmp_r);
    }
    if !r.is_one() {
        return Err(Error::Singular);
    }
    Ok(t.mod_floor(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{matrix_inverse_exact, rational_circle_row};
    use crate::generator::vandermonde_generator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ex4_gen() -> AnyGenerator {
        AnyGenerator::Scalar(
            GeneratorMatrix::from_matrix(
                IntMatrix::from_i64_rows(&[vec![1, 1], vec![1, -1]]).unwrap(),
                1,
                "manual",
            )
            .unwrap(),
        )
    }

    fn scalar_seq(vals: &[i64], q: i64) -> ProbSequence {
        ProbSequence::new(vals.iter().map(|&v| ProbVector::from_scalar(v, q).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn auxiliary_keeps_secret_prefix() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let s = scalar_seq(&[3], 8);
        let x = make_auxiliary(&s, 2, &mut rng).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.symbols()[0], s.symbols()[0]);
        let t = x.symbols()[1].scalar().unwrap();
        assert!((0..=8).contains(&t));

        // k = L consumes no randomness
        let x = make_auxiliary(&s, 1, &mut rng).unwrap();
        assert_eq!(x, s);
    }

    #[test]
    fn sampling_is_uniform_over_restricted_alphabet() {
        // chi-square at 1e5 draws over |Q'_{8,4}| = 85 cells, fixed seed
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let alphabet = enumerate_restricted(8, 4).unwrap();
        let mut counts = std::collections::HashMap::new();
        let draws = 100_000usize;
        for _ in 0..draws {
            let v = sample_restricted(8, 4, &mut rng).unwrap();
            *counts.entry(v).or_insert(0usize) += 1;
        }
        let expect = draws as f64 / alphabet.len() as f64;
        let chi2: f64 = alphabet
            .iter()
            .map(|a| {
                let o = *counts.get(a).unwrap_or(&0) as f64;
                (o - expect) * (o - expect) / expect
            })
            .sum();
        // 84 degrees of freedom; 99.9th percentile is ~130
        assert!(chi2 < 140.0, "chi2 = {chi2}");
    }

    #[test]
    fn encode_decode_shares_and_negatives() {
        let gen = ex4_gen();
        let x = scalar_seq(&[2, 4], 8);
        let bundle = encode(&gen, &x, true).unwrap();
        assert_eq!(bundle.resolutions, vec![16, 16]);
        assert_eq!(bundle.synthesis_ops, 4); // 2k with negatives
        let negs = bundle.negatives.as_ref().unwrap();
        for (y, yneg) in bundle.shares.iter().zip(negs) {
            assert_eq!(&y.negate().unwrap(), yneg);
        }

        let secret = recover_from_bundle(&gen, &bundle, &[1, 2]).unwrap();
        assert_eq!(secret.symbols()[0].scalar(), Some(2));

        let plain = encode(&gen, &x, false).unwrap();
        assert_eq!(plain.synthesis_ops, 2);
        assert!(plain.negatives.is_none());
    }

    #[test]
    fn all_uniform_input_yields_uniform_shares() {
        let gen = ex4_gen();
        let x = scalar_seq(&[4, 4], 8);
        let bundle = encode(&gen, &x, false).unwrap();
        for (share, &res) in bundle.shares.iter().zip(&bundle.resolutions) {
            assert_eq!(share.scalar(), Some(res / 2));
        }
    }

    #[test]
    fn recover_needs_k_and_matching_fingerprint() {
        let gen = ex4_gen();
        let x = scalar_seq(&[2, 4], 8);
        let bundle = encode(&gen, &x, false).unwrap();
        assert!(matches!(
            recover_from_bundle(&gen, &bundle, &[1]),
            Err(Error::NotEnoughShares { needed: 2, got: 1 })
        ));

        let other = AnyGenerator::Scalar(vandermonde_generator(3, 2, 1).unwrap());
        assert!(matches!(
            recover_from_bundle(&other, &bundle, &[1, 2]),
            Err(Error::FingerprintMismatch)
        ));
    }

    #[test]
    fn resolution_law_on_vandermonde_instance() {
        let gen = AnyGenerator::Scalar(vandermonde_generator(5, 3, 1).unwrap());
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let s = scalar_seq(&[5], 8);
        let x = make_auxiliary(&s, 3, &mut rng).unwrap();
        let bundle = encode(&gen, &x, false).unwrap();
        let sums = gen.matrix().row_abs_sums();
        for (i, &res) in bundle.resolutions.iter().enumerate() {
            assert_eq!(BigInt::from(res), &sums[i] * BigInt::from(8));
        }
    }

    #[test]
    fn mixture_plan_reads_and_portions() {
        // Example 3 decode row (1/2, 1/2): no negatives, one read either way
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let row = vec![half.clone(), half];
        let plan = plan_mixture(&row, &[16, 16], MixtureMethod::TwoSamples, false).unwrap();
        assert_eq!(plan.sequencing_reads, 1);
        assert_eq!(plan.mix_vessels, 1);
        assert_eq!(plan.scale, 1); // |a| q = 8 is already integral
        assert_eq!(plan.portions.len(), 2);
        assert!(plan.portions.iter().all(|p| p.units == 8));

        // mixed signs: method (i) one read from negatives, method (ii) two
        let row = vec![
            BigRational::new(BigInt::from(8), BigInt::from(5)),
            BigRational::new(BigInt::from(-1), BigInt::from(5)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        ];
        let plan = plan_mixture(&row, &[24, 56, 48], MixtureMethod::NegativeShares, true).unwrap();
        assert_eq!(plan.sequencing_reads, 1);
        assert!(plan.portions.iter().any(|p| p.source == PortionSource::NegativeShare));

        let plan = plan_mixture(&row, &[24, 56, 48], MixtureMethod::TwoSamples, false).unwrap();
        assert_eq!(plan.sequencing_reads, 2);
        assert_eq!(plan.mix_vessels, 2);

        assert!(matches!(
            plan_mixture(&row, &[24, 56, 48], MixtureMethod::NegativeShares, false),
            Err(Error::NegativesUnavailable)
        ));
    }

    #[test]
    fn mixture_conservation_and_simulation() {
        let gen = ex4_gen();
        let x = scalar_seq(&[2, 4], 8);
        let bundle = encode(&gen, &x, true).unwrap();
        let shares = ProbSequence::new(bundle.shares.clone()).unwrap();
        let negatives = ProbSequence::new(bundle.negatives.clone().unwrap()).unwrap();

        let inv = matrix_inverse_exact(gen.matrix()).unwrap();
        let row = inv.row(1).to_vec(); // decodes t, the second symbol
        let plan = plan_mixture(&row, &bundle.resolutions, MixtureMethod::NegativeShares, true).unwrap();

        // total units must equal scale * sum |a_i| q_i
        let expect_units: BigRational = row
            .iter()
            .zip(&bundle.resolutions)
            .map(|(a, &q)| a.abs() * BigRational::from(BigInt::from(q)))
            .sum::<BigRational>()
            * BigRational::from(BigInt::from(plan.scale));
        let (probs, units) = simulate_mix(&plan, 0, &shares, Some(&negatives)).unwrap();
        assert_eq!(units, expect_units);

        // simulated mix probabilities equal the circle product's
        let (vals, res) = rational_circle_row(&row, &shares).unwrap();
        for (sim, alg) in probs.iter().zip(vals.iter().map(|v| v / &res)) {
            assert_eq!(sim, &alg);
        }
    }

    #[test]
    fn naive_baseline_costs_and_recovery() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let s = scalar_seq(&[5], 8);
        let (scheme, report) = naive_baseline(&s, 2, 2, 1 << 20, &mut rng).unwrap();
        assert_eq!(scheme.field_size, 11); // smallest prime >= |Q'_{8,2}| = 9
        assert_eq!(report.naive_sequencing_reads, 2);
        assert_eq!(report.method_i_reads, 1);
        let rec = naive_recover(&scheme, &[1, 2]).unwrap();
        assert_eq!(rec, scheme.secret_elems);

        // L = k: no reduction possible, both read k
        let s2 = scalar_seq(&[5, 3], 8);
        let (_, report) = naive_baseline(&s2, 4, 2, 1 << 20, &mut rng).unwrap();
        assert_eq!(report.method_i_reads, 2);
        assert_eq!(report.naive_sequencing_reads, 2);
    }

    #[test]
    fn generator_text_round_trip() {
        let gen = AnyGenerator::Scalar(vandermonde_generator(5, 3, 1).unwrap());
        let text = gen.to_text();
        let parsed = AnyGenerator::parse_text(&text, 1).unwrap();
        assert_eq!(parsed.matrix(), gen.matrix());
        assert_eq!(parsed.fingerprint(), gen.fingerprint());

        let block = AnyGenerator::Block(crate::array_codes::evenodd_generator(3, 4, 1).unwrap());
        let text = block.to_text();
        let parsed = AnyGenerator::parse_text(&text, 1).unwrap();
        assert_eq!(parsed.matrix(), block.matrix());
        assert_eq!(parsed.block(), 2);
    }

    #[test]
    fn bundle_json_round_trip() {
        let gen = ex4_gen();
        let bundle = encode(&gen, &scalar_seq(&[2, 4], 8), true).unwrap();
        let json = serde_json::to_string(&bundle).unwrap();
        let back: SharesBundle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, bundle);
        assert!(json.contains("\"generator_fingerprint\""));
    }
}

#[cfg(test)]
mod block_roundtrip_tests {
    use super::*;
    use crate::array_codes::{kronecker_block_generator, ring_generator};
    use crate::generator::cauchy_generator;
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn every_subset_recovers(gen: &AnyGenerator, m: usize, q: i64, seed: u64) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let l = gen.block();
        let secret = ProbSequence::new(
            (0..gen.l_secret() * l)
                .map(|_| sample_restricted(q, m, &mut rng).unwrap())
                .collect(),
        )
        .unwrap();
        let x = make_auxiliary(&secret, gen.k() * l, &mut rng).unwrap();
        let bundle = encode(gen, &x, false).unwrap();
        for subset in (1..=gen.n()).combinations(gen.k()) {
            let rec = recover_from_bundle(gen, &bundle, &subset).unwrap();
            assert_eq!(rec.symbols(), secret.symbols(), "subset {subset:?}");
        }
    }

    #[test]
    fn ring_block_scheme_round_trips() {
        let gen = AnyGenerator::Block(ring_generator(4, 2, 5).unwrap());
        every_subset_recovers(&gen, 2, 8, 21);
        every_subset_recovers(&gen, 4, 8, 22);
    }

    #[test]
    fn evenodd_scheme_round_trips() {
        let gen = AnyGenerator::Block(crate::array_codes::evenodd_generator(5, 6, 2).unwrap());
        every_subset_recovers(&gen, 2, 4, 31);
    }

    #[test]
    fn kronecker_lift_round_trips() {
        let base = cauchy_generator(4, 2, 1).unwrap();
        let gen = AnyGenerator::Block(kronecker_block_generator(&base, 3).unwrap());
        every_subset_recovers(&gen, 4, 8, 41);
    }

    #[test]
    fn secret_spec_invariants() {
        assert!(SecretSpec::new(1, 8, 2).is_ok());
        assert!(matches!(SecretSpec::new(1, 0, 2), Err(Error::BadParams(_))));
        assert!(matches!(SecretSpec::new(1, 10, 4), Err(Error::NotDivisible { .. })));
        assert!(SecretSpec::new(0, 8, 2).is_err());
    }
}
