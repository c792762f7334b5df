//! Two-copy Bell sampling, the moment estimator built on it, sample
//! planning, and the magic tests that consume the estimate.
//!
//! Outcome words pack one bit pair per qubit: bit `2q` is the copy-1 outcome
//! of qubit `q` (the side that receives the Hadamard), bit `2q + 1` the copy-2
//! outcome.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::circuits::{simulate, Circuit};
use crate::density::{check_dense, DensityMatrix};
use crate::error::{MagicError, Result};
use crate::pauli::{pauli_spectrum, PauliString};
use crate::rng::rng_from_seed;

/// Outcome distribution of `U_Bell^{⊗n}` applied to `ρ ⊗ ρ`, indexed by outcome word.
///
/// `p(u) = 4^{-n} Σ_R β_R² (−1)^{#Y(R)} (−1)^{u·R}`, evaluated with a
/// Walsh–Hadamard butterfly over the `2n` index bits.
pub fn bell_outcome_distribution(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let n = rho.num_qubits();
    check_dense(n, "Bell sampling")?;
    let spec = pauli_spectrum(rho)?;
    let mut f: Vec<f64> = spec
        .values()
        .iter()
        .enumerate()
        .map(|(r, b)| {
            let sign = if PauliString::from_index(n, r).y_count() % 2 == 1 { -1.0 } else { 1.0 };
            sign * b * b
        })
        .collect();
    let len = f.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (f[i], f[i + h]);
                f[i] = a + b;
                f[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / len as f64;
    for v in &mut f {
        *v *= scale;
        if *v < 0.0 && *v > -1e-12 {
            *v = 0.0;
        }
    }
    Ok(f)
}

/// Same distribution by explicit simulation on `2n` qubits; meant as a cross-check for small `n`.
pub fn bell_outcome_distribution_direct(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let n = rho.num_qubits();
    check_dense(2 * n, "direct Bell construction")?;
    // interleave: copy 1 qubit q → 2q, copy 2 qubit q → 2q + 1
    let spread = |v: usize, shift: usize| -> usize {
        (0..n).map(|q| ((v >> q) & 1) << (2 * q + shift)).sum()
    };
    let d = 1usize << n;
    let dd = d * d;
    let mut data = vec![num_complex::Complex64::new(0.0, 0.0); dd * dd];
    for r1 in 0..d {
        for c1 in 0..d {
            let a = rho.get(r1, c1);
            for r2 in 0..d {
                for c2 in 0..d {
                    let r = spread(r1, 0) | spread(r2, 1);
                    let c = spread(c1, 0) | spread(c2, 1);
                    data[r * dd + c] = a * rho.get(r2, c2);
                }
            }
        }
    }
    let pair = DensityMatrix::from_raw(2 * n, data);
    let mut circ = Circuit::new(2 * n);
    for q in 0..n {
        circ.cnot(2 * q, 2 * q + 1)?.h(2 * q)?;
    }
    let out = simulate(&circ, &pair)?;
    Ok((0..dd).map(|i| out.get(i, i).re).collect())
}

/// Bell-measurement outcomes, one packed `2n`-bit word per round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellSampleBatch {
    n: usize,
    rounds: Vec<u64>,
}

impl BellSampleBatch {
    pub fn new(n: usize, rounds: Vec<u64>) -> Result<Self> {
        if 2 * n > 64 {
            return Err(MagicError::Capacity { what: "Bell word width", requested: n, limit: 32 });
        }
        let limit = if 2 * n == 64 { u64::MAX } else { (1u64 << (2 * n)) - 1 };
        if let Some(bad) = rounds.iter().find(|&&r| r > limit) {
            return Err(MagicError::domain(format!("outcome {bad} exceeds {} bits", 2 * n)));
        }
        Ok(BellSampleBatch { n, rounds })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> &[u64] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}

/// One bitstring per line; character `k` is bit `k` of the packed word.
impl fmt::Display for BellSampleBatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &r in &self.rounds {
            let s: String = (0..2 * self.n)
                .map(|k| if (r >> k) & 1 == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for BellSampleBatch {
    type Err = MagicError;

    fn from_str(s: &str) -> Result<Self> {
        let mut width = None;
        let mut rounds = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let w = *width.get_or_insert(line.len());
            if line.len() != w || w % 2 != 0 || w > 64 {
                return Err(MagicError::Parse {
                    line: i + 1,
                    column: 1,
                    message: format!("expected an even-length bitstring of width {w}"),
                });
            }
            let mut word = 0u64;
            for (k, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => word |= 1 << k,
                    _ => {
                        return Err(MagicError::Parse {
                            line: i + 1,
                            column: k + 1,
                            message: format!("unexpected character {ch:?}"),
                        })
                    }
                }
            }
            rounds.push(word);
        }
        BellSampleBatch::new(width.unwrap_or(0) / 2, rounds)
    }
}

/// I.i.d. rounds drawn from the exact outcome distribution.
pub fn sample_bell(rho: &DensityMatrix, rounds: usize, seed: u64) -> Result<BellSampleBatch> {
    let dist = bell_outcome_distribution(rho)?;
    Ok(BellSampleBatch { n: rho.num_qubits(), rounds: sample_from(&dist, rounds, seed) })
}

fn sample_from(dist: &[f64], rounds: usize, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in dist {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = rng_from_seed(seed);
    (0..rounds)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u);
            idx.min(dist.len() - 1) as u64
        })
        .collect()
}

fn group_value(n: usize, group: &[u64], alpha: usize) -> f64 {
    let mut nu = 0u64;
    for &r in group {
        nu ^= r;
    }
    let copy1 = nu & EVEN_BITS;
    let copy2 = (nu >> 1) & EVEN_BITS;
    if alpha % 2 == 1 {
        if (copy1 & copy2).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    } else {
        // b ← b·2(ν₁−1)(ν₂−1) per qubit
        let mut b = 1.0;
        for q in 0..n {
            let (v1, v2) = (((copy1 >> (2 * q)) & 1) as f64, ((copy2 >> (2 * q)) & 1) as f64);
            b *= 2.0 * (v1 - 1.0) * (v2 - 1.0);
        }
        b
    }
}

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

/// `Â_α` from consecutive groups of `α` rounds. Odd `α` only; see
/// [`estimate_a_with`] for the even branch.
pub fn estimate_a(batch: &BellSampleBatch, alpha: usize) -> Result<f64> {
    estimate_a_with(batch, alpha, false)
}

/// As [`estimate_a`]; with `allow_even` the even-`α` post-processing is used
/// verbatim. Its per-group values are not confined to `±1`.
pub fn estimate_a_with(batch: &BellSampleBatch, alpha: usize, allow_even: bool) -> Result<f64> {
    if alpha == 0 {
        return Err(MagicError::domain("α must be a positive integer"));
    }
    if alpha % 2 == 0 && !allow_even {
        return Err(MagicError::domain(format!(
            "even α = {alpha} is outside the estimator's guarantees; enable it explicitly"
        )));
    }
    if batch.rounds.is_empty() || batch.rounds.len() % alpha != 0 {
        return Err(MagicError::domain(format!(
            "{} rounds cannot be split into groups of {alpha}",
            batch.rounds.len()
        )));
    }
    let groups = batch.rounds.len() / alpha;
    let sum: f64 = batch
        .rounds
        .chunks(alpha)
        .map(|g| group_value(batch.n, g, alpha))
        .sum();
    Ok(sum / groups as f64)
}

/// Exact expectation of the per-group value, by enumerating all `α`-tuples
/// of outcomes. Exponential in `n·α`; meant for checking the estimator.
pub fn exact_group_expectation(dist: &[f64], n: usize, alpha: usize) -> f64 {
    let len = dist.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; alpha];
    loop {
        let prob: f64 = idx.iter().map(|&i| dist[i]).product();
        if prob != 0.0 {
            let words: Vec<u64> = idx.iter().map(|&i| i as u64).collect();
            total += prob * group_value(n, &words, alpha);
        }
        let mut k = 0;
        loop {
            if k == alpha {
                return total;
            }
            idx[k] += 1;
            if idx[k] < len {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Hoeffding-based repetition count for additive precision `ε` with failure probability `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatorPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: usize,
    /// Number of groups, `⌈2ε⁻² ln(2/δ)⌉`.
    pub l: u64,
    /// State copies consumed, `2αL`.
    pub copies: u64,
}

pub fn plan_samples(epsilon: f64, delta: f64, alpha: usize) -> Result<EstimatorPlan> {
    let open = |v: f64| v > 0.0 && v < 1.0;
    if !open(epsilon) || !open(delta) {
        return Err(MagicError::domain("ε and δ must lie in (0, 1)"));
    }
    if alpha == 0 {
        return Err(MagicError::domain("α must be a positive integer"));
    }
    let l = ((2.0 / (epsilon * epsilon)) * (2.0 / delta).ln()).ceil().max(1.0) as u64;
    Ok(EstimatorPlan { epsilon, delta, alpha, l, copies: 2 * alpha as u64 * l })
}

/// Draw `groups·α` rounds and estimate `A_α`.
pub fn estimate_from_state(rho: &DensityMatrix, alpha: usize, groups: u64, seed: u64) -> Result<f64> {
    let batch = sample_bell(rho, groups as usize * alpha, seed)?;
    estimate_a(&batch, alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LowMagic,
    HighMagic,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LowMagic => "low_magic",
            Verdict::HighMagic => "high_magic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestVerdict {
    pub verdict: Verdict,
    /// `Â₃`.
    pub estimate: f64,
    /// `ε₀ = ½ n^{−c}`.
    pub boundary: f64,
    pub c: f64,
    /// Groups of three rounds used.
    pub l: u64,
}

/// Threshold `Â₃` against `ε₀ = ½ n^{−c}`: low magic iff `Â₃ > ε₀`.
pub fn decide(estimate: f64, n: usize, c: f64, l: u64) -> TestVerdict {
    let boundary = 0.5 * (n as f64).powf(-c);
    let verdict = if estimate > boundary { Verdict::LowMagic } else { Verdict::HighMagic };
    TestVerdict { verdict, estimate, boundary, c, l }
}

/// Groups drawn by the tester: `⌈n^{2c+1}⌉`.
pub fn test_groups(n: usize, c: f64) -> u64 {
    ((n as f64).powf(2.0 * c + 1.0).ceil() as u64).max(1)
}

/// Decide between small and large magic from `⌈n^{2c+1}⌉` Bell groups.
pub fn magic_test(rho: &DensityMatrix, c: f64, seed: u64) -> Result<TestVerdict> {
    if !(c > 0.0) {
        return Err(MagicError::domain("boundary exponent c must be positive"));
    }
    let n = rho.num_qubits();
    let l = test_groups(n, c);
    let est = estimate_from_state(rho, 3, l, seed)?;
    Ok(decide(est, n, c, l))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertifyReport {
    #[serde(flatten)]
    pub test: TestVerdict,
    /// `−ln Â₃ / ln(8/5)`; absent when `Â₃ ≤ 0`.
    pub t_bound: Option<f64>,
}

/// T-count certification: the magic test plus the T-count implied by `Â₃`.
pub fn certify_t_count(rho: &DensityMatrix, c: f64, seed: u64) -> Result<CertifyReport> {
    let test = magic_test(rho, c, seed)?;
    Ok(CertifyReport { test, t_bound: implied_t_bound(test.estimate) })
}

pub fn implied_t_bound(a3: f64) -> Option<f64> {
    (a3 > 0.0).then(|| -a3.ln() / (8.0f64 / 5.0).ln())
}
