//! Pure stabilizer states at small `n`: enumeration, the log-free
//! robustness of magic, and the best pure-stabilizer fidelity.

mod simplex;

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{MagicError, Result};
use crate::pauli::{pauli_spectrum, PauliString};

pub const MAX_ENUMERATION_QUBITS: usize = 4;

/// Largest `n` for which [`log_free_robustness`] runs. Four qubits need the
/// `lr4` feature: 73 440 LP columns and a tableau of roughly 150 MB.
pub const MAX_ROBUSTNESS_QUBITS: usize = if cfg!(feature = "lr4") { 4 } else { 3 };

/// `2ⁿ ∏_{k=1..n} (2ᵏ + 1)`.
pub fn stabilizer_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, k| acc * ((1u64 << k) + 1))
}

/// All pure stabilizer states on `n` qubits, normalized with the first
/// nonzero amplitude real and positive.
#[derive(Clone, Debug)]
pub struct StabilizerStateSet {
    n: usize,
    states: Vec<Vec<Complex64>>,
    labels: Vec<String>,
}

impl StabilizerStateSet {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    /// Signed generators of the stabilizer group in reduced echelon form,
    /// e.g. `"+XX -ZZ"`.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn from_states(n: usize, states: Vec<Vec<Complex64>>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(states.len());
        let mut labels = Vec::with_capacity(states.len());
        for s in states {
            let label = stabilizer_label(n, &s)?;
            if seen.insert(label.clone()) {
                kept.push(s);
                labels.push(label);
            }
        }
        Ok(StabilizerStateSet { n, states: kept, labels })
    }
}

/// Reduced-echelon generators of the group `{±P : ⟨ψ|P|ψ⟩ = ±1}`.
pub fn stabilizer_label(n: usize, psi: &[Complex64]) -> Result<String> {
    let spec = pauli_spectrum(&DensityMatrix::from_pure(psi)?)?;
    let group: Vec<usize> = spec
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| (v.abs() - 1.0).abs() < 1e-6)
        .map(|(i, _)| i)
        .collect();
    if group.len() != 1 << n {
        return Err(MagicError::InvalidState("vector is not a stabilizer state".into()));
    }
    // Gaussian elimination over GF(2) on the Pauli indices; every element of
    // the reduced basis is itself a group element.
    let mut basis: Vec<usize> = Vec::new();
    for &g in &group {
        let mut v = g;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    // full reduction: clear each pivot from every other row
    for i in 0..basis.len() {
        let pivot = 1usize << (usize::BITS - 1 - basis[i].leading_zeros());
        for j in 0..basis.len() {
            if j != i && basis[j] & pivot != 0 {
                basis[j] ^= basis[i];
            }
        }
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    let parts: Vec<String> = basis
        .iter()
        .map(|&b| {
            let sign = if spec.values()[b] > 0.0 { '+' } else { '-' };
            format!("{sign}{}", PauliString::from_index(n, b))
        })
        .collect();
    Ok(parts.join(" "))
}

fn check_enumeration(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUMERATION_QUBITS {
        return Err(MagicError::Capacity {
            what: "stabilizer enumeration",
            requested: n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    Ok(())
}

/// Reduced row-echelon bases of every `k`-dimensional subspace of GF(2)ⁿ.
fn subspaces(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for pivots in 0usize..1 << n {
        if pivots.count_ones() as usize != k {
            continue;
        }
        let piv: Vec<usize> = (0..n).filter(|i| pivots >> i & 1 == 1).collect();
        // free positions for row j: non-pivot bits below its pivot
        let free: Vec<Vec<usize>> = piv
            .iter()
            .map(|&p| (0..p).filter(|i| pivots >> i & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(|f| f.len()).sum();
        for fill in 0usize..1 << total {
            let mut bit = 0;
            let rows: Vec<usize> = piv
                .iter()
                .zip(&free)
                .map(|(&p, f)| {
                    let mut row = 1 << p;
                    for &pos in f {
                        if fill >> bit & 1 == 1 {
                            row |= 1 << pos;
                        }
                        bit += 1;
                    }
                    row
                })
                .collect();
            out.push(rows);
        }
    }
    out
}

/// Enumerate by affine support, shift, linear `i`-phase and quadratic sign form:
/// `ψ(x₀ ⊕ Σ y_j b_j) ∝ i^{c·y} (−1)^{d·y + Σ_{j<l} Q_{jl} y_j y_l}`.
fn affine_form_states(n: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n;
    let mut states = Vec::new();
    for k in 0..=n {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|j| (j + 1..k).map(move |l| (j, l))).collect();
        let amp = 1.0 / ((1usize << k) as f64).sqrt();
        for basis in subspaces(n, k) {
            let pivot_mask: usize = basis.iter().map(|r| 1 << (usize::BITS - 1 - r.leading_zeros())).sum();
            for shift in 0..dim {
                if shift & pivot_mask != 0 {
                    continue;
                }
                for c in 0usize..1 << k {
                    for d in 0usize..1 << k {
                        for qform in 0usize..1 << pairs.len() {
                            let mut psi = vec![Complex64::new(0.0, 0.0); dim];
                            for y in 0usize..1 << k {
                                let mut x = shift;
                                for (j, b) in basis.iter().enumerate() {
                                    if y >> j & 1 == 1 {
                                        x ^= b;
                                    }
                                }
                                let mut sign = (d & y).count_ones();
                                for (e, &(j, l)) in pairs.iter().enumerate() {
                                    if qform >> e & 1 == 1 && y >> j & 1 == 1 && y >> l & 1 == 1 {
                                        sign += 1;
                                    }
                                }
                                let mut v = Complex64::new(amp, 0.0);
                                if (c & y).count_ones() % 2 == 1 {
                                    v *= Complex64::new(0.0, 1.0);
                                }
                                if sign % 2 == 1 {
                                    v = -v;
                                }
                                psi[x] = v;
                            }
                            states.push(psi);
                        }
                    }
                }
            }
        }
    }
    states
}

/// Every pure stabilizer state on `n ≤ 4` qubits, without duplicates.
pub fn enumerate_stabilizer_states(n: usize) -> Result<StabilizerStateSet> {
    check_enumeration(n)?;
    StabilizerStateSet::from_states(n, affine_form_states(n))
}

const CACHE_MAGIC: &[u8; 5] = b"MSTAB";
const CACHE_VERSION: u32 = 1;

/// Binary dump: magic, version, `n`, count, then little-endian `(re, im)` amplitudes.
pub fn save_stabilizer_set(set: &StabilizerStateSet, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(set.n as u32).to_le_bytes())?;
    w.write_all(&(set.states.len() as u64).to_le_bytes())?;
    for s in &set.states {
        for a in s {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_stabilizer_set(path: &Path) -> Result<StabilizerStateSet> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(MagicError::InvalidState("not a stabilizer cache file".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != CACHE_VERSION {
        return Err(MagicError::InvalidState(format!("unsupported cache version {version}")));
    }
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf) as usize;
    check_enumeration(n)?;
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf);
    if count != stabilizer_count(n) {
        return Err(MagicError::InvalidState(format!("cache holds {count} states for n = {n}")));
    }
    let mut states = Vec::with_capacity(count as usize);
    let mut f = [0u8; 8];
    for _ in 0..count {
        let mut s = Vec::with_capacity(1 << n);
        for _ in 0..1usize << n {
            r.read_exact(&mut f)?;
            let re = f64::from_le_bytes(f);
            r.read_exact(&mut f)?;
            s.push(Complex64::new(re, f64::from_le_bytes(f)));
        }
        states.push(s);
    }
    StabilizerStateSet::from_states(n, states)
}

/// Load `<dir>/stab-n<n>.bin` if present, otherwise enumerate and write it.
pub fn enumerate_cached(n: usize, dir: &Path) -> Result<StabilizerStateSet> {
    let path = dir.join(format!("stab-n{n}.bin"));
    if path.exists() {
        return load_stabilizer_set(&path);
    }
    let set = enumerate_stabilizer_states(n)?;
    save_stabilizer_set(&set, &path)?;
    Ok(set)
}

/// Log-free robustness of magic with the optimal decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct RobustnessResult {
    /// `ln Σ|xᵢ|` in nats.
    pub lr: f64,
    /// Nonzero coefficients keyed by stabilizer label.
    pub coefficients: BTreeMap<String, f64>,
    /// Largest Pauli-moment mismatch of the decomposition.
    pub residual: f64,
}

/// `min ln Σ|xᵢ|` subject to `ρ = Σ xᵢ|ψᵢ⟩⟨ψᵢ|` over pure stabilizer states.
pub fn log_free_robustness(rho: &DensityMatrix) -> Result<RobustnessResult> {
    let n = rho.num_qubits();
    if n == 0 || n > MAX_ROBUSTNESS_QUBITS {
        return Err(MagicError::Capacity {
            what: "robustness LP",
            requested: n,
            limit: MAX_ROBUSTNESS_QUBITS,
        });
    }
    let set = enumerate_stabilizer_states(n)?;
    log_free_robustness_with(rho, &set)
}

pub fn log_free_robustness_with(rho: &DensityMatrix, set: &StabilizerStateSet) -> Result<RobustnessResult> {
    let n = rho.num_qubits();
    if set.n != n {
        return Err(MagicError::DimensionMismatch { expected: n, found: set.n });
    }
    let target = pauli_spectrum(rho)?;
    let rows = 1usize << (2 * n);
    let m = set.len();
    let columns: Vec<Vec<f64>> = set
        .states
        .iter()
        .map(|s| Ok(pauli_spectrum(&DensityMatrix::from_pure(s)?)?.values().to_vec()))
        .collect::<Result<_>>()?;
    // x = x⁺ − x⁻ with both parts nonnegative
    let mut a = vec![0.0; rows * 2 * m];
    for (i, col) in columns.iter().enumerate() {
        for p in 0..rows {
            let v = col[p].round();
            a[p * 2 * m + i] = v;
            a[p * 2 * m + m + i] = -v;
        }
    }
    let c = vec![1.0; 2 * m];
    let sol = simplex::minimize(&c, &a, target.values())?;
    let x: Vec<f64> = (0..m).map(|i| sol.x[i] - sol.x[m + i]).collect();
    let mut residual = 0.0f64;
    for p in 0..rows {
        let recon: f64 = (0..m).map(|i| x[i] * columns[i][p]).sum();
        residual = residual.max((recon - target.values()[p]).abs());
    }
    if residual > 1e-7 {
        return Err(MagicError::LinearProgram(format!("decomposition residual {residual:e}")));
    }
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let coefficients = x
        .iter()
        .zip(&set.labels)
        .filter(|(v, _)| v.abs() > 1e-12)
        .map(|(v, l)| (l.clone(), *v))
        .collect();
    Ok(RobustnessResult { lr: l1.ln().max(0.0), coefficients, residual })
}

/// `max_φ ⟨φ|ρ|φ⟩` over pure stabilizer states.
pub fn best_pure_stabilizer_fidelity(rho: &DensityMatrix) -> Result<f64> {
    let set = enumerate_stabilizer_states(rho.num_qubits())?;
    best_pure_stabilizer_fidelity_with(rho, &set)
}

pub fn best_pure_stabilizer_fidelity_with(rho: &DensityMatrix, set: &StabilizerStateSet) -> Result<f64> {
    if set.n != rho.num_qubits() {
        return Err(MagicError::DimensionMismatch { expected: rho.num_qubits(), found: set.n });
    }
    Ok(set
        .states
        .par_iter()
        .map(|phi| rho.overlap_with_pure(phi))
        .reduce(|| f64::NEG_INFINITY, f64::max))
}
