//! Dense density matrices and the in-place kernels that channels and gates use.

use std::cell::Cell;

use num_complex::Complex64;

use crate::error::{MagicError, Result};

const DEFAULT_DENSE_LIMIT: usize = 10;

thread_local! {
    static LIMIT_OVERRIDE: Cell<Option<usize>> = const { Cell::new(None) };
}

/// Largest qubit count accepted by the dense paths.
///
/// Reads `MAGIC_DENSE_LIMIT` when set; a scoped override from
/// [`with_dense_limit`] takes precedence on the current thread.
pub fn dense_limit() -> usize {
    if let Some(v) = LIMIT_OVERRIDE.with(|c| c.get()) {
        return v;
    }
    std::env::var("MAGIC_DENSE_LIMIT")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

/// Run `f` with the dense limit temporarily set to `limit` on this thread.
pub fn with_dense_limit<T>(limit: usize, f: impl FnOnce() -> T) -> T {
    let prev = LIMIT_OVERRIDE.with(|c| c.replace(Some(limit)));
    let out = f();
    LIMIT_OVERRIDE.with(|c| c.set(prev));
    out
}

pub(crate) fn check_dense(n: usize, what: &'static str) -> Result<()> {
    let limit = dense_limit();
    if n > limit {
        return Err(MagicError::Capacity {
            what,
            requested: n,
            limit,
        });
    }
    Ok(())
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cholesky factorization of `A + shift·I`; false when a pivot is not positive.
fn cholesky_ok(d: usize, a: &[Complex64], shift: f64) -> bool {
    let mut l = vec![ZERO; d * d];
    for j in 0..d {
        let mut diag = a[j * d + j].re + shift;
        for k in 0..j {
            diag -= l[j * d + k].norm_sqr();
        }
        if !(diag > 0.0) {
            return false;
        }
        let ljj = diag.sqrt();
        l[j * d + j] = Complex64::new(ljj, 0.0);
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k].conj();
            }
            l[i * d + j] = v / ljj;
        }
    }
    true
}

/// Hermitian, positive semidefinite, unit-trace `2^n × 2^n` operator (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validate and wrap a row-major matrix.
    pub fn from_matrix(n: usize, data: Vec<Complex64>) -> Result<Self> {
        let d = 1usize << n;
        if data.len() != d * d {
            return Err(MagicError::InvalidState(format!(
                "expected {} entries for {n} qubits, got {}",
                d * d,
                data.len()
            )));
        }
        let rho = DensityMatrix { n, data };
        let herm = rho.hermiticity_error();
        if herm > 1e-10 {
            return Err(MagicError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let mut rho = rho;
        rho.hermitize();
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex64>) -> Self {
        DensityMatrix { n, data }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let d = psi.len();
        if !d.is_power_of_two() || d == 0 {
            return Err(MagicError::InvalidState(format!("state length {d} is not a power of two")));
        }
        let n = d.trailing_zeros() as usize;
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(MagicError::InvalidState("zero state vector".into()));
        }
        let scale = 1.0 / norm2;
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = psi[r] * psi[c].conj() * scale;
            }
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn zero_state(n: usize) -> Self {
        let d = 1usize << n;
        let mut data = vec![ZERO; d * d];
        data[0] = Complex64::new(1.0, 0.0);
        DensityMatrix { n, data }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            data[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        DensityMatrix { n, data }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| MagicError::domain("empty mixture"))?;
        let n = first.1.n;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(MagicError::domain("mixture weights must be a probability vector"));
        }
        let mut data = vec![ZERO; first.1.data.len()];
        for (w, rho) in parts {
            if rho.n != n {
                return Err(MagicError::DimensionMismatch { expected: n, found: rho.n });
            }
            for (acc, v) in data.iter_mut().zip(&rho.data) {
                *acc += v * *w;
            }
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `tr ρ²` computed directly from the entries.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `⟨φ|ρ|φ⟩` for a normalized vector.
    pub fn overlap_with_pure(&self, phi: &[Complex64]) -> f64 {
        let d = self.dim();
        let mut acc = ZERO;
        for r in 0..d {
            if phi[r] == ZERO {
                continue;
            }
            let mut row = ZERO;
            for c in 0..d {
                row += self.data[r * d + c] * phi[c];
            }
            acc += phi[r].conj() * row;
        }
        acc.re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.data[r * d + c] - self.data[c * d + r].conj()).norm());
            }
        }
        worst
    }

    fn hermitize(&mut self) {
        let d = self.dim();
        for r in 0..d {
            for c in r..d {
                let avg = (self.data[r * d + c] + self.data[c * d + r].conj()) * 0.5;
                self.data[r * d + c] = avg;
                self.data[c * d + r] = avg.conj();
            }
        }
    }

    /// Full invariant check: Hermitian, unit trace, eigenvalues ≥ −1e−8.
    ///
    /// Positivity is tested with a Cholesky factorization of `ρ + 1e−8·I`.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(MagicError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(MagicError::InvalidState(format!("trace {tr} differs from 1")));
        }
        if !cholesky_ok(self.dim(), &self.data, 1e-8) {
            return Err(MagicError::InvalidState(
                "negative eigenvalue below the −1e−8 slack".into(),
            ));
        }
        Ok(())
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![ZERO; d * d];
        for ro in 0..db {
            for co in 0..db {
                let w = other.get(ro, co);
                if w == ZERO {
                    continue;
                }
                for rs in 0..da {
                    for cs in 0..da {
                        data[(rs + da * ro) * d + cs + da * co] = self.get(rs, cs) * w;
                    }
                }
            }
        }
        DensityMatrix { n: self.n + other.n, data }
    }

    /// Trace out the `m` highest qubits.
    pub fn partial_trace_high(&self, m: usize) -> Result<DensityMatrix> {
        if m > self.n {
            return Err(MagicError::domain(format!("cannot trace {m} of {} qubits", self.n)));
        }
        let k = self.n - m;
        let dk = 1usize << k;
        let dm = 1usize << m;
        let d = self.dim();
        let mut data = vec![ZERO; dk * dk];
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = ZERO;
                for j in 0..dm {
                    acc += self.data[(r + dk * j) * d + c + dk * j];
                }
                data[r * dk + c] = acc;
            }
        }
        Ok(DensityMatrix { n: k, data })
    }

    /// Reduced state on the `keep` lowest qubits of a pure vector.
    pub fn reduced_from_pure(psi: &[Complex64], keep: usize) -> Result<DensityMatrix> {
        let d = psi.len();
        let n = d.trailing_zeros() as usize;
        if keep > n || !d.is_power_of_two() {
            return Err(MagicError::domain("invalid reduction"));
        }
        let dk = 1usize << keep;
        let dm = d / dk;
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let mut data = vec![ZERO; dk * dk];
        for j in 0..dm {
            let block = &psi[j * dk..(j + 1) * dk];
            for r in 0..dk {
                if block[r] == ZERO {
                    continue;
                }
                for c in 0..dk {
                    data[r * dk + c] += block[r] * block[c].conj();
                }
            }
        }
        for v in &mut data {
            *v /= norm2;
        }
        Ok(DensityMatrix { n: keep, data })
    }

    // ---- in-place kernels ----

    /// `ρ ← UρU†` for a single-qubit `U = [[u00, u01], [u10, u11]]` on qubit `q`.
    pub(crate) fn apply_1q(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let d = self.dim();
        let bit = 1usize << q;
        for r0 in (0..d).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for c in 0..d {
                let a = self.data[r0 * d + c];
                let b = self.data[r1 * d + c];
                self.data[r0 * d + c] = u[0][0] * a + u[0][1] * b;
                self.data[r1 * d + c] = u[1][0] * a + u[1][1] * b;
            }
        }
        let uc = [
            [u[0][0].conj(), u[0][1].conj()],
            [u[1][0].conj(), u[1][1].conj()],
        ];
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for c0 in (0..d).filter(|c| c & bit == 0) {
                let c1 = c0 | bit;
                let a = row[c0];
                let b = row[c1];
                row[c0] = a * uc[0][0] + b * uc[0][1];
                row[c1] = a * uc[1][0] + b * uc[1][1];
            }
        }
    }

    /// Diagonal single-qubit gate `diag(1, phase)` on qubit `q`.
    pub(crate) fn apply_phase(&mut self, q: usize, phase: Complex64) {
        let d = self.dim();
        let bit = 1usize << q;
        let conj = phase.conj();
        for r in 0..d {
            let rf = if r & bit != 0 { phase } else { Complex64::new(1.0, 0.0) };
            for c in 0..d {
                let cf = if c & bit != 0 { conj } else { Complex64::new(1.0, 0.0) };
                self.data[r * d + c] *= rf * cf;
            }
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let d = self.dim();
        let (cb, tb) = (1usize << control, 1usize << target);
        let perm = |b: usize| if b & cb != 0 { b ^ tb } else { b };
        // the permutation is an involution, so swapping each pair once suffices
        for r in 0..d {
            let pr = perm(r);
            for c in 0..d {
                let a = r * d + c;
                let b = pr * d + perm(c);
                if b > a {
                    self.data.swap(a, b);
                }
            }
        }
    }

    /// `(1−p)ρ + p·I/2 ⊗ tr_q ρ`.
    pub(crate) fn local_depolarize(&mut self, q: usize, p: f64) {
        let d = self.dim();
        let bit = 1usize << q;
        let keep = 1.0 - p;
        for r0 in (0..d).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for c0 in (0..d).filter(|c| c & bit == 0) {
                let c1 = c0 | bit;
                let a00 = self.data[r0 * d + c0];
                let a11 = self.data[r1 * d + c1];
                let avg = (a00 + a11) * (0.5 * p);
                self.data[r0 * d + c0] = a00 * keep + avg;
                self.data[r1 * d + c1] = a11 * keep + avg;
                self.data[r0 * d + c1] *= keep;
                self.data[r1 * d + c0] *= keep;
            }
        }
    }

    /// `(1−p)ρ + p·I/2^n`.
    pub(crate) fn global_depolarize(&mut self, p: f64) {
        let d = self.dim();
        let keep = 1.0 - p;
        for v in &mut self.data {
            *v *= keep;
        }
        let add = p / d as f64;
        for i in 0..d {
            self.data[i * d + i] += add;
        }
    }

    pub(crate) fn scaled_add(&mut self, other: &DensityMatrix, w: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * w;
        }
    }

    pub(crate) fn zeros(n: usize) -> DensityMatrix {
        let d = 1usize << n;
        DensityMatrix { n, data: vec![ZERO; d * d] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_invalid_matrices() {
        // trace 2
        let bad = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(DensityMatrix::from_matrix(1, bad).is_err());
        // negative eigenvalue: diag(1.5, -0.5)
        let neg = vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)];
        assert!(DensityMatrix::from_matrix(1, neg).is_err());
        // not Hermitian
        let nh = vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)];
        assert!(DensityMatrix::from_matrix(1, nh).is_err());
        let ok = vec![c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)];
        assert!(DensityMatrix::from_matrix(1, ok).is_ok());
    }

    #[test]
    fn tensor_and_partial_trace_invert() {
        let a = DensityMatrix::from_pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let ab = a.tensor(&b);
        assert_eq!(ab.num_qubits(), 3);
        let back = ab.partial_trace_high(2).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-15);
        ab.validate().unwrap();
    }

    #[test]
    fn reduced_from_pure_matches_partial_trace() {
        let psi: Vec<Complex64> = (0..8).map(|i| c(i as f64 + 1.0, 0.5 * i as f64)).collect();
        let full = DensityMatrix::from_pure(&psi).unwrap();
        let red = DensityMatrix::reduced_from_pure(&psi, 1).unwrap();
        assert!(red.max_abs_diff(&full.partial_trace_high(2).unwrap()) < 1e-14);
    }

    #[test]
    fn depolarizing_kernels_preserve_trace() {
        let psi = [c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)];
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.local_depolarize(1, 0.3);
        rho.global_depolarize(0.1);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        rho.validate().unwrap();
    }
}
