//! Pauli strings, Pauli spectra and the fast density-matrix ↔ spectrum transform.
//!
//! Index convention: qubit `q` (0-based) occupies the two bits `2q, 2q+1` of the
//! Pauli index, with code `0 = I`, `1 = X`, `2 = Z`, `3 = Y`. Bit `2q` is the
//! x-component and bit `2q+1` the z-component, so `Y` is exactly `x & z`.
//! Qubit `q` is bit `q` of a computational basis index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::density::{dense_limit, DensityMatrix};
use crate::error::{MagicError, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Z,
    Y,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y];

    pub fn code(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Z => 2,
            Pauli::Y => 3,
        }
    }

    pub fn from_code(code: u8) -> Pauli {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Z => 'Z',
            Pauli::Y => 'Y',
        }
    }
}

/// An `n`-qubit Pauli string with phase `+1`, stored as x/z bit words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub const MAX_QUBITS: usize = 32;

    pub fn identity(n: usize) -> Self {
        assert!(n <= Self::MAX_QUBITS);
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_bits(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= Self::MAX_QUBITS);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        PauliString {
            n,
            x: x & mask,
            z: z & mask,
        }
    }

    pub fn from_paulis(ops: &[Pauli]) -> Self {
        let mut s = PauliString::identity(ops.len());
        for (q, &p) in ops.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Decode a Pauli index in `[0, 4^n)`.
    pub fn from_index(n: usize, index: usize) -> Self {
        assert!(n <= Self::MAX_QUBITS);
        let (mut x, mut z) = (0u64, 0u64);
        for q in 0..n {
            let code = (index >> (2 * q)) & 3;
            x |= ((code & 1) as u64) << q;
            z |= ((code >> 1) as u64) << q;
        }
        PauliString { n, x, z }
    }

    pub fn index(&self) -> usize {
        (0..self.n).fold(0usize, |acc, q| acc | ((self.get(q).code() as usize) << (2 * q)))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        let code = ((self.x >> q) & 1) | (((self.z >> q) & 1) << 1);
        Pauli::from_code(code as u8)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let c = p.code() as u64;
        self.x = (self.x & !(1 << q)) | ((c & 1) << q);
        self.z = (self.z & !(1 << q)) | ((c >> 1) << q);
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Symplectic form: `true` when the two strings anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }

    /// `P|c⟩ = phase · |c ⊕ x⟩`.
    pub fn act_on_basis(&self, c: usize) -> (Complex64, usize) {
        let c64 = c as u64;
        let sign = if (c64 & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let phase = match self.y_count() % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (phase, (c64 ^ self.x) as usize)
    }

    /// Tensor product with `self` on the low qubits.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        PauliString::from_bits(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = MagicError;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Z' => Ok(Pauli::Z),
                'Y' => Ok(Pauli::Y),
                other => Err(MagicError::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("unexpected Pauli label {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.len() > Self::MAX_QUBITS {
            return Err(MagicError::Capacity {
                what: "Pauli string length",
                requested: ops.len(),
                limit: Self::MAX_QUBITS,
            });
        }
        Ok(PauliString::from_paulis(&ops))
    }
}

/// `tr(ρP)` by direct summation over the `2^n` nonzero entries of `P`.
pub fn pauli_expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    if rho.num_qubits() != p.num_qubits() {
        return Err(MagicError::DimensionMismatch {
            expected: rho.num_qubits(),
            found: p.num_qubits(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..rho.dim() {
        let (phase, c2) = p.act_on_basis(c);
        acc += phase * rho.get(c, c2);
    }
    if acc.im.abs() > 1e-10 {
        return Err(MagicError::InvalidState(format!(
            "Pauli expectation has imaginary residue {:e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Spread the bits of `v` to the even positions of the result.
fn spread_bits(v: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, q| acc | (((v >> q) & 1) << (2 * q)))
}

/// All `4^n` expectations `tr(ρP)`, ordered by Pauli index.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n: usize,
    values: Vec<f64>,
}

impl PauliSpectrum {
    /// Wrap raw values; checks length and the spectrum invariants.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << (2 * n) {
            return Err(MagicError::domain(format!(
                "spectrum for {n} qubits needs {} values, got {}",
                1usize << (2 * n),
                values.len()
            )));
        }
        let spec = PauliSpectrum { n, values };
        spec.check()?;
        Ok(spec)
    }

    pub(crate) fn from_raw(n: usize, values: Vec<f64>) -> Self {
        PauliSpectrum { n, values }
    }

    fn check(&self) -> Result<()> {
        if (self.values[0] - 1.0).abs() > 1e-10 {
            return Err(MagicError::InvalidState(format!(
                "identity expectation {} differs from 1",
                self.values[0]
            )));
        }
        if let Some(v) = self.values.iter().find(|v| v.abs() > 1.0 + 1e-10) {
            return Err(MagicError::InvalidState(format!(
                "Pauli expectation {v} exceeds 1 in magnitude"
            )));
        }
        let purity = self.purity();
        if !(purity > 0.0 && purity <= 1.0 + 1e-10) {
            return Err(MagicError::InvalidState(format!("purity {purity} out of (0, 1]")));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.values[p.index()]
    }

    /// Sum over all Paulis of `|β_P|^{2α}`.
    pub fn power_sum(&self, alpha: f64) -> f64 {
        let e = 2.0 * alpha;
        if e == 1.0 {
            self.values.iter().map(|v| v.abs()).sum()
        } else if e == 2.0 {
            self.values.iter().map(|v| v * v).sum()
        } else {
            self.values.iter().map(|v| v.abs().powf(e)).sum()
        }
    }

    /// `tr ρ² = 2^{-n} Σ β_P²`.
    pub fn purity(&self) -> f64 {
        self.power_sum(1.0) / (1u64 << self.n) as f64
    }

    /// `S₂ = -ln tr ρ²`.
    pub fn renyi2_entropy(&self) -> Result<f64> {
        let p = self.purity();
        if p <= 0.0 || !p.is_finite() {
            return Err(MagicError::InvalidState(format!("nonpositive purity {p}")));
        }
        Ok(-p.ln())
    }

    /// Reconstruct `ρ = 2^{-n} Σ β_P P` with the inverse butterfly.
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.n;
        let d = 1usize << n;
        let mut m: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for q in 0..n {
            let stride = 1usize << (2 * q);
            for block in (0..m.len()).step_by(4 * stride) {
                for j in block..block + stride {
                    let b_i = m[j];
                    let b_x = m[j + stride];
                    let b_z = m[j + 2 * stride];
                    let b_y = m[j + 3 * stride];
                    let iy = Complex64::new(-b_y.im, b_y.re);
                    m[j] = (b_i + b_z) * 0.5;
                    m[j + stride] = (b_x - iy) * 0.5;
                    m[j + 2 * stride] = (b_x + iy) * 0.5;
                    m[j + 3 * stride] = (b_i - b_z) * 0.5;
                }
            }
        }
        let spread: Vec<usize> = (0..d).map(|v| spread_bits(v, n)).collect();
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = m[spread[c] | (spread[r] << 1)];
            }
        }
        DensityMatrix::from_raw(n, data)
    }
}

/// Full Pauli spectrum through a per-qubit 4-way butterfly, `O(n·4^n)`.
pub fn pauli_spectrum(rho: &DensityMatrix) -> Result<PauliSpectrum> {
    let n = rho.num_qubits();
    let limit = dense_limit();
    if n > limit {
        return Err(MagicError::Capacity {
            what: "dense Pauli spectrum qubits",
            requested: n,
            limit,
        });
    }
    let d = 1usize << n;
    let spread: Vec<usize> = (0..d).map(|v| spread_bits(v, n)).collect();
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    let data = rho.data();
    for r in 0..d {
        let row = spread[r] << 1;
        for c in 0..d {
            m[spread[c] | row] = data[r * d + c];
        }
    }
    for q in 0..n {
        let stride = 1usize << (2 * q);
        for block in (0..m.len()).step_by(4 * stride) {
            for j in block..block + stride {
                let a00 = m[j];
                let a01 = m[j + stride];
                let a10 = m[j + 2 * stride];
                let a11 = m[j + 3 * stride];
                let diff = a01 - a10;
                m[j] = a00 + a11;
                m[j + stride] = a01 + a10;
                m[j + 2 * stride] = a00 - a11;
                m[j + 3 * stride] = Complex64::new(-diff.im, diff.re);
            }
        }
    }
    let residue = m.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
    if residue > 1e-9 {
        return Err(MagicError::InvalidState(format!(
            "spectrum has imaginary residue {residue:e}; input not Hermitian"
        )));
    }
    Ok(PauliSpectrum::from_raw(n, m.into_iter().map(|v| v.re).collect()))
}

/// `tr ρ²` from a spectrum.
pub fn purity(spec: &PauliSpectrum) -> f64 {
    spec.purity()
}

/// `S₂ = -ln tr ρ²` from a spectrum.
pub fn renyi2_entropy(spec: &PauliSpectrum) -> Result<f64> {
    spec.renyi2_entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn t_state() -> DensityMatrix {
        let ph = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        DensityMatrix::from_pure(&[Complex64::new(FRAC_1_SQRT_2, 0.0), ph * FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn index_round_trip_and_order() {
        for idx in 0..256 {
            let p = PauliString::from_index(4, idx);
            assert_eq!(p.index(), idx);
        }
        let p: PauliString = "XZYI".parse().unwrap();
        assert_eq!(p.index(), 1 | (2 << 2) | (3 << 4));
        assert_eq!(p.to_string(), "XZYI");
        assert_eq!(p.y_count(), 1);
        assert_eq!(p.weight(), 3);
    }

    #[test]
    fn bad_label_reports_column() {
        let err = "XIQ".parse::<PauliString>().unwrap_err();
        assert!(matches!(err, MagicError::Parse { column: 3, .. }));
    }

    #[test]
    fn expectation_examples() {
        let zero = DensityMatrix::zero_state(1);
        assert_eq!(pauli_expectation(&zero, &"Z".parse().unwrap()).unwrap(), 1.0);
        let t = t_state();
        let x = pauli_expectation(&t, &"X".parse().unwrap()).unwrap();
        assert!((x - FRAC_1_SQRT_2).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert_eq!(pauli_expectation(&mixed, &"X".parse().unwrap()).unwrap(), 0.0);
        assert!(matches!(
            pauli_expectation(&mixed, &"XX".parse().unwrap()),
            Err(MagicError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_examples() {
        let s = pauli_spectrum(&DensityMatrix::zero_state(1)).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0, 1.0, 0.0]);

        let s = pauli_spectrum(&t_state()).unwrap();
        let expect = [1.0, FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2];
        for (a, b) in s.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }

        let s = pauli_spectrum(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-15);
        assert!(s.values()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn purity_and_entropy_examples() {
        let s = pauli_spectrum(&t_state()).unwrap();
        assert!((purity(&s) - 1.0).abs() < 1e-12);
        assert!(renyi2_entropy(&s).unwrap().abs() < 1e-12);

        let mm = pauli_spectrum(&DensityMatrix::maximally_mixed(3)).unwrap();
        assert!((purity(&mm) - 0.125).abs() < 1e-15);
        assert!((renyi2_entropy(&mm).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);

        // (1-p)|T><T| + p I/2 at p = 0.2
        let noisy = PauliSpectrum::new(1, vec![1.0, 0.8 * FRAC_1_SQRT_2, 0.0, -0.8 * FRAC_1_SQRT_2]).unwrap();
        assert!((purity(&noisy) - 0.82).abs() < 1e-12);
        assert!((renyi2_entropy(&noisy).unwrap() - 0.198_450_938_7).abs() < 1e-9);
    }

    #[test]
    fn spectrum_rejects_bad_values() {
        assert!(PauliSpectrum::new(1, vec![0.5, 0.0, 0.0, 0.0]).is_err());
        assert!(PauliSpectrum::new(1, vec![1.0, 1.5, 0.0, 0.0]).is_err());
        assert!(PauliSpectrum::new(1, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn capacity_error_above_dense_limit() {
        let rho = DensityMatrix::maximally_mixed(2);
        let err = crate::density::with_dense_limit(1, || pauli_spectrum(&rho).unwrap_err());
        assert!(matches!(err, MagicError::Capacity { .. }));
    }
}
