use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_probability, clifford::random_clifford_with, Circuit, Gate};
use crate::density::DensityMatrix;
use crate::error::{MagicError, Result};
use crate::rng::stream;

/// Single-qubit factor of a product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductKind {
    Zero,
    Plus,
    /// `(|0⟩ + e^{−iπ/4}|1⟩)/√2`
    T,
    /// `cos(θ/2)|0⟩ + e^{−iπ/4} sin(θ/2)|1⟩` with `θ = arccos(1/√3)`
    R,
}

impl ProductKind {
    pub fn amplitudes(self) -> [Complex64; 2] {
        let ph = Complex64::from_polar(1.0, -FRAC_PI_4);
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            ProductKind::Zero => [r(1.0), r(0.0)],
            ProductKind::Plus => [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
            ProductKind::T => [r(FRAC_1_SQRT_2), ph * FRAC_1_SQRT_2],
            ProductKind::R => {
                let theta = (1.0 / 3f64.sqrt()).acos();
                [r((theta / 2.0).cos()), ph * (theta / 2.0).sin()]
            }
        }
    }
}

impl FromStr for ProductKind {
    type Err = MagicError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(ProductKind::Zero),
            "plus" | "+" => Ok(ProductKind::Plus),
            "t" => Ok(ProductKind::T),
            "r" => Ok(ProductKind::R),
            other => Err(MagicError::domain(format!("unknown product state {other:?}"))),
        }
    }
}

/// State vector of `kinds[0] ⊗ … `, with `kinds[q]` on qubit `q`.
pub fn product_state_vector(kinds: &[ProductKind]) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    for (q, k) in kinds.iter().enumerate() {
        let amp = k.amplitudes();
        let mut next = vec![Complex64::new(0.0, 0.0); psi.len() * 2];
        for (b, a) in psi.iter().enumerate() {
            next[b] = a * amp[0];
            next[b | (1 << q)] = a * amp[1];
        }
        psi = next;
    }
    psi
}

pub fn prepare_product_state(kinds: &[ProductKind]) -> Result<DensityMatrix> {
    if kinds.is_empty() {
        return Err(MagicError::domain("product state needs at least one qubit"));
    }
    crate::density::check_dense(kinds.len(), "product state")?;
    DensityMatrix::from_pure(&product_state_vector(kinds))
}

const DOPED_TAG: u64 = 0xD0;
const LAYER_TAG: u64 = 0x1A;

/// `U⁽⁰⁾, T, U⁽¹⁾, …, T, U⁽ⁿᵗ⁾` with independent uniform Cliffords and
/// every T on qubit 0.
pub fn build_doped_clifford_circuit(n: usize, n_t: usize, seed: u64) -> Circuit {
    let mut circ = Circuit::new(n);
    for k in 0..=n_t {
        if k > 0 {
            circ.t(0).expect("qubit 0 exists");
        }
        let u = random_clifford_with(n, &mut stream(seed, &[DOPED_TAG, k as u64]));
        circ.extend(&u).expect("same width");
    }
    circ
}

/// One layer of the noisy local random circuit.
///
/// RY then RZ on every qubit with angles uniform in `(0, 2π]`, then a
/// nearest-neighbour CNOT chain (control on the lower index) starting at
/// qubit `layer % 2`. Each gate is followed by depolarizing noise of
/// strength `p` on the qubits it touched. Angles depend only on
/// `(seed, layer)`, so a depth-`d` circuit is a prefix of a depth-`d+1` one.
pub fn noisy_local_layer(n: usize, layer: usize, p: f64, seed: u64) -> Result<Circuit> {
    check_probability(p)?;
    let mut rng = stream(seed, &[LAYER_TAG, layer as u64]);
    let mut angles = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        angles.push(2.0 * PI * (1.0 - rng.random::<f64>()));
    }
    let mut circ = Circuit::new(n);
    let noisy = |c: &mut Circuit, g: Gate| -> Result<()> {
        c.gate(g)?;
        if p > 0.0 {
            for q in g.qubits() {
                c.depolarize(q, p)?;
            }
        }
        Ok(())
    };
    for q in 0..n {
        noisy(&mut circ, Gate::Ry(q, angles[2 * q]))?;
        noisy(&mut circ, Gate::Rz(q, angles[2 * q + 1]))?;
    }
    let mut j = layer % 2;
    while j + 1 < n {
        noisy(&mut circ, Gate::Cnot(j, j + 1))?;
        j += 2;
    }
    Ok(circ)
}

pub fn build_noisy_local_circuit(n: usize, depth: usize, p: f64, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(MagicError::domain("noisy local circuits need n ≥ 2"));
    }
    check_probability(p)?;
    let mut circ = Circuit::new(n);
    for layer in 0..depth {
        circ.extend(&noisy_local_layer(n, layer, p, seed)?)?;
    }
    Ok(circ)
}
