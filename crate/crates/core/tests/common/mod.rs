//! Dense reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Dense open-chain TFIM `−Σ XX − h Σ Z`, qubit `i` on bit `i`.
pub fn tfim_matrix(n: usize, h: f64) -> DMatrix<f64> {
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for c in 0..d {
        for i in 0..n {
            let z = if (c >> i) & 1 == 0 { 1.0 } else { -1.0 };
            m[(c, c)] -= h * z;
        }
        for i in 0..n - 1 {
            let f = c ^ (0b11 << i);
            m[(f, c)] -= 1.0;
        }
    }
    m
}

/// Ground energy and state.
pub fn tfim_ground(n: usize, h: f64) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(tfim_matrix(n, h));
    let (i, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    (*e, eig.eigenvectors.column(i).iter().copied().collect())
}

/// Reduced density matrix on the low `ell` qubits of a real pure state.
pub fn reduce_low(psi: &[f64], ell: usize) -> DMatrix<f64> {
    let dl = 1usize << ell;
    let dh = psi.len() / dl;
    let m = DMatrix::from_fn(dl, dh, |lo, hi| psi[hi * dl + lo]);
    &m * m.transpose()
}

/// `tr(ρP)` for every Pauli string on `ell` qubits, by direct action on the
/// basis. Only the real part survives for a real symmetric `ρ`.
pub fn pauli_values_real(rho: &DMatrix<f64>, ell: usize) -> Vec<f64> {
    let d = 1usize << ell;
    (0..1usize << (2 * ell))
        .map(|p| {
            // P|c⟩ = phase |c ^ x⟩ with phase from Z and Y factors
            let mut re = 0.0;
            let mut im = 0.0;
            for c in 0..d {
                let mut x = 0;
                let (mut pr, mut pi) = (1.0f64, 0.0f64);
                for q in 0..ell {
                    let code = (p >> (2 * q)) & 3;
                    let bit = (c >> q) & 1;
                    let (fr, fi) = match code {
                        0 => (1.0, 0.0),
                        1 => {
                            x |= 1 << q;
                            (1.0, 0.0)
                        }
                        2 => (if bit == 0 { 1.0 } else { -1.0 }, 0.0),
                        _ => {
                            x |= 1 << q;
                            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                            (0.0, if bit == 0 { 1.0 } else { -1.0 })
                        }
                    };
                    let nr = pr * fr - pi * fi;
                    pi = pr * fi + pi * fr;
                    pr = nr;
                }
                // tr(ρP) = Σ_c ⟨c|ρ P|c⟩ = Σ_c ρ[c, c^x] · phase
                let r = rho[(c, c ^ x)];
                re += r * pr;
                im += r * pi;
            }
            assert!(im.abs() < 1e-9);
            re
        })
        .collect()
}

/// `2^{-ℓ} Σ_P |β_P|^{2α}`.
pub fn moment(values: &[f64], ell: usize, alpha: f64) -> f64 {
    values.iter().map(|v| v.abs().powf(2.0 * alpha)).sum::<f64>() / (1usize << ell) as f64
}

pub fn purity(rho: &DMatrix<f64>) -> f64 {
    (rho * rho).trace()
}
