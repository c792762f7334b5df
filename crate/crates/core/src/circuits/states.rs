use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{clifford::random_clifford_with, simulate_pure};
use crate::density::{check_dense, DensityMatrix};
use crate::error::Result;
use crate::rng::{rng_from_seed, MagicRng};

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn haar_state(n: usize, rng: &mut MagicRng) -> Vec<Complex64> {
    let d = 1usize << n;
    let mut psi: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut psi {
        *a /= norm;
    }
    psi
}

/// `tr_m |ψ⟩⟨ψ|` for Haar `ψ` on `n + m` qubits; the traced qubits are the high ones.
pub fn ghse_sample(n: usize, m: usize, seed: u64) -> Result<DensityMatrix> {
    check_dense(n + m, "GHSE sample")?;
    let psi = haar_state(n + m, &mut rng_from_seed(seed));
    DensityMatrix::reduced_from_pure(&psi, n)
}

/// Random mixed state of random rank drawn from the induced Haar measure.
pub fn random_density(n: usize, rng: &mut MagicRng) -> DensityMatrix {
    let m = rng.random_range(0..=n + 1);
    let psi = haar_state(n + m, rng);
    DensityMatrix::reduced_from_pure(&psi, n).expect("valid reduction")
}

/// Uniformly random pure stabilizer state.
pub fn random_stabilizer_state(n: usize, rng: &mut MagicRng) -> Vec<Complex64> {
    let mut zero = vec![Complex64::new(0.0, 0.0); 1 << n];
    zero[0] = Complex64::new(1.0, 0.0);
    simulate_pure(&random_clifford_with(n, rng), &zero).expect("Clifford circuit is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghse_without_trace_is_pure() {
        let rho = ghse_sample(3, 0, 1).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghse_mean_purity() {
        let (n, m) = (2usize, 2usize);
        let samples: Vec<f64> = (0..500).map(|s| ghse_sample(n, m, s).unwrap().purity()).collect();
        let mean = samples.iter().sum::<f64>() / 500.0;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 499.0;
        let se = (var / 500.0).sqrt();
        let (dn, dm) = (4.0, 4.0);
        let expected = (dn + dm) / (dn * dm + 1.0);
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = rng_from_seed(2);
        for n in 1..4 {
            random_density(n, &mut rng).validate().unwrap();
        }
    }
}
