use mixed_magic::bell::*;
use mixed_magic::circuits::{prepare_product_state, random_density, ProductKind};
use mixed_magic::pauli::pauli_spectrum;
use mixed_magic::rng::rng_from_seed;
use mixed_magic::witness::moment_a;
use mixed_magic::DensityMatrix;

#[test]
fn butterfly_matches_direct_construction() {
    let mut rng = rng_from_seed(17);
    for n in 1..=3 {
        for _ in 0..4 {
            let rho = random_density(n, &mut rng);
            let fast = bell_outcome_distribution(&rho).unwrap();
            let direct = bell_outcome_distribution_direct(&rho).unwrap();
            for (a, b) in fast.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((fast.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(fast.iter().all(|&p| p >= 0.0));
        }
    }
}

#[test]
fn estimator_is_exactly_unbiased() {
    let mut rng = rng_from_seed(5);
    for n in 1..=2 {
        for _ in 0..5 {
            let rho = random_density(n, &mut rng);
            let a3 = moment_a(&pauli_spectrum(&rho).unwrap(), 3.0).unwrap();
            let dist = bell_outcome_distribution(&rho).unwrap();
            assert!((exact_group_expectation(&dist, n, 3) - a3).abs() < 1e-9);
            let a1 = rho.purity();
            assert!((exact_group_expectation(&dist, n, 1) - a1).abs() < 1e-12);
        }
    }
}

/// Reading the words as [all copy-1 bits, all copy-2 bits] breaks unbiasedness.
#[test]
fn blocked_bit_layout_is_biased() {
    let n = 2;
    let to_blocked = |u: usize| -> usize {
        let mut v = 0;
        for q in 0..n {
            v |= ((u >> (2 * q)) & 1) << q;
            v |= ((u >> (2 * q + 1)) & 1) << (n + q);
        }
        v
    };
    let mut rng = rng_from_seed(8);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let rho = random_density(n, &mut rng);
        let a3 = moment_a(&pauli_spectrum(&rho).unwrap(), 3.0).unwrap();
        let dist = bell_outcome_distribution(&rho).unwrap();
        let mut alt = vec![0.0; dist.len()];
        for (u, p) in dist.iter().enumerate() {
            alt[to_blocked(u)] = *p;
        }
        worst = worst.max((exact_group_expectation(&alt, n, 3) - a3).abs());
    }
    assert!(worst > 1e-3, "blocked layout bias {worst}");
}

#[test]
fn zero_state_samples() {
    let b = sample_bell(&DensityMatrix::zero_state(1), 1000, 3).unwrap();
    assert!(b.rounds().iter().all(|&r| r == 0 || r == 1));
    let zeros = b.rounds().iter().filter(|&&r| r == 0).count() as f64;
    assert!((zeros - 500.0).abs() < 5.0 * (250.0f64).sqrt());
    assert_eq!(b, sample_bell(&DensityMatrix::zero_state(1), 1000, 3).unwrap());
}

#[test]
fn empirical_distribution_close_in_total_variation() {
    let rho = random_density(2, &mut rng_from_seed(21));
    let exact = bell_outcome_distribution(&rho).unwrap();
    let b = sample_bell(&rho, 10_000, 4).unwrap();
    let mut freq = vec![0.0; exact.len()];
    for &r in b.rounds() {
        freq[r as usize] += 1e-4;
    }
    let tv: f64 = 0.5 * exact.iter().zip(&freq).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!(tv < 0.05, "tv = {tv}");
}

#[test]
fn t_state_estimate_within_hoeffding_band() {
    let rho = prepare_product_state(&[ProductKind::T]).unwrap();
    let groups = 100_000u64;
    let est = estimate_from_state(&rho, 3, groups, 12).unwrap();
    // two-sided Hoeffding band at δ = 1e-6
    let band = (2.0 * (2.0f64 / 1e-6).ln() / groups as f64).sqrt();
    assert!((est - 0.625).abs() < band, "{est}");
}

#[test]
fn pure_state_purity_estimate() {
    let rho = prepare_product_state(&[ProductKind::T, ProductKind::Plus]).unwrap();
    let est = estimate_from_state(&rho, 1, 2000, 1).unwrap();
    assert_eq!(est, 1.0);
}

#[test]
fn even_alpha_needs_opt_in() {
    let rho = DensityMatrix::zero_state(1);
    let b = sample_bell(&rho, 20, 1).unwrap();
    assert!(estimate_a(&b, 2).is_err());
    assert!(estimate_a_with(&b, 2, true).is_ok());
}
