use std::f64::consts::{LN_2, PI};

use mixed_magic::circuits::{
    apply_global_depolarizing, apply_local_depolarizing, apply_mixed_clifford_channel, build_doped_clifford_circuit,
    build_noisy_local_circuit, haar_state, random_clifford, random_density, random_stabilizer_state, simulate,
    Circuit,
};
use mixed_magic::pauli::{pauli_expectation, pauli_spectrum};
use mixed_magic::rng::rng_from_seed;
use mixed_magic::stabilizer::{
    best_pure_stabilizer_fidelity_with, enumerate_stabilizer_states, log_free_robustness_with,
};
use mixed_magic::witness::{filtered_witness, stabilizer_norms, witness_w};
use mixed_magic::{DensityMatrix, MagicError, PauliString};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

const ALPHAS: [f64; 6] = [0.5, 0.75, 1.0, 1.5, 2.0, 3.0];

fn state(n: usize, seed: u64) -> DensityMatrix {
    random_density(n, &mut rng_from_seed(seed))
}

fn filtered(spec: &mixed_magic::PauliSpectrum, alpha: f64) -> Option<f64> {
    match filtered_witness(spec, alpha) {
        Ok(v) => Some(v),
        Err(MagicError::FilteredUndefined) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn spectrum_round_trip(n in 1usize..=4, seed in any::<u64>()) {
        let rho = state(n, seed);
        let back = pauli_spectrum(&rho).unwrap().to_density();
        prop_assert!(back.max_abs_diff(&rho) <= 1e-9);
    }

    #[test]
    fn fast_transform_matches_per_string_traces(n in 1usize..=4, seed in any::<u64>()) {
        let rho = state(n, seed);
        let spec = pauli_spectrum(&rho).unwrap();
        for (i, &v) in spec.values().iter().enumerate() {
            let direct = pauli_expectation(&rho, &PauliString::from_index(n, i)).unwrap();
            prop_assert!((v - direct).abs() <= 1e-10);
        }
        let parseval = spec.values().iter().map(|b| b * b).sum::<f64>() / (1u64 << n) as f64;
        prop_assert!((parseval - rho.purity()).abs() <= 1e-10);
    }

    #[test]
    fn witness_is_clifford_invariant(n in 1usize..=4, seed in any::<u64>()) {
        let rho = state(n, seed);
        let moved = simulate(&random_clifford(n, seed ^ 0x9e37), &rho).unwrap();
        let (a, b) = (pauli_spectrum(&rho).unwrap(), pauli_spectrum(&moved).unwrap());
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            prop_assert!((witness_w(&a, alpha).unwrap() - witness_w(&b, alpha).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn witness_is_additive(n1 in 1usize..=2, n2 in 1usize..=2, seed in any::<u64>()) {
        let (r, s) = (state(n1, seed), state(n2, seed.wrapping_add(1)));
        let joint = pauli_spectrum(&r.tensor(&s)).unwrap();
        let (sr, ss) = (pauli_spectrum(&r).unwrap(), pauli_spectrum(&s).unwrap());
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let sum = witness_w(&sr, alpha).unwrap() + witness_w(&ss, alpha).unwrap();
            prop_assert!((witness_w(&joint, alpha).unwrap() - sum).abs() <= 1e-9);
        }
    }

    #[test]
    fn witness_bounds_and_hierarchy(n in 1usize..=4, seed in any::<u64>()) {
        let spec = pauli_spectrum(&state(n, seed)).unwrap();
        let s2 = spec.renyi2_entropy().unwrap();
        let w: Vec<f64> = ALPHAS.iter().map(|&a| witness_w(&spec, a).unwrap()).collect();
        for (&alpha, &v) in ALPHAS.iter().zip(&w) {
            prop_assert!(v >= -2.0 * s2 - 1e-9);
            if alpha > 1.0 {
                prop_assert!(v <= n as f64 * LN_2 - 2.0 * s2 + 1e-9);
            }
        }
        prop_assert!(w.windows(2).all(|p| p[0] >= p[1] - 1e-9), "{w:?}");
        let wf: Vec<Option<f64>> = ALPHAS.iter().map(|&a| filtered(&spec, a)).collect();
        if wf.iter().all(Option::is_some) {
            let wf: Vec<f64> = wf.into_iter().flatten().collect();
            prop_assert!(wf.windows(2).all(|p| p[0] >= p[1] - 1e-9), "{wf:?}");
        }
    }

    #[test]
    fn pure_state_upper_bound(n in 1usize..=4, seed in any::<u64>()) {
        let psi = haar_state(n, &mut rng_from_seed(seed));
        let spec = pauli_spectrum(&DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        for alpha in ALPHAS {
            prop_assert!(witness_w(&spec, alpha).unwrap() <= n as f64 * LN_2 + 1e-9);
        }
    }

    #[test]
    fn half_alpha_is_twice_log_stabilizer_norm(n in 1usize..=3, seed in any::<u64>()) {
        let spec = pauli_spectrum(&state(n, seed)).unwrap();
        let (d, df) = stabilizer_norms(&spec).unwrap();
        prop_assert!((witness_w(&spec, 0.5).unwrap() - 2.0 * d.ln()).abs() <= 1e-12);
        if let Some(wf) = filtered(&spec, 0.5) {
            prop_assert!((wf - 2.0 * df.ln()).abs() <= 1e-12);
        }
    }

    #[test]
    fn channels_preserve_trace_and_validity(n in 1usize..=3, seed in any::<u64>(), p in 0.0f64..=1.0) {
        let rho = state(n, seed);
        let outs = [
            apply_global_depolarizing(&rho, p).unwrap(),
            apply_local_depolarizing(&rho, (seed % n as u64) as usize, p).unwrap(),
            apply_mixed_clifford_channel(
                &rho,
                &[(p, random_clifford(n, seed)), (1.0 - p, random_clifford(n, seed ^ 1))],
            )
            .unwrap(),
        ];
        for out in &outs {
            prop_assert!((out.trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(out.validate().is_ok());
        }
    }

    #[test]
    fn global_depolarizing_commutes_with_cliffords(n in 1usize..=3, seed in any::<u64>(), p in 0.0f64..=1.0) {
        let rho = state(n, seed);
        let u = random_clifford(n, seed.rotate_left(7));
        let a = apply_global_depolarizing(&simulate(&u, &rho).unwrap(), p).unwrap();
        let b = simulate(&u, &apply_global_depolarizing(&rho, p).unwrap()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-10);
    }

    #[test]
    fn seeded_builds_are_reproducible(seed in any::<u64>()) {
        let a = build_noisy_local_circuit(3, 4, 0.01, seed).unwrap();
        prop_assert_eq!(&a, &build_noisy_local_circuit(3, 4, 0.01, seed).unwrap());
        let zero = DensityMatrix::zero_state(3);
        prop_assert_eq!(simulate(&a, &zero).unwrap(), simulate(&a, &zero).unwrap());
        prop_assert_eq!(build_doped_clifford_circuit(3, 2, seed), build_doped_clifford_circuit(3, 2, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn stabilizer_mixtures_have_no_witnessed_magic(n in 1usize..=3, seed in any::<u64>(), parts in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let weights: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        let mix: Vec<(f64, DensityMatrix)> = weights
            .iter()
            .map(|w| (w / total, DensityMatrix::from_pure(&random_stabilizer_state(n, &mut rng)).unwrap()))
            .collect();
        let spec = pauli_spectrum(&DensityMatrix::mixture(&mix).unwrap()).unwrap();
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            prop_assert!(witness_w(&spec, alpha).unwrap() <= 1e-9);
            if let Some(wf) = filtered(&spec, alpha) {
                prop_assert!(wf <= 1e-9);
            }
        }
    }

    /// One qubit: positive robustness exactly outside the octahedron `|x| + |y| + |z| ≤ 1`.
    #[test]
    fn single_qubit_robustness_matches_octahedron(
        theta in 0.0f64..PI,
        phi in 0.0f64..2.0 * PI,
        r in 0.0f64..=1.0,
    ) {
        let (x, y, z) = (r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos());
        let l1 = x.abs() + y.abs() + z.abs();
        prop_assume!((l1 - 1.0).abs() > 1e-3);
        let i = Complex64::new(0.0, 1.0);
        let rho = DensityMatrix::from_matrix(
            1,
            vec![(1.0 + z) / 2.0 + 0.0 * i, (x - i * y) / 2.0, (x + i * y) / 2.0, (1.0 - z) / 2.0 + 0.0 * i],
        )
        .unwrap();
        let set = enumerate_stabilizer_states(1).unwrap();
        let res = log_free_robustness_with(&rho, &set).unwrap();
        prop_assert!(res.residual <= 1e-7);
        prop_assert_eq!(res.lr > 1e-6, l1 > 1.0, "lr = {}, |r|₁ = {}", res.lr, l1);
    }

    #[test]
    fn fidelity_bounds_robustness_on_pure_states(n in 1usize..=2, seed in any::<u64>()) {
        let psi = haar_state(n, &mut rng_from_seed(seed));
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let set = enumerate_stabilizer_states(n).unwrap();
        let lr = log_free_robustness_with(&rho, &set).unwrap();
        prop_assert!(lr.residual <= 1e-7);
        let f = best_pure_stabilizer_fidelity_with(&rho, &set).unwrap();
        prop_assert!(-f.ln() <= lr.lr + 1e-7);
    }
}

#[test]
fn dephasing_towards_hadamard_raises_von_neumann_witness() {
    let (c, s) = ((PI / 16.0).cos(), (PI / 16.0).sin());
    let psi = [Complex64::new(c, 0.0), Complex64::new(s, 0.0)];
    let rho = DensityMatrix::from_pure(&psi).unwrap();
    let mut h = Circuit::new(1);
    h.h(0).unwrap();
    let mixed = apply_mixed_clifford_channel(&rho, &[(0.5, Circuit::new(1)), (0.5, h)]).unwrap();
    let before = witness_w(&pauli_spectrum(&rho).unwrap(), 1.0).unwrap();
    let after = witness_w(&pauli_spectrum(&mixed).unwrap(), 1.0).unwrap();
    assert!(after > before, "W₁ {before} → {after}");
}

/// For α ≤ 1 the upper bound `n ln 2 − 2S₂` does not hold for mixed states.
#[test]
fn upper_bound_fails_below_alpha_one_for_mixed_states() {
    let r = 0.5 / 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let rho = DensityMatrix::from_matrix(
        1,
        vec![(1.0 + r) / 2.0 * one, (r - i * r) / 2.0, (r + i * r) / 2.0, (1.0 - r) / 2.0 * one],
    )
    .unwrap();
    let spec = pauli_spectrum(&rho).unwrap();
    let s2 = spec.renyi2_entropy().unwrap();
    let excess = witness_w(&spec, 0.5).unwrap() - (LN_2 - 2.0 * s2);
    // M_1/2 = 2 ln((1 + √3·0.5)/(1 + 0.25))
    let expected = 2.0 * ((1.0 + 3f64.sqrt() * 0.5) / 1.25).ln() - LN_2;
    assert!((excess - expected).abs() < 1e-12 && excess > 0.1, "{excess}");
    assert!(witness_w(&spec, 2.0).unwrap() <= LN_2 - 2.0 * s2);
}
