mod common;

use common::*;
use mixed_magic::mps::*;
use mixed_magic::rng::rng_from_seed;
use rand::Rng;

fn w_alpha(a: f64, purity: f64, alpha: f64) -> f64 {
    a.ln() / (1.0 - alpha) + (1.0 - 2.0 * alpha) / (1.0 - alpha) * purity.ln()
}

#[test]
fn dmrg_matches_exact_diagonalization() {
    for h in [0.5, 1.0, 2.0] {
        let (e0, _) = tfim_ground(8, h);
        let r = dmrg_with(8, h, &DmrgConfig::new(16)).unwrap();
        assert!((r.energy - e0).abs() < 1e-8, "h={h}: {} vs {e0}", r.energy);
        assert!((tfim_energy(&r.state, h) - e0).abs() < 1e-8);
        assert!(r.state.canonical_error() < 1e-10);
        assert!((r.state.norm_squared() - 1.0).abs() < 1e-10);
        // unbroken ground state: no order parameter
        assert!(r.sx.iter().all(|x| x.abs() < 1e-6));
    }
}

#[test]
fn subsystem_quantities_match_dense() {
    let n = 8;
    let (_, gs) = tfim_ground(n, 1.0);
    let psi = dmrg_ground_state(n, 1.0, 16).unwrap();
    let reports = subsystem_witness_scan(&psi, 4, 2, &ContractionBudget::default());
    for (ell, rep) in (1..=4).zip(reports) {
        let rep = rep.unwrap();
        let rho = reduce_low(&gs, ell);
        let vals = pauli_values_real(&rho, ell);
        let p = purity(&rho);
        let a2 = moment(&vals, ell, 2.0);
        assert!((rep.purity - p).abs() < 1e-8, "ell {ell}");
        assert!((subsystem_purity(&psi, ell).unwrap() - p).abs() < 1e-8);
        assert!((rep.a_alpha - a2).abs() < 1e-8);
        if ell <= 3 {
            assert!((replica_moment(&psi, ell, 2).unwrap() - a2).abs() < 1e-8);
        }
        assert!((rep.w - w_alpha(a2, p, 2.0)).abs() < 1e-8);
    }
}

#[test]
fn full_chain_replica_moment() {
    let mut rng = rng_from_seed(5);
    for alpha in [2u32, 3] {
        let v: Vec<f64> = (0..32).map(|_| rng.random::<f64>() - 0.5).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / nrm).collect();
        let psi = MPSState::from_dense(&v, 4).unwrap();
        let rho = reduce_low(&v, 5);
        let want = moment(&pauli_values_real(&rho, 5), 5, alpha as f64);
        let got = replica_moment(&psi, 5, alpha).unwrap();
        assert!((got - want).abs() < 1e-9, "α={alpha}: {got} vs {want}");
    }
}

#[test]
fn product_states() {
    let t = (std::f64::consts::PI / 8.0).cos();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let stab = MPSState::product(&[[1.0, 0.0], [s, s], [0.0, 1.0], [s, -s]]).unwrap();
    for ell in 1..=4 {
        assert!((subsystem_purity(&stab, ell).unwrap() - 1.0).abs() < 1e-12);
        assert!((replica_moment(&stab, ell, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((replica_moment(&stab, ell, 3).unwrap() - 1.0).abs() < 1e-12);
    }
    // cos(π/8)|0⟩ + sin(π/8)|1⟩ is a Hadamard eigenstate: β_X = β_Z = 1/√2, so A₂ = (1 + 2·¼)/2 per site
    let magic = MPSState::product(&[[t, (1.0 - t * t).sqrt()]; 3]).unwrap();
    let per_site: f64 = (1.0 + 2.0 * 0.25) / 2.0;
    for ell in 1..=3 {
        let a = replica_moment(&magic, ell, 2).unwrap();
        assert!((a - per_site.powi(ell as i32)).abs() < 1e-12);
    }
}

#[test]
fn gauge_invariance() {
    let mut psi = dmrg_ground_state(8, 0.7, 8).unwrap();
    let before: Vec<_> = subsystem_witness_scan(&psi, 4, 2, &ContractionBudget::default())
        .into_iter()
        .map(Result::unwrap)
        .collect();
    psi.move_center(5);
    let after: Vec<_> = subsystem_witness_scan(&psi, 4, 2, &ContractionBudget::default())
        .into_iter()
        .map(Result::unwrap)
        .collect();
    for (a, b) in before.iter().zip(&after) {
        assert!((a.w - b.w).abs() < 1e-10);
        assert!((a.purity - b.purity).abs() < 1e-10);
    }
}

#[test]
fn right_boundary_by_reflection() {
    let n = 6;
    let (_, gs) = tfim_ground(n, 0.8);
    let psi = MPSState::from_dense(&gs, 64).unwrap().reflect();
    // reflected low block = original high block
    let dl = 1usize << 2;
    let dh = gs.len() / dl;
    let m = nalgebra::DMatrix::from_fn(dh, dl, |hi, lo| gs[hi * dl + lo]);
    let rho_high = &m * m.transpose();
    // two high qubits: ρ over bits 4,5
    let rho2 = reduce_low(&reflect_vec(&gs, n), 2);
    assert!((purity(&rho2) - subsystem_purity(&psi, 2).unwrap()).abs() < 1e-10);
    assert!((purity(&rho_high) - subsystem_purity(&psi, 4).unwrap()).abs() < 1e-10);
}

fn reflect_vec(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (i, x) in v.iter().enumerate() {
        let j = (0..n).fold(0, |acc, q| acc | (((i >> q) & 1) << (n - 1 - q)));
        out[j] = *x;
    }
    out
}

#[test]
fn checkpoint_reuse() {
    let psi = dmrg_ground_state(6, 1.0, 8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gs.mps");
    save_checkpoint(&psi, &path).unwrap();
    let back = load_checkpoint(&path).unwrap();
    assert_eq!(back, psi);
    std::fs::write(&path, b"nope").unwrap();
    assert!(load_checkpoint(&path).is_err());
}

#[test]
fn strong_field_is_nearly_product() {
    // first-order perturbation: the pair flip across the cut has amplitude
    // 1/(4h), so S₂ ≈ 2·(4h)⁻²
    let h = 20.0;
    let r = dmrg_with(10, h, &DmrgConfig::new(8)).unwrap();
    assert!(r.sz.iter().all(|&z| z > 0.999));
    let want = 2.0 / (16.0 * h * h);
    for ell in 2..9 {
        let s2 = -subsystem_purity(&r.state, ell).unwrap().ln();
        assert!((s2 / want - 1.0).abs() < 0.01, "ell {ell}: {s2}");
    }
}
