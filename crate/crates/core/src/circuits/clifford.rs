//! Uniform sampling of the n-qubit Clifford group.
//!
//! For k = 0..n a uniformly random anticommuting pair (P, Q) supported on
//! qubits k..n fixes the images of X_k and Z_k. A short sweep of H, S and
//! CNOT maps (P, Q) to (X_k, Z_k); its inverse is the k-th factor. A uniform
//! Pauli layer in front randomizes the signs.

use rand::Rng;

use super::{Circuit, Gate};
use crate::rng::{rng_from_seed, MagicRng};

/// Pauli string as (x, z) bit masks, sign ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Sym {
    x: u64,
    z: u64,
}

impl Sym {
    fn anticommutes(&self, o: &Sym) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 1
    }

    fn conjugate(&mut self, g: &Gate) {
        match *g {
            Gate::H(q) => {
                let (xb, zb) = ((self.x >> q) & 1, (self.z >> q) & 1);
                self.x = (self.x & !(1 << q)) | (zb << q);
                self.z = (self.z & !(1 << q)) | (xb << q);
            }
            Gate::S(q) => self.z ^= self.x & (1 << q),
            Gate::Cnot(c, t) => {
                self.x ^= ((self.x >> c) & 1) << t;
                self.z ^= ((self.z >> t) & 1) << c;
            }
            _ => unreachable!("sweep uses H, S, CNOT only"),
        }
    }
}

struct Sweep {
    p: Sym,
    q: Sym,
    gates: Vec<Gate>,
}

impl Sweep {
    fn apply(&mut self, g: Gate) {
        self.p.conjugate(&g);
        self.q.conjugate(&g);
        self.gates.push(g);
    }

    /// Remove the Z components of P (or Q) on the given qubits: S on Y, H on Z.
    fn clear_z(&mut self, on_p: bool, qubits: impl Iterator<Item = usize>) {
        for j in qubits {
            let s = if on_p { self.p } else { self.q };
            let (xb, zb) = ((s.x >> j) & 1, (s.z >> j) & 1);
            match (xb, zb) {
                (1, 1) => self.apply(Gate::S(j)),
                (0, 1) => self.apply(Gate::H(j)),
                _ => {}
            }
        }
    }

    /// Fold an X-only support down to its first qubit with CNOTs.
    fn reduce(&mut self, mut support: Vec<usize>) -> Option<usize> {
        while support.len() > 1 {
            let mut next = Vec::with_capacity(support.len().div_ceil(2));
            for pair in support.chunks(2) {
                if let [a, b] = *pair {
                    self.apply(Gate::Cnot(a, b));
                }
                next.push(pair[0]);
            }
            support = next;
        }
        support.first().copied()
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Gates mapping `p → X_k` and `q → Z_k` under conjugation.
fn sweep_to_standard(n: usize, k: usize, p: Sym, q: Sym) -> Vec<Gate> {
    let mut sw = Sweep { p, q, gates: Vec::new() };
    sw.clear_z(true, k..n);
    let j0 = sw.reduce(bits(sw.p.x)).expect("P is not the identity");
    if j0 != k {
        sw.apply(Gate::Cnot(j0, k));
        sw.apply(Gate::Cnot(k, j0));
    }
    debug_assert_eq!(sw.p, Sym { x: 1 << k, z: 0 });
    if sw.q != (Sym { x: 0, z: 1 << k }) {
        sw.apply(Gate::H(k));
        sw.clear_z(false, k + 1..n);
        if (sw.q.z >> k) & 1 == 1 {
            sw.apply(Gate::S(k));
        }
        let rest: Vec<usize> = bits(sw.q.x).into_iter().filter(|&j| j > k).collect();
        if let Some(j1) = sw.reduce(rest) {
            sw.apply(Gate::Cnot(k, j1));
        }
        sw.apply(Gate::H(k));
    }
    debug_assert_eq!(sw.p, Sym { x: 1 << k, z: 0 });
    debug_assert_eq!(sw.q, Sym { x: 0, z: 1 << k });
    sw.gates
}

fn random_pair(n: usize, k: usize, rng: &mut MagicRng) -> (Sym, Sym) {
    let m = n - k;
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let draw = |rng: &mut MagicRng| Sym {
        x: (rng.random::<u64>() & mask) << k,
        z: (rng.random::<u64>() & mask) << k,
    };
    loop {
        let p = draw(rng);
        if p.x == 0 && p.z == 0 {
            continue;
        }
        let q = draw(rng);
        if p.anticommutes(&q) {
            return (p, q);
        }
    }
}

fn push_inverse(circ: &mut Circuit, gates: &[Gate]) {
    for g in gates.iter().rev() {
        match *g {
            Gate::S(q) => {
                for _ in 0..3 {
                    circ.gate(Gate::S(q)).expect("valid qubit");
                }
            }
            g => {
                circ.gate(g).expect("valid gate");
            }
        }
    }
}

/// Uniformly random Clifford on `n` qubits as an H/S/CNOT circuit.
pub fn random_clifford(n: usize, seed: u64) -> Circuit {
    random_clifford_with(n, &mut rng_from_seed(seed))
}

pub fn random_clifford_with(n: usize, rng: &mut MagicRng) -> Circuit {
    assert!((1..=64).contains(&n), "random_clifford needs 1 ≤ n ≤ 64");
    let mut circ = Circuit::new(n);
    // random Pauli layer, X = HSSH and Z = SS
    for q in 0..n {
        let code: u8 = rng.random_range(0..4);
        if code & 1 == 1 {
            for g in [Gate::H(q), Gate::S(q), Gate::S(q), Gate::H(q)] {
                circ.gate(g).expect("valid qubit");
            }
        }
        if code & 2 == 2 {
            circ.gate(Gate::S(q)).expect("valid qubit");
            circ.gate(Gate::S(q)).expect("valid qubit");
        }
    }
    let sweeps: Vec<Vec<Gate>> = (0..n)
        .map(|k| {
            let (p, q) = random_pair(n, k, rng);
            sweep_to_standard(n, k, p, q)
        })
        .collect();
    // U = C_0 C_1 ... C_{n-1}, so C_{n-1} acts first
    for gates in sweeps.iter().rev() {
        push_inverse(&mut circ, gates);
    }
    circ
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::simulate_pure;
    use num_complex::Complex64;
    use std::collections::HashMap;

    fn zero(n: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn sweep_maps_pair_to_standard() {
        let mut rng = rng_from_seed(3);
        for n in 1..6 {
            for k in 0..n {
                for _ in 0..50 {
                    let (p, q) = random_pair(n, k, &mut rng);
                    let gates = sweep_to_standard(n, k, p, q);
                    let (mut p2, mut q2) = (p, q);
                    for g in &gates {
                        p2.conjugate(g);
                        q2.conjugate(g);
                    }
                    assert_eq!(p2, Sym { x: 1 << k, z: 0 });
                    assert_eq!(q2, Sym { x: 0, z: 1 << k });
                }
            }
        }
    }

    #[test]
    fn only_h_s_cnot() {
        let c = random_clifford(5, 11);
        assert!(c
            .ops()
            .iter()
            .all(|op| matches!(op, super::super::Op::Gate(Gate::H(_) | Gate::S(_) | Gate::Cnot(..)))));
    }

    /// Label a stabilizer vector by its amplitudes up to global phase.
    fn label(psi: &[Complex64]) -> Vec<(i64, i64)> {
        let pivot = psi.iter().find(|a| a.norm() > 1e-9).unwrap();
        let ph = pivot.conj() / pivot.norm();
        psi.iter()
            .map(|a| {
                let v = a * ph * 1e6;
                (v.re.round() as i64, v.im.round() as i64)
            })
            .collect()
    }

    fn chi_square(n: usize, samples: usize, expected_states: usize) -> f64 {
        let mut counts: HashMap<Vec<(i64, i64)>, usize> = HashMap::new();
        for seed in 0..samples as u64 {
            let psi = simulate_pure(&random_clifford(n, seed), &zero(n)).unwrap();
            *counts.entry(label(&psi)).or_default() += 1;
        }
        assert_eq!(counts.len(), expected_states);
        let e = samples as f64 / expected_states as f64;
        counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum()
    }

    #[test]
    fn single_qubit_marginal_is_uniform() {
        // 5 degrees of freedom; 99.9% quantile ≈ 20.5
        let chi2 = chi_square(1, 10_000, 6);
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn two_qubit_orbit_is_uniform() {
        // 59 degrees of freedom; 99.9% quantile ≈ 98.3
        let chi2 = chi_square(2, 12_000, 60);
        assert!(chi2 < 98.3, "chi2 = {chi2}");
    }
}
