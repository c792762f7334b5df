//! Gates, noise channels, and circuits acting on dense density matrices.

mod builders;
mod clifford;
mod states;
pub mod text;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{check_dense, DensityMatrix};
use crate::error::{MagicError, Result};

pub use builders::{
    build_doped_clifford_circuit, build_noisy_local_circuit, noisy_local_layer, prepare_product_state,
    product_state_vector, ProductKind,
};
pub use clifford::{random_clifford, random_clifford_with};
pub use states::{ghse_sample, haar_state, random_density, random_stabilizer_state};

/// A single unitary gate. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// `diag(1, e^{−iπ/4})`, which takes `|+⟩` to the T state.
    T(usize),
    Cnot(usize, usize),
    /// `exp(−iθY/2)`.
    Ry(usize, f64),
    /// `exp(−iθZ/2)`.
    Rz(usize, f64),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot(c, t) => vec![c, t],
            Gate::H(q)
            | Gate::S(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::T(q)
            | Gate::Ry(q, _)
            | Gate::Rz(q, _) => vec![q],
        }
    }

    pub fn is_clifford(&self) -> bool {
        matches!(
            self,
            Gate::H(_) | Gate::S(_) | Gate::X(_) | Gate::Y(_) | Gate::Z(_) | Gate::Cnot(..)
        )
    }

    /// 2×2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = FRAC_1_SQRT_2;
        Some(match *self {
            Gate::H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            Gate::S(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
            Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Gate::Y(_) => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            Gate::Z(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            Gate::T(_) => [
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, -FRAC_PI_4)],
            ],
            Gate::Ry(_, th) => {
                let (s, co) = (th / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rz(_, th) => [
                [Complex64::from_polar(1.0, -th / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, th / 2.0)],
            ],
            Gate::Cnot(..) => return None,
        })
    }

    fn apply(&self, rho: &mut DensityMatrix) {
        match *self {
            Gate::Cnot(c, t) => rho.apply_cnot(c, t),
            Gate::S(q) => rho.apply_phase(q, Complex64::new(0.0, 1.0)),
            Gate::T(q) => rho.apply_phase(q, Complex64::from_polar(1.0, -FRAC_PI_4)),
            Gate::Z(q) => rho.apply_phase(q, Complex64::new(-1.0, 0.0)),
            g => rho.apply_1q(g.qubits()[0], g.matrix().expect("single-qubit gate")),
        }
    }

    fn apply_vector(&self, psi: &mut [Complex64]) {
        match *self {
            Gate::Cnot(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for b in 0..psi.len() {
                    if b & cb != 0 && b & tb == 0 {
                        psi.swap(b, b | tb);
                    }
                }
            }
            g => {
                let q = g.qubits()[0];
                let u = g.matrix().expect("single-qubit gate");
                let bit = 1usize << q;
                for b0 in 0..psi.len() {
                    if b0 & bit == 0 {
                        let (a, b) = (psi[b0], psi[b0 | bit]);
                        psi[b0] = u[0][0] * a + u[0][1] * b;
                        psi[b0 | bit] = u[1][0] * a + u[1][1] * b;
                    }
                }
            }
        }
    }
}

/// A noise channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    /// `(1−p)ρ + p I/2ⁿ`.
    GlobalDepolarize(f64),
    /// `(1−p)ρ + p·tr_q(ρ) ⊗ I/2` on one qubit.
    LocalDepolarize { qubit: usize, p: f64 },
    /// `Σ pᵢ UᵢρUᵢ†` over Clifford-only branch circuits.
    MixedClifford(Vec<(f64, Circuit)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Gate(Gate),
    Channel(Channel),
}

/// Noise model applied by the experiment builders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseSpec {
    None,
    Global(f64),
    PerGateLocal(f64),
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Global(p) | NoiseSpec::PerGateLocal(p) => check_probability(p),
        }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MagicError::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Ordered program of gates and channels on `n` qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, ops: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(MagicError::InvalidOp(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    /// Append an op after validating indices and probabilities.
    pub fn push(&mut self, op: Op) -> Result<&mut Self> {
        match &op {
            Op::Gate(g) => {
                for q in g.qubits() {
                    self.check_qubit(q)?;
                }
                if let Gate::Cnot(c, t) = g {
                    if c == t {
                        return Err(MagicError::InvalidOp(format!(
                            "CNOT control and target coincide on qubit {c}"
                        )));
                    }
                }
            }
            Op::Channel(Channel::GlobalDepolarize(p)) => check_probability(*p)?,
            Op::Channel(Channel::LocalDepolarize { qubit, p }) => {
                self.check_qubit(*qubit)?;
                check_probability(*p)?;
            }
            Op::Channel(Channel::MixedClifford(branches)) => self.check_branches(branches)?,
        }
        self.ops.push(op);
        Ok(self)
    }

    fn check_branches(&self, branches: &[(f64, Circuit)]) -> Result<()> {
        if branches.is_empty() {
            return Err(MagicError::InvalidOp("mixed Clifford channel without branches".into()));
        }
        let mut total = 0.0;
        for (p, c) in branches {
            check_probability(*p)?;
            total += p;
            if c.n != self.n {
                return Err(MagicError::DimensionMismatch { expected: self.n, found: c.n });
            }
            if !c.is_clifford_unitary() {
                return Err(MagicError::InvalidOp(
                    "mixed Clifford branch contains a non-Clifford op".into(),
                ));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(MagicError::InvalidOp(format!("branch probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn gate(&mut self, g: Gate) -> Result<&mut Self> {
        self.push(Op::Gate(g))
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::H(q))
    }

    pub fn s(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::S(q))
    }

    pub fn t(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(Gate::T(q))
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> Result<&mut Self> {
        self.gate(Gate::Cnot(c, t))
    }

    pub fn depolarize(&mut self, qubit: usize, p: f64) -> Result<&mut Self> {
        self.push(Op::Channel(Channel::LocalDepolarize { qubit, p }))
    }

    pub fn global_depolarize(&mut self, p: f64) -> Result<&mut Self> {
        self.push(Op::Channel(Channel::GlobalDepolarize(p)))
    }

    pub fn mixed_clifford(&mut self, branches: Vec<(f64, Circuit)>) -> Result<&mut Self> {
        self.push(Op::Channel(Channel::MixedClifford(branches)))
    }

    /// Append all ops of `other` (same qubit count).
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n != self.n {
            return Err(MagicError::DimensionMismatch { expected: self.n, found: other.n });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    /// True when every op is a Clifford gate.
    pub fn is_clifford_unitary(&self) -> bool {
        self.ops.iter().all(|op| matches!(op, Op::Gate(g) if g.is_clifford()))
    }

    pub fn is_unitary(&self) -> bool {
        self.ops.iter().all(|op| matches!(op, Op::Gate(_)))
    }

    pub fn count_gates(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Op::Gate(g) if pred(g)))
            .count()
    }
}

fn apply_op(op: &Op, rho: &mut DensityMatrix) -> Result<()> {
    match op {
        Op::Gate(g) => g.apply(rho),
        Op::Channel(Channel::GlobalDepolarize(p)) => rho.global_depolarize(*p),
        Op::Channel(Channel::LocalDepolarize { qubit, p }) => rho.local_depolarize(*qubit, *p),
        Op::Channel(Channel::MixedClifford(branches)) => {
            let mut acc = DensityMatrix::zeros(rho.num_qubits());
            for (p, branch) in branches {
                let mut r = rho.clone();
                for bop in &branch.ops {
                    apply_op(bop, &mut r)?;
                }
                acc.scaled_add(&r, *p);
            }
            *rho = acc;
        }
    }
    Ok(())
}

/// Apply every op of `circ` to `rho0` in order.
pub fn simulate(circ: &Circuit, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let mut rho = rho0.clone();
    simulate_in_place(circ, &mut rho)?;
    Ok(rho)
}

pub fn simulate_in_place(circ: &Circuit, rho: &mut DensityMatrix) -> Result<()> {
    if rho.num_qubits() != circ.n {
        return Err(MagicError::DimensionMismatch { expected: circ.n, found: rho.num_qubits() });
    }
    check_dense(circ.n, "density-matrix simulation")?;
    for op in &circ.ops {
        apply_op(op, rho)?;
    }
    Ok(())
}

/// Apply a gate-only circuit to a state vector.
pub fn simulate_pure(circ: &Circuit, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if psi.len() != 1usize << circ.n {
        return Err(MagicError::DimensionMismatch {
            expected: 1 << circ.n,
            found: psi.len(),
        });
    }
    let mut out = psi.to_vec();
    for op in &circ.ops {
        match op {
            Op::Gate(g) => g.apply_vector(&mut out),
            Op::Channel(_) => {
                return Err(MagicError::InvalidOp("channel in pure-state simulation".into()))
            }
        }
    }
    Ok(out)
}

/// `(1−p)ρ + p I/2ⁿ`.
pub fn apply_global_depolarizing(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let mut out = rho.clone();
    out.global_depolarize(p);
    Ok(out)
}

/// `(1−p)ρ + p·tr_q(ρ) ⊗ I/2` on qubit `qubit`.
pub fn apply_local_depolarizing(rho: &DensityMatrix, qubit: usize, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    if qubit >= rho.num_qubits() {
        return Err(MagicError::InvalidOp(format!("qubit {qubit} out of range")));
    }
    let mut out = rho.clone();
    out.local_depolarize(qubit, p);
    Ok(out)
}

/// `Σ pᵢ UᵢρUᵢ†` for Clifford-only branches.
pub fn apply_mixed_clifford_channel(
    rho: &DensityMatrix,
    branches: &[(f64, Circuit)],
) -> Result<DensityMatrix> {
    let mut c = Circuit::new(rho.num_qubits());
    c.mixed_clifford(branches.to_vec())?;
    simulate(&c, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_spectrum, PauliString};

    #[test]
    fn t_on_plus_gives_t_state() {
        let mut c = Circuit::new(1);
        c.h(0).unwrap().t(0).unwrap();
        let rho = simulate(&c, &DensityMatrix::zero_state(1)).unwrap();
        let s = pauli_spectrum(&rho).unwrap();
        let h = FRAC_1_SQRT_2;
        for (got, want) in s.values().iter().zip([1.0, h, 0.0, -h]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_ops() {
        let mut c = Circuit::new(2);
        assert!(c.cnot(1, 1).is_err());
        assert!(c.h(2).is_err());
        assert!(c.global_depolarize(1.5).is_err());
        let mut t = Circuit::new(2);
        t.t(0).unwrap();
        assert!(c.mixed_clifford(vec![(1.0, t)]).is_err());
        assert!(c.mixed_clifford(vec![(0.4, Circuit::new(2))]).is_err());
    }

    #[test]
    fn local_depolarizing_scales_only_touched_factor() {
        let mut c = Circuit::new(2);
        c.h(0).unwrap().h(1).unwrap();
        let rho = simulate(&c, &DensityMatrix::zero_state(2)).unwrap();
        let out = apply_local_depolarizing(&rho, 0, 0.3).unwrap();
        let (a, b) = (pauli_spectrum(&rho).unwrap(), pauli_spectrum(&out).unwrap());
        let xi: PauliString = "XI".parse().unwrap();
        let ix: PauliString = "IX".parse().unwrap();
        // "XI" puts X on qubit 0
        assert!((b.get(&xi) - 0.7 * a.get(&xi)).abs() < 1e-14);
        assert!((b.get(&ix) - a.get(&ix)).abs() < 1e-14);
    }

    #[test]
    fn full_local_depolarizing_on_zero_state() {
        let out = apply_local_depolarizing(&DensityMatrix::zero_state(2), 0, 1.0).unwrap();
        let want = DensityMatrix::maximally_mixed(1).tensor(&DensityMatrix::zero_state(1));
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn pure_and_mixed_simulation_agree() {
        let mut c = Circuit::new(3);
        c.h(0).unwrap().cnot(0, 2).unwrap().t(2).unwrap();
        c.gate(Gate::Ry(1, 0.7)).unwrap().gate(Gate::Rz(1, -1.1)).unwrap();
        c.gate(Gate::Y(0)).unwrap().s(1).unwrap().cnot(1, 0).unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); 8];
        psi[0] = Complex64::new(1.0, 0.0);
        let psi = simulate_pure(&c, &psi).unwrap();
        let rho = simulate(&c, &DensityMatrix::zero_state(3)).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::from_pure(&psi).unwrap()) < 1e-14);
    }
}
