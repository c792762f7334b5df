//! Build a small noisy circuit, round-trip it through the text format and simulate it.

use mixed_magic::circuits::text::{parse_circuit, write_circuit};
use mixed_magic::circuits::{simulate, Circuit};
use mixed_magic::pauli::pauli_spectrum;
use mixed_magic::witness::witness_w;
use mixed_magic::DensityMatrix;

fn main() -> mixed_magic::Result<()> {
    let mut c = Circuit::new(2);
    c.h(0)?.t(0)?.cnot(0, 1)?.depolarize(1, 0.02)?.global_depolarize(0.05)?;
    let text = write_circuit(&c);
    print!("{text}");
    assert_eq!(parse_circuit(&text)?, c);
    let rho = simulate(&c, &DensityMatrix::zero_state(2))?;
    println!("W_2 = {:.5}", witness_w(&pauli_spectrum(&rho)?, 2.0)?);
    Ok(())
}
