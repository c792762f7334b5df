//! Witness values of a noisy T-state register as the noise grows.

use mixed_magic::circuits::{apply_global_depolarizing, prepare_product_state, ProductKind};
use mixed_magic::pauli::pauli_spectrum;
use mixed_magic::witness::witness_report;

fn main() -> mixed_magic::Result<()> {
    let clean = prepare_product_state(&[ProductKind::T; 3])?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>10}", "p", "alpha", "S2", "W", "W~");
    for p in [0.0, 0.1, 0.2, 0.4] {
        let rho = apply_global_depolarizing(&clean, p)?;
        let spec = pauli_spectrum(&rho)?;
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let r = witness_report(&spec, alpha)?;
            let wf = r.w_filtered.map_or("-".into(), |v| format!("{v:.5}"));
            println!("{p:>5} {alpha:>5} {:>10.5} {:>10.5} {wf:>10}", r.s2, r.w);
        }
    }
    Ok(())
}
