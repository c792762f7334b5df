//! Log-free robustness of a depolarized T state and its stabilizer decomposition.

use mixed_magic::circuits::{apply_global_depolarizing, prepare_product_state, ProductKind};
use mixed_magic::stabilizer::{best_pure_stabilizer_fidelity, log_free_robustness};

fn main() -> mixed_magic::Result<()> {
    let t = prepare_product_state(&[ProductKind::T])?;
    for p in [0.0, 0.1, 0.2, 0.3, 0.5] {
        let rho = apply_global_depolarizing(&t, p)?;
        let r = log_free_robustness(&rho)?;
        let f = best_pure_stabilizer_fidelity(&rho)?;
        println!("p = {p}: LR = {:.5}  best stabilizer fidelity {f:.4}  residual {:.1e}", r.lr, r.residual);
    }
    let r = log_free_robustness(&prepare_product_state(&[ProductKind::T, ProductKind::T])?)?;
    println!("T x T: LR = {:.5}", r.lr);
    for (label, x) in &r.coefficients {
        println!("  {x:+.4}  {label}");
    }
    Ok(())
}
