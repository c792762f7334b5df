//! Estimate A_3 of a noisy state from Bell-basis samples and compare with the exact value.

use mixed_magic::bell::plan_samples;
use mixed_magic::circuits::{apply_global_depolarizing, prepare_product_state, ProductKind};
use mixed_magic::cli::commands::bell_estimate;

fn main() -> mixed_magic::Result<()> {
    let rho = apply_global_depolarizing(&prepare_product_state(&[ProductKind::T, ProductKind::Plus])?, 0.1)?;
    for eps in [0.2, 0.1, 0.05] {
        let plan = plan_samples(eps, 0.01, 3)?;
        let o = bell_estimate(&rho, 3, eps, 0.01, 2024)?;
        println!(
            "eps {eps:<5} groups {:>6} copies {:>7}  estimate {:.4}  exact {:.4}",
            plan.l, plan.copies, o.estimate, o.exact
        );
    }
    Ok(())
}
