//! Subsystem witness of TFIM ground states against block length.

use mixed_magic::mps::{dmrg_with, subsystem_witness_scan, ContractionBudget, DmrgConfig};

fn main() -> mixed_magic::Result<()> {
    let n = 16;
    for h in [0.5, 1.0, 2.0] {
        let gs = dmrg_with(n, h, &DmrgConfig::new(8))?;
        println!("h = {h}: E0 = {:.6} after {} sweeps", gs.energy, gs.sweeps);
        for r in subsystem_witness_scan(&gs.state, 8, 2, &ContractionBudget::default()) {
            let r = r?;
            println!("  ell {:>2}  S2 {:.4}  W2 {:+.4}  ({:?})", r.ell, r.s2, r.w, r.method);
        }
    }
    Ok(())
}
