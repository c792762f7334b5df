//! Depth at which noisy brickwork circuits stop showing witnessed magic.

use mixed_magic::cli::commands::{random_circuit_scan, ScanConfig};

fn main() -> mixed_magic::Result<()> {
    let cfg = ScanConfig { n: 6, max_depth: 80, ps: vec![0.01, 0.02, 0.04], instances: 4, seed: 7 };
    let r = random_circuit_scan(&cfg)?;
    for (p, d_c) in &r.crossings {
        match d_c {
            Some(d) => println!("p = {p}: mean W~3 turns negative at depth {d:.1}"),
            None => println!("p = {p}: no crossing up to depth {}", cfg.max_depth),
        }
    }
    if let Some(fit) = r.fit {
        println!("d_c ~ {:.2} p^-{:.2} (stderr {:.2})", fit.prefactor, fit.eta, fit.eta_stderr);
    }
    for w in &r.warnings {
        println!("note: {w}");
    }
    Ok(())
}
