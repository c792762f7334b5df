//! Witnesses and robustness of depolarized T-doped Clifford circuits.

use mixed_magic::cli::commands::{doped_clifford_rows, DopedConfig};

fn main() -> mixed_magic::Result<()> {
    let cfg = DopedConfig { n: 3, n_ts: (0..=4).collect(), p: 0.1, instances: 3, seed: 11 };
    let (rows, warnings) = doped_clifford_rows(&cfg)?;
    println!("{:>3} {:>4} {:>9} {:>9} {:>9} {:>9}", "N_T", "inst", "2LR", "W_1/2", "W_2", "W_3");
    for r in &rows {
        let lr = r.two_lr.map_or("-".into(), |v| format!("{v:.4}"));
        println!("{:>3} {:>4} {lr:>9} {:>9.4} {:>9.4} {:>9.4}", r.n_t, r.instance, r.w[0], r.w[2], r.w[3]);
    }
    for w in warnings {
        println!("note: {w}");
    }
    Ok(())
}
