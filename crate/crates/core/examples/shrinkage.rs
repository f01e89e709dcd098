//! Linking every reference point to every template point drives the
//! optimal map to zero; index links keep it near a rotation.
//!
//! `cargo run --release --example shrinkage`

use pointset_qubo::bench::{run_shrinkage_demo, ExperimentConfig};

fn main() -> pointset_qubo::Result<()> {
    let report = run_shrinkage_demo(&ExperimentConfig::default())?;
    for c in [&report.local, &report.full] {
        println!(
            "k = {:>3}: sigma_max {:.4}, degenerate {}, energy {:.4}",
            c.k, c.sigma_max, c.degenerate, c.energy
        );
    }
    println!("shrinks: {}", report.shrinks());
    Ok(())
}
