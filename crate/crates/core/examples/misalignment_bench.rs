//! Accuracy under random misalignments for several link degrees, solved
//! exactly by enumeration.
//!
//! `cargo run --release --example misalignment_bench [trials]`

use pointset_qubo::bench::{run_misalignment_bench, ExperimentConfig};

fn main() -> pointset_qubo::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let cfg = ExperimentConfig {
        trials,
        ..Default::default()
    };
    let result = run_misalignment_bench(&cfg)?;
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "k", "e2d", "sd_e2d", "eR", "sd_eR");
    for row in &result.rows {
        println!(
            "{:>4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            row.k, row.mean_e2d, row.sd_e2d, row.mean_er, row.sd_er
        );
    }
    Ok(())
}
