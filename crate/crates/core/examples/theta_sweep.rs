//! Alignment error over the full circle of misalignment angles in steps of
//! 5 degrees, with index links.
//!
//! `cargo run --release --example theta_sweep`

use pointset_qubo::bench::{run_theta_sweep, ExperimentConfig};

fn main() -> pointset_qubo::Result<()> {
    let cfg = ExperimentConfig {
        link_degrees: vec![1],
        ..Default::default()
    };
    for row in run_theta_sweep(&cfg)? {
        println!(
            "{:>6.1} deg  e2D {:.4}  eR {:.4}",
            row.theta.to_degrees(),
            row.e2d,
            row.e_r
        );
    }
    Ok(())
}
