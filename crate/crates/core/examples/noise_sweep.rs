//! Accuracy as uniform outliers are added to the template.
//!
//! `cargo run --release --example noise_sweep [trials]`

use pointset_qubo::bench::{run_noise_sweep, ExperimentConfig};

fn main() -> pointset_qubo::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let cfg = ExperimentConfig {
        noise_trials: trials,
        link_degrees: vec![1, 10],
        ..Default::default()
    };
    let result = run_noise_sweep(&cfg)?;
    print!("{}", result.rows_csv()?);
    Ok(())
}
