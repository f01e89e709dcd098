//! Energy-decreasing annealing transitions with the alignment error of each
//! intermediate state, and the exhaustive gap of every instance.
//!
//! `cargo run --release --example gap_study`

use pointset_qubo::bench::{run_gap_study, ExperimentConfig};
use pointset_qubo::pipeline::Sampler;
use pointset_qubo::samplers::SaSchedule;

fn main() -> pointset_qubo::Result<()> {
    let cfg = ExperimentConfig {
        sampler: Sampler::Sa(SaSchedule {
            restarts: 8,
            sweeps: 2000,
            ..Default::default()
        }),
        ..Default::default()
    };
    for case in run_gap_study(&cfg)? {
        println!(
            "theta {:.3} k {:>2}: ground {:.5}, gap {:.3e}, lowest e2D {:.4} / {:.4}, SA {:.5}",
            case.theta, case.k, case.ground_energy, case.gap, case.lowest_e2d[0], case.lowest_e2d[1], case.sa_energy
        );
        for t in case.trace.iter().rev().take(4).rev() {
            println!("    step {:>8} energy {:.5} e2D {:.4}", t.step, t.energy, t.e2d);
        }
    }
    Ok(())
}
