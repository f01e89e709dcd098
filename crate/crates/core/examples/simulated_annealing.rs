//! Simulated annealing against the exhaustive oracle on a rotated fish
//! subset, with the best-so-far trace.
//!
//! `cargo run --release --example simulated_annealing`

use pointset_qubo::datasets::fish;
use pointset_qubo::geometry::rotation_2d;
use pointset_qubo::pipeline::Instance;
use pointset_qubo::samplers::{ground_state, solve_sa, SaSchedule};

fn main() -> pointset_qubo::Result<()> {
    let x = fish().prefix(45);
    let inst = Instance::te(&x, &x.transformed(&rotation_2d(4.0)))?;

    let exact = ground_state(&inst.reduced)?;
    let (sa, trace) = solve_sa(&inst.reduced, &SaSchedule::default(), 2024)?;
    println!("exhaustive {:.12} {}", exact.energy, exact.hex());
    println!("annealing  {:.12} {}", sa.energy, sa.hex());
    println!("trace:");
    for e in &trace.events {
        println!("  step {:>9}  energy {:.6}", e.step, e.energy);
    }
    Ok(())
}
