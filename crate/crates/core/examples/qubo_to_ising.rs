//! Eliminate the clamped bit, convert to Ising form and check that both
//! forms agree on every assignment of a small problem.
//!
//! `cargo run --release --example qubo_to_ising`

use pointset_qubo::datasets::fish;
use pointset_qubo::geometry::rotation_2d;
use pointset_qubo::pipeline::Instance;
use pointset_qubo::qubo::{bits_to_spins, to_ising};
use pointset_qubo::samplers::unpack;

fn main() -> pointset_qubo::Result<()> {
    let x = fish().prefix(30);
    let inst = Instance::te(&x, &x.transformed(&rotation_2d(0.5)))?;
    let ising = to_ising(&inst.reduced);
    println!(
        "{} spins, {} couplings, offset {:.6}",
        ising.len(),
        ising.j.len(),
        ising.offset
    );

    let mut worst: f64 = 0.0;
    for state in (0..1u64 << 20).step_by(997) {
        let bits = unpack(state, 20);
        let q = inst.reduced.energy(&bits);
        let s = ising.energy(&bits_to_spins(&bits)) + ising.offset;
        worst = worst.max((q - s).abs());
    }
    println!("largest QUBO/Ising disagreement on sampled states: {worst:.3e}");
    println!("first lines of the Ising file:");
    for line in ising.to_text().lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
