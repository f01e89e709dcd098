//! Adiabatic annealing of a three-spin Ising problem: gap along the
//! interpolation, the annealing-time bound, and ground-state overlap after
//! anneals of increasing length.
//!
//! `cargo run --release --example spectral_gap`

use pointset_qubo::quantum::{annealing_rate_bound, build_hi, build_hp, evolve, gap_curve, suggested_steps};
use pointset_qubo::qubo::IsingProblem;

fn main() -> pointset_qubo::Result<()> {
    let mut ising = IsingProblem::new(vec![0.5, -0.3, 0.2]);
    ising.add_coupling(0, 1, 0.4)?;
    ising.add_coupling(1, 2, -0.6)?;
    let hp = build_hp(&ising)?;
    let hi = build_hi(3, 1.0)?;

    let curve = gap_curve(&hi, &hp, 21)?;
    for g in &curve.samples {
        println!("s {:.2}  gap {:.4}  E0 {:.4}", g.s, g.gap, g.ground_energy);
    }
    let bound = annealing_rate_bound(&hi, &hp, 101)?;
    println!("rate bound {:.3} at s = {:.2}", bound.t_min, bound.at_s);

    for t in [1.0, 10.0, 100.0, 50.0 * bound.t_min] {
        let ev = evolve(&hi, &hp, t, suggested_steps(&hi, &hp, t))?;
        println!("T {:>9.2}  ground overlap {:.6}", t, ev.ground_overlap);
    }
    Ok(())
}
