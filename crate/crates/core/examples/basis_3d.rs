//! The 80-element 3D basis: element layout, a random rotation fitted by
//! simulated annealing over 80 bits, and projection back onto SO(3).
//!
//! `cargo run --release --example basis_3d`

use pointset_qubo::basis::build_basis_3d;
use pointset_qubo::geometry::{random_rotation, PointSet};
use pointset_qubo::metrics::{alignment_error, transformation_discrepancy};
use pointset_qubo::pipeline::{Instance, Sampler};
use pointset_qubo::rng::seeded_rng;
use pointset_qubo::samplers::SaSchedule;
use rand::Rng;

fn main() -> pointset_qubo::Result<()> {
    let basis = build_basis_3d();
    println!("{} elements", basis.len());
    for e in basis.elements().iter().take(16) {
        print!("{} ", e.label());
    }
    println!("...");

    let mut rng = seeded_rng(3, 0);
    let points: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let x = PointSet::new(3, &points)?;
    let truth = random_rotation(3, 17)?;
    let y = x.transformed(&truth);

    let inst = Instance::te(&x, &y)?;
    let schedule = SaSchedule {
        restarts: 16,
        sweeps: 4000,
        ..Default::default()
    };
    let (decoded, _) = inst.solve(&Sampler::Sa(schedule), 1)?;
    let r = &decoded.transform.rotation;
    println!("true inverse {:.3}", truth.rotation.transpose());
    println!("R affine     {:.3}", r);
    println!("R rigid      {:.3}", decoded.projection.rotation);
    println!(
        "e2D affine {:.4}, e2D rigid {:.4}, eR {:.4}",
        alignment_error(r, &inst.reference, &inst.template)?,
        alignment_error(&decoded.projection.rotation, &inst.reference, &inst.template)?,
        transformation_discrepancy(r)
    );
    Ok(())
}
