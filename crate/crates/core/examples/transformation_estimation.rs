//! Recover a known rotation of the fish silhouette from index
//! correspondences by exhaustive minimization of the 20-bit QUBO.
//!
//! `cargo run --release --example transformation_estimation [theta]`

use pointset_qubo::datasets::fish;
use pointset_qubo::geometry::rotation_2d;
use pointset_qubo::pipeline::{Instance, Sampler};

fn main() -> pointset_qubo::Result<()> {
    let theta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let reference = fish();
    let template = reference.transformed(&rotation_2d(theta));

    let inst = Instance::te(&reference, &template)?;
    let (decoded, _) = inst.solve(&Sampler::Exhaustive, 0)?;
    let report = inst.evaluate(&decoded, Some(&inst.template))?;

    println!("bits      {}", decoded.solution.hex());
    println!("R affine  {:.3}", decoded.transform.rotation);
    println!("R rigid   {:.6}", decoded.projection.rotation);
    println!("expected  {:.6}", rotation_2d(-theta).rotation);
    println!(
        "e2D {:.4}  eR {:.4}  energy {:.6}",
        report.e2d.unwrap(),
        report.e_r,
        report.qubo_energy
    );
    Ok(())
}
