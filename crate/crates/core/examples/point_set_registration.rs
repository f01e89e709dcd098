//! Registration without correspondences: every reference point is linked to
//! its nearest template points, the template carries uniform outliers, and
//! simulated annealing minimizes the QUBO.
//!
//! `cargo run --release --example point_set_registration [k] [outlier-ratio]`

use pointset_qubo::bench::{misaligned_instance, LinkFrame};
use pointset_qubo::datasets::fish;
use pointset_qubo::geometry::center;
use pointset_qubo::metrics::alignment_error;
use pointset_qubo::pipeline::Sampler;
use pointset_qubo::samplers::SaSchedule;

fn main() -> pointset_qubo::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let ratio: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let theta = 2.2;

    let (x, _) = center(&fish());
    for frame in [LinkFrame::Aligned, LinkFrame::Observed] {
        let (inst, clean) = misaligned_instance(&x, theta, k, ratio, 11, frame)?;
        let (decoded, trace) = inst.solve(&Sampler::Sa(SaSchedule::default()), 5)?;
        let r = &decoded.transform.rotation;
        println!(
            "{frame:?} links: template {} points, {} links, {} improvements, e2D {:.4}, degenerate {}",
            inst.template.len(),
            inst.links.total(),
            trace.events.len(),
            alignment_error(r, &inst.reference, &clean)?,
            decoded.projection.degenerate
        );
        println!("  R rigid {:.4}", decoded.projection.rotation);
    }
    Ok(())
}
