//! Block structure of `P`: cross terms between identity and quarter-turn
//! elements vanish for any data, including templates with outliers.
//!
//! `cargo run --release --example p_structure`

use pointset_qubo::bench::{export_p_heatmap_data, ExperimentConfig};

fn main() -> pointset_qubo::Result<()> {
    for (k, ratio) in [(1, 0.0), (5, 0.35)] {
        let cfg = ExperimentConfig {
            link_degree: k,
            noise_ratio: ratio,
            ..Default::default()
        };
        let export = export_p_heatmap_data(&cfg)?;
        println!("k = {k}, outliers {ratio}: min diagonal {:.4}", export.min_diagonal);
        for b in &export.blocks {
            println!(
                "  {:?} x {:?}: max |P| = {:.3e}{}",
                b.rows,
                b.cols,
                b.max_abs,
                if b.zero { " (zero)" } else { "" }
            );
        }
    }
    Ok(())
}
