//! Compare how readout and gate noise bias each scoring circuit as the
//! register grows.

use vqkge::noise::{scheme_bias_sweep, NoiseModel, SweepConfig, SweepRow, ThetaPolicy};

fn main() -> vqkge::Result<()> {
    for policy in [ThetaPolicy::PerfectOverlap, ThetaPolicy::Random] {
        println!("{policy:?}\n{}", SweepRow::CSV_HEADER);
        for (f_read, p2) in [(0.97, 0.0), (0.97, 0.01)] {
            let config = SweepConfig {
                n_values: vec![1, 2, 4, 6],
                n_layers: 2,
                samples: 20,
                policy,
                model: NoiseModel::new(f_read, p2)?,
                shots: None,
                seed: 3,
            };
            for row in scheme_bias_sweep(&config)? {
                println!("{}", row.csv_row());
            }
        }
        println!();
    }
    Ok(())
}
