//! Train on each relation-pattern fixture and probe the held-out fact it
//! implies.

use vqkge::evaluation::patterns::{pattern_check, Pattern};
use vqkge::scoring::ScoreScheme;
use vqkge::training::TrainConfig;

fn main() -> vqkge::Result<()> {
    let config = TrainConfig {
        learning_rate: 0.1,
        epochs: 300,
        ..TrainConfig::default()
    };
    for pattern in Pattern::ALL {
        let outcome = pattern_check(pattern, ScoreScheme::ComputeUncompute, &config)?;
        println!(
            "{pattern}: final loss {:.5}, passed {}",
            outcome.final_loss, outcome.passed
        );
        for probe in &outcome.probes {
            println!("  {:?} {} -> {:.3}", probe.kind, probe.triple, probe.score);
        }
    }
    Ok(())
}
