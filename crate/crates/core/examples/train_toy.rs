//! Train embeddings for a one-fact graph and watch the loss fall.

use vqkge::io::{parse_named_triples, triples_to_graph};
use vqkge::scoring::ScoreScheme;
use vqkge::training::{score_triple, train, TrainConfig};

fn main() -> vqkge::Result<()> {
    let rows = parse_named_triples(include_str!("../fixtures/toy.tsv"))?;
    let kg = triples_to_graph(&rows)?.kg;

    for scheme in ScoreScheme::ALL {
        let config = TrainConfig {
            scheme,
            n_qubits: 1,
            epochs: 300,
            ..TrainConfig::default()
        };
        let outcome = train(&kg, &config)?;
        let trace: Vec<String> = outcome
            .loss_history
            .iter()
            .step_by(50)
            .map(|l| format!("{l:.4}"))
            .collect();
        println!("{scheme}: loss every 50 epochs [{}]", trace.join(", "));
        for labeled in &outcome.dataset {
            let score = score_triple(
                &outcome.params,
                &labeled.triple,
                scheme,
                config.score_mode(),
            )?;
            println!("  target {:.0}  score {score:.4}", labeled.target());
        }
    }
    Ok(())
}
