//! Train on a small family graph, save a checkpoint, reload it and rank
//! held-out facts under the raw and filtered protocols.

use vqkge::evaluation::{evaluate, EvalReport, Protocol};
use vqkge::io::{Checkpoint, Provenance};
use vqkge::scoring::ScoreScheme;
use vqkge::training::{train, KnowledgeGraph, TrainConfig, Triple};

fn main() -> vqkge::Result<()> {
    let facts = [
        ("ann", "parent_of", "bea"),
        ("bea", "parent_of", "cal"),
        ("cal", "parent_of", "dot"),
        ("bea", "child_of", "ann"),
        ("cal", "child_of", "bea"),
        ("ann", "sibling_of", "eve"),
        ("eve", "sibling_of", "ann"),
    ];
    let mut kg = KnowledgeGraph::new();
    for (h, r, t) in facts {
        kg.add_named(h, r, t);
    }
    let id = |e: &str| kg.entity_index(e).unwrap();
    let rel = |r: &str| kg.relation_index(r).unwrap();
    let test = vec![Triple::new(id("dot"), rel("child_of"), id("cal"))];

    let config = TrainConfig {
        learning_rate: 0.05,
        epochs: 200,
        negatives_per_positive: 2,
        ..TrainConfig::default()
    };
    let outcome = train(&kg, &config)?;
    println!("final training loss {:.4}", outcome.final_loss());

    let provenance = Provenance {
        config_hash: "example".into(),
        scheme: config.scheme,
        epochs: config.epochs,
        final_loss: outcome.final_loss(),
    };
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("checkpoint.json");
    Checkpoint::new(&kg, &outcome.params, provenance)?.save(&path)?;
    let params = Checkpoint::load(&path)?.params()?;

    println!("{}", EvalReport::CSV_HEADER);
    for protocol in [Protocol::Raw, Protocol::Filtered] {
        let train_report = evaluate(
            &params,
            &kg.triples().iter().copied().collect::<Vec<_>>(),
            &kg,
            protocol,
            ScoreScheme::Swap,
            config.score_mode(),
        )?;
        println!("{}  (training facts)", train_report.csv_row());
        let report = evaluate(
            &params,
            &test,
            &kg,
            protocol,
            ScoreScheme::Swap,
            config.score_mode(),
        )?;
        println!("{}  (held-out fact)", report.csv_row());
    }
    Ok(())
}
