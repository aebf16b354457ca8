use proptest::prelude::*;
use vqkge::ansatz::{AnsatzSpec, ParamVector};
use vqkge::io::{Checkpoint, Provenance};
use vqkge::scoring::ScoreScheme;
use vqkge::training::{KnowledgeGraph, ParameterStore};

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_bit_exact(
        n in 1usize..=3,
        layers in 1usize..=2,
        values in prop::collection::vec(finite(), 60),
        loss in finite(),
    ) {
        let spec = AnsatzSpec::new(n, layers).unwrap();
        let p = spec.param_count();
        let mut kg = KnowledgeGraph::new();
        kg.add_named("héad", "r\u{e9}l", "tail with spaces");
        let take = |k: usize| ParamVector((0..p).map(|i| values[(k * p + i) % values.len()]).collect());
        let params = ParameterStore::new(spec, vec![take(0), take(1)], vec![take(2)]).unwrap();
        let provenance = Provenance { config_hash: "h".into(), scheme: ScoreScheme::Switch, epochs: 3, final_loss: loss };
        let ckpt = Checkpoint::new(&kg, &params, provenance).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        ckpt.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        let bits = |c: &Checkpoint| -> Vec<u64> {
            c.entities.values().chain(c.relations.values()).flatten().map(|x| x.to_bits()).collect()
        };
        prop_assert_eq!(bits(&back), bits(&ckpt));
        prop_assert_eq!(back.provenance.final_loss.to_bits(), loss.to_bits());
        prop_assert_eq!(back.params().unwrap(), params);
        let dict = back.dictionary();
        prop_assert_eq!(dict.entities(), kg.entities());
    }
}
