use std::collections::HashSet;

use indexmap::IndexSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        Triple {
            head,
            relation,
            tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledTriple {
    pub triple: Triple,
    /// `true` for a triple of the graph, `false` for a corrupted one.
    pub label: bool,
}

impl LabeledTriple {
    pub fn positive(triple: Triple) -> Self {
        LabeledTriple {
            triple,
            label: true,
        }
    }

    pub fn negative(triple: Triple) -> Self {
        LabeledTriple {
            triple,
            label: false,
        }
    }

    /// Regression target `y` in {0, 1}.
    pub fn target(&self) -> f64 {
        if self.label {
            1.0
        } else {
            0.0
        }
    }
}

/// Entities and relations are indexed by first appearance; triples keep
/// insertion order and are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeGraph {
    entities: IndexSet<String>,
    relations: IndexSet<String>,
    triples: IndexSet<Triple>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_names<E, R>(entities: E, relations: R) -> Self
    where
        E: IntoIterator,
        E::Item: Into<String>,
        R: IntoIterator,
        R::Item: Into<String>,
    {
        KnowledgeGraph {
            entities: entities.into_iter().map(Into::into).collect(),
            relations: relations.into_iter().map(Into::into).collect(),
            triples: IndexSet::new(),
        }
    }

    pub fn add_entity(&mut self, name: &str) -> usize {
        self.entities.insert_full(name.to_string()).0
    }

    pub fn add_relation(&mut self, name: &str) -> usize {
        self.relations.insert_full(name.to_string()).0
    }

    /// Adds a triple by names, registering unseen names. Returns `false` if
    /// the triple was already present.
    pub fn add_named(&mut self, head: &str, relation: &str, tail: &str) -> bool {
        let h = self.add_entity(head);
        let r = self.add_relation(relation);
        let t = self.add_entity(tail);
        self.triples.insert(Triple::new(h, r, t))
    }

    pub fn add_triple(&mut self, triple: Triple) -> Result<bool> {
        self.check(&triple)?;
        Ok(self.triples.insert(triple))
    }

    pub fn check(&self, triple: &Triple) -> Result<()> {
        for (what, index, size) in [
            ("entity", triple.head, self.entities.len()),
            ("relation", triple.relation, self.relations.len()),
            ("entity", triple.tail, self.entities.len()),
        ] {
            if index >= size {
                return Err(Error::IndexOutOfRange { what, index, size });
            }
        }
        Ok(())
    }

    pub fn entities(&self) -> &IndexSet<String> {
        &self.entities
    }

    pub fn relations(&self) -> &IndexSet<String> {
        &self.relations
    }

    pub fn triples(&self) -> &IndexSet<Triple> {
        &self.triples
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entities.get_index_of(name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.get_index_of(name)
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Labeled dataset: every positive followed by `k` corruptions of it. A
/// corruption replaces the head or the tail (fair coin) with a uniformly drawn
/// entity and is rejected if it is a known triple.
pub fn negative_sample(kg: &KnowledgeGraph, k: usize, seed: u64) -> Result<Vec<LabeledTriple>> {
    negative_sample_excluding(kg, k, seed, &HashSet::new())
}

/// As [`negative_sample`], additionally never emitting a triple in `exclude`
/// (held-out evaluation triples).
pub fn negative_sample_excluding(
    kg: &KnowledgeGraph,
    k: usize,
    seed: u64,
    exclude: &HashSet<Triple>,
) -> Result<Vec<LabeledTriple>> {
    if kg.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if k == 0 {
        return Err(Error::InvalidConfig(
            "negatives per positive must be at least 1".into(),
        ));
    }
    let n = kg.n_entities();
    let allowed = |t: &Triple| !kg.contains(t) && !exclude.contains(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(kg.triples().len() * (k + 1));
    for &pos in kg.triples() {
        let heads = (0..n)
            .filter(|&e| allowed(&Triple { head: e, ..pos }))
            .count();
        let tails = (0..n)
            .filter(|&e| allowed(&Triple { tail: e, ..pos }))
            .count();
        if heads + tails == 0 {
            return Err(Error::NoNegativeAvailable {
                head: pos.head,
                relation: pos.relation,
                tail: pos.tail,
            });
        }
        out.push(LabeledTriple::positive(pos));
        for _ in 0..k {
            let mut corrupt_head = rng.random_bool(0.5);
            if (corrupt_head && heads == 0) || (!corrupt_head && tails == 0) {
                corrupt_head = !corrupt_head;
            }
            let candidate = loop {
                let e = rng.random_range(0..n);
                let c = if corrupt_head {
                    Triple { head: e, ..pos }
                } else {
                    Triple { tail: e, ..pos }
                };
                if allowed(&c) {
                    break c;
                }
            };
            out.push(LabeledTriple::negative(candidate));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> KnowledgeGraph {
        let mut kg = KnowledgeGraph::new();
        kg.add_named("a", "r", "b");
        kg.add_named("b", "r", "c");
        kg.add_named("c", "s", "a");
        kg
    }

    #[test]
    fn dictionaries_follow_first_appearance() {
        let kg = small();
        assert_eq!(kg.entities().iter().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(kg.relation_index("s"), Some(1));
        let mut kg = kg;
        assert!(!kg.add_named("a", "r", "b"));
        assert_eq!(kg.triples().len(), 3);
        assert!(kg.add_triple(Triple::new(0, 5, 1)).is_err());
    }

    #[test]
    fn one_triple_two_negatives() {
        let mut kg = KnowledgeGraph::new();
        kg.add_named("a", "r", "b");
        let data = negative_sample(&kg, 2, 1).unwrap();
        assert_eq!(data.len(), 3);
        assert!(data[0].label);
        for d in &data[1..] {
            assert!(!d.label);
            assert!(!kg.contains(&d.triple));
        }
    }

    #[test]
    fn negatives_avoid_graph_and_exclusions() {
        let kg = small();
        let exclude = HashSet::from([Triple::new(1, 0, 0)]);
        for seed in 0..20 {
            let data = negative_sample_excluding(&kg, 3, seed, &exclude).unwrap();
            assert_eq!(data.len(), 12);
            for d in data.iter().filter(|d| !d.label) {
                assert!(!kg.contains(&d.triple) && !exclude.contains(&d.triple));
            }
            assert_eq!(
                data,
                negative_sample_excluding(&kg, 3, seed, &exclude).unwrap()
            );
        }
    }

    #[test]
    fn saturated_graph_is_an_error() {
        let mut kg = KnowledgeGraph::new();
        kg.add_named("a", "r", "a");
        assert!(matches!(
            negative_sample(&kg, 1, 0),
            Err(Error::NoNegativeAvailable { .. })
        ));
        assert!(matches!(
            negative_sample(&KnowledgeGraph::new(), 1, 0),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn one_sided_corruption_still_terminates() {
        // every head corruption of (a, r, b) is known; only tails remain
        let mut kg = KnowledgeGraph::new();
        kg.add_named("a", "r", "b");
        kg.add_named("b", "r", "b");
        let data = negative_sample(&kg, 5, 3).unwrap();
        for d in data.iter().filter(|d| !d.label) {
            assert!(!kg.contains(&d.triple));
        }
    }
}
