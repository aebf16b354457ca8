//! Relation-pattern checks on small fixed graphs.
//!
//! Each fixture is a TSV file with rows `role<TAB>head<TAB>relation<TAB>tail`
//! where `role` is `train` (positive), `neg` (explicit negative) or
//! `held-out` (the witness triple, never seen during training). A fixture
//! that lists negatives is closed-world: its dataset is exactly the listed
//! positives and negatives. Otherwise negatives are sampled as in training.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::ScoreScheme;
use crate::training::{
    build_dataset, score_triple, train_on_dataset, KnowledgeGraph, LabeledTriple, TrainConfig,
    Triple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Symmetric,
    Antisymmetric,
    Inverse,
    Composition,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [
        Pattern::Symmetric,
        Pattern::Antisymmetric,
        Pattern::Inverse,
        Pattern::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Symmetric => "symmetric",
            Pattern::Antisymmetric => "antisymmetric",
            Pattern::Inverse => "inverse",
            Pattern::Composition => "composition",
        }
    }

    fn fixture(self) -> &'static str {
        match self {
            Pattern::Symmetric => include_str!("../../fixtures/symmetric.tsv"),
            Pattern::Antisymmetric => include_str!("../../fixtures/antisymmetric.tsv"),
            Pattern::Inverse => include_str!("../../fixtures/inverse.tsv"),
            Pattern::Composition => include_str!("../../fixtures/composition.tsv"),
        }
    }

    /// Witness score must exceed this (or, for antisymmetry, stay below it).
    pub fn witness_threshold(self) -> f64 {
        match self {
            Pattern::Symmetric => 0.8,
            Pattern::Antisymmetric => 0.2,
            Pattern::Inverse | Pattern::Composition => 0.7,
        }
    }

    /// Minimum score of the trained forward triple, where one is required.
    pub fn forward_threshold(self) -> Option<f64> {
        match self {
            Pattern::Antisymmetric => Some(0.8),
            _ => None,
        }
    }

    pub fn case(self) -> PatternCase {
        PatternCase::parse(self, self.fixture()).expect("shipped fixture parses")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownName {
                kind: "pattern",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone)]
pub struct PatternCase {
    pub pattern: Pattern,
    pub kg: KnowledgeGraph,
    pub negatives: Vec<Triple>,
    pub held_out: Vec<Triple>,
}

impl PatternCase {
    pub fn parse(pattern: Pattern, text: &str) -> Result<Self> {
        let mut kg = KnowledgeGraph::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [role, h, r, t] = fields[..] else {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            };
            let triple = Triple::new(kg.add_entity(h), kg.add_relation(r), kg.add_entity(t));
            rows.push((i + 1, role.to_string(), triple));
        }
        let mut negatives = Vec::new();
        let mut held_out = Vec::new();
        for (line, role, triple) in rows {
            match role.as_str() {
                "train" => {
                    kg.add_triple(triple)?;
                }
                "neg" => negatives.push(triple),
                "held-out" => held_out.push(triple),
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown role {other:?}"),
                    })
                }
            }
        }
        if held_out.iter().chain(&negatives).any(|t| kg.contains(t)) {
            return Err(Error::InvalidConfig(
                "held-out or negative triple is also a training triple".into(),
            ));
        }
        if held_out.is_empty() {
            return Err(Error::EmptyData);
        }
        Ok(PatternCase {
            pattern,
            kg,
            negatives,
            held_out,
        })
    }

    pub fn describe(&self, t: &Triple) -> String {
        format!(
            "({},{},{})",
            self.kg.entities()[t.head],
            self.kg.relations()[t.relation],
            self.kg.entities()[t.tail]
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    Witness,
    Forward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeScore {
    pub triple: String,
    pub kind: ProbeKind,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternOutcome {
    pub pattern: Pattern,
    pub scheme: ScoreScheme,
    pub seed: u64,
    pub final_loss: f64,
    pub probes: Vec<ProbeScore>,
    pub passed: bool,
}

impl PatternOutcome {
    pub const CSV_HEADER: &'static str = "pattern,scheme,seed,final_loss,probe,kind,score,passed";

    pub fn csv_rows(&self) -> Vec<String> {
        self.probes
            .iter()
            .map(|p| {
                format!(
                    "{},{},{},{},\"{}\",{},{},{}",
                    self.pattern,
                    self.scheme,
                    self.seed,
                    self.final_loss,
                    p.triple,
                    match p.kind {
                        ProbeKind::Witness => "witness",
                        ProbeKind::Forward => "forward",
                    },
                    p.score,
                    self.passed
                )
            })
            .collect()
    }
}

/// Trains on the pattern's fixture and scores its held-out witnesses (and,
/// for antisymmetry, their trained forward counterparts).
pub fn pattern_check(
    pattern: Pattern,
    scheme: ScoreScheme,
    config: &TrainConfig,
) -> Result<PatternOutcome> {
    run_case(&pattern.case(), scheme, config)
}

pub fn run_case(
    case: &PatternCase,
    scheme: ScoreScheme,
    config: &TrainConfig,
) -> Result<PatternOutcome> {
    let config = TrainConfig {
        scheme,
        ..config.clone()
    };
    let dataset: Vec<LabeledTriple> = if case.negatives.is_empty() {
        let exclude: HashSet<Triple> = case.held_out.iter().copied().collect();
        build_dataset(&case.kg, &config, &exclude)?
    } else {
        case.kg
            .triples()
            .iter()
            .map(|&t| LabeledTriple::positive(t))
            .chain(case.negatives.iter().map(|&t| LabeledTriple::negative(t)))
            .collect()
    };
    let outcome = train_on_dataset(
        case.kg.n_entities(),
        case.kg.n_relations(),
        dataset,
        &config,
    )?;
    let mode = config.score_mode();
    let pattern = case.pattern;

    let mut probes = Vec::new();
    let mut passed = true;
    for w in &case.held_out {
        let score = score_triple(&outcome.params, w, scheme, mode)?;
        passed &= if pattern == Pattern::Antisymmetric {
            score < pattern.witness_threshold()
        } else {
            score > pattern.witness_threshold()
        };
        probes.push(ProbeScore {
            triple: case.describe(w),
            kind: ProbeKind::Witness,
            score,
        });
        if let Some(min) = pattern.forward_threshold() {
            let fwd = Triple::new(w.tail, w.relation, w.head);
            let score = score_triple(&outcome.params, &fwd, scheme, mode)?;
            passed &= score > min;
            probes.push(ProbeScore {
                triple: case.describe(&fwd),
                kind: ProbeKind::Forward,
                score,
            });
        }
    }
    Ok(PatternOutcome {
        pattern,
        scheme,
        seed: config.seed,
        final_loss: outcome.final_loss(),
        probes,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_hold_out_unseen_triples() {
        for p in Pattern::ALL {
            let case = p.case();
            assert!((4..=8).contains(&case.kg.n_entities()), "{p}");
            for w in &case.held_out {
                assert!(!case.kg.contains(w));
            }
        }
    }

    #[test]
    fn malformed_fixture_is_rejected() {
        assert!(matches!(
            PatternCase::parse(Pattern::Symmetric, "train\ta\tr\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(PatternCase::parse(Pattern::Symmetric, "oops\ta\tr\tb\n").is_err());
        assert!(
            PatternCase::parse(Pattern::Symmetric, "train\ta\tr\tb\nheld-out\ta\tr\tb\n").is_err()
        );
        assert!("Inverse".parse::<Pattern>().is_ok());
        assert!("transitive".parse::<Pattern>().is_err());
    }

    #[test]
    fn contradictory_labels_bound_the_loss() {
        let case = PatternCase::parse(
            Pattern::Antisymmetric,
            "train\ta\tr\tb\nneg\ta\tr\tc\nheld-out\tc\tr\ta\n",
        )
        .unwrap();
        let mut case = case;
        // same pair labeled both ways
        case.negatives.push(Triple::new(0, 0, 1));
        let config = TrainConfig {
            n_qubits: 1,
            n_layers: 1,
            epochs: 60,
            learning_rate: 0.1,
            ..TrainConfig::default()
        };
        let out = run_case(&case, ScoreScheme::Swap, &config).unwrap();
        assert!(out.final_loss.is_finite());
        // two of the three examples disagree: the best they can do is 0.25 each
        assert!(
            out.final_loss >= 2.0 * 0.25 / 3.0 - 1e-9,
            "{}",
            out.final_loss
        );
    }
}
