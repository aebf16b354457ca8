//! Link-prediction metrics.
//!
//! Each test triple yields a tail query `(h, r, ?)` and a head query
//! `(?, r, t)`. Candidates are ranked by descending score; candidates whose
//! score lies within [`TIE_TOLERANCE`] of the true entity's score share its
//! block and the true entity receives the mean rank of that block.

pub mod patterns;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{ScoreMode, ScoreScheme};
use crate::training::{score_triple, KnowledgeGraph, ParameterStore, Triple};

/// Scores closer than this to the true score count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const HITS_AT: [usize; 3] = [1, 3, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Raw,
    Filtered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mrr: f64,
    pub hits_at: BTreeMap<usize, f64>,
    pub protocol: Protocol,
    pub n_queries: usize,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "protocol,n_queries,mrr,hits_at_1,hits_at_3,hits_at_10";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            match self.protocol {
                Protocol::Raw => "raw",
                Protocol::Filtered => "filtered",
            },
            self.n_queries,
            self.mrr,
            self.hits_at[&1],
            self.hits_at[&3],
            self.hits_at[&10]
        )
    }

    /// Aggregates per-query ranks.
    pub fn from_ranks(ranks: &[f64], protocol: Protocol) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::EmptyData);
        }
        let n = ranks.len() as f64;
        let mrr = ranks.iter().map(|r| 1.0 / r).sum::<f64>() / n;
        let hits_at = HITS_AT
            .iter()
            .map(|&k| {
                (
                    k,
                    ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / n,
                )
            })
            .collect();
        Ok(EvalReport {
            mrr,
            hits_at,
            protocol,
            n_queries: ranks.len(),
        })
    }
}

/// Mean-tie rank of `target` among `scores`, ignoring candidates for which
/// `skip` holds (the target itself is never skipped).
pub fn rank_among(scores: &[f64], target: usize, skip: impl Fn(usize) -> bool) -> f64 {
    let s = scores[target];
    let mut better = 0usize;
    let mut tied = 0usize;
    for (i, &x) in scores.iter().enumerate() {
        if i == target || skip(i) {
            continue;
        }
        if x > s + TIE_TOLERANCE {
            better += 1;
        } else if x >= s - TIE_TOLERANCE {
            tied += 1;
        }
    }
    1.0 + better as f64 + tied as f64 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Head,
    Tail,
}

fn rank_query(
    params: &ParameterStore,
    triple: Triple,
    side: Side,
    kg: &KnowledgeGraph,
    protocol: Protocol,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    kg.check(&triple)?;
    let candidate = |e: usize| match side {
        Side::Head => Triple { head: e, ..triple },
        Side::Tail => Triple { tail: e, ..triple },
    };
    let scores: Vec<f64> = (0..kg.n_entities())
        .into_par_iter()
        .map(|e| score_triple(params, &candidate(e), scheme, mode))
        .collect::<Result<_>>()?;
    let target = match side {
        Side::Head => triple.head,
        Side::Tail => triple.tail,
    };
    Ok(rank_among(&scores, target, |e| {
        protocol == Protocol::Filtered && kg.contains(&candidate(e))
    }))
}

/// Rank of `true_tail` among all entities as tail of `(head, relation, ?)`.
#[allow(clippy::too_many_arguments)]
pub fn rank_tail(
    params: &ParameterStore,
    head: usize,
    relation: usize,
    true_tail: usize,
    kg: &KnowledgeGraph,
    protocol: Protocol,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    rank_query(
        params,
        Triple::new(head, relation, true_tail),
        Side::Tail,
        kg,
        protocol,
        scheme,
        mode,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn rank_head(
    params: &ParameterStore,
    true_head: usize,
    relation: usize,
    tail: usize,
    kg: &KnowledgeGraph,
    protocol: Protocol,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<f64> {
    rank_query(
        params,
        Triple::new(true_head, relation, tail),
        Side::Head,
        kg,
        protocol,
        scheme,
        mode,
    )
}

/// MRR and hits@{1,3,10} over head and tail queries of `test`. Under the
/// filtered protocol, every triple of `kg` other than the query's own answer
/// is removed from the candidates.
pub fn evaluate(
    params: &ParameterStore,
    test: &[Triple],
    kg: &KnowledgeGraph,
    protocol: Protocol,
    scheme: ScoreScheme,
    mode: ScoreMode,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut ranks = Vec::with_capacity(2 * test.len());
    for &t in test {
        ranks.push(rank_query(
            params,
            t,
            Side::Tail,
            kg,
            protocol,
            scheme,
            mode,
        )?);
        ranks.push(rank_query(
            params,
            t,
            Side::Head,
            kg,
            protocol,
            scheme,
            mode,
        )?);
    }
    EvalReport::from_ranks(&ranks, protocol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzSpec;

    #[test]
    fn strict_best_is_rank_one() {
        assert_eq!(rank_among(&[0.1, 0.9, 0.3], 1, |_| false), 1.0);
        assert_eq!(rank_among(&[0.1, 0.9, 0.3], 0, |_| false), 3.0);
    }

    #[test]
    fn all_tied_gets_mean_rank() {
        assert_eq!(rank_among(&[0.5; 4], 2, |_| false), 2.5);
    }

    #[test]
    fn filtering_never_worsens_rank() {
        let scores = [0.9, 0.2, 0.7, 0.7, 0.1];
        let raw = rank_among(&scores, 2, |_| false);
        let filtered = rank_among(&scores, 2, |i| i == 0 || i == 3);
        assert_eq!(raw, 2.5);
        assert_eq!(filtered, 1.0);
    }

    #[test]
    fn report_consistency() {
        let r = EvalReport::from_ranks(&[1.0, 2.5, 4.0, 11.0], Protocol::Raw).unwrap();
        assert!((r.mrr - (1.0 + 0.4 + 0.25 + 1.0 / 11.0) / 4.0).abs() < 1e-15);
        assert_eq!(r.hits_at[&1], 0.25);
        assert_eq!(r.hits_at[&3], 0.5);
        assert_eq!(r.hits_at[&10], 0.75);
        assert!(r.hits_at[&1] <= r.mrr);
        assert!(EvalReport::from_ranks(&[], Protocol::Raw).is_err());
    }

    #[test]
    fn small_graph_hits_at_ten_is_one() {
        let mut kg = KnowledgeGraph::new();
        kg.add_named("a", "r", "b");
        kg.add_named("b", "r", "c");
        let params = ParameterStore::init_uniform(AnsatzSpec::new(2, 1).unwrap(), 3, 1, 0);
        let test: Vec<Triple> = kg.triples().iter().copied().collect();
        let raw = evaluate(
            &params,
            &test,
            &kg,
            Protocol::Raw,
            ScoreScheme::Swap,
            ScoreMode::Exact,
        )
        .unwrap();
        let filt = evaluate(
            &params,
            &test,
            &kg,
            Protocol::Filtered,
            ScoreScheme::Swap,
            ScoreMode::Exact,
        )
        .unwrap();
        assert_eq!(raw.hits_at[&10], 1.0);
        assert_eq!(raw.n_queries, 4);
        assert!(filt.mrr >= raw.mrr);
        assert!(evaluate(
            &params,
            &[],
            &kg,
            Protocol::Raw,
            ScoreScheme::Swap,
            ScoreMode::Exact
        )
        .is_err());
        assert!(rank_tail(
            &params,
            0,
            0,
            9,
            &kg,
            Protocol::Raw,
            ScoreScheme::Swap,
            ScoreMode::Exact
        )
        .is_err());
    }
}
