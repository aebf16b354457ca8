//! Dataset construction, MSE loss, gradients and the hybrid training loop.

mod gradient;
mod graph;
mod loss;
mod optimizer;
mod params;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, DEFAULT_LAYERS};
use crate::error::{Error, Result};
use crate::scoring::{derive_seed, ScoreMode, ScoreScheme};

pub use gradient::{
    full_gradient_parameter_shift, gradient_parameter_shift, gradient_spsa, ShiftRule,
};
pub use graph::{
    negative_sample, negative_sample_excluding, KnowledgeGraph, LabeledTriple, Triple,
};
pub use loss::{mse_loss, score_triple};
pub use optimizer::{Optimizer, OptimizerKind};
pub use params::{ParamCoord, ParameterStore};

use gradient::{parameter_shift_tagged, spsa_tagged};
use loss::{mse_tagged, Tagged};

// seed streams split off the run seed
const INIT_STREAM: u64 = 1;
const DATA_STREAM: u64 = 2;
const SHUFFLE_STREAM: u64 = 3;
const SAMPLING_STREAM: u64 = 4;
const SPSA_STREAM: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TrainMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GradientMethod {
    ParameterShift,
    Spsa { perturbation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub scheme: ScoreScheme,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// `None` trains full-batch.
    pub batch_size: Option<usize>,
    pub negatives_per_positive: usize,
    pub seed: u64,
    pub mode: TrainMode,
    pub gradient: GradientMethod,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            scheme: ScoreScheme::ComputeUncompute,
            n_qubits: 2,
            n_layers: DEFAULT_LAYERS,
            learning_rate: 0.01,
            epochs: 100,
            batch_size: None,
            negatives_per_positive: 1,
            seed: 0,
            mode: TrainMode::Exact,
            gradient: GradientMethod::ParameterShift,
            optimizer: OptimizerKind::default(),
        }
    }
}

impl TrainConfig {
    pub fn spec(&self) -> Result<AnsatzSpec> {
        AnsatzSpec::new(self.n_qubits, self.n_layers)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == Some(0) {
            return bad("batch size must be at least 1");
        }
        if self.negatives_per_positive == 0 {
            return bad("negatives per positive must be at least 1");
        }
        if let TrainMode::Sampled { shots: 0 } = self.mode {
            return bad("shots must be at least 1");
        }
        if let GradientMethod::Spsa { perturbation } = self.gradient {
            if !(perturbation > 0.0 && perturbation.is_finite()) {
                return bad("SPSA perturbation must be positive");
            }
        }
        if let OptimizerKind::Adam {
            beta1,
            beta2,
            epsilon,
        } = self.optimizer
        {
            if !((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && epsilon > 0.0) {
                return bad("Adam needs beta1, beta2 in [0, 1) and epsilon > 0");
            }
        }
        Ok(())
    }

    /// Score mode used for losses during training.
    pub fn score_mode(&self) -> ScoreMode {
        match self.mode {
            TrainMode::Exact => ScoreMode::Exact,
            TrainMode::Sampled { shots } => ScoreMode::Sampled {
                shots,
                seed: derive_seed(self.seed, SAMPLING_STREAM, 0),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: ParameterStore,
    /// Full-dataset loss after each epoch.
    pub loss_history: Vec<f64>,
    pub dataset: Vec<LabeledTriple>,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        *self.loss_history.last().expect("at least one epoch")
    }
}

/// Trains on `kg` with negatives drawn once from the run seed.
pub fn train(kg: &KnowledgeGraph, config: &TrainConfig) -> Result<TrainOutcome> {
    train_excluding(kg, config, &HashSet::new())
}

/// As [`train`], never using a triple in `held_out` as a negative.
pub fn train_excluding(
    kg: &KnowledgeGraph,
    config: &TrainConfig,
    held_out: &HashSet<Triple>,
) -> Result<TrainOutcome> {
    let dataset = build_dataset(kg, config, held_out)?;
    train_on_dataset(kg.n_entities(), kg.n_relations(), dataset, config)
}

/// Positives of `kg` with negatives drawn from the run's data stream.
pub fn build_dataset(
    kg: &KnowledgeGraph,
    config: &TrainConfig,
    held_out: &HashSet<Triple>,
) -> Result<Vec<LabeledTriple>> {
    config.validate()?;
    negative_sample_excluding(
        kg,
        config.negatives_per_positive,
        derive_seed(config.seed, DATA_STREAM, 0),
        held_out,
    )
}

/// Optimizes freshly initialized parameters against a fixed labeled dataset.
pub fn train_on_dataset(
    n_entities: usize,
    n_relations: usize,
    dataset: Vec<LabeledTriple>,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyData);
    }
    let spec = config.spec()?;
    let mut params = ParameterStore::init_uniform(
        spec,
        n_entities,
        n_relations,
        derive_seed(config.seed, INIT_STREAM, 0),
    );
    for item in &dataset {
        params.entity(item.triple.head)?;
        params.relation(item.triple.relation)?;
        params.entity(item.triple.tail)?;
    }
    let mode = config.score_mode();
    let tagged: Vec<Tagged> = loss::tag(&dataset);
    let batch_size = config.batch_size.unwrap_or(tagged.len()).min(tagged.len());
    let mut optimizer = Optimizer::new(config.optimizer, config.learning_rate, params.len());
    let mut flat = params.to_flat();
    let mut order = tagged.clone();
    let mut loss_history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs as u64 {
        if batch_size < tagged.len() {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.seed, SHUFFLE_STREAM, epoch));
            order.copy_from_slice(&tagged);
            order.shuffle(&mut rng);
        }
        for (b, batch) in order.chunks(batch_size).enumerate() {
            let grad = match config.gradient {
                GradientMethod::ParameterShift => {
                    parameter_shift_tagged(&params, batch, config.scheme, mode, epoch)?
                }
                GradientMethod::Spsa { perturbation } => spsa_tagged(
                    &params,
                    batch,
                    config.scheme,
                    mode,
                    epoch,
                    derive_seed(config.seed, SPSA_STREAM, epoch * 1_000_003 + b as u64),
                    perturbation,
                )?,
            };
            optimizer.step(&mut flat, &grad);
            params.set_flat(&flat)?;
        }
        loss_history.push(mse_tagged(&params, &tagged, config.scheme, mode, epoch)?);
    }
    Ok(TrainOutcome {
        params,
        loss_history,
        dataset,
    })
}
