//! Readout and two-qubit gate noise at the level of outcome distributions.
//!
//! Gate error is a global depolarizing approximation: with `g` two-qubit gates
//! in the decomposed scoring circuit, a weight `(1 - p2)^g` of the ideal
//! distribution survives and the remainder is spread uniformly over all
//! outcomes. Readout error flips every measured bit independently with
//! probability `1 - F_read`. Only the qubits a scheme actually reads are
//! subject to readout error: the ancilla for the switch and swap tests, every
//! register qubit for compute-uncompute.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{entity_state_circuit, AnsatzSpec, ParamVector};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::resources::report_for_circuit;
use crate::scoring::{
    derive_seed, exact_score_prep, scheme_circuit, score_from_distribution, score_from_histogram,
    ScoreMode, ScoreResult, ScoreScheme, TriplePrep,
};
use crate::statevector::{run_circuit, sample_distribution};

const DISTRIBUTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout_fidelity: f64,
    pub two_qubit_error: f64,
}

impl NoiseModel {
    pub fn new(readout_fidelity: f64, two_qubit_error: f64) -> Result<Self> {
        if !(readout_fidelity > 0.5 && readout_fidelity <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "readout fidelity must lie in (0.5, 1], got {readout_fidelity}"
            )));
        }
        if !(0.0..1.0).contains(&two_qubit_error) {
            return Err(Error::InvalidConfig(format!(
                "two-qubit error must lie in [0, 1), got {two_qubit_error}"
            )));
        }
        Ok(NoiseModel {
            readout_fidelity,
            two_qubit_error,
        })
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            readout_fidelity: 1.0,
            two_qubit_error: 0.0,
        }
    }
}

fn check_distribution(probs: &[f64], n_bits: usize) -> Result<()> {
    if probs.len() != 1 << n_bits {
        return Err(Error::InvalidDistribution(format!(
            "expected {} outcomes, got {}",
            1usize << n_bits,
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "negative or NaN weight {p}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {total}"
        )));
    }
    Ok(())
}

/// Symmetric bit-flip confusion on the given bit positions of a full distribution.
fn flip_bits(probs: &mut [f64], bits: &[usize], fidelity: f64) {
    if fidelity == 1.0 {
        return;
    }
    let flip = 1.0 - fidelity;
    for &b in bits {
        let mask = 1usize << b;
        for i in 0..probs.len() {
            if i & mask == 0 {
                let (p0, p1) = (probs[i], probs[i | mask]);
                probs[i] = fidelity * p0 + flip * p1;
                probs[i | mask] = flip * p0 + fidelity * p1;
            }
        }
    }
}

/// Readout confusion on a distribution over `n_measured` bits.
pub fn apply_readout_error(
    probs: &[f64],
    n_measured: usize,
    model: &NoiseModel,
) -> Result<Vec<f64>> {
    check_distribution(probs, n_measured)?;
    let mut out = probs.to_vec();
    let bits: Vec<usize> = (0..n_measured).collect();
    flip_bits(&mut out, &bits, model.readout_fidelity);
    Ok(out)
}

/// Mixes `probs` with the uniform distribution, keeping weight
/// `(1 - p2)^two_qubit_gates`.
pub fn apply_gate_error(probs: &[f64], two_qubit_gates: usize, model: &NoiseModel) -> Vec<f64> {
    if model.two_qubit_error == 0.0 || two_qubit_gates == 0 {
        return probs.to_vec();
    }
    let keep = (1.0 - model.two_qubit_error).powi(two_qubit_gates as i32);
    let spread = (1.0 - keep) / probs.len() as f64;
    probs.iter().map(|p| keep * p + spread).collect()
}

/// Outcome distribution of the scheme circuit after gate and readout noise.
pub fn noisy_distribution(
    scheme: ScoreScheme,
    prep: &TriplePrep,
    model: &NoiseModel,
) -> Result<Vec<f64>> {
    let circuit = scheme_circuit(scheme, prep)?;
    let ideal = run_circuit(&circuit)?.probabilities();
    let gates = report_for_circuit(scheme, &circuit)?.two_qubit_gates;
    let mut probs = apply_gate_error(&ideal, gates, model);
    flip_bits(
        &mut probs,
        &scheme.measured_qubits(prep.n_qubits()),
        model.readout_fidelity,
    );
    Ok(probs)
}

pub fn noisy_score_prep(
    scheme: ScoreScheme,
    prep: &TriplePrep,
    model: &NoiseModel,
    mode: ScoreMode,
) -> Result<ScoreResult> {
    let probs = noisy_distribution(scheme, prep, model)?;
    let raw = match mode {
        ScoreMode::Exact => score_from_distribution(scheme, &probs),
        ScoreMode::Sampled { shots, seed } => {
            let width = scheme.circuit_qubits(prep.n_qubits());
            score_from_histogram(scheme, &sample_distribution(&probs, width, shots, seed)?)
        }
    };
    Ok(ScoreResult::new(scheme, raw, mode))
}

pub fn noisy_score(
    scheme: ScoreScheme,
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
    model: &NoiseModel,
    mode: ScoreMode,
) -> Result<ScoreResult> {
    noisy_score_prep(
        scheme,
        &TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?,
        model,
        mode,
    )
}

/// How parameters are drawn for each sweep sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaPolicy {
    /// Independent uniform angles for head, relation and tail.
    Random,
    /// Random head angles, tail equal to head, identity relation: the exact
    /// score is 1 in every scheme.
    PerfectOverlap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub n_layers: usize,
    pub samples: usize,
    pub policy: ThetaPolicy,
    pub model: NoiseModel,
    /// `None` scores the noisy distribution exactly.
    pub shots: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: ScoreScheme,
    pub n: usize,
    pub f_read: f64,
    pub p2: f64,
    /// 0 when the noisy distribution was scored exactly.
    pub shots: u64,
    pub mean_abs_bias: f64,
    pub std_bias: f64,
    pub mean_exact: f64,
    pub mean_noisy: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "scheme,n,F_read,p2,shots,mean_abs_bias,std_bias,mean_exact,mean_noisy";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            self.f_read,
            self.p2,
            self.shots,
            self.mean_abs_bias,
            self.std_bias,
            self.mean_exact,
            self.mean_noisy
        )
    }
}

fn random_params(rng: &mut ChaCha8Rng, len: usize) -> ParamVector {
    ParamVector(
        (0..len)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect(),
    )
}

fn sweep_prep(spec: &AnsatzSpec, policy: ThetaPolicy, seed: u64) -> Result<TriplePrep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = spec.param_count();
    match policy {
        ThetaPolicy::Random => {
            let (h, r, t) = (
                random_params(&mut rng, len),
                random_params(&mut rng, len),
                random_params(&mut rng, len),
            );
            TriplePrep::from_params(spec, &h, &r, &t)
        }
        ThetaPolicy::PerfectOverlap => {
            let h = entity_state_circuit(spec, &random_params(&mut rng, len))?;
            TriplePrep::from_circuits(h.clone(), Circuit::new(spec.n_qubits), h)
        }
    }
}

/// Noisy-versus-exact score statistics per scheme and register size, with
/// parameters matched across schemes. Rows are sorted by `(scheme, n)`.
pub fn scheme_bias_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.samples == 0 {
        return Err(Error::InvalidConfig(
            "sweep needs at least one sample".into(),
        ));
    }
    let mut rows = Vec::new();
    for scheme in ScoreScheme::ALL {
        for &n in &cfg.n_values {
            let spec = AnsatzSpec::new(n, cfg.n_layers)?;
            let pairs: Vec<(f64, f64)> = (0..cfg.samples)
                .into_par_iter()
                .map(|j| {
                    let prep =
                        sweep_prep(&spec, cfg.policy, derive_seed(cfg.seed, j as u64, n as u64))?;
                    let exact = exact_score_prep(scheme, &prep)?.value;
                    let mode = match cfg.shots {
                        None => ScoreMode::Exact,
                        Some(shots) => ScoreMode::Sampled {
                            shots,
                            seed: derive_seed(cfg.seed ^ 0x5EED, j as u64, n as u64),
                        },
                    };
                    let noisy = noisy_score_prep(scheme, &prep, &cfg.model, mode)?.value;
                    Ok((exact, noisy))
                })
                .collect::<Result<_>>()?;
            let m = pairs.len() as f64;
            let bias: Vec<f64> = pairs.iter().map(|(e, y)| y - e).collect();
            let mean_bias = bias.iter().sum::<f64>() / m;
            rows.push(SweepRow {
                scheme,
                n,
                f_read: cfg.model.readout_fidelity,
                p2: cfg.model.two_qubit_error,
                shots: cfg.shots.unwrap_or(0),
                mean_abs_bias: bias.iter().map(|b| b.abs()).sum::<f64>() / m,
                std_bias: (bias.iter().map(|b| (b - mean_bias).powi(2)).sum::<f64>() / m).sqrt(),
                mean_exact: pairs.iter().map(|p| p.0).sum::<f64>() / m,
                mean_noisy: pairs.iter().map(|p| p.1).sum::<f64>() / m,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::estimate_score_prep;

    fn perfect_prep(n: usize) -> TriplePrep {
        sweep_prep(
            &AnsatzSpec::new(n, 2).unwrap(),
            ThetaPolicy::PerfectOverlap,
            17,
        )
        .unwrap()
    }

    #[test]
    fn readout_on_all_zero_is_fidelity_power() {
        for n in 1..=6 {
            let mut probs = vec![0.0; 1 << n];
            probs[0] = 1.0;
            let model = NoiseModel::new(0.93, 0.0).unwrap();
            let out = apply_readout_error(&probs, n, &model).unwrap();
            assert!((out[0] - 0.93f64.powi(n as i32)).abs() < 1e-15);
            assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_bit_confusion() {
        let model = NoiseModel::new(0.9, 0.0).unwrap();
        let out = apply_readout_error(&[1.0, 0.0], 1, &model).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
        let same = apply_readout_error(&[0.3, 0.7], 1, &NoiseModel::noiseless()).unwrap();
        assert_eq!(same, vec![0.3, 0.7]);
    }

    #[test]
    fn malformed_distributions_rejected() {
        let model = NoiseModel::noiseless();
        assert!(apply_readout_error(&[0.5, 0.4], 1, &model).is_err());
        assert!(apply_readout_error(&[1.0, 0.0, 0.0], 1, &model).is_err());
        assert!(apply_readout_error(&[1.5, -0.5], 1, &model).is_err());
    }

    #[test]
    fn model_ranges() {
        assert!(NoiseModel::new(0.5, 0.0).is_err());
        assert!(NoiseModel::new(1.01, 0.0).is_err());
        assert!(NoiseModel::new(0.9, 1.0).is_err());
        assert!(NoiseModel::new(0.9, -0.1).is_err());
        assert!(NoiseModel::new(1.0, 0.0).is_ok());
    }

    #[test]
    fn perfect_overlap_scores() {
        let model = NoiseModel::new(0.95, 0.0).unwrap();
        for n in 1..=4 {
            let prep = perfect_prep(n);
            let cu = noisy_score_prep(
                ScoreScheme::ComputeUncompute,
                &prep,
                &model,
                ScoreMode::Exact,
            )
            .unwrap();
            assert!((cu.value - 0.95f64.powi(n as i32)).abs() < 1e-12);
            for scheme in [ScoreScheme::Switch, ScoreScheme::Swap] {
                let s = noisy_score_prep(scheme, &prep, &model, ScoreMode::Exact).unwrap();
                assert!(
                    (s.value - (2.0 * 0.95 - 1.0)).abs() < 1e-12,
                    "{scheme} n={n}"
                );
            }
        }
    }

    #[test]
    fn noiseless_model_reproduces_sampling_bit_for_bit() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let prep = sweep_prep(&spec, ThetaPolicy::Random, 5).unwrap();
        for scheme in ScoreScheme::ALL {
            let clean = estimate_score_prep(scheme, &prep, 2000, 77).unwrap();
            let noisy = noisy_score_prep(
                scheme,
                &prep,
                &NoiseModel::noiseless(),
                ScoreMode::Sampled {
                    shots: 2000,
                    seed: 77,
                },
            )
            .unwrap();
            assert_eq!(clean.raw_value.to_bits(), noisy.raw_value.to_bits());
        }
    }

    #[test]
    fn noisy_distributions_stay_valid() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let model = NoiseModel::new(0.9, 0.02).unwrap();
        for seed in 0..5 {
            let prep = sweep_prep(&spec, ThetaPolicy::Random, seed).unwrap();
            for scheme in ScoreScheme::ALL {
                let p = noisy_distribution(scheme, &prep, &model).unwrap();
                assert!(p.iter().all(|&x| x >= 0.0));
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gate_error_weight() {
        let model = NoiseModel::new(1.0, 0.1).unwrap();
        let out = apply_gate_error(&[1.0, 0.0], 2, &model);
        let keep = 0.9f64 * 0.9;
        assert!((out[0] - (keep + (1.0 - keep) / 2.0)).abs() < 1e-15);
    }
}
