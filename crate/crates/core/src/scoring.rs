//! The three triple-scoring circuits and their score maps.
//!
//! With `U_1 = U(theta_r) V(theta_h) H^n` and `U_2 = V(theta_t) H^n`:
//!
//! * switch test (`n + 1` qubits): `P(ancilla = 0) = (1 + Re<t|U_r|h>) / 2`
//! * swap test (`2n + 1` qubits): `P(ancilla = 0) = (1 + |<t|U_r|h>|^2) / 2`
//! * compute-uncompute (`n` qubits): `P(0...0) = |<t|U_r|h>|^2`
//!
//! Both ancilla tests recover their score as `2 P(ancilla = 0) - 1`. The
//! ancilla is always the highest-indexed qubit, so the entity register sits on
//! qubits `0..n` in every scheme.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{entity_state_circuit, relation_unitary_circuit, AnsatzSpec, ParamVector};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::statevector::{inner_product, run_circuit, sample_distribution, Histogram, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreScheme {
    Switch,
    Swap,
    ComputeUncompute,
}

impl ScoreScheme {
    pub const ALL: [ScoreScheme; 3] = [
        ScoreScheme::Switch,
        ScoreScheme::Swap,
        ScoreScheme::ComputeUncompute,
    ];

    pub fn range(self) -> (f64, f64) {
        match self {
            ScoreScheme::Switch => (-1.0, 1.0),
            ScoreScheme::Swap | ScoreScheme::ComputeUncompute => (0.0, 1.0),
        }
    }

    /// Circuit width for an `n`-qubit entity register.
    pub fn circuit_qubits(self, n: usize) -> usize {
        match self {
            ScoreScheme::Switch => n + 1,
            ScoreScheme::Swap => 2 * n + 1,
            ScoreScheme::ComputeUncompute => n,
        }
    }

    /// Qubits read out to obtain the score.
    pub fn measured_qubits(self, n: usize) -> Vec<usize> {
        match self {
            ScoreScheme::Switch => vec![n],
            ScoreScheme::Swap => vec![2 * n],
            ScoreScheme::ComputeUncompute => (0..n).collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScoreScheme::Switch => "switch",
            ScoreScheme::Swap => "swap",
            ScoreScheme::ComputeUncompute => "compute-uncompute",
        }
    }

    /// Whether the score is linear in the prepared amplitudes (switch) rather
    /// than quadratic (overlap schemes).
    pub fn is_linear_in_amplitude(self) -> bool {
        matches!(self, ScoreScheme::Switch)
    }
}

impl fmt::Display for ScoreScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "switch" => Ok(ScoreScheme::Switch),
            "swap" => Ok(ScoreScheme::Swap),
            "compute-uncompute" | "cu" | "c-u" => Ok(ScoreScheme::ComputeUncompute),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreResult {
    /// Score clamped to the scheme's range.
    pub value: f64,
    /// Score before clamping.
    pub raw_value: f64,
    pub scheme: ScoreScheme,
    pub mode: ScoreMode,
}

impl ScoreResult {
    pub(crate) fn new(scheme: ScoreScheme, raw_value: f64, mode: ScoreMode) -> Self {
        let (lo, hi) = scheme.range();
        ScoreResult {
            value: raw_value.clamp(lo, hi),
            raw_value,
            scheme,
            mode,
        }
    }

    pub fn shots(&self) -> Option<u64> {
        match self.mode {
            ScoreMode::Exact => None,
            ScoreMode::Sampled { shots, .. } => Some(shots),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.mode {
            ScoreMode::Exact => None,
            ScoreMode::Sampled { seed, .. } => Some(seed),
        }
    }
}

/// Prepared circuits for one triple: `head` and `tail` prepare entity states
/// from |0...0>, `relation` is the relation unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct TriplePrep {
    pub head: Circuit,
    pub relation: Circuit,
    pub tail: Circuit,
}

impl TriplePrep {
    pub fn from_params(
        spec: &AnsatzSpec,
        theta_h: &ParamVector,
        theta_r: &ParamVector,
        theta_t: &ParamVector,
    ) -> Result<Self> {
        Ok(TriplePrep {
            head: entity_state_circuit(spec, theta_h)?,
            relation: relation_unitary_circuit(spec, theta_r)?,
            tail: entity_state_circuit(spec, theta_t)?,
        })
    }

    /// Arbitrary circuits; all three must act on the same register width.
    pub fn from_circuits(head: Circuit, relation: Circuit, tail: Circuit) -> Result<Self> {
        for c in [&relation, &tail] {
            if c.n_qubits != head.n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: head.n_qubits,
                    actual: c.n_qubits,
                });
            }
        }
        Ok(TriplePrep {
            head,
            relation,
            tail,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.head.n_qubits
    }

    /// `U_1 = U_r V_h H^n`.
    pub fn u1(&self) -> Result<Circuit> {
        self.head.then(&self.relation)
    }

    /// `U_2 = V_t H^n`.
    pub fn u2(&self) -> &Circuit {
        &self.tail
    }
}

pub fn switch_circuit(prep: &TriplePrep) -> Result<Circuit> {
    let n = prep.n_qubits();
    let ancilla = n;
    let mut c = Circuit::new(n + 1);
    c.push(Gate::H(ancilla))?;
    c.push(Gate::Controlled {
        control: ancilla,
        body: prep.u1()?,
    })?;
    c.push(Gate::AntiControlled {
        control: ancilla,
        body: prep.u2().clone(),
    })?;
    c.push(Gate::H(ancilla))?;
    Ok(c)
}

pub fn swap_circuit(prep: &TriplePrep) -> Result<Circuit> {
    let n = prep.n_qubits();
    let width = 2 * n + 1;
    let ancilla = 2 * n;
    let mut c = Circuit::new(width);
    c.append(&prep.u1()?.embedded(0, width)?)?;
    c.append(&prep.u2().embedded(n, width)?)?;
    c.push(Gate::H(ancilla))?;
    for q in 0..n {
        c.push(Gate::Cswap {
            control: ancilla,
            a: q,
            b: n + q,
        })?;
    }
    c.push(Gate::H(ancilla))?;
    Ok(c)
}

pub fn cu_circuit(prep: &TriplePrep) -> Result<Circuit> {
    prep.u1()?.then(&prep.u2().adjoint())
}

pub fn scheme_circuit(scheme: ScoreScheme, prep: &TriplePrep) -> Result<Circuit> {
    match scheme {
        ScoreScheme::Switch => switch_circuit(prep),
        ScoreScheme::Swap => swap_circuit(prep),
        ScoreScheme::ComputeUncompute => cu_circuit(prep),
    }
}

pub fn build_switch_circuit(
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
) -> Result<Circuit> {
    switch_circuit(&TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?)
}

pub fn build_swap_circuit(
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
) -> Result<Circuit> {
    swap_circuit(&TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?)
}

pub fn build_cu_circuit(
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
) -> Result<Circuit> {
    cu_circuit(&TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?)
}

/// Score from an outcome distribution over the full scheme circuit.
pub fn score_from_distribution(scheme: ScoreScheme, probs: &[f64]) -> f64 {
    match scheme {
        ScoreScheme::Switch | ScoreScheme::Swap => {
            let ancilla_bit = probs.len() >> 1;
            let p0: f64 = probs
                .iter()
                .enumerate()
                .filter(|(i, _)| i & ancilla_bit == 0)
                .map(|(_, p)| p)
                .sum();
            2.0 * p0 - 1.0
        }
        ScoreScheme::ComputeUncompute => probs[0],
    }
}

/// Final state of the scheme circuit.
pub fn scheme_state(scheme: ScoreScheme, prep: &TriplePrep) -> Result<Statevector> {
    run_circuit(&scheme_circuit(scheme, prep)?)
}

pub fn exact_score_prep(scheme: ScoreScheme, prep: &TriplePrep) -> Result<ScoreResult> {
    let state = scheme_state(scheme, prep)?;
    let raw = score_from_distribution(scheme, &state.probabilities());
    Ok(ScoreResult::new(scheme, raw, ScoreMode::Exact))
}

pub fn estimate_score_prep(
    scheme: ScoreScheme,
    prep: &TriplePrep,
    shots: u64,
    seed: u64,
) -> Result<ScoreResult> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let state = scheme_state(scheme, prep)?;
    let hist = sample_distribution(&state.probabilities(), state.n_qubits(), shots, seed)?;
    let raw = score_from_histogram(scheme, &hist);
    Ok(ScoreResult::new(
        scheme,
        raw,
        ScoreMode::Sampled { shots, seed },
    ))
}

/// Score from measurement counts over the full scheme circuit.
pub fn score_from_histogram(scheme: ScoreScheme, hist: &Histogram) -> f64 {
    match scheme {
        ScoreScheme::Switch | ScoreScheme::Swap => {
            let ancilla_bit = 1 << (hist.n_qubits - 1);
            2.0 * hist.frequency(|i| i & ancilla_bit == 0) - 1.0
        }
        ScoreScheme::ComputeUncompute => hist.frequency(|i| i == 0),
    }
}

pub fn score_prep(scheme: ScoreScheme, prep: &TriplePrep, mode: ScoreMode) -> Result<ScoreResult> {
    match mode {
        ScoreMode::Exact => exact_score_prep(scheme, prep),
        ScoreMode::Sampled { shots, seed } => estimate_score_prep(scheme, prep, shots, seed),
    }
}

pub fn exact_score(
    scheme: ScoreScheme,
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
) -> Result<ScoreResult> {
    exact_score_prep(
        scheme,
        &TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?,
    )
}

pub fn estimate_score(
    scheme: ScoreScheme,
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
    shots: u64,
    seed: u64,
) -> Result<ScoreResult> {
    estimate_score_prep(
        scheme,
        &TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?,
        shots,
        seed,
    )
}

/// `<t|U_r|h>` from directly simulated register states, with no score circuit.
pub fn oracle_overlap(prep: &TriplePrep) -> Result<Complex64> {
    let mut head = run_circuit(&prep.head)?;
    head.apply_circuit(&prep.relation)?;
    let tail = run_circuit(&prep.tail)?;
    inner_product(&tail, &head)
}

pub fn oracle_score_prep(scheme: ScoreScheme, prep: &TriplePrep) -> Result<f64> {
    let z = oracle_overlap(prep)?;
    Ok(match scheme {
        ScoreScheme::Switch => z.re,
        ScoreScheme::Swap | ScoreScheme::ComputeUncompute => z.norm_sqr(),
    })
}

pub fn oracle_score(
    scheme: ScoreScheme,
    spec: &AnsatzSpec,
    theta_h: &ParamVector,
    theta_r: &ParamVector,
    theta_t: &ParamVector,
) -> Result<f64> {
    oracle_score_prep(
        scheme,
        &TriplePrep::from_params(spec, theta_h, theta_r, theta_t)?,
    )
}

/// Largest disagreements between the three exact scores and the overlap
/// oracle over random parameter draws at one register size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub n: usize,
    pub samples: usize,
    pub max_abs_swap_minus_cu: f64,
    pub max_abs_swap_minus_oracle: f64,
    pub max_abs_cu_minus_oracle: f64,
    pub max_abs_switch_minus_re_oracle: f64,
}

impl EquivalenceRow {
    pub const CSV_HEADER: &'static str =
        "n,samples,max_abs_swap_minus_cu,max_abs_swap_minus_oracle,\
max_abs_cu_minus_oracle,max_abs_switch_minus_re_oracle";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e}",
            self.n,
            self.samples,
            self.max_abs_swap_minus_cu,
            self.max_abs_swap_minus_oracle,
            self.max_abs_cu_minus_oracle,
            self.max_abs_switch_minus_re_oracle
        )
    }
}

/// Uniform angles in `[-pi, pi)` for one head, relation and tail.
pub fn random_thetas(spec: &AnsatzSpec, seed: u64) -> (ParamVector, ParamVector, ParamVector) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        ParamVector(
            (0..spec.param_count())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect(),
        )
    };
    (draw(), draw(), draw())
}

/// Exact scores of every scheme against [`oracle_overlap`] for `samples`
/// random draws seeded from `derive_seed(seed, j, n)`.
pub fn scheme_equivalence(spec: &AnsatzSpec, samples: usize, seed: u64) -> Result<EquivalenceRow> {
    use rayon::prelude::*;
    let diffs: Vec<[f64; 4]> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let (h, r, t) = random_thetas(spec, derive_seed(seed, j as u64, spec.n_qubits as u64));
            let prep = TriplePrep::from_params(spec, &h, &r, &t)?;
            let z = oracle_overlap(&prep)?;
            let swap = exact_score_prep(ScoreScheme::Swap, &prep)?.raw_value;
            let cu = exact_score_prep(ScoreScheme::ComputeUncompute, &prep)?.raw_value;
            let switch = exact_score_prep(ScoreScheme::Switch, &prep)?.raw_value;
            Ok([
                (swap - cu).abs(),
                (swap - z.norm_sqr()).abs(),
                (cu - z.norm_sqr()).abs(),
                (switch - z.re).abs(),
            ])
        })
        .collect::<Result<_>>()?;
    let max = |k: usize| diffs.iter().map(|d| d[k]).fold(0.0, f64::max);
    Ok(EquivalenceRow {
        n: spec.n_qubits,
        samples,
        max_abs_swap_minus_cu: max(0),
        max_abs_swap_minus_oracle: max(1),
        max_abs_cu_minus_oracle: max(2),
        max_abs_switch_minus_re_oracle: max(3),
    })
}

/// Shots needed to estimate a score to precision `epsilon`: `ceil(1 / epsilon^2)`.
pub fn shots_for_precision(epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidPrecision(epsilon));
    }
    let raw = 1.0 / (epsilon * epsilon);
    // 1 / 0.01^2 evaluates to 10000.000000000002; snap float noise before ceil
    let nearest = raw.round();
    let shots = if (raw - nearest).abs() <= 1e-9 * nearest {
        nearest
    } else {
        raw.ceil()
    };
    Ok(shots as u64)
}

/// Per-call sampling seed: splitmix64 folded over `(global, triple_id, epoch)`.
pub fn derive_seed(global: u64, triple_id: u64, epoch: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(global) ^ triple_id) ^ epoch)
}
