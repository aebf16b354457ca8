//! Dense statevector simulation.
//!
//! Bitstrings are written with qubit `n-1` leftmost, so `"10"` on two qubits
//! is basis index 2 (qubit 1 set).

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub const NORM_TOLERANCE: f64 = 1e-10;

type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<Statevector> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_conditioned(&mut self.amplitudes, gate, 0, 0);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits > self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: circuit.n_qubits,
            });
        }
        for g in circuit.gates() {
            self.apply_gate_in_place(g)?;
        }
        Ok(())
    }

    /// Outcome probabilities indexed by basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability_of(&self, bits: &str) -> Result<f64> {
        let idx = basis_index(bits, self.n_qubits)?;
        Ok(self.amplitudes[idx].norm_sqr())
    }

    pub fn probability_of_index(&self, index: usize) -> Result<f64> {
        self.amplitudes
            .get(index)
            .map(|a| a.norm_sqr())
            .ok_or(Error::IndexOutOfRange {
                what: "basis state",
                index,
                size: self.dim(),
            })
    }

    /// Probability that `qubit` is measured as `value`.
    pub fn marginal_probability(&self, qubit: usize, value: bool) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let bit = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & bit != 0) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Result<Histogram> {
        sample_distribution(&self.probabilities(), self.n_qubits, shots, seed)
    }
}

/// Runs `circuit` on |0...0>.
pub fn run_circuit(circuit: &Circuit) -> Result<Statevector> {
    let mut state = Statevector::zero(circuit.n_qubits);
    state.apply_circuit(circuit)?;
    Ok(state)
}

/// <a|b>, conjugate-linear in `a`.
pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits,
            actual: b.n_qubits,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

pub fn basis_index(bits: &str, n_qubits: usize) -> Result<usize> {
    let invalid = || Error::InvalidBitstring {
        bits: bits.to_string(),
        n_qubits,
    };
    if bits.len() != n_qubits {
        return Err(invalid());
    }
    bits.bytes().try_fold(0usize, |acc, b| match b {
        b'0' => Ok(acc << 1),
        b'1' => Ok((acc << 1) | 1),
        _ => Err(invalid()),
    })
}

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Measurement counts keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub n_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Fraction of shots whose outcome satisfies `pred`.
    pub fn frequency(&self, pred: impl Fn(usize) -> bool) -> f64 {
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(&i, _)| pred(i))
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.shots as f64
    }
}

/// Draws `shots` outcomes from `probs` with a ChaCha8 stream seeded by `seed`.
pub fn sample_distribution(
    probs: &[f64],
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if probs.len() != 1 << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            actual: probs.len(),
        });
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        if p.is_nan() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "negative or NaN weight {p}"
            )));
        }
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(Histogram {
        n_qubits,
        shots,
        counts,
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gate_matrix(gate: &Gate) -> Option<(usize, Matrix2)> {
    let zero = c(0.0, 0.0);
    Some(match *gate {
        Gate::H(q) => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            (q, [[h, h], [h, -h]])
        }
        Gate::X(q) => (q, [[zero, c(1.0, 0.0)], [c(1.0, 0.0), zero]]),
        Gate::Rx { qubit, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            (qubit, [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
        }
        Gate::Ry { qubit, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            (qubit, [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
        }
        Gate::Rz { qubit, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            (qubit, [[c(co, -s), zero], [zero, c(co, s)]])
        }
        _ => return None,
    })
}

/// Applies `gate` on the basis states whose bits under `mask` equal `value`.
fn apply_conditioned(amps: &mut [Complex64], gate: &Gate, mask: usize, value: usize) {
    if let Some((target, m)) = gate_matrix(gate) {
        apply_single(amps, target, &m, mask, value);
        return;
    }
    match gate {
        Gate::Cnot { control, target } => {
            let bit = 1 << control;
            swap_pairs(amps, 1 << target, 0, mask | bit, value | bit);
        }
        Gate::Swap(a, b) => swap_pairs(amps, 1 << a, 1 << b, mask, value),
        Gate::Cswap { control, a, b } => {
            let bit = 1 << control;
            swap_pairs(amps, 1 << a, 1 << b, mask | bit, value | bit);
        }
        Gate::Controlled { control, body } => {
            let bit = 1 << control;
            for g in body.gates() {
                apply_conditioned(amps, g, mask | bit, value | bit);
            }
        }
        Gate::AntiControlled { control, body } => {
            let bit = 1 << control;
            for g in body.gates() {
                apply_conditioned(amps, g, mask | bit, value);
            }
        }
        _ => unreachable!("single-qubit gates handled above"),
    }
}

fn apply_single(amps: &mut [Complex64], target: usize, m: &Matrix2, mask: usize, value: usize) {
    let bit = 1 << target;
    for i in 0..amps.len() {
        if i & bit != 0 || i & mask != value {
            continue;
        }
        let j = i | bit;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[j] = m[1][0] * a + m[1][1] * b;
    }
}

/// Exchanges amplitude `i` with `i ^ (bit_a | bit_b)` for every `i` with
/// `bit_a` set and `bit_b` clear. With `bit_b == 0` this is a bit flip on
/// `bit_a`, visited from the side where it is clear.
fn swap_pairs(amps: &mut [Complex64], bit_a: usize, bit_b: usize, mask: usize, value: usize) {
    for i in 0..amps.len() {
        if i & mask != value {
            continue;
        }
        let pick = if bit_b == 0 {
            i & bit_a == 0
        } else {
            i & bit_a != 0 && i & bit_b == 0
        };
        if pick {
            amps.swap(i, i ^ bit_a ^ bit_b);
        }
    }
}
