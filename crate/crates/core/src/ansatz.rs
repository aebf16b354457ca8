//! Hardware-efficient layered ansatz for entity states and relation unitaries.
//!
//! One layer is `RY` then `RZ` on every qubit followed by a ring of CNOTs
//! `i -> (i + 1) mod n` (no CNOT for a single qubit). Parameters are laid out
//! layer-major, then by qubit, with the `RY` angle before the `RZ` angle:
//! `theta[layer * 2n + 2q]` drives `RY` on qubit `q` and
//! `theta[layer * 2n + 2q + 1]` drives its `RZ`.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub const DEFAULT_LAYERS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        if n_qubits == 0 || n_layers == 0 {
            return Err(Error::InvalidConfig(
                "ansatz needs at least one qubit and one layer".into(),
            ));
        }
        Ok(AnsatzSpec { n_qubits, n_layers })
    }

    pub fn param_count(&self) -> usize {
        param_count(self)
    }

    pub fn check(&self, theta: &ParamVector) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::ParamCountMismatch {
                expected: self.param_count(),
                actual: theta.len(),
            });
        }
        Ok(())
    }
}

/// Trainable rotation angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn zeros(len: usize) -> Self {
        ParamVector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Copy with coordinate `i` moved by `delta`.
    pub fn shifted(&self, i: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.0[i] += delta;
        out
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        ParamVector(v)
    }
}

pub fn param_count(spec: &AnsatzSpec) -> usize {
    2 * spec.n_qubits * spec.n_layers
}

fn push_ring(circuit: &mut Circuit, n: usize) -> Result<()> {
    if n > 1 {
        for q in 0..n {
            circuit.push(Gate::cnot(q, (q + 1) % n))?;
        }
    }
    Ok(())
}

/// The layered ansatz without a Hadamard wall.
pub fn layered_circuit(spec: &AnsatzSpec, theta: &ParamVector) -> Result<Circuit> {
    spec.check(theta)?;
    let n = spec.n_qubits;
    let mut circuit = Circuit::new(n);
    for layer in theta.values().chunks(2 * n) {
        for (q, pair) in layer.chunks(2).enumerate() {
            circuit.push(Gate::ry(q, pair[0]))?;
            circuit.push(Gate::rz(q, pair[1]))?;
        }
        push_ring(&mut circuit, n)?;
    }
    Ok(circuit)
}

/// `H` on every qubit followed by `V(theta_e)`; prepares the entity state.
pub fn entity_state_circuit(spec: &AnsatzSpec, theta_e: &ParamVector) -> Result<Circuit> {
    spec.check(theta_e)?;
    let mut circuit = Circuit::new(spec.n_qubits);
    for q in 0..spec.n_qubits {
        circuit.push(Gate::H(q))?;
    }
    circuit.append(&layered_circuit(spec, theta_e)?)?;
    Ok(circuit)
}

/// `U(theta_r)`: same layout as the entity ansatz, no Hadamard wall.
pub fn relation_unitary_circuit(spec: &AnsatzSpec, theta_r: &ParamVector) -> Result<Circuit> {
    layered_circuit(spec, theta_r)
}

/// Only the CNOT rings of every layer; what the ansatz reduces to at zero angles.
pub fn entangling_skeleton(spec: &AnsatzSpec) -> Result<Circuit> {
    let mut circuit = Circuit::new(spec.n_qubits);
    for _ in 0..spec.n_layers {
        push_ring(&mut circuit, spec.n_qubits)?;
    }
    Ok(circuit)
}

pub fn adjoint(circuit: &Circuit) -> Circuit {
    circuit.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::run_circuit;

    #[test]
    fn param_counts() {
        assert_eq!(param_count(&AnsatzSpec::new(3, 2).unwrap()), 12);
        assert_eq!(param_count(&AnsatzSpec::new(1, 1).unwrap()), 2);
        assert!(AnsatzSpec::new(0, 1).is_err());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        assert!(matches!(
            entity_state_circuit(&spec, &ParamVector::zeros(7)),
            Err(Error::ParamCountMismatch {
                expected: 8,
                actual: 7
            })
        ));
        assert!(relation_unitary_circuit(&spec, &ParamVector::zeros(9)).is_err());
        assert!(entity_state_circuit(&spec, &ParamVector::zeros(spec.param_count())).is_ok());
    }

    #[test]
    fn zero_angles_single_qubit_is_plus_state() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let s = run_circuit(&entity_state_circuit(&spec, &ParamVector::zeros(2)).unwrap()).unwrap();
        assert!((s.probability_of("0").unwrap() - 0.5).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parameter_ordering_is_layer_then_qubit_then_ry_rz() {
        let spec = AnsatzSpec::new(2, 2).unwrap();
        let theta = ParamVector((0..8).map(|i| i as f64).collect());
        let c = relation_unitary_circuit(&spec, &theta).unwrap();
        let angles: Vec<(usize, f64)> = c
            .gates()
            .iter()
            .filter_map(|g| match *g {
                Gate::Ry { qubit, angle } | Gate::Rz { qubit, angle } => Some((qubit, angle)),
                _ => None,
            })
            .collect();
        assert_eq!(
            angles,
            vec![
                (0, 0.0),
                (0, 1.0),
                (1, 2.0),
                (1, 3.0),
                (0, 4.0),
                (0, 5.0),
                (1, 6.0),
                (1, 7.0)
            ]
        );
        assert!(matches!(c.gates()[2], Gate::Ry { qubit: 1, .. }));
        assert_eq!(c.gates()[4], Gate::cnot(0, 1));
        assert_eq!(c.gates()[5], Gate::cnot(1, 0));
    }

    #[test]
    fn single_qubit_has_no_cnots() {
        let spec = AnsatzSpec::new(1, 3).unwrap();
        let c = relation_unitary_circuit(&spec, &ParamVector::zeros(6)).unwrap();
        assert!(c.gates().iter().all(|g| !matches!(g, Gate::Cnot { .. })));
        assert!(entangling_skeleton(&spec).unwrap().is_empty());
    }

    #[test]
    fn depth_is_linear_in_qubits() {
        for n in 1..=10 {
            for layers in 1..=4 {
                let spec = AnsatzSpec::new(n, layers).unwrap();
                let theta = ParamVector::zeros(spec.param_count());
                let depth = entity_state_circuit(&spec, &theta).unwrap().depth();
                assert!(
                    depth <= 4 * n * layers,
                    "n={n} layers={layers} depth={depth}"
                );
            }
        }
    }

    #[test]
    fn construction_is_deterministic_and_adjoint_involutive() {
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let theta = ParamVector((0..12).map(|i| 0.1 * i as f64 - 0.4).collect());
        let a = entity_state_circuit(&spec, &theta).unwrap();
        let b = entity_state_circuit(&spec, &theta).unwrap();
        assert_eq!(a, b);
        assert_eq!(adjoint(&adjoint(&a)), a);
        assert_eq!(adjoint(&Circuit::new(1)), Circuit::new(1));
    }

    #[test]
    fn single_gate_adjoints() {
        assert_eq!(Gate::ry(0, 0.7).adjoint(), Gate::ry(0, -0.7));
        assert_eq!(Gate::H(0).adjoint(), Gate::H(0));
    }
}
