//! Gate and circuit representation.
//!
//! Qubit 0 is the least-significant bit of a basis-state index. Controlled
//! sub-circuits address qubits by their absolute index in the enclosing
//! circuit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Rx {
        qubit: usize,
        angle: f64,
    },
    Ry {
        qubit: usize,
        angle: f64,
    },
    Rz {
        qubit: usize,
        angle: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
    Cswap {
        control: usize,
        a: usize,
        b: usize,
    },
    /// Applies `body` on the subspace where `control` is |1>.
    Controlled {
        control: usize,
        body: Circuit,
    },
    /// Applies `body` on the subspace where `control` is |0>.
    AntiControlled {
        control: usize,
        body: Circuit,
    },
}

/// Primitive operation kinds after expanding controlled sub-circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrimitiveKind {
    H,
    X,
    Rx,
    Ry,
    Rz,
    Cnot,
    Swap,
    Cswap,
}

impl PrimitiveKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::H => "H",
            PrimitiveKind::X => "X",
            PrimitiveKind::Rx => "RX",
            PrimitiveKind::Ry => "RY",
            PrimitiveKind::Rz => "RZ",
            PrimitiveKind::Cnot => "CNOT",
            PrimitiveKind::Swap => "SWAP",
            PrimitiveKind::Cswap => "CSWAP",
        }
    }

    pub fn is_single_qubit(self) -> bool {
        matches!(
            self,
            PrimitiveKind::H
                | PrimitiveKind::X
                | PrimitiveKind::Rx
                | PrimitiveKind::Ry
                | PrimitiveKind::Rz
        )
    }
}

/// A primitive gate together with the extra controls inherited from
/// enclosing controlled sub-circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatOp {
    pub kind: PrimitiveKind,
    /// Controls contributed by `Controlled`/`AntiControlled` wrappers, as
    /// `(qubit, active_value)`.
    pub extra_controls: Vec<(usize, bool)>,
    /// Qubits of the primitive gate itself (its own controls first).
    pub qubits: Vec<usize>,
}

impl FlatOp {
    pub fn all_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.extra_controls
            .iter()
            .map(|&(q, _)| q)
            .chain(self.qubits.iter().copied())
    }
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// Every qubit the gate touches, including those of a controlled body.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) => vec![*q],
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                vec![*qubit]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cswap { control, a, b } => vec![*control, *a, *b],
            Gate::Controlled { control, body } | Gate::AntiControlled { control, body } => {
                let mut qs = vec![*control];
                qs.extend(body.qubits());
                qs
            }
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitOutOfRange { index: q, n_qubits })
            }
        };
        match self {
            Gate::Controlled { control, body } | Gate::AntiControlled { control, body } => {
                check(*control)?;
                for g in &body.gates {
                    g.validate(n_qubits)?;
                    if g.qubits().contains(control) {
                        return Err(Error::OverlappingQubits(*control));
                    }
                }
                Ok(())
            }
            _ => {
                let qs = self.qubits();
                for (i, &q) in qs.iter().enumerate() {
                    check(q)?;
                    if qs[..i].contains(&q) {
                        return Err(Error::OverlappingQubits(q));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Rx { qubit, angle } => Gate::Rx {
                qubit: *qubit,
                angle: -angle,
            },
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit: *qubit,
                angle: -angle,
            },
            Gate::Rz { qubit, angle } => Gate::Rz {
                qubit: *qubit,
                angle: -angle,
            },
            Gate::Controlled { control, body } => Gate::Controlled {
                control: *control,
                body: body.adjoint(),
            },
            Gate::AntiControlled { control, body } => Gate::AntiControlled {
                control: *control,
                body: body.adjoint(),
            },
            other => other.clone(),
        }
    }

    fn shifted(&self, offset: usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::X(q) => Gate::X(q + offset),
            Gate::Rx { qubit, angle } => Gate::rx(qubit + offset, *angle),
            Gate::Ry { qubit, angle } => Gate::ry(qubit + offset, *angle),
            Gate::Rz { qubit, angle } => Gate::rz(qubit + offset, *angle),
            Gate::Cnot { control, target } => Gate::cnot(control + offset, target + offset),
            Gate::Swap(a, b) => Gate::Swap(a + offset, b + offset),
            Gate::Cswap { control, a, b } => Gate::Cswap {
                control: control + offset,
                a: a + offset,
                b: b + offset,
            },
            Gate::Controlled { control, body } => Gate::Controlled {
                control: control + offset,
                body: body.shifted_gates(offset, body.n_qubits + offset),
            },
            Gate::AntiControlled { control, body } => Gate::AntiControlled {
                control: control + offset,
                body: body.shifted_gates(offset, body.n_qubits + offset),
            },
        }
    }

    fn flatten_into(&self, controls: &mut Vec<(usize, bool)>, out: &mut Vec<FlatOp>) {
        let (kind, qubits) = match self {
            Gate::H(q) => (PrimitiveKind::H, vec![*q]),
            Gate::X(q) => (PrimitiveKind::X, vec![*q]),
            Gate::Rx { qubit, .. } => (PrimitiveKind::Rx, vec![*qubit]),
            Gate::Ry { qubit, .. } => (PrimitiveKind::Ry, vec![*qubit]),
            Gate::Rz { qubit, .. } => (PrimitiveKind::Rz, vec![*qubit]),
            Gate::Cnot { control, target } => (PrimitiveKind::Cnot, vec![*control, *target]),
            Gate::Swap(a, b) => (PrimitiveKind::Swap, vec![*a, *b]),
            Gate::Cswap { control, a, b } => (PrimitiveKind::Cswap, vec![*control, *a, *b]),
            Gate::Controlled { control, body } | Gate::AntiControlled { control, body } => {
                let active = matches!(self, Gate::Controlled { .. });
                controls.push((*control, active));
                for g in &body.gates {
                    g.flatten_into(controls, out);
                }
                controls.pop();
                return;
            }
        };
        out.push(FlatOp {
            kind,
            extra_controls: controls.clone(),
            qubits,
        });
    }
}

/// An ordered gate sequence over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends the gates of `other`, which must fit in this circuit's width.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        for g in &other.gates {
            g.validate(self.n_qubits)?;
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    /// Sequential composition: `self` first, then `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut out = self.clone();
        out.n_qubits = out.n_qubits.max(other.n_qubits);
        out.append(other)?;
        Ok(out)
    }

    /// Reversed gate order with each gate replaced by its adjoint.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Relabels qubit `q` as `q + offset` inside a circuit of `width` qubits.
    pub fn embedded(&self, offset: usize, width: usize) -> Result<Circuit> {
        if self.n_qubits + offset > width {
            return Err(Error::QubitOutOfRange {
                index: self.n_qubits + offset - 1,
                n_qubits: width,
            });
        }
        Ok(self.shifted_gates(offset, width))
    }

    fn shifted_gates(&self, offset: usize, width: usize) -> Circuit {
        Circuit {
            n_qubits: width,
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
        }
    }

    /// Sorted, deduplicated set of qubits touched by any gate.
    pub fn qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self.gates.iter().flat_map(Gate::qubits).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Primitive operations with controlled sub-circuits expanded.
    pub fn flatten(&self) -> Vec<FlatOp> {
        let mut out = Vec::new();
        let mut controls = Vec::new();
        for g in &self.gates {
            g.flatten_into(&mut controls, &mut out);
        }
        out
    }

    /// Length of the longest chain of primitive operations that share qubits.
    /// Each primitive inside a controlled sub-circuit also occupies the control.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for op in self.flatten() {
            let start = op.all_qubits().map(|q| level[q]).max().unwrap_or(0);
            for q in op.all_qubits().collect::<Vec<_>>() {
                level[q] = start + 1;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn count_two_qubit_primitives(&self) -> usize {
        self.flatten()
            .iter()
            .filter(|op| op.all_qubits().count() >= 2)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_overlap() {
        let mut c = Circuit::new(2);
        assert!(matches!(
            c.push(Gate::H(2)),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            c.push(Gate::cnot(1, 1)),
            Err(Error::OverlappingQubits(1))
        ));
        let mut body = Circuit::new(2);
        body.push(Gate::X(1)).unwrap();
        assert!(matches!(
            c.push(Gate::Controlled { control: 1, body }),
            Err(Error::OverlappingQubits(1))
        ));
    }

    #[test]
    fn adjoint_negates_rotations_and_reverses() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap().push(Gate::ry(1, 0.7)).unwrap();
        let adj = c.adjoint();
        assert_eq!(adj.gates(), &[Gate::ry(1, -0.7), Gate::H(0)]);
        assert_eq!(adj.adjoint(), c);
    }

    #[test]
    fn depth_counts_shared_qubit_chains() {
        let mut c = Circuit::new(3);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::H(1)).unwrap();
        c.push(Gate::H(2)).unwrap();
        assert_eq!(c.depth(), 1);
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::cnot(1, 2)).unwrap();
        assert_eq!(c.depth(), 3);
        assert_eq!(Circuit::new(2).depth(), 0);
    }

    #[test]
    fn controlled_body_flattens_with_control() {
        let mut body = Circuit::new(2);
        body.push(Gate::H(0)).unwrap().push(Gate::H(1)).unwrap();
        let mut c = Circuit::new(3);
        c.push(Gate::AntiControlled { control: 2, body }).unwrap();
        let flat = c.flatten();
        assert_eq!(flat.len(), 2);
        assert_eq!(flat[0].extra_controls, vec![(2, false)]);
        // both primitives now share the control qubit
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn embedding_shifts_indices() {
        let mut c = Circuit::new(2);
        c.push(Gate::cnot(0, 1)).unwrap();
        let e = c.embedded(2, 5).unwrap();
        assert_eq!(e.n_qubits, 5);
        assert_eq!(e.gates(), &[Gate::cnot(2, 3)]);
        assert!(c.embedded(4, 5).is_err());
    }
}
