//! Static qubit, gate and depth accounting under a fixed decomposition table.
//!
//! Controlled sub-circuits are costed gate by gate: each primitive inside
//! gains the extra control and is looked up in the table (a controlled
//! rotation, a controlled CNOT as a Toffoli, and so on). An anti-controlled
//! sub-circuit additionally pays one `X` on the control before and after.
//! Depth is an as-soon-as-possible schedule where each decomposed block
//! occupies all its qubits for its tabulated depth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, ParamVector};
use crate::circuit::{Circuit, Gate, PrimitiveKind};
use crate::error::{Error, Result};
use crate::scoring::{scheme_circuit, ScoreScheme, TriplePrep};

/// Name attached to every report so counts are only compared like-for-like.
pub const DECOMPOSITION_NAME: &str = "cnot-1q/toffoli-6cnot-9q/cswap-toffoli-2cnot";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCost {
    pub two_qubit: usize,
    pub single_qubit: usize,
    pub depth: usize,
}

impl GateCost {
    const fn new(two_qubit: usize, single_qubit: usize, depth: usize) -> Self {
        GateCost {
            two_qubit,
            single_qubit,
            depth,
        }
    }

    pub fn total(&self) -> usize {
        self.two_qubit + self.single_qubit
    }
}

const SINGLE: GateCost = GateCost::new(0, 1, 1);
const CNOT: GateCost = GateCost::new(1, 0, 1);
const SWAP: GateCost = GateCost::new(3, 0, 3);
const TOFFOLI: GateCost = GateCost::new(6, 9, 12);
const CSWAP: GateCost = GateCost::new(
    TOFFOLI.two_qubit + 2,
    TOFFOLI.single_qubit,
    TOFFOLI.depth + 2,
);
const CONTROLLED_SINGLE: GateCost = GateCost::new(2, 3, 5);

pub fn decomposition_table() -> BTreeMap<&'static str, GateCost> {
    BTreeMap::from([
        ("H", SINGLE),
        ("X", SINGLE),
        ("RX", SINGLE),
        ("RY", SINGLE),
        ("RZ", SINGLE),
        ("CNOT", CNOT),
        ("SWAP", SWAP),
        ("TOFFOLI", TOFFOLI),
        ("CSWAP", CSWAP),
        ("CONTROLLED-1Q", CONTROLLED_SINGLE),
    ])
}

fn cost_of(kind: PrimitiveKind, extra_controls: usize) -> Result<GateCost> {
    use PrimitiveKind::*;
    Ok(match (kind, extra_controls) {
        (_, 0) if kind.is_single_qubit() => SINGLE,
        (X, 1) | (Cnot, 0) => CNOT,
        (X, 2) | (Cnot, 1) => TOFFOLI,
        (H | Rx | Ry | Rz, 1) => CONTROLLED_SINGLE,
        (Swap, 0) => SWAP,
        (Swap, 1) | (Cswap, 0) => CSWAP,
        _ => {
            return Err(Error::UnsupportedDecomposition(format!(
                "{} with {extra_controls} extra control(s)",
                kind.name()
            )))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub total_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
}

struct Tally {
    level: Vec<usize>,
    counts: GateCounts,
}

impl Tally {
    fn add(&mut self, cost: GateCost, qubits: &[usize]) {
        let start = qubits.iter().map(|&q| self.level[q]).max().unwrap_or(0);
        for &q in qubits {
            self.level[q] = start + cost.depth;
        }
        self.counts.total_gates += cost.total();
        self.counts.two_qubit_gates += cost.two_qubit;
    }

    fn walk(&mut self, gate: &Gate, controls: &mut Vec<usize>) -> Result<()> {
        let (kind, own) = match gate {
            Gate::H(q) => (PrimitiveKind::H, vec![*q]),
            Gate::X(q) => (PrimitiveKind::X, vec![*q]),
            Gate::Rx { qubit, .. } => (PrimitiveKind::Rx, vec![*qubit]),
            Gate::Ry { qubit, .. } => (PrimitiveKind::Ry, vec![*qubit]),
            Gate::Rz { qubit, .. } => (PrimitiveKind::Rz, vec![*qubit]),
            Gate::Cnot { control, target } => (PrimitiveKind::Cnot, vec![*control, *target]),
            Gate::Swap(a, b) => (PrimitiveKind::Swap, vec![*a, *b]),
            Gate::Cswap { control, a, b } => (PrimitiveKind::Cswap, vec![*control, *a, *b]),
            Gate::Controlled { control, body } | Gate::AntiControlled { control, body } => {
                let anti = matches!(gate, Gate::AntiControlled { .. });
                if anti {
                    self.add(SINGLE, &[*control]);
                }
                controls.push(*control);
                for g in body.gates() {
                    self.walk(g, controls)?;
                }
                controls.pop();
                if anti {
                    self.add(SINGLE, &[*control]);
                }
                return Ok(());
            }
        };
        let cost = cost_of(kind, controls.len())?;
        let qubits: Vec<usize> = controls.iter().copied().chain(own).collect();
        self.add(cost, &qubits);
        Ok(())
    }
}

/// Decomposed counts for an arbitrary circuit.
pub fn count_circuit(circuit: &Circuit) -> Result<GateCounts> {
    let mut tally = Tally {
        level: vec![0; circuit.n_qubits],
        counts: GateCounts::default(),
    };
    let mut controls = Vec::new();
    for g in circuit.gates() {
        tally.walk(g, &mut controls)?;
    }
    tally.counts.depth = tally.level.iter().copied().max().unwrap_or(0);
    Ok(tally.counts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub scheme: ScoreScheme,
    pub n_qubits_logical: usize,
    pub total_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
    pub decomposition: String,
}

impl ResourceReport {
    pub const CSV_HEADER: &'static str =
        "scheme,n_qubits,total_gates,two_qubit_gates,depth,decomposition";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.scheme,
            self.n_qubits_logical,
            self.total_gates,
            self.two_qubit_gates,
            self.depth,
            self.decomposition
        )
    }
}

pub fn report_for_circuit(scheme: ScoreScheme, circuit: &Circuit) -> Result<ResourceReport> {
    let counts = count_circuit(circuit)?;
    Ok(ResourceReport {
        scheme,
        n_qubits_logical: circuit.n_qubits,
        total_gates: counts.total_gates,
        two_qubit_gates: counts.two_qubit_gates,
        depth: counts.depth,
        decomposition: DECOMPOSITION_NAME.to_string(),
    })
}

/// Costs the scheme's scoring circuit for `spec`. Gate structure does not
/// depend on angle values, so zero angles are used.
pub fn estimate_resources(scheme: ScoreScheme, spec: &AnsatzSpec) -> ResourceReport {
    let zeros = ParamVector::zeros(spec.param_count());
    let circuit = TriplePrep::from_params(spec, &zeros, &zeros, &zeros)
        .and_then(|prep| scheme_circuit(scheme, &prep))
        .expect("zero parameters always match the spec");
    report_for_circuit(scheme, &circuit).expect("scoring circuits only use tabulated gates")
}
