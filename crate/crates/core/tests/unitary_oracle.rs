//! Simulator gate kernels against full unitaries assembled from Kronecker
//! products and control projectors.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqkge::circuit::{Circuit, Gate};
use vqkge::statevector::Statevector;

type Matrix = Vec<Vec<Complex64>>;

const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect()
}

fn dagger(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `m` acting on `qubit` of an `n`-qubit register (qubit 0 least significant,
/// so it is the rightmost Kronecker factor).
fn on_qubit(m: &Matrix, qubit: usize, n: usize) -> Matrix {
    let i2 = identity(2);
    let mut out = identity(1);
    for q in (0..n).rev() {
        out = kron(&out, if q == qubit { m } else { &i2 });
    }
    out
}

fn pauli_x() -> Matrix {
    vec![
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ]
}

fn pauli_y() -> Matrix {
    vec![
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ]
}

fn pauli_z() -> Matrix {
    vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0)],
    ]
}

fn projector(bit: bool) -> Matrix {
    let mut p = vec![vec![c(0.0, 0.0); 2]; 2];
    let k = bit as usize;
    p[k][k] = c(1.0, 0.0);
    p
}

/// `exp(-i angle P / 2) = cos(angle/2) I - i sin(angle/2) P`.
fn rotation(p: &Matrix, angle: f64) -> Matrix {
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let i2 = identity(2);
    (0..2)
        .map(|r| {
            (0..2)
                .map(|k| i2[r][k] * cs + p[r][k] * c(0.0, -sn))
                .collect()
        })
        .collect()
}

fn hadamard() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]
}

/// SWAP = (I + XX + YY + ZZ) / 2.
fn swap_matrix(a: usize, b: usize, n: usize) -> Matrix {
    let mut m = identity(1 << n);
    for p in [pauli_x(), pauli_y(), pauli_z()] {
        m = add(&m, &matmul(&on_qubit(&p, a, n), &on_qubit(&p, b, n)));
    }
    m.iter()
        .map(|row| row.iter().map(|x| x * 0.5).collect())
        .collect()
}

fn controlled(control: usize, active: bool, body: &Matrix, n: usize) -> Matrix {
    let on = on_qubit(&projector(active), control, n);
    let off = on_qubit(&projector(!active), control, n);
    add(&off, &matmul(&on, body))
}

fn gate_matrix(gate: &Gate, n: usize) -> Matrix {
    match gate {
        Gate::H(q) => on_qubit(&hadamard(), *q, n),
        Gate::X(q) => on_qubit(&pauli_x(), *q, n),
        Gate::Rx { qubit, angle } => on_qubit(&rotation(&pauli_x(), *angle), *qubit, n),
        Gate::Ry { qubit, angle } => on_qubit(&rotation(&pauli_y(), *angle), *qubit, n),
        Gate::Rz { qubit, angle } => on_qubit(&rotation(&pauli_z(), *angle), *qubit, n),
        Gate::Cnot { control, target } => {
            controlled(*control, true, &on_qubit(&pauli_x(), *target, n), n)
        }
        Gate::Swap(a, b) => swap_matrix(*a, *b, n),
        Gate::Cswap { control, a, b } => controlled(*control, true, &swap_matrix(*a, *b, n), n),
        Gate::Controlled { control, body } => {
            controlled(*control, true, &circuit_matrix(body, n), n)
        }
        Gate::AntiControlled { control, body } => {
            controlled(*control, false, &circuit_matrix(body, n), n)
        }
    }
}

fn circuit_matrix(circuit: &Circuit, n: usize) -> Matrix {
    circuit
        .gates()
        .iter()
        .fold(identity(1 << n), |acc, g| matmul(&gate_matrix(g, n), &acc))
}

/// Unitary of `circuit` as seen by the simulator, column by column.
fn simulated_matrix(circuit: &Circuit) -> Matrix {
    let n = circuit.n_qubits;
    let dim = 1 << n;
    let columns: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| {
            let mut s = Statevector::basis(n, j);
            s.apply_circuit(circuit).unwrap();
            s.amplitudes().to_vec()
        })
        .collect();
    (0..dim)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect()
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut qs: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        qs.swap(i, j);
    }
    qs.truncate(k);
    qs
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize, allowed: &[usize], depth: usize) -> Gate {
    let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<usize> {
        distinct(rng, allowed.len(), k)
            .into_iter()
            .map(|i| allowed[i])
            .collect()
    };
    let max_kind = match allowed.len() {
        1 => 5,
        2 => 7,
        _ => 10,
    };
    let angle = rng.random_range(-4.0..4.0);
    loop {
        let kind = rng.random_range(0..max_kind);
        let q = pick(rng, 3.min(allowed.len()));
        return match kind {
            0 => Gate::H(q[0]),
            1 => Gate::X(q[0]),
            2 => Gate::rx(q[0], angle),
            3 => Gate::ry(q[0], angle),
            4 => Gate::rz(q[0], angle),
            5 => Gate::cnot(q[0], q[1]),
            6 => Gate::Swap(q[0], q[1]),
            7 => Gate::Cswap {
                control: q[0],
                a: q[1],
                b: q[2],
            },
            _ if depth > 0 => continue,
            k => {
                let control = q[0];
                let rest: Vec<usize> = allowed.iter().copied().filter(|&x| x != control).collect();
                let mut body = Circuit::new(n);
                for _ in 0..rng.random_range(1..4) {
                    body.push(random_gate(rng, n, &rest, depth + 1)).unwrap();
                }
                if k == 8 {
                    Gate::Controlled { control, body }
                } else {
                    Gate::AntiControlled { control, body }
                }
            }
        };
    }
}

fn random_circuit(n: usize, len: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..n).collect();
    let mut circuit = Circuit::new(n);
    for _ in 0..len {
        circuit.push(random_gate(&mut rng, n, &all, 0)).unwrap();
    }
    circuit
}

#[test]
fn textbook_gates_match() {
    // H|0> on qubit 1 of 2 lands on indices 0 and 2
    let m = gate_matrix(&Gate::H(1), 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((m[2][0] - c(s, 0.0)).norm() < TOL);
    // CNOT(0 -> 1) maps |01> (index 1) to |11> (index 3)
    let m = gate_matrix(&Gate::cnot(0, 1), 2);
    assert_eq!(m[3][1], c(1.0, 0.0));
    let sim = simulated_matrix(&{
        let mut circ = Circuit::new(2);
        circ.push(Gate::cnot(0, 1)).unwrap();
        circ
    });
    assert!(max_diff(&m, &sim) < TOL);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulator_matches_dense_unitary(n in 1usize..=3, len in 1usize..12, seed in any::<u64>()) {
        let circuit = random_circuit(n, len, seed);
        let oracle = circuit_matrix(&circuit, n);
        let sim = simulated_matrix(&circuit);
        prop_assert!(max_diff(&oracle, &sim) < TOL, "{circuit:?}");
        let product = matmul(&sim, &dagger(&sim));
        prop_assert!(max_diff(&product, &identity(1 << n)) < TOL);
        let inverse = simulated_matrix(&circuit.adjoint());
        prop_assert!(max_diff(&inverse, &dagger(&oracle)) < TOL);
    }
}
