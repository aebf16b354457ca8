//! Build a Bell pair, read exact probabilities and draw seeded samples.

use vqkge::circuit::{Circuit, Gate};
use vqkge::statevector::{bitstring, run_circuit};

fn main() -> vqkge::Result<()> {
    let mut bell = Circuit::new(2);
    bell.push(Gate::H(0))?;
    bell.push(Gate::cnot(0, 1))?;
    let state = run_circuit(&bell)?;

    for (i, p) in state.probabilities().iter().enumerate() {
        println!(
            "|{}>  amplitude {:.4}  probability {p:.4}",
            bitstring(i, 2),
            state.amplitudes()[i]
        );
    }
    println!(
        "P(qubit 1 = 1) = {:.4}",
        state.marginal_probability(1, true)?
    );

    let histogram = state.sample(1000, 7)?;
    println!(
        "1000 shots: |00> {}  |11> {}",
        histogram.count(0),
        histogram.count(3)
    );

    // the adjoint circuit returns the register to |00>
    let mut back = state.clone();
    back.apply_circuit(&bell.adjoint())?;
    println!("after adjoint: P(00) = {:.12}", back.probability_of("00")?);
    Ok(())
}
