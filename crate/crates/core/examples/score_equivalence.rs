//! Score one triple with all three circuits, exactly and from shots, then
//! tabulate the agreement over many random draws.

use vqkge::ansatz::AnsatzSpec;
use vqkge::scoring::{
    estimate_score_prep, exact_score_prep, oracle_overlap, random_thetas, scheme_equivalence,
    shots_for_precision, EquivalenceRow, ScoreScheme, TriplePrep,
};

fn main() -> vqkge::Result<()> {
    let spec = AnsatzSpec::new(3, 2)?;
    let (h, r, t) = random_thetas(&spec, 42);
    let prep = TriplePrep::from_params(&spec, &h, &r, &t)?;
    let overlap = oracle_overlap(&prep)?;
    println!(
        "<t|U_r|h> = {overlap:.6}, |.|^2 = {:.6}",
        overlap.norm_sqr()
    );

    let shots = shots_for_precision(0.01)?;
    for scheme in ScoreScheme::ALL {
        let exact = exact_score_prep(scheme, &prep)?;
        let sampled = estimate_score_prep(scheme, &prep, shots, 1)?;
        println!(
            "{scheme:>18}: {} qubits, exact {:.6}, {shots} shots {:.6}",
            scheme.circuit_qubits(spec.n_qubits),
            exact.raw_value,
            sampled.raw_value
        );
    }

    println!("\n{}", EquivalenceRow::CSV_HEADER);
    for n in 1..=4 {
        let row = scheme_equivalence(&AnsatzSpec::new(n, 2)?, 100, 0)?;
        println!("{}", row.csv_row());
    }
    Ok(())
}
