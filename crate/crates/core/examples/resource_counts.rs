//! Qubit, gate and depth costs of each scoring circuit after decomposition
//! into single-qubit gates and CNOTs.

use vqkge::ansatz::AnsatzSpec;
use vqkge::resources::{decomposition_table, estimate_resources, ResourceReport};
use vqkge::scoring::ScoreScheme;

fn main() -> vqkge::Result<()> {
    println!("{}", ResourceReport::CSV_HEADER);
    for n in [1, 2, 4, 8] {
        let spec = AnsatzSpec::new(n, 2)?;
        for scheme in ScoreScheme::ALL {
            println!("{}", estimate_resources(scheme, &spec).csv_row());
        }
    }
    println!("\ngate costs:");
    for (name, cost) in decomposition_table() {
        println!("  {name:>14}: {cost:?}");
    }
    Ok(())
}
