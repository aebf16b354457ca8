//! Inspect the layered ansatz used for entities and relations.

use vqkge::ansatz::{
    entity_state_circuit, layered_circuit, relation_unitary_circuit, AnsatzSpec, ParamVector,
};
use vqkge::resources::count_circuit;
use vqkge::statevector::{inner_product, run_circuit};

fn main() -> vqkge::Result<()> {
    let spec = AnsatzSpec::new(3, 2)?;
    println!(
        "n = 3, L = 2: {} parameters per embedding",
        spec.param_count()
    );

    let theta = ParamVector((0..spec.param_count()).map(|i| 0.1 * i as f64).collect());
    let circuit = layered_circuit(&spec, &theta)?;
    let counts = count_circuit(&circuit)?;
    println!(
        "layered circuit: {} gates, {} two-qubit, depth {}",
        counts.total_gates, counts.two_qubit_gates, counts.depth
    );
    for gate in circuit.gates().iter().take(8) {
        println!("  {gate:?}");
    }

    let entity = run_circuit(&entity_state_circuit(&spec, &theta)?)?;
    println!("entity state norm {:.12}", entity.norm_sqr());

    // a relation followed by its adjoint is the identity
    let mut state = entity.clone();
    let relation = relation_unitary_circuit(&spec, &theta)?;
    state.apply_circuit(&relation)?;
    state.apply_circuit(&relation.adjoint())?;
    println!(
        "|<e|U^dag U|e>|^2 = {:.12}",
        inner_product(&entity, &state)?.norm_sqr()
    );
    Ok(())
}
