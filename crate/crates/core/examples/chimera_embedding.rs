//! Self-avoiding chain embeddings on a Chimera graph.

use kinkstat::embedding::{generate_instances, ChimeraGraph};
use kinkstat::model::CouplingKind;

fn main() -> kinkstat::Result<()> {
    let graph = ChimeraGraph::new(16)?;
    println!("C16: {} qubits, {} couplers", graph.vertex_count(), graph.edge_count());
    let v = graph.decompose(1234)?;
    println!("qubit 1234 -> {v:?}, neighbors {:?}", graph.neighbors(1234)?);

    let records = generate_instances(&graph, 800, 5, CouplingKind::Gauge, 42, 10_000)?;
    for r in &records {
        graph.validate_path(&r.vertices)?;
        let ferro = r.couplings.iter().filter(|&&j| j < 0).count();
        println!("{}: {} sites, {} walk attempts, {ferro} ferro bonds", r.id, r.length, r.attempts);
    }
    println!("{}", serde_json::to_string(&records[0]).unwrap().chars().take(120).collect::<String>());
    Ok(())
}
