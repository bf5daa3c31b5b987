//! Writes the improvement graph of a small first-solution game as DOT and a
//! simulated path as a replayable JSON trace.
//!
//! ```bash
//! cargo run --example export_dot -- /tmp/selfstab
//! dot -Tsvg /tmp/selfstab/graph.dot -o graph.svg
//! ```

use std::path::PathBuf;

use selfstab::dynamics::{dijkstra_first_scheduler, generate_path, SelectionPolicy};
use selfstab::export::{improvement_graph_dot, write_atomic, TraceRecord};
use selfstab::game::build_first_solution_game;
use selfstab::verify::build_improvement_graph;
use selfstab::{JointStrategy, Result};

fn main() -> Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/selfstab-export".into()),
    );
    std::fs::create_dir_all(&dir)?;

    let game = build_first_solution_game(3, 3)?;
    let scheduler = dijkstra_first_scheduler(3)?;
    let graph = build_improvement_graph(&game, Some(&scheduler), 1_000)?;
    write_atomic(
        &dir.join("graph.dot"),
        improvement_graph_dot(&graph).as_bytes(),
    )?;

    let path = generate_path(
        &game,
        &JointStrategy::from_raw(&[0, 2, 1]),
        Some(&scheduler),
        &SelectionPolicy::Adversarial,
        100,
    )?;
    let record = TraceRecord::from_path(&game, &path, Some(&scheduler))?;
    write_atomic(&dir.join("trace.json"), record.to_json()?.as_bytes())?;

    let replayed =
        TraceRecord::from_json(&std::fs::read_to_string(dir.join("trace.json"))?)?.replay()?;
    println!(
        "{} nodes, {} edges; trace of {} states written to {}",
        graph.node_count(),
        graph.edge_count(),
        replayed.len(),
        dir.display()
    );
    Ok(())
}
