//! Exhaustive check that the four-state scheduler ensures
//! self-stabilization, with the worst-case number of steps.
//!
//! ```bash
//! cargo run --example four_state_ring
//! ```

use selfstab::dynamics::four_state_scheduler;
use selfstab::game::build_four_state_game;
use selfstab::verify::scheduler_ensures_self_stabilization;
use selfstab::Result;

fn main() -> Result<()> {
    for n in 3..=6 {
        let game = build_four_state_game(n)?;
        let report = scheduler_ensures_self_stabilization(&game, &four_state_scheduler(), None)?;
        println!(
            "n={n}: {:?}, worst case {:?}, {} states, {} legitimate",
            report.verdict,
            report.worst_case_first_hit,
            report.statistics.nodes,
            report.legitimate_nodes
        );
    }
    Ok(())
}
