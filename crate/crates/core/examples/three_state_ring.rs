//! The three-state ring at machine level, and the same execution as a
//! compressed improvement path of its game.
//!
//! ```bash
//! cargo run --example three_state_ring
//! ```

use selfstab::dynamics::SelectionPolicy;
use selfstab::protocols::{RingSystem, SystemState};
use selfstab::Result;

fn main() -> Result<()> {
    let system = RingSystem::three_state(5)?;
    let start = SystemState(vec![2, 1, 0, 2, 1]);
    let trace = system.run_system(&start, &SelectionPolicy::Seeded { seed: 7 }, 60)?;

    let states = trace.replay(&system)?;
    for (mv, s) in trace.moves.iter().zip(&states[1..]) {
        println!(
            "machine {} fires ({:?}) -> {s}",
            mv.machine,
            system.rule(mv.machine)
        );
    }
    println!(
        "first legitimate at move {:?}",
        trace.first_legitimate(&system)?
    );

    let correspondence = system.correspondence_check(&trace)?;
    println!(
        "{} machine moves became {} game steps; double moves at steps {:?}",
        trace.moves.len(),
        correspondence.path.len(),
        correspondence.compressed
    );

    // Machine 2 stays privileged after firing from (2,1,0); its two moves
    // form one improvement step that raises its payoff by 2.
    let small = RingSystem::three_state(3)?;
    let daemon = SelectionPolicy::Fixed {
        movers: vec![2, 2],
        cyclic: false,
    };
    let trace = small.run_system(&SystemState(vec![2, 1, 0]), &daemon, 10)?;
    let correspondence = small.correspondence_check(&trace)?;
    println!(
        "{:?} -> game path {:?}, compressed steps {:?}",
        trace
            .replay(&small)?
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
        correspondence.path.steps,
        correspondence.compressed
    );
    Ok(())
}
