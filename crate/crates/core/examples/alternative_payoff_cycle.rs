//! A mod-k payoff for player 1 breaks closure: a fixed mover order cycles
//! through nine states none of which is legitimate.
//!
//! ```bash
//! cargo run --example alternative_payoff_cycle
//! ```

use selfstab::dynamics::{generate_path, replay, SelectionPolicy};
use selfstab::game::build_alternative_first_game;
use selfstab::verify::admits_closure;
use selfstab::{JointStrategy, Result};

fn main() -> Result<()> {
    let game = build_alternative_first_game(3, 3)?;
    let path = generate_path(
        &game,
        &JointStrategy::from_raw(&[2, 0, 0]),
        None,
        &SelectionPolicy::cycle_demo(),
        100,
    )?;
    let states = replay(&game, &path, None)?;
    let shown: Vec<String> = states
        .iter()
        .map(|s| s.raw().iter().map(u16::to_string).collect())
        .collect();
    println!("{}", shown.join(" -> "));
    println!("{:?}", path.terminal);

    let report = admits_closure(&game)?;
    println!("closure: {:?}", report.verdict);
    Ok(())
}
