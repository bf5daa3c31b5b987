//! Dijkstra's first solution as a game: payoffs, best responses, and a
//! dijkstra-scheduled improvement path from an arbitrary start.
//!
//! ```bash
//! cargo run --example first_solution_game
//! ```

use selfstab::dynamics::{dijkstra_first_scheduler, generate_path, SelectionPolicy};
use selfstab::game::build_first_solution_game;
use selfstab::{JointStrategy, Result};

fn main() -> Result<()> {
    let game = build_first_solution_game(5, 5)?;
    let start = JointStrategy::from_raw(&[0, 3, 1, 4, 2]);

    for player in 1..=game.players() {
        println!(
            "player {player}: payoff {} best responses {:?}",
            game.payoff(&start, player)?,
            game.best_responses(&start, player)?
                .iter()
                .map(|c| c.letter())
                .collect::<Vec<_>>()
        );
    }

    let scheduler = dijkstra_first_scheduler(5)?;
    let path = generate_path(
        &game,
        &start,
        Some(&scheduler),
        &SelectionPolicy::RoundRobin,
        200,
    )?;
    for (i, s) in path.states().iter().enumerate().take(20) {
        let mark = if game.is_legitimate(s)? {
            "  legitimate"
        } else {
            ""
        };
        println!("{i:>3} {s}{mark}");
    }
    println!(
        "first legitimate state after {:?} steps",
        path.first_legitimate(&game)?
    );
    Ok(())
}
