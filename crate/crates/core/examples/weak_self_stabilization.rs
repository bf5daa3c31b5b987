//! Weak self-stabilization asks only that some path from every start
//! stabilizes. It holds for the first-solution game even where closure
//! fails.
//!
//! ```bash
//! cargo run --example weak_self_stabilization
//! ```

use selfstab::game::build_first_solution_game;
use selfstab::verify::{admits_self_stabilization, weak_self_stabilization};
use selfstab::Result;

fn main() -> Result<()> {
    for n in 2..=5 {
        let game = build_first_solution_game(n, n as u16)?;
        let strong = admits_self_stabilization(&game, None)?;
        let weak = weak_self_stabilization(&game)?;
        println!(
            "n={n}: self-stabilization {:?}, weak self-stabilization {:?}",
            strong.verdict, weak.verdict
        );
    }
    Ok(())
}
