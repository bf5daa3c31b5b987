//! Worst-case steps to legitimacy under the dijkstra scheduler against
//! `(3n + 1)(n - 2) / 2`, and the schedule that attains it.
//!
//! ```bash
//! cargo run --release --example scheduler_bounds
//! ```

use selfstab::dynamics::tightness_path;
use selfstab::game::build_first_solution_game;
use selfstab::verify::{measure_bound, DEFAULT_NODE_BUDGET};
use selfstab::Result;

fn main() -> Result<()> {
    println!("n  |C|  formula  measured");
    for n in 3..=6 {
        for c in [n - 2, n - 1, n] {
            if c < 2 {
                continue;
            }
            let row = measure_bound(n, c as u16, DEFAULT_NODE_BUDGET)?;
            println!("{n}  {c:>3}  {:>7}  {}", row.formula, row.measured);
        }
    }

    let n = 5;
    let game = build_first_solution_game(n, n as u16)?;
    let path = tightness_path(n, n as u16)?;
    println!(
        "tightness path for n={n}: {} steps, first legitimate at {:?}",
        path.len(),
        path.first_legitimate(&game)?
    );
    Ok(())
}
