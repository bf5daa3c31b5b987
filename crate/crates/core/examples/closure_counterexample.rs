//! Without a scheduler the first-solution game stops admitting closure at
//! n = 4; the verifier returns a lasso that never visits a legitimate state.
//!
//! ```bash
//! cargo run --example closure_counterexample
//! ```

use selfstab::dynamics::{first_solution_nonclosure_lasso, replay};
use selfstab::game::build_first_solution_game;
use selfstab::verify::{admits_closure, extract_witness};
use selfstab::Result;

fn main() -> Result<()> {
    for n in 3..=5 {
        let game = build_first_solution_game(n, n as u16)?;
        let report = admits_closure(&game)?;
        print!("n={n}: closure {:?}", report.verdict);
        if let Ok(witness) = extract_witness(&report) {
            let states = replay(&game, &witness, None)?;
            let names: Vec<String> = states.iter().map(ToString::to_string).collect();
            print!("  lasso {}", names.join(" "));
        }
        println!();
    }

    let n = 6;
    let game = build_first_solution_game(n, 3)?;
    let lasso = first_solution_nonclosure_lasso(n)?;
    let states = replay(&game, &lasso, None)?;
    let any_legitimate = states.iter().any(|s| game.is_legitimate(s).unwrap_or(true));
    println!(
        "constructed lasso for n={n}: {} steps, legitimate state visited: {any_legitimate}",
        lasso.len()
    );
    Ok(())
}
