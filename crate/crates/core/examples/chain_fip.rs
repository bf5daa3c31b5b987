//! Coordination on a chain has the finite improvement property; the
//! rightmost-first policy realises the longest improvement path.
//!
//! ```bash
//! cargo run --example chain_fip
//! ```

use selfstab::dynamics::{generate_path, SelectionPolicy};
use selfstab::game::{build_chain_coordination_game, Colour};
use selfstab::verify::fip_check;
use selfstab::{JointStrategy, Result};

fn main() -> Result<()> {
    for n in 2..=6 {
        let game = build_chain_coordination_game(n, n as u16)?;
        let report = fip_check(&game)?;
        let start = JointStrategy::new((0..n as u16).map(Colour).collect());
        let path = generate_path(&game, &start, None, &SelectionPolicy::RightmostFirst, 1000)?;
        println!(
            "n={n}: FIP {:?}, longest path {:?}, rightmost-first path {} steps ({:?})",
            report.verdict,
            report.longest_path,
            path.len(),
            path.terminal
        );
    }
    Ok(())
}
