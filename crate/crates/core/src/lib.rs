//! Dijkstra's self-stabilizing token rings as strategic games.
//!
//! Players sit on a directed graph and pick a colour; payoffs depend on the
//! colours of their in-neighbours. A joint strategy is *legitimate* when
//! exactly one player is not best-responding, which matches the single
//! privileged machine of a stabilized ring.
//!
//! * [`game`]: games, payoffs, best responses and the standard ring builders.
//! * [`dynamics`]: improvement paths, schedulers and selection policies.
//! * [`protocols`]: machine-level ring systems and their game correspondence.
//! * [`verify`]: explicit-state deciders with replayable witnesses.
//! * [`export`]: JSON traces, DOT graphs and CSV tables.
//! * [`cli`]: the `selfstab` command line.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod game;
pub mod protocols;
pub mod verify;

pub use error::{Error, Result};
pub use game::{Colour, Game, JointStrategy};
