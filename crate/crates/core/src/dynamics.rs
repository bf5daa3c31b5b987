//! Improvement steps, improvement paths, schedulers and selection policies.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{add_mod, build_first_solution_game, Colour, Game, GameFamily, JointStrategy};

/// Player `mover` switches from `from` to a strictly better `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImprovementStep {
    pub mover: usize,
    pub from: Colour,
    pub to: Colour,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TerminalStatus {
    ReachedNash,
    /// The state after `first_repeat_index` steps equals the state after
    /// `cycle_start` steps; steps `cycle_start..first_repeat_index` repeat forever.
    CycleDetected {
        cycle_start: usize,
        first_repeat_index: usize,
    },
    Truncated {
        step_budget: usize,
    },
    /// A fixed mover sequence ran out.
    ScheduleExhausted,
    /// A finite prefix; nothing is claimed about how the path continues.
    Prefix,
}

/// A finite prefix of an improvement path, or a lasso standing for an
/// infinite one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub start: JointStrategy,
    pub steps: Vec<ImprovementStep>,
    pub terminal: TerminalStatus,
}

impl Path {
    /// A lasso whose cycle starts at step `cycle_start` and closes after the last step.
    pub fn lasso(start: JointStrategy, steps: Vec<ImprovementStep>, cycle_start: usize) -> Self {
        let first_repeat_index = steps.len();
        Self {
            start,
            steps,
            terminal: TerminalStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Start state followed by the state after each step. No validation.
    pub fn states(&self) -> Vec<JointStrategy> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut current = self.start.clone();
        out.push(current.clone());
        for step in &self.steps {
            current = current.with(step.mover, step.to);
            out.push(current.clone());
        }
        out
    }

    /// Index of the first legitimate state (0 = start), if any.
    pub fn first_legitimate(&self, game: &Game) -> Result<Option<usize>> {
        for (i, s) in self.states().iter().enumerate() {
            if game.is_legitimate(s)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Steps of the repeating segment of a lasso.
    pub fn cycle(&self) -> Option<&[ImprovementStep]> {
        match self.terminal {
            TerminalStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            } => Some(&self.steps[cycle_start..first_repeat_index]),
            _ => None,
        }
    }

    pub fn movers(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.mover)
    }
}

/// All improvement steps available at `s`, ordered by player then colour.
pub fn improvement_edges(game: &Game, s: &JointStrategy) -> Result<Vec<ImprovementStep>> {
    game.validate(s)?;
    let mut out = Vec::new();
    for mover in 1..=game.players() {
        let from = s.get(mover);
        out.extend(
            game.better_of(s.colours(), mover)
                .into_iter()
                .map(|to| ImprovementStep { mover, from, to }),
        );
    }
    Ok(out)
}

/// Successor of `c` in the cyclic order `0 -> 1 -> ... -> |C|-1 -> 0`.
pub fn cyclic_successor(c: Colour, colour_count: u16) -> Colour {
    add_mod(c, 1, colour_count)
}

/// A state-based scheduler: picks, for a player not best-responding at `s`,
/// one of its better responses.
pub trait Scheduler: Send + Sync {
    fn name(&self) -> String;

    /// The raw rule `f(s, i)`.
    fn propose(&self, s: &JointStrategy, player: usize) -> Colour;

    /// `f(s, i)`, checked against the scheduler contract.
    fn choose(&self, game: &Game, s: &JointStrategy, player: usize) -> Result<Colour> {
        game.check_player(player)?;
        game.validate(s)?;
        if game.is_best_responding_raw(s.colours(), player) {
            return Err(Error::ContractViolation(format!(
                "scheduler {} consulted for player {player}, who best-responds at {s}",
                self.name()
            )));
        }
        let c = self.propose(s, player);
        if !game.better_of(s.colours(), player).contains(&c) {
            return Err(Error::ContractViolation(format!(
                "scheduler {} chose {} for player {player} at {s}, not a better response",
                self.name(),
                c.0
            )));
        }
        Ok(c)
    }
}

/// Player 1 moves to the cyclic successor of its colour; every other player
/// copies its predecessor, its only better response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DijkstraFirstScheduler {
    colours: u16,
}

pub fn dijkstra_first_scheduler(colour_count: u16) -> Result<DijkstraFirstScheduler> {
    if colour_count < 2 {
        return Err(Error::Domain(format!(
            "dijkstra scheduler needs |C| >= 2, got {colour_count}"
        )));
    }
    Ok(DijkstraFirstScheduler {
        colours: colour_count,
    })
}

impl Scheduler for DijkstraFirstScheduler {
    fn name(&self) -> String {
        "dijkstra".into()
    }

    fn propose(&self, s: &JointStrategy, player: usize) -> Colour {
        if player == 1 {
            cyclic_successor(s.get(1), self.colours)
        } else {
            s.get(player - 1)
        }
    }
}

/// `f(s,1) = s_1 ⊕ 2`, `f(s,i) = s_i ⊕ 1`, `f(s,n) = s_1 ⊕ 1`, mod 3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThreeStateScheduler;

pub fn three_state_scheduler() -> ThreeStateScheduler {
    ThreeStateScheduler
}

impl Scheduler for ThreeStateScheduler {
    fn name(&self) -> String {
        "three-state".into()
    }

    fn propose(&self, s: &JointStrategy, player: usize) -> Colour {
        let n = s.len();
        match player {
            1 => add_mod(s.get(1), 2, 3),
            p if p == n => add_mod(s.get(1), 1, 3),
            p => add_mod(s.get(p), 1, 3),
        }
    }
}

/// `f(s,1) = s_1 ⊕ 2`, `f(s,i) = s_i ⊕ 1`, `f(s,n) = s_n ⊕ 2`, mod 4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FourStateScheduler;

pub fn four_state_scheduler() -> FourStateScheduler {
    FourStateScheduler
}

impl Scheduler for FourStateScheduler {
    fn name(&self) -> String {
        "four-state".into()
    }

    fn propose(&self, s: &JointStrategy, player: usize) -> Colour {
        let n = s.len();
        match player {
            1 => add_mod(s.get(1), 2, 4),
            p if p == n => add_mod(s.get(n), 2, 4),
            p => add_mod(s.get(p), 1, 4),
        }
    }
}

/// Wraps a closure as a scheduler.
pub struct FnScheduler<F> {
    name: String,
    rule: F,
}

impl<F> FnScheduler<F>
where
    F: Fn(&JointStrategy, usize) -> Colour + Send + Sync,
{
    pub fn new(name: impl Into<String>, rule: F) -> Self {
        Self {
            name: name.into(),
            rule,
        }
    }
}

impl<F> Scheduler for FnScheduler<F>
where
    F: Fn(&JointStrategy, usize) -> Colour + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn propose(&self, s: &JointStrategy, player: usize) -> Colour {
        (self.rule)(s, player)
    }
}

/// The scheduler matching a built-in game family, if it has one.
pub fn scheduler_for(family: GameFamily) -> Option<Box<dyn Scheduler>> {
    match family {
        GameFamily::FirstSolution { colours, .. } => {
            Some(Box::new(DijkstraFirstScheduler { colours }))
        }
        GameFamily::ThreeState { .. } => Some(Box::new(ThreeStateScheduler)),
        GameFamily::FourState { .. } => Some(Box::new(FourStateScheduler)),
        _ => None,
    }
}

/// How the mover (or firing machine) is picked among the eligible ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum SelectionPolicy {
    /// Lowest eligible index, lowest better-response colour. The
    /// deterministic representative of adversarial choice; the verifier
    /// branches over every choice instead.
    Adversarial,
    /// Next eligible index after the previous mover, starting at 1.
    RoundRobin,
    /// Next eligible index below the previous mover, starting at `n`.
    Counterclockwise,
    /// Highest eligible index.
    RightmostFirst,
    /// Replays a mover sequence; a scheduled mover that is not eligible is
    /// a contract violation.
    Fixed { movers: Vec<usize>, cyclic: bool },
    /// Uniform mover and colour choice from a seeded stream.
    Seeded { seed: u64 },
}

impl SelectionPolicy {
    /// Mover order `2, 1, 3` repeated, which drives the alternative mod-k
    /// game around its nine-state cycle from `200`.
    pub fn cycle_demo() -> Self {
        Self::Fixed {
            movers: vec![2, 1, 3],
            cyclic: true,
        }
    }

    /// The mover schedule realizing the worst-case first-hit of the
    /// first-solution game under the dijkstra scheduler.
    pub fn tightness(n: usize) -> Self {
        Self::Fixed {
            movers: tightness_schedule(n),
            cyclic: false,
        }
    }

    pub fn selector(&self, players: usize) -> Selector {
        Selector {
            policy: self.clone(),
            players,
            last: None,
            position: 0,
            rng: match self {
                Self::Seeded { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
                _ => None,
            },
        }
    }
}

/// Runtime state of a [`SelectionPolicy`].
#[derive(Clone, Debug)]
pub struct Selector {
    policy: SelectionPolicy,
    players: usize,
    last: Option<usize>,
    position: usize,
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    /// Picks a mover from `eligible` (ascending, non-empty). `None` means a
    /// fixed schedule is exhausted.
    pub fn pick(&mut self, eligible: &[usize]) -> Result<Option<usize>> {
        debug_assert!(!eligible.is_empty());
        let n = self.players;
        let chosen = match &self.policy {
            SelectionPolicy::Adversarial => eligible[0],
            SelectionPolicy::RightmostFirst => *eligible.last().unwrap(),
            SelectionPolicy::RoundRobin => {
                let last = self.last.unwrap_or(n);
                (1..=n)
                    .map(|d| (last - 1 + d) % n + 1)
                    .find(|p| eligible.contains(p))
                    .unwrap()
            }
            SelectionPolicy::Counterclockwise => {
                let last = self.last.unwrap_or(1);
                (1..=n)
                    .map(|d| (last - 1 + n - d % n) % n + 1)
                    .find(|p| eligible.contains(p))
                    .unwrap()
            }
            SelectionPolicy::Fixed { movers, cyclic } => {
                if movers.is_empty() || (!cyclic && self.position >= movers.len()) {
                    return Ok(None);
                }
                let mover = movers[self.position % movers.len()];
                if !eligible.contains(&mover) {
                    return Err(Error::ContractViolation(format!(
                        "fixed schedule selects {mover} at position {}, eligible are {eligible:?}",
                        self.position
                    )));
                }
                self.position += 1;
                if *cyclic {
                    self.position %= movers.len();
                }
                mover
            }
            SelectionPolicy::Seeded { .. } => *eligible.choose(self.rng.as_mut().unwrap()).unwrap(),
        };
        self.last = Some(chosen);
        Ok(Some(chosen))
    }

    /// Picks among better responses (ascending, non-empty).
    pub fn pick_colour(&mut self, options: &[Colour]) -> Colour {
        match self.rng.as_mut() {
            Some(rng) => *options.choose(rng).unwrap(),
            None => options[0],
        }
    }

    /// Policy memory that, together with the state, determines all future
    /// choices. Seeded policies report none, so their cycle detection is
    /// on states alone.
    pub fn memory(&self) -> u64 {
        match &self.policy {
            SelectionPolicy::RoundRobin => self.last.unwrap_or(self.players) as u64,
            SelectionPolicy::Counterclockwise => self.last.unwrap_or(1) as u64,
            SelectionPolicy::Fixed { .. } => self.position as u64,
            _ => 0,
        }
    }
}

/// `4 · |state space|`, saturating.
pub fn default_step_budget(game: &Game) -> usize {
    usize::try_from(game.state_count().saturating_mul(4)).unwrap_or(usize::MAX)
}

/// Generates an improvement path from `start`.
///
/// The mover comes from `policy`; its new colour from `scheduler` when one
/// is given, otherwise from the policy's colour choice. The run stops at a
/// Nash equilibrium, at the first recurrence of (state, policy memory), when
/// a fixed schedule runs out, or after `step_budget` steps.
pub fn generate_path(
    game: &Game,
    start: &JointStrategy,
    scheduler: Option<&dyn Scheduler>,
    policy: &SelectionPolicy,
    step_budget: usize,
) -> Result<Path> {
    game.validate(start)?;
    let mut selector = policy.selector(game.players());
    let mut current = start.clone();
    let mut steps = Vec::new();
    let mut seen: HashMap<(usize, u64), usize> = HashMap::new();
    let terminal = loop {
        let eligible = game.non_best_responders_raw(current.colours());
        if eligible.is_empty() {
            break TerminalStatus::ReachedNash;
        }
        let key = (game.index_of_raw(current.colours()), selector.memory());
        if let Some(&cycle_start) = seen.get(&key) {
            break TerminalStatus::CycleDetected {
                cycle_start,
                first_repeat_index: steps.len(),
            };
        }
        seen.insert(key, steps.len());
        if steps.len() >= step_budget {
            break TerminalStatus::Truncated { step_budget };
        }
        let Some(mover) = selector.pick(&eligible)? else {
            break TerminalStatus::ScheduleExhausted;
        };
        let to = match scheduler {
            Some(f) => f.choose(game, &current, mover)?,
            None => selector.pick_colour(&game.better_of(current.colours(), mover)),
        };
        steps.push(ImprovementStep {
            mover,
            from: current.get(mover),
            to,
        });
        current = current.with(mover, to);
    };
    Ok(Path {
        start: start.clone(),
        steps,
        terminal,
    })
}

/// Re-validates `path` against `game`: every step must be an improvement
/// step (and `f(s, i)` when a scheduler is given), and the terminal status
/// must hold for the replayed states. Returns the replayed states.
pub fn replay(
    game: &Game,
    path: &Path,
    scheduler: Option<&dyn Scheduler>,
) -> Result<Vec<JointStrategy>> {
    game.validate(&path.start)?;
    let mut states = vec![path.start.clone()];
    let mut current = path.start.clone();
    for (index, step) in path.steps.iter().enumerate() {
        let fail = |reason: String| Error::Replay { index, reason };
        game.check_player(step.mover)
            .map_err(|e| fail(e.to_string()))?;
        if current.get(step.mover) != step.from {
            return Err(fail(format!(
                "player {} holds {}, step claims {}",
                step.mover,
                current.get(step.mover).0,
                step.from.0
            )));
        }
        if !game
            .better_of(current.colours(), step.mover)
            .contains(&step.to)
        {
            return Err(fail(format!(
                "{} is not a better response for player {} at {current}",
                step.to.0, step.mover
            )));
        }
        if let Some(f) = scheduler {
            let expected = f
                .choose(game, &current, step.mover)
                .map_err(|e| fail(e.to_string()))?;
            if expected != step.to {
                return Err(fail(format!(
                    "scheduler {} picks {} for player {}, step moves to {}",
                    f.name(),
                    expected.0,
                    step.mover,
                    step.to.0
                )));
            }
        }
        current = current.with(step.mover, step.to);
        states.push(current.clone());
    }
    let end = path.steps.len();
    match path.terminal {
        TerminalStatus::ReachedNash => {
            if !game.is_nash(&current)? {
                return Err(Error::Replay {
                    index: end,
                    reason: format!("path claims a Nash equilibrium but {current} is not one"),
                });
            }
        }
        TerminalStatus::CycleDetected {
            cycle_start,
            first_repeat_index,
        } => {
            if first_repeat_index != end
                || cycle_start >= first_repeat_index
                || states[cycle_start] != states[first_repeat_index]
            {
                return Err(Error::Replay {
                    index: end,
                    reason: format!(
                        "lasso does not close: state {cycle_start} vs state {first_repeat_index}"
                    ),
                });
            }
        }
        TerminalStatus::Truncated { .. }
        | TerminalStatus::ScheduleExhausted
        | TerminalStatus::Prefix => {}
    }
    Ok(states)
}

/// Start of the worst-case first-solution path: `c_1 c_{n-1} c_{n-2} ... c_1`.
pub fn tightness_start(n: usize) -> JointStrategy {
    let mut colours = vec![Colour(0)];
    colours.extend((2..=n).map(|j| Colour((n - j) as u16)));
    JointStrategy::new(colours)
}

/// Mover order of the worst-case first-solution path: player 1, then `n-2`
/// rounds of `(n, n-1, ..., 2, 1)`, then the chain phases
/// `(n), (n-1, n), ..., (4..n), (3..n-1), (2..n-2, n, n-1, n)`.
pub fn tightness_schedule(n: usize) -> Vec<usize> {
    let mut movers = vec![1];
    for _ in 2..n {
        movers.extend((2..=n).rev());
        movers.push(1);
    }
    for first in (4..=n).rev() {
        movers.extend(first..=n);
    }
    movers.extend(3..n);
    movers.extend(2..n.saturating_sub(1));
    movers.extend([n, n - 1, n]);
    movers
}

/// Replays the worst-case schedule under the dijkstra scheduler from
/// [`tightness_start`] and stops at the first legitimate state. The result
/// is a [`TerminalStatus::Prefix`].
pub fn tightness_path(n: usize, colour_count: u16) -> Result<Path> {
    if n < 3 || (colour_count as usize) < n - 1 {
        return Err(Error::Domain(format!(
            "tightness path needs n >= 3 and |C| >= n - 1, got n = {n}, |C| = {colour_count}"
        )));
    }
    let game = build_first_solution_game(n, colour_count)?;
    let scheduler = dijkstra_first_scheduler(colour_count)?;
    let start = tightness_start(n);
    let mut current = start.clone();
    let mut steps = Vec::new();
    for mover in tightness_schedule(n) {
        if game.is_legitimate(&current)? {
            break;
        }
        let to = scheduler.choose(&game, &current, mover)?;
        steps.push(ImprovementStep {
            mover,
            from: current.get(mover),
            to,
        });
        current = current.with(mover, to);
    }
    Ok(Path {
        start,
        steps,
        terminal: TerminalStatus::Prefix,
    })
}

/// An infinite first-solution improvement path that never visits a
/// legitimate state, over colours `a = 0`, `b = 1`, for `n >= 4`:
/// `bba^{n-4}ab -> aba^{n-4}ab -> aba^{n-4}aa ->* abb^{n-4}ba -> aab^{n-4}ba
/// -> bab^{n-4}ba -> bab^{n-4}bb ->* baa^{n-4}ab -> bba^{n-4}ab`.
/// Each `->*` segment recolours players `3..n-1` left to right.
pub fn first_solution_nonclosure_lasso(n: usize) -> Result<Path> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "non-closure lasso needs n >= 4, got {n}"
        )));
    }
    let (a, b) = (Colour(0), Colour(1));
    let mut colours = vec![b, b];
    colours.extend(std::iter::repeat_n(a, n - 3));
    colours.push(b);
    let start = JointStrategy::new(colours);
    let step = |mover, from, to| ImprovementStep { mover, from, to };
    let mut steps = vec![step(1, b, a), step(n, b, a)];
    steps.extend((3..n).map(|i| step(i, a, b)));
    steps.extend([step(2, b, a), step(1, a, b), step(n, a, b)]);
    steps.extend((3..n).map(|i| step(i, b, a)));
    steps.push(step(2, a, b));
    Ok(Path::lasso(start, steps, 0))
}

/// Start of the counterclockwise counterexample for `|C| = n - 2`:
/// `c_2 c_1 c_{n-2} ... c_2 c_1`.
pub fn counterclockwise_start(n: usize) -> JointStrategy {
    let mut colours = vec![Colour(1), Colour(0)];
    colours.extend((3..=n).map(|j| Colour((n - j) as u16)));
    JointStrategy::new(colours)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_alternative_first_game, build_chain_coordination_game};

    fn js(v: &[u16]) -> JointStrategy {
        JointStrategy::from_raw(v)
    }

    #[test]
    fn successor_wraps() {
        assert_eq!(cyclic_successor(Colour(0), 3), Colour(1));
        assert_eq!(cyclic_successor(Colour(2), 3), Colour(0));
    }

    #[test]
    fn edges_at_zero_strategy() {
        let g = build_first_solution_game(3, 2).unwrap();
        let edges = improvement_edges(&g, &js(&[0, 1, 0])).unwrap();
        assert_eq!(
            edges.iter().map(|e| e.mover).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        let g3 = build_first_solution_game(3, 3).unwrap();
        let edges = improvement_edges(&g3, &js(&[0, 0, 0])).unwrap();
        assert_eq!(
            edges,
            vec![
                ImprovementStep {
                    mover: 1,
                    from: Colour(0),
                    to: Colour(1)
                },
                ImprovementStep {
                    mover: 1,
                    from: Colour(0),
                    to: Colour(2)
                },
            ]
        );
    }

    #[test]
    fn dijkstra_scheduler_choices() {
        let g = build_first_solution_game(3, 3).unwrap();
        let f = dijkstra_first_scheduler(3).unwrap();
        assert_eq!(f.choose(&g, &js(&[0, 0, 0]), 1).unwrap(), Colour(1));
        assert_eq!(f.choose(&g, &js(&[0, 1, 1]), 2).unwrap(), Colour(0));
        assert!(matches!(
            f.choose(&g, &js(&[0, 0, 1]), 2),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn three_state_scheduler_worked_example() {
        let g = crate::game::build_three_state_game(3).unwrap();
        let f = three_state_scheduler();
        assert_eq!(f.choose(&g, &js(&[2, 1, 0]), 2).unwrap(), Colour(2));
        assert_eq!(f.choose(&g, &js(&[2, 2, 0]), 2).unwrap(), Colour(0));
    }

    #[test]
    fn four_state_scheduler_preserves_sets() {
        let f = four_state_scheduler();
        assert_eq!(f.propose(&js(&[1, 0, 0, 2]), 1), Colour(3));
        assert_eq!(f.propose(&js(&[1, 0, 0, 2]), 4), Colour(0));
    }

    #[test]
    fn zero_budget_truncates() {
        let g = build_first_solution_game(3, 2).unwrap();
        let p = generate_path(&g, &js(&[0, 1, 0]), None, &SelectionPolicy::Adversarial, 0).unwrap();
        assert_eq!(p.terminal, TerminalStatus::Truncated { step_budget: 0 });
        assert!(p.is_empty());
    }

    #[test]
    fn invalid_start_rejected() {
        let g = build_first_solution_game(3, 2).unwrap();
        let r = generate_path(&g, &js(&[0, 3, 0]), None, &SelectionPolicy::Adversarial, 10);
        assert!(matches!(r, Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn alternative_game_cycle_demo() {
        let g = build_alternative_first_game(3, 3).unwrap();
        let p = generate_path(
            &g,
            &js(&[2, 0, 0]),
            None,
            &SelectionPolicy::cycle_demo(),
            100,
        )
        .unwrap();
        let shown: Vec<String> = p
            .states()
            .iter()
            .map(|s| s.raw().iter().map(|v| v.to_string()).collect())
            .collect();
        assert_eq!(
            shown,
            ["200", "220", "120", "122", "112", "012", "011", "001", "201", "200"]
        );
        assert_eq!(
            p.terminal,
            TerminalStatus::CycleDetected {
                cycle_start: 0,
                first_repeat_index: 9
            }
        );
        let ccw = generate_path(
            &g,
            &js(&[2, 0, 0]),
            None,
            &SelectionPolicy::Counterclockwise,
            100,
        )
        .unwrap();
        // Same moves; the recurrence is detected one step later because the
        // policy memory (last mover) differs at the start.
        assert_eq!(ccw.steps[..9], p.steps[..]);
        assert_eq!(
            ccw.terminal,
            TerminalStatus::CycleDetected {
                cycle_start: 1,
                first_repeat_index: 10
            }
        );
    }

    #[test]
    fn chain_rightmost_first_is_longest() {
        for n in 2..=6 {
            let g = build_chain_coordination_game(n, n as u16).unwrap();
            let start = JointStrategy::new((0..n as u16).map(Colour).collect());
            let p =
                generate_path(&g, &start, None, &SelectionPolicy::RightmostFirst, 1000).unwrap();
            assert_eq!(p.terminal, TerminalStatus::ReachedNash);
            assert_eq!(p.len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn fixed_schedule_rejects_ineligible_mover() {
        let g = build_first_solution_game(3, 2).unwrap();
        let policy = SelectionPolicy::Fixed {
            movers: vec![2],
            cyclic: false,
        };
        let r = generate_path(&g, &js(&[0, 0, 0]), None, &policy, 10);
        assert!(matches!(r, Err(Error::ContractViolation(_))));
    }

    #[test]
    fn replay_rejects_tampered_step() {
        let g = build_first_solution_game(3, 3).unwrap();
        let mut p =
            generate_path(&g, &js(&[0, 1, 2]), None, &SelectionPolicy::RoundRobin, 50).unwrap();
        assert!(replay(&g, &p, None).is_ok());
        p.steps[0].to = p.steps[0].from;
        assert!(matches!(
            replay(&g, &p, None),
            Err(Error::Replay { index: 0, .. })
        ));
    }

    #[test]
    fn tightness_schedule_lengths() {
        for n in 3..=7 {
            let s = tightness_schedule(n);
            assert_eq!(s.len(), 1 + n * (n - 2) + n * (n - 1) / 2);
        }
    }
}
