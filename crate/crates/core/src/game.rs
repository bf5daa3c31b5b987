//! Finite strategic games on directed graphs.
//!
//! Players are numbered `1..=n` at every public entry point. Internally a
//! [`JointStrategy`] stores player `i`'s colour at position `i - 1`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strategy, drawn from the contiguous colour universe `0..|C|`.
///
/// Human-facing output renders colours as letters (`a` = 0).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colour(pub u16);

impl Colour {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Letter rendering; colours past `z` fall back to their number.
    pub fn letter(self) -> String {
        if self.0 < 26 {
            char::from(b'a' + self.0 as u8).to_string()
        } else {
            format!("<{}>", self.0)
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letter())
    }
}

/// `(c + by) mod modulus`.
pub fn add_mod(c: Colour, by: u16, modulus: u16) -> Colour {
    Colour(((c.0 as u32 + by as u32) % modulus as u32) as u16)
}

/// Directed graph on nodes `1..=n`. Node `j` is a neighbour of `i` when the
/// edge `j -> i` exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
    in_neighbours: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Domain("graph needs at least one node".into()));
        }
        let edges: BTreeSet<_> = edges.into_iter().collect();
        let mut in_neighbours = vec![Vec::new(); node_count];
        for &(from, to) in &edges {
            if from == 0 || from > node_count || to == 0 || to > node_count {
                return Err(Error::Domain(format!(
                    "edge {from} -> {to} leaves node range 1..={node_count}"
                )));
            }
            in_neighbours[to - 1].push(from);
        }
        Ok(Self {
            node_count,
            edges,
            in_neighbours,
        })
    }

    /// Directed ring `1 -> 2 -> ... -> n -> 1`.
    pub fn ring(n: usize) -> Result<Self> {
        Self::new(n, (1..=n).map(|i| (i, i % n + 1)))
    }

    /// Undirected ring encoded with both edge directions.
    pub fn bidirectional_ring(n: usize) -> Result<Self> {
        Self::new(n, (1..=n).flat_map(|i| [(i, i % n + 1), (i % n + 1, i)]))
    }

    /// Chain `1 -> 2 -> ... -> n`.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i, i + 1)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// `N_i`, sorted ascending.
    pub fn neighbours(&self, node: usize) -> &[usize] {
        &self.in_neighbours[node - 1]
    }
}

/// Payoff table over `(own, left, right)` colour triples, where `left` and
/// `right` name two (possibly equal) neighbours of the player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffTable {
    left: usize,
    right: usize,
    colours: u16,
    values: Vec<u32>,
}

impl PayoffTable {
    /// `values` is indexed by `own * |C|^2 + left * |C| + right`.
    pub fn new(left: usize, right: usize, colours: u16, values: Vec<u32>) -> Result<Self> {
        let c = colours as usize;
        if values.len() != c * c * c {
            return Err(Error::Domain(format!(
                "payoff table needs {} entries for {} colours, got {}",
                c * c * c,
                colours,
                values.len()
            )));
        }
        Ok(Self {
            left,
            right,
            colours,
            values,
        })
    }

    pub fn from_fn(
        left: usize,
        right: usize,
        colours: u16,
        f: impl Fn(Colour, Colour, Colour) -> u32,
    ) -> Self {
        let mut values = Vec::with_capacity((colours as usize).pow(3));
        for own in 0..colours {
            for l in 0..colours {
                for r in 0..colours {
                    values.push(f(Colour(own), Colour(l), Colour(r)));
                }
            }
        }
        Self {
            left,
            right,
            colours,
            values,
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, own: Colour, left: Colour, right: Colour) -> u32 {
        let c = self.colours as usize;
        self.values[own.index() * c * c + left.index() * c + right.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum PayoffRule {
    /// Number of neighbours holding the player's colour.
    Coordination,
    /// Number of neighbours holding a different colour.
    AntiCoordination,
    Tabulated(PayoffTable),
}

/// Which construction produced a game. Used to pick matching schedulers and
/// to describe instances in traces and reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GameFamily {
    FirstSolution {
        n: usize,
        colours: u16,
    },
    ThreeState {
        n: usize,
    },
    FourState {
        n: usize,
    },
    Chain {
        n: usize,
        colours: u16,
    },
    AltFirst {
        n: usize,
        k: u16,
    },
    #[default]
    Custom,
}

impl fmt::Display for GameFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FirstSolution { n, colours } => write!(f, "first-solution n={n} |C|={colours}"),
            Self::ThreeState { n } => write!(f, "three-state n={n}"),
            Self::FourState { n } => write!(f, "four-state n={n}"),
            Self::Chain { n, colours } => write!(f, "chain n={n} |C|={colours}"),
            Self::AltFirst { n, k } => write!(f, "alternative first-solution n={n} k={k}"),
            Self::Custom => f.write_str("custom"),
        }
    }
}

/// Serializable form of a [`Game`]. Built-in families rebuild through their
/// builder so the family tag survives a round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    #[serde(default)]
    pub family: GameFamily,
    pub players: usize,
    pub edges: Vec<(usize, usize)>,
    pub colour_count: u16,
    pub strategy_sets: Vec<Vec<u16>>,
    pub rules: Vec<PayoffRule>,
}

impl GameSpec {
    pub fn build(&self) -> Result<Game> {
        if self.family != GameFamily::Custom {
            return build_family(self.family);
        }
        Game::new(
            DirectedGraph::new(self.players, self.edges.iter().copied())?,
            self.colour_count,
            self.strategy_sets
                .iter()
                .map(|set| set.iter().map(|&v| Colour(v)).collect())
                .collect(),
            self.rules.clone(),
        )
    }
}

/// Rebuilds a built-in family; `Custom` has no builder.
pub fn build_family(family: GameFamily) -> Result<Game> {
    match family {
        GameFamily::FirstSolution { n, colours } => build_first_solution_game(n, colours),
        GameFamily::ThreeState { n } => build_three_state_game(n),
        GameFamily::FourState { n } => build_four_state_game(n),
        GameFamily::Chain { n, colours } => build_chain_coordination_game(n, colours),
        GameFamily::AltFirst { n, k } => build_alternative_first_game(n, k),
        GameFamily::Custom => Err(Error::Domain(
            "custom games are rebuilt from a full spec, not a family tag".into(),
        )),
    }
}

/// One colour per player; entry `i - 1` belongs to player `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointStrategy(Vec<Colour>);

impl JointStrategy {
    pub fn new(colours: Vec<Colour>) -> Self {
        Self(colours)
    }

    pub fn from_raw(values: &[u16]) -> Self {
        Self(values.iter().map(|&v| Colour(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Colour of player `player` (1-based).
    pub fn get(&self, player: usize) -> Colour {
        self.0[player - 1]
    }

    /// `(c, s_{-i})`.
    pub fn with(&self, player: usize, colour: Colour) -> Self {
        let mut next = self.0.clone();
        next[player - 1] = colour;
        Self(next)
    }

    pub fn colours(&self) -> &[Colour] {
        &self.0
    }

    pub fn raw(&self) -> Vec<u16> {
        self.0.iter().map(|c| c.0).collect()
    }
}

impl fmt::Display for JointStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Game {
    graph: DirectedGraph,
    colour_count: u16,
    strategy_sets: Vec<Vec<Colour>>,
    rules: Vec<PayoffRule>,
    family: GameFamily,
}

impl Game {
    pub fn new(
        graph: DirectedGraph,
        colour_count: u16,
        strategy_sets: Vec<Vec<Colour>>,
        rules: Vec<PayoffRule>,
    ) -> Result<Self> {
        Self::with_family(
            graph,
            colour_count,
            strategy_sets,
            rules,
            GameFamily::Custom,
        )
    }

    fn with_family(
        graph: DirectedGraph,
        colour_count: u16,
        mut strategy_sets: Vec<Vec<Colour>>,
        rules: Vec<PayoffRule>,
        family: GameFamily,
    ) -> Result<Self> {
        let n = graph.node_count();
        if n < 2 {
            return Err(Error::Domain(format!(
                "a game needs n > 1 players, got {n}"
            )));
        }
        if colour_count < 2 {
            return Err(Error::Domain(format!(
                "colour universe needs at least 2 colours, got {colour_count}"
            )));
        }
        if strategy_sets.len() != n || rules.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} strategy sets and payoff rules, got {} and {}",
                strategy_sets.len(),
                rules.len()
            )));
        }
        for (i, set) in strategy_sets.iter_mut().enumerate() {
            set.sort();
            set.dedup();
            if set.is_empty() {
                return Err(Error::Domain(format!("player {} has no strategies", i + 1)));
            }
            if let Some(c) = set.iter().find(|c| c.0 >= colour_count) {
                return Err(Error::Domain(format!(
                    "player {} strategy {} outside colour universe 0..{colour_count}",
                    i + 1,
                    c.0
                )));
            }
        }
        for (i, rule) in rules.iter().enumerate() {
            if let PayoffRule::Tabulated(table) = rule {
                let player = i + 1;
                if table.colours != colour_count
                    || table.values.len() != (colour_count as usize).pow(3)
                {
                    return Err(Error::Domain(format!(
                        "player {player} payoff table built for {} colours, game has {colour_count}",
                        table.colours
                    )));
                }
                let nbrs = graph.neighbours(player);
                for side in [table.left, table.right] {
                    if !nbrs.contains(&side) {
                        return Err(Error::Domain(format!(
                            "player {player} payoff table reads node {side}, which is not a neighbour"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            graph,
            colour_count,
            strategy_sets,
            rules,
            family,
        })
    }

    pub fn players(&self) -> usize {
        self.graph.node_count()
    }

    /// A self-contained description that rebuilds this game.
    pub fn spec(&self) -> GameSpec {
        GameSpec {
            family: self.family,
            players: self.players(),
            edges: self.graph.edges().collect(),
            colour_count: self.colour_count,
            strategy_sets: self
                .strategy_sets
                .iter()
                .map(|set| set.iter().map(|c| c.0).collect())
                .collect(),
            rules: self.rules.clone(),
        }
    }

    pub fn colour_count(&self) -> u16 {
        self.colour_count
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn family(&self) -> GameFamily {
        self.family
    }

    /// `A(i)`, sorted ascending.
    pub fn strategies(&self, player: usize) -> &[Colour] {
        &self.strategy_sets[player - 1]
    }

    pub fn rule(&self, player: usize) -> &PayoffRule {
        &self.rules[player - 1]
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player == 0 || player > self.players() {
            return Err(Error::PlayerOutOfRange {
                player,
                players: self.players(),
            });
        }
        Ok(())
    }

    pub fn validate(&self, s: &JointStrategy) -> Result<()> {
        if s.len() != self.players() {
            return Err(Error::InvalidStrategy(format!(
                "expected {} colours, got {}",
                self.players(),
                s.len()
            )));
        }
        for (i, c) in s.colours().iter().enumerate() {
            if self.strategy_sets[i].binary_search(c).is_err() {
                return Err(Error::InvalidStrategy(format!(
                    "colour {} is not a strategy of player {}",
                    c.0,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// `p_i(s)`.
    pub fn payoff(&self, s: &JointStrategy, player: usize) -> Result<u32> {
        self.check_player(player)?;
        self.validate(s)?;
        Ok(self.payoff_of(s.colours(), player, s.get(player)))
    }

    /// `p_i(c, s_{-i})` without validation. `colours` is 0-indexed.
    pub(crate) fn payoff_of(&self, colours: &[Colour], player: usize, own: Colour) -> u32 {
        let nbrs = self.graph.neighbours(player);
        match &self.rules[player - 1] {
            PayoffRule::Coordination => {
                nbrs.iter().filter(|&&j| colours[j - 1] == own).count() as u32
            }
            PayoffRule::AntiCoordination => {
                nbrs.iter().filter(|&&j| colours[j - 1] != own).count() as u32
            }
            PayoffRule::Tabulated(t) => t.value(own, colours[t.left - 1], colours[t.right - 1]),
        }
    }

    /// Highest payoff player `player` can reach against `s_{-i}`.
    pub(crate) fn best_payoff(&self, colours: &[Colour], player: usize) -> u32 {
        self.strategy_sets[player - 1]
            .iter()
            .map(|&c| self.payoff_of(colours, player, c))
            .max()
            .unwrap_or(0)
    }

    /// `argmax_{c in A(i)} p_i(c, s_{-i})`, ascending.
    pub fn best_responses(&self, s: &JointStrategy, player: usize) -> Result<Vec<Colour>> {
        self.check_player(player)?;
        self.validate(s)?;
        let best = self.best_payoff(s.colours(), player);
        Ok(self.strategy_sets[player - 1]
            .iter()
            .copied()
            .filter(|&c| self.payoff_of(s.colours(), player, c) == best)
            .collect())
    }

    /// Strategies strictly improving on the player's current payoff, ascending.
    pub fn better_responses(&self, s: &JointStrategy, player: usize) -> Result<Vec<Colour>> {
        self.check_player(player)?;
        self.validate(s)?;
        Ok(self.better_of(s.colours(), player))
    }

    pub(crate) fn better_of(&self, colours: &[Colour], player: usize) -> Vec<Colour> {
        let current = self.payoff_of(colours, player, colours[player - 1]);
        self.strategy_sets[player - 1]
            .iter()
            .copied()
            .filter(|&c| self.payoff_of(colours, player, c) > current)
            .collect()
    }

    pub(crate) fn is_best_responding_raw(&self, colours: &[Colour], player: usize) -> bool {
        self.payoff_of(colours, player, colours[player - 1]) == self.best_payoff(colours, player)
    }

    pub fn is_best_responding(&self, s: &JointStrategy, player: usize) -> Result<bool> {
        self.check_player(player)?;
        self.validate(s)?;
        Ok(self.is_best_responding_raw(s.colours(), player))
    }

    pub(crate) fn non_best_responders_raw(&self, colours: &[Colour]) -> Vec<usize> {
        (1..=self.players())
            .filter(|&i| !self.is_best_responding_raw(colours, i))
            .collect()
    }

    /// Players not playing a best response in `s`, ascending.
    pub fn non_best_responders(&self, s: &JointStrategy) -> Result<Vec<usize>> {
        self.validate(s)?;
        Ok(self.non_best_responders_raw(s.colours()))
    }

    pub fn is_nash(&self, s: &JointStrategy) -> Result<bool> {
        Ok(self.non_best_responders(s)?.is_empty())
    }

    /// Exactly one player is not best-responding.
    pub fn is_legitimate(&self, s: &JointStrategy) -> Result<bool> {
        Ok(self.non_best_responders(s)?.len() == 1)
    }

    /// `∏ |A(i)|`.
    pub fn state_count(&self) -> u128 {
        self.strategy_sets
            .iter()
            .map(|set| set.len() as u128)
            .product()
    }

    /// Mixed-radix index of `s`, player 1 most significant.
    pub fn index_of(&self, s: &JointStrategy) -> Result<usize> {
        self.validate(s)?;
        Ok(self.index_of_raw(s.colours()))
    }

    pub(crate) fn index_of_raw(&self, colours: &[Colour]) -> usize {
        colours
            .iter()
            .zip(&self.strategy_sets)
            .fold(0usize, |acc, (c, set)| {
                acc * set.len() + set.binary_search(c).expect("validated colour")
            })
    }

    /// Inverse of [`Game::index_of`].
    pub fn state_at(&self, mut index: usize) -> JointStrategy {
        let mut colours = vec![Colour(0); self.players()];
        for (slot, set) in colours.iter_mut().zip(&self.strategy_sets).rev() {
            *slot = set[index % set.len()];
            index /= set.len();
        }
        JointStrategy(colours)
    }

    /// Every joint strategy in mixed-radix order.
    pub fn states(&self) -> impl Iterator<Item = JointStrategy> + '_ {
        let count = usize::try_from(self.state_count()).unwrap_or(usize::MAX);
        (0..count).map(move |i| self.state_at(i))
    }
}

fn full_palette(colours: u16) -> Vec<Colour> {
    (0..colours).map(Colour).collect()
}

/// Dijkstra's first solution as a game: directed ring, player 1 plays the
/// anti-coordination game, every other player the coordination game.
pub fn build_first_solution_game(n: usize, colour_count: u16) -> Result<Game> {
    if n < 2 || colour_count < 2 {
        return Err(Error::Domain(format!(
            "first-solution game needs n >= 2 and |C| >= 2, got n = {n}, |C| = {colour_count}"
        )));
    }
    let mut rules = vec![PayoffRule::Coordination; n];
    rules[0] = PayoffRule::AntiCoordination;
    Game::with_family(
        DirectedGraph::ring(n)?,
        colour_count,
        vec![full_palette(colour_count); n],
        rules,
        GameFamily::FirstSolution {
            n,
            colours: colour_count,
        },
    )
}

/// Same ring as the first solution, but player 1 scores 1 exactly when
/// `s_1 = s_n ⊕ 1 (mod k)`.
pub fn build_alternative_first_game(n: usize, k: u16) -> Result<Game> {
    if n < 2 || k < 2 {
        return Err(Error::Domain(format!(
            "alternative first-solution game needs n >= 2 and k >= 2, got n = {n}, k = {k}"
        )));
    }
    let mut rules = vec![PayoffRule::Coordination; n];
    rules[0] = PayoffRule::Tabulated(PayoffTable::from_fn(n, n, k, |own, pred, _| {
        u32::from(own == add_mod(pred, 1, k))
    }));
    Game::with_family(
        DirectedGraph::ring(n)?,
        k,
        vec![full_palette(k); n],
        rules,
        GameFamily::AltFirst { n, k },
    )
}

/// Coordination game on the chain `1 -> 2 -> ... -> n`.
pub fn build_chain_coordination_game(n: usize, colour_count: u16) -> Result<Game> {
    if n < 2 || colour_count < 2 {
        return Err(Error::Domain(format!(
            "chain game needs n >= 2 and |C| >= 2, got n = {n}, |C| = {colour_count}"
        )));
    }
    Game::with_family(
        DirectedGraph::chain(n)?,
        colour_count,
        vec![full_palette(colour_count); n],
        vec![PayoffRule::Coordination; n],
        GameFamily::Chain {
            n,
            colours: colour_count,
        },
    )
}

/// Payoff of a normal machine: 0 when both `own ⊕ 1` and `own ⊕ 2` are held
/// by neighbours, 1 when only `own ⊕ 1` is, 2 otherwise.
fn normal_payoff(own: Colour, left: Colour, right: Colour, modulus: u16) -> u32 {
    let held = |c: Colour| c == left || c == right;
    match (
        held(add_mod(own, 1, modulus)),
        held(add_mod(own, 2, modulus)),
    ) {
        (true, true) => 0,
        (true, false) => 1,
        _ => 2,
    }
}

fn bottom_rule(n: usize, modulus: u16) -> PayoffRule {
    PayoffRule::Tabulated(PayoffTable::from_fn(n, 2, modulus, move |own, _, right| {
        u32::from(add_mod(own, 1, modulus) != right)
    }))
}

fn normal_rules(n: usize, modulus: u16) -> impl Iterator<Item = PayoffRule> {
    (2..n).map(move |i| {
        PayoffRule::Tabulated(PayoffTable::from_fn(
            i - 1,
            i + 1,
            modulus,
            move |o, l, r| normal_payoff(o, l, r, modulus),
        ))
    })
}

/// Dijkstra's three-state ring. Player 1 is the bottom machine, player `n`
/// the top; the top reads `s_{n-1}` (left) and `s_1` (right).
pub fn build_three_state_game(n: usize) -> Result<Game> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "three-state game needs n >= 3, got {n}"
        )));
    }
    let mut rules = vec![bottom_rule(n, 3)];
    rules.extend(normal_rules(n, 3));
    rules.push(PayoffRule::Tabulated(PayoffTable::from_fn(
        n - 1,
        1,
        3,
        |own, left, right| u32::from(!(left == right && own != add_mod(right, 1, 3))),
    )));
    Game::with_family(
        DirectedGraph::bidirectional_ring(n)?,
        3,
        vec![full_palette(3); n],
        rules,
        GameFamily::ThreeState { n },
    )
}

/// Ghosh's four-state ring: `A(1) = {1,3}`, `A(n) = {0,2}`, middle players
/// `{0,1,2,3}`, arithmetic mod 4.
pub fn build_four_state_game(n: usize) -> Result<Game> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "four-state game needs n >= 3, got {n}"
        )));
    }
    let mut rules = vec![bottom_rule(n, 4)];
    rules.extend(normal_rules(n, 4));
    rules.push(PayoffRule::Tabulated(PayoffTable::from_fn(
        n - 1,
        1,
        4,
        |own, left, _| u32::from(add_mod(own, 1, 4) != left),
    )));
    let mut sets = vec![full_palette(4); n];
    sets[0] = vec![Colour(1), Colour(3)];
    sets[n - 1] = vec![Colour(0), Colour(2)];
    Game::with_family(
        DirectedGraph::bidirectional_ring(n)?,
        4,
        sets,
        rules,
        GameFamily::FourState { n },
    )
}
