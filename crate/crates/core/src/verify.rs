//! Explicit-state deciders over the finite improvement graph.
//!
//! Nodes are joint strategies, numbered by their mixed-radix index. The full
//! graph has an edge `s -> (c, s_{-i})` for every better response `c` of
//! every player `i`; the scheduler-restricted graph keeps only `c = f(s, i)`.
//! Every start state is admissible, so a cycle anywhere in a subgraph is a
//! reachable cycle.
//!
//! Decision procedures:
//!
//! * stability: every edge out of a legitimate node ends in a legitimate node.
//! * closure: the subgraph induced on non-legitimate nodes has neither a
//!   sink (a Nash equilibrium) nor a cycle.
//! * fairness: for each player `i`, the edges not moved by `i` form an
//!   acyclic graph.
//! * self-stabilization: fairness, stability and closure together. Once all
//!   three hold, every path reaches a legitimate state and stays legitimate,
//!   so "in `k` steps" is the worst-case number of steps before the first
//!   legitimate state, computed by longest-path over the acyclic
//!   non-legitimate subgraph.
//! * FIP: the full graph is acyclic; the longest path comes from a
//!   topological sweep.
//! * weak self-stabilization: every node reaches a strongly connected
//!   component of the legitimate-induced subgraph whose internal edges are
//!   moved by every player. Inside such a component a single cycle can visit
//!   every internal edge, giving a path that stays legitimate and selects
//!   every player infinitely often.

use std::collections::VecDeque;
use std::time::Instant;

use petgraph::algo::{tarjan_scc, toposort};
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ImprovementStep, Path, Scheduler, TerminalStatus};
use crate::error::{Error, Result};
use crate::game::{Game, GameFamily, JointStrategy};

/// Default cap on `∏ |A(i)|`.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_NODE_BUDGET`].
pub const NODE_BUDGET_ENV: &str = "SELFSTAB_NODE_BUDGET";

/// Node budget from [`NODE_BUDGET_ENV`], falling back to the default.
pub fn node_budget_from_env() -> u64 {
    std::env::var(NODE_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub step: ImprovementStep,
}

/// Explicit improvement graph with per-node annotations.
#[derive(Clone, Debug)]
pub struct ImprovementGraph {
    game: Game,
    scheduler: Option<String>,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
    non_best: Vec<u16>,
}

/// Builds the full graph, or the scheduler-restricted one when `scheduler`
/// is given. A scheduler breaking its contract anywhere is reported as an
/// error.
pub fn build_improvement_graph(
    game: &Game,
    scheduler: Option<&dyn Scheduler>,
    node_budget: u64,
) -> Result<ImprovementGraph> {
    let required = game.state_count();
    if required > node_budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: node_budget,
        });
    }
    let count = required as usize;
    let per_node: Vec<(u16, Vec<Edge>)> = (0..count)
        .into_par_iter()
        .map(|v| {
            let s = game.state_at(v);
            let eligible = game.non_best_responders_raw(s.colours());
            let mut out = Vec::new();
            for &mover in &eligible {
                let from = s.get(mover);
                let targets = match scheduler {
                    Some(f) => vec![f.choose(game, &s, mover)?],
                    None => game.better_of(s.colours(), mover),
                };
                for to in targets {
                    let next = s.with(mover, to);
                    out.push(Edge {
                        target: game.index_of_raw(next.colours()),
                        step: ImprovementStep { mover, from, to },
                    });
                }
            }
            Ok((eligible.len() as u16, out))
        })
        .collect::<Result<_>>()?;

    let mut offsets = Vec::with_capacity(count + 1);
    let mut edges = Vec::new();
    let mut non_best = Vec::with_capacity(count);
    offsets.push(0);
    for (nb, out) in per_node {
        non_best.push(nb);
        edges.extend(out);
        offsets.push(edges.len());
    }
    Ok(ImprovementGraph {
        game: game.clone(),
        scheduler: scheduler.map(|f| f.name()),
        offsets,
        edges,
        non_best,
    })
}

impl ImprovementGraph {
    pub fn game(&self) -> &Game {
        &self.game
    }

    /// Name of the restricting scheduler, if any.
    pub fn scheduler(&self) -> Option<&str> {
        self.scheduler.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.non_best.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges_from(&self, node: usize) -> &[Edge] {
        &self.edges[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn state(&self, node: usize) -> JointStrategy {
        self.game.state_at(node)
    }

    pub fn non_best_responders(&self, node: usize) -> usize {
        self.non_best[node] as usize
    }

    pub fn is_legitimate(&self, node: usize) -> bool {
        self.non_best[node] == 1
    }

    pub fn is_nash(&self, node: usize) -> bool {
        self.non_best[node] == 0
    }

    pub fn legitimate_count(&self) -> usize {
        self.non_best.iter().filter(|&&n| n == 1).count()
    }

    pub fn nash_count(&self) -> usize {
        self.non_best.iter().filter(|&&n| n == 0).count()
    }

    /// All nodes, with the edges accepted by `keep_edge` between nodes
    /// accepted by `keep_node`. Node weights are the state indices.
    fn subgraph(
        &self,
        keep_node: &dyn Fn(usize) -> bool,
        keep_edge: &dyn Fn(&Edge) -> bool,
    ) -> DiGraph<usize, usize> {
        let mut g = DiGraph::with_capacity(self.node_count(), self.edge_count());
        for v in 0..self.node_count() {
            g.add_node(v);
        }
        for v in (0..self.node_count()).filter(|&v| keep_node(v)) {
            for (k, e) in self.edges_from(v).iter().enumerate() {
                if keep_node(e.target) && keep_edge(e) {
                    g.add_edge(
                        NodeIndex::new(v),
                        NodeIndex::new(e.target),
                        self.offsets[v] + k,
                    );
                }
            }
        }
        g
    }

    /// A cycle in the filtered subgraph, as a lasso starting on the cycle.
    /// Picks the component holding the lowest node index and the shortest
    /// cycle through that node.
    fn find_cycle(
        &self,
        keep_node: &dyn Fn(usize) -> bool,
        keep_edge: &dyn Fn(&Edge) -> bool,
    ) -> Option<Path> {
        let g = self.subgraph(keep_node, keep_edge);
        let component = tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.len() > 1)
            .min_by_key(|c| c.iter().map(|n| n.index()).min())?;
        let mut members = vec![false; self.node_count()];
        for n in &component {
            members[n.index()] = true;
        }
        let root = component.iter().map(|n| n.index()).min().unwrap();

        // BFS from root back to root inside the component.
        let mut via: Vec<Option<usize>> = vec![None; self.node_count()];
        let mut queue = VecDeque::from([root]);
        let mut closing = None;
        'search: while let Some(v) = queue.pop_front() {
            for edge_ref in g.edges(NodeIndex::new(v)) {
                let id = *edge_ref.weight();
                let w = self.edges[id].target;
                if !members[w] {
                    continue;
                }
                if w == root {
                    closing = Some(id);
                    break 'search;
                }
                if via[w].is_none() {
                    via[w] = Some(id);
                    queue.push_back(w);
                }
            }
        }
        let mut ids = vec![closing?];
        let mut at = self.source_of(ids[0]);
        while at != root {
            let id = via[at].expect("bfs tree edge");
            ids.push(id);
            at = self.source_of(id);
        }
        ids.reverse();
        Some(Path::lasso(
            self.state(root),
            ids.into_iter().map(|id| self.edges[id].step).collect(),
            0,
        ))
    }

    fn source_of(&self, edge_id: usize) -> usize {
        self.offsets.partition_point(|&o| o <= edge_id) - 1
    }

    fn report(&self, property: Property, started: Instant) -> PropertyReport {
        PropertyReport {
            property,
            instance: self.game.family(),
            scheduler: self.scheduler.clone(),
            verdict: Verdict::Holds,
            witness: None,
            worst_case_first_hit: None,
            expected_bound: None,
            bound_attained: None,
            longest_path: None,
            nash_nodes: self.nash_count(),
            legitimate_nodes: self.legitimate_count(),
            caveat: None,
            procedure: property.procedure().into(),
            statistics: Statistics {
                nodes: self.node_count(),
                edges: self.edge_count(),
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            },
        }
    }

    fn fail(mut report: PropertyReport, witness: Path) -> PropertyReport {
        report.verdict = Verdict::Fails;
        report.witness = Some(witness);
        report
    }

    pub fn stability(&self) -> PropertyReport {
        let started = Instant::now();
        for v in (0..self.node_count()).filter(|&v| self.is_legitimate(v)) {
            if let Some(e) = self
                .edges_from(v)
                .iter()
                .find(|e| !self.is_legitimate(e.target))
            {
                let witness = Path {
                    start: self.state(v),
                    steps: vec![e.step],
                    terminal: TerminalStatus::Prefix,
                };
                return Self::fail(self.report(Property::Stability, started), witness);
            }
        }
        self.report(Property::Stability, started)
    }

    pub fn closure(&self) -> PropertyReport {
        let started = Instant::now();
        if let Some(v) = (0..self.node_count()).find(|&v| self.is_nash(v)) {
            let witness = Path {
                start: self.state(v),
                steps: Vec::new(),
                terminal: TerminalStatus::ReachedNash,
            };
            return Self::fail(self.report(Property::Closure, started), witness);
        }
        let non_legit = |v: usize| !self.is_legitimate(v);
        match self.find_cycle(&non_legit, &|_| true) {
            Some(lasso) => Self::fail(self.report(Property::Closure, started), lasso),
            None => self.report(Property::Closure, started),
        }
    }

    pub fn fairness(&self) -> PropertyReport {
        let started = Instant::now();
        let players = self.game.players();
        let unfair = (1..=players)
            .into_par_iter()
            .find_map_first(|i| self.find_cycle(&|_| true, &|e: &Edge| e.step.mover != i));
        let mut report = self.report(Property::Fairness, started);
        if self.nash_count() > 0 {
            report.caveat = Some(format!(
                "{} Nash equilibria: finite maximal paths exist and cannot select every player \
                 infinitely often; only infinite paths were checked",
                self.nash_count()
            ));
        }
        match unfair {
            Some(lasso) => Self::fail(report, lasso),
            None => report,
        }
    }

    /// Worst case, over start states and choices along the graph, of the
    /// number of steps before the first legitimate state.
    pub fn worst_case_first_hit(&self) -> FirstHit {
        let non_legit = |v: usize| !self.is_legitimate(v);
        if let Some(v) = (0..self.node_count()).find(|&v| self.is_nash(v)) {
            return FirstHit::NashSink {
                path: Path {
                    start: self.state(v),
                    steps: Vec::new(),
                    terminal: TerminalStatus::ReachedNash,
                },
            };
        }
        let g = self.subgraph(&non_legit, &|_| true);
        let order = match toposort(&g, None) {
            Ok(order) => order,
            Err(_) => {
                let lasso = self
                    .find_cycle(&non_legit, &|_| true)
                    .expect("toposort reported a cycle");
                return FirstHit::Unbounded { lasso };
            }
        };
        // dist[v]: longest number of steps from v to its first legitimate node.
        let mut dist = vec![0u64; self.node_count()];
        let mut next: Vec<Option<usize>> = vec![None; self.node_count()];
        for v in order.into_iter().rev().map(|n| n.index()) {
            if self.is_legitimate(v) {
                continue;
            }
            for (k, e) in self.edges_from(v).iter().enumerate() {
                let d = 1 + dist[e.target];
                if d > dist[v] {
                    dist[v] = d;
                    next[v] = Some(self.offsets[v] + k);
                }
            }
        }
        let (worst_start, &steps) = dist
            .iter()
            .enumerate()
            .max_by_key(|&(v, d)| (*d, std::cmp::Reverse(v)))
            .expect("non-empty graph");
        let mut witness_steps = Vec::new();
        let mut at = worst_start;
        while let Some(id) = next[at] {
            witness_steps.push(self.edges[id].step);
            at = self.edges[id].target;
        }
        FirstHit::Bounded {
            steps,
            witness: Path {
                start: self.state(worst_start),
                steps: witness_steps,
                terminal: TerminalStatus::Prefix,
            },
        }
    }

    /// Fairness, stability and closure; with `k_bound`, additionally
    /// requires the worst-case first hit to be at most `k_bound`.
    pub fn self_stabilization(&self, k_bound: Option<u64>) -> PropertyReport {
        let property = if self.scheduler.is_some() {
            Property::ScheduledSelfStabilization
        } else {
            Property::SelfStabilization
        };
        let started = Instant::now();
        let mut report = self.report(property, started);
        report.expected_bound = k_bound;
        for part in [self.fairness(), self.stability(), self.closure()] {
            if part.verdict == Verdict::Fails {
                report.verdict = Verdict::Fails;
                report.witness = part.witness;
                report.caveat = Some(format!("{} fails", part.property.name()));
                if part.property == Property::Closure {
                    report.worst_case_first_hit = Some(self.worst_case_first_hit().value());
                }
                report.statistics.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
                return report;
            }
        }
        let hit = self.worst_case_first_hit();
        report.worst_case_first_hit = Some(hit.value());
        if let (FirstHit::Bounded { steps, witness }, Some(k)) = (&hit, k_bound) {
            report.bound_attained = Some(*steps == k);
            if *steps > k {
                report.verdict = Verdict::Fails;
                report.witness = Some(witness.clone());
                report.caveat = Some(format!("worst-case first hit {steps} exceeds bound {k}"));
            }
        }
        report.statistics.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        report
    }

    pub fn fip(&self) -> PropertyReport {
        let started = Instant::now();
        let g = self.subgraph(&|_| true, &|_| true);
        let order = match toposort(&g, None) {
            Ok(order) => order,
            Err(_) => {
                let lasso = self.find_cycle(&|_| true, &|_| true).expect("cyclic graph");
                return Self::fail(self.report(Property::Fip, started), lasso);
            }
        };
        let mut longest = vec![0u64; self.node_count()];
        for v in order.into_iter().rev().map(|n| n.index()) {
            longest[v] = self
                .edges_from(v)
                .iter()
                .map(|e| 1 + longest[e.target])
                .max()
                .unwrap_or(0);
        }
        let mut report = self.report(Property::Fip, started);
        report.longest_path = longest.into_iter().max();
        report
    }

    pub fn weak_self_stabilization(&self) -> PropertyReport {
        let started = Instant::now();
        let players = self.game.players();
        let legit = |v: usize| self.is_legitimate(v);
        let g = self.subgraph(&legit, &|_| true);
        let mut good = vec![false; self.node_count()];
        for component in tarjan_scc(&g) {
            let mut member = vec![false; self.node_count()];
            for n in &component {
                member[n.index()] = true;
            }
            let mut moved = vec![false; players + 1];
            for n in &component {
                for e in self.edges_from(n.index()) {
                    if member[e.target] {
                        moved[e.step.mover] = true;
                    }
                }
            }
            if moved[1..].iter().all(|&m| m) {
                for n in &component {
                    good[n.index()] = true;
                }
            }
        }
        // Backward reachability to good nodes.
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); self.node_count()];
        for v in 0..self.node_count() {
            for e in self.edges_from(v) {
                reverse[e.target].push(v);
            }
        }
        let mut reaches = good.clone();
        let mut queue: VecDeque<usize> = (0..self.node_count()).filter(|&v| good[v]).collect();
        while let Some(w) = queue.pop_front() {
            for &v in &reverse[w] {
                if !reaches[v] {
                    reaches[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let report = self.report(Property::WeakSelfStabilization, started);
        match (0..self.node_count()).find(|&v| !reaches[v]) {
            Some(v) => Self::fail(
                report,
                Path {
                    start: self.state(v),
                    steps: Vec::new(),
                    terminal: TerminalStatus::Prefix,
                },
            ),
            None => report,
        }
    }
}

/// Outcome of [`ImprovementGraph::worst_case_first_hit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FirstHit {
    /// Every path reaches a legitimate state within `steps`; `witness`
    /// attains it.
    Bounded { steps: u64, witness: Path },
    /// Some infinite path avoids legitimate states.
    Unbounded { lasso: Path },
    /// A Nash equilibrium ends a path before legitimacy.
    NashSink { path: Path },
}

impl FirstHit {
    pub fn value(&self) -> FirstHitValue {
        match self {
            Self::Bounded { steps, .. } => FirstHitValue::Bounded(*steps),
            Self::Unbounded { .. } => FirstHitValue::Unbounded,
            Self::NashSink { .. } => FirstHitValue::NashSink,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match self {
            Self::Bounded { steps, .. } => Some(*steps),
            _ => None,
        }
    }

    pub fn witness(&self) -> &Path {
        match self {
            Self::Bounded { witness, .. } => witness,
            Self::Unbounded { lasso } => lasso,
            Self::NashSink { path } => path,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstHitValue {
    Bounded(u64),
    Unbounded,
    NashSink,
}

impl std::fmt::Display for FirstHitValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Bounded(k) => write!(f, "{k}"),
            Self::Unbounded => f.write_str("unbounded"),
            Self::NashSink => f.write_str("nash-sink"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Stability,
    Closure,
    Fairness,
    SelfStabilization,
    ScheduledSelfStabilization,
    Fip,
    WeakSelfStabilization,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Self::Stability => "stability",
            Self::Closure => "closure",
            Self::Fairness => "fairness",
            Self::SelfStabilization => "self-stabilization",
            Self::ScheduledSelfStabilization => "scheduled self-stabilization",
            Self::Fip => "finite improvement property",
            Self::WeakSelfStabilization => "weak self-stabilization",
        }
    }

    fn procedure(self) -> &'static str {
        match self {
            Self::Stability => "every edge out of a legitimate node lands on a legitimate node",
            Self::Closure => {
                "no Nash node and no cycle in the subgraph induced on non-legitimate nodes"
            }
            Self::Fairness => "for every player, the edges moved by other players are acyclic",
            Self::SelfStabilization | Self::ScheduledSelfStabilization => {
                "fairness, stability and closure; bound = longest path from any node to its \
                 first legitimate node over the acyclic non-legitimate subgraph"
            }
            Self::Fip => "improvement graph acyclic; longest path by topological sweep",
            Self::WeakSelfStabilization => {
                "every node reaches a strongly connected component of the legitimate-induced \
                 subgraph whose internal edges are moved by every player"
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    pub nodes: usize,
    pub edges: usize,
    pub elapsed_ms: f64,
}

/// Verdict of one decider, with a replayable witness on failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub instance: GameFamily,
    pub scheduler: Option<String>,
    pub verdict: Verdict,
    pub witness: Option<Path>,
    pub worst_case_first_hit: Option<FirstHitValue>,
    pub expected_bound: Option<u64>,
    pub bound_attained: Option<bool>,
    pub longest_path: Option<u64>,
    pub nash_nodes: usize,
    pub legitimate_nodes: usize,
    pub caveat: Option<String>,
    pub procedure: String,
    pub statistics: Statistics,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// The witness of a failing report.
pub fn extract_witness(report: &PropertyReport) -> Result<Path> {
    match (&report.verdict, &report.witness) {
        (Verdict::Fails, Some(w)) => Ok(w.clone()),
        (Verdict::Holds, _) => Err(Error::Usage(format!(
            "{} holds; there is no counterexample to extract",
            report.property.name()
        ))),
        (Verdict::Fails, None) => Err(Error::Usage("failing report carries no witness".into())),
    }
}

fn full_graph(game: &Game) -> Result<ImprovementGraph> {
    build_improvement_graph(game, None, DEFAULT_NODE_BUDGET)
}

pub fn admits_stability(game: &Game) -> Result<PropertyReport> {
    Ok(full_graph(game)?.stability())
}

pub fn admits_closure(game: &Game) -> Result<PropertyReport> {
    Ok(full_graph(game)?.closure())
}

pub fn admits_fairness(game: &Game) -> Result<PropertyReport> {
    Ok(full_graph(game)?.fairness())
}

pub fn admits_self_stabilization(game: &Game, k_bound: Option<u64>) -> Result<PropertyReport> {
    Ok(full_graph(game)?.self_stabilization(k_bound))
}

pub fn scheduler_ensures_self_stabilization(
    game: &Game,
    scheduler: &dyn Scheduler,
    expected_bound: Option<u64>,
) -> Result<PropertyReport> {
    Ok(
        build_improvement_graph(game, Some(scheduler), DEFAULT_NODE_BUDGET)?
            .self_stabilization(expected_bound),
    )
}

pub fn fip_check(game: &Game) -> Result<PropertyReport> {
    Ok(full_graph(game)?.fip())
}

pub fn weak_self_stabilization(game: &Game) -> Result<PropertyReport> {
    Ok(full_graph(game)?.weak_self_stabilization())
}

/// `½ (3n + 1)(n - 2)`.
pub fn first_solution_bound(n: usize) -> u64 {
    ((3 * n as u64 + 1) * (n as u64).saturating_sub(2)) / 2
}

/// The expected scheduler-restricted worst case for the first-solution
/// game: the formula when `|C| >= n - 1`, unbounded when `|C| = n - 2`.
pub fn expected_first_hit(n: usize, colours: u16) -> Option<FirstHitValue> {
    let c = colours as usize;
    if c + 1 >= n {
        Some(FirstHitValue::Bounded(first_solution_bound(n)))
    } else if c + 2 == n {
        Some(FirstHitValue::Unbounded)
    } else {
        None
    }
}

/// One row of the bounds table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: usize,
    pub colours: u16,
    pub formula: u64,
    pub measured: FirstHitValue,
    pub expected: Option<FirstHitValue>,
}

impl BoundsRow {
    pub fn attained(&self) -> bool {
        self.measured == FirstHitValue::Bounded(self.formula)
    }

    pub fn matches(&self) -> Option<bool> {
        self.expected.map(|e| e == self.measured)
    }
}

/// Measures the dijkstra-scheduled worst-case first hit of the
/// first-solution game with `n` players and `colours` colours.
pub fn measure_bound(n: usize, colours: u16, node_budget: u64) -> Result<BoundsRow> {
    let game = crate::game::build_first_solution_game(n, colours)?;
    let scheduler = crate::dynamics::dijkstra_first_scheduler(colours)?;
    let graph = build_improvement_graph(&game, Some(&scheduler), node_budget)?;
    Ok(BoundsRow {
        n,
        colours,
        formula: first_solution_bound(n),
        measured: graph.worst_case_first_hit().value(),
        expected: expected_first_hit(n, colours),
    })
}
