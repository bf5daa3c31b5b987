//! Machine-level simulation of the three ring protocols and the map from
//! machine executions to improvement paths.
//!
//! Machine `i` reads its own value `S`, its left neighbour `L` (machine
//! `i - 1`, machine `n` for machine 1) and its right neighbour `R` (machine
//! `i + 1`, machine 1 for machine `n`). A single central daemon fires one
//! privileged machine per step.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{scheduler_for, ImprovementStep, Path, SelectionPolicy, TerminalStatus};
use crate::error::{Error, Result};
use crate::game::{
    build_first_solution_game, build_four_state_game, build_three_state_game, Colour, Game,
    JointStrategy,
};

/// Guarded assignment `privilege -> action` of one machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MachineRule {
    /// `L = S -> S := S ⊕ 1`
    FirstBottom,
    /// `L ≠ S -> S := L`
    FirstOther,
    /// `S ⊕ 1 = R -> S := S ⊕ 2`
    Bottom,
    /// `L = S ⊕ 1 ∨ S ⊕ 1 = R -> S := S ⊕ 1`
    Normal,
    /// `L = R ∧ S ≠ R ⊕ 1 -> S := R ⊕ 1`
    ThreeStateTop,
    /// `L = S ⊕ 1 -> S := S ⊕ 2`
    FourStateTop,
}

impl MachineRule {
    pub fn privileged(self, s: u16, l: u16, r: u16, modulus: u16) -> bool {
        let plus = |v: u16, d: u16| ((v as u32 + d as u32) % modulus as u32) as u16;
        match self {
            Self::FirstBottom => l == s,
            Self::FirstOther => l != s,
            Self::Bottom => plus(s, 1) == r,
            Self::Normal => l == plus(s, 1) || plus(s, 1) == r,
            Self::ThreeStateTop => l == r && s != plus(r, 1),
            Self::FourStateTop => l == plus(s, 1),
        }
    }

    pub fn action(self, s: u16, l: u16, r: u16, modulus: u16) -> u16 {
        let plus = |v: u16, d: u16| ((v as u32 + d as u32) % modulus as u32) as u16;
        match self {
            Self::FirstBottom | Self::Normal => plus(s, 1),
            Self::FirstOther => l,
            Self::Bottom | Self::FourStateTop => plus(s, 2),
            Self::ThreeStateTop => plus(r, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Directed ring with `k` values per machine.
    FirstSolution {
        k: u16,
    },
    ThreeState,
    FourState,
    Custom,
}

/// Where a first-solution instance sits relative to the known bounds on `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColourRegime {
    /// `k >= n`
    AtLeastN,
    /// `k = n - 1`
    NMinusOne,
    /// `k = n - 2`
    NMinusTwo,
    /// `k < n - 2`
    Below,
}

impl ColourRegime {
    pub fn classify(n: usize, k: usize) -> Self {
        if k >= n {
            Self::AtLeastN
        } else if k + 1 == n {
            Self::NMinusOne
        } else if k + 2 == n {
            Self::NMinusTwo
        } else {
            Self::Below
        }
    }
}

/// Global machine state; entry `i - 1` belongs to machine `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SystemState(pub Vec<u16>);

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Serializable form of a [`RingSystem`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    #[serde(flatten)]
    pub kind: ProtocolKind,
    pub modulus: u16,
    pub ranges: Vec<Vec<u16>>,
    pub rules: Vec<MachineRule>,
}

impl RingSpec {
    pub fn build(&self) -> Result<RingSystem> {
        let n = self.ranges.len();
        match self.kind {
            ProtocolKind::FirstSolution { k } => RingSystem::first_solution(n, k),
            ProtocolKind::ThreeState => RingSystem::three_state(n),
            ProtocolKind::FourState => RingSystem::four_state(n),
            ProtocolKind::Custom => {
                RingSystem::custom(self.modulus, self.ranges.clone(), self.rules.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSystem {
    kind: ProtocolKind,
    modulus: u16,
    ranges: Vec<Vec<u16>>,
    rules: Vec<MachineRule>,
}

impl RingSystem {
    /// Dijkstra's `k`-state solution. Any `k >= 2` is accepted; see
    /// [`RingSystem::regime`] for where the instance falls.
    pub fn first_solution(n: usize, k: u16) -> Result<Self> {
        if n < 2 || k < 2 {
            return Err(Error::Domain(format!(
                "first solution needs n >= 2 and k >= 2, got n = {n}, k = {k}"
            )));
        }
        let mut rules = vec![MachineRule::FirstOther; n];
        rules[0] = MachineRule::FirstBottom;
        Ok(Self {
            kind: ProtocolKind::FirstSolution { k },
            modulus: k,
            ranges: vec![(0..k).collect(); n],
            rules,
        })
    }

    pub fn three_state(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!(
                "three-state ring needs n >= 3, got {n}"
            )));
        }
        let mut rules = vec![MachineRule::Normal; n];
        rules[0] = MachineRule::Bottom;
        rules[n - 1] = MachineRule::ThreeStateTop;
        Ok(Self {
            kind: ProtocolKind::ThreeState,
            modulus: 3,
            ranges: vec![vec![0, 1, 2]; n],
            rules,
        })
    }

    pub fn four_state(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!(
                "four-state ring needs n >= 3, got {n}"
            )));
        }
        let mut rules = vec![MachineRule::Normal; n];
        rules[0] = MachineRule::Bottom;
        rules[n - 1] = MachineRule::FourStateTop;
        let mut ranges = vec![vec![0, 1, 2, 3]; n];
        ranges[0] = vec![1, 3];
        ranges[n - 1] = vec![0, 2];
        Ok(Self {
            kind: ProtocolKind::FourState,
            modulus: 4,
            ranges,
            rules,
        })
    }

    pub fn custom(modulus: u16, ranges: Vec<Vec<u16>>, rules: Vec<MachineRule>) -> Result<Self> {
        if ranges.len() < 2 || ranges.len() != rules.len() || modulus < 2 {
            return Err(Error::Domain(
                "custom ring needs >= 2 machines with one rule each".into(),
            ));
        }
        if ranges
            .iter()
            .any(|r| r.is_empty() || r.iter().any(|&v| v >= modulus))
        {
            return Err(Error::Domain(
                "custom ring value ranges must be non-empty and below the modulus".into(),
            ));
        }
        Ok(Self {
            kind: ProtocolKind::Custom,
            modulus,
            ranges,
            rules,
        })
    }

    /// A self-contained description that rebuilds this system.
    pub fn spec(&self) -> RingSpec {
        RingSpec {
            kind: self.kind,
            modulus: self.modulus,
            ranges: self.ranges.clone(),
            rules: self.rules.clone(),
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn machines(&self) -> usize {
        self.rules.len()
    }

    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    pub fn range(&self, machine: usize) -> &[u16] {
        &self.ranges[machine - 1]
    }

    pub fn rule(&self, machine: usize) -> MachineRule {
        self.rules[machine - 1]
    }

    /// Colour regime of a first-solution instance.
    pub fn regime(&self) -> Option<ColourRegime> {
        match self.kind {
            ProtocolKind::FirstSolution { k } => {
                Some(ColourRegime::classify(self.machines(), k as usize))
            }
            _ => None,
        }
    }

    pub fn validate(&self, state: &SystemState) -> Result<()> {
        if state.0.len() != self.machines() {
            return Err(Error::InvalidStrategy(format!(
                "expected {} machine values, got {}",
                self.machines(),
                state.0.len()
            )));
        }
        for (i, v) in state.0.iter().enumerate() {
            if !self.ranges[i].contains(v) {
                return Err(Error::InvalidStrategy(format!(
                    "value {v} outside the range of machine {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn neighbourhood(&self, values: &[u16], machine: usize) -> (u16, u16, u16) {
        let n = values.len();
        let s = values[machine - 1];
        let l = values[(machine + n - 2) % n];
        let r = values[machine % n];
        (s, l, r)
    }

    fn privileged_raw(&self, values: &[u16]) -> Vec<usize> {
        (1..=self.machines())
            .filter(|&m| {
                let (s, l, r) = self.neighbourhood(values, m);
                self.rules[m - 1].privileged(s, l, r, self.modulus)
            })
            .collect()
    }

    /// Machines whose privilege holds, ascending.
    pub fn privileged_machines(&self, state: &SystemState) -> Result<Vec<usize>> {
        self.validate(state)?;
        Ok(self.privileged_raw(&state.0))
    }

    /// Fires `machine`, which must be privileged.
    pub fn fire(&self, state: &SystemState, machine: usize) -> Result<SystemState> {
        self.validate(state)?;
        if machine == 0 || machine > self.machines() {
            return Err(Error::PlayerOutOfRange {
                player: machine,
                players: self.machines(),
            });
        }
        let (s, l, r) = self.neighbourhood(&state.0, machine);
        let rule = self.rules[machine - 1];
        if !rule.privileged(s, l, r, self.modulus) {
            return Err(Error::ContractViolation(format!(
                "machine {machine} is not privileged at {state}"
            )));
        }
        let value = rule.action(s, l, r, self.modulus);
        if !self.ranges[machine - 1].contains(&value) {
            return Err(Error::ContractViolation(format!(
                "machine {machine} assigns {value}, outside its range"
            )));
        }
        let mut next = state.clone();
        next.0[machine - 1] = value;
        Ok(next)
    }

    /// Exactly one machine is privileged.
    pub fn is_legitimate_system(&self, state: &SystemState) -> Result<bool> {
        Ok(self.privileged_machines(state)?.len() == 1)
    }

    /// Every global state in mixed-radix order (machine 1 most significant).
    pub fn states(&self) -> Vec<SystemState> {
        let mut out = vec![Vec::new()];
        for range in &self.ranges {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    range.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(SystemState).collect()
    }

    /// Runs the system under `daemon` until no machine is privileged, a
    /// (state, daemon memory) pair recurs, a fixed schedule runs out, or
    /// `step_budget` moves have been made.
    pub fn run_system(
        &self,
        start: &SystemState,
        daemon: &SelectionPolicy,
        step_budget: usize,
    ) -> Result<MachineTrace> {
        self.validate(start)?;
        let mut selector = daemon.selector(self.machines());
        let mut current = start.clone();
        let mut moves = Vec::new();
        let mut seen: HashMap<(Vec<u16>, u64), usize> = HashMap::new();
        let terminal = loop {
            let privileged = self.privileged_raw(&current.0);
            if privileged.is_empty() {
                break RunStatus::Deadlock;
            }
            let key = (current.0.clone(), selector.memory());
            if let Some(&cycle_start) = seen.get(&key) {
                break RunStatus::CycleDetected {
                    cycle_start,
                    first_repeat_index: moves.len(),
                };
            }
            seen.insert(key, moves.len());
            if moves.len() >= step_budget {
                break RunStatus::Truncated { step_budget };
            }
            let Some(machine) = selector.pick(&privileged)? else {
                break RunStatus::ScheduleExhausted;
            };
            let next = self.fire(&current, machine)?;
            moves.push(MachineMove {
                machine,
                from: current.0[machine - 1],
                to: next.0[machine - 1],
            });
            current = next;
        };
        Ok(MachineTrace {
            start: start.clone(),
            moves,
            terminal,
        })
    }

    /// Every trace from `start` over all daemon choices, each ending at the
    /// first repeated state along it or at a deadlock. Fails once more than
    /// `max_traces` traces exist.
    pub fn enumerate_runs(
        &self,
        start: &SystemState,
        max_traces: usize,
    ) -> Result<Vec<MachineTrace>> {
        self.validate(start)?;
        let mut out = Vec::new();
        let mut moves = Vec::new();
        let mut visited = vec![start.0.clone()];
        self.enumerate_from(start, &mut moves, &mut visited, &mut out, max_traces)?;
        Ok(out)
    }

    fn enumerate_from(
        &self,
        start: &SystemState,
        moves: &mut Vec<MachineMove>,
        visited: &mut Vec<Vec<u16>>,
        out: &mut Vec<MachineTrace>,
        max_traces: usize,
    ) -> Result<()> {
        let current = visited.last().unwrap().clone();
        let privileged = self.privileged_raw(&current);
        if privileged.is_empty() {
            return self.push_trace(start, moves, RunStatus::Deadlock, out, max_traces);
        }
        for machine in privileged {
            let next = self.fire(&SystemState(current.clone()), machine)?;
            moves.push(MachineMove {
                machine,
                from: current[machine - 1],
                to: next.0[machine - 1],
            });
            if let Some(cycle_start) = visited.iter().position(|v| *v == next.0) {
                let status = RunStatus::CycleDetected {
                    cycle_start,
                    first_repeat_index: moves.len(),
                };
                self.push_trace(start, moves, status, out, max_traces)?;
            } else {
                visited.push(next.0);
                self.enumerate_from(start, moves, visited, out, max_traces)?;
                visited.pop();
            }
            moves.pop();
        }
        Ok(())
    }

    fn push_trace(
        &self,
        start: &SystemState,
        moves: &[MachineMove],
        terminal: RunStatus,
        out: &mut Vec<MachineTrace>,
        max_traces: usize,
    ) -> Result<()> {
        if out.len() >= max_traces {
            return Err(Error::BudgetExceeded {
                required: out.len() as u128 + 1,
                budget: max_traces as u64,
            });
        }
        out.push(MachineTrace {
            start: start.clone(),
            moves: moves.to_vec(),
            terminal,
        });
        Ok(())
    }

    /// The strategic game modelling this system; states map to joint
    /// strategies by identity.
    pub fn game_of_system(&self) -> Result<(Game, StateMap)> {
        let n = self.machines();
        let game = match self.kind {
            ProtocolKind::FirstSolution { k } => build_first_solution_game(n, k)?,
            ProtocolKind::ThreeState => build_three_state_game(n)?,
            ProtocolKind::FourState => build_four_state_game(n)?,
            ProtocolKind::Custom => {
                return Err(Error::Domain(
                    "custom ring systems have no associated game".into(),
                ))
            }
        };
        Ok((game, StateMap { machines: n }))
    }

    /// Maps a machine trace to an improvement path of the matching game.
    ///
    /// First solution: one step per machine move, each equal to the dijkstra
    /// scheduler's choice. Three- and four-state rings: each move is the
    /// matching scheduler's choice, and two consecutive moves of the same
    /// machine that together raise its payoff by 2 become one step. Pairs
    /// straddling the start of a lasso cycle are left as two steps so the
    /// game path closes where the machine trace does.
    pub fn correspondence_check(&self, trace: &MachineTrace) -> Result<Correspondence> {
        let (game, map) = self.game_of_system()?;
        let scheduler = scheduler_for(game.family()).expect("built-in family has a scheduler");
        let machine_states = trace.replay(self)?;
        let compress = !matches!(self.kind, ProtocolKind::FirstSolution { .. });
        let cycle_start = match trace.terminal {
            RunStatus::CycleDetected { cycle_start, .. } => Some(cycle_start),
            _ => None,
        };

        let mut steps = Vec::new();
        let mut compressed = Vec::new();
        let mut step_of_move = Vec::with_capacity(trace.moves.len());
        let mut j = 0;
        while j < trace.moves.len() {
            let mv = trace.moves[j];
            let s = map.to_joint(&machine_states[j]);
            let violation = |reason: String| Error::Correspondence { index: j, reason };
            let chosen = scheduler
                .choose(&game, &s, mv.machine)
                .map_err(|e| violation(e.to_string()))?;
            if chosen.0 != mv.to {
                return Err(violation(format!(
                    "machine {} moved to {}, scheduler picks {}",
                    mv.machine, mv.to, chosen.0
                )));
            }
            let pair = compress
                && j + 1 < trace.moves.len()
                && trace.moves[j + 1].machine == mv.machine
                && cycle_start != Some(j + 1);
            if pair {
                let mid = map.to_joint(&machine_states[j + 1]);
                let second = scheduler
                    .choose(&game, &mid, mv.machine)
                    .map_err(|e| violation(e.to_string()))?;
                let end = map.to_joint(&machine_states[j + 2]);
                let gain = game.payoff_of(end.colours(), mv.machine, end.get(mv.machine)) as i64
                    - game.payoff_of(s.colours(), mv.machine, s.get(mv.machine)) as i64;
                if second.0 == trace.moves[j + 1].to && gain == 2 {
                    compressed.push(steps.len());
                    step_of_move.push(steps.len());
                    step_of_move.push(steps.len());
                    steps.push(ImprovementStep {
                        mover: mv.machine,
                        from: Colour(mv.from),
                        to: Colour(trace.moves[j + 1].to),
                    });
                    j += 2;
                    continue;
                }
            }
            step_of_move.push(steps.len());
            steps.push(ImprovementStep {
                mover: mv.machine,
                from: Colour(mv.from),
                to: Colour(mv.to),
            });
            j += 1;
        }

        let terminal = match trace.terminal {
            RunStatus::Deadlock => TerminalStatus::ReachedNash,
            RunStatus::CycleDetected { cycle_start, .. } => TerminalStatus::CycleDetected {
                cycle_start: step_of_move
                    .get(cycle_start)
                    .copied()
                    .unwrap_or(steps.len()),
                first_repeat_index: steps.len(),
            },
            RunStatus::Truncated { step_budget } => TerminalStatus::Truncated { step_budget },
            RunStatus::ScheduleExhausted => TerminalStatus::ScheduleExhausted,
        };
        let path = Path {
            start: map.to_joint(&trace.start),
            steps,
            terminal,
        };
        crate::dynamics::replay(&game, &path, None).map_err(|e| Error::Correspondence {
            index: trace.moves.len(),
            reason: format!("mapped path is not an improvement path: {e}"),
        })?;
        Ok(Correspondence {
            path,
            compressed,
            step_of_move,
        })
    }
}

/// Identity map between machine states and joint strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateMap {
    machines: usize,
}

impl StateMap {
    pub fn to_joint(&self, state: &SystemState) -> JointStrategy {
        debug_assert_eq!(state.0.len(), self.machines);
        JointStrategy::from_raw(&state.0)
    }

    pub fn to_system(&self, s: &JointStrategy) -> SystemState {
        SystemState(s.raw())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineMove {
    pub machine: usize,
    pub from: u16,
    pub to: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    /// No machine is privileged.
    Deadlock,
    CycleDetected {
        cycle_start: usize,
        first_repeat_index: usize,
    },
    Truncated {
        step_budget: usize,
    },
    ScheduleExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineTrace {
    pub start: SystemState,
    pub moves: Vec<MachineMove>,
    pub terminal: RunStatus,
}

impl MachineTrace {
    /// Re-fires every move, checking privileges and recorded values.
    pub fn replay(&self, system: &RingSystem) -> Result<Vec<SystemState>> {
        system.validate(&self.start)?;
        let mut states = vec![self.start.clone()];
        for (index, mv) in self.moves.iter().enumerate() {
            let current = states.last().unwrap();
            let next = system
                .fire(current, mv.machine)
                .map_err(|e| Error::Replay {
                    index,
                    reason: e.to_string(),
                })?;
            if current.0[mv.machine - 1] != mv.from || next.0[mv.machine - 1] != mv.to {
                return Err(Error::Replay {
                    index,
                    reason: format!(
                        "machine {} recorded {} -> {}, firing gives {} -> {}",
                        mv.machine,
                        mv.from,
                        mv.to,
                        current.0[mv.machine - 1],
                        next.0[mv.machine - 1]
                    ),
                });
            }
            states.push(next);
        }
        let end = self.moves.len();
        let last = states.last().unwrap();
        match self.terminal {
            RunStatus::Deadlock if !system.privileged_raw(&last.0).is_empty() => {
                return Err(Error::Replay {
                    index: end,
                    reason: format!("trace claims deadlock but {last} has privileges"),
                });
            }
            RunStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            } if first_repeat_index != end
                || cycle_start >= end
                || states[cycle_start] != states[end] =>
            {
                return Err(Error::Replay {
                    index: end,
                    reason: "cycle does not close".into(),
                });
            }
            _ => {}
        }
        Ok(states)
    }

    pub fn first_legitimate(&self, system: &RingSystem) -> Result<Option<usize>> {
        for (i, s) in self.replay(system)?.iter().enumerate() {
            if system.is_legitimate_system(s)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Result of [`RingSystem::correspondence_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub path: Path,
    /// Indices into `path.steps` of steps standing for two machine moves.
    pub compressed: Vec<usize>,
    /// For each machine move, the game step it belongs to.
    pub step_of_move: Vec<usize>,
}

/// Whether every daemon choice from `start` ends in a cycle made only of
/// legitimate states.
pub fn stabilizes_from(
    system: &RingSystem,
    start: &SystemState,
    max_traces: usize,
) -> Result<bool> {
    let traces = system.enumerate_runs(start, max_traces)?;
    for trace in traces {
        let states = trace.replay(system)?;
        let RunStatus::CycleDetected { cycle_start, .. } = trace.terminal else {
            return Ok(false);
        };
        let mut on_cycle: HashSet<&SystemState> = HashSet::new();
        for s in &states[cycle_start..] {
            on_cycle.insert(s);
        }
        for s in on_cycle {
            if !system.is_legitimate_system(s)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
