//! Trace JSON, DOT graphs and CSV tables.
//!
//! A [`TraceRecord`] carries the full instance description, so it replays
//! without the configuration that produced it. Colours are plain integers
//! in JSON (`a` = 0).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, scheduler_for, ImprovementStep, Path, Scheduler, TerminalStatus};
use crate::error::{Error, Result};
use crate::game::{Colour, Game, GameSpec, JointStrategy};
use crate::protocols::{
    MachineMove, MachineRule, MachineTrace, RingSpec, RingSystem, RunStatus, SystemState,
};
use crate::verify::{BoundsRow, ImprovementGraph};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceInstance {
    Game { game: GameSpec },
    Machine { system: RingSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    /// Moving player or firing machine.
    pub mover: usize,
    pub from: u16,
    pub to: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_before: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_after: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<MachineRule>,
}

/// Union of [`TerminalStatus`] and [`RunStatus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TraceTerminal {
    ReachedNash,
    Deadlock,
    CycleDetected {
        cycle_start: usize,
        first_repeat_index: usize,
    },
    Truncated {
        step_budget: usize,
    },
    ScheduleExhausted,
    Prefix,
}

impl From<TerminalStatus> for TraceTerminal {
    fn from(t: TerminalStatus) -> Self {
        match t {
            TerminalStatus::ReachedNash => Self::ReachedNash,
            TerminalStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            } => Self::CycleDetected {
                cycle_start,
                first_repeat_index,
            },
            TerminalStatus::Truncated { step_budget } => Self::Truncated { step_budget },
            TerminalStatus::ScheduleExhausted => Self::ScheduleExhausted,
            TerminalStatus::Prefix => Self::Prefix,
        }
    }
}

impl From<RunStatus> for TraceTerminal {
    fn from(t: RunStatus) -> Self {
        match t {
            RunStatus::Deadlock => Self::Deadlock,
            RunStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            } => Self::CycleDetected {
                cycle_start,
                first_repeat_index,
            },
            RunStatus::Truncated { step_budget } => Self::Truncated { step_budget },
            RunStatus::ScheduleExhausted => Self::ScheduleExhausted,
        }
    }
}

impl TraceTerminal {
    fn game_status(self) -> Result<TerminalStatus> {
        Ok(match self {
            Self::ReachedNash => TerminalStatus::ReachedNash,
            Self::CycleDetected {
                cycle_start,
                first_repeat_index,
            } => TerminalStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            },
            Self::Truncated { step_budget } => TerminalStatus::Truncated { step_budget },
            Self::ScheduleExhausted => TerminalStatus::ScheduleExhausted,
            Self::Prefix => TerminalStatus::Prefix,
            Self::Deadlock => {
                return Err(Error::Config("game trace cannot end in deadlock".into()))
            }
        })
    }

    fn machine_status(self) -> Result<RunStatus> {
        Ok(match self {
            Self::Deadlock => RunStatus::Deadlock,
            Self::CycleDetected {
                cycle_start,
                first_repeat_index,
            } => RunStatus::CycleDetected {
                cycle_start,
                first_repeat_index,
            },
            Self::Truncated { step_budget } => RunStatus::Truncated { step_budget },
            Self::ScheduleExhausted => RunStatus::ScheduleExhausted,
            Self::ReachedNash | Self::Prefix => {
                return Err(Error::Config(format!(
                    "machine trace cannot end in {self:?}"
                )))
            }
        })
    }
}

/// Self-contained, versioned trace of a game path or machine run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub schema_version: u32,
    #[serde(flatten)]
    pub instance: TraceInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheduler: Option<String>,
    pub start: Vec<u16>,
    pub steps: Vec<StepRecord>,
    /// One flag per visited state, the start included.
    pub legitimate: Vec<bool>,
    pub first_legitimate: Option<usize>,
    pub terminal: TraceTerminal,
}

impl TraceRecord {
    pub fn from_path(game: &Game, path: &Path, scheduler: Option<&dyn Scheduler>) -> Result<Self> {
        let states = dynamics::replay(game, path, scheduler)?;
        let mut steps = Vec::with_capacity(path.len());
        for (index, step) in path.steps.iter().enumerate() {
            steps.push(StepRecord {
                index,
                mover: step.mover,
                from: step.from.0,
                to: step.to.0,
                payoff_before: Some(game.payoff(&states[index], step.mover)?),
                payoff_after: Some(game.payoff(&states[index + 1], step.mover)?),
                rule: None,
            });
        }
        let legitimate = states
            .iter()
            .map(|s| game.is_legitimate(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            instance: TraceInstance::Game { game: game.spec() },
            scheduler: scheduler.map(|f| f.name()),
            start: path.start.raw(),
            steps,
            first_legitimate: legitimate.iter().position(|&l| l),
            legitimate,
            terminal: path.terminal.into(),
        })
    }

    pub fn from_machine_trace(system: &RingSystem, trace: &MachineTrace) -> Result<Self> {
        let states = trace.replay(system)?;
        let steps = trace
            .moves
            .iter()
            .enumerate()
            .map(|(index, mv)| StepRecord {
                index,
                mover: mv.machine,
                from: mv.from,
                to: mv.to,
                payoff_before: None,
                payoff_after: None,
                rule: Some(system.rule(mv.machine)),
            })
            .collect();
        let legitimate = states
            .iter()
            .map(|s| system.is_legitimate_system(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            instance: TraceInstance::Machine {
                system: system.spec(),
            },
            scheduler: None,
            start: trace.start.0.clone(),
            steps,
            first_legitimate: legitimate.iter().position(|&l| l),
            legitimate,
            terminal: trace.terminal.into(),
        })
    }

    pub fn to_path(&self) -> Result<Path> {
        Ok(Path {
            start: JointStrategy::from_raw(&self.start),
            steps: self
                .steps
                .iter()
                .map(|s| ImprovementStep {
                    mover: s.mover,
                    from: Colour(s.from),
                    to: Colour(s.to),
                })
                .collect(),
            terminal: self.terminal.game_status()?,
        })
    }

    pub fn to_machine_trace(&self) -> Result<MachineTrace> {
        Ok(MachineTrace {
            start: SystemState(self.start.clone()),
            moves: self
                .steps
                .iter()
                .map(|s| MachineMove {
                    machine: s.mover,
                    from: s.from,
                    to: s.to,
                })
                .collect(),
            terminal: self.terminal.machine_status()?,
        })
    }

    /// Rebuilds the instance, re-executes every step and checks every
    /// recorded annotation. Returns the visited states.
    pub fn replay(&self) -> Result<Vec<Vec<u16>>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported trace schema version {}",
                self.schema_version
            )));
        }
        let rebuilt = match &self.instance {
            TraceInstance::Game { game: spec } => {
                let game = spec.build()?;
                let scheduler = match &self.scheduler {
                    None => None,
                    Some(name) => match scheduler_for(game.family()) {
                        Some(f) if f.name() == *name => Some(f),
                        _ => {
                            return Err(Error::Config(format!(
                                "scheduler {name} is not available for this game"
                            )))
                        }
                    },
                };
                Self::from_path(&game, &self.to_path()?, scheduler.as_deref())?
            }
            TraceInstance::Machine { system: spec } => {
                let system = spec.build()?;
                Self::from_machine_trace(&system, &self.to_machine_trace()?)?
            }
        };
        for (recorded, actual) in self.steps.iter().zip(&rebuilt.steps) {
            if recorded != actual {
                return Err(Error::Replay {
                    index: recorded.index,
                    reason: format!("recorded {recorded:?}, replay gives {actual:?}"),
                });
            }
        }
        if self.legitimate != rebuilt.legitimate
            || self.first_legitimate != rebuilt.first_legitimate
        {
            return Err(Error::Replay {
                index: self.steps.len(),
                reason: "legitimacy flags differ from replay".into(),
            });
        }
        let mut states = vec![self.start.clone()];
        for step in &self.steps {
            let mut next = states.last().unwrap().clone();
            next[step.mover - 1] = step.to;
            states.push(next);
        }
        Ok(states)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &FsPath, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => FsPath::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// DOT rendering with nodes in mixed-radix order. Legitimate nodes are
/// green, Nash equilibria grey; edges are labelled with their mover.
pub fn improvement_graph_dot(graph: &ImprovementGraph) -> String {
    let game = graph.game();
    let mut out = String::new();
    let title = match graph.scheduler() {
        Some(name) => format!("{} under {name}", game.family()),
        None => game.family().to_string(),
    };
    writeln!(out, "digraph improvement {{").unwrap();
    writeln!(out, "  label={};", quote(&title)).unwrap();
    writeln!(out, "  node [shape=box, style=filled, fillcolor=white];").unwrap();
    for v in 0..graph.node_count() {
        let fill = if graph.is_legitimate(v) {
            ", fillcolor=palegreen"
        } else if graph.is_nash(v) {
            ", fillcolor=lightgrey"
        } else {
            ""
        };
        writeln!(
            out,
            "  n{v} [label={}{fill}];",
            quote(&graph.state(v).to_string())
        )
        .unwrap();
    }
    for v in 0..graph.node_count() {
        for e in graph.edges_from(v) {
            writeln!(out, "  n{v} -> n{} [label=\"{}\"];", e.target, e.step.mover).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// CSV with columns `n, colours, formula, measured, attained, matches`.
pub fn bounds_csv(rows: &[BoundsRow]) -> Result<String> {
    #[derive(Serialize)]
    struct Line {
        n: usize,
        colours: u16,
        formula: u64,
        measured: String,
        attained: bool,
        matches: String,
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(Line {
                n: row.n,
                colours: row.colours,
                formula: row.formula,
                measured: row.measured.to_string(),
                attained: row.attained(),
                matches: match row.matches() {
                    Some(m) => m.to_string(),
                    None => "n/a".into(),
                },
            })
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{generate_path, SelectionPolicy};
    use crate::game::{build_alternative_first_game, build_first_solution_game};
    use crate::verify::build_improvement_graph;

    #[test]
    fn game_trace_round_trip() {
        let g = build_alternative_first_game(3, 3).unwrap();
        let p = generate_path(
            &g,
            &JointStrategy::from_raw(&[2, 0, 0]),
            None,
            &SelectionPolicy::cycle_demo(),
            100,
        )
        .unwrap();
        let record = TraceRecord::from_path(&g, &p, None).unwrap();
        let back = TraceRecord::from_json(&record.to_json().unwrap()).unwrap();
        assert_eq!(back, record);
        assert_eq!(back.replay().unwrap().len(), 10);
        assert_eq!(back.first_legitimate, None);
    }

    #[test]
    fn machine_trace_is_tagged() {
        let system = RingSystem::three_state(3).unwrap();
        let trace = system
            .run_system(
                &SystemState(vec![2, 1, 0]),
                &SelectionPolicy::Fixed {
                    movers: vec![2, 2],
                    cyclic: false,
                },
                10,
            )
            .unwrap();
        let record = TraceRecord::from_machine_trace(&system, &trace).unwrap();
        let json = record.to_json().unwrap();
        assert!(json.contains("\"kind\": \"machine\""));
        assert_eq!(
            TraceRecord::from_json(&json).unwrap().replay().unwrap(),
            vec![vec![2, 1, 0], vec![2, 2, 0], vec![2, 0, 0]]
        );
    }

    #[test]
    fn tampered_payoff_is_rejected() {
        let g = build_first_solution_game(3, 2).unwrap();
        let p = generate_path(
            &g,
            &JointStrategy::from_raw(&[0, 1, 0]),
            None,
            &SelectionPolicy::Adversarial,
            100,
        )
        .unwrap();
        let mut record = TraceRecord::from_path(&g, &p, None).unwrap();
        record.steps[0].payoff_after = Some(7);
        assert!(matches!(
            record.replay(),
            Err(Error::Replay { index: 0, .. })
        ));
    }

    #[test]
    fn dot_is_deterministic() {
        let g = build_first_solution_game(3, 2).unwrap();
        let graph = build_improvement_graph(&g, None, 100).unwrap();
        let a = improvement_graph_dot(&graph);
        assert_eq!(a, improvement_graph_dot(&graph));
        assert_eq!(a.matches("[label=\"").count() - graph.edge_count(), 8);
        assert!(a.contains("n0 [label=\"aaa\", fillcolor=palegreen];"));
        assert!(a.contains("n2 [label=\"aba\"];"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.txt");
        write_atomic(&target, b"one").unwrap();
        write_atomic(&target, b"two").unwrap();
        assert_eq!(fs::read_to_string(&target).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
