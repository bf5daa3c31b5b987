//! The `selfstab` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; for `verify` and `bounds`, results agree with the bundled expectations (or none apply) |
//! | 1 | I/O error |
//! | 2 | invalid flags, config file or input |
//! | 3 | a simulation hit its step budget |
//! | 4 | a verdict or bound disagrees with the bundled expectation table |
//! | 5 | the state space exceeds the node budget |
//! | 6 | a scheduler or fixed policy broke its contract |
//! | 7 | a trace failed to replay |
//!
//! Instance options may also come from a TOML file passed with `--config`;
//! flags win over file values.

use std::ffi::OsString;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::dynamics::{
    default_step_budget, generate_path, scheduler_for, tightness_schedule, Path, Scheduler,
    SelectionPolicy, TerminalStatus,
};
use crate::error::{Error, Result};
use crate::export::{bounds_csv, improvement_graph_dot, write_atomic, TraceRecord};
use crate::game::{
    build_alternative_first_game, build_chain_coordination_game, build_first_solution_game,
    build_four_state_game, build_three_state_game, Colour, Game, GameFamily, GameSpec,
    JointStrategy,
};
use crate::protocols::{RingSystem, RunStatus, SystemState};
use crate::verify::{
    build_improvement_graph, first_solution_bound, measure_bound, node_budget_from_env,
    FirstHitValue, PropertyReport, Verdict,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;
pub const EXIT_CONTRACT: i32 = 6;
pub const EXIT_REPLAY: i32 = 7;

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::ContractViolation(_) => EXIT_CONTRACT,
        Error::Replay { .. } | Error::Correspondence { .. } => EXIT_REPLAY,
        Error::Domain(_)
        | Error::PlayerOutOfRange { .. }
        | Error::InvalidStrategy(_)
        | Error::Usage(_)
        | Error::Json(_)
        | Error::Config(_) => EXIT_CONFIG,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "selfstab",
    version,
    about = "Self-stabilizing token rings as strategic games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one improvement path or machine trace (or one per start state).
    Simulate(SimulateArgs),
    /// Decide a property on the explicit improvement graph.
    Verify(VerifyArgs),
    /// Tabulate scheduled worst-case first hits of the first-solution game.
    Bounds(BoundsArgs),
    /// Write the improvement graph as DOT.
    ExportGraph(ExportArgs),
    /// Re-validate a trace file.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    First,
    ThreeState,
    FourState,
    Chain,
    AltFirst,
    /// A tabulated game given in full under `[custom]` in the config file.
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolSel {
    First,
    ThreeState,
    FourState,
}

#[derive(Args, Debug, Default)]
pub struct InstanceArgs {
    /// TOML file with instance options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "protocol")]
    pub game: Option<GameKind>,
    /// Machine-level ring instead of a game.
    #[arg(long)]
    pub protocol: Option<ProtocolSel>,
    #[arg(short = 'n', long = "players")]
    pub n: Option<usize>,
    #[arg(short = 'c', long)]
    pub colours: Option<u16>,
    /// Modulus of the alternative game or values per machine (alias of -c).
    #[arg(short = 'k')]
    pub k: Option<u16>,
    /// Maximum explored joint strategies; overrides SELFSTAB_NODE_BUDGET.
    #[arg(long)]
    pub node_budget: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// none, auto, dijkstra, three-state or four-state.
    #[arg(long)]
    pub scheduler: Option<String>,
    /// adversarial, round-robin, counterclockwise, rightmost, fixed:I,J,..,
    /// fixed-cyclic:I,J,.., seeded:SEED, cycle-demo or tightness.
    #[arg(long)]
    pub policy: Option<String>,
    /// Colours as letters or integers (a,b,a / 1,0,2 / aba), random:SEED or
    /// exhaustive.
    #[arg(long)]
    pub init: Option<String>,
    /// Step budget; defaults to four times the number of states.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Trace JSON destination (an array for exhaustive runs).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Stability,
    Closure,
    Fairness,
    Selfstab,
    ScheduledSelfstab,
    Fip,
    WeakSelfstab,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub property: PropertyArg,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Scheduler for scheduled-selfstab; defaults to the game's own.
    #[arg(long)]
    pub scheduler: Option<String>,
    /// Step bound to compare against: a number, or auto for the
    /// first-solution formula.
    #[arg(long)]
    pub bound: Option<String>,
    /// Report JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the counterexample of a failing report as a trace.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Ring sizes: 3..5, 3,4,5 or 4.
    #[arg(short = 'n', long = "players", default_value = "3..5")]
    pub n: String,
    /// Colour counts, absolute or relative to n: n-1,n or 2..5.
    #[arg(short = 'c', long, default_value = "n-1,n")]
    pub colours: String,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Restrict to a scheduler's choices.
    #[arg(long)]
    pub scheduler: Option<String>,
    /// DOT destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub trace: PathBuf,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: Option<GameKind>,
    pub protocol: Option<ProtocolSel>,
    pub n: Option<usize>,
    pub colours: Option<u16>,
    pub k: Option<u16>,
    pub node_budget: Option<u64>,
    pub scheduler: Option<String>,
    pub policy: Option<String>,
    pub init: Option<String>,
    pub budget: Option<usize>,
    pub custom: Option<GameSpec>,
}

impl RunConfig {
    pub fn load(path: &FsPath) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Instance options after merging flags over the config file.
#[derive(Debug)]
struct Resolved {
    file: RunConfig,
    game: Option<GameKind>,
    protocol: Option<ProtocolSel>,
    n: Option<usize>,
    colours: Option<u16>,
    node_budget: u64,
}

enum Instance {
    Game(Game),
    System(RingSystem),
}

impl InstanceArgs {
    fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let (game, protocol) = match (self.game, self.protocol) {
            (None, None) => (file.game, file.protocol),
            flags => flags,
        };
        if game.is_some() && protocol.is_some() {
            return Err(Error::Config(
                "give either a game or a protocol, not both".into(),
            ));
        }
        Ok(Resolved {
            game,
            protocol,
            n: self.n.or(file.n),
            colours: self.colours.or(self.k).or(file.colours).or(file.k),
            node_budget: self
                .node_budget
                .or(file.node_budget)
                .unwrap_or_else(node_budget_from_env),
            file,
        })
    }
}

impl Resolved {
    fn n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Config("missing ring size -n".into()))
    }

    fn colours(&self) -> Result<u16> {
        self.colours
            .ok_or_else(|| Error::Config("missing colour count -c / -k".into()))
    }

    fn fixed_colours(&self, name: &str, required: u16) -> Result<()> {
        match self.colours {
            Some(c) if c != required => Err(Error::Config(format!(
                "{name} uses exactly {required} colours, got {c}"
            ))),
            _ => Ok(()),
        }
    }

    fn instance(&self) -> Result<Instance> {
        if let Some(p) = self.protocol {
            let n = self.n()?;
            return Ok(Instance::System(match p {
                ProtocolSel::First => RingSystem::first_solution(n, self.colours()?)?,
                ProtocolSel::ThreeState => {
                    self.fixed_colours("three-state", 3)?;
                    RingSystem::three_state(n)?
                }
                ProtocolSel::FourState => {
                    self.fixed_colours("four-state", 4)?;
                    RingSystem::four_state(n)?
                }
            }));
        }
        let kind = self
            .game
            .ok_or_else(|| Error::Config("missing --game or --protocol".into()))?;
        Ok(Instance::Game(match kind {
            GameKind::First => build_first_solution_game(self.n()?, self.colours()?)?,
            GameKind::ThreeState => {
                self.fixed_colours("three-state", 3)?;
                build_three_state_game(self.n()?)?
            }
            GameKind::FourState => {
                self.fixed_colours("four-state", 4)?;
                build_four_state_game(self.n()?)?
            }
            GameKind::Chain => build_chain_coordination_game(self.n()?, self.colours()?)?,
            GameKind::AltFirst => build_alternative_first_game(self.n()?, self.colours()?)?,
            GameKind::Custom => self
                .file
                .custom
                .as_ref()
                .ok_or_else(|| Error::Config("custom game needs a [custom] table".into()))?
                .build()?,
        }))
    }

    fn game(&self) -> Result<Game> {
        match self.instance()? {
            Instance::Game(g) => Ok(g),
            Instance::System(s) => Ok(s.game_of_system()?.0),
        }
    }
}

fn resolve_scheduler(name: Option<&str>, game: &Game) -> Result<Option<Box<dyn Scheduler>>> {
    let Some(name) = name else { return Ok(None) };
    if name == "none" {
        return Ok(None);
    }
    let own = scheduler_for(game.family());
    match own {
        Some(f) if name == "auto" || f.name() == name => Ok(Some(f)),
        _ if name == "auto" => Err(Error::Config(format!(
            "no built-in scheduler for {}",
            game.family()
        ))),
        _ => Err(Error::Config(format!(
            "scheduler {name} does not apply to {}",
            game.family()
        ))),
    }
}

/// Parses a `--policy` value.
pub fn parse_policy(text: &str, n: usize) -> Result<SelectionPolicy> {
    let movers = |list: &str| -> Result<Vec<usize>> {
        list.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad mover {t:?} in policy")))
            })
            .collect()
    };
    Ok(match text {
        "adversarial" => SelectionPolicy::Adversarial,
        "round-robin" => SelectionPolicy::RoundRobin,
        "counterclockwise" => SelectionPolicy::Counterclockwise,
        "rightmost" | "rightmost-first" => SelectionPolicy::RightmostFirst,
        "cycle-demo" => SelectionPolicy::cycle_demo(),
        "tightness" => SelectionPolicy::Fixed {
            movers: tightness_schedule(n),
            cyclic: false,
        },
        _ => {
            if let Some(rest) = text.strip_prefix("fixed-cyclic:") {
                SelectionPolicy::Fixed {
                    movers: movers(rest)?,
                    cyclic: true,
                }
            } else if let Some(rest) = text.strip_prefix("fixed:") {
                SelectionPolicy::Fixed {
                    movers: movers(rest)?,
                    cyclic: false,
                }
            } else if let Some(rest) = text.strip_prefix("seeded:") {
                SelectionPolicy::Seeded {
                    seed: rest
                        .parse()
                        .map_err(|_| Error::Config(format!("bad seed {rest:?}")))?,
                }
            } else {
                return Err(Error::Config(format!("unknown policy {text:?}")));
            }
        }
    })
}

/// Parses an explicit start vector: `a,b,a`, `2,0,0`, `aba` or `200`.
pub fn parse_colours(text: &str) -> Result<Vec<u16>> {
    let tokens: Vec<String> = if text.contains(',') {
        text.split(',').map(|t| t.trim().to_string()).collect()
    } else {
        text.chars().map(String::from).collect()
    };
    tokens
        .iter()
        .map(|t| {
            let mut chars = t.chars();
            match (chars.next(), chars.next()) {
                (Some(ch), None) if ch.is_ascii_lowercase() => Ok((ch as u8 - b'a') as u16),
                _ => t
                    .parse()
                    .map_err(|_| Error::Config(format!("bad colour {t:?} in start vector"))),
            }
        })
        .collect()
}

enum Init {
    Explicit(Vec<u16>),
    Random(u64),
    Exhaustive,
}

fn parse_init(text: Option<&str>) -> Result<Init> {
    let Some(text) = text else {
        return Err(Error::Config("missing --init".into()));
    };
    if text == "exhaustive" {
        return Ok(Init::Exhaustive);
    }
    if let Some(seed) = text.strip_prefix("random:") {
        return Ok(Init::Random(
            seed.parse()
                .map_err(|_| Error::Config(format!("bad seed {seed:?}")))?,
        ));
    }
    Ok(Init::Explicit(parse_colours(text)?))
}

fn random_vector(rng: &mut ChaCha8Rng, sets: &[Vec<u16>]) -> Vec<u16> {
    sets.iter()
        .map(|set| set[rng.gen_range(0..set.len())])
        .collect()
}

fn game_state_line(path: &Path) -> String {
    path.states()
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

fn first_hit_text(hit: Option<usize>) -> String {
    hit.map_or_else(|| "NONE".into(), |k| k.to_string())
}

fn terminal_text<T: serde::Serialize>(t: &T) -> String {
    serde_json::to_value(t)
        .ok()
        .and_then(|v| v.get("status").and_then(|s| s.as_str()).map(String::from))
        .unwrap_or_default()
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(args: &SimulateArgs) -> Result<i32> {
    let resolved = args.instance.resolve()?;
    let file = &resolved.file;
    let instance = resolved.instance()?;
    let players = match &instance {
        Instance::Game(g) => g.players(),
        Instance::System(s) => s.machines(),
    };
    let policy_text = args.policy.as_deref().or(file.policy.as_deref());
    let policy = parse_policy(policy_text.unwrap_or("adversarial"), players)?;
    let init = parse_init(args.init.as_deref().or(file.init.as_deref()))?;
    let budget = args.budget.or(file.budget);

    let mut records = Vec::new();
    let mut truncated = false;
    match &instance {
        Instance::Game(game) => {
            let scheduler = resolve_scheduler(
                args.scheduler.as_deref().or(file.scheduler.as_deref()),
                game,
            )?;
            let budget = budget.unwrap_or_else(|| default_step_budget(game));
            let sets: Vec<Vec<u16>> = (1..=players)
                .map(|p| game.strategies(p).iter().map(|c| c.0).collect())
                .collect();
            let starts: Vec<JointStrategy> = match init {
                Init::Explicit(v) => vec![JointStrategy::from_raw(&v)],
                Init::Random(seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    vec![JointStrategy::from_raw(&random_vector(&mut rng, &sets))]
                }
                Init::Exhaustive => {
                    if game.state_count() > resolved.node_budget as u128 {
                        return Err(Error::BudgetExceeded {
                            required: game.state_count(),
                            budget: resolved.node_budget,
                        });
                    }
                    game.states().collect()
                }
            };
            let single = starts.len() == 1;
            let mut worst = Some(0);
            for start in &starts {
                let path = generate_path(game, start, scheduler.as_deref(), &policy, budget)?;
                let record = TraceRecord::from_path(game, &path, scheduler.as_deref())?;
                truncated |= matches!(path.terminal, TerminalStatus::Truncated { .. });
                worst = match (worst, record.first_legitimate) {
                    (Some(w), Some(k)) => Some(w.max(k)),
                    _ => None,
                };
                if single {
                    println!("{}", game_state_line(&path));
                    println!(
                        "first-hit: {}  terminal: {}  steps: {}",
                        first_hit_text(record.first_legitimate),
                        terminal_text(&path.terminal),
                        path.len()
                    );
                }
                records.push(record);
            }
            if !single {
                println!(
                    "runs: {}  worst first-hit: {}  truncated: {}",
                    records.len(),
                    first_hit_text(worst),
                    truncated
                );
            }
        }
        Instance::System(system) => {
            if args.scheduler.is_some() {
                return Err(Error::Config(
                    "machine runs follow the protocol; --scheduler applies to games".into(),
                ));
            }
            let states_total: u128 = (1..=players)
                .map(|m| system.range(m).len() as u128)
                .product();
            let budget = budget.unwrap_or_else(|| {
                usize::try_from(states_total.saturating_mul(4)).unwrap_or(usize::MAX)
            });
            let sets: Vec<Vec<u16>> = (1..=players).map(|m| system.range(m).to_vec()).collect();
            let starts: Vec<SystemState> = match init {
                Init::Explicit(v) => vec![SystemState(v)],
                Init::Random(seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    vec![SystemState(random_vector(&mut rng, &sets))]
                }
                Init::Exhaustive => {
                    if states_total > resolved.node_budget as u128 {
                        return Err(Error::BudgetExceeded {
                            required: states_total,
                            budget: resolved.node_budget,
                        });
                    }
                    system.states()
                }
            };
            let single = starts.len() == 1;
            let mut worst = Some(0);
            for start in &starts {
                let trace = system.run_system(start, &policy, budget)?;
                let record = TraceRecord::from_machine_trace(system, &trace)?;
                truncated |= matches!(trace.terminal, RunStatus::Truncated { .. });
                worst = match (worst, record.first_legitimate) {
                    (Some(w), Some(k)) => Some(w.max(k)),
                    _ => None,
                };
                if single {
                    let states = trace.replay(system)?;
                    println!(
                        "{}",
                        states.iter().map(|s| s.to_string()).collect::<String>()
                    );
                    println!(
                        "first-hit: {}  terminal: {}  steps: {}",
                        first_hit_text(record.first_legitimate),
                        terminal_text(&trace.terminal),
                        trace.moves.len()
                    );
                }
                records.push(record);
            }
            if !single {
                println!(
                    "runs: {}  worst first-hit: {}  truncated: {}",
                    records.len(),
                    first_hit_text(worst),
                    truncated
                );
            }
        }
    }
    if let Some(out) = &args.out {
        let json = if records.len() == 1 {
            serde_json::to_string_pretty(&records[0])?
        } else {
            serde_json::to_string_pretty(&records)?
        };
        write_atomic(out, json.as_bytes())?;
    }
    Ok(if truncated { EXIT_TRUNCATED } else { EXIT_OK })
}

/// What the bundled table expects of a (property, instance) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expected {
    pub verdict: Verdict,
    pub first_hit: Option<FirstHitValue>,
}

/// The bundled expected-verdict table. `None` means the table has no entry.
pub fn expected_verdict(property: PropertyArg, family: GameFamily) -> Option<Expected> {
    use FirstHitValue::{Bounded, Unbounded};
    use PropertyArg as P;
    use Verdict::{Fails, Holds};
    let e = |verdict, first_hit| Some(Expected { verdict, first_hit });
    match (property, family) {
        (P::Stability | P::Fairness, GameFamily::FirstSolution { .. }) => e(Holds, None),
        (P::Closure, GameFamily::FirstSolution { n, .. }) => {
            e(if n <= 3 { Holds } else { Fails }, None)
        }
        (P::Selfstab, GameFamily::FirstSolution { n, .. }) => match n {
            2 => e(Holds, Some(Bounded(0))),
            3 => e(Holds, None),
            _ => e(Fails, Some(Unbounded)),
        },
        (P::ScheduledSelfstab, GameFamily::FirstSolution { n, colours }) => {
            let c = colours as usize;
            if c + 1 >= n {
                e(Holds, Some(Bounded(first_solution_bound(n))))
            } else if c + 2 == n {
                e(Fails, Some(Unbounded))
            } else {
                None
            }
        }
        (P::Fip, GameFamily::FirstSolution { .. }) => e(Fails, None),
        (P::WeakSelfstab, GameFamily::FirstSolution { n, colours })
            if colours as usize + 1 >= n =>
        {
            e(Holds, None)
        }
        (P::Closure, GameFamily::AltFirst { n: 3, k: 3 }) => e(Fails, None),
        (P::Fip, GameFamily::Chain { .. }) => e(Holds, None),
        (P::ScheduledSelfstab, GameFamily::ThreeState { .. } | GameFamily::FourState { .. }) => {
            e(Holds, None)
        }
        _ => None,
    }
}

fn verify(args: &VerifyArgs) -> Result<i32> {
    let resolved = args.instance.resolve()?;
    let game = resolved.game()?;
    let scheduler_name = args
        .scheduler
        .as_deref()
        .or(resolved.file.scheduler.as_deref());
    let scheduler = match args.property {
        PropertyArg::ScheduledSelfstab => Some(
            resolve_scheduler(Some(scheduler_name.unwrap_or("auto")), &game)?
                .ok_or_else(|| Error::Config("scheduled-selfstab needs a scheduler".into()))?,
        ),
        _ if scheduler_name.is_some_and(|s| s != "none") => {
            return Err(Error::Config(
                "--scheduler only applies to scheduled-selfstab".into(),
            ))
        }
        _ => None,
    };
    let bound = match args.bound.as_deref() {
        None => None,
        Some("auto") => match game.family() {
            GameFamily::FirstSolution { n, .. } => Some(first_solution_bound(n)),
            _ => {
                return Err(Error::Config(
                    "--bound auto needs a first-solution game".into(),
                ))
            }
        },
        Some(k) => Some(
            k.parse()
                .map_err(|_| Error::Config(format!("bad bound {k:?}")))?,
        ),
    };
    let graph = build_improvement_graph(&game, scheduler.as_deref(), resolved.node_budget)?;
    let report: PropertyReport = match args.property {
        PropertyArg::Stability => graph.stability(),
        PropertyArg::Closure => graph.closure(),
        PropertyArg::Fairness => graph.fairness(),
        PropertyArg::Selfstab | PropertyArg::ScheduledSelfstab => graph.self_stabilization(bound),
        PropertyArg::Fip => graph.fip(),
        PropertyArg::WeakSelfstab => graph.weak_self_stabilization(),
    };

    let json = serde_json::to_string_pretty(&report)?;
    let mut summary = format!(
        "{}: {}",
        report.property.name(),
        match report.verdict {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        }
    );
    if let Some(hit) = report.worst_case_first_hit {
        summary.push_str(&format!("  worst-case first hit: {hit}"));
    }
    if let Some(k) = report.longest_path {
        summary.push_str(&format!("  longest path: {k}"));
    }
    if let Some(w) = &report.witness {
        summary.push_str(&format!("  witness: {} steps from {}", w.len(), w.start));
    }
    if let Some(c) = &report.caveat {
        summary.push_str(&format!("  ({c})"));
    }
    let expected = expected_verdict(args.property, game.family());
    let agrees = expected.is_none_or(|e| {
        e.verdict == report.verdict
            && e.first_hit
                .is_none_or(|k| report.worst_case_first_hit == Some(k))
    });
    summary.push_str(match (expected, agrees) {
        (None, _) => "  [no expectation on record]",
        (Some(_), true) => "  [as expected]",
        (Some(_), false) => "  [DIFFERS FROM EXPECTATION]",
    });

    if let Some(path) = &args.witness {
        let witness = crate::verify::extract_witness(&report)?;
        let record = TraceRecord::from_path(&game, &witness, scheduler.as_deref())?;
        write_atomic(path, record.to_json()?.as_bytes())?;
    }
    match &args.out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            println!("{summary}");
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(if agrees { EXIT_OK } else { EXIT_MISMATCH })
}

/// Parses a list such as `3..5`, `3,4,5` or `n-1,n`; `n` is substituted
/// when given.
pub fn parse_list(text: &str, n: Option<usize>) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("bad list {text:?}"));
    let term = |t: &str| -> Result<usize> {
        let t = t.trim();
        if let Some(rest) = t.strip_prefix('n') {
            let n = n.ok_or_else(bad)?;
            if rest.is_empty() {
                Ok(n)
            } else if let Some(d) = rest.strip_prefix('-') {
                n.checked_sub(d.parse().map_err(|_| bad())?).ok_or_else(bad)
            } else if let Some(d) = rest.strip_prefix('+') {
                Ok(n + d.parse::<usize>().map_err(|_| bad())?)
            } else {
                Err(bad())
            }
        } else {
            t.parse().map_err(|_| bad())
        }
    };
    let mut out = Vec::new();
    for item in text.split(',') {
        match item.split_once("..") {
            Some((a, b)) => out.extend(term(a)?..=term(b)?),
            None => out.push(term(item)?),
        }
    }
    Ok(out)
}

fn bounds(args: &BoundsArgs) -> Result<i32> {
    let budget = args.node_budget.unwrap_or_else(node_budget_from_env);
    let mut rows = Vec::new();
    for n in parse_list(&args.n, None)? {
        for c in parse_list(&args.colours, Some(n))? {
            if c < 2 {
                continue;
            }
            let c = u16::try_from(c).map_err(|_| Error::Config(format!("colour count {c}")))?;
            rows.push(measure_bound(n, c, budget)?);
        }
    }
    if rows.is_empty() {
        return Err(Error::Config(
            "no (n, colours) pair with at least two colours".into(),
        ));
    }
    write_output(args.out.as_ref(), &bounds_csv(&rows)?)?;
    Ok(if rows.iter().all(|r| r.matches() != Some(false)) {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn export_graph(args: &ExportArgs) -> Result<i32> {
    let resolved = args.instance.resolve()?;
    let game = resolved.game()?;
    let name = args
        .scheduler
        .as_deref()
        .or(resolved.file.scheduler.as_deref());
    let scheduler = resolve_scheduler(name, &game)?;
    let graph = build_improvement_graph(&game, scheduler.as_deref(), resolved.node_budget)?;
    write_output(args.out.as_ref(), &improvement_graph_dot(&graph))?;
    Ok(EXIT_OK)
}

fn replay(args: &ReplayArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.trace)?;
    let records: Vec<TraceRecord> = match serde_json::from_str::<TraceRecord>(&text) {
        Ok(r) => vec![r],
        Err(_) => serde_json::from_str(&text)?,
    };
    for record in &records {
        let states = record.replay()?;
        let shown: Vec<String> = states
            .iter()
            .map(|s| match record.instance {
                crate::export::TraceInstance::Game { .. } => {
                    JointStrategy::new(s.iter().map(|&v| Colour(v)).collect()).to_string()
                }
                crate::export::TraceInstance::Machine { .. } => SystemState(s.clone()).to_string(),
            })
            .collect();
        println!("{}", shown.join(" -> "));
        println!(
            "replayed {} steps  first-hit: {}",
            record.steps.len(),
            first_hit_text(record.first_legitimate)
        );
    }
    Ok(EXIT_OK)
}

/// Runs one command; errors are mapped to exit codes by [`main`].
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::ExportGraph(a) => export_graph(a),
        Command::Replay(a) => replay(a),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_vectors() {
        assert_eq!(parse_colours("a,b,a").unwrap(), vec![0, 1, 0]);
        assert_eq!(parse_colours("2,0,0").unwrap(), vec![2, 0, 0]);
        assert_eq!(parse_colours("aba").unwrap(), vec![0, 1, 0]);
        assert_eq!(parse_colours("10,1").unwrap(), vec![10, 1]);
        assert!(parse_colours("a,?").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("3..5", None).unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_list("n-1,n", Some(4)).unwrap(), vec![3, 4]);
        assert_eq!(parse_list("2..n", Some(3)).unwrap(), vec![2, 3]);
        assert!(parse_list("n", None).is_err());
    }

    #[test]
    fn policies() {
        assert_eq!(
            parse_policy("fixed:2,2", 3).unwrap(),
            SelectionPolicy::Fixed {
                movers: vec![2, 2],
                cyclic: false
            }
        );
        assert_eq!(
            parse_policy("cycle-demo", 3).unwrap(),
            SelectionPolicy::cycle_demo()
        );
        assert_eq!(
            parse_policy("seeded:9", 3).unwrap(),
            SelectionPolicy::Seeded { seed: 9 }
        );
        assert!(parse_policy("sideways", 3).is_err());
    }

    #[test]
    fn config_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "game = \"chain\"\nn = 4\ncolours = 3\n").unwrap();
        let args = InstanceArgs {
            config: Some(path),
            n: Some(5),
            ..Default::default()
        };
        let r = args.resolve().unwrap();
        assert_eq!(
            (r.game, r.n, r.colours),
            (Some(GameKind::Chain), Some(5), Some(3))
        );
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "colors = 3\n").unwrap();
        assert!(matches!(RunConfig::load(&path), Err(Error::Config(_))));
    }

    #[test]
    fn expectation_table_covers_scheduled_regimes() {
        let family = |n, colours| GameFamily::FirstSolution { n, colours };
        assert_eq!(
            expected_verdict(PropertyArg::ScheduledSelfstab, family(4, 3))
                .unwrap()
                .first_hit,
            Some(FirstHitValue::Bounded(13))
        );
        assert_eq!(
            expected_verdict(PropertyArg::ScheduledSelfstab, family(4, 2))
                .unwrap()
                .verdict,
            Verdict::Fails
        );
        assert!(expected_verdict(PropertyArg::ScheduledSelfstab, family(6, 3)).is_none());
    }
}
