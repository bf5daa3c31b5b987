//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;
#[path = "common/trace_check.rs"]
mod trace_check;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfstab::dynamics::{
    dijkstra_first_scheduler, four_state_scheduler, generate_path, replay, three_state_scheduler,
    tightness_path, Path, Scheduler, SelectionPolicy, TerminalStatus,
};
use selfstab::export::TraceRecord;
use selfstab::game::{
    build_alternative_first_game, build_chain_coordination_game, build_first_solution_game,
    build_four_state_game, build_three_state_game, Game,
};
use selfstab::protocols::{RingSystem, SystemState};
use selfstab::verify::{
    admits_closure, admits_fairness, admits_self_stabilization, admits_stability,
    build_improvement_graph, extract_witness, fip_check, first_solution_bound,
    scheduler_ensures_self_stabilization, FirstHit, FirstHitValue, Verdict,
};
use selfstab::JointStrategy;

type Outcome = Result<String, String>;
type Lasso = (Game, Path, Box<dyn Scheduler>);
type Criterion = (&'static str, Duration, fn() -> Outcome);

const BUDGET: u64 = 1_000_000;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Grid shared by the first three criteria.
fn first_grid() -> impl Iterator<Item = (usize, u16)> {
    (2..=5).flat_map(|n| (2..=5u16).map(move |c| (n, c)))
}

fn no_nash() -> Outcome {
    let mut games = 0;
    for (n, c) in first_grid() {
        let game = build_first_solution_game(n, c).map_err(err)?;
        let graph = build_improvement_graph(&game, None, BUDGET).map_err(err)?;
        let oracle = common::uniform(n, c)
            .iter()
            .filter(|s| common::first_non_best(s).is_empty())
            .count();
        check(graph.nash_count() == 0 && oracle == 0, || {
            format!(
                "n={n} |C|={c}: {} equilibria, oracle {oracle}",
                graph.nash_count()
            )
        })?;
        games += 1;
    }
    Ok(format!("{games} games, no equilibria"))
}

fn stability() -> Outcome {
    for (n, c) in first_grid() {
        let game = build_first_solution_game(n, c).map_err(err)?;
        let report = admits_stability(&game).map_err(err)?;
        check(report.holds(), || format!("n={n} |C|={c}: stability fails"))?;
        // Oracle: every successor of a legitimate state is not an equilibrium.
        for s in common::uniform(n, c) {
            if common::first_non_best(&s).len() == 1 {
                for m in common::first_moves(&s, c) {
                    let t = common::apply(&s, m);
                    check(!common::first_non_best(&t).is_empty(), || {
                        format!("{t:?} is Nash")
                    })?;
                }
            }
        }
    }
    Ok("holds on 16 games".into())
}

fn chain_fip() -> Outcome {
    let mut lengths = Vec::new();
    for n in 2..=6 {
        let c = n as u16;
        let game = build_chain_coordination_game(n, c).map_err(err)?;
        let report = fip_check(&game).map_err(err)?;
        let expected = (n * (n - 1) / 2) as u64;
        check(report.holds(), || format!("n={n}: FIP fails"))?;
        check(report.longest_path == Some(expected), || {
            format!(
                "n={n}: longest path {:?}, expected {expected}",
                report.longest_path
            )
        })?;
        if n <= 5 {
            let oracle = common::longest_paths(&common::uniform(n, c), |s| {
                common::chain_moves(s)
                    .into_iter()
                    .map(|m| common::apply(s, m))
                    .collect()
            })
            .and_then(|d| d.values().copied().max());
            check(oracle == Some(expected), || {
                format!("n={n}: oracle {oracle:?}")
            })?;
        }
        let start = JointStrategy::from_raw(&(0..c).collect::<Vec<_>>());
        let path = generate_path(&game, &start, None, &SelectionPolicy::RightmostFirst, 1000)
            .map_err(err)?;
        replay(&game, &path, None).map_err(err)?;
        check(
            path.len() as u64 == expected && path.terminal == TerminalStatus::ReachedNash,
            || format!("n={n}: rightmost-first path has {} steps", path.len()),
        )?;
        lengths.push(expected);
    }
    Ok(format!(
        "longest paths {lengths:?}, attained by rightmost-first"
    ))
}

fn fairness() -> Outcome {
    for (n, c) in first_grid() {
        let game = build_first_solution_game(n, c).map_err(err)?;
        let report = admits_fairness(&game).map_err(err)?;
        check(report.holds(), || format!("n={n} |C|={c}: fairness fails"))?;
        let nodes = common::uniform(n, c);
        for i in 1..=n {
            let acyclic = common::longest_paths(&nodes, |s| {
                common::first_moves(s, c)
                    .into_iter()
                    .filter(|&(j, _)| j != i)
                    .map(|m| common::apply(s, m))
                    .collect()
            });
            check(acyclic.is_some(), || {
                format!("n={n} |C|={c}: oracle cycle without {i}")
            })?;
        }
    }
    Ok("every player-omitting subgraph acyclic".into())
}

/// Failing self-stabilization reports at n = 4, 5, shared with the
/// witness criterion.
fn unscheduled_failures() -> Result<Vec<(Game, Path)>, String> {
    let mut out = Vec::new();
    for n in 4..=5 {
        for c in 2..=n as u16 {
            let game = build_first_solution_game(n, c).map_err(err)?;
            let report = admits_self_stabilization(&game, None).map_err(err)?;
            check(report.verdict == Verdict::Fails, || {
                format!("n={n} |C|={c}: holds")
            })?;
            let witness = extract_witness(&report).map_err(err)?;
            check(witness.cycle().is_some(), || {
                format!("n={n} |C|={c}: witness is not a lasso")
            })?;
            out.push((game, witness));
        }
    }
    Ok(out)
}

fn unscheduled_self_stabilization() -> Outcome {
    let two = admits_self_stabilization(&build_first_solution_game(2, 2).map_err(err)?, None)
        .map_err(err)?;
    check(
        two.holds() && two.worst_case_first_hit == Some(FirstHitValue::Bounded(0)),
        || format!("n=2: {:?} {:?}", two.verdict, two.worst_case_first_hit),
    )?;
    let mut three = Vec::new();
    for c in 2..=3 {
        let game = build_first_solution_game(3, c).map_err(err)?;
        let report = admits_self_stabilization(&game, None).map_err(err)?;
        let steps = match report.worst_case_first_hit {
            Some(FirstHitValue::Bounded(k)) => k,
            other => return Err(format!("n=3 |C|={c}: {other:?}")),
        };
        check(report.holds() && steps <= 2, || {
            format!("n=3 |C|={c}: {steps} steps")
        })?;
        three.push(steps);
    }
    let failures = unscheduled_failures()?;
    Ok(format!(
        "n=2 holds in 0 steps, n=3 holds in {three:?} steps, {} lassos at n=4,5",
        failures.len()
    ))
}

fn scheduled_bound() -> Outcome {
    let mut failures = Vec::new();
    let mut measured = Vec::new();
    for n in 3..=5 {
        let formula = first_solution_bound(n);
        for c in [n as u16 - 1, n as u16] {
            let game = build_first_solution_game(n, c).map_err(err)?;
            let f = dijkstra_first_scheduler(c).map_err(err)?;
            let graph = build_improvement_graph(&game, Some(&f), BUDGET).map_err(err)?;
            let steps = graph.worst_case_first_hit().steps();
            let oracle = common::worst_first_hit(
                &common::uniform(n, c),
                |s| {
                    common::dijkstra_moves(s, c)
                        .into_iter()
                        .map(|m| common::apply(s, m))
                        .collect()
                },
                |s| common::first_non_best(s).len() == 1,
            );
            if steps != oracle {
                failures.push(format!(
                    "n={n} |C|={c}: verifier {steps:?}, oracle {oracle:?}"
                ));
            }
            measured.push(format!(
                "{n}/{c}:{}",
                steps.map_or("-".into(), |k| k.to_string())
            ));
            if steps != Some(formula) {
                failures.push(format!(
                    "n={n} |C|={c}: worst case {steps:?}, formula {formula}"
                ));
            }
            match tightness_path(n, c) {
                Ok(path) => {
                    let states = replay(&game, &path, Some(&f)).map_err(err)?;
                    let first = states
                        .iter()
                        .position(|s| game.is_legitimate(s).unwrap_or(false));
                    if path.len() as u64 != formula || first != Some(path.len()) {
                        failures.push(format!(
                            "n={n} |C|={c}: tightness path {} steps, first legitimate {first:?}",
                            path.len()
                        ));
                    }
                }
                Err(e) => failures.push(format!("n={n} |C|={c}: {e}")),
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("measured {}", measured.join(" ")))
    } else {
        Err(format!(
            "measured {}; {}",
            measured.join(" "),
            failures.join("; ")
        ))
    }
}

fn small_colour_lassos() -> Result<Vec<Lasso>, String> {
    let mut out: Vec<Lasso> = Vec::new();
    for n in 4..=5 {
        let c = n as u16 - 2;
        let game = build_first_solution_game(n, c).map_err(err)?;
        let f = dijkstra_first_scheduler(c).map_err(err)?;
        let graph = build_improvement_graph(&game, Some(&f), BUDGET).map_err(err)?;
        match graph.worst_case_first_hit() {
            FirstHit::Unbounded { lasso } => out.push((game, lasso, Box::new(f))),
            other => return Err(format!("n={n} |C|={c}: {:?}", other.value())),
        }
    }
    Ok(out)
}

fn small_colour_regime() -> Outcome {
    let lassos = small_colour_lassos()?;
    for (game, lasso, f) in &lassos {
        let states = replay(game, lasso, Some(f.as_ref())).map_err(err)?;
        check(
            states
                .iter()
                .all(|s| !game.is_legitimate(s).unwrap_or(true)),
            || format!("n={}: lasso visits a legitimate state", game.players()),
        )?;
    }
    Ok("unbounded at n=4,5 with replayable lassos".into())
}

const CYCLE: [[u16; 3]; 10] = [
    [2, 0, 0],
    [2, 2, 0],
    [1, 2, 0],
    [1, 2, 2],
    [1, 1, 2],
    [0, 1, 2],
    [0, 1, 1],
    [0, 0, 1],
    [2, 0, 1],
    [2, 0, 0],
];

fn alternative_cycle() -> Result<(Game, Path, Path), String> {
    let game = build_alternative_first_game(3, 3).map_err(err)?;
    let start = JointStrategy::from_raw(&CYCLE[0]);
    let path =
        generate_path(&game, &start, None, &SelectionPolicy::cycle_demo(), 100).map_err(err)?;
    let report = admits_closure(&game).map_err(err)?;
    check(report.verdict == Verdict::Fails, || "closure holds".into())?;
    let witness = extract_witness(&report).map_err(err)?;
    Ok((game, path, witness))
}

fn alternative_payoff() -> Outcome {
    let (game, path, _) = alternative_cycle()?;
    let states = replay(&game, &path, None).map_err(err)?;
    let raw: Vec<Vec<u16>> = states.iter().take(10).map(JointStrategy::raw).collect();
    check(raw == CYCLE.map(|s| s.to_vec()), || {
        format!("visited {raw:?}")
    })?;
    check(path.cycle().map(<[_]>::len) == Some(9), || {
        format!("terminal {:?}", path.terminal)
    })?;
    Ok("nine-cycle replays, closure fails".into())
}

fn scheduled_protocol_games() -> Outcome {
    let mut sizes = Vec::new();
    for n in 3..=5 {
        let cases: [(Game, Box<dyn Scheduler>); 2] = [
            (
                build_three_state_game(n).map_err(err)?,
                Box::new(three_state_scheduler()),
            ),
            (
                build_four_state_game(n).map_err(err)?,
                Box::new(four_state_scheduler()),
            ),
        ];
        for (game, f) in cases {
            let report =
                scheduler_ensures_self_stabilization(&game, f.as_ref(), None).map_err(err)?;
            check(report.holds(), || format!("{}: fails", game.family()))?;
            sizes.push(report.statistics.nodes);
        }
    }
    check(sizes == [27, 16, 81, 64, 243, 256], || {
        format!("state spaces {sizes:?}")
    })?;
    Ok(format!("holds on state spaces {sizes:?}"))
}

fn systems(n: usize) -> Result<Vec<RingSystem>, String> {
    Ok(vec![
        RingSystem::first_solution(n, n as u16).map_err(err)?,
        RingSystem::first_solution(n, n as u16 - 1).map_err(err)?,
        RingSystem::three_state(n).map_err(err)?,
        RingSystem::four_state(n).map_err(err)?,
    ])
}

fn correspondence() -> Outcome {
    let mut exhaustive = 0;
    for system in systems(3)? {
        for start in system.states() {
            for trace in system.enumerate_runs(&start, 100_000).map_err(err)? {
                trace_check::check_trace(&system, &trace);
                exhaustive += 1;
            }
        }
    }
    let mut sampled = 0;
    for n in 4..=5 {
        for system in systems(n)? {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for seed in 0..1000u64 {
                let start: Vec<u16> = (1..=n)
                    .map(|m| {
                        let range = system.range(m);
                        range[rng.gen_range(0..range.len())]
                    })
                    .collect();
                let trace = system
                    .run_system(&SystemState(start), &SelectionPolicy::Seeded { seed }, 300)
                    .map_err(err)?;
                trace_check::check_trace(&system, &trace);
                sampled += 1;
            }
        }
    }
    Ok(format!(
        "{exhaustive} exhaustive traces at n=3, {sampled} sampled at n=4,5"
    ))
}

fn worked_example() -> Outcome {
    let system = RingSystem::three_state(3).map_err(err)?;
    let start = SystemState(vec![2, 1, 0]);
    check(
        system
            .privileged_machines(&start)
            .map_err(err)?
            .contains(&2),
        || "machine 2 not privileged".into(),
    )?;
    let mid = system.fire(&start, 2).map_err(err)?;
    check(mid == SystemState(vec![2, 2, 0]), || {
        format!("fired to {mid}")
    })?;
    check(
        system.privileged_machines(&mid).map_err(err)?.contains(&2),
        || "machine 2 not privileged again".into(),
    )?;
    let trace = system
        .run_system(
            &start,
            &SelectionPolicy::Fixed {
                movers: vec![2, 2],
                cyclic: false,
            },
            10,
        )
        .map_err(err)?;
    let corr = system.correspondence_check(&trace).map_err(err)?;
    check(corr.path.len() == 1 && corr.compressed == [0], || {
        format!(
            "{} game steps, compressed {:?}",
            corr.path.len(),
            corr.compressed
        )
    })?;
    let (game, map) = system.game_of_system().map_err(err)?;
    let end = corr.path.states().pop().expect("non-empty");
    let before = game.payoff(&map.to_joint(&start), 2).map_err(err)?;
    let after = game.payoff(&end, 2).map_err(err)?;
    check(after == before + 2, || {
        format!("payoff {before} -> {after}")
    })?;
    // Normal-player payoff oracle: own 1 vs neighbours (2, 0), then own 0.
    check(
        common::normal_payoff(1, 2, 0, 3) == before && common::normal_payoff(0, 2, 0, 3) == after,
        || "oracle payoffs disagree".into(),
    )?;
    Ok(format!(
        "(2,1,0) -> (2,2,0) -> (2,0,0), payoff {before} -> {after}"
    ))
}

fn witness_soundness() -> Outcome {
    let mut count = 0;
    let mut round_trip =
        |game: &Game, path: &Path, f: Option<&dyn Scheduler>| -> Result<(), String> {
            replay(game, path, f).map_err(err)?;
            let record = TraceRecord::from_path(game, path, f).map_err(err)?;
            let back = TraceRecord::from_json(&record.to_json().map_err(err)?).map_err(err)?;
            back.replay().map_err(err)?;
            count += 1;
            Ok(())
        };
    for (game, witness) in unscheduled_failures()? {
        round_trip(&game, &witness, None)?;
    }
    for (game, lasso, f) in small_colour_lassos()? {
        round_trip(&game, &lasso, Some(f.as_ref()))?;
    }
    let (game, _, witness) = alternative_cycle()?;
    round_trip(&game, &witness, None)?;
    Ok(format!("{count} witnesses replay, also through trace JSON"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "no Nash equilibria in the first-solution game",
            Duration::from_secs(1),
            no_nash,
        ),
        (
            "stability of the first-solution game",
            Duration::from_secs(1),
            stability,
        ),
        (
            "chain FIP and longest path",
            Duration::from_secs(5),
            chain_fip,
        ),
        (
            "fairness of the first-solution game",
            Duration::from_secs(2),
            fairness,
        ),
        (
            "unscheduled self-stabilization verdicts",
            Duration::from_secs(2),
            unscheduled_self_stabilization,
        ),
        (
            "scheduled worst-case first hit and tightness",
            Duration::from_secs(10),
            scheduled_bound,
        ),
        (
            "unbounded first hit with n-2 colours",
            Duration::from_secs(5),
            small_colour_regime,
        ),
        (
            "alternative payoff nine-cycle",
            Duration::from_secs(1),
            alternative_payoff,
        ),
        (
            "three- and four-state schedulers stabilize",
            Duration::from_secs(5),
            scheduled_protocol_games,
        ),
        (
            "machine to game correspondence",
            Duration::from_secs(30),
            correspondence,
        ),
        (
            "three-state double move",
            Duration::from_secs(1),
            worked_example,
        ),
        (
            "witness soundness",
            Duration::from_secs(1),
            witness_soundness,
        ),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = started.elapsed();
        let timing = if elapsed <= *limit {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!(
                "{:.2}s, over the {}s budget",
                elapsed.as_secs_f64(),
                limit.as_secs()
            )
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({timing}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({timing}): {detail}", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
