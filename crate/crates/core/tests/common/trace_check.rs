//! Checks one machine trace against its game path.

use selfstab::dynamics::{replay, scheduler_for, TerminalStatus};
use selfstab::protocols::{MachineTrace, ProtocolKind, RingSystem, RunStatus};

/// Consecutive same-machine pairs, taken left to right, that do not
/// straddle the start of the trace's cycle.
fn expected_pairs(trace: &MachineTrace) -> usize {
    let cycle_start = match trace.terminal {
        RunStatus::CycleDetected { cycle_start, .. } => Some(cycle_start),
        _ => None,
    };
    let mut j = 0;
    let mut pairs = 0;
    while j < trace.moves.len() {
        if j + 1 < trace.moves.len()
            && trace.moves[j + 1].machine == trace.moves[j].machine
            && cycle_start != Some(j + 1)
        {
            pairs += 1;
            j += 2;
        } else {
            j += 1;
        }
    }
    pairs
}

pub fn check_trace(system: &RingSystem, trace: &MachineTrace) {
    let (game, map) = system.game_of_system().unwrap();
    let corr = system.correspondence_check(trace).unwrap();
    replay(&game, &corr.path, None).unwrap();
    let scheduler = scheduler_for(game.family()).unwrap();
    let states = corr.path.states();
    for (t, step) in corr.path.steps.iter().enumerate() {
        if !corr.compressed.contains(&t) {
            assert_eq!(
                scheduler.choose(&game, &states[t], step.mover).unwrap(),
                step.to
            );
        } else {
            let gain = game.payoff(&states[t + 1], step.mover).unwrap() as i64
                - game.payoff(&states[t], step.mover).unwrap() as i64;
            assert_eq!(gain, 2);
        }
    }
    let machine_states = trace.replay(system).unwrap();
    for (k, &t) in corr.step_of_move.iter().enumerate() {
        if !corr.compressed.contains(&t) {
            assert_eq!(map.to_joint(&machine_states[k]), states[t]);
        }
    }
    match system.kind() {
        ProtocolKind::FirstSolution { .. } => {
            assert!(corr.compressed.is_empty());
            assert_eq!(corr.path.len(), trace.moves.len());
        }
        _ => {
            assert_eq!(corr.compressed.len(), expected_pairs(trace));
            assert_eq!(corr.path.len(), trace.moves.len() - corr.compressed.len());
        }
    }
    match (trace.terminal, corr.path.terminal) {
        (RunStatus::Deadlock, TerminalStatus::ReachedNash)
        | (RunStatus::CycleDetected { .. }, TerminalStatus::CycleDetected { .. }) => {}
        other => panic!("terminal statuses disagree: {other:?}"),
    }
}
