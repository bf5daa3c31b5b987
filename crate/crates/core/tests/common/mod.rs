//! Independent oracles written directly from the ring definitions, without
//! going through the library's payoff tables or graph builders.

#![allow(dead_code)]

use std::collections::HashMap;

/// All vectors over `sets`, player 1 most significant.
pub fn all_vectors(sets: &[Vec<u16>]) -> Vec<Vec<u16>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

pub fn uniform(n: usize, c: u16) -> Vec<Vec<u16>> {
    all_vectors(&vec![(0..c).collect(); n])
}

fn pred(s: &[u16], i: usize) -> u16 {
    if i == 0 {
        s[s.len() - 1]
    } else {
        s[i - 1]
    }
}

/// First-solution payoff of player `i` (1-based).
pub fn first_payoff(s: &[u16], i: usize) -> u32 {
    let p = pred(s, i - 1);
    if i == 1 {
        u32::from(s[0] != p)
    } else {
        u32::from(s[i - 1] == p)
    }
}

/// Better-response moves `(player, colour)` in the first-solution game.
pub fn first_moves(s: &[u16], c: u16) -> Vec<(usize, u16)> {
    let mut out = Vec::new();
    let n = s.len();
    if s[0] == s[n - 1] {
        out.extend((0..c).filter(|&x| x != s[0]).map(|x| (1, x)));
    }
    for i in 2..=n {
        if s[i - 1] != s[i - 2] {
            out.push((i, s[i - 2]));
        }
    }
    out
}

/// The same moves restricted to the dijkstra choice.
pub fn dijkstra_moves(s: &[u16], c: u16) -> Vec<(usize, u16)> {
    first_moves(s, c)
        .into_iter()
        .filter(|&(i, x)| i != 1 || x == (s[0] + 1) % c)
        .collect()
}

/// Better-response moves on the coordination chain `1 -> ... -> n`.
pub fn chain_moves(s: &[u16]) -> Vec<(usize, u16)> {
    (2..=s.len())
        .filter(|&i| s[i - 1] != s[i - 2])
        .map(|i| (i, s[i - 2]))
        .collect()
}

pub fn apply(s: &[u16], (i, x): (usize, u16)) -> Vec<u16> {
    let mut t = s.to_vec();
    t[i - 1] = x;
    t
}

/// Players not best-responding in the first-solution game.
pub fn first_non_best(s: &[u16]) -> Vec<usize> {
    let n = s.len();
    let mut out = Vec::new();
    if s[0] == s[n - 1] {
        out.push(1);
    }
    out.extend((2..=n).filter(|&i| s[i - 1] != s[i - 2]));
    out
}

/// Privileged machines of the three-state (`m = 3`) or four-state
/// (`m = 4`) ring.
pub fn ring_privileged(s: &[u16], m: u16) -> Vec<usize> {
    let n = s.len();
    let add = |v: u16, d: u16| (v + d) % m;
    let mut out = Vec::new();
    for i in 1..=n {
        let sv = s[i - 1];
        let l = s[(i + n - 2) % n];
        let r = s[i % n];
        let on = if i == 1 {
            add(sv, 1) == r
        } else if i == n {
            if m == 3 {
                l == r && sv != add(r, 1)
            } else {
                l == add(sv, 1)
            }
        } else {
            l == add(sv, 1) || add(sv, 1) == r
        };
        if on {
            out.push(i);
        }
    }
    out
}

/// Normal-player payoff in the three- and four-state games.
pub fn normal_payoff(own: u16, l: u16, r: u16, m: u16) -> u32 {
    let held = |v: u16| v == l || v == r;
    match (held((own + 1) % m), held((own + 2) % m)) {
        (true, true) => 0,
        (true, false) => 1,
        _ => 2,
    }
}

/// Longest path from every node of a finite graph, or `None` on a cycle.
pub fn longest_paths<F>(nodes: &[Vec<u16>], succ: F) -> Option<HashMap<Vec<u16>, u64>>
where
    F: Fn(&[u16]) -> Vec<Vec<u16>>,
{
    fn visit<F: Fn(&[u16]) -> Vec<Vec<u16>>>(
        v: &[u16],
        succ: &F,
        done: &mut HashMap<Vec<u16>, u64>,
        active: &mut Vec<Vec<u16>>,
    ) -> Option<u64> {
        if let Some(&d) = done.get(v) {
            return Some(d);
        }
        if active.iter().any(|a| a == v) {
            return None;
        }
        active.push(v.to_vec());
        let mut best = 0;
        for w in succ(v) {
            best = best.max(1 + visit(&w, succ, done, active)?);
        }
        active.pop();
        done.insert(v.to_vec(), best);
        Some(best)
    }
    let mut done = HashMap::new();
    for v in nodes {
        visit(v, &succ, &mut done, &mut Vec::new())?;
    }
    Some(done)
}

/// Worst number of steps before a legitimate node over all paths, or `None`
/// if some path avoids legitimate nodes forever or gets stuck before one.
pub fn worst_first_hit<F, L>(nodes: &[Vec<u16>], succ: F, legit: L) -> Option<u64>
where
    F: Fn(&[u16]) -> Vec<Vec<u16>>,
    L: Fn(&[u16]) -> bool,
{
    for v in nodes {
        if !legit(v) && succ(v).is_empty() {
            return None;
        }
    }
    let dist = longest_paths(
        nodes,
        |v: &[u16]| if legit(v) { Vec::new() } else { succ(v) },
    )?;
    dist.values().copied().max()
}
