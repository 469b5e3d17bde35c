use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{graph_to_involution_schreier, ConstructionError};
use crate::graph::FiniteGraph;
use crate::rng::stream;

/// Length of a shortest cycle in a simple graph, `None` for forests.
pub fn girth(adj: &[Vec<u32>]) -> Option<u32> {
    (0..adj.len())
        .into_par_iter()
        .filter_map(|s| shortest_cycle_through_tree(adj, s))
        .min()
}

/// Shortest cycle closed by a non-tree edge of the BFS tree at `s`; the
/// minimum over all roots is the girth.
fn shortest_cycle_through_tree(adj: &[Vec<u32>], s: usize) -> Option<u32> {
    let n = adj.len();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    dist[s] = 0;
    let mut q = VecDeque::from([s as u32]);
    let mut best = u32::MAX;
    while let Some(u) = q.pop_front() {
        let du = dist[u as usize];
        if 2 * du + 1 >= best {
            break;
        }
        for &w in &adj[u as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                parent[w as usize] = u;
                q.push_back(w);
            } else if parent[u as usize] != w {
                best = best.min(du + dist[w as usize] + 1);
            }
        }
    }
    (best != u32::MAX).then_some(best)
}

/// All-pairs eccentricity maximum of a connected simple graph.
pub fn adjacency_diameter(adj: &[Vec<u32>]) -> Option<u32> {
    let n = adj.len();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![u32::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s as u32]);
            let mut far = 0;
            let mut seen = 1;
            while let Some(u) = q.pop_front() {
                far = dist[u as usize];
                for &w in &adj[u as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = far + 1;
                        seen += 1;
                        q.push_back(w);
                    }
                }
            }
            (seen == n).then_some(far)
        })
        .try_reduce(|| 0, |a, b| Some(a.max(b)))
}

/// Whether `a` and `b` are within distance `limit` in the partial graph.
fn within(
    adj: &[Vec<u32>],
    a: u32,
    b: u32,
    limit: u32,
    dist: &mut [u32],
    touched: &mut Vec<u32>,
) -> bool {
    for &t in touched.iter() {
        dist[t as usize] = u32::MAX;
    }
    touched.clear();
    dist[a as usize] = 0;
    touched.push(a);
    let mut head = 0;
    while head < touched.len() {
        let u = touched[head];
        head += 1;
        let du = dist[u as usize];
        if u == b {
            return true;
        }
        if du == limit {
            continue;
        }
        for &w in &adj[u as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                touched.push(w);
            }
        }
    }
    false
}

/// One random perfect matching whose edges close no cycle shorter than
/// `target`, or `None` on a dead end.
fn matching_stage(adj: &[Vec<u32>], target: u32, rng: &mut ChaCha8Rng) -> Option<Vec<(u32, u32)>> {
    let n = adj.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let mut matched = vec![false; n];
    let mut edges = Vec::with_capacity(n / 2);
    let mut dist = vec![u32::MAX; n];
    let mut touched = Vec::new();
    let limit = target.saturating_sub(2);
    for (i, &u) in order.iter().enumerate() {
        if matched[u as usize] {
            continue;
        }
        let free: Vec<u32> = order[i + 1..]
            .iter()
            .copied()
            .filter(|&w| !matched[w as usize])
            .collect();
        let mut candidates = free;
        candidates.shuffle(rng);
        let w = candidates
            .into_iter()
            .find(|&w| !within(adj, u, w, limit, &mut dist, &mut touched))?;
        matched[u as usize] = true;
        matched[w as usize] = true;
        edges.push((u, w));
    }
    Some(edges)
}

fn girth_cubic(
    n: usize,
    target: u32,
    rng: &mut ChaCha8Rng,
    stage_budget: u32,
) -> Option<Vec<Vec<(u32, u32)>>> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut matchings = Vec::new();
    for _ in 0..3 {
        let m = (0..stage_budget).find_map(|_| matching_stage(&adj, target, rng))?;
        for &(u, w) in &m {
            adj[u as usize].push(w);
            adj[w as usize].push(u);
        }
        matchings.push(m);
    }
    Some(matchings)
}

fn matchings_to_graph(n: usize, matchings: &[Vec<(u32, u32)>]) -> FiniteGraph {
    let edges: Vec<(u32, u32, usize)> = matchings
        .iter()
        .enumerate()
        .flat_map(|(c, m)| m.iter().map(move |&(u, w)| (u, w, c)))
        .collect();
    graph_to_involution_schreier(n, &edges, 3).expect("perfect matchings give a proper coloring")
}

/// A simple 3-regular graph as the union of three perfect matchings, each
/// matching labeled by its own involution.
pub fn random_cubic(n: usize, seed: u64) -> Result<FiniteGraph, ConstructionError> {
    let report = large_girth_sequence(&[n], 3, seed, 1000)?;
    Ok(report
        .graphs
        .into_iter()
        .next()
        .expect("one size requested"))
}

#[derive(Clone, Debug)]
pub struct GirthReport {
    pub graphs: Vec<FiniteGraph>,
    pub girths: Vec<u32>,
    /// Matching stages attempted per graph.
    pub attempts: Vec<u32>,
}

/// Seeded random cubic graphs of the given even sizes with girth at least
/// `target`. Each of the three matchings is drawn by greedy pairing that
/// refuses edges closing short cycles, restarting a stage on dead ends up to
/// `stage_budget` times.
pub fn large_girth_sequence(
    sizes: &[usize],
    target: u32,
    seed: u64,
    stage_budget: u32,
) -> Result<GirthReport, ConstructionError> {
    let mut out = GirthReport {
        graphs: Vec::new(),
        girths: Vec::new(),
        attempts: Vec::new(),
    };
    for (i, &n) in sizes.iter().enumerate() {
        if n < 4 || n % 2 == 1 {
            return Err(ConstructionError::Parameter(format!(
                "cubic graph size {n} must be even and at least 4"
            )));
        }
        let mut rng = stream(seed, &format!("girth/{i}/{n}"));
        let mut best = 0;
        let mut found = None;
        let mut tries = 0;
        while tries < stage_budget {
            tries += 1;
            let Some(m) = girth_cubic(n, target, &mut rng, stage_budget) else {
                continue;
            };
            let g = matchings_to_graph(n, &m);
            let gi = girth(&g.simple_adjacency()).unwrap_or(u32::MAX);
            best = best.max(gi);
            if gi >= target {
                found = Some((g, gi));
                break;
            }
        }
        let (g, gi) = found.ok_or(ConstructionError::GirthBudget {
            best_girth: best,
            target,
        })?;
        out.graphs.push(g);
        out.girths.push(gi);
        out.attempts.push(tries);
    }
    Ok(out)
}
