//! ```text
//! decomposition K=3 vertices=10 removed=6 fraction=0.6
//! removed 0 4
//! component size=3 count=2
//! ```

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;

use super::SoficError;
use crate::graph::FiniteGraph;
use crate::rng::stream;

const EXACT_LIMIT: usize = 12;
const RESTARTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeMode {
    Heuristic {
        seed: u64,
    },
    /// Minimum number of removed edges, by exhaustive search.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub k: usize,
    pub vertices: usize,
    /// Removed simple edges `(u, v)` with `u < v`.
    pub removed: Vec<(u32, u32)>,
    /// Component size to number of components after removal.
    pub census: BTreeMap<usize, usize>,
    /// Removed edges per vertex.
    pub fraction: f64,
}

impl Decomposition {
    pub fn max_component(&self) -> usize {
        self.census.keys().next_back().copied().unwrap_or(0)
    }

    pub fn write(&self) -> String {
        let mut out = format!(
            "decomposition K={} vertices={} removed={} fraction={}\n",
            self.k,
            self.vertices,
            self.removed.len(),
            self.fraction
        );
        for (u, v) in &self.removed {
            let _ = writeln!(out, "removed {u} {v}");
        }
        for (s, c) in &self.census {
            let _ = writeln!(out, "component size={s} count={c}");
        }
        out
    }
}

/// Remove edges so that every component has at most `k` vertices.
pub fn hyperfinite_decompose(
    g: &FiniteGraph,
    k: usize,
    mode: DecomposeMode,
) -> Result<Decomposition, SoficError> {
    if k == 0 {
        return Err(SoficError::Invalid(
            "component bound must be positive".into(),
        ));
    }
    let adj = g.simple_adjacency();
    let edges = g.simple_edges();
    let block = match mode {
        DecomposeMode::Heuristic { seed } => heuristic(&adj, &edges, k, seed),
        DecomposeMode::Exact => {
            if adj.len() > EXACT_LIMIT {
                return Err(SoficError::Invalid(format!(
                    "exact decomposition limited to {EXACT_LIMIT} vertices"
                )));
            }
            exact(&adj, &edges, k)
        }
    };
    let removed: Vec<(u32, u32)> = edges
        .iter()
        .copied()
        .filter(|&(u, v)| block[u as usize] != block[v as usize])
        .collect();
    let census = census(&adj, &block);
    let out = Decomposition {
        k,
        vertices: adj.len(),
        fraction: if adj.is_empty() {
            0.0
        } else {
            removed.len() as f64 / adj.len() as f64
        },
        removed,
        census,
    };
    if out.max_component() > k {
        return Err(SoficError::Invalid(format!(
            "component of size {} exceeds {k}",
            out.max_component()
        )));
    }
    Ok(out)
}

/// Components of the graph with the cross-block edges removed.
fn census(adj: &[Vec<u32>], block: &[usize]) -> BTreeMap<usize, usize> {
    let mut seen = vec![false; adj.len()];
    let mut out = BTreeMap::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = q.pop_front() {
            size += 1;
            for &w in &adj[u] {
                let w = w as usize;
                if !seen[w] && block[w] == block[u] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        *out.entry(size).or_insert(0) += 1;
    }
    out
}

fn cut(edges: &[(u32, u32)], block: &[usize]) -> usize {
    edges
        .iter()
        .filter(|&&(u, v)| block[u as usize] != block[v as usize])
        .count()
}

/// BFS blocks, each started next to the previous one, then single-vertex
/// moves into smaller neighbouring blocks while the cut shrinks. Best of
/// several seeded restarts.
fn heuristic(adj: &[Vec<u32>], edges: &[(u32, u32)], k: usize, seed: u64) -> Vec<usize> {
    let n = adj.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for attempt in 0..RESTARTS {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream(seed, &format!("hyperfinite/{attempt}")));
        let mut block = vec![usize::MAX; n];
        let mut size: Vec<usize> = Vec::new();
        let mut cursor = 0;
        let mut hint: Option<usize> = None;
        loop {
            let start = match hint.take() {
                Some(s) => s,
                None => {
                    while cursor < n && block[order[cursor]] != usize::MAX {
                        cursor += 1;
                    }
                    if cursor == n {
                        break;
                    }
                    order[cursor]
                }
            };
            let b = size.len();
            let mut members = vec![start];
            block[start] = b;
            let mut q = VecDeque::from([start]);
            'grow: while let Some(u) = q.pop_front() {
                for &w in &adj[u] {
                    if members.len() == k {
                        break 'grow;
                    }
                    let w = w as usize;
                    if block[w] == usize::MAX {
                        block[w] = b;
                        members.push(w);
                        q.push_back(w);
                    }
                }
            }
            size.push(members.len());
            hint = members
                .iter()
                .rev()
                .flat_map(|&u| adj[u].iter())
                .map(|&w| w as usize)
                .find(|&w| block[w] == usize::MAX);
        }
        loop {
            let mut improved = false;
            for &v in &order {
                let own = block[v];
                let mut links: BTreeMap<usize, usize> = BTreeMap::new();
                for &w in &adj[v] {
                    *links.entry(block[w as usize]).or_insert(0) += 1;
                }
                let stay = links.get(&own).copied().unwrap_or(0);
                let target = links
                    .iter()
                    .filter(|&(&b, &c)| b != own && size[b] < k && c > stay)
                    .max_by_key(|&(&b, &c)| (c, std::cmp::Reverse(b)));
                if let Some((&b, _)) = target {
                    size[own] -= 1;
                    size[b] += 1;
                    block[v] = b;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let c = cut(edges, &block);
        if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
            best = Some((c, block));
        }
    }
    best.map(|(_, b)| b).unwrap_or_default()
}

/// Branch and bound over block labels in canonical order.
fn exact(adj: &[Vec<u32>], edges: &[(u32, u32)], k: usize) -> Vec<usize> {
    let n = adj.len();
    let mut best = heuristic(adj, edges, k, 0);
    let mut best_cut = cut(edges, &best);
    let mut block = vec![usize::MAX; n];
    let mut size = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        v: usize,
        adj: &[Vec<u32>],
        k: usize,
        block: &mut Vec<usize>,
        size: &mut Vec<usize>,
        partial: usize,
        best: &mut Vec<usize>,
        best_cut: &mut usize,
    ) {
        if partial >= *best_cut {
            return;
        }
        if v == block.len() {
            *best_cut = partial;
            best.clone_from(block);
            return;
        }
        for b in 0..=size.len() {
            if b < size.len() && size[b] == k {
                continue;
            }
            if b == size.len() {
                size.push(0);
            }
            size[b] += 1;
            block[v] = b;
            let added = adj[v]
                .iter()
                .filter(|&&w| (w as usize) < v && block[w as usize] != b)
                .count();
            go(v + 1, adj, k, block, size, partial + added, best, best_cut);
            size[b] -= 1;
            if size[b] == 0 {
                size.pop();
            }
        }
        block[v] = usize::MAX;
    }
    go(
        0,
        adj,
        k,
        &mut block,
        &mut size,
        0,
        &mut best,
        &mut best_cut,
    );
    best
}
