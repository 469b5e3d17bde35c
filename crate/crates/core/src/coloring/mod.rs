//! Nonrepetitive colorings and the colorings derived from them.

mod compression;
mod format;
mod genericity;

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gens::{Gen, GeneratorSet};
use crate::graph::{bfs, neighbors, GraphError, GraphView, LocalGraph, Vertex, Window};

pub use compression::{
    compression_coloring, decode_compression, CompressionColoring, DoublingMaps, STAR,
};
pub use format::{parse_coloring, write_coloring};
pub use genericity::{decode_vertex_colors, genericity_product_coloring, ProductLabel};

#[derive(Debug, Error)]
pub enum ColoringError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("resample budget exhausted after {resamples} resamples")]
    BudgetExhausted {
        best: Box<Coloring>,
        witness: RepetitionWitness,
        resamples: u64,
    },
    #[error("coloring is not proper: vertices {0} and {1} are adjacent with equal colors")]
    NotProper(Vertex, Vertex),
    #[error("vertex {0} is not colored")]
    Uncolored(Vertex),
    #[error("{0}")]
    Invalid(String),
    #[error("injectivity violated: {0} has two preimages")]
    NotInjective(Vertex),
    #[error("decoding failed at {vertex}: {candidates} candidates")]
    Decode { vertex: Vertex, candidates: usize },
}

/// A vertex coloring of a finite domain inside some view.
///
/// The verification metadata can only be set by the `verify_*` methods.
#[derive(Clone, Debug, PartialEq)]
pub struct Coloring {
    domain: Window,
    colors: Vec<u32>,
    alphabet: u32,
    nonrepetitive_up_to: Option<u32>,
    proper_at_distance: Option<u32>,
}

impl Coloring {
    pub fn new(domain: Window, colors: Vec<u32>, alphabet: u32) -> Result<Self, ColoringError> {
        if colors.len() != domain.len() {
            return Err(ColoringError::Invalid(
                "one color per domain vertex required".into(),
            ));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= alphabet) {
            return Err(ColoringError::Invalid(format!(
                "color {c} outside alphabet of size {alphabet}"
            )));
        }
        Ok(Self {
            domain,
            colors,
            alphabet,
            nonrepetitive_up_to: None,
            proper_at_distance: None,
        })
    }

    pub fn from_fn(
        domain: Window,
        alphabet: u32,
        f: impl Fn(Vertex) -> u32,
    ) -> Result<Self, ColoringError> {
        let colors = domain.iter().map(f).collect();
        Self::new(domain, colors, alphabet)
    }

    pub fn get(&self, v: Vertex) -> Option<u32> {
        self.domain.index_of(v).map(|i| self.colors[i])
    }

    pub fn domain(&self) -> &Window {
        &self.domain
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn nonrepetitive_up_to(&self) -> Option<u32> {
        self.nonrepetitive_up_to
    }

    pub fn proper_at_distance(&self) -> Option<u32> {
        self.proper_at_distance
    }

    pub(crate) fn set_metadata(&mut self, nonrep: Option<u32>, proper: Option<u32>) {
        self.nonrepetitive_up_to = nonrep;
        self.proper_at_distance = proper;
    }

    /// Search the whole domain for repetitions of half-length at most
    /// `n_max`; records the scale when none is found.
    pub fn verify_nonrepetitive<V: GraphView + ?Sized>(
        &mut self,
        view: &V,
        n_max: u32,
    ) -> Result<Option<RepetitionWitness>, ColoringError> {
        let w = find_repetitive_path(view, self, self.domain(), n_max)?;
        if w.is_none() {
            self.nonrepetitive_up_to =
                Some(self.nonrepetitive_up_to.map_or(n_max, |m| m.max(n_max)));
        }
        Ok(w)
    }

    /// Check that domain vertices at distance `1..=d` get distinct colors;
    /// returns the first offending pair.
    pub fn verify_proper<V: GraphView + ?Sized>(
        &mut self,
        view: &V,
        d: u32,
    ) -> Result<Option<(Vertex, Vertex)>, ColoringError> {
        for (i, v) in self.domain.iter().enumerate() {
            for (w, dist) in bfs(view, &[v], d, None)? {
                if dist > 0 && self.get(w) == Some(self.colors[i]) {
                    return Ok(Some((v, w)));
                }
            }
        }
        self.proper_at_distance = Some(self.proper_at_distance.map_or(d, |m| m.max(d)));
        Ok(None)
    }
}

/// A view whose vertex colors come from a [`Coloring`].
pub struct ColoredView<'a, V: ?Sized> {
    pub view: &'a V,
    pub coloring: &'a Coloring,
}

impl<'a, V: GraphView + ?Sized> ColoredView<'a, V> {
    pub fn new(view: &'a V, coloring: &'a Coloring) -> Self {
        Self { view, coloring }
    }
}

impl<V: GraphView + ?Sized> GraphView for ColoredView<'_, V> {
    fn gens(&self) -> &GeneratorSet {
        self.view.gens()
    }
    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        self.view.step(v, g)
    }
    fn color(&self, v: Vertex) -> Option<u32> {
        self.coloring.get(v)
    }
    fn is_colored(&self) -> bool {
        true
    }
    fn moves_into(&self, v: Vertex, out: &mut Vec<(Gen, Vertex)>) -> Result<(), GraphError> {
        self.view.moves_into(v, out)
    }
    fn finite_vertices(&self) -> Option<Vec<Vertex>> {
        self.view.finite_vertices()
    }
}

/// A path `x_1 .. x_{2n}` whose two halves carry the same colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepetitionWitness {
    pub path: Vec<Vertex>,
    pub n: usize,
}

/// Check a witness directly: adjacency, distinct vertices, equal halves.
pub fn verify_witness<V: GraphView + ?Sized>(
    view: &V,
    color: impl Fn(Vertex) -> Option<u32>,
    w: &RepetitionWitness,
) -> Result<bool, GraphError> {
    if w.n == 0 || w.path.len() != 2 * w.n {
        return Ok(false);
    }
    for pair in w.path.windows(2) {
        if pair[0] == pair[1] || !neighbors(view, pair[0])?.contains(&pair[1]) {
            return Ok(false);
        }
    }
    let mut sorted = w.path.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != w.path.len() {
        return Ok(false);
    }
    for i in 0..w.n {
        match (color(w.path[i]), color(w.path[w.n + i])) {
            (Some(a), Some(b)) if a == b => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Extend `path` to a repetitive path of `2n` vertices, if possible.
fn extend_repetitive(adj: &[Vec<u32>], colors: &[u32], path: &mut Vec<u32>, n: usize) -> bool {
    let len = path.len();
    if len == 2 * n {
        return true;
    }
    let last = path[len - 1] as usize;
    for &w in &adj[last] {
        if path.contains(&w) {
            continue;
        }
        if len >= n && colors[w as usize] != colors[path[len - n] as usize] {
            continue;
        }
        path.push(w);
        if extend_repetitive(adj, colors, path, n) {
            return true;
        }
        path.pop();
    }
    false
}

fn repetition_from(adj: &[Vec<u32>], colors: &[u32], s: u32, n: usize) -> Option<Vec<u32>> {
    let mut path = Vec::with_capacity(2 * n);
    path.push(s);
    extend_repetitive(adj, colors, &mut path, n).then_some(path)
}

fn local_colors(lg: &LocalGraph, coloring: &Coloring) -> Result<Vec<u32>, ColoringError> {
    lg.window
        .iter()
        .map(|v| coloring.get(v).ok_or(ColoringError::Uncolored(v)))
        .collect()
}

/// Shortest repetitive path starting in `window`, exploring simple paths
/// inside the colored domain. Among shortest witnesses the one with the
/// earliest start (in window order) is returned.
pub fn find_repetitive_path<V: GraphView + ?Sized>(
    view: &V,
    coloring: &Coloring,
    window: &Window,
    n_max: u32,
) -> Result<Option<RepetitionWitness>, ColoringError> {
    let lg = LocalGraph::induced(view, coloring.domain().clone())?;
    let colors = local_colors(&lg, coloring)?;
    let starts: Vec<u32> = window
        .iter()
        .map(|v| {
            lg.window
                .index_of(v)
                .map(|i| i as u32)
                .ok_or(ColoringError::Uncolored(v))
        })
        .collect::<Result<_, _>>()?;
    for n in 1..=n_max as usize {
        let hit = starts
            .par_iter()
            .find_map_first(|&s| repetition_from(&lg.adj, &colors, s, n));
        if let Some(p) = hit {
            return Ok(Some(RepetitionWitness {
                path: p
                    .iter()
                    .map(|&i| lg.window.vertices()[i as usize])
                    .collect(),
                n,
            }));
        }
    }
    Ok(None)
}

/// `ceil(2 d^2 e^16)`, the alphabet size that the local lemma guarantees to
/// admit a nonrepetitive coloring of any graph of maximum degree `d`.
pub fn lll_alphabet_bound(d: u64) -> u64 {
    assert!(d >= 1, "degree bound must be positive");
    // e^16 as a fixed-point sum of 16^k / k!, truncated downwards
    const SCALE: u128 = 100_000_000_000_000_000_000;
    let mut term = SCALE;
    let mut sum = SCALE;
    for k in 1..200u128 {
        term = term * 16 / k;
        if term == 0 {
            break;
        }
        sum += term;
    }
    // truncation error is below 10^7 units of the scale
    let lo = sum;
    let hi = sum + 10_000_000;
    let m = 2 * (d as u128) * (d as u128);
    let ceil = |x: u128| (m * x).div_ceil(SCALE);
    let (a, b) = (ceil(lo), ceil(hi));
    assert_eq!(a, b, "fixed-point precision insufficient for d = {d}");
    u64::try_from(a).expect("bound fits in u64")
}

/// Limits on a resampling run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_resamples: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn resamples(n: u64) -> Self {
        Self {
            max_resamples: Some(n),
            deadline: None,
        }
    }

    fn exhausted(&self, done: u64) -> bool {
        self.max_resamples.is_some_and(|m| done >= m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Moser-Tardos resampling over the events "this path of `2n <= 2 n_max`
/// vertices is repetitive", restricted to paths inside `window`.
///
/// Deterministic for a given seed unless a deadline fires.
pub fn nonrepetitive_color<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    k: u32,
    n_max: u32,
    seed: u64,
    budget: Budget,
) -> Result<Coloring, ColoringError> {
    if k == 0 {
        return Err(ColoringError::Invalid("alphabet must be nonempty".into()));
    }
    let lg = LocalGraph::induced(view, window.clone())?;
    let n = lg.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut queued = vec![true; n];
    let mut queue: VecDeque<u32> = (0..n as u32).collect();
    let reach = (2 * n_max).saturating_sub(1);
    let mut resamples = 0u64;
    while let Some(s) = queue.pop_front() {
        queued[s as usize] = false;
        let found = (1..=n_max as usize).find_map(|m| repetition_from(&lg.adj, &colors, s, m));
        let Some(path) = found else { continue };
        if budget.exhausted(resamples) {
            let mut best = Coloring::new(lg.window.clone(), colors, k)?;
            best.set_metadata(None, None);
            return Err(ColoringError::BudgetExhausted {
                best: Box::new(best),
                witness: RepetitionWitness {
                    n: path.len() / 2,
                    path: path
                        .iter()
                        .map(|&i| lg.window.vertices()[i as usize])
                        .collect(),
                },
                resamples,
            });
        }
        resamples += 1;
        for &u in &path {
            colors[u as usize] = rng.gen_range(0..k);
        }
        let mut touched = vec![false; n];
        let mut frontier: VecDeque<(u32, u32)> = VecDeque::new();
        for &u in &path {
            if !touched[u as usize] {
                touched[u as usize] = true;
                frontier.push_back((u, 0));
            }
        }
        while let Some((u, d)) = frontier.pop_front() {
            if !queued[u as usize] {
                queued[u as usize] = true;
                queue.push_back(u);
            }
            if d < reach {
                for &w in &lg.adj[u as usize] {
                    if !touched[w as usize] {
                        touched[w as usize] = true;
                        frontier.push_back((w, d + 1));
                    }
                }
            }
        }
        if !queued[s as usize] {
            queued[s as usize] = true;
            queue.push_back(s);
        }
    }
    let mut out = Coloring::new(lg.window.clone(), colors, k)?;
    if let Some(w) = out.verify_nonrepetitive(view, n_max)? {
        return Err(ColoringError::Invalid(format!(
            "resampling finished but a repetition survives: {:?}",
            w.path
        )));
    }
    Ok(out)
}

/// Greedy coloring of the `d`-th power: window vertices in BFS order from
/// the first window vertex (then from each unreached one) take the least
/// color unused by window vertices at distance `1..=d`.
pub fn distance_proper_coloring<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    d: u32,
) -> Result<Coloring, ColoringError> {
    let lg = LocalGraph::induced_lenient(view, window.clone());
    let mut order = Vec::with_capacity(window.len());
    let mut seen = vec![false; window.len()];
    for s in 0..window.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &w in &lg.adj[u] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    q.push_back(w as usize);
                }
            }
        }
    }
    let mut colors: Vec<Option<u32>> = vec![None; window.len()];
    let mut used = Vec::new();
    for u in order {
        used.clear();
        for (w, dist) in bfs(view, &[window.vertices()[u]], d, None)? {
            if dist == 0 {
                continue;
            }
            if let Some(c) = window.index_of(w).and_then(|j| colors[j]) {
                used.push(c);
            }
        }
        used.sort_unstable();
        used.dedup();
        let c = (0u32..)
            .find(|c| used.binary_search(c).is_err())
            .expect("free color");
        colors[u] = Some(c);
    }
    let colors: Vec<u32> = colors
        .into_iter()
        .map(|c| c.expect("every vertex colored"))
        .collect();
    let alphabet = colors.iter().max().map_or(1, |m| m + 1);
    let mut out = Coloring::new(window.clone(), colors, alphabet)?;
    if let Some((a, b)) = out.verify_proper(view, d)? {
        return Err(ColoringError::NotProper(a, b));
    }
    Ok(out)
}

/// The repetitive path forced by a nontrivial colored-labeled automorphism
/// `theta` of a finite connected view: take `a` moving least, a shortest
/// path `a -> theta(a)` with labels `k_1..k_n`, and keep reading the labels
/// `k_1..k_{n-1}` from `theta(a)`. The second half is the image of the
/// first, so both halves carry the same colors.
pub fn path_doubling_witness<V: GraphView + ?Sized>(
    view: &V,
    theta: &[(Vertex, Vertex)],
) -> Result<RepetitionWitness, ColoringError> {
    let map: HashMap<Vertex, Vertex> = theta.iter().copied().collect();
    let mut best: Option<(u32, Vertex)> = None;
    for &(a, b) in theta {
        if a == b {
            continue;
        }
        let cap = best.map_or(u32::MAX, |(d, _)| d);
        let order = bfs(view, &[a], cap, None)?;
        if let Some(&(_, d)) = order.iter().find(|&&(w, _)| w == b) {
            if best.is_none_or(|(bd, ba)| d < bd || (d == bd && a < ba)) {
                best = Some((d, a));
            }
        }
    }
    let (n, a) =
        best.ok_or_else(|| ColoringError::Invalid("automorphism fixes every vertex".into()))?;
    let target = map[&a];
    // shortest labeled path a -> theta(a)
    let mut parent: HashMap<Vertex, (Vertex, Gen)> = HashMap::new();
    let mut q = VecDeque::from([a]);
    let mut seen = HashMap::from([(a, ())]);
    let mut buf = Vec::new();
    while let Some(u) = q.pop_front() {
        if u == target {
            break;
        }
        view.moves_into(u, &mut buf)?;
        for &(g, w) in &buf {
            if seen.insert(w, ()).is_none() {
                parent.insert(w, (u, g));
                q.push_back(w);
            }
        }
    }
    let mut labels = Vec::new();
    let mut cur = target;
    while cur != a {
        let (p, g) = parent[&cur];
        labels.push(g);
        cur = p;
    }
    labels.reverse();
    debug_assert_eq!(labels.len() as u32, n);
    let mut path = vec![a];
    for &g in &labels {
        path.push(view.step(*path.last().unwrap(), g)?);
    }
    for &g in &labels[..labels.len() - 1] {
        path.push(view.step(*path.last().unwrap(), g)?);
    }
    Ok(RepetitionWitness {
        n: labels.len(),
        path,
    })
}
