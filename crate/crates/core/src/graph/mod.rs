//! Generator-labeled graphs: the [`GraphView`] trait, finite tables, lazily
//! generated infinite families, windows and breadth-first utilities.

mod finite;
mod format;
mod lazy;
mod window;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::gens::{Gen, GeneratorSet};

pub use finite::{FiniteGraph, FiniteGraphBuilder};
pub use format::{parse_graph, write_graph};
pub use lazy::{LazyGrid, LazyTree};
pub use window::{LocalGraph, Window};

/// Opaque vertex identifier.
pub type Vertex = u64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} lies outside the materialized region")]
    Unmaterialized(Vertex),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),
    #[error("Schreier determinism violated at vertex {vertex}, generator {generator}")]
    NotDeterministic { vertex: Vertex, generator: Gen },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ball of radius {radius} at vertex {vertex} is not contained in its parent ball")]
    SubBallOverflow { vertex: Vertex, radius: u32 },
    #[error("{0}")]
    Invalid(String),
}

/// A deterministic, locally finite, generator-labeled graph.
///
/// Every generator acts as a total function on vertices, and
/// `step(step(v, g), inverse(g)) == v`. Implementations must be pure: the
/// same query always returns the same answer.
pub trait GraphView: Sync {
    fn gens(&self) -> &GeneratorSet;

    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError>;

    fn color(&self, _v: Vertex) -> Option<u32> {
        None
    }

    fn is_colored(&self) -> bool {
        false
    }

    /// Fill `out` with the non-fixed moves of `v`, sorted by generator.
    fn moves_into(&self, v: Vertex, out: &mut Vec<(Gen, Vertex)>) -> Result<(), GraphError> {
        out.clear();
        for g in 0..self.gens().len() {
            let w = self.step(v, g)?;
            if w != v {
                out.push((g, w));
            }
        }
        Ok(())
    }

    fn moves(&self, v: Vertex) -> Result<Vec<(Gen, Vertex)>, GraphError> {
        let mut out = Vec::new();
        self.moves_into(v, &mut out)?;
        Ok(out)
    }

    /// All vertices, for finite views.
    fn finite_vertices(&self) -> Option<Vec<Vertex>> {
        None
    }
}

impl<T: GraphView + ?Sized> GraphView for &T {
    fn gens(&self) -> &GeneratorSet {
        (**self).gens()
    }
    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        (**self).step(v, g)
    }
    fn color(&self, v: Vertex) -> Option<u32> {
        (**self).color(v)
    }
    fn is_colored(&self) -> bool {
        (**self).is_colored()
    }
    fn moves_into(&self, v: Vertex, out: &mut Vec<(Gen, Vertex)>) -> Result<(), GraphError> {
        (**self).moves_into(v, out)
    }
    fn finite_vertices(&self) -> Option<Vec<Vertex>> {
        (**self).finite_vertices()
    }
}

/// Distinct neighbours of `v` in the underlying simple graph (loops dropped).
pub fn neighbors<V: GraphView + ?Sized>(view: &V, v: Vertex) -> Result<Vec<Vertex>, GraphError> {
    let mut out: Vec<Vertex> = view.moves(v)?.into_iter().map(|(_, w)| w).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Breadth-first distances from `sources` up to `max_radius`.
///
/// Returns vertices in BFS order together with their distance. When `within`
/// is given the search never leaves that window.
pub fn bfs<V: GraphView + ?Sized>(
    view: &V,
    sources: &[Vertex],
    max_radius: u32,
    within: Option<&Window>,
) -> Result<Vec<(Vertex, u32)>, GraphError> {
    let mut dist: HashMap<Vertex, u32> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
            order.push((s, 0));
        }
    }
    let mut buf = Vec::new();
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == max_radius {
            continue;
        }
        view.moves_into(u, &mut buf)?;
        for &(_, w) in &buf {
            if let Some(win) = within {
                if !win.contains(w) {
                    continue;
                }
            }
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                order.push((w, d + 1));
                queue.push_back(w);
            }
        }
    }
    Ok(order)
}

/// Vertices of the ball of radius `r` around `v`, in BFS order.
pub fn ball_vertices<V: GraphView + ?Sized>(
    view: &V,
    v: Vertex,
    r: u32,
) -> Result<Vec<Vertex>, GraphError> {
    Ok(bfs(view, &[v], r, None)?
        .into_iter()
        .map(|(w, _)| w)
        .collect())
}

/// Graph distance between two vertices, searching at most `max_radius`.
pub fn distance<V: GraphView + ?Sized>(
    view: &V,
    a: Vertex,
    b: Vertex,
    max_radius: u32,
) -> Result<Option<u32>, GraphError> {
    Ok(bfs(view, &[a], max_radius, None)?
        .into_iter()
        .find(|&(w, _)| w == b)
        .map(|(_, d)| d))
}

/// Check `step(step(v, g), inverse(g)) == v` on the given vertices.
pub fn check_determinism<V: GraphView + ?Sized>(
    view: &V,
    vertices: &[Vertex],
) -> Result<(), GraphError> {
    let gens = view.gens();
    for &v in vertices {
        for g in 0..gens.len() {
            let w = view.step(v, g)?;
            if view.step(w, gens.inverse(g))? != v {
                return Err(GraphError::NotDeterministic {
                    vertex: v,
                    generator: g,
                });
            }
        }
    }
    Ok(())
}

/// Whether the finite view is connected.
pub fn is_connected<V: GraphView + ?Sized>(view: &V) -> Result<bool, GraphError> {
    let all = view
        .finite_vertices()
        .ok_or_else(|| GraphError::Invalid("connectivity needs a finite view".into()))?;
    if all.is_empty() {
        return Ok(true);
    }
    Ok(bfs(view, &all[..1], u32::MAX, None)?.len() == all.len())
}

/// Eccentricity-based diameter of a finite connected view.
pub fn diameter<V: GraphView + ?Sized>(view: &V) -> Result<u32, GraphError> {
    let all = view
        .finite_vertices()
        .ok_or_else(|| GraphError::Invalid("diameter needs a finite view".into()))?;
    let mut diam = 0;
    for &v in &all {
        let order = bfs(view, &[v], u32::MAX, None)?;
        if order.len() != all.len() {
            return Err(GraphError::Disconnected);
        }
        diam = diam.max(order.last().map(|&(_, d)| d).unwrap_or(0));
    }
    Ok(diam)
}
