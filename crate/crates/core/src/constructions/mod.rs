//! Example graph families: cycles, paths, grids, trees, the passage from an
//! edge-colored graph to a Schreier graph of involutions, cover towers, large
//! girth sequences and the nonexact recursion.

mod girth;
mod nonexact;
mod periodic;
mod ray;
mod tower;

use thiserror::Error;

use crate::gens::GeneratorSet;
use crate::graph::{FiniteGraph, GraphError, LazyGrid, LazyTree, Window};

pub use girth::{adjacency_diameter, girth, large_girth_sequence, random_cubic, GirthReport};
pub use nonexact::{build_nonexact, Attachment, Level, NonexactBuild, NonexactParams, BRIDGE};
pub use periodic::PeriodicColoredGrid;
pub use ray::{tree_ray_encoding, RayEncoding, BASE_COLORS};
pub use tower::{
    cycle_cover_tower, is_covering_map, voltage_z2_cover, voltage_z2_tower, CoverTower,
};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge coloring is not proper at vertex {vertex} (color {color})")]
    ImproperEdgeColoring { vertex: u32, color: usize },
    #[error("rejection budget exhausted: best girth {best_girth} below target {target}")]
    GirthBudget { best_girth: u32, target: u32 },
    #[error("size rule unsatisfiable at level {level}: need at least {required} vertices, have {available}")]
    SizeRule {
        level: usize,
        required: u64,
        available: u64,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// The cycle of length `n` with one generator `s` and its inverse `S`.
pub fn cycle(n: usize) -> FiniteGraph {
    assert!(n >= 1, "cycle needs at least one vertex");
    let mut b = FiniteGraph::builder(GeneratorSet::cyclic(), n);
    for v in 0..n as u32 {
        b.set(v, 0, (v + 1) % n as u32).expect("cycle table");
    }
    b.build().expect("cycle is a permutation")
}

/// Path or even cycle labeled by two alternating involutions `a0, a1`.
fn alternating(n: usize, closed: bool) -> FiniteGraph {
    let m = if closed { n } else { n - 1 };
    let edges: Vec<(u32, u32, usize)> = (0..m)
        .map(|i| (i as u32, ((i + 1) % n) as u32, i % 2))
        .collect();
    graph_to_involution_schreier(n, &edges, 2).expect("alternating coloring is proper")
}

/// The path on `n` vertices with alternating involution labels.
pub fn path(n: usize) -> FiniteGraph {
    assert!(n >= 1, "path needs at least one vertex");
    alternating(n, false)
}

/// The even cycle on `n` vertices with alternating involution labels; it
/// shares its generator set with [`path`].
pub fn involution_cycle(n: usize) -> FiniteGraph {
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "alternating cycle needs even length"
    );
    alternating(n, true)
}

/// The infinite grid together with the `w x h` window at the origin.
pub fn grid(w: i32, h: i32) -> (LazyGrid, Window) {
    (LazyGrid::new(None), Window::new(LazyGrid::rectangle(w, h)))
}

/// The `w x h` torus with the grid generators `x, X, y, Y`.
pub fn torus(w: usize, h: usize) -> FiniteGraph {
    let gens = LazyGrid::generators();
    let mut b = FiniteGraph::builder(gens, w * h);
    let id = |x: usize, y: usize| (y * w + x) as u32;
    for y in 0..h {
        for x in 0..w {
            b.set(id(x, y), 0, id((x + 1) % w, y)).expect("torus table");
            b.set(id(x, y), 2, id(x, (y + 1) % h)).expect("torus table");
        }
    }
    b.build().expect("torus is a permutation")
}

/// The `d`-regular tree, materialized to depth `depth`.
pub fn regular_tree(d: usize, depth: u32) -> LazyTree {
    LazyTree::new(d, depth)
}

/// Turn a simple graph with a proper edge `k`-coloring into a Schreier graph
/// of `k` involutions: color `i` swaps the endpoints of its edges and fixes
/// every vertex not touched by it.
pub fn graph_to_involution_schreier(
    n: usize,
    edges: &[(u32, u32, usize)],
    k: usize,
) -> Result<FiniteGraph, ConstructionError> {
    let mut b = FiniteGraph::builder(GeneratorSet::involutions(k), n);
    for &(u, v, c) in edges {
        if c >= k {
            return Err(ConstructionError::Parameter(format!(
                "edge color {c} exceeds {k}"
            )));
        }
        if u == v {
            return Err(ConstructionError::Parameter(format!("loop at {u}")));
        }
        for x in [u, v] {
            if b.is_set(x, c) {
                return Err(ConstructionError::ImproperEdgeColoring {
                    vertex: x,
                    color: c,
                });
            }
        }
        b.set(u, c, v)?;
    }
    Ok(b.build()?)
}
