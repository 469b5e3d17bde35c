use std::collections::{BTreeSet, HashMap};

use super::{graph_to_involution_schreier, ConstructionError};
use crate::graph::{bfs, FiniteGraph, GraphError, GraphView, LazyTree, Vertex, Window};

/// The 3-regular tree with an edge coloring that encodes the map `phi`
/// sending each vertex one step towards the ray `x_i = (a0 a1 a0 ...)`
/// (prefix of length `i`).
///
/// The base color of an edge records the depth of its lower endpoint mod 8
/// and its last two letters; edges closer than 3 never share it. Each edge
/// `(a, phi(a))` is then recolored by the pair of base colors of
/// `(a, phi(a))` and `(phi(a), phi(phi(a)))`.
#[derive(Clone, Debug)]
pub struct RayEncoding {
    tree: LazyTree,
}

/// Base edge colors lie in `0..BASE_COLORS`.
pub const BASE_COLORS: u32 = 128;

pub fn tree_ray_encoding(depth: u32) -> Result<RayEncoding, ConstructionError> {
    if !(3..=31).contains(&depth) {
        return Err(ConstructionError::Parameter(format!(
            "ray encoding depth {depth} not in 3..=31"
        )));
    }
    Ok(RayEncoding {
        tree: LazyTree::new(3, depth),
    })
}

fn on_ray(v: Vertex) -> bool {
    LazyTree::word(v)
        .iter()
        .enumerate()
        .all(|(i, &g)| g == i % 2)
}

impl RayEncoding {
    pub fn tree(&self) -> &LazyTree {
        &self.tree
    }

    /// Ray vertex `x_i`.
    pub fn ray(&self, i: u32) -> Vertex {
        let word: Vec<usize> = (0..i as usize).map(|j| j % 2).collect();
        LazyTree::from_word(&word)
    }

    /// The next vertex towards the ray, from the vertex names.
    pub fn phi(&self, v: Vertex) -> Vertex {
        if on_ray(v) {
            (v << 2) | (LazyTree::depth(v) % 2) as u64
        } else {
            LazyTree::parent(v).expect("root is on the ray")
        }
    }

    /// Base color of the edge `{u, v}`.
    pub fn base_color(&self, u: Vertex, v: Vertex) -> u32 {
        let child = if LazyTree::parent(u) == Some(v) { u } else { v };
        let d = LazyTree::depth(child);
        let last = (child & 3) as u32;
        let prev = if d >= 2 { ((child >> 2) & 3) as u32 } else { 3 };
        (d % 8) * 16 + prev * 4 + last
    }

    /// Color of the edge `{u, v}` after recoloring.
    pub fn color(&self, u: Vertex, v: Vertex) -> (u32, u32) {
        let (a, b) = if self.phi(u) == v { (u, v) } else { (v, u) };
        (self.base_color(a, b), self.base_color(b, self.phi(b)))
    }

    /// Vertices whose decoding stays inside the materialized tree.
    pub fn is_interior(&self, v: Vertex) -> bool {
        LazyTree::depth(v) + 3 <= self.tree.depth_limit()
    }

    /// Recover `phi(t)` from the colors of the edges at `t` alone: the
    /// outgoing edge is the one whose first component is the second
    /// component of every other edge.
    pub fn decode(&self, t: Vertex) -> Result<Vertex, GraphError> {
        let nbrs: Vec<(Vertex, (u32, u32))> = (0..3)
            .map(|g| self.tree.step(t, g).map(|w| (w, self.color(t, w))))
            .collect::<Result<_, _>>()?;
        let hits: Vec<Vertex> = nbrs
            .iter()
            .filter(|(w, c)| nbrs.iter().all(|(w2, c2)| w2 == w || c2.1 == c.0))
            .map(|&(w, _)| w)
            .collect();
        match hits[..] {
            [w] => Ok(w),
            _ => Err(GraphError::Invalid(format!(
                "ambiguous ray decoding at {t}"
            ))),
        }
    }

    /// The tree ball of radius `depth` at the root.
    pub fn window(&self, depth: u32) -> Window {
        Window::new(self.tree.ball(depth))
    }

    /// Pairs of distinct edges of the window at distance below 3 sharing a
    /// base color.
    pub fn base_conflicts(&self, depth: u32) -> Result<usize, GraphError> {
        let w = self.window(depth);
        let mut conflicts = 0;
        for v in w.iter().filter(|&v| v != LazyTree::root()) {
            let p = LazyTree::parent(v).expect("non-root");
            let c = self.base_color(v, p);
            let mut near = BTreeSet::new();
            for (x, _) in bfs(&self.tree, &[v, p], 2, None)? {
                if let Some(px) = LazyTree::parent(x) {
                    near.insert((x, px));
                }
                for g in 0..3 {
                    if let Ok(y) = self.tree.step(x, g) {
                        if LazyTree::parent(y) == Some(x) {
                            near.insert((y, x));
                        }
                    }
                }
            }
            conflicts += near
                .iter()
                .filter(|&&(a, b)| a != v && self.base_color(a, b) == c)
                .count();
        }
        Ok(conflicts)
    }

    /// The window as a Schreier graph of involutions, one per recolored
    /// label (optionally times a second edge label). Vertex `i` is the
    /// `i`-th window vertex.
    pub fn labeled_window(
        &self,
        depth: u32,
        extra: Option<&dyn Fn(Vertex, Vertex) -> u32>,
    ) -> Result<(FiniteGraph, Window), ConstructionError> {
        let w = self.window(depth);
        let mut raw = Vec::new();
        for (i, v) in w.iter().enumerate() {
            if let Some(p) = LazyTree::parent(v) {
                let (a, b) = self.color(v, p);
                let e = extra.map_or(0, |f| f(v, p));
                raw.push((
                    i as u32,
                    w.index_of(p).expect("parent in ball") as u32,
                    (a, b, e),
                ));
            }
        }
        let mut ids: Vec<(u32, u32, u32)> = raw.iter().map(|r| r.2).collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<(u32, u32, u32), usize> =
            ids.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let edges: Vec<(u32, u32, usize)> =
            raw.iter().map(|&(u, v, l)| (u, v, index[&l])).collect();
        Ok((graph_to_involution_schreier(w.len(), &edges, ids.len())?, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_follows_the_ray() {
        let e = tree_ray_encoding(12).unwrap();
        for i in 0..8 {
            assert_eq!(e.phi(e.ray(i)), e.ray(i + 1));
        }
        let off = LazyTree::from_word(&[2, 0, 1]);
        assert_eq!(e.phi(off), LazyTree::from_word(&[2, 0]));
    }

    #[test]
    fn decoder_recovers_phi() {
        let e = tree_ray_encoding(12).unwrap();
        let w = e.window(9);
        for v in w.iter() {
            assert_eq!(e.decode(v).unwrap(), e.phi(v));
        }
    }

    #[test]
    fn base_coloring_separates_close_edges() {
        let e = tree_ray_encoding(10).unwrap();
        assert_eq!(e.base_conflicts(7).unwrap(), 0);
    }

    #[test]
    fn labeled_window_is_proper() {
        let e = tree_ray_encoding(8).unwrap();
        let (g, w) = e.labeled_window(5, None).unwrap();
        assert_eq!(g.len(), w.len());
        assert_eq!(g.simple_edges().len(), w.len() - 1);
    }
}
