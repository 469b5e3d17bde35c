use std::collections::{HashMap, VecDeque};

use super::{GraphError, GraphView, Vertex};

/// A finite vertex set of some view, with a stable index order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Window {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
}

impl Window {
    /// Duplicates are dropped; first occurrence fixes the index.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut w = Self::default();
        for v in vertices {
            if !w.index.contains_key(&v) {
                w.index.insert(v, w.vertices.len());
                w.vertices.push(v);
            }
        }
        w
    }

    /// All vertices of a finite view.
    pub fn all<V: GraphView + ?Sized>(view: &V) -> Result<Self, GraphError> {
        view.finite_vertices()
            .map(Self::new)
            .ok_or_else(|| GraphError::Invalid("view is not finite".into()))
    }

    /// The ball of radius `r` around `v`, in BFS order.
    pub fn ball<V: GraphView + ?Sized>(view: &V, v: Vertex, r: u32) -> Result<Self, GraphError> {
        super::ball_vertices(view, v, r).map(Self::new)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    /// For each window vertex, how far it sits from the outside: `0` when
    /// some move leaves the window (or cannot be materialized), otherwise
    /// the in-window distance to such a vertex. `u32::MAX` means no exit is
    /// reachable. A vertex with depth `d` has its `d`-ball inside the window.
    pub fn collar_depth<V: GraphView + ?Sized>(&self, view: &V) -> Vec<u32> {
        let n = self.len();
        let mut depth = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut buf = Vec::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            let mut exits = false;
            match view.moves_into(v, &mut buf) {
                Ok(()) => {
                    for &(_, w) in &buf {
                        match self.index_of(w) {
                            Some(j) => nbrs[i].push(j),
                            None => exits = true,
                        }
                    }
                }
                Err(_) => exits = true,
            }
            if exits {
                depth[i] = 0;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &j in &nbrs[i] {
                if depth[j] == u32::MAX {
                    depth[j] = depth[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        depth
    }

    /// Window vertices whose `margin`-ball lies inside the window.
    pub fn interior<V: GraphView + ?Sized>(&self, view: &V, margin: u32) -> Vec<Vertex> {
        self.collar_depth(view)
            .iter()
            .zip(&self.vertices)
            .filter(|(&d, _)| d >= margin)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// The simple graph induced on a window, in window indices.
#[derive(Clone, Debug)]
pub struct LocalGraph {
    pub window: Window,
    pub adj: Vec<Vec<u32>>,
}

impl LocalGraph {
    /// Edges leaving the window are dropped; moves that cannot be
    /// materialized are an error.
    pub fn induced<V: GraphView + ?Sized>(view: &V, window: Window) -> Result<Self, GraphError> {
        let mut adj = Vec::with_capacity(window.len());
        let mut buf = Vec::new();
        for v in window.iter() {
            view.moves_into(v, &mut buf)?;
            let mut row: Vec<u32> = buf
                .iter()
                .filter_map(|&(_, w)| window.index_of(w).map(|j| j as u32))
                .collect();
            row.sort_unstable();
            row.dedup();
            adj.push(row);
        }
        Ok(Self { window, adj })
    }

    /// Like [`LocalGraph::induced`] but tolerates unmaterialized moves.
    pub fn induced_lenient<V: GraphView + ?Sized>(view: &V, window: Window) -> Self {
        let mut adj = Vec::with_capacity(window.len());
        for v in window.iter() {
            let mut row: Vec<u32> = (0..view.gens().len())
                .filter_map(|g| view.step(v, g).ok())
                .filter(|&w| w != v)
                .filter_map(|w| window.index_of(w).map(|j| j as u32))
                .collect();
            row.sort_unstable();
            row.dedup();
            adj.push(row);
        }
        Self { window, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// BFS distances from index `s`, capped at `max`.
    pub fn distances_from(&self, s: usize, max: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == max {
                continue;
            }
            for &w in &self.adj[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}
