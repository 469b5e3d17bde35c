use std::collections::BTreeSet;

use super::{GraphError, GraphView, Vertex};
use crate::gens::{Gen, GeneratorSet};

/// A finite Schreier graph stored as sparse per-vertex move lists.
///
/// Vertices are `0..n`. Fixed points are implicit: a generator missing from
/// a vertex's move list fixes that vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGraph {
    gens: GeneratorSet,
    moves: Vec<Vec<(u16, u32)>>,
    colors: Option<Vec<u32>>,
    ids: Option<Vec<u64>>,
}

impl FiniteGraph {
    pub fn builder(gens: GeneratorSet, n: usize) -> FiniteGraphBuilder {
        FiniteGraphBuilder {
            gens,
            table: vec![Vec::new(); n],
        }
    }

    /// Build from a dense table `table[v][g]`.
    pub fn from_table(gens: GeneratorSet, table: &[Vec<u32>]) -> Result<Self, GraphError> {
        let mut b = Self::builder(gens.clone(), table.len());
        for (v, row) in table.iter().enumerate() {
            if row.len() != gens.len() {
                return Err(GraphError::Invalid(format!("row {v} has wrong length")));
            }
            for (g, &w) in row.iter().enumerate() {
                b.set_one(v as u32, g, w)?;
            }
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self, GraphError> {
        if colors.len() != self.len() {
            return Err(GraphError::Invalid("color vector has wrong length".into()));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn without_colors(mut self) -> Self {
        self.colors = None;
        self
    }

    /// External identifiers used by the text format (defaults to indices).
    pub fn external_id(&self, v: usize) -> u64 {
        self.ids.as_ref().map_or(v as u64, |ids| ids[v])
    }

    pub(crate) fn set_ids(&mut self, ids: Vec<u64>) {
        self.ids = Some(ids);
    }

    /// Non-fixed moves of vertex `v`, sorted by generator.
    pub fn raw_moves(&self, v: usize) -> &[(u16, u32)] {
        &self.moves[v]
    }

    /// Edges of the underlying simple graph as sorted pairs `(u, v)`, `u < v`.
    pub fn simple_edges(&self) -> Vec<(u32, u32)> {
        let mut set = BTreeSet::new();
        for (u, mv) in self.moves.iter().enumerate() {
            for &(_, w) in mv {
                let (a, b) = (u as u32, w);
                if a != b {
                    set.insert((a.min(b), a.max(b)));
                }
            }
        }
        set.into_iter().collect()
    }

    /// Adjacency lists of the underlying simple graph.
    pub fn simple_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (a, b) in self.simple_edges() {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.simple_adjacency()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Relabel vertices: new vertex `perm[v]` plays the role of old `v`.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        let n = self.len();
        let mut moves = vec![Vec::new(); n];
        for v in 0..n {
            let mut mv: Vec<(u16, u32)> = self.moves[v]
                .iter()
                .map(|&(g, w)| (g, perm[w as usize]))
                .collect();
            mv.sort_unstable();
            moves[perm[v] as usize] = mv;
        }
        let colors = self.colors.as_ref().map(|c| {
            let mut out = vec![0; n];
            for v in 0..n {
                out[perm[v] as usize] = c[v];
            }
            out
        });
        Self {
            gens: self.gens.clone(),
            moves,
            colors,
            ids: None,
        }
    }

    /// Disjoint union; vertices of `other` are shifted by `self.len()`.
    pub fn disjoint_union(&self, other: &FiniteGraph) -> Result<Self, GraphError> {
        if self.gens != other.gens {
            return Err(GraphError::InvalidGenerators(
                "union of different generator sets".into(),
            ));
        }
        let off = self.len() as u32;
        let mut moves = self.moves.clone();
        moves.extend(
            other
                .moves
                .iter()
                .map(|mv| mv.iter().map(|&(g, w)| (g, w + off)).collect::<Vec<_>>()),
        );
        let colors = match (&self.colors, &other.colors) {
            (None, None) => None,
            (a, b) => {
                let mut c = a.clone().unwrap_or_else(|| vec![0; self.len()]);
                c.extend(b.clone().unwrap_or_else(|| vec![0; other.len()]));
                Some(c)
            }
        };
        Ok(Self {
            gens: self.gens.clone(),
            moves,
            colors,
            ids: None,
        })
    }

    /// Same vertex set and moves over a larger generator set. `map[g]` is the
    /// index of old generator `g` in `gens`; new generators act trivially.
    pub fn extend_generators(&self, gens: GeneratorSet, map: &[Gen]) -> Result<Self, GraphError> {
        for (g, &h) in map.iter().enumerate() {
            if gens.inverse(h) != map[self.gens.inverse(g)] {
                return Err(GraphError::InvalidGenerators(
                    "generator map breaks pairing".into(),
                ));
            }
        }
        let moves = self
            .moves
            .iter()
            .map(|mv| {
                let mut m: Vec<(u16, u32)> = mv
                    .iter()
                    .map(|&(g, w)| (map[g as usize] as u16, w))
                    .collect();
                m.sort_unstable();
                m
            })
            .collect();
        Ok(Self {
            gens,
            moves,
            colors: self.colors.clone(),
            ids: None,
        })
    }
}

impl GraphView for FiniteGraph {
    fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        let mv = self
            .moves
            .get(v as usize)
            .ok_or(GraphError::UnknownVertex(v))?;
        Ok(match mv.binary_search_by_key(&(g as u16), |&(h, _)| h) {
            Ok(i) => mv[i].1 as Vertex,
            Err(_) => v,
        })
    }

    fn color(&self, v: Vertex) -> Option<u32> {
        self.colors.as_ref().map(|c| c[v as usize])
    }

    fn is_colored(&self) -> bool {
        self.colors.is_some()
    }

    fn moves_into(&self, v: Vertex, out: &mut Vec<(Gen, Vertex)>) -> Result<(), GraphError> {
        let mv = self
            .moves
            .get(v as usize)
            .ok_or(GraphError::UnknownVertex(v))?;
        out.clear();
        out.extend(mv.iter().map(|&(g, w)| (g as Gen, w as Vertex)));
        Ok(())
    }

    fn finite_vertices(&self) -> Option<Vec<Vertex>> {
        Some((0..self.len() as Vertex).collect())
    }
}

/// Incremental construction of a [`FiniteGraph`]; every `set` also records
/// the inverse move.
pub struct FiniteGraphBuilder {
    gens: GeneratorSet,
    table: Vec<Vec<(u16, u32)>>,
}

impl FiniteGraphBuilder {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn add_vertex(&mut self) -> u32 {
        self.table.push(Vec::new());
        (self.table.len() - 1) as u32
    }

    pub fn get(&self, v: u32, g: Gen) -> u32 {
        self.table[v as usize]
            .iter()
            .find(|&&(h, _)| h as usize == g)
            .map_or(v, |&(_, w)| w)
    }

    /// Whether `g` has an explicit (possibly fixed-point) assignment at `v`.
    pub fn is_set(&self, v: u32, g: Gen) -> bool {
        self.table[v as usize].iter().any(|&(h, _)| h as usize == g)
    }

    pub(crate) fn set_one(&mut self, v: u32, g: Gen, w: u32) -> Result<(), GraphError> {
        if v as usize >= self.table.len() || w as usize >= self.table.len() {
            return Err(GraphError::UnknownVertex(v.max(w) as Vertex));
        }
        let row = &mut self.table[v as usize];
        match row.iter_mut().find(|(h, _)| *h as usize == g) {
            Some(e) if e.1 != w => {
                return Err(GraphError::NotDeterministic {
                    vertex: v as Vertex,
                    generator: g,
                })
            }
            Some(_) => {}
            None => row.push((g as u16, w)),
        }
        Ok(())
    }

    /// Record `g: v -> w` and `inverse(g): w -> v`.
    pub fn set(&mut self, v: u32, g: Gen, w: u32) -> Result<(), GraphError> {
        self.set_one(v, g, w)?;
        self.set_one(w, self.gens.inverse(g), v)
    }

    pub fn build(self) -> Result<FiniteGraph, GraphError> {
        let n = self.table.len();
        let mut moves = Vec::with_capacity(n);
        for (v, mut row) in self.table.into_iter().enumerate() {
            row.retain(|&(_, w)| w as usize != v);
            row.sort_unstable();
            moves.push(row);
        }
        let g = FiniteGraph {
            gens: self.gens,
            moves,
            colors: None,
            ids: None,
        };
        // explicit moves must be bijective per generator
        for v in 0..n {
            for &(h, w) in &g.moves[v] {
                let back = g.step(w as Vertex, g.gens.inverse(h as Gen))?;
                if back != v as Vertex {
                    return Err(GraphError::NotDeterministic {
                        vertex: v as Vertex,
                        generator: h as Gen,
                    });
                }
            }
        }
        Ok(g)
    }
}
