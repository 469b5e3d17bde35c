//! Rooted balls, their canonical codes, the ball metric and the root-change
//! action.

use std::collections::HashMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::gens::Gen;
use crate::graph::{is_connected, GraphError, GraphView, Vertex};

/// A ball in canonical BFS order: the root is index 0 and vertices are
/// discovered by scanning their non-fixed moves in generator order.
///
/// The ball of radius `r` is everything visible along labeled walks of
/// length at most `r` from the root: the vertices within distance `r` and
/// the moves (loops included) of the vertices within distance `r - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedBall {
    pub radius: u32,
    pub vertices: Vec<Vertex>,
    pub depth: Vec<u32>,
    /// Non-fixed moves `(generator, ball index)` of each vertex, sorted by
    /// generator. Generators not listed fix the vertex. Rows of the outer
    /// sphere are empty and carry no information.
    pub table: Vec<Vec<(u32, u32)>>,
    pub colors: Option<Vec<u32>>,
    gens_len: usize,
    index: HashMap<Vertex, u32>,
}

impl RootedBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn gens_len(&self) -> usize {
        self.gens_len
    }

    /// Canonical address of `v` inside the ball.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).map(|&i| i as usize)
    }

    /// Ball index of the `g`-neighbour of vertex `i`; `None` on the outer
    /// sphere, where moves are not part of the ball.
    pub fn step(&self, i: usize, g: Gen) -> Option<usize> {
        if self.depth[i] >= self.radius {
            return None;
        }
        let row = &self.table[i];
        Some(match row.binary_search_by_key(&(g as u32), |&(h, _)| h) {
            Ok(j) => row[j].1 as usize,
            Err(_) => i,
        })
    }

    /// Number of vertices at depth exactly `radius`.
    pub fn sphere_len(&self) -> usize {
        self.depth.iter().filter(|&&d| d == self.radius).count()
    }

    /// The ball of radius `s` around ball vertex `center`, computed from this
    /// ball's table alone. Returns the sub-ball and, for each of its
    /// vertices, the index in `self`.
    pub fn sub_ball(&self, center: usize, s: u32) -> Result<(RootedBall, Vec<usize>), GraphError> {
        let mut local: HashMap<usize, u32> = HashMap::new();
        let mut order = vec![center];
        let mut depth = vec![0u32];
        local.insert(center, 0);
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            let d = depth[i];
            i += 1;
            if d == s {
                continue;
            }
            if self.depth[u] >= self.radius {
                return Err(GraphError::SubBallOverflow {
                    vertex: self.vertices[center],
                    radius: s,
                });
            }
            for &(_, w) in &self.table[u] {
                let w = w as usize;
                if let std::collections::hash_map::Entry::Vacant(e) = local.entry(w) {
                    e.insert(order.len() as u32);
                    order.push(w);
                    depth.push(d + 1);
                }
            }
        }
        let table = order
            .iter()
            .zip(&depth)
            .map(|(&u, &d)| {
                if d == s {
                    Vec::new()
                } else {
                    self.table[u]
                        .iter()
                        .map(|&(g, w)| (g, local[&(w as usize)]))
                        .collect()
                }
            })
            .collect();
        let vertices: Vec<Vertex> = order.iter().map(|&u| self.vertices[u]).collect();
        let colors = self
            .colors
            .as_ref()
            .map(|c| order.iter().map(|&u| c[u]).collect());
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        Ok((
            RootedBall {
                radius: s,
                vertices,
                depth,
                table,
                colors,
                gens_len: self.gens_len,
                index,
            },
            order,
        ))
    }
}

/// Extract the ball of radius `r` around `v` in canonical BFS order.
///
/// A view that cannot answer a move inside the ball is an error, never a
/// silently truncated ball.
pub fn extract_ball<V: GraphView + ?Sized>(
    view: &V,
    v: Vertex,
    r: u32,
) -> Result<RootedBall, GraphError> {
    let mut vertices = vec![v];
    let mut depth = vec![0u32];
    let mut index: HashMap<Vertex, u32> = HashMap::from([(v, 0)]);
    let mut table: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut buf = Vec::new();
    let mut i = 0;
    while i < vertices.len() {
        let u = vertices[i];
        let d = depth[i];
        i += 1;
        if d == r {
            table.push(Vec::new());
            continue;
        }
        view.moves_into(u, &mut buf)?;
        let mut row = Vec::with_capacity(buf.len());
        for &(g, w) in &buf {
            let j = *index.entry(w).or_insert_with(|| {
                vertices.push(w);
                depth.push(d + 1);
                (vertices.len() - 1) as u32
            });
            row.push((g as u32, j));
        }
        table.push(row);
    }
    let colors = if view.is_colored() {
        Some(
            vertices
                .iter()
                .map(|&u| view.color(u).ok_or(GraphError::UnknownVertex(u)))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    Ok(RootedBall {
        radius: r,
        vertices,
        depth,
        table,
        colors,
        gens_len: view.gens().len(),
        index,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CodeMode {
    /// SHA-256 of the canonical table.
    #[default]
    Digest,
    /// The canonical table itself.
    Exact,
}

/// Canonical fingerprint of a rooted ball.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallCode(Vec<u8>);

impl BallCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, GraphError> {
        hex::decode(s)
            .map(BallCode)
            .map_err(|e| GraphError::Invalid(format!("bad ball code `{s}`: {e}")))
    }
}

impl fmt::Debug for BallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hex();
        write!(f, "BallCode({})", &h[..h.len().min(16)])
    }
}

fn canonical_bytes(b: &RootedBall) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + b.len() * 24);
    out.extend_from_slice(&b.radius.to_le_bytes());
    out.extend_from_slice(&(b.gens_len() as u32).to_le_bytes());
    out.extend_from_slice(&(b.len() as u32).to_le_bytes());
    out.push(b.colors.is_some() as u8);
    for (i, row) in b.table.iter().enumerate() {
        if let Some(c) = &b.colors {
            out.extend_from_slice(&c[i].to_le_bytes());
        }
        if b.depth[i] < b.radius {
            out.extend_from_slice(&(row.len() as u32).to_le_bytes());
            for &(g, w) in row {
                out.extend_from_slice(&g.to_le_bytes());
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    out
}

pub fn ball_code_with(b: &RootedBall, mode: CodeMode) -> BallCode {
    let bytes = canonical_bytes(b);
    match mode {
        CodeMode::Exact => {
            let mut v = Vec::with_capacity(bytes.len() + 1);
            v.push(b'E');
            v.extend(bytes);
            BallCode(v)
        }
        CodeMode::Digest => BallCode(Sha256::digest(&bytes).to_vec()),
    }
}

pub fn ball_code(b: &RootedBall) -> BallCode {
    ball_code_with(b, CodeMode::Digest)
}

/// Code of the `r`-ball around `v`.
pub fn code_at<V: GraphView + ?Sized>(view: &V, v: Vertex, r: u32) -> Result<BallCode, GraphError> {
    extract_ball(view, v, r).map(|b| ball_code(&b))
}

/// Distance `2^{-r}` in the space of rooted graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchreierDistance {
    /// Largest radius at which the balls agree, if any.
    pub agreeing_radius: Option<u32>,
    pub r_max: u32,
}

impl SchreierDistance {
    /// `2` when the roots already differ, `0` when the balls agree up to
    /// `r_max` (read as "at most `2^{-r_max}`").
    pub fn value(&self) -> f64 {
        match self.agreeing_radius {
            None => 2.0,
            Some(r) if r >= self.r_max => 0.0,
            Some(r) => 0.5f64.powi(r as i32),
        }
    }

    pub fn is_capped(&self) -> bool {
        self.agreeing_radius == Some(self.r_max)
    }
}

pub fn schreier_distance<V: GraphView + ?Sized, W: GraphView + ?Sized>(
    view1: &V,
    root1: Vertex,
    view2: &W,
    root2: Vertex,
    r_max: u32,
) -> Result<SchreierDistance, GraphError> {
    if view1.gens() != view2.gens() {
        return Err(GraphError::InvalidGenerators(
            "views use different generator sets".into(),
        ));
    }
    let mut agreeing = None;
    for r in 0..=r_max {
        let a = ball_code_with(&extract_ball(view1, root1, r)?, CodeMode::Exact);
        let b = ball_code_with(&extract_ball(view2, root2, r)?, CodeMode::Exact);
        if a != b {
            break;
        }
        agreeing = Some(r);
    }
    Ok(SchreierDistance {
        agreeing_radius: agreeing,
        r_max,
    })
}

/// Endpoint of the walk that reads `word` left to right from `root`.
pub fn root_change<V: GraphView + ?Sized>(
    view: &V,
    root: Vertex,
    word: &[Gen],
) -> Result<Vertex, GraphError> {
    word.iter().try_fold(root, |v, &g| view.step(v, g))
}

/// The label-preserving bijection forced by `v -> w`, if it is a
/// colour-preserving automorphism. Pairs are listed in BFS order from `v`.
pub fn automorphism_transport<V: GraphView + ?Sized>(
    view: &V,
    v: Vertex,
    w: Vertex,
) -> Result<Option<Vec<(Vertex, Vertex)>>, GraphError> {
    if !is_connected(view)? {
        return Err(GraphError::Disconnected);
    }
    let k = view.gens().len();
    let mut map: HashMap<Vertex, Vertex> = HashMap::from([(v, w)]);
    let mut image: HashMap<Vertex, Vertex> = HashMap::from([(w, v)]);
    let mut order = vec![v];
    let mut i = 0;
    while i < order.len() {
        let a = order[i];
        let b = map[&a];
        i += 1;
        if view.color(a) != view.color(b) {
            return Ok(None);
        }
        for g in 0..k {
            let a2 = view.step(a, g)?;
            let b2 = view.step(b, g)?;
            match map.get(&a2) {
                Some(&x) if x != b2 => return Ok(None),
                Some(_) => {}
                None => {
                    if image.contains_key(&b2) {
                        return Ok(None);
                    }
                    map.insert(a2, b2);
                    image.insert(b2, a2);
                    order.push(a2);
                }
            }
        }
    }
    Ok(Some(order.into_iter().map(|a| (a, map[&a])).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gens::GeneratorSet;
    use crate::graph::{FiniteGraph, LazyGrid, LazyTree};

    fn cycle(n: u32) -> FiniteGraph {
        let mut b = FiniteGraph::builder(GeneratorSet::cyclic(), n as usize);
        for v in 0..n {
            b.set(v, 0, (v + 1) % n).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn cycle_ball_is_a_path() {
        let c = cycle(8);
        let b = extract_ball(&c, 3, 2).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.vertices, vec![3, 4, 2, 5, 1]);
        assert!(b.table[3].is_empty());
        assert_eq!(extract_ball(&c, 0, 0).unwrap().len(), 1);
    }

    #[test]
    fn grid_diamond_has_25_vertices() {
        let b = extract_ball(&LazyGrid::new(None), LazyGrid::origin(), 3).unwrap();
        assert_eq!(b.len(), 25);
    }

    #[test]
    fn frontier_balls_are_rejected() {
        let t = LazyTree::new(3, 4);
        assert!(extract_ball(&t, LazyTree::root(), 4).is_ok());
        assert!(extract_ball(&t, LazyTree::root(), 5).is_err());
    }

    #[test]
    fn codes_on_transitive_cycle_agree() {
        let c = cycle(12);
        let a = code_at(&c, 0, 3).unwrap();
        for v in 1..12 {
            assert_eq!(code_at(&c, v, 3).unwrap(), a);
        }
        let b = extract_ball(&c, 0, 3).unwrap();
        assert_eq!(ball_code(&b).as_bytes(), ball_code(&b).as_bytes());
        assert_eq!(BallCode::from_hex(&a.hex()).unwrap(), a);
    }

    #[test]
    fn sub_ball_matches_direct_extraction() {
        let g = LazyGrid::new(None);
        let big = extract_ball(&g, LazyGrid::origin(), 5).unwrap();
        let c = big.index_of(LazyGrid::vertex(1, -2)).unwrap();
        let (sub, map) = big.sub_ball(c, 2).unwrap();
        let direct = extract_ball(&g, LazyGrid::vertex(1, -2), 2).unwrap();
        assert_eq!(ball_code(&sub), ball_code(&direct));
        assert_eq!(sub.vertices, direct.vertices);
        assert_eq!(big.vertices[map[0]], LazyGrid::vertex(1, -2));
        assert!(big.sub_ball(c, 3).is_err());
        assert!(big.sub_ball(0, 5).is_ok());
    }

    #[test]
    fn cycle_distances() {
        let (c8, c16) = (cycle(8), cycle(16));
        let d = schreier_distance(&c8, 0, &c16, 5, 10).unwrap();
        assert_eq!(d.agreeing_radius, Some(3));
        assert_eq!(d.value(), 0.125);
        assert_eq!(schreier_distance(&c8, 0, &c8, 4, 10).unwrap().value(), 0.0);
        let colored = cycle(8).with_colors(vec![0, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(
            schreier_distance(&colored, 0, &colored, 1, 10)
                .unwrap()
                .value(),
            2.0
        );
    }

    #[test]
    fn root_change_walks() {
        let c = cycle(8);
        assert_eq!(root_change(&c, 0, &[]).unwrap(), 0);
        assert_eq!(root_change(&c, 0, &[0, 0, 0]).unwrap(), 3);
        let t = LazyTree::new(3, 5);
        assert_eq!(
            root_change(&t, LazyTree::root(), &[1, 1]).unwrap(),
            LazyTree::root()
        );
    }

    #[test]
    fn transport_on_cycles() {
        let c = cycle(8);
        assert!(automorphism_transport(&c, 0, 0).unwrap().is_some());
        let rot = automorphism_transport(&c, 0, 1).unwrap().unwrap();
        assert!(rot.iter().all(|&(a, b)| b == (a + 1) % 8));
        let marked = cycle(8).with_colors(vec![1, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!(automorphism_transport(&marked, 0, 1).unwrap().is_none());
    }
}
