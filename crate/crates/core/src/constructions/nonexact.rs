use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::girth::{adjacency_diameter, large_girth_sequence};
use super::tower::{is_covering_map, voltage_z2_tower};
use super::{cycle, ConstructionError};
use crate::gens::GeneratorSet;
use crate::graph::{write_graph, FiniteGraph, GraphView};
use crate::rng::derive_seed;

/// Generator indices of the build: `s, S` on cycles, `a1, a2, a3` on the
/// cubic graphs and `bridge` on connecting edges.
pub const BRIDGE: usize = 5;

fn build_gens() -> GeneratorSet {
    GeneratorSet::new(
        ["s", "S", "a1", "a2", "a3", "bridge"]
            .map(String::from)
            .to_vec(),
        vec![1, 0, 2, 3, 4, 5],
    )
    .expect("static generator set")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonexactParams {
    /// Levels `G_1 .. G_{2 depth - 1}` are built.
    pub depth: usize,
    pub seed: u64,
    /// Girth floor for the first cubic level.
    pub girth: u32,
    pub stage_budget: u32,
    /// Size of the first cubic level; the least admissible size when unset.
    pub first_cubic_size: Option<usize>,
    /// Refuse levels larger than this.
    pub max_level_size: usize,
}

impl Default for NonexactParams {
    fn default() -> Self {
        Self {
            depth: 3,
            seed: 0,
            girth: 5,
            stage_budget: 200,
            first_cubic_size: None,
            max_level_size: 1 << 20,
        }
    }
}

/// A copy of `G_j` joined by one bridge edge to a host vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub host_vertex: u32,
    pub copy_of: usize,
    /// First vertex of the copy inside the level graph.
    pub offset: u32,
    /// Vertex of the copy carrying the bridge.
    pub port: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    /// Index `i` of `G_i` and `H_i`.
    pub index: usize,
    pub h: FiniteGraph,
    pub g: FiniteGraph,
    /// `marked[j - 1]` is the marked set for copies of `G_j`, as vertices of `h`.
    pub marked: Vec<Vec<u32>>,
    pub attachments: Vec<Attachment>,
    /// Vertex used when this level is itself attached somewhere.
    pub port: u32,
    /// Covering map onto `H_{i-2}`.
    pub cover: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonexactBuild {
    pub params: NonexactParams,
    /// `levels[i - 1]` holds `G_i, H_i`.
    pub levels: Vec<Level>,
    /// `radii[j - 1]` is `T_j`.
    pub radii: Vec<u32>,
    pub reseeds: u32,
}

fn widen(g: &FiniteGraph, map: &[usize]) -> FiniteGraph {
    g.extend_generators(build_gens(), map)
        .expect("generator maps respect pairing")
}

/// Attach the listed copies to `h` and return the level graph.
fn assemble(
    h: &FiniteGraph,
    marked: &[Vec<u32>],
    levels: &[Level],
) -> Result<(FiniteGraph, Vec<Attachment>), ConstructionError> {
    let mut total = h.len();
    for (j, set) in marked.iter().enumerate() {
        total += set.len() * levels[j].g.len();
    }
    let mut b = FiniteGraph::builder(build_gens(), total);
    for v in 0..h.len() {
        for &(g, w) in h.raw_moves(v) {
            b.set_one(v as u32, g as usize, w)?;
        }
    }
    let mut offset = h.len() as u32;
    let mut attachments = Vec::new();
    for (j, set) in marked.iter().enumerate() {
        let copy = &levels[j].g;
        for &r in set {
            for v in 0..copy.len() {
                for &(g, w) in copy.raw_moves(v) {
                    b.set_one(offset + v as u32, g as usize, offset + w)?;
                }
            }
            let port = offset + levels[j].port;
            b.set(r, BRIDGE, port)?;
            attachments.push(Attachment {
                host_vertex: r,
                copy_of: j + 1,
                offset,
                port,
            });
            offset += copy.len() as u32;
        }
    }
    Ok((b.build()?, attachments))
}

fn free_vertex(h: &FiniteGraph, marked: &[Vec<u32>]) -> Option<u32> {
    let taken: BTreeSet<u32> = marked.iter().flatten().copied().collect();
    (0..h.len() as u32).find(|v| !taken.contains(v))
}

fn pullback(map: &[u32], set: &[u32]) -> Vec<u32> {
    let s: BTreeSet<u32> = set.iter().copied().collect();
    (0..map.len() as u32)
        .filter(|&v| s.contains(&map[v as usize]))
        .collect()
}

/// Least distance from each vertex to the set.
fn distance_to(adj: &[Vec<u32>], set: &[u32]) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    let mut q: VecDeque<u32> = set.iter().copied().collect();
    for &s in set {
        d[s as usize] = 0;
    }
    while let Some(u) = q.pop_front() {
        for &w in &adj[u as usize] {
            if d[w as usize] == u32::MAX {
                d[w as usize] = d[u as usize] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

/// Run the recursion to depth `params.depth`: step `n` picks a cubic cover
/// `H_{2n}` and a cycle `H_{2n+1}` large enough for `10^n |G_n|`, pulls the
/// marked sets back along the covering maps, marks one fresh vertex for
/// `G_n`, and attaches copies.
pub fn build_nonexact(params: NonexactParams) -> Result<NonexactBuild, ConstructionError> {
    if params.depth == 0 {
        return Err(ConstructionError::Parameter(
            "depth must be at least 1".into(),
        ));
    }
    let g1 = widen(&cycle(4), &[0, 1]);
    let h1 = widen(&cycle(8), &[0, 1]);
    let mut levels = vec![Level {
        index: 1,
        h: h1,
        g: g1,
        marked: Vec::new(),
        attachments: Vec::new(),
        port: 0,
        cover: None,
    }];
    let mut radii: Vec<u32> = Vec::new();
    let mut reseeds = 0;
    for n in 1..params.depth {
        let gn = levels[n - 1].g.len() as u64;
        let need = gn * 10u64.pow(n as u32);
        if need > params.max_level_size as u64 {
            return Err(ConstructionError::SizeRule {
                level: 2 * n,
                required: need,
                available: params.max_level_size as u64,
            });
        }
        let (h_even, cover_even) = if n == 1 {
            let size = match params.first_cubic_size {
                Some(s) if (s as u64) < need => {
                    return Err(ConstructionError::SizeRule {
                        level: 2,
                        required: need,
                        available: s as u64,
                    })
                }
                Some(s) => s,
                None => (need.max(4) as usize + 1) & !1,
            };
            let rep = large_girth_sequence(
                &[size],
                params.girth,
                derive_seed(params.seed, "nonexact/cubic"),
                params.stage_budget,
            )?;
            (widen(&rep.graphs[0], &[2, 3, 4]), None)
        } else {
            let below = &levels[2 * n - 3].h;
            let mut steps = 1;
            while ((below.len() as u64) << (steps - 1)) < need {
                steps += 1;
            }
            let tower = voltage_z2_tower(
                below,
                steps,
                derive_seed(params.seed, &format!("nonexact/tower/{n}")),
            )?;
            reseeds += tower.reseeds;
            let top = tower.top().clone();
            let map: Vec<u32> = (0..top.len() as u32).map(|v| tower.project(v, 0)).collect();
            (top, Some(map))
        };
        let below_odd = levels[2 * n - 2].h.len() as u64;
        let mut len = below_odd;
        while len < need {
            len *= 2;
        }
        let h_odd = widen(&cycle(len as usize), &[0, 1]);
        let cover_odd: Vec<u32> = (0..len as u32).map(|v| v % below_odd as u32).collect();

        let diam = adjacency_diameter(&h_even.simple_adjacency())
            .ok_or(crate::graph::GraphError::Disconnected)?
            .max(len as u32 / 2);
        let t_n = match radii.last() {
            Some(&prev) => diam.max(prev + 1),
            None => diam,
        };
        radii.push(t_n);

        for (h, cover, index) in [
            (h_even, cover_even, 2 * n),
            (h_odd, Some(cover_odd), 2 * n + 1),
        ] {
            let mut marked: Vec<Vec<u32>> = match &cover {
                Some(map) => levels[index - 3]
                    .marked
                    .iter()
                    .map(|set| pullback(map, set))
                    .collect(),
                None => Vec::new(),
            };
            let full = || ConstructionError::SizeRule {
                level: index,
                required: h.len() as u64 + 1,
                available: h.len() as u64,
            };
            marked.push(vec![free_vertex(&h, &marked).ok_or_else(full)?]);
            let (g, attachments) = assemble(&h, &marked, &levels)?;
            let port = free_vertex(&h, &marked).ok_or_else(full)?;
            levels.push(Level {
                index,
                h,
                g,
                marked,
                attachments,
                port,
                cover,
            });
        }
    }
    let build = NonexactBuild {
        params,
        levels,
        radii,
        reseeds,
    };
    let problems = build.check()?;
    if let Some(p) = problems.first() {
        return Err(ConstructionError::Parameter(format!(
            "invariant violated: {p}"
        )));
    }
    Ok(build)
}

fn digest(g: &FiniteGraph) -> String {
    hex::encode(Sha256::digest(write_graph(g).as_bytes()))
}

impl NonexactBuild {
    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i - 1]
    }

    /// Every integer invariant of the recursion; an empty list means all hold.
    pub fn check(&self) -> Result<Vec<String>, ConstructionError> {
        let mut problems = Vec::new();
        for lv in &self.levels[1..] {
            let i = lv.index;
            let adj = lv.h.simple_adjacency();
            let hsize = lv.h.len() as u128;
            let mut seen = BTreeSet::new();
            for (j0, set) in lv.marked.iter().enumerate() {
                let j = j0 + 1;
                let gj = self.level(j).g.len() as u128;
                if set.len() as u128 * gj * 10u128.pow(j as u32) > hsize {
                    problems.push(format!("density fails at level {i} for copies of G_{j}"));
                }
                for &v in set {
                    if !seen.insert(v) {
                        problems.push(format!("marked sets overlap at level {i} vertex {v}"));
                    }
                }
                let t = self.radii[j0];
                if distance_to(&adj, set).iter().any(|&d| d > t) {
                    problems.push(format!(
                        "marked set {j} at level {i} misses a ball of radius {t}"
                    ));
                }
            }
            if let Some(map) = &lv.cover {
                let below = self.level(i - 2);
                if !is_covering_map(&lv.h, &below.h, map)? {
                    problems.push(format!("level {i} does not cover level {}", i - 2));
                }
                for (j0, set) in below.marked.iter().enumerate() {
                    if lv.marked.get(j0) != Some(&pullback(map, set)) {
                        problems.push(format!(
                            "marked set {} at level {i} is not a pullback",
                            j0 + 1
                        ));
                    }
                }
            }
            let mut size = lv.h.len();
            let mut edges = lv.h.simple_edges().len();
            for a in &lv.attachments {
                let copy = &self.level(a.copy_of).g;
                size += copy.len();
                edges += copy.simple_edges().len() + 1;
                if lv.g.step(a.host_vertex as u64, BRIDGE)? != a.port as u64 {
                    problems.push(format!(
                        "missing bridge at level {i} vertex {}",
                        a.host_vertex
                    ));
                }
            }
            if size != lv.g.len() || edges != lv.g.simple_edges().len() {
                problems.push(format!(
                    "level {i} is not the host plus its attached copies"
                ));
            }
            if i % 2 == 0 && 2 * lv.h.len() <= lv.g.len() {
                problems.push(format!("host of level {i} is not a majority"));
            }
        }
        Ok(problems)
    }

    /// `G_1, G_3, ...`.
    pub fn odd_graphs(&self) -> Vec<&FiniteGraph> {
        self.levels
            .iter()
            .filter(|l| l.index % 2 == 1)
            .map(|l| &l.g)
            .collect()
    }

    /// `G_2, G_4, ...`.
    pub fn even_graphs(&self) -> Vec<&FiniteGraph> {
        self.levels
            .iter()
            .filter(|l| l.index % 2 == 0)
            .map(|l| &l.g)
            .collect()
    }

    /// Disjoint union of the odd levels.
    pub fn odd_union(&self) -> Result<FiniteGraph, ConstructionError> {
        let odd = self.odd_graphs();
        let mut g = odd[0].clone();
        for h in &odd[1..] {
            g = g.disjoint_union(h)?;
        }
        Ok(g)
    }

    /// Text record of every parameter, level size, marked-set census, radius
    /// and graph digest; rebuilding from the recorded parameters reproduces
    /// it byte for byte.
    pub fn manifest(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "nonexact depth={} seed={} girth={} stage_budget={} first_cubic_size={} max_level_size={}\n",
            p.depth,
            p.seed,
            p.girth,
            p.stage_budget,
            p.first_cubic_size.map_or("-".into(), |s| s.to_string()),
            p.max_level_size
        );
        for lv in &self.levels {
            let _ = writeln!(
                out,
                "level {} host={} graph={} port={} host_digest={} graph_digest={}",
                lv.index,
                lv.h.len(),
                lv.g.len(),
                lv.port,
                digest(&lv.h),
                digest(&lv.g)
            );
            for (j0, set) in lv.marked.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "marked level={} copies_of={} count={}",
                    lv.index,
                    j0 + 1,
                    set.len()
                );
            }
        }
        for (j0, t) in self.radii.iter().enumerate() {
            let _ = writeln!(out, "radius {} {}", j0 + 1, t);
        }
        let _ = writeln!(out, "reseeds {}", self.reseeds);
        out
    }

    /// Parameters recorded in a manifest's first line.
    pub fn params_from_manifest(text: &str) -> Result<NonexactParams, ConstructionError> {
        let bad = |m: &str| ConstructionError::Parameter(format!("manifest: {m}"));
        let first = text.lines().next().ok_or_else(|| bad("empty"))?;
        let mut toks = first.split_whitespace();
        if toks.next() != Some("nonexact") {
            return Err(bad("expected `nonexact` header"));
        }
        let mut p = NonexactParams::default();
        for t in toks {
            let (k, v) = t.split_once('=').ok_or_else(|| bad(t))?;
            let num = || v.parse::<u64>().map_err(|_| bad(t));
            match k {
                "depth" => p.depth = num()? as usize,
                "seed" => p.seed = num()?,
                "girth" => p.girth = num()? as u32,
                "stage_budget" => p.stage_budget = num()? as u32,
                "first_cubic_size" => {
                    p.first_cubic_size = if v == "-" {
                        None
                    } else {
                        Some(num()? as usize)
                    }
                }
                "max_level_size" => p.max_level_size = num()? as usize,
                _ => return Err(bad(t)),
            }
        }
        Ok(p)
    }
}
