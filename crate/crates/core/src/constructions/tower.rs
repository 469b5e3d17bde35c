use rand::Rng;

use super::{cycle, ConstructionError};
use crate::ball::code_at;
use crate::graph::{is_connected, FiniteGraph, GraphError, GraphView};
use crate::rng::stream;

/// Finite graphs with label-preserving covering maps between consecutive
/// levels: `maps[i][v]` is the image in `levels[i]` of vertex `v` of
/// `levels[i + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverTower {
    pub levels: Vec<FiniteGraph>,
    pub maps: Vec<Vec<u32>>,
    /// Seeds rejected because the cover came out disconnected.
    pub reseeds: u32,
}

impl CoverTower {
    pub fn top(&self) -> &FiniteGraph {
        self.levels.last().expect("tower has a base")
    }

    /// Image of a top-level vertex at level `level`.
    pub fn project(&self, mut v: u32, level: usize) -> u32 {
        for m in self.maps[level..].iter().rev() {
            v = m[v as usize];
        }
        v
    }

    /// Every map of the tower is a covering map.
    pub fn verify(&self) -> Result<bool, GraphError> {
        for (i, m) in self.maps.iter().enumerate() {
            if !is_covering_map(&self.levels[i + 1], &self.levels[i], m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `map` commutes with every generator, is onto with fibers of one size, and
/// sends each 1-ball isomorphically onto the 1-ball of the image.
pub fn is_covering_map(
    cover: &FiniteGraph,
    base: &FiniteGraph,
    map: &[u32],
) -> Result<bool, GraphError> {
    if cover.gens() != base.gens() || map.len() != cover.len() || base.is_empty() {
        return Ok(false);
    }
    let mut fiber = vec![0usize; base.len()];
    for (v, &m) in map.iter().enumerate() {
        if m as usize >= base.len() {
            return Ok(false);
        }
        fiber[m as usize] += 1;
        for g in 0..cover.gens().len() {
            let w = cover.step(v as u64, g)?;
            if map[w as usize] as u64 != base.step(m as u64, g)? {
                return Ok(false);
            }
        }
        if code_at(cover, v as u64, 1)? != code_at(base, m as u64, 1)? {
            return Ok(false);
        }
    }
    Ok(fiber.iter().all(|&f| f == fiber[0] && f > 0))
}

/// Cycles of lengths `base, 2 base, 4 base, ...` with the reduction maps.
pub fn cycle_cover_tower(base: usize, levels: usize) -> CoverTower {
    let mut out = CoverTower {
        levels: vec![cycle(base)],
        maps: Vec::new(),
        reseeds: 0,
    };
    for i in 1..levels {
        let n = base << i;
        out.levels.push(cycle(n));
        let m = n as u32 / 2;
        out.maps.push((0..n as u32).map(|v| v % m).collect());
    }
    out
}

/// The two-sheeted cover given by a seeded `Z/2` voltage on every edge.
/// Sheet `b` of base vertex `v` is `v + b n`. Fixed points lift to fixed
/// points so that covers of simple graphs stay simple.
pub fn voltage_z2_cover(
    base: &FiniteGraph,
    seed: u64,
) -> Result<(FiniteGraph, Vec<u32>), ConstructionError> {
    let n = base.len() as u32;
    let gens = base.gens().clone();
    let mut rng = stream(seed, "voltage");
    let mut b = FiniteGraph::builder(gens.clone(), 2 * n as usize);
    for v in 0..n {
        for &(g, w) in base.raw_moves(v as usize) {
            let g = g as usize;
            let inv = gens.inverse(g);
            let canonical = if inv == g { v < w } else { g < inv };
            if !canonical {
                continue;
            }
            let eps: u32 = rng.gen_range(0..2);
            for sheet in 0..2 {
                b.set(v + sheet * n, g, w + ((sheet + eps) % 2) * n)?;
            }
        }
    }
    let cover = b.build()?;
    let map = (0..2 * n).map(|v| v % n).collect();
    Ok((cover, map))
}

/// Repeated connected voltage covers of `base`; a disconnected lift is
/// redrawn from the next substream and counted in `reseeds`.
pub fn voltage_z2_tower(
    base: &FiniteGraph,
    levels: usize,
    seed: u64,
) -> Result<CoverTower, ConstructionError> {
    if !is_connected(base)? {
        return Err(GraphError::Disconnected.into());
    }
    let mut out = CoverTower {
        levels: vec![base.clone()],
        maps: Vec::new(),
        reseeds: 0,
    };
    for level in 1..levels {
        let below = out.top().clone();
        let mut attempt = 0u64;
        let (cover, map) = loop {
            let s = crate::rng::derive_seed(seed, &format!("tower/{level}/{attempt}"));
            let (cover, map) = voltage_z2_cover(&below, s)?;
            if is_connected(&cover)? {
                break (cover, map);
            }
            attempt += 1;
            out.reseeds += 1;
            if attempt > 64 {
                return Err(GraphError::Disconnected.into());
            }
        };
        out.levels.push(cover);
        out.maps.push(map);
    }
    Ok(out)
}
