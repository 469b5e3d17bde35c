use std::collections::{BTreeMap, HashMap};

use super::{Coloring, ColoringError};
use crate::graph::{bfs, GraphView, Vertex, Window};

/// Marker for "no preimage" in the third and fourth components.
pub const STAR: u32 = u32::MAX;

/// Two injective partial maps with disjoint images, each moving points by
/// at most `c`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DoublingMaps {
    pub phi1: BTreeMap<Vertex, Vertex>,
    pub phi2: BTreeMap<Vertex, Vertex>,
    pub c: u32,
}

impl DoublingMaps {
    /// Structural check: injectivity, disjoint images, displacement `<= c`.
    pub fn verify<V: GraphView + ?Sized>(&self, view: &V) -> Result<bool, ColoringError> {
        let mut images = HashMap::new();
        for (i, map) in [&self.phi1, &self.phi2].into_iter().enumerate() {
            for (&x, &y) in map {
                if images.insert(y, i).is_some() {
                    return Ok(false);
                }
                let near = bfs(view, &[x], self.c, None)?.iter().any(|&(w, _)| w == y);
                if !near {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The four-component coloring `c1 x c2 x c3 x c4` on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionColoring {
    pub window: Window,
    pub c1: Vec<u32>,
    pub c2: Vec<u32>,
    pub c3: Vec<u32>,
    pub c4: Vec<u32>,
    pub c: u32,
}

impl CompressionColoring {
    pub fn get(&self, v: Vertex) -> Option<[u32; 4]> {
        self.window
            .index_of(v)
            .map(|i| [self.c1[i], self.c2[i], self.c3[i], self.c4[i]])
    }

    /// The same data as a single-symbol coloring (symbols numbered in order
    /// of first appearance of each tuple).
    pub fn as_coloring(&self) -> Result<Coloring, ColoringError> {
        let mut ids: HashMap<[u32; 4], u32> = HashMap::new();
        let symbols: Vec<u32> = (0..self.window.len())
            .map(|i| {
                let t = [self.c1[i], self.c2[i], self.c3[i], self.c4[i]];
                let next = ids.len() as u32;
                *ids.entry(t).or_insert(next)
            })
            .collect();
        Coloring::new(self.window.clone(), symbols, ids.len().max(1) as u32)
    }
}

/// Record at `q = phi_i(p)` the `c2`-color of its preimage `p`; vertices
/// without a preimage get [`STAR`].
///
/// Unique decoding needs `c2` proper at distance `2c` (a second candidate
/// would share `x`'s color within that distance).
pub fn compression_coloring<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    dm: &DoublingMaps,
    c1: &Coloring,
    c2: &Coloring,
) -> Result<CompressionColoring, ColoringError> {
    if c2.proper_at_distance().is_none_or(|d| d < 2 * dm.c) {
        return Err(ColoringError::Invalid(format!(
            "second component must be verified proper at distance {}",
            2 * dm.c
        )));
    }
    if !dm.verify(view)? {
        return Err(ColoringError::Invalid(
            "doubling maps fail verification".into(),
        ));
    }
    let comp = |col: &Coloring| -> Result<Vec<u32>, ColoringError> {
        window
            .iter()
            .map(|v| col.get(v).ok_or(ColoringError::Uncolored(v)))
            .collect()
    };
    let (v1, v2) = (comp(c1)?, comp(c2)?);
    let mut c3 = vec![STAR; window.len()];
    let mut c4 = vec![STAR; window.len()];
    for (map, out) in [(&dm.phi1, &mut c3), (&dm.phi2, &mut c4)] {
        for (&p, &q) in map {
            let qi = window.index_of(q).ok_or(ColoringError::Uncolored(q))?;
            if out[qi] != STAR {
                return Err(ColoringError::NotInjective(q));
            }
            out[qi] = c2.get(p).ok_or(ColoringError::Uncolored(p))?;
        }
    }
    Ok(CompressionColoring {
        window: window.clone(),
        c1: v1,
        c2: v2,
        c3,
        c4,
        c: dm.c,
    })
}

/// Recover `(phi1(x), phi2(x))` from the coloring: the unique vertex within
/// distance `c` whose third (fourth) component equals the second component
/// of `x`.
pub fn decode_compression<V: GraphView + ?Sized>(
    view: &V,
    cc: &CompressionColoring,
    x: Vertex,
) -> Result<(Vertex, Vertex), ColoringError> {
    let key = cc.get(x).ok_or(ColoringError::Uncolored(x))?[1];
    let ball = bfs(view, &[x], cc.c, None)?;
    let find = |slot: usize| -> Result<Vertex, ColoringError> {
        let hits: Vec<Vertex> = ball
            .iter()
            .filter_map(|&(y, _)| cc.get(y).filter(|t| t[slot] == key).map(|_| y))
            .collect();
        match hits[..] {
            [y] => Ok(y),
            _ => Err(ColoringError::Decode {
                vertex: x,
                candidates: hits.len(),
            }),
        }
    };
    Ok((find(2)?, find(3)?))
}
