use super::{GraphError, GraphView, Vertex};
use crate::gens::{Gen, GeneratorSet};

/// The infinite square grid with generators `x, X, y, Y`.
///
/// Vertices are lattice points packed into 64 bits. When `limit` is set,
/// points with `max(|x|, |y|) > limit` are not materialized.
#[derive(Clone, Debug)]
pub struct LazyGrid {
    gens: GeneratorSet,
    limit: Option<i32>,
}

impl LazyGrid {
    pub fn new(limit: Option<i32>) -> Self {
        Self {
            gens: Self::generators(),
            limit,
        }
    }

    /// `x, X, y, Y`.
    pub fn generators() -> GeneratorSet {
        GeneratorSet::new(
            vec!["x".into(), "X".into(), "y".into(), "Y".into()],
            vec![1, 0, 3, 2],
        )
        .expect("static generator set")
    }

    pub fn vertex(x: i32, y: i32) -> Vertex {
        ((x as u32 as u64) << 32) | (y as u32 as u64)
    }

    pub fn coords(v: Vertex) -> (i32, i32) {
        ((v >> 32) as u32 as i32, v as u32 as i32)
    }

    pub fn origin() -> Vertex {
        Self::vertex(0, 0)
    }

    fn check(&self, v: Vertex) -> Result<(i32, i32), GraphError> {
        let (x, y) = Self::coords(v);
        match self.limit {
            Some(l) if x.abs() > l || y.abs() > l => Err(GraphError::Unmaterialized(v)),
            _ => Ok((x, y)),
        }
    }

    /// Vertices of the `w x h` rectangle with lower-left corner at the origin.
    pub fn rectangle(w: i32, h: i32) -> Vec<Vertex> {
        let mut out = Vec::with_capacity((w * h).max(0) as usize);
        for y in 0..h {
            for x in 0..w {
                out.push(Self::vertex(x, y));
            }
        }
        out
    }
}

impl GraphView for LazyGrid {
    fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        let (x, y) = self.check(v)?;
        let w = match g {
            0 => Self::vertex(x + 1, y),
            1 => Self::vertex(x - 1, y),
            2 => Self::vertex(x, y + 1),
            3 => Self::vertex(x, y - 1),
            _ => {
                return Err(GraphError::InvalidGenerators(format!(
                    "grid has no generator {g}"
                )))
            }
        };
        self.check(w)?;
        Ok(w)
    }
}

/// The infinite `degree`-regular tree realized as the Cayley graph of the
/// free product of `degree` copies of Z/2.
///
/// Vertices are reduced words, encoded with a leading marker bit followed by
/// two bits per letter (so `degree <= 4` and depth at most 31).
#[derive(Clone, Debug)]
pub struct LazyTree {
    gens: GeneratorSet,
    depth_limit: u32,
}

impl LazyTree {
    pub fn new(degree: usize, depth_limit: u32) -> Self {
        assert!((1..=4).contains(&degree), "tree degree must be in 1..=4");
        assert!(depth_limit <= 31, "tree depth limited to 31");
        Self {
            gens: GeneratorSet::involutions(degree),
            depth_limit,
        }
    }

    pub fn root() -> Vertex {
        1
    }

    pub fn depth(v: Vertex) -> u32 {
        (63 - v.leading_zeros()) / 2
    }

    pub fn last_letter(v: Vertex) -> Option<Gen> {
        (v > 1).then_some((v & 3) as Gen)
    }

    /// Parent towards the root (drops the last letter).
    pub fn parent(v: Vertex) -> Option<Vertex> {
        (v > 1).then_some(v >> 2)
    }

    pub fn word(v: Vertex) -> Vec<Gen> {
        let d = Self::depth(v);
        (0..d).rev().map(|i| ((v >> (2 * i)) & 3) as Gen).collect()
    }

    pub fn from_word(word: &[Gen]) -> Vertex {
        let mut v = 1u64;
        for &g in word {
            match Self::last_letter(v) {
                Some(l) if l == g => v >>= 2,
                _ => v = (v << 2) | g as u64,
            }
        }
        v
    }

    pub fn depth_limit(&self) -> u32 {
        self.depth_limit
    }

    /// All vertices of depth at most `d`, in BFS order from the root.
    pub fn ball(&self, d: u32) -> Vec<Vertex> {
        let mut out = vec![Self::root()];
        let mut i = 0;
        while i < out.len() {
            let v = out[i];
            i += 1;
            if Self::depth(v) >= d {
                continue;
            }
            for g in 0..self.gens.len() {
                if Self::last_letter(v) != Some(g) {
                    out.push((v << 2) | g as u64);
                }
            }
        }
        out
    }
}

impl GraphView for LazyTree {
    fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        if v == 0 || Self::depth(v) > self.depth_limit {
            return Err(GraphError::Unmaterialized(v));
        }
        if g >= self.gens.len() {
            return Err(GraphError::InvalidGenerators(format!(
                "tree has no generator {g}"
            )));
        }
        if Self::last_letter(v) == Some(g) {
            return Ok(v >> 2);
        }
        if Self::depth(v) == self.depth_limit {
            return Err(GraphError::Unmaterialized((v << 2) | g as u64));
        }
        Ok((v << 2) | g as u64)
    }
}
