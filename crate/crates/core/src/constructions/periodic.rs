use super::{torus, ConstructionError};
use crate::coloring::{
    decode_vertex_colors, genericity_product_coloring, nonrepetitive_color, Budget, ProductLabel,
};
use crate::gens::{Gen, GeneratorSet};
use crate::graph::{GraphError, GraphView, LazyGrid, Vertex, Window};

/// The infinite grid relabeled by involutions: each edge carries the
/// unordered pair of its endpoint colors times a proper 4-edge-coloring.
///
/// The vertex coloring lives on a `P x P` torus and is lifted periodically.
/// It is the product of a coloring nonrepetitive on paths of up to
/// `2 n_max` vertices with `(x + 2y) mod 5`, which is proper at distance 2
/// so that every vertex color can be read back from the edge labels.
#[derive(Clone, Debug)]
pub struct PeriodicColoredGrid {
    period: usize,
    n_max: u32,
    gens: GeneratorSet,
    rho: Vec<u32>,
    labels: Vec<ProductLabel>,
    right: Vec<Gen>,
    up: Vec<Gen>,
}

impl PeriodicColoredGrid {
    /// `period` must be a positive multiple of 10 and at least `2 n_max`.
    pub fn new(
        period: usize,
        alphabet: u32,
        n_max: u32,
        seed: u64,
    ) -> Result<Self, ConstructionError> {
        if period == 0 || !period.is_multiple_of(10) || period < 2 * n_max as usize {
            return Err(ConstructionError::Parameter(format!(
                "period {period} must be a positive multiple of 10 and at least {}",
                2 * n_max
            )));
        }
        let p = period;
        let t = torus(p, p);
        let w = Window::all(&t)?;
        let base =
            nonrepetitive_color(&t, &w, alphabet, n_max, seed, Budget::resamples(10_000_000))
                .map_err(|e| ConstructionError::Parameter(format!("torus coloring failed: {e}")))?;
        let rho: Vec<u32> = (0..p * p)
            .map(|i| {
                let (x, y) = (i % p, i / p);
                base.colors()[i] * 5 + ((x + 2 * y) % 5) as u32
            })
            .collect();
        let mut edges = Vec::with_capacity(2 * p * p);
        for i in 0..p * p {
            let (x, y) = (i % p, i / p);
            edges.push((i as u32, (y * p + (x + 1) % p) as u32, x % 2));
            edges.push((i as u32, (((y + 1) % p) * p + x) as u32, 2 + y % 2));
        }
        let labels = genericity_product_coloring(&edges, &rho)
            .map_err(|e| ConstructionError::Parameter(format!("product coloring failed: {e}")))?;
        let mut used = labels.clone();
        used.sort_unstable();
        used.dedup();
        let names = used
            .iter()
            .map(|l| format!("e{}_{}_{}", l.lo, l.hi, l.edge_color))
            .collect();
        let gens = GeneratorSet::new(names, (0..used.len()).collect())?;
        let id = |l: &ProductLabel| used.binary_search(l).expect("label in table");
        let right = labels.iter().step_by(2).map(id).collect();
        let up = labels.iter().skip(1).step_by(2).map(id).collect();
        Ok(Self {
            period,
            n_max,
            gens,
            rho,
            labels,
            right,
            up,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    fn cell(&self, x: i32, y: i32) -> usize {
        let p = self.period as i32;
        (y.rem_euclid(p) * p + x.rem_euclid(p)) as usize
    }

    /// The vertex color that the edge labels encode.
    pub fn rho(&self, v: Vertex) -> u32 {
        let (x, y) = LazyGrid::coords(v);
        self.rho[self.cell(x, y)]
    }

    /// Read every torus vertex color back from the labels alone.
    pub fn decodes(&self) -> bool {
        let p = self.period;
        let mut edges = Vec::with_capacity(2 * p * p);
        for i in 0..p * p {
            let (x, y) = (i % p, i / p);
            edges.push((i as u32, (y * p + (x + 1) % p) as u32, x % 2));
            edges.push((i as u32, (((y + 1) % p) * p + x) as u32, 2 + y % 2));
        }
        decode_vertex_colors(p * p, &edges, &self.labels)
            .iter()
            .zip(&self.rho)
            .all(|(d, &r)| *d == Some(r))
    }

    /// The `w x h` window at the origin.
    pub fn window(w: i32, h: i32) -> Window {
        Window::new(LazyGrid::rectangle(w, h))
    }

    fn around(&self, v: Vertex) -> [(Gen, Vertex); 4] {
        let (x, y) = LazyGrid::coords(v);
        [
            (self.right[self.cell(x, y)], LazyGrid::vertex(x + 1, y)),
            (self.right[self.cell(x - 1, y)], LazyGrid::vertex(x - 1, y)),
            (self.up[self.cell(x, y)], LazyGrid::vertex(x, y + 1)),
            (self.up[self.cell(x, y - 1)], LazyGrid::vertex(x, y - 1)),
        ]
    }
}

impl GraphView for PeriodicColoredGrid {
    fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    fn step(&self, v: Vertex, g: Gen) -> Result<Vertex, GraphError> {
        if g >= self.gens.len() {
            return Err(GraphError::InvalidGenerators(format!("no generator {g}")));
        }
        Ok(self
            .around(v)
            .iter()
            .find(|&&(h, _)| h == g)
            .map_or(v, |&(_, w)| w))
    }

    fn moves_into(&self, v: Vertex, out: &mut Vec<(Gen, Vertex)>) -> Result<(), GraphError> {
        out.clear();
        out.extend(self.around(v));
        out.sort_unstable();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_determinism;

    #[test]
    fn labels_decode_and_act_as_involutions() {
        let g = PeriodicColoredGrid::new(10, 16, 4, 1).unwrap();
        assert!(g.decodes());
        let w = PeriodicColoredGrid::window(12, 12);
        check_determinism(&g, w.vertices()).unwrap();
        let v = LazyGrid::vertex(3, -4);
        assert_eq!(g.rho(v), g.rho(LazyGrid::vertex(13, 6)));
        assert_eq!(g.moves(v).unwrap().len(), 4);
    }

    #[test]
    fn bad_period_is_rejected() {
        assert!(PeriodicColoredGrid::new(12, 8, 4, 0).is_err());
        assert!(PeriodicColoredGrid::new(10, 8, 6, 0).is_err());
    }
}
