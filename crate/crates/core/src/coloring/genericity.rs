use super::ColoringError;

/// Edge label `{lo, hi} x edge_color` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductLabel {
    pub lo: u32,
    pub hi: u32,
    pub edge_color: usize,
}

impl ProductLabel {
    fn other(&self, c: u32) -> Option<u32> {
        if c == self.lo {
            Some(self.hi)
        } else if c == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

/// Relabel every edge `(x, y)` of a simple graph by the unordered pair of
/// vertex colors `{rho(x), rho(y)}` times its original edge color.
///
/// `edges` are `(x, y, edge_color)`; the result is aligned with `edges`.
/// The new labeling is proper whenever the edge coloring is.
pub fn genericity_product_coloring(
    edges: &[(u32, u32, usize)],
    rho: &[u32],
) -> Result<Vec<ProductLabel>, ColoringError> {
    edges
        .iter()
        .map(|&(x, y, c)| {
            let (a, b) = (rho[x as usize], rho[y as usize]);
            if a == b {
                return Err(ColoringError::NotProper(x as u64, y as u64));
            }
            Ok(ProductLabel {
                lo: a.min(b),
                hi: a.max(b),
                edge_color: c,
            })
        })
        .collect()
}

/// Recover vertex colors from the edge labels alone.
///
/// At a vertex of degree above one the color is the unique common element
/// of the incident pairs; at a leaf it is the element of its pair not taken
/// by the neighbour. `None` where the rule does not determine a color
/// (isolated vertices, or neighbours sharing a color).
pub fn decode_vertex_colors(
    n: usize,
    edges: &[(u32, u32, usize)],
    labels: &[ProductLabel],
) -> Vec<Option<u32>> {
    let mut incident: Vec<Vec<(u32, ProductLabel)>> = vec![Vec::new(); n];
    for (&(x, y, _), &l) in edges.iter().zip(labels) {
        incident[x as usize].push((y, l));
        incident[y as usize].push((x, l));
    }
    let mut out: Vec<Option<u32>> = vec![None; n];
    for z in 0..n {
        let inc = &incident[z];
        if inc.len() < 2 {
            continue;
        }
        let first = inc[0].1;
        let common: Vec<u32> = [first.lo, first.hi]
            .into_iter()
            .filter(|&c| inc.iter().all(|(_, l)| l.other(c).is_some()))
            .collect();
        if common.len() == 1 {
            out[z] = Some(common[0]);
        }
    }
    for z in 0..n {
        if let [(nb, l)] = incident[z][..] {
            out[z] = out[nb as usize].and_then(|c| l.other(c));
        }
    }
    out
}
