use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use super::{check_domain, Domain, KernelError, LocalKernel};
use crate::graph::{bfs, GraphView, Vertex, Window};
use crate::sofic::PropertyAWitness;

#[derive(Clone, Debug, PartialEq)]
pub struct CpReport {
    pub kernel: LocalKernel,
    /// Largest `|K(y, z) - out(y, z)|` over the domain.
    pub deviation: f64,
    pub hull: usize,
}

/// Largest `r`-ball in the window: the size every local hull is padded to.
pub fn hull_size<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<usize, KernelError> {
    let mut n = 0;
    for x in window.iter() {
        n = n.max(bfs(view, &[x], r, None)?.len());
    }
    Ok(n)
}

/// The first `n` vertices of the canonical search from `x`, and the depth
/// they reach.
fn hull<V: GraphView + ?Sized>(
    view: &V,
    x: Vertex,
    n: usize,
) -> Result<(HashSet<Vertex>, u32), KernelError> {
    let mut r = 0;
    loop {
        let order = bfs(view, &[x], r, None)?;
        if order.len() >= n {
            let depth = order[..n].iter().map(|p| p.1).max().unwrap_or(0);
            return Ok((order[..n].iter().map(|p| p.0).collect(), depth));
        }
        if r > 0 && order.len() == bfs(view, &[x], r - 1, None)?.len() {
            return Err(KernelError::Invalid(format!(
                "component of {x} has fewer than {n} vertices"
            )));
        }
        r += 1;
    }
}

/// Compress `K` to each local hull and spread it back with the witness
/// vectors: `out(y, z) = K(y, z) sum_x v_y(x) v_z(x) [y, z in H_x]`, where
/// `H_x` is the support ball of `x` padded along the canonical search to
/// `hull` vertices.
pub fn cp_approx<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
    witness: &PropertyAWitness,
    hull_len: usize,
) -> Result<CpReport, KernelError> {
    check_domain(d, k)?;
    let mut hull_depth = 0;
    for x in d.window.iter() {
        hull_depth = hull_depth.max(hull(d.view, x, hull_len)?.1);
    }
    let radius = k
        .radius
        .max(k.width + witness.locality_radius)
        .max(k.width + witness.support_radius + hull_depth);
    let vec_of = |y: Vertex| {
        witness.vectors.get(&y).ok_or(KernelError::Undefined {
            vertex: y,
            radius: witness.locality_radius,
        })
    };
    let kernel = d.tabulate(radius, |y| {
        let vy = vec_of(y)?;
        let mut hulls: HashMap<Vertex, HashSet<Vertex>> = HashMap::new();
        for &(x, _) in vy {
            hulls.insert(x, hull(d.view, x, hull_len)?.0);
        }
        let mut out = Vec::new();
        for (z, c) in k.row(d.view, y)? {
            let vz: HashMap<Vertex, f64> = vec_of(z)?.iter().copied().collect();
            let mut s = 0.0;
            for &(x, a) in vy {
                if let Some(&b) = vz.get(&x) {
                    let h = &hulls[&x];
                    if h.contains(&y) && h.contains(&z) {
                        s += a * b;
                    }
                }
            }
            out.push((z, c * s));
        }
        Ok(out)
    })?;
    if kernel.table.is_empty() {
        return Err(KernelError::Invalid(
            "witness support exceeds the domain window".into(),
        ));
    }
    let mut deviation: f64 = 0.0;
    for y in d.window.iter() {
        let Ok(got) = kernel.row(d.view, y) else {
            continue;
        };
        let want = k.row(d.view, y)?;
        for (z, c) in &want {
            let g = got
                .iter()
                .find(|e| e.0 == *z)
                .map_or(Complex64::new(0.0, 0.0), |e| e.1);
            deviation = deviation.max((c - g).norm());
        }
    }
    Ok(CpReport {
        kernel,
        deviation,
        hull: hull_len,
    })
}
