use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{kernel_star, Domain, KernelError, LocalKernel};
use crate::graph::{bfs, GraphView, Window};
use crate::rng::stream;

/// A kernel restricted to `window x window`, stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub window: Window,
    /// `(column index, value)` per row.
    pub rows: Vec<Vec<(usize, Complex64)>>,
    /// Rows closer to the window frontier than the padding.
    pub collar: Vec<bool>,
    /// Rows where the kernel was defined; undefined collar rows are empty.
    pub defined: Vec<bool>,
}

impl TruncatedOperator {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// The compression to the rows and columns in `keep`.
    pub fn restrict(&self, keep: &[bool]) -> TruncatedOperator {
        let mut new_index = vec![usize::MAX; self.len()];
        let mut n = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = n;
                n += 1;
            }
        }
        let pick = |v: &[bool]| v.iter().zip(keep).filter(|p| *p.1).map(|p| *p.0).collect();
        TruncatedOperator {
            window: Window::new(self.window.iter().zip(keep).filter(|p| *p.1).map(|p| p.0)),
            rows: self
                .rows
                .iter()
                .zip(keep)
                .filter(|p| *p.1)
                .map(|(r, _)| {
                    r.iter()
                        .filter(|e| keep[e.0])
                        .map(|&(j, c)| (new_index[j], c))
                        .collect()
                })
                .collect(),
            collar: pick(&self.collar),
            defined: pick(&self.defined),
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, c)| c * v[j]).sum())
            .collect()
    }

    fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, c) in r {
                out[j] += c.conj() * v[i];
            }
        }
        out
    }

    /// Power iteration on `T* T`. Every iterate gives a valid lower bound
    /// `|Tv| / |v|` on the operator norm; returns the best one and whether
    /// the iteration settled.
    pub fn norm_lower_bound(&self, iters: usize, seed: u64) -> (f64, bool) {
        if self.is_empty() {
            return (0.0, true);
        }
        let mut rng = stream(seed, "norm/start");
        let mut v: Vec<Complex64> = (0..self.len())
            .map(|_| Complex64::new(rng.gen_range(0.5..1.5), 0.0))
            .collect();
        let mut best: f64 = 0.0;
        let mut last = f64::NAN;
        for _ in 0..iters {
            let nv = norm(&v);
            if nv == 0.0 {
                return (best, true);
            }
            let tv = self.apply(&v);
            let est = norm(&tv) / nv;
            best = best.max(est);
            if (est - last).abs() <= 1e-13 * est.max(1.0) {
                return (best, true);
            }
            last = est;
            v = self.apply_adjoint(&tv);
            let n = norm(&v);
            if n == 0.0 {
                return (best, true);
            }
            v.iter_mut().for_each(|x| *x /= n);
        }
        (best, false)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Materialize `K` on a window. Rows within `padding` of the frontier are
/// flagged; an undefined row outside the collar is an error.
pub fn truncate<V: GraphView + ?Sized>(
    view: &V,
    k: &LocalKernel,
    window: &Window,
    padding: u32,
) -> Result<TruncatedOperator, KernelError> {
    let depth = window.collar_depth(view);
    let collar: Vec<bool> = depth.iter().map(|&d| d < padding).collect();
    let rows: Vec<Option<Vec<(usize, Complex64)>>> = window
        .vertices()
        .par_iter()
        .zip(&collar)
        .map(|(&x, &in_collar)| match k.row(view, x) {
            Ok(r) => Ok(Some(
                r.into_iter()
                    .filter_map(|(y, c)| window.index_of(y).map(|j| (j, c)))
                    .collect(),
            )),
            Err(KernelError::Undefined { .. }) if in_collar => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, KernelError>>()?;
    let defined = rows.iter().map(Option::is_some).collect();
    Ok(TruncatedOperator {
        window: window.clone(),
        rows: rows.into_iter().map(Option::unwrap_or_default).collect(),
        collar,
        defined,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    /// `(window size, lower bound from that window)`.
    pub per_window: Vec<(usize, f64)>,
    pub converged: bool,
}

/// Schur bound `sqrt(max row sum * max column sum)` of entry moduli.
fn schur<V: GraphView + ?Sized>(d: &Domain<'_, V>, k: &LocalKernel) -> Result<f64, KernelError> {
    let row_max = |k: &LocalKernel| {
        k.table
            .values()
            .map(|r| r.iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let star = kernel_star(d, k)?;
    Ok((row_max(k) * row_max(&star)).sqrt())
}

/// Lower bounds from compressions to the defined part of each window,
/// upper bound from the Schur test on the kernel table.
pub fn norm_estimate<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
    windows: &[Window],
    iters: usize,
) -> Result<NormEstimate, KernelError> {
    let mut per_window = Vec::new();
    let mut converged = true;
    for w in windows {
        let t = truncate(d.view, k, w, k.width)?;
        let t = t.restrict(&t.defined);
        let (lb, ok) = t.norm_lower_bound(iters, w.len() as u64);
        converged &= ok;
        per_window.push((w.len(), lb));
    }
    Ok(NormEstimate {
        lower: per_window.iter().map(|p| p.1).fold(0.0, f64::max),
        upper: schur(d, k)?,
        per_window,
        converged,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub size: usize,
    /// Vertices with a move leaving the window, per window vertex.
    pub boundary_ratio: f64,
    /// `(1/|F|) sum_{x in F} K(x, x)`.
    pub value: Complex64,
    /// `|KP - PK|_HS`.
    pub commutator: f64,
    /// `|KP - PK|_HS / |P|_HS`.
    pub defect: f64,
    /// `M sqrt(2 D |C| / |F|)` with `M` the entry bound, `D` the largest
    /// row or column support and `C` the window vertices within the kernel
    /// width of the outside.
    pub defect_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub entries: Vec<TraceEntry>,
    /// Set when the windows are not increasing and nested.
    pub not_nested: bool,
}

impl TraceReport {
    /// Largest minus smallest value over the last `n` windows.
    pub fn oscillation(&self, n: usize) -> f64 {
        let tail = &self.entries[self.entries.len().saturating_sub(n)..];
        let re = tail.iter().map(|e| e.value.re);
        let hi = re.clone().fold(f64::NEG_INFINITY, f64::max);
        let lo = re.fold(f64::INFINITY, f64::min);
        if tail.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

pub fn amenable_trace<V: GraphView + ?Sized>(
    view: &V,
    k: &LocalKernel,
    windows: &[Window],
) -> Result<TraceReport, KernelError> {
    let mut entries = Vec::new();
    let mut not_nested = false;
    for (i, f) in windows.iter().enumerate() {
        if f.is_empty() {
            return Err(KernelError::Invalid("empty window".into()));
        }
        if i > 0 {
            let prev = &windows[i - 1];
            not_nested |= prev.len() >= f.len() || !prev.iter().all(|v| f.contains(v));
        }
        let depth = f.collar_depth(view);
        let boundary = depth.iter().filter(|&&d| d == 0).count();
        let mut value = Complex64::new(0.0, 0.0);
        let mut cross = 0.0;
        let mut support = 0usize;
        for x in f.iter() {
            let row = k.row(view, x)?;
            support = support.max(row.len());
            for (y, c) in row {
                if y == x {
                    value += c;
                }
                if !f.contains(y) {
                    cross += c.norm_sqr();
                }
            }
        }
        for (x, _) in bfs(view, f.vertices(), k.width, None)? {
            if f.contains(x) {
                continue;
            }
            for (y, c) in k.row(view, x)? {
                if f.contains(y) {
                    cross += c.norm_sqr();
                }
            }
        }
        let near: Vec<_> = f
            .iter()
            .zip(&depth)
            .filter(|&(_, &d)| k.width > 0 && d < k.width)
            .map(|p| p.0)
            .collect();
        for &y in &near {
            support = support.max(bfs(view, &[y], k.width, None)?.len());
        }
        let n = f.len() as f64;
        let commutator = cross.sqrt();
        entries.push(TraceEntry {
            size: f.len(),
            boundary_ratio: boundary as f64 / n,
            value: value / n,
            commutator,
            defect: commutator / n.sqrt(),
            defect_bound: k.bound() * (2.0 * support as f64 * near.len() as f64 / n).sqrt(),
        });
    }
    Ok(TraceReport {
        entries,
        not_nested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cycle, grid};
    use crate::graph::LazyGrid;
    use crate::kernel::{identity, kappa, kernel_add, kernel_mul, kernel_star, rho};
    use crate::urs::er_classes;

    #[test]
    fn identity_norm_and_trace() {
        let (g, _) = grid(1, 1);
        let w = Window::ball(&g, LazyGrid::origin(), 5).unwrap();
        let d = Domain::new(&g, w.clone());
        let id = identity(&d).unwrap();
        let est = norm_estimate(&d, &id, std::slice::from_ref(&w), 100).unwrap();
        assert_eq!((est.lower, est.upper), (1.0, 1.0));
        let tr = amenable_trace(&g, &id, &[w]).unwrap();
        assert_eq!(tr.entries[0].value, Complex64::new(1.0, 0.0));
        assert_eq!(tr.entries[0].commutator, 0.0);
    }

    #[test]
    fn cycle_arc_commutator() {
        let g = cycle(8);
        let d = Domain::new(&g, Window::all(&g).unwrap());
        let s = kappa(&d, &[0]).unwrap();
        let tr = amenable_trace(&g, &s, &[Window::new(0..4)]).unwrap();
        let e = &tr.entries[0];
        assert!((e.commutator - 2f64.sqrt()).abs() < 1e-12);
        assert!(e.defect <= e.defect_bound);
        assert_eq!(e.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn shift_plus_adjoint_approaches_two() {
        let g = cycle(2048);
        let d = Domain::new(&g, Window::new(0..64));
        let s = kappa(&d, &[0]).unwrap();
        let a = kernel_add(&d, &s, &kernel_star(&d, &s).unwrap()).unwrap();
        let windows: Vec<Window> = [8u64, 32, 128, 512]
            .iter()
            .map(|&m| Window::new(0..m))
            .collect();
        let est = norm_estimate(&d, &a, &windows, 20_000).unwrap();
        assert_eq!(est.upper, 2.0);
        let lows: Vec<f64> = est.per_window.iter().map(|p| p.1).collect();
        assert!(lows.windows(2).all(|p| p[0] <= p[1] + 1e-12));
        assert!(est.lower > 1.99 && est.lower <= 2.0);
    }

    #[test]
    fn class_frequencies_and_positivity() {
        let g = cycle(30);
        let w = Window::new(0..12);
        let p = er_classes(&g, &Window::all(&g).unwrap(), 1).unwrap();
        let r = rho(&g, &p, &[Complex64::new(1.0, 0.0)]).unwrap();
        let tr = amenable_trace(&g, &r, std::slice::from_ref(&w)).unwrap();
        assert_eq!(tr.entries[0].value.re, 1.0);
        let d = Domain::new(&g, Window::all(&g).unwrap());
        let s = kappa(&d, &[0, 0, 1, 0]).unwrap();
        let sts = kernel_mul(&d, &kernel_star(&d, &s).unwrap(), &s).unwrap();
        assert!(amenable_trace(&g, &sts, &[w]).unwrap().entries[0].value.re >= 0.0);
    }
}
