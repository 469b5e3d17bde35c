use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{check_domain, same_gens, Domain, KernelError, LocalKernel};
use crate::ball::code_at;
use crate::gens::Gen;
use crate::graph::{bfs, GraphView, Vertex};
use crate::urs::ClassPartition;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn collect(acc: BTreeMap<Vertex, Complex64>) -> Vec<(Vertex, Complex64)> {
    acc.into_iter().collect()
}

pub fn identity<V: GraphView + ?Sized>(d: &Domain<'_, V>) -> Result<LocalKernel, KernelError> {
    d.tabulate(0, |x| Ok(vec![(x, one())]))
}

/// The permutation kernel of a word: `(x, y)` is `1` exactly when `y` is
/// reached from `x` by the inverses of the letters, first letter first, so
/// that `kappa(u) kappa(v) = kappa(uv)`.
pub fn kappa<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    word: &[Gen],
) -> Result<LocalKernel, KernelError> {
    let gens = d.view.gens();
    if let Some(&g) = word.iter().find(|&&g| g >= gens.len()) {
        return Err(KernelError::Invalid(format!("no generator {g}")));
    }
    d.tabulate(word.len() as u32, |x| {
        let mut y = x;
        for &g in word {
            y = d.view.step(y, gens.inverse(g))?;
        }
        Ok(vec![(y, one())])
    })
}

/// The diagonal kernel with value `a[c]` on the vertices of class `c`.
pub fn rho<V: GraphView + ?Sized>(
    view: &V,
    partition: &ClassPartition,
    a: &[Complex64],
) -> Result<LocalKernel, KernelError> {
    if a.len() != partition.len() {
        return Err(KernelError::Invalid(format!(
            "{} values for {} classes",
            a.len(),
            partition.len()
        )));
    }
    let table = partition
        .codes
        .iter()
        .zip(a)
        .map(|(code, &v)| {
            let row = if v == Complex64::new(0.0, 0.0) {
                vec![]
            } else {
                vec![(0, v)]
            };
            (code.clone(), row)
        })
        .collect();
    Ok(LocalKernel {
        width: 0,
        radius: partition.radius,
        gens: view.gens().digest(),
        table,
    })
}

/// The diagonal kernel of the translate of `a` by `word`: value `a[c]` at
/// `x` when the vertex that [`kappa`] of `word` sends `x` to lies in class
/// `c`. It equals `kappa(word) rho(a) kappa(word)^-1`.
pub fn rho_translate<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    partition: &ClassPartition,
    a: &[Complex64],
    word: &[Gen],
) -> Result<LocalKernel, KernelError> {
    if a.len() != partition.len() {
        return Err(KernelError::Invalid(format!(
            "{} values for {} classes",
            a.len(),
            partition.len()
        )));
    }
    let gens = d.view.gens();
    d.tabulate(partition.radius + word.len() as u32, |x| {
        let mut y = x;
        for &g in word {
            y = d.view.step(y, gens.inverse(g))?;
        }
        let code = code_at(d.view, y, partition.radius)?;
        let c = partition
            .class_of_code(&code)
            .ok_or(KernelError::Undefined {
                vertex: y,
                radius: partition.radius,
            })?;
        let v = a[c as usize];
        Ok(if v == Complex64::new(0.0, 0.0) {
            vec![]
        } else {
            vec![(x, v)]
        })
    })
}

pub fn diag<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
) -> Result<LocalKernel, KernelError> {
    check_domain(d, k)?;
    d.tabulate(k.radius, |x| {
        Ok(k.row(d.view, x)?.into_iter().filter(|e| e.0 == x).collect())
    })
}

pub fn kernel_scale(k: &LocalKernel, c: Complex64) -> LocalKernel {
    let mut out = k.clone();
    for row in out.table.values_mut() {
        for e in row.iter_mut() {
            e.1 *= c;
        }
        row.retain(|e| e.1 != Complex64::new(0.0, 0.0));
    }
    out
}

pub fn kernel_add<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
    l: &LocalKernel,
) -> Result<LocalKernel, KernelError> {
    same_gens(k, l)?;
    check_domain(d, k)?;
    d.tabulate(k.radius.max(l.radius), |x| {
        let mut acc = BTreeMap::new();
        for (y, c) in k.row(d.view, x)?.into_iter().chain(l.row(d.view, x)?) {
            *acc.entry(y).or_default() += c;
        }
        Ok(collect(acc))
    })
}

/// `KL(x, y) = sum_z K(x, z) L(z, y)`.
pub fn kernel_mul<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
    l: &LocalKernel,
) -> Result<LocalKernel, KernelError> {
    same_gens(k, l)?;
    check_domain(d, k)?;
    d.tabulate(k.radius.max(k.width + l.radius), |x| {
        let mut acc = BTreeMap::new();
        for (z, a) in k.row(d.view, x)? {
            for (y, b) in l.row(d.view, z)? {
                *acc.entry(y).or_default() += a * b;
            }
        }
        Ok(collect(acc))
    })
}

/// `K*(x, y) = conj K(y, x)`.
pub fn kernel_star<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
) -> Result<LocalKernel, KernelError> {
    check_domain(d, k)?;
    d.tabulate(k.width + k.radius, |x| {
        let mut out = Vec::new();
        for (y, _) in bfs(d.view, &[x], k.width, None)? {
            if let Some(&(_, c)) = k.row(d.view, y)?.iter().find(|e| e.0 == x) {
                out.push((y, c.conj()));
            }
        }
        Ok(out)
    })
}

/// Keep `K(x, y)` only when `x` and `y` have the same radius-`r` ball type.
pub fn qr_project<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
    r: u32,
) -> Result<LocalKernel, KernelError> {
    check_domain(d, k)?;
    d.tabulate(k.radius.max(k.width + r), |x| {
        let cx = code_at(d.view, x, r)?;
        let mut out = Vec::new();
        for (y, c) in k.row(d.view, x)? {
            if y == x || code_at(d.view, y, r)? == cx {
                out.push((y, c));
            }
        }
        Ok(out)
    })
}
