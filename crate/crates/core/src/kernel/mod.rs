//! Local kernels: bounded-range matrices on the vertices of a view whose
//! entries depend only on the ball type of the row vertex. Kernels are
//! stored per ball type and materialized on finite windows on demand.

mod cp;
mod format;
mod ops;
mod truncate;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ball::{ball_code, extract_ball, BallCode};
use crate::graph::{GraphError, GraphView, Vertex, Window};

pub use cp::{cp_approx, hull_size, CpReport};
pub use format::{parse_kernel, write_kernel};
pub use ops::{
    diag, identity, kappa, kernel_add, kernel_mul, kernel_scale, kernel_star, qr_project, rho,
    rho_translate,
};
pub use truncate::{
    amenable_trace, norm_estimate, truncate, NormEstimate, TraceEntry, TraceReport,
    TruncatedOperator,
};

/// Two complex numbers this close are the same entry.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("kernels act on different generator sets")]
    GeneratorMismatch,
    #[error("kernel undefined at vertex {vertex}: radius-{radius} ball type not in its table")]
    Undefined { vertex: Vertex, radius: u32 },
    #[error("entries of ball type {0} differ between two vertices; the result is not local at this radius")]
    NotLocal(String),
    #[error("{0}")]
    Invalid(String),
    #[error("malformed kernel at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A row of a kernel: `(canonical address in the row vertex's ball, value)`,
/// sorted by address, zero entries omitted.
pub type Row = Vec<(u32, Complex64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalKernel {
    /// Largest distance between the row vertex and a nonzero entry.
    pub width: u32,
    /// Radius of the ball type that determines a row; at least `width`.
    pub radius: u32,
    /// Digest of the generator set.
    pub gens: String,
    pub table: BTreeMap<BallCode, Row>,
}

impl LocalKernel {
    /// Largest entry modulus.
    pub fn bound(&self) -> f64 {
        self.table
            .values()
            .flat_map(|r| r.iter().map(|e| e.1.norm()))
            .fold(0.0, f64::max)
    }

    pub fn row_code<V: GraphView + ?Sized>(
        &self,
        view: &V,
        x: Vertex,
    ) -> Result<BallCode, KernelError> {
        Ok(ball_code(&extract_ball(view, x, self.radius)?))
    }

    /// The nonzero entries `K(x, y)` of row `x`, by vertex.
    pub fn row<V: GraphView + ?Sized>(
        &self,
        view: &V,
        x: Vertex,
    ) -> Result<Vec<(Vertex, Complex64)>, KernelError> {
        let ball = extract_ball(view, x, self.radius)?;
        let row = self
            .table
            .get(&ball_code(&ball))
            .ok_or(KernelError::Undefined {
                vertex: x,
                radius: self.radius,
            })?;
        Ok(row
            .iter()
            .map(|&(a, c)| (ball.vertices[a as usize], c))
            .collect())
    }

    /// Whether two kernels agree on every shared type, within `tol`.
    pub fn approx_eq(&self, other: &LocalKernel, tol: f64) -> bool {
        self.gens == other.gens
            && self.table.len() == other.table.len()
            && self
                .table
                .iter()
                .all(|(c, r)| other.table.get(c).is_some_and(|s| rows_close(r, s, tol)))
    }
}

pub fn kernel_eval<V: GraphView + ?Sized>(
    k: &LocalKernel,
    view: &V,
    x: Vertex,
    y: Vertex,
) -> Result<Complex64, KernelError> {
    Ok(k.row(view, x)?
        .into_iter()
        .find(|e| e.0 == y)
        .map_or(Complex64::new(0.0, 0.0), |e| e.1))
}

/// Whether two kernels have the same rows at every window vertex, within
/// `tol`; kernels may use different code radii.
pub fn kernels_agree<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    a: &LocalKernel,
    b: &LocalKernel,
    tol: f64,
) -> Result<bool, KernelError> {
    for x in window.iter() {
        let mut m: BTreeMap<Vertex, Complex64> = a.row(view, x)?.into_iter().collect();
        for (y, v) in b.row(view, x)? {
            *m.entry(y).or_default() -= v;
        }
        if m.values().any(|d| d.norm() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rows_close(a: &Row, b: &Row, tol: f64) -> bool {
    let mut m: BTreeMap<u32, Complex64> = a.iter().copied().collect();
    for &(i, v) in b {
        *m.entry(i).or_default() -= v;
    }
    m.values().all(|d| d.norm() <= tol)
}

/// The vertices on which kernel tables are built: every ball type seen at a
/// window vertex gets a row.
pub struct Domain<'a, V: GraphView + ?Sized> {
    pub view: &'a V,
    pub window: Window,
}

impl<'a, V: GraphView + ?Sized> Domain<'a, V> {
    pub fn new(view: &'a V, window: Window) -> Self {
        Self { view, window }
    }

    pub fn gens(&self) -> String {
        self.view.gens().digest()
    }

    /// Tabulate a kernel of code radius `radius` from a row rule. Vertices
    /// where the rule meets an undefined operand are skipped; a type whose
    /// rows disagree between two vertices is an error.
    pub fn tabulate<F>(&self, radius: u32, rule: F) -> Result<LocalKernel, KernelError>
    where
        F: Fn(Vertex) -> Result<Vec<(Vertex, Complex64)>, KernelError> + Sync,
    {
        let rows: Vec<Option<(BallCode, Row, u32)>> = self
            .window
            .vertices()
            .par_iter()
            .map(|&x| {
                let ball = extract_ball(self.view, x, radius)?;
                let entries = match rule(x) {
                    Ok(e) => e,
                    Err(KernelError::Undefined { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let mut merged: BTreeMap<u32, Complex64> = BTreeMap::new();
                for (y, c) in entries {
                    let a = ball.index_of(y).ok_or_else(|| {
                        KernelError::Invalid(format!(
                            "entry at {y} lies outside the radius-{radius} ball of {x}"
                        ))
                    })?;
                    *merged.entry(a as u32).or_default() += c;
                }
                let row: Row = merged
                    .into_iter()
                    .filter(|e| e.1 != Complex64::new(0.0, 0.0))
                    .collect();
                let width = row
                    .iter()
                    .map(|&(a, _)| ball.depth[a as usize])
                    .max()
                    .unwrap_or(0);
                Ok(Some((ball_code(&ball), row, width)))
            })
            .collect::<Result<_, KernelError>>()?;
        let mut table = BTreeMap::new();
        let mut width = 0;
        for (code, row, w) in rows.into_iter().flatten() {
            width = width.max(w);
            if let Some(prev) = table.get(&code) {
                if !rows_close(prev, &row, 1e-9) {
                    return Err(KernelError::NotLocal(code.hex()));
                }
                continue;
            }
            table.insert(code, row);
        }
        Ok(LocalKernel {
            width,
            radius,
            gens: self.gens(),
            table,
        })
    }
}

fn same_gens(a: &LocalKernel, b: &LocalKernel) -> Result<(), KernelError> {
    if a.gens != b.gens {
        return Err(KernelError::GeneratorMismatch);
    }
    Ok(())
}

fn check_domain<V: GraphView + ?Sized>(
    d: &Domain<'_, V>,
    k: &LocalKernel,
) -> Result<(), KernelError> {
    if d.gens() != k.gens {
        return Err(KernelError::GeneratorMismatch);
    }
    Ok(())
}
