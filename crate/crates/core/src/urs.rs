//! Window certificates for the repetition property, genericity and
//! Z-regularity, and the partitions of a window by ball type.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::ball::{automorphism_transport, code_at, BallCode};
use crate::graph::{bfs, GraphError, GraphView, Vertex, Window};

#[derive(Debug, Error)]
pub enum UrsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("partitions come from different windows")]
    WindowMismatch,
    #[error("fine partition at radius {fine} cannot refine radius {coarse}")]
    RadiusMismatch { fine: u32, coarse: u32 },
    #[error("class {0} straddles two coarse classes")]
    NotARefinement(u32),
    #[error("malformed certificate: {0}")]
    Parse(String),
}

/// A window partitioned by the codes of radius-`radius` balls.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPartition {
    pub radius: u32,
    pub window: Window,
    /// Class codes, numbered by first appearance in window order.
    pub codes: Vec<BallCode>,
    pub class_of: Vec<u32>,
    pub members: Vec<Vec<Vertex>>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn class_of_vertex(&self, v: Vertex) -> Option<u32> {
        self.window.index_of(v).map(|i| self.class_of[i])
    }

    pub fn class_of_code(&self, code: &BallCode) -> Option<u32> {
        self.codes.iter().position(|c| c == code).map(|i| i as u32)
    }

    /// Fraction of window vertices in each class.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.window.len() as f64;
        self.members.iter().map(|m| m.len() as f64 / n).collect()
    }
}

/// Codes of all window vertices at radius `r`, computed in parallel.
pub fn window_codes<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<Vec<BallCode>, GraphError> {
    window
        .vertices()
        .par_iter()
        .map(|&v| code_at(view, v, r))
        .collect()
}

pub fn er_classes<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<ClassPartition, UrsError> {
    let codes = window_codes(view, window, r)?;
    let mut ids: HashMap<&BallCode, u32> = HashMap::new();
    let mut class_codes = Vec::new();
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    let mut class_of = Vec::with_capacity(codes.len());
    for (v, c) in window.iter().zip(&codes) {
        let id = *ids.entry(c).or_insert_with(|| {
            class_codes.push(c.clone());
            members.push(Vec::new());
            (class_codes.len() - 1) as u32
        });
        members[id as usize].push(v);
        class_of.push(id);
    }
    Ok(ClassPartition {
        radius: r,
        window: window.clone(),
        codes: class_codes,
        class_of,
        members,
    })
}

/// The map sending each fine class to the coarse class containing it.
pub fn refinement_map(
    fine: &ClassPartition,
    coarse: &ClassPartition,
) -> Result<Vec<u32>, UrsError> {
    if fine.window != coarse.window {
        return Err(UrsError::WindowMismatch);
    }
    if fine.radius < coarse.radius {
        return Err(UrsError::RadiusMismatch {
            fine: fine.radius,
            coarse: coarse.radius,
        });
    }
    let mut map = vec![u32::MAX; fine.len()];
    for (i, (&f, &c)) in fine.class_of.iter().zip(&coarse.class_of).enumerate() {
        let slot = &mut map[f as usize];
        if *slot == u32::MAX {
            *slot = c;
        } else if *slot != c {
            let _ = i;
            return Err(UrsError::NotARefinement(f));
        }
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringReport {
    pub radius: u32,
    /// Largest over window vertices of the least radius whose ball meets
    /// every class of the window.
    pub t: u32,
    /// Some ball needed to reach the window frontier, so `t` is only an
    /// estimate from inside the window.
    pub frontier_binds: bool,
    /// Vertices whose in-window search never met every class.
    pub uncovered: usize,
}

/// Covering radius of the radius-`r` classes, searching inside the window.
pub fn covering_radius<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<CoveringReport, UrsError> {
    let part = er_classes(view, window, r)?;
    let k = part.len();
    let depth = window.collar_depth(view);
    let per: Vec<(Option<u32>, bool)> = window
        .vertices()
        .par_iter()
        .map(|&p| -> Result<(Option<u32>, bool), GraphError> {
            let order = bfs(view, &[p], u32::MAX, Some(window))?;
            let mut seen = vec![false; k];
            let mut count = 0;
            let mut touched = false;
            for (w, d) in order {
                let i = window.index_of(w).expect("search stays in window");
                touched |= depth[i] == 0;
                let c = part.class_of[i] as usize;
                if !seen[c] {
                    seen[c] = true;
                    count += 1;
                    if count == k {
                        return Ok((Some(d), touched));
                    }
                }
            }
            Ok((None, touched))
        })
        .collect::<Result<_, _>>()?;
    let mut t = 0;
    let mut frontier_binds = false;
    let mut uncovered = 0;
    for (tp, touched) in per {
        match tp {
            Some(x) => {
                t = t.max(x);
                frontier_binds |= touched;
            }
            None => {
                uncovered += 1;
                frontier_binds = true;
            }
        }
    }
    Ok(CoveringReport {
        radius: r,
        t,
        frontier_binds,
        uncovered,
    })
}

/// Largest distance from a window vertex to the nearest window vertex whose
/// `R`-ball matches that of `x`; `None` when some vertex has no match in
/// reach.
pub fn repetition_window<V: GraphView + ?Sized>(
    view: &V,
    x: Vertex,
    r: u32,
    window: &Window,
) -> Result<Option<u32>, UrsError> {
    let target = code_at(view, x, r)?;
    let codes = window_codes(view, window, r)?;
    let sources: Vec<Vertex> = window
        .iter()
        .zip(&codes)
        .filter(|(_, c)| **c == target)
        .map(|(v, _)| v)
        .collect();
    if sources.is_empty() {
        return Ok(None);
    }
    let order = bfs(view, &sources, u32::MAX, Some(window))?;
    if order.len() < window.len() {
        return Ok(None);
    }
    Ok(order.last().map(|&(_, d)| d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityOutcome {
    Certified { s: u32 },
    Counterexample { x: Vertex, y: Vertex, s: u32 },
}

/// Finite evidence that nearby vertices have distinguishable balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityCertificate {
    pub r: u32,
    pub s_max: u32,
    pub window: String,
    pub window_len: usize,
    pub frontier_skipped: usize,
    pub outcome: GenericityOutcome,
}

impl GenericityCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, GenericityOutcome::Certified { .. })
    }
}

impl fmt::Display for GenericityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "genericity R={} Smax={} window={} window_len={} frontier_skipped={} ",
            self.r, self.s_max, self.window, self.window_len, self.frontier_skipped
        )?;
        match self.outcome {
            GenericityOutcome::Certified { s } => write!(f, "status=certified S={s}"),
            GenericityOutcome::Counterexample { x, y, s } => {
                write!(f, "status=counterexample S={s} pair={x},{y}")
            }
        }
    }
}

impl FromStr for GenericityCertificate {
    type Err = UrsError;

    fn from_str(s: &str) -> Result<Self, UrsError> {
        let bad = |m: &str| UrsError::Parse(m.to_string());
        let mut toks = s.split_whitespace();
        if toks.next() != Some("genericity") {
            return Err(bad("expected `genericity` record"));
        }
        let kv: HashMap<&str, &str> = toks.filter_map(|t| t.split_once('=')).collect();
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| bad(&format!("missing `{k}`")))
        };
        let num = |k: &str| -> Result<u64, UrsError> {
            get(k)?
                .parse()
                .map_err(|_| bad(&format!("bad number for `{k}`")))
        };
        let outcome = match get("status")? {
            "certified" => GenericityOutcome::Certified {
                s: num("S")? as u32,
            },
            "counterexample" => {
                let (a, b) = get("pair")?
                    .split_once(',')
                    .ok_or_else(|| bad("bad pair"))?;
                GenericityOutcome::Counterexample {
                    x: a.parse().map_err(|_| bad("bad pair"))?,
                    y: b.parse().map_err(|_| bad("bad pair"))?,
                    s: num("S")? as u32,
                }
            }
            other => return Err(bad(&format!("unknown status `{other}`"))),
        };
        Ok(Self {
            r: num("R")? as u32,
            s_max: num("Smax")? as u32,
            window: get("window")?.to_string(),
            window_len: num("window_len")? as usize,
            frontier_skipped: num("frontier_skipped")? as usize,
            outcome,
        })
    }
}

/// Lexicographically first pair `(x, y)` (window order) of distinct
/// non-skipped vertices with `d(x, y) <= r` and equal codes.
fn first_collision<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
    codes: &[Option<BallCode>],
) -> Result<Option<(usize, usize)>, GraphError> {
    let hits: Vec<Option<(usize, usize)>> = (0..window.len())
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, usize)>, GraphError> {
            let Some(ci) = &codes[i] else { return Ok(None) };
            let mut best: Option<usize> = None;
            for (w, d) in bfs(view, &[window.vertices()[i]], r, None)? {
                if d == 0 {
                    continue;
                }
                if let Some(j) = window.index_of(w) {
                    if j > i && codes[j].as_ref() == Some(ci) && best.is_none_or(|b| j < b) {
                        best = Some(j);
                    }
                }
            }
            Ok(best.map(|j| (i, j)))
        })
        .collect::<Result<_, _>>()?;
    Ok(hits.into_iter().flatten().next())
}

/// Smallest `S <= s_max` such that distinct window vertices at distance at
/// most `r` have different `S`-ball codes. Vertices whose `S`-ball leaves
/// the window are skipped and counted.
pub fn genericity_radius<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
    s_max: u32,
    label: &str,
) -> Result<GenericityCertificate, UrsError> {
    let depth = window.collar_depth(view);
    let mut last = None;
    for s in 0..=s_max {
        let codes: Vec<Option<BallCode>> = window
            .vertices()
            .par_iter()
            .zip(&depth)
            .map(|(&v, &d)| {
                if d >= s {
                    code_at(view, v, s).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_, _>>()?;
        let skipped = codes.iter().filter(|c| c.is_none()).count();
        let outcome = match first_collision(view, window, r, &codes)? {
            None => GenericityOutcome::Certified { s },
            Some((i, j)) => GenericityOutcome::Counterexample {
                x: window.vertices()[i],
                y: window.vertices()[j],
                s,
            },
        };
        let cert = GenericityCertificate {
            r,
            s_max,
            window: label.to_string(),
            window_len: window.len(),
            frontier_skipped: skipped,
            outcome,
        };
        if cert.is_certified() {
            return Ok(cert);
        }
        last = Some(cert);
    }
    Ok(last.expect("at least one radius tried"))
}

/// Least radius at which distinct window vertices closer than `n` have
/// different ball codes, if it is at most `r_max`.
pub fn separation_radius<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    n: u32,
    r_max: u32,
) -> Result<Option<u32>, UrsError> {
    let cert = genericity_radius(view, window, n.saturating_sub(1), r_max, "separation")?;
    Ok(match cert.outcome {
        GenericityOutcome::Certified { s } => Some(s),
        GenericityOutcome::Counterexample { .. } => None,
    })
}

/// Whether a finite connected colored view has no nontrivial
/// colored-labeled automorphism. One base vertex suffices: an automorphism
/// is forced by the image of any single vertex.
pub fn z_regular<V: GraphView + ?Sized>(view: &V) -> Result<bool, UrsError> {
    let all = view
        .finite_vertices()
        .ok_or_else(|| GraphError::Invalid("Z-regularity needs a finite view".into()))?;
    let Some(&v0) = all.first() else {
        return Ok(true);
    };
    for &w in &all[1..] {
        if automorphism_transport(view, v0, w)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}
