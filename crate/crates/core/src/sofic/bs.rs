//! ```text
//! bs r=1 5f0c... 6
//! bs r=1 a81e... 2
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use super::SoficError;
use crate::ball::{code_at, BallCode};
use crate::graph::{GraphView, Window};
use crate::urs::window_codes;

/// Empirical distribution of `r`-ball codes over a finite vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsHistogram {
    pub radius: u32,
    /// Digest of the generator set, when known.
    pub gens: Option<String>,
    pub counts: BTreeMap<BallCode, u64>,
    pub total: u64,
}

impl BsHistogram {
    pub fn frequency(&self, code: &BallCode) -> f64 {
        self.counts
            .get(code)
            .map_or(0.0, |&c| c as f64 / self.total as f64)
    }
}

pub fn bs_histogram<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<BsHistogram, SoficError> {
    let mut counts = BTreeMap::new();
    for c in window_codes(view, window, r)? {
        *counts.entry(c).or_insert(0) += 1;
    }
    Ok(BsHistogram {
        radius: r,
        gens: Some(view.gens().digest()),
        counts,
        total: window.len() as u64,
    })
}

/// Total variation distance, computed from integer counts so that equal
/// distributions give exactly zero.
pub fn bs_distance(a: &BsHistogram, b: &BsHistogram) -> Result<f64, SoficError> {
    if a.radius != b.radius {
        return Err(SoficError::RadiusMismatch(a.radius, b.radius));
    }
    if let (Some(x), Some(y)) = (&a.gens, &b.gens) {
        if x != y {
            return Err(SoficError::GeneratorMismatch);
        }
    }
    if a.total == 0 || b.total == 0 {
        return Err(SoficError::Invalid("empty histogram".into()));
    }
    let (na, nb) = (a.total as u128, b.total as u128);
    let mut diff: u128 = 0;
    let keys: std::collections::BTreeSet<&BallCode> =
        a.counts.keys().chain(b.counts.keys()).collect();
    for k in keys {
        let ca = *a.counts.get(k).unwrap_or(&0) as u128 * nb;
        let cb = *b.counts.get(k).unwrap_or(&0) as u128 * na;
        diff += ca.abs_diff(cb);
    }
    Ok(diff as f64 / (2 * na * nb) as f64)
}

pub fn write_histogram(h: &BsHistogram) -> String {
    let mut out = String::new();
    for (code, count) in &h.counts {
        let _ = writeln!(out, "bs r={} {} {}", h.radius, code.hex(), count);
    }
    out
}

pub fn parse_histogram(text: &str) -> Result<BsHistogram, SoficError> {
    let mut radius = None;
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let perr = |m: &str| SoficError::Parse {
            line,
            message: m.to_string(),
        };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let t: Vec<&str> = body.split_whitespace().collect();
        if t.len() != 4 || t[0] != "bs" {
            return Err(perr("expected `bs r=<r> <code-hex> <count>`"));
        }
        let r: u32 = t[1]
            .strip_prefix("r=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr("bad radius"))?;
        if *radius.get_or_insert(r) != r {
            return Err(perr("mixed radii"));
        }
        let code = BallCode::from_hex(t[2]).map_err(|_| perr("bad code"))?;
        let c: u64 = t[3].parse().map_err(|_| perr("bad count"))?;
        if counts.insert(code, c).is_some() {
            return Err(perr("duplicate code"));
        }
        total += c;
    }
    Ok(BsHistogram {
        radius: radius.ok_or(SoficError::Parse {
            line: 1,
            message: "empty histogram".into(),
        })?,
        gens: None,
        counts,
        total,
    })
}

/// A set of admissible ball codes at one radius.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceCodes {
    pub radius: u32,
    pub codes: HashSet<BallCode>,
}

/// Codes of all window vertices at radius `r`.
pub fn reference_codes<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    r: u32,
) -> Result<ReferenceCodes, SoficError> {
    Ok(ReferenceCodes {
        radius: r,
        codes: window_codes(view, window, r)?.into_iter().collect(),
    })
}

/// Fraction of the vertices of a finite view whose `r`-ball code is in the
/// reference set.
pub fn z_vertex_fraction<V: GraphView + ?Sized>(
    view: &V,
    reference: &ReferenceCodes,
    r: u32,
) -> Result<f64, SoficError> {
    if reference.radius != r {
        return Err(SoficError::RadiusMismatch(reference.radius, r));
    }
    let all = view
        .finite_vertices()
        .ok_or_else(|| SoficError::Invalid("fraction needs a finite view".into()))?;
    if all.is_empty() {
        return Ok(0.0);
    }
    let hits = all
        .par_iter()
        .map(|&v| code_at(view, v, r).map(|c| reference.codes.contains(&c) as usize))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum::<usize>();
    Ok(hits as f64 / all.len() as f64)
}
