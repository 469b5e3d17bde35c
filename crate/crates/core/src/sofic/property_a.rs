use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::SoficError;
use crate::constructions::RayEncoding;
use crate::graph::{bfs, neighbors, GraphView, LazyTree, Vertex, Window};

/// Unit vectors `x -> v_x` with finite support, one per covered vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyAWitness {
    pub scale: u32,
    pub support_radius: u32,
    pub locality_radius: u32,
    /// Sorted `(vertex, weight)` entries.
    pub vectors: BTreeMap<Vertex, Vec<(Vertex, f64)>>,
}

impl PropertyAWitness {
    pub fn norm(&self, x: Vertex) -> Option<f64> {
        self.vectors
            .get(&x)
            .map(|v| v.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt())
    }

    /// `||v_x - v_y||^2`.
    pub fn distance_sq(&self, x: Vertex, y: Vertex) -> Option<f64> {
        let (a, b) = (self.vectors.get(&x)?, self.vectors.get(&y)?);
        let (mut i, mut j, mut s) = (0, 0, 0.0);
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(&(u, p)), Some(&(w, q))) if u == w => {
                    i += 1;
                    j += 1;
                    p - q
                }
                (Some(&(u, p)), Some(&(w, _))) if u < w => {
                    i += 1;
                    p
                }
                (Some(&(_, p)), None) => {
                    i += 1;
                    p
                }
                (_, Some(&(_, q))) => {
                    j += 1;
                    q
                }
                (None, None) => unreachable!(),
            };
            s += d * d;
        }
        Some(s)
    }
}

fn uniform(support: impl IntoIterator<Item = Vertex>) -> Vec<(Vertex, f64)> {
    let set: BTreeSet<Vertex> = support.into_iter().collect();
    let w = 1.0 / (set.len() as f64).sqrt();
    set.into_iter().map(|v| (v, w)).collect()
}

/// `2 d rho + (1/sqrt(2 rho d + 1) - 1)^2`.
pub fn ball_defect_bound(rho: f64, d: usize) -> f64 {
    let d = d as f64;
    2.0 * d * rho + (1.0 / (2.0 * rho * d + 1.0).sqrt() - 1.0).powi(2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairDefect {
    pub x: Vertex,
    pub y: Vertex,
    pub defect_sq: f64,
    /// Sphere-to-ball ratio of the smaller of the two balls.
    pub rho: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallWitnessReport {
    pub witness: PropertyAWitness,
    pub degree: usize,
    pub pairs: usize,
    pub max_defect_sq: f64,
    /// The adjacent pair closest to its bound.
    pub tightest: Option<PairDefect>,
    pub violations: Vec<PairDefect>,
}

/// Normalized indicators of `k`-balls around every vertex whose
/// `(k+1)`-ball lies in the window, with the defect of every adjacent pair
/// checked against [`ball_defect_bound`].
pub fn property_a_ball_witness<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    k: u32,
) -> Result<BallWitnessReport, SoficError> {
    let covered = window.interior(view, k + 1);
    if covered.is_empty() {
        return Err(SoficError::Invalid(format!(
            "no window vertex has its {}-ball inside",
            k + 1
        )));
    }
    let balls: Vec<(Vertex, Vec<Vertex>, usize)> = covered
        .par_iter()
        .map(|&x| {
            let b = bfs(view, &[x], k, None)?;
            let sphere = b.iter().filter(|&&(_, d)| d == k).count();
            Ok((x, b.into_iter().map(|(v, _)| v).collect(), sphere))
        })
        .collect::<Result<_, SoficError>>()?;
    let degree = window
        .iter()
        .map(|v| neighbors(view, v).map(|n| n.len()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let index: BTreeMap<Vertex, usize> = balls.iter().enumerate().map(|(i, b)| (b.0, i)).collect();
    let sets: Vec<BTreeSet<Vertex>> = balls
        .iter()
        .map(|b| b.1.iter().copied().collect())
        .collect();

    let mut pairs = 0;
    let mut max_defect_sq: f64 = 0.0;
    let mut tightest: Option<PairDefect> = None;
    let mut violations = Vec::new();
    for (i, &(x, _, _)) in balls.iter().enumerate() {
        for y in neighbors(view, x)? {
            let Some(&j) = index.get(&y) else { continue };
            if j <= i {
                continue;
            }
            pairs += 1;
            let (a, b) = (sets[i].len() as f64, sets[j].len() as f64);
            let common = sets[i].intersection(&sets[j]).count() as f64;
            let defect_sq = 2.0 - 2.0 * common / (a * b).sqrt();
            let small = if sets[i].len() <= sets[j].len() { i } else { j };
            let rho = balls[small].2 as f64 / sets[small].len() as f64;
            let bound = ball_defect_bound(rho, degree);
            let p = PairDefect {
                x,
                y,
                defect_sq,
                rho,
                bound,
            };
            max_defect_sq = max_defect_sq.max(defect_sq);
            if defect_sq > bound + 1e-12 {
                violations.push(p.clone());
            }
            if tightest
                .as_ref()
                .is_none_or(|t| bound - defect_sq < t.bound - t.defect_sq)
            {
                tightest = Some(p);
            }
        }
    }
    let vectors = balls.into_iter().map(|(x, b, _)| (x, uniform(b))).collect();
    Ok(BallWitnessReport {
        witness: PropertyAWitness {
            scale: k,
            support_radius: k,
            locality_radius: k,
            vectors,
        },
        degree,
        pairs,
        max_defect_sq,
        tightest,
        violations,
    })
}

/// Uniform vectors on the paths `s, phi(s), ..., phi^(n^2-1)(s)` for every
/// tree vertex up to depth `depth`, with `phi` decoded from edge colors.
pub fn property_a_ray_witness(
    enc: &RayEncoding,
    depth: u32,
    n: u32,
) -> Result<PropertyAWitness, SoficError> {
    if n == 0 {
        return Err(SoficError::Invalid("scale must be positive".into()));
    }
    let len = n * n;
    let starts: Vec<Vertex> = enc.window(depth).iter().collect();
    let vectors = starts
        .par_iter()
        .map(|&s| {
            let mut path = vec![s];
            for _ in 1..len {
                let t = *path.last().expect("nonempty");
                let next = enc.decode(t).map_err(|_| {
                    SoficError::Invalid(format!(
                        "path from depth {} leaves the tree of depth {}",
                        LazyTree::depth(s),
                        enc.tree().depth_limit()
                    ))
                })?;
                path.push(next);
            }
            Ok((s, uniform(path)))
        })
        .collect::<Result<BTreeMap<_, _>, SoficError>>()?;
    Ok(PropertyAWitness {
        scale: n,
        support_radius: len - 1,
        locality_radius: len,
        vectors,
    })
}
