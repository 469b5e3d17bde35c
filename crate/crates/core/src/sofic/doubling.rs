use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::SoficError;
use crate::coloring::DoublingMaps;
use crate::graph::{bfs, GraphView, Vertex, Window};

#[derive(Clone, Debug, PartialEq)]
pub enum DoublingOutcome {
    Maps(DoublingMaps),
    /// Interior vertices `A` with fewer than `2|A|` window vertices within
    /// distance `c`.
    Violator(Vec<Vertex>),
}

/// Two injections of the interior (vertices at collar depth `>= margin`)
/// into the window with disjoint images, each moving a vertex by at most
/// `c`. Solved as a bipartite matching of two copies of the interior
/// against the window.
pub fn doubling_maps<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    c: u32,
    margin: u32,
) -> Result<DoublingOutcome, SoficError> {
    doubling_maps_on(view, window, &window.interior(view, margin), c)
}

/// As [`doubling_maps`] with the interior given explicitly.
pub fn doubling_maps_on<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    interior: &[Vertex],
    c: u32,
) -> Result<DoublingOutcome, SoficError> {
    let near: Vec<Vec<u32>> = interior
        .iter()
        .map(|&x| {
            Ok(bfs(view, &[x], c, None)?
                .into_iter()
                .filter_map(|(y, _)| window.index_of(y).map(|i| i as u32))
                .collect())
        })
        .collect::<Result<_, SoficError>>()?;
    let left = 2 * interior.len();
    let adj = |l: usize| &near[l / 2];
    let (mate_l, mate_r) = hopcroft_karp(left, window.len(), adj);

    if mate_l.iter().all(Option::is_some) {
        let mut phi1 = BTreeMap::new();
        let mut phi2 = BTreeMap::new();
        for (l, m) in mate_l.iter().enumerate() {
            let y = window.vertices()[m.expect("perfect on the left") as usize];
            let map = if l % 2 == 0 { &mut phi1 } else { &mut phi2 };
            map.insert(interior[l / 2], y);
        }
        return Ok(DoublingOutcome::Maps(DoublingMaps { phi1, phi2, c }));
    }

    // left nodes reachable by alternating paths from unmatched ones
    let mut seen = vec![false; left];
    let mut q: VecDeque<usize> = (0..left).filter(|&l| mate_l[l].is_none()).collect();
    for &l in &q {
        seen[l] = true;
    }
    while let Some(l) = q.pop_front() {
        for &r in adj(l) {
            if let Some(l2) = mate_r[r as usize] {
                if !seen[l2 as usize] {
                    seen[l2 as usize] = true;
                    q.push_back(l2 as usize);
                }
            }
        }
    }
    let a: BTreeSet<Vertex> = (0..left)
        .filter(|&l| seen[l])
        .map(|l| interior[l / 2])
        .collect();
    Ok(DoublingOutcome::Violator(a.into_iter().collect()))
}

/// Direct count: `|B_c(A) ∩ window| < 2|A|`.
pub fn verify_violator<V: GraphView + ?Sized>(
    view: &V,
    window: &Window,
    c: u32,
    a: &[Vertex],
) -> Result<bool, SoficError> {
    if a.is_empty() {
        return Ok(false);
    }
    let hood = bfs(view, a, c, None)?
        .into_iter()
        .filter(|&(y, _)| window.contains(y))
        .count();
    let distinct: BTreeSet<Vertex> = a.iter().copied().collect();
    Ok(hood < 2 * distinct.len())
}

fn hopcroft_karp<'a>(
    left: usize,
    right: usize,
    adj: impl Fn(usize) -> &'a Vec<u32>,
) -> (Vec<Option<u32>>, Vec<Option<u32>>) {
    const INF: u32 = u32::MAX;
    let mut mate_l: Vec<Option<u32>> = vec![None; left];
    let mut mate_r: Vec<Option<u32>> = vec![None; right];
    let mut dist = vec![INF; left];
    loop {
        let mut q = VecDeque::new();
        for l in 0..left {
            if mate_l[l].is_none() {
                dist[l] = 0;
                q.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = q.pop_front() {
            for &r in adj(l) {
                match mate_r[r as usize] {
                    None => found = true,
                    Some(l2) if dist[l2 as usize] == INF => {
                        dist[l2 as usize] = dist[l] + 1;
                        q.push_back(l2 as usize);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next: Vec<usize> = vec![0; left];
        let mut augmented = false;
        for s in 0..left {
            if mate_l[s].is_some() {
                continue;
            }
            // iterative DFS along layered edges
            let mut stack = vec![s];
            let mut parent: HashMap<usize, (usize, u32)> = HashMap::new();
            let mut end = None;
            while let Some(&l) = stack.last() {
                let edges = adj(l);
                if next[l] >= edges.len() {
                    dist[l] = INF;
                    stack.pop();
                    continue;
                }
                let r = edges[next[l]];
                next[l] += 1;
                match mate_r[r as usize] {
                    None => {
                        end = Some((l, r));
                        break;
                    }
                    Some(l2) if dist[l2 as usize] == dist[l].wrapping_add(1) => {
                        parent.insert(l2 as usize, (l, r));
                        stack.push(l2 as usize);
                    }
                    _ => {}
                }
            }
            if let Some((mut l, mut r)) = end {
                loop {
                    let prev = mate_l[l];
                    mate_l[l] = Some(r);
                    mate_r[r as usize] = Some(l as u32);
                    match (prev, parent.get(&l)) {
                        (Some(_), Some(&(pl, pr))) => {
                            l = pl;
                            r = pr;
                        }
                        _ => break,
                    }
                }
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    (mate_l, mate_r)
}
