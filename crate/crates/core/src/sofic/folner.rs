use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;

use super::SoficError;
use crate::graph::{bfs, FiniteGraph, GraphView, Vertex, Window};
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq)]
pub struct FolnerReport {
    pub subset: Window,
    /// Vertices of the subset whose `g`-move leaves it, per generator.
    pub per_generator: Vec<usize>,
    /// Vertices with at least one move leaving the subset.
    pub boundary: usize,
    pub ratio: f64,
}

pub fn boundary_ratio<V: GraphView + ?Sized>(
    view: &V,
    subset: &Window,
) -> Result<FolnerReport, SoficError> {
    let mut per_generator = vec![0; view.gens().len()];
    let mut boundary = 0;
    let mut buf = Vec::new();
    for v in subset.iter() {
        view.moves_into(v, &mut buf)?;
        let mut leaves = false;
        for &(g, w) in &buf {
            if !subset.contains(w) {
                per_generator[g] += 1;
                leaves = true;
            }
        }
        boundary += leaves as usize;
    }
    let ratio = if subset.is_empty() {
        0.0
    } else {
        boundary as f64 / subset.len() as f64
    };
    Ok(FolnerReport {
        subset: subset.clone(),
        per_generator,
        boundary,
        ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FolnerStrategy {
    /// Balls of radius `0, 1, 2, ...` around the root.
    Balls,
    /// Grow from the root, each time adding the outside neighbour that
    /// gives the smallest boundary, preferring well-attached vertices close
    /// to the root.
    GreedyGrow,
}

/// Search for a set with boundary ratio at most `eps`, giving up once the
/// candidate exceeds `max_size` vertices.
pub fn folner_search<V: GraphView + ?Sized>(
    view: &V,
    root: Vertex,
    eps: f64,
    strategy: FolnerStrategy,
    max_size: usize,
) -> Result<FolnerReport, SoficError> {
    let mut best = f64::INFINITY;
    match strategy {
        FolnerStrategy::Balls => {
            let mut prev = 0;
            for r in 0.. {
                let ball: Vec<Vertex> = bfs(view, &[root], r, None)?
                    .into_iter()
                    .map(|(v, _)| v)
                    .collect();
                if ball.len() > max_size {
                    break;
                }
                let rep = boundary_ratio(view, &Window::new(ball.iter().copied()))?;
                best = best.min(rep.ratio);
                if rep.ratio <= eps {
                    return Ok(rep);
                }
                if ball.len() == prev {
                    break;
                }
                prev = ball.len();
            }
        }
        FolnerStrategy::GreedyGrow => {
            // exits[v] = moves of v leaving the set
            let mut exits: HashMap<Vertex, usize> = HashMap::new();
            let mut depth: HashMap<Vertex, u32> = HashMap::from([(root, 0)]);
            let mut boundary = 0usize;
            let mut frontier: BTreeSet<Vertex> = BTreeSet::new();
            let add = |u: Vertex,
                       exits: &mut HashMap<Vertex, usize>,
                       frontier: &mut BTreeSet<Vertex>,
                       boundary: &mut usize|
             -> Result<(), SoficError> {
                frontier.remove(&u);
                let mut own = 0;
                for (_, w) in view.moves(u)? {
                    match exits.get_mut(&w) {
                        Some(e) if w != u => {
                            *e -= 1;
                            if *e == 0 {
                                *boundary -= 1;
                            }
                        }
                        _ if w == u => {}
                        _ => {
                            own += 1;
                            frontier.insert(w);
                        }
                    }
                }
                exits.insert(u, own);
                *boundary += (own > 0) as usize;
                Ok(())
            };
            add(root, &mut exits, &mut frontier, &mut boundary)?;
            while exits.len() <= max_size {
                let ratio = boundary as f64 / exits.len() as f64;
                best = best.min(ratio);
                if ratio <= eps {
                    return boundary_ratio(view, &Window::new(exits.keys().copied()));
                }
                let mut choice: Option<((isize, usize, u32), Vertex)> = None;
                for &u in &frontier {
                    let mut links: HashMap<Vertex, usize> = HashMap::new();
                    for (_, w) in view.moves(u)? {
                        if w != u {
                            *links.entry(w).or_insert(0) += 1;
                        }
                    }
                    let (mut closed, mut inside, mut own) = (0isize, 0usize, 0usize);
                    let mut d = u32::MAX;
                    for (w, m) in links {
                        match exits.get(&w) {
                            Some(&e) => {
                                inside += 1;
                                d = d.min(depth[&w] + 1);
                                closed += (e == m) as isize;
                            }
                            None => own += 1,
                        }
                    }
                    let delta = (own > 0) as isize - closed;
                    let key = (delta, usize::MAX - inside, d);
                    if choice.is_none_or(|(k, _)| key < k) {
                        choice = Some((key, u));
                    }
                }
                match choice {
                    Some(((_, _, d), u)) => {
                        depth.insert(u, d);
                        add(u, &mut exits, &mut frontier, &mut boundary)?
                    }
                    None => break,
                }
            }
        }
    }
    Err(SoficError::FolnerBudget { eps, best })
}

/// A finite Schreier graph on a subset, agreeing with the view on every
/// move that stays inside.
#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    /// Vertex `i` stands for `window.vertices()[i]`, which is also its
    /// external id.
    pub graph: FiniteGraph,
    pub window: Window,
    /// Involution generators left with an unpaired deficient vertex, closed
    /// by a fixed point.
    pub parity_fixes: Vec<usize>,
}

/// Extend the partial action on `subset` to a total one: deficient
/// vertices of a non-involution generator are matched to free targets by a
/// seeded random bijection; those of an involution are paired at random,
/// one of an odd number becoming a fixed point.
pub fn complete_to_schreier<V: GraphView + ?Sized>(
    view: &V,
    subset: &Window,
    seed: u64,
) -> Result<Completion, SoficError> {
    let gens = view.gens().clone();
    let n = subset.len();
    let mut b = FiniteGraph::builder(gens.clone(), n);
    let mut parity_fixes = Vec::new();
    for g in 0..gens.len() {
        let inv = gens.inverse(g);
        if inv < g {
            continue;
        }
        let mut rng = stream(seed, &format!("complete/{}", gens.name(g)));
        let mut sources = Vec::new();
        let mut has_preimage = vec![false; n];
        for (i, v) in subset.iter().enumerate() {
            match subset.index_of(view.step(v, g)?) {
                Some(j) => {
                    b.set(i as u32, g, j as u32)?;
                    has_preimage[j] = true;
                }
                None => sources.push(i as u32),
            }
        }
        if inv == g {
            sources.shuffle(&mut rng);
            for pair in sources.chunks(2) {
                match *pair {
                    [x, y] => b.set(x, g, y)?,
                    [x] => {
                        b.set(x, g, x)?;
                        parity_fixes.push(g);
                    }
                    _ => unreachable!(),
                }
            }
        } else {
            let mut targets: Vec<u32> = (0..n as u32)
                .filter(|&j| !has_preimage[j as usize])
                .collect();
            targets.shuffle(&mut rng);
            for (x, y) in sources.into_iter().zip(targets) {
                b.set(x, g, y)?;
            }
        }
    }
    let mut graph = b.build()?;
    graph.set_ids(subset.vertices().to_vec());
    Ok(Completion {
        graph,
        window: subset.clone(),
        parity_fixes,
    })
}
