//! Independent reference computations. Nothing here calls the library's
//! search or canonicalization code; graphs are only queried through
//! `GraphView::step` and `GraphView::color`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use urs_core::graph::{GraphView, Vertex};

/// Vertices within distance `r` of `x` with their distances, in discovery
/// order (generators scanned in index order).
pub fn ball(view: &dyn GraphView, x: Vertex, r: u32) -> Vec<(Vertex, u32)> {
    let k = view.gens().len();
    let mut dist = HashMap::from([(x, 0u32)]);
    let mut order = vec![(x, 0)];
    let mut q = VecDeque::from([x]);
    while let Some(v) = q.pop_front() {
        let d = dist[&v];
        if d == r {
            continue;
        }
        for g in 0..k {
            let w = view.step(v, g).expect("materialized");
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                order.push((w, d + 1));
                q.push_back(w);
            }
        }
    }
    order
}

pub fn distance(view: &dyn GraphView, x: Vertex, y: Vertex, cap: u32) -> Option<u32> {
    ball(view, x, cap)
        .into_iter()
        .find(|p| p.0 == y)
        .map(|p| p.1)
}

/// Exhaustive search for a root-preserving bijection between the radius-`r`
/// balls that preserves colors and distances to the root and commutes with
/// every generator move out of a vertex at distance below `r`.
pub fn rooted_isomorphic(
    a: &dyn GraphView,
    x: Vertex,
    b: &dyn GraphView,
    y: Vertex,
    r: u32,
) -> bool {
    if a.gens().len() != b.gens().len() {
        return false;
    }
    let ba = ball(a, x, r);
    let bb = ball(b, y, r);
    if ba.len() != bb.len() {
        return false;
    }
    let k = a.gens().len();
    let ia: HashMap<Vertex, usize> = ba.iter().enumerate().map(|(i, p)| (p.0, i)).collect();
    let ib: HashMap<Vertex, usize> = bb.iter().enumerate().map(|(i, p)| (p.0, i)).collect();
    let sa: Vec<Vec<usize>> = ba
        .iter()
        .map(|&(v, d)| {
            if d < r {
                (0..k).map(|g| ia[&a.step(v, g).unwrap()]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let sb: Vec<Vec<usize>> = bb
        .iter()
        .map(|&(v, d)| {
            if d < r {
                (0..k).map(|g| ib[&b.step(v, g).unwrap()]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let ca: Vec<Option<u32>> = ba.iter().map(|p| a.color(p.0)).collect();
    let cb: Vec<Option<u32>> = bb.iter().map(|p| b.color(p.0)).collect();
    let n = ba.len();
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(f: &[usize], sa: &[Vec<usize>], sb: &[Vec<usize>]) -> bool {
        for (u, moves) in sa.iter().enumerate() {
            if f[u] == usize::MAX {
                continue;
            }
            for (g, &w) in moves.iter().enumerate() {
                if f[w] != usize::MAX && sb[f[u]].get(g) != Some(&f[w]) {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        i: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ba: &[(Vertex, u32)],
        bb: &[(Vertex, u32)],
        ca: &[Option<u32>],
        cb: &[Option<u32>],
        sa: &[Vec<usize>],
        sb: &[Vec<usize>],
    ) -> bool {
        if i == ba.len() {
            // the inverse must commute as well
            let mut inv = vec![0; f.len()];
            for (u, &v) in f.iter().enumerate() {
                inv[v] = u;
            }
            return sb.iter().enumerate().all(|(v, moves)| {
                moves
                    .iter()
                    .enumerate()
                    .all(|(g, &w)| sa[inv[v]].get(g) == Some(&inv[w]))
            });
        }
        for j in 0..bb.len() {
            if used[j] || bb[j].1 != ba[i].1 || cb[j] != ca[i] || (i == 0) != (j == 0) {
                continue;
            }
            f[i] = j;
            used[j] = true;
            if consistent(f, sa, sb) && extend(i + 1, f, used, ba, bb, ca, cb, sa, sb) {
                return true;
            }
            used[j] = false;
            f[i] = usize::MAX;
        }
        false
    }

    extend(0, &mut f, &mut used, &ba, &bb, &ca, &cb, &sa, &sb)
}

/// Whether the word has a factor `uu`.
pub fn has_square(w: &[u8]) -> bool {
    (0..w.len()).any(|i| (1..=(w.len() - i) / 2).any(|h| w[i..i + h] == w[i + h..i + 2 * h]))
}

fn square_suffix(w: &[u8]) -> bool {
    let n = w.len();
    (1..=n / 2).any(|h| w[n - 2 * h..n - h] == w[n - h..])
}

/// Depth-first search over all words on `k` letters for a square-free word
/// of length `n`.
pub fn square_free_word(n: usize, k: u8) -> Option<Vec<u8>> {
    let mut w: Vec<u8> = Vec::with_capacity(n);
    let mut next: Vec<u8> = vec![0];
    while let Some(c) = next.pop() {
        if c >= k {
            w.pop();
            continue;
        }
        next.push(c + 1);
        w.push(c);
        if square_suffix(&w) {
            w.pop();
            continue;
        }
        if w.len() == n {
            return Some(w);
        }
        next.push(0);
    }
    None
}

/// `ceil(2 d^2 e^16)` in exact integer arithmetic: with `N!` as common
/// denominator, `e^16` lies between the partial sum and the partial sum
/// plus a geometric bound on the tail.
pub fn lll_ceiling(d: u64) -> u64 {
    const N: u32 = 120;
    let m = BigUint::from(2 * d * d);
    let mut fact = BigUint::from(1u32);
    for i in 1..=N {
        fact *= i;
    }
    // sum_{k <= N} 16^k N!/k!
    let mut lower = BigUint::from(0u32);
    let mut term = fact.clone();
    for kk in 0..=N {
        if kk > 0 {
            term = term / kk * 16u32;
        }
        lower += &term;
    }
    // tail < 16^{N+1}/(N+1)! * (N+2)/(N+2-16), times N!
    let sixteen = BigUint::from(16u32);
    let tail_num = sixteen.pow(N + 1) * (N + 2);
    let tail_den = BigUint::from((N + 1) * (N + 2 - 16));
    let tail = ceil_div(&tail_num, &tail_den);
    let lo = &m * &lower;
    let hi = &m * (&lower + tail);
    let ceil_lo = ceil_div(&lo, &fact);
    let ceil_hi = ceil_div(&hi, &fact);
    assert_eq!(ceil_lo, ceil_hi, "precision insufficient");
    ceil_lo.try_into().expect("fits")
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - 1u32) / b
}

/// Maximum bipartite matching by repeated augmenting paths.
pub fn max_matching(left: &[Vec<usize>], n_right: usize) -> usize {
    let mut owner = vec![usize::MAX; n_right];
    let mut size = 0;
    for u in 0..left.len() {
        let mut seen = vec![false; n_right];
        if augment(u, left, &mut owner, &mut seen) {
            size += 1;
        }
    }
    size
}

fn augment(u: usize, left: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &v in &left[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v] == usize::MAX || augment(owner[v], left, owner, seen) {
            owner[v] = u;
            return true;
        }
    }
    false
}

/// Largest component after keeping only `keep`-flagged edges.
pub fn largest_component(n: usize, edges: &[(u32, u32)], keep: impl Fn(usize) -> bool) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        if keep(i) {
            let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            parent[a] = b;
        }
    }
    let mut size = vec![0; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        size[r] += 1;
    }
    size.into_iter().max().unwrap_or(0)
}

/// Fewest edges whose removal leaves components of at most `k` vertices,
/// by enumerating every edge subset.
pub fn min_removal(n: usize, edges: &[(u32, u32)], k: usize) -> usize {
    assert!(edges.len() <= 24);
    let mut best = edges.len();
    for mask in 0u32..(1 << edges.len()) {
        let removed = mask.count_ones() as usize;
        if removed >= best {
            continue;
        }
        if largest_component(n, edges, |i| mask & (1 << i) == 0) <= k {
            best = removed;
        }
    }
    best
}

fn adjacent(view: &dyn GraphView, a: Vertex, b: Vertex) -> bool {
    a != b && (0..view.gens().len()).any(|g| view.step(a, g).ok() == Some(b))
}

/// Adjacent consecutive vertices, no repeats, equal colors on the halves.
pub fn witness_holds(view: &dyn GraphView, path: &[Vertex], n: usize) -> bool {
    let mut seen = std::collections::HashSet::new();
    n > 0
        && path.len() == 2 * n
        && path.iter().all(|&v| seen.insert(v))
        && path.windows(2).all(|p| adjacent(view, p[0], p[1]))
        && (0..n).all(|i| {
            view.color(path[i]).is_some() && view.color(path[i]) == view.color(path[n + i])
        })
}

/// Whether some simple path on at most `2 n_max` vertices of a finite graph
/// on `0..colors.len()` has equal halves, by depth-first enumeration of
/// every simple path with early pruning on the second half.
pub fn has_repetitive_path(view: &dyn GraphView, colors: &[u32], n_max: usize) -> bool {
    let nbrs: Vec<Vec<Vertex>> = (0..colors.len() as Vertex)
        .map(|v| {
            let mut out: Vec<Vertex> = (0..view.gens().len())
                .filter_map(|g| view.step(v, g).ok())
                .filter(|&w| w != v)
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    fn grow(nbrs: &[Vec<Vertex>], colors: &[u32], path: &mut Vec<Vertex>, n: usize) -> bool {
        if path.len() == 2 * n {
            return true;
        }
        let last = *path.last().unwrap() as usize;
        for &w in &nbrs[last] {
            if path.contains(&w) {
                continue;
            }
            if path.len() >= n && colors[w as usize] != colors[path[path.len() - n] as usize] {
                continue;
            }
            path.push(w);
            if grow(nbrs, colors, path, n) {
                return true;
            }
            path.pop();
        }
        false
    }
    (1..=n_max).any(|n| {
        (0..colors.len() as Vertex).any(|s| {
            let mut path = vec![s];
            grow(&nbrs, colors, &mut path, n)
        })
    })
}
