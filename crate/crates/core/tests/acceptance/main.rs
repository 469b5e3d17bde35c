//! Acceptance run: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantities. Exits nonzero when any criterion fails.

mod oracles;

use std::collections::BTreeSet;
use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use urs_core::ball::{ball_code_with, extract_ball, CodeMode};
use urs_core::coloring::{
    compression_coloring, decode_compression, distance_proper_coloring, find_repetitive_path,
    lll_alphabet_bound, nonrepetitive_color, path_doubling_witness, verify_witness, Budget,
    Coloring,
};
use urs_core::constructions::{
    build_nonexact, cycle, graph_to_involution_schreier, involution_cycle, large_girth_sequence,
    path, random_cubic, tree_ray_encoding, NonexactBuild, NonexactParams, PeriodicColoredGrid,
};
use urs_core::gens::{Gen, GeneratorSet};
use urs_core::graph::{is_connected, FiniteGraph, GraphView, LazyGrid, LazyTree, Vertex, Window};
use urs_core::kernel::{
    amenable_trace, diag, identity, kappa, kernel_add, kernel_mul, kernel_scale, kernels_agree,
    norm_estimate, qr_project, rho, rho_translate, truncate, Domain, LocalKernel,
};
use urs_core::sofic::{
    ball_defect_bound, boundary_ratio, bs_distance, bs_histogram, complete_to_schreier,
    doubling_maps, hyperfinite_decompose, property_a_ball_witness, property_a_ray_witness,
    reference_codes, verify_violator, z_vertex_fraction, DecomposeMode, DoublingOutcome,
};
use urs_core::urs::{er_classes, genericity_radius, separation_radius, GenericityOutcome};

use oracles::*;

type Outcome = Result<String, Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+).into()),
        }
    };
}

const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn colored_grid() -> &'static PeriodicColoredGrid {
    static GRID: OnceLock<PeriodicColoredGrid> = OnceLock::new();
    GRID.get_or_init(|| PeriodicColoredGrid::new(10, 16, 4, 7).expect("periodic coloring"))
}

fn within(limit: Duration, start: Instant) -> Result<(), Box<dyn Error>> {
    let t = start.elapsed();
    ensure!(
        t < limit,
        "took {:.1}s, limit {}s",
        t.as_secs_f64(),
        limit.as_secs()
    );
    Ok(())
}

/// Random permutations and partial matchings on at most 8 vertices, colored
/// half of the time.
fn random_labeled(rng: &mut ChaCha8Rng) -> FiniteGraph {
    let n = rng.gen_range(1..=8usize);
    let gens = match rng.gen_range(0..3) {
        0 => GeneratorSet::involutions(rng.gen_range(1..=3)),
        1 => GeneratorSet::cyclic(),
        _ => GeneratorSet::free(2),
    };
    let mut b = FiniteGraph::builder(gens.clone(), n);
    for g in 0..gens.len() {
        let inv = gens.inverse(g);
        let mut p: Vec<u32> = (0..n as u32).collect();
        p.shuffle(rng);
        if inv == g {
            for pair in p.chunks(2) {
                if pair.len() == 2 && rng.gen_bool(0.8) {
                    b.set(pair[0], g, pair[1]).unwrap();
                }
            }
        } else if inv > g {
            for (v, &w) in p.iter().enumerate() {
                b.set(v as u32, g, w).unwrap();
            }
        }
    }
    let g = b.build().unwrap();
    if rng.gen_bool(0.5) {
        let colors = (0..n).map(|_| rng.gen_range(0..2)).collect();
        g.with_colors(colors).unwrap()
    } else {
        g
    }
}

fn canonicalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut checks, mut mismatches, mut isomorphic) = (0, 0, 0);
    for _ in 0..1000 {
        let g = random_labeled(&mut rng);
        let n = g.len();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rng);
        let h = g.permuted(&perm);
        let r = rng.gen_range(0..=4u32);
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        let cases = [
            (&g, x as Vertex, &h, perm[x] as Vertex),
            (&g, x as Vertex, &h, perm[y] as Vertex),
            (&g, x as Vertex, &g, y as Vertex),
        ];
        for (a, u, b, v) in cases {
            let truth = rooted_isomorphic(a, u, b, v, r);
            isomorphic += truth as usize;
            for mode in [CodeMode::Digest, CodeMode::Exact] {
                let ca = ball_code_with(&extract_ball(a, u, r)?, mode);
                let cb = ball_code_with(&extract_ball(b, v, r)?, mode);
                checks += 1;
                if (ca == cb) != truth {
                    mismatches += 1;
                }
            }
        }
    }
    ensure!(
        mismatches == 0,
        "{mismatches} mismatches in {checks} comparisons"
    );
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "1000 graphs, {checks} code comparisons ({isomorphic} isomorphic pairs), 0 mismatches"
    ))
}

/// A simple graph of maximum degree `dmax`, edges colored greedily and
/// turned into involutions.
fn random_bounded(rng: &mut ChaCha8Rng, n: usize, dmax: usize, tries: usize) -> FiniteGraph {
    let mut deg = vec![0; n];
    let mut edges = BTreeSet::new();
    for _ in 0..tries {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && deg[u] < dmax && deg[v] < dmax && edges.insert((u.min(v), u.max(v))) {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    let k = 2 * dmax - 1;
    let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut colored = Vec::new();
    for &(u, v) in &edges {
        let col = (0..k)
            .find(|c| !used[u].contains(c) && !used[v].contains(c))
            .unwrap();
        used[u].insert(col);
        used[v].insert(col);
        colored.push((u as u32, v as u32, col));
    }
    graph_to_involution_schreier(n, &colored, k).unwrap()
}

fn nonrepetitive() -> Outcome {
    let start = Instant::now();
    // (a)
    let word = square_free_word(30, 3).ok_or("no square-free ternary word of length 30")?;
    ensure!(!has_square(&word), "oracle word has a square");
    let p = path(30);
    let all = Window::all(&p)?;
    let col = nonrepetitive_color(&p, &all, 3, 15, 11, Budget::resamples(5_000_000))?;
    let seq: Vec<u8> = (0..30).map(|v| col.get(v).unwrap() as u8).collect();
    ensure!(!has_square(&seq), "engine coloring {seq:?} has a square");
    ensure!(
        find_repetitive_path(&p, &col, &all, 15)?.is_none(),
        "checker finds a repetition on the path"
    );

    // (b)
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut sizes = Vec::new();
    for i in 0..50 {
        let n = rng.gen_range(20..=300);
        let g = random_bounded(&mut rng, n, 4, 2 * n);
        ensure!(g.max_degree() <= 4, "degree {} > 4", g.max_degree());
        let w = Window::all(&g)?;
        let col = nonrepetitive_color(&g, &w, 16, 6, 100 + i, Budget::resamples(1_000_000))?;
        ensure!(
            find_repetitive_path(&g, &col, &w, 6)?.is_none(),
            "graph {i}: checker finds a repetition"
        );
        let colors: Vec<u32> = (0..n as u64).map(|v| col.get(v).unwrap()).collect();
        ensure!(
            !has_repetitive_path(&g, &colors, 6),
            "graph {i}: oracle finds a repetition"
        );
        sizes.push(n);
    }

    // (c)
    let bound = lll_alphabet_bound(3);
    let oracle = lll_ceiling(3);
    ensure!(
        bound == 159_949_990 && oracle == bound,
        "bound {bound}, oracle {oracle}"
    );
    for d in 1..=6 {
        ensure!(
            lll_alphabet_bound(d) == lll_ceiling(d),
            "bound differs at d={d}"
        );
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "3-color 30-path found (oracle agrees); 50 graphs of {}..{} vertices clean at alphabet 16, n_max 6; C(3) = {bound}",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    ))
}

/// Connected colored `Z/m` voltage cover of a random base graph, with the
/// sheet shift as automorphism.
fn voltage_cover(rng: &mut ChaCha8Rng) -> Option<(FiniteGraph, Vec<(Vertex, Vertex)>)> {
    let nb = rng.gen_range(1..=5usize);
    let m = rng.gen_range(2..=4usize);
    let k = rng.gen_range(1..=2usize);
    let alphabet = rng.gen_range(1..=3u32);
    let id = |x: usize, s: usize| (x * m + s) as u32;
    let mut b = FiniteGraph::builder(GeneratorSet::free(k), nb * m);
    for i in 0..k {
        let mut p: Vec<usize> = (0..nb).collect();
        p.shuffle(rng);
        for (x, &px) in p.iter().enumerate() {
            let volt = rng.gen_range(0..m);
            for s in 0..m {
                b.set(id(x, s), 2 * i, id(px, (s + volt) % m)).unwrap();
            }
        }
    }
    let base: Vec<u32> = (0..nb).map(|_| rng.gen_range(0..alphabet)).collect();
    let colors = (0..nb * m).map(|v| base[v / m]).collect();
    let g = b.build().unwrap().with_colors(colors).unwrap();
    if !is_connected(&g).unwrap() {
        return None;
    }
    let theta = (0..nb)
        .flat_map(|x| (0..m).map(move |s| (id(x, s) as Vertex, id(x, (s + 1) % m) as Vertex)))
        .collect();
    Some((g, theta))
}

fn path_doubling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut done, mut longest) = (0, 0);
    while done < 10_000 {
        let Some((g, theta)) = voltage_cover(&mut rng) else {
            continue;
        };
        let w = path_doubling_witness(&g, &theta)?;
        ensure!(
            verify_witness(&g, |v| g.color(v), &w)?,
            "library verifier rejects {:?}",
            w.path
        );
        ensure!(
            witness_holds(&g, &w.path, w.n),
            "oracle rejects {:?}",
            w.path
        );
        longest = longest.max(w.n);
        done += 1;
    }
    Ok(format!(
        "10000 covers, every witness verified (longest half {longest})"
    ))
}

fn genericity() -> Outcome {
    let start = Instant::now();
    let g = colored_grid();
    let w = PeriodicColoredGrid::window(100, 100);
    let cert = genericity_radius(g, &w, 3, 12, "100x100")?;
    let GenericityOutcome::Certified { s } = cert.outcome else {
        return Err(format!("not certified: {cert}").into());
    };
    // recheck pairs at distance <= 3 among vertices with their s-ball inside
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let depth = w.collar_depth(g);
    let mut pairs = 0;
    while pairs < 2000 {
        let i = rng.gen_range(0..w.len());
        if depth[i] < s + 3 {
            continue;
        }
        let x = w.vertices()[i];
        let near = ball(g, x, 3);
        let (y, _) = near[rng.gen_range(1..near.len())];
        ensure!(
            !rooted_isomorphic(g, x, g, y, s),
            "{x} and {y} share an {s}-ball"
        );
        pairs += 1;
    }
    let c8 = cycle(8);
    let all = Window::all(&c8)?;
    for smax in 0..=12 {
        let cert = genericity_radius(&c8, &all, 3, smax, "C8")?;
        let GenericityOutcome::Counterexample { x, y, s } = cert.outcome else {
            return Err(format!("C8 certified at Smax={smax}").into());
        };
        ensure!(s == smax, "C8 counterexample at S={s}, expected {smax}");
        ensure!(x != y, "degenerate counterexample");
        ensure!(
            distance(&c8, x, y, 3).is_some() && rooted_isomorphic(&c8, x, &c8, y, s),
            "C8 counterexample {x},{y} at S={s} fails the oracle"
        );
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "100x100 certified at S={s} ({} frontier skipped, 2000 pairs rechecked); C8 counterexample at every S in 0..=12",
        cert.frontier_skipped
    ))
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn walk_word(view: &dyn GraphView, start: Vertex, len: usize, rng: &mut ChaCha8Rng) -> Vec<Gen> {
    let mut v = start;
    let mut word = Vec::new();
    for _ in 0..len {
        let mv = view.moves(v).unwrap();
        let (g, w) = mv[rng.gen_range(0..mv.len())];
        word.push(g);
        v = w;
    }
    word
}

fn dense(
    view: &dyn GraphView,
    k: &LocalKernel,
    w: &Window,
    pad: u32,
) -> Result<(DMatrix<Complex64>, Vec<bool>), Box<dyn Error>> {
    let t = truncate(view, k, w, pad)?;
    Ok((t.to_dense(), t.collar))
}

fn rows_close(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    rows: impl Iterator<Item = usize>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in rows {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Class of every window vertex by rooted isomorphism with earlier
/// representatives.
fn oracle_classes(view: &dyn GraphView, w: &Window, r: u32) -> (Vec<usize>, Vec<Vertex>) {
    let mut reps: Vec<Vertex> = Vec::new();
    let mut class = Vec::with_capacity(w.len());
    for x in w.iter() {
        match reps
            .iter()
            .position(|&p| rooted_isomorphic(view, p, view, x, r))
        {
            Some(i) => class.push(i),
            None => {
                reps.push(x);
                class.push(reps.len() - 1);
            }
        }
    }
    (class, reps)
}

fn kernel_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;

    // kappa(u) kappa(v) = kappa(uv): closed colored cubic graph
    let cubic = random_cubic(120, 5)?;
    let colors = (0..cubic.len()).map(|_| rng.gen_range(0..3)).collect();
    let cubic = cubic.with_colors(colors)?;
    let all = Window::all(&cubic)?;
    let dc = Domain::new(&cubic, all.clone());
    for _ in 0..50 {
        let u: Vec<Gen> = (0..rng.gen_range(0..=4))
            .map(|_| rng.gen_range(0..3))
            .collect();
        let v: Vec<Gen> = (0..rng.gen_range(0..=4))
            .map(|_| rng.gen_range(0..3))
            .collect();
        let uv: Vec<Gen> = u.iter().chain(&v).copied().collect();
        let prod = kernel_mul(&dc, &kappa(&dc, &u)?, &kappa(&dc, &v)?)?;
        let direct = kappa(&dc, &uv)?;
        ensure!(
            kernels_agree(&cubic, &all, &prod, &direct, TOL)?,
            "kappa product fails for {u:?} {v:?}"
        );
        let (a, _) = dense(&cubic, &kappa(&dc, &u)?, &all, 0)?;
        let (b, _) = dense(&cubic, &kappa(&dc, &v)?, &all, 0)?;
        let (ab, _) = dense(&cubic, &direct, &all, 0)?;
        let e = rows_close(&(&a * &b), &ab, 0..all.len());
        ensure!(e <= TOL, "dense kappa product off by {e}");
        worst = worst.max(e);
    }
    // the same on padded truncations of the grid
    let grid = LazyGrid::new(None);
    let gw = Window::ball(&grid, LazyGrid::origin(), 12)?;
    let dg = Domain::new(&grid, gw.clone());
    for _ in 0..50 {
        let u: Vec<Gen> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(0..4))
            .collect();
        let v: Vec<Gen> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(0..4))
            .collect();
        let uv: Vec<Gen> = u.iter().chain(&v).copied().collect();
        let pad = uv.len() as u32;
        let (a, _) = dense(&grid, &kappa(&dg, &u)?, &gw, pad)?;
        let (b, _) = dense(&grid, &kappa(&dg, &v)?, &gw, pad)?;
        let (ab, collar) = dense(&grid, &kappa(&dg, &uv)?, &gw, pad)?;
        let e = rows_close(&(&a * &b), &ab, (0..gw.len()).filter(|&i| !collar[i]));
        ensure!(e <= TOL, "padded kappa product off by {e} for {u:?} {v:?}");
        worst = worst.max(e);
    }

    // translates of diagonal kernels on the colored grid
    let cg = colored_grid();
    let cw = Window::ball(cg, LazyGrid::origin(), 14)?;
    let inner = Window::ball(cg, LazyGrid::origin(), 6)?;
    let dcg = Domain::new(cg, cw.clone());
    let gens = cg.gens();
    let mut partitions = Vec::new();
    for r in 0..=2 {
        let p = er_classes(cg, &cw, r)?;
        let (oc, reps) = oracle_classes(cg, &cw, r);
        ensure!(
            reps.len() == p.len(),
            "radius {r}: {} classes, oracle {}",
            p.len(),
            reps.len()
        );
        partitions.push((p, oc, reps));
    }
    for case in 0..50 {
        let (p, oc, reps) = &partitions[case % 3];
        let a: Vec<Complex64> = (0..p.len()).map(|_| random_coeff(&mut rng)).collect();
        let word = walk_word(cg, LazyGrid::origin(), rng.gen_range(1..=3), &mut rng);
        let lhs = rho_translate(&dcg, p, &a, &word)?;
        let kg = kappa(&dcg, &word)?;
        let kinv = kappa(&dcg, &gens.inverse_word(&word))?;
        let rhs = kernel_mul(&dcg, &kernel_mul(&dcg, &kg, &rho(cg, p, &a)?)?, &kinv)?;
        ensure!(
            kernels_agree(cg, &inner, &lhs, &rhs, TOL)?,
            "equivariance fails for {word:?}"
        );
        // dense oracle: kappa(g) D kappa(g)^-1 with D built from oracle classes
        let pad = 2 * word.len() as u32;
        let (mg, _) = dense(cg, &kg, &cw, pad)?;
        let (mi, _) = dense(cg, &kinv, &cw, pad)?;
        let mut d = DMatrix::zeros(cw.len(), cw.len());
        for i in 0..cw.len() {
            let rep = reps[oc[i]];
            d[(i, i)] = a[p.class_of_vertex(rep).unwrap() as usize];
        }
        let (ml, collar) = dense(cg, &lhs, &cw, pad)?;
        let e = rows_close(
            &(&mg * &d * &mi),
            &ml,
            (0..cw.len()).filter(|&i| !collar[i]),
        );
        ensure!(e <= TOL, "dense equivariance off by {e}");
        worst = worst.max(e);
    }

    // masked compressions do not increase the norm
    let mut ratio: f64 = 0.0;
    let part0 = er_classes(&cubic, &all, 0)?;
    for _ in 0..100 {
        let mut k = kernel_scale(&identity(&dc)?, random_coeff(&mut rng));
        for _ in 0..rng.gen_range(1..=4) {
            let w: Vec<Gen> = (0..rng.gen_range(1..=3))
                .map(|_| rng.gen_range(0..3))
                .collect();
            let vals: Vec<Complex64> = (0..part0.len()).map(|_| random_coeff(&mut rng)).collect();
            let term = kernel_mul(&dc, &rho(&cubic, &part0, &vals)?, &kappa(&dc, &w)?)?;
            k = kernel_add(&dc, &k, &term)?;
        }
        let r = rng.gen_range(0..=2);
        let q = qr_project(&dc, &k, r)?;
        let (mk, _) = dense(&cubic, &k, &all, 0)?;
        let (mq, _) = dense(&cubic, &q, &all, 0)?;
        let (nk, nq) = (spectral_norm(&mk), spectral_norm(&mq));
        ensure!(nq <= nk + TOL, "masked norm {nq} exceeds {nk} at r={r}");
        ratio = ratio.max(nq / nk);
    }

    // Q_{r0} = D at the separation radius
    let dw = Window::ball(cg, LazyGrid::origin(), 16)?;
    let dd = Domain::new(cg, dw.clone());
    let mut radii = BTreeSet::new();
    for _ in 0..10 {
        let mut k = identity(&dd)?;
        for _ in 0..3 {
            let w = walk_word(cg, LazyGrid::origin(), rng.gen_range(1..=2), &mut rng);
            k = kernel_add(
                &dd,
                &k,
                &kernel_scale(&kappa(&dd, &w)?, random_coeff(&mut rng)),
            )?;
        }
        let r0 = separation_radius(cg, &dw, k.width + 1, 12)?.ok_or("no separation radius")?;
        radii.insert(r0);
        let inner = Window::new(dw.interior(cg, r0 + k.width + 1));
        let q = qr_project(&dd, &k, r0)?;
        let dk = diag(&dd, &k)?;
        ensure!(
            kernels_agree(cg, &inner, &q, &dk, 0.0)?,
            "Q at r0={r0} differs from D"
        );
    }
    Ok(format!(
        "100 kappa products, 50 translates (worst error {worst:.1e}); 100 masked norms (max ratio {ratio:.4}); Q_r0 = D at r0 in {radii:?}"
    ))
}

fn norms() -> Outcome {
    let mut lines = Vec::new();
    let mut last = (0.0, 0.0);
    for k in 3..=10u32 {
        let n = 1usize << k;
        let g = cycle(n);
        let all = Window::all(&g)?;
        let d = Domain::new(&g, all.clone());
        let sum = kernel_add(&d, &kappa(&d, &[0])?, &kappa(&d, &[1])?)?;
        let top = (0..n)
            .map(|j| (2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).abs())
            .fold(0.0, f64::max);
        let whole = norm_estimate(&d, &sum, &[all], 300)?;
        ensure!(whole.upper == 2.0, "Schur bound {} at n={n}", whole.upper);
        ensure!(
            whole.lower <= top + TOL,
            "lower {} above {top} at n={n}",
            whole.lower
        );
        let m = n / 2;
        let arc = Window::new(0..m as Vertex);
        let part = norm_estimate(&d, &sum, &[arc], 300)?;
        let arc_norm = 2.0 * (std::f64::consts::PI / (m as f64 + 1.0)).cos();
        ensure!(
            part.lower <= arc_norm + TOL,
            "arc lower {} above {arc_norm}",
            part.lower
        );
        lines.push(format!("{}:{:.4}", n, part.lower));
        last = (whole.lower, part.lower);
    }
    ensure!(
        last.0 >= 1.99 && last.1 >= 1.99,
        "k=10 lower bounds {last:?} below 1.99"
    );
    Ok(format!(
        "upper = 2 exactly; k=10 lower {:.6} (cycle), {:.6} (half arc); arcs {}",
        last.0,
        last.1,
        lines.join(" ")
    ))
}

/// Total variation between the ball-type distributions, with types decided
/// by rooted isomorphism.
fn bs_oracle(a: &FiniteGraph, b: &FiniteGraph, r: u32) -> f64 {
    let mut reps: Vec<(&FiniteGraph, Vertex)> = Vec::new();
    let mut counts: Vec<[usize; 2]> = Vec::new();
    for (side, g) in [a, b].into_iter().enumerate() {
        for v in 0..g.len() as Vertex {
            let i = match reps
                .iter()
                .position(|&(h, p)| rooted_isomorphic(h, p, g, v, r))
            {
                Some(i) => i,
                None => {
                    reps.push((g, v));
                    counts.push([0, 0]);
                    reps.len() - 1
                }
            };
            counts[i][side] += 1;
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    counts
        .iter()
        .map(|c| (c[0] as f64 / na - c[1] as f64 / nb).abs())
        .sum::<f64>()
        / 2.0
}

fn benjamini_schramm() -> Outcome {
    let mut zeros = 0;
    for r in 0..=5u32 {
        for i in 2..=7 {
            for j in 2..=7 {
                let (a, b) = (cycle(1 << i), cycle(1 << j));
                let ha = bs_histogram(&a, &Window::all(&a)?, r)?;
                let hb = bs_histogram(&b, &Window::all(&b)?, r)?;
                let dist = bs_distance(&ha, &hb)?;
                ensure!(
                    dist == bs_oracle(&a, &b, r),
                    "C{} vs C{} at r={r}: {dist}",
                    a.len(),
                    b.len()
                );
                if a.len() > 2 * r as usize + 1 && b.len() > 2 * r as usize + 1 {
                    ensure!(dist == 0.0, "C{} vs C{} at r={r}: {dist}", a.len(), b.len());
                    zeros += 1;
                }
            }
        }
    }
    let (c8, p8) = (involution_cycle(8), path(8));
    let dist = bs_distance(
        &bs_histogram(&c8, &Window::all(&c8)?, 1)?,
        &bs_histogram(&p8, &Window::all(&p8)?, 1)?,
    )?;
    let oracle = bs_oracle(&c8, &p8, 1);
    ensure!(
        dist == 0.25 && oracle == 0.25,
        "C8 vs P8: {dist}, oracle {oracle}"
    );
    Ok(format!(
        "{zeros} cycle pairs at distance exactly 0; C8 vs P8 at r=1: {dist}"
    ))
}

fn folner_and_completion() -> Outcome {
    let g = LazyGrid::new(None);
    let o = LazyGrid::origin();
    let b = ball(&g, o, 20);
    let inside: BTreeSet<Vertex> = b.iter().map(|p| p.0).collect();
    let oracle_boundary = b
        .iter()
        .filter(|&&(v, _)| (0..4).any(|s| !inside.contains(&g.step(v, s).unwrap())))
        .count();
    ensure!(
        b.len() == 841 && oracle_boundary == 80,
        "oracle ball {} boundary {oracle_boundary}",
        b.len()
    );
    let w = Window::ball(&g, o, 20)?;
    let rep = boundary_ratio(&g, &w)?;
    ensure!(
        rep.boundary == 80 && w.len() == 841 && rep.ratio == 80.0 / 841.0 && rep.ratio < 0.1,
        "boundary {} of {}",
        rep.boundary,
        w.len()
    );
    let refs = reference_codes(&g, &Window::new([o]), 2)?;
    let mut fractions = Vec::new();
    for radius in [10u32, 20, 40] {
        let w = Window::ball(&g, o, radius)?;
        let done = complete_to_schreier(&g, &w, 8)?;
        let f = z_vertex_fraction(&done.graph, &refs, 2)?;
        // vertices whose 2-ball stays inside keep their grid type
        let kept = ball(&g, o, radius - 2).len() as f64 / w.len() as f64;
        ensure!(
            f >= kept,
            "radius {radius}: fraction {f} below the kept share {kept}"
        );
        fractions.push(f);
    }
    ensure!(fractions[1] >= 0.8, "radius 20 fraction {}", fractions[1]);
    ensure!(
        fractions.windows(2).all(|p| p[1] > p[0]),
        "fractions not rising: {fractions:?}"
    );
    Ok(format!(
        "ratio 80/841 = {:.5}; z-fraction at r=2 for radii 10, 20, 40: {:.4} {:.4} {:.4}",
        rep.ratio, fractions[0], fractions[1], fractions[2]
    ))
}

fn decomposition_valid(g: &FiniteGraph, removed: &[(u32, u32)], k: usize) -> bool {
    let edges = g.simple_edges();
    let cut: BTreeSet<(u32, u32)> = removed.iter().copied().collect();
    cut.len() == removed.len()
        && cut.iter().all(|e| edges.contains(e))
        && largest_component(g.len(), &edges, |i| !cut.contains(&edges[i])) <= k
}

fn hyperfinite() -> Outcome {
    // cycles: every K-th edge cut
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let n = rng.gen_range(3..=300usize);
        let k = rng.gen_range(1..=n.min(60));
        let g = cycle(n);
        let edges = g.simple_edges();
        let cut: BTreeSet<usize> = (0..n.div_ceil(k)).map(|i| i * k).collect();
        let explicit: Vec<(u32, u32)> = cut
            .iter()
            .map(|&i| {
                let (u, v) = (i as u32, ((i + 1) % n) as u32);
                (u.min(v), u.max(v))
            })
            .collect();
        ensure!(
            decomposition_valid(&g, &explicit, k) || edges.len() < n,
            "explicit cut invalid n={n} K={k}"
        );
        let explicit_fraction = explicit.len() as f64 / n as f64;
        ensure!(
            explicit_fraction <= 1.0 / k as f64 + 1.0 / n as f64,
            "explicit fraction n={n} K={k}"
        );
        let h = hyperfinite_decompose(&g, k, DecomposeMode::Heuristic { seed: 1 })?;
        ensure!(
            decomposition_valid(&g, &h.removed, k),
            "heuristic invalid on C{n} K={k}"
        );
        ensure!(
            h.fraction <= 1.0 / k as f64 + 1.0 / n as f64,
            "heuristic fraction {} on C{n} K={k}",
            h.fraction
        );
    }
    // girth-6 cubic graph against the cycle value at K = 50
    let cubic = large_girth_sequence(&[500], 6, 9, 400)?;
    ensure!(cubic.girths[0] >= 6, "girth {}", cubic.girths[0]);
    let g = &cubic.graphs[0];
    let h = hyperfinite_decompose(g, 50, DecomposeMode::Heuristic { seed: 9 })?;
    ensure!(
        decomposition_valid(g, &h.removed, 50),
        "cubic decomposition invalid"
    );
    ensure!(
        h.fraction == h.removed.len() as f64 / 500.0,
        "fraction bookkeeping"
    );
    let cycle_value = 500usize.div_ceil(50) as f64 / 500.0;
    let factor = h.fraction / cycle_value;
    ensure!(factor >= 5.0, "contrast factor {factor}");
    // small graphs: exact optimum against enumeration, heuristic never below
    let (mut agree, mut gap) = (0, 0usize);
    for i in 0..150u64 {
        let n = rng.gen_range(2..=12);
        let g = random_bounded(&mut rng, n, 3, 2 * n);
        let edges = g.simple_edges();
        let k = rng.gen_range(1..=n);
        let exact = hyperfinite_decompose(&g, k, DecomposeMode::Exact)?;
        let best = min_removal(n, &edges, k);
        ensure!(
            exact.removed.len() == best && decomposition_valid(&g, &exact.removed, k),
            "graph {i}: exact {} vs oracle {best}",
            exact.removed.len()
        );
        let heur = hyperfinite_decompose(&g, k, DecomposeMode::Heuristic { seed: i })?;
        ensure!(
            decomposition_valid(&g, &heur.removed, k),
            "graph {i}: heuristic invalid"
        );
        ensure!(
            heur.removed.len() >= best,
            "graph {i}: heuristic beats the optimum"
        );
        agree += (heur.removed.len() == best) as usize;
        gap = gap.max(heur.removed.len() - best);
    }
    Ok(format!(
        "cycles within 1/K+1/n; girth-6 cubic K=50 fraction {:.3} = {factor:.1}x the cycle value {cycle_value}; small graphs: exact = enumeration on 150, heuristic optimal on {agree}, max excess {gap} edges",
        h.fraction
    ))
}

fn doubling() -> Outcome {
    // cubic graph: maps at C = 5
    let g = random_cubic(500, 10)?;
    let w = Window::ball(&g, 0, 8)?;
    let interior = w.interior(&g, 5);
    let DoublingOutcome::Maps(dm) = doubling_maps(&g, &w, 5, 5)? else {
        return Err("no doubling maps on the cubic graph".into());
    };
    ensure!(dm.verify(&g)?, "library check rejects the maps");
    let dom: BTreeSet<Vertex> = interior.iter().copied().collect();
    ensure!(
        dm.phi1.keys().copied().collect::<BTreeSet<_>>() == dom
            && dm.phi2.keys().copied().collect::<BTreeSet<_>>() == dom,
        "maps not defined on the interior"
    );
    let images: BTreeSet<Vertex> = dm.phi1.values().chain(dm.phi2.values()).copied().collect();
    ensure!(images.len() == 2 * dom.len(), "images overlap");
    for (&x, &y) in dm.phi1.iter().chain(&dm.phi2) {
        ensure!(
            w.contains(y) && distance(&g, x, y, 5).is_some(),
            "{x} -> {y} moves too far"
        );
    }
    let left: Vec<Vec<usize>> = interior
        .iter()
        .flat_map(|&x| {
            let near: Vec<usize> = ball(&g, x, 5)
                .iter()
                .filter_map(|p| w.index_of(p.0))
                .collect();
            [near.clone(), near]
        })
        .collect();
    ensure!(
        max_matching(&left, w.len()) == left.len(),
        "matching oracle finds no doubling"
    );

    // grid at C = 2: a Hall violator
    let grid = LazyGrid::new(None);
    let gw = Window::new(LazyGrid::rectangle(50, 50));
    let DoublingOutcome::Violator(a) = doubling_maps(&grid, &gw, 2, 2)? else {
        return Err("grid admits doubling maps at C=2".into());
    };
    ensure!(
        verify_violator(&grid, &gw, 2, &a)?,
        "library rejects the violator"
    );
    let hood: BTreeSet<Vertex> = a
        .iter()
        .flat_map(|&x| ball(&grid, x, 2).into_iter().map(|p| p.0))
        .filter(|&v| gw.contains(v))
        .collect();
    ensure!(
        hood.len() < 2 * a.len(),
        "oracle count {} vs 2|A| = {}",
        hood.len(),
        2 * a.len()
    );
    let ginterior = gw.interior(&grid, 2);
    let gleft: Vec<Vec<usize>> = ginterior
        .iter()
        .flat_map(|&x| {
            let near: Vec<usize> = ball(&grid, x, 2)
                .iter()
                .filter_map(|p| gw.index_of(p.0))
                .collect();
            [near.clone(), near]
        })
        .collect();
    ensure!(
        max_matching(&gleft, gw.len()) < gleft.len(),
        "matching oracle doubles the grid"
    );

    // compression round trip on a tree window
    let tree = LazyTree::new(3, 16);
    let tw = Window::new(tree.ball(11));
    let DoublingOutcome::Maps(tm) = doubling_maps(&tree, &tw, 2, 2)? else {
        return Err("no doubling maps on the tree".into());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c1 = Coloring::new(
        tw.clone(),
        (0..tw.len()).map(|_| rng.gen_range(0..4)).collect(),
        4,
    )?;
    let c2 = distance_proper_coloring(&tree, &tw, 4)?;
    let cc = compression_coloring(&tree, &tw, &tm, &c1, &c2)?;
    let domain: Vec<Vertex> = tm.phi1.keys().copied().collect();
    let sample: Vec<Vertex> = domain.choose_multiple(&mut rng, 500).copied().collect();
    ensure!(
        sample.len() == 500,
        "only {} vertices to sample",
        sample.len()
    );
    for &x in &sample {
        let got = decode_compression(&tree, &cc, x)?;
        ensure!(
            got == (tm.phi1[&x], tm.phi2[&x]),
            "decode at {x} gives {got:?}"
        );
    }
    Ok(format!(
        "cubic interior of {} doubled at C=5 (matching oracle agrees); grid violator |A|={} with {} neighbours; 500/500 decodes",
        dom.len(),
        a.len(),
        hood.len()
    ))
}

fn property_a() -> Outcome {
    let g = LazyGrid::new(None);
    let o = LazyGrid::origin();
    let mut tight = Vec::new();
    for k in 0..=10u32 {
        let w = Window::ball(&g, o, k + 4)?;
        let rep = property_a_ball_witness(&g, &w, k)?;
        ensure!(
            rep.violations.is_empty(),
            "k={k}: {} violations",
            rep.violations.len()
        );
        let bx = ball(&g, o, k);
        let right = g.step(o, 0)?;
        let by = ball(&g, right, k);
        let sphere = bx.iter().filter(|p| p.1 == k).count() as f64;
        let rho = sphere / bx.len() as f64;
        let sx: BTreeSet<Vertex> = bx.iter().map(|p| p.0).collect();
        let common = by.iter().filter(|p| sx.contains(&p.0)).count() as f64;
        let defect = 2.0 - 2.0 * common / (bx.len() as f64 * by.len() as f64).sqrt();
        let bound = 8.0 * rho + (1.0 / (8.0 * rho + 1.0).sqrt() - 1.0).powi(2);
        ensure!(
            defect <= bound + TOL,
            "k={k}: oracle defect {defect} above {bound}"
        );
        ensure!(
            (rep.max_defect_sq - defect).abs() <= TOL,
            "k={k}: defect {} vs oracle {defect}",
            rep.max_defect_sq
        );
        ensure!(
            (ball_defect_bound(rho, 4) - bound).abs() <= TOL,
            "k={k}: bound formula"
        );
        ensure!(rep.degree == 4, "degree {}", rep.degree);
        if let Some(t) = &rep.tightest {
            ensure!(
                (t.rho - rho).abs() <= TOL,
                "k={k}: rho {} vs oracle {rho}",
                t.rho
            );
        }
        tight.push(format!("{defect:.3}<={bound:.3}"));
    }
    let enc = tree_ray_encoding(24)?;
    let mut checked = 0;
    for n in 1..=4u32 {
        let wit = property_a_ray_witness(&enc, 4, n)?;
        for s in enc.window(3).iter() {
            let mut path = vec![s];
            for _ in 1..n * n {
                path.push(enc.phi(*path.last().unwrap()));
            }
            let support: BTreeSet<Vertex> = path.iter().copied().collect();
            let v = &wit.vectors[&s];
            ensure!(
                v.iter().map(|e| e.0).collect::<BTreeSet<_>>() == support
                    && v.iter().all(|e| (e.1 - 1.0 / n as f64).abs() <= TOL),
                "vector at {s} is not uniform on its ray segment"
            );
            ensure!((wit.norm(s).unwrap() - 1.0).abs() <= TOL, "norm at {s}");
            let dsq = wit
                .distance_sq(s, enc.phi(s))
                .ok_or("missing phi(s) vector")?;
            let exact = 2.0 / (n * n) as f64;
            ensure!((dsq - exact).abs() <= TOL, "n={n}: defect {dsq} vs {exact}");
            checked += 1;
        }
    }
    Ok(format!(
        "grid k=0..10 within bound ({}); ray vectors unit with defect 2/n^2 on {checked} (s, n) pairs",
        tight.join(" ")
    ))
}

fn trace() -> Outcome {
    let cg = colored_grid();
    let o = LazyGrid::origin();
    let big = Window::ball(cg, o, 22)?;
    let part = er_classes(cg, &big, 1)?;
    let windows: Vec<Window> = [5u32, 10, 15, 20]
        .iter()
        .map(|&r| Window::ball(cg, o, r))
        .collect::<Result<_, _>>()?;
    let (oc, reps) = oracle_classes(cg, &big, 1);
    ensure!(
        reps.len() == part.len(),
        "{} classes, oracle {}",
        part.len(),
        reps.len()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut alphas: Vec<usize> = (0..part.len()).collect();
    alphas.shuffle(&mut rng);
    alphas.truncate(12);
    for &alpha in &alphas {
        let mut e = vec![c(0.0, 0.0); part.len()];
        e[alpha] = c(1.0, 0.0);
        let k = rho(cg, &part, &e)?;
        let rep = amenable_trace(cg, &k, &windows)?;
        ensure!(!rep.not_nested, "windows not nested");
        let target = reps
            .iter()
            .position(|&p| part.class_of_vertex(p) == Some(alpha as u32))
            .unwrap();
        for (f, entry) in windows.iter().zip(&rep.entries) {
            let hits = f
                .iter()
                .filter(|&v| oc[big.index_of(v).unwrap()] == target)
                .count();
            let freq = hits as f64 / f.len() as f64;
            ensure!(
                entry.value == c(freq, 0.0),
                "class {alpha}, |F|={}: value {} vs frequency {freq}",
                f.len(),
                entry.value
            );
        }
    }
    let d = Domain::new(cg, big.clone());
    let id = amenable_trace(cg, &identity(&d)?, &windows)?;
    ensure!(
        id.entries
            .iter()
            .all(|e| e.value == c(1.0, 0.0) && e.defect == 0.0 && e.commutator == 0.0),
        "identity trace entries {:?}",
        id.entries
    );
    let c8 = cycle(8);
    let d8 = Domain::new(&c8, Window::all(&c8)?);
    let shift = kappa(&d8, &[0])?;
    let arc = Window::new(0..4);
    let t = amenable_trace(&c8, &shift, std::slice::from_ref(&arc))?;
    let mut m = DMatrix::<f64>::zeros(8, 8);
    for x in 0..8 {
        m[(x, (x + 7) % 8)] = 1.0;
    }
    let p = DMatrix::<f64>::from_fn(8, 8, |i, j| if i == j && i < 4 { 1.0 } else { 0.0 });
    let oracle = (&m * &p - &p * &m).norm();
    let hs = t.entries[0].commutator;
    ensure!(
        (hs - oracle).abs() <= TOL && (oracle - 2f64.sqrt()).abs() <= TOL,
        "commutator {hs}, oracle {oracle}"
    );
    Ok(format!(
        "{} of {} classes match their frequency exactly on 4 nested windows; identity 1 with defect 0; C8 arc commutator {hs:.15}",
        alphas.len(),
        part.len()
    ))
}

fn nonexact() -> Outcome {
    let start = Instant::now();
    let b = build_nonexact(NonexactParams::default())?;
    let problems = b.check()?;
    ensure!(problems.is_empty(), "invariants: {problems:?}");
    for lv in &b.levels[1..] {
        let i = lv.index;
        let adj = lv.h.simple_adjacency();
        let edges = lv.h.simple_edges();
        for (j0, set) in lv.marked.iter().enumerate() {
            let j = j0 as u32 + 1;
            let gj = b.level(j as usize).g.len() as u128;
            ensure!(
                set.len() as u128 * gj * 10u128.pow(j) <= lv.h.len() as u128,
                "level {i}: density of copies of G_{j}"
            );
            let t = b.radii[j0];
            let dist = multi_source(&adj, set);
            ensure!(
                dist.iter().all(|&d| d <= t),
                "level {i}: marked set {j} misses a {t}-ball"
            );
        }
        ensure!(!edges.is_empty(), "level {i} has no edges");
        if let Some(map) = &lv.cover {
            let below = &b.level(i - 2).h;
            let mut fiber = vec![0usize; below.len()];
            for &m in map {
                fiber[m as usize] += 1;
            }
            ensure!(
                fiber.iter().all(|&f| f * below.len() == lv.h.len()),
                "level {i}: uneven fibers"
            );
            for v in 0..lv.h.len() {
                for s in 0..lv.h.gens().len() {
                    let up = lv.h.step(v as Vertex, s)?;
                    let down = below.step(map[v] as Vertex, s)?;
                    ensure!(
                        map[up as usize] as Vertex == down,
                        "level {i}: map does not commute at {v}"
                    );
                }
            }
        }
    }
    let record = b.manifest();
    let again = build_nonexact(NonexactBuild::params_from_manifest(&record)?)?;
    ensure!(
        again.manifest() == record,
        "rebuild differs from the manifest"
    );

    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    for d in &dirs {
        let code = urs_core::cli::run(
            [
                "urs",
                "--out",
                d.path().to_str().unwrap(),
                "construct",
                "nonexact",
            ],
            &mut Vec::new(),
            &mut Vec::new(),
        );
        ensure!(code == 0, "cli build exit {code}");
    }
    let first = std::fs::read(dirs[0].path().join("build.txt"))?;
    ensure!(
        first == std::fs::read(dirs[1].path().join("build.txt"))?,
        "cli builds differ"
    );
    ensure!(
        first == record.as_bytes(),
        "cli record differs from the library build"
    );
    let replay = dirs[0].path().join("build.txt");
    let code = urs_core::cli::run(
        [
            "urs",
            "construct",
            "nonexact",
            "--replay",
            replay.to_str().unwrap(),
        ],
        &mut Vec::new(),
        &mut Vec::new(),
    );
    ensure!(code == 0, "replay exit {code}");
    within(Duration::from_secs(120), start)?;
    let sizes: Vec<String> = b.levels.iter().map(|l| l.g.len().to_string()).collect();
    Ok(format!(
        "levels {} vertices, radii {:?}, all invariants hold; manifest and cli replay byte-identical",
        sizes.join("/"),
        b.radii
    ))
}

fn multi_source(adj: &[Vec<u32>], set: &[u32]) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    let mut q = std::collections::VecDeque::new();
    for &s in set {
        d[s as usize] = 0;
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        for &w in &adj[u as usize] {
            if d[w as usize] == u32::MAX {
                d[w as usize] = d[u as usize] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("canonicalization soundness", canonicalization),
        ("nonrepetitive coloring", nonrepetitive),
        ("path-doubling witnesses", path_doubling),
        ("genericity pipeline", genericity),
        ("kernel algebra identities", kernel_identities),
        ("norm estimation", norms),
        ("Benjamini-Schramm distance", benjamini_schramm),
        ("Folner sets and completion", folner_and_completion),
        ("hyperfinite contrast", hyperfinite),
        ("doubling and compression", doubling),
        ("property A witnesses", property_a),
        ("amenable trace", trace),
        ("non-exact builder", nonexact),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let (mut passed, mut failed) = (0, 0);
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let t = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Ok(Ok(d)) => ("PASS", d),
            Ok(Err(e)) => ("FAIL", e.to_string()),
            Err(p) => (
                "FAIL",
                p.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into()),
            ),
        };
        if tag == "FAIL" {
            failed += 1;
        } else {
            passed += 1;
        }
        println!("{tag} [{n:>2}] {name}: {detail} ({t:.1}s)");
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
