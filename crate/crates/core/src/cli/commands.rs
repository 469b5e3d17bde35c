use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use super::source::{
    load, read_graph, read_input, read_windows, window_from_spec, Loaded, ViewArgs, WindowsFile,
};
use super::{CliError, Run, Status};
use crate::coloring::{
    compression_coloring, decode_compression, distance_proper_coloring, nonrepetitive_color,
    parse_coloring, write_coloring, Budget, ColoringError,
};
use crate::constructions::{
    build_nonexact, cycle, cycle_cover_tower, graph_to_involution_schreier, large_girth_sequence,
    path, regular_tree, torus, tree_ray_encoding, voltage_z2_tower, NonexactBuild, NonexactParams,
};
use crate::graph::{bfs, write_graph, FiniteGraph, GraphView, LazyTree, Vertex, Window};
use crate::kernel::{
    amenable_trace, cp_approx, hull_size, identity, kappa, kernel_eval, kernel_mul, norm_estimate,
    parse_kernel, qr_project, write_kernel, Domain, LocalKernel,
};
use crate::sofic::{
    bs_distance, bs_histogram, complete_to_schreier, doubling_maps, folner_search,
    hyperfinite_decompose, property_a_ball_witness, property_a_ray_witness, reference_codes,
    verify_violator, write_histogram, z_vertex_fraction, DecomposeMode, DoublingOutcome,
    FolnerStrategy, SoficError,
};
use crate::urs::{
    covering_radius, er_classes, genericity_radius, repetition_window, GenericityOutcome,
};

pub fn dispatch(run: &mut Run, cmd: &super::Command) -> Result<Status, CliError> {
    match cmd {
        super::Command::Construct(c) => construct(run, c),
        super::Command::Color(c) => color(run, c),
        super::Command::Urs(c) => urs(run, c),
        super::Command::Sofic(c) => sofic(run, c),
        super::Command::Kernel(c) => kernel(run, c),
    }
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// Cycle with one generator `s` and its inverse `S`
    Cycle {
        #[arg(long)]
        n: usize,
    },
    /// Path with alternating involution labels
    Path {
        #[arg(long)]
        n: usize,
    },
    /// The w x h torus with generators x, X, y, Y
    Grid {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
    },
    /// The regular tree to a given depth; leaves are fixed by the missing letters
    Tree {
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long)]
        depth: u32,
    },
    /// Involution graph of a properly edge-colored simple graph (lines `u v color`)
    Involution {
        #[arg(long)]
        edges: PathBuf,
        /// Number of colors; defaults to the largest used plus one
        #[arg(long)]
        colors: Option<usize>,
    },
    /// Tower of covers: doubling cycles, or Z/2 voltage covers of a graph file
    Tower {
        #[arg(long)]
        levels: usize,
        #[arg(long, conflicts_with = "graph")]
        cycle: Option<usize>,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Random cubic graphs with a girth floor
    Cubic {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        girth: u32,
        #[arg(long, default_value_t = 200)]
        stage_budget: u32,
    },
    /// Odd and even level graphs of the recursive construction
    Nonexact {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        girth: u32,
        #[arg(long, default_value_t = 200)]
        stage_budget: u32,
        #[arg(long)]
        first_cubic_size: Option<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        max_level_size: usize,
        /// Rebuild from the parameters of this build record and compare
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

impl ConstructCmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cycle { .. } => "cycle",
            Self::Path { .. } => "path",
            Self::Grid { .. } => "grid",
            Self::Tree { .. } => "tree",
            Self::Involution { .. } => "involution",
            Self::Tower { .. } => "tower",
            Self::Cubic { .. } => "cubic",
            Self::Nonexact { .. } => "nonexact",
        }
    }
}

fn emit_graph(run: &mut Run, name: &str, g: &FiniteGraph) {
    run.say(format!(
        "{name}: {} vertices, {} edges",
        g.len(),
        g.simple_edges().len()
    ));
    run.artifact(name, write_graph(g));
}

fn tree_graph(degree: usize, depth: u32) -> Result<FiniteGraph, CliError> {
    if !(1..=4).contains(&degree) || depth > 31 {
        return Err(CliError::Usage(
            "tree needs degree 1..=4 and depth <= 31".into(),
        ));
    }
    let t = regular_tree(degree, depth);
    let order = t.ball(depth);
    let index: std::collections::HashMap<Vertex, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let edges: Vec<(u32, u32, usize)> = order[1..]
        .iter()
        .map(|&v| {
            let p = LazyTree::parent(v).expect("non-root has a parent");
            (
                index[&p],
                index[&v],
                LazyTree::last_letter(v).expect("non-root has a letter"),
            )
        })
        .collect();
    Ok(graph_to_involution_schreier(order.len(), &edges, degree)?)
}

fn construct(run: &mut Run, cmd: &ConstructCmd) -> Result<Status, CliError> {
    match cmd {
        ConstructCmd::Cycle { n } => {
            if *n == 0 {
                return Err(CliError::Usage("cycle needs n >= 1".into()));
            }
            emit_graph(run, "cycle.txt", &cycle(*n));
        }
        ConstructCmd::Path { n } => {
            if *n == 0 {
                return Err(CliError::Usage("path needs n >= 1".into()));
            }
            emit_graph(run, "path.txt", &path(*n));
        }
        ConstructCmd::Grid { w, h } => {
            if *w == 0 || *h == 0 {
                return Err(CliError::Usage("torus sides must be positive".into()));
            }
            emit_graph(run, "grid.txt", &torus(*w, *h));
        }
        ConstructCmd::Tree { degree, depth } => {
            emit_graph(run, "tree.txt", &tree_graph(*degree, *depth)?)
        }
        ConstructCmd::Involution { edges, colors } => {
            let text = read_input(run, edges)?;
            let mut list = Vec::new();
            let mut n = 0u32;
            for (i, raw) in text.lines().enumerate() {
                let body = raw.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let t: Vec<u64> = body
                    .split_whitespace()
                    .map(|s| s.parse::<u64>())
                    .collect::<Result<_, _>>()
                    .ok()
                    .filter(|t: &Vec<u64>| t.len() == 3)
                    .ok_or_else(|| {
                        CliError::Input(format!(
                            "{}: line {}: expected `u v color`",
                            edges.display(),
                            i + 1
                        ))
                    })?;
                n = n.max(t[0] as u32 + 1).max(t[1] as u32 + 1);
                list.push((t[0] as u32, t[1] as u32, t[2] as usize));
            }
            let k = colors.unwrap_or_else(|| list.iter().map(|e| e.2 + 1).max().unwrap_or(1));
            let g = graph_to_involution_schreier(n as usize, &list, k)?;
            emit_graph(run, "involution.txt", &g);
        }
        ConstructCmd::Tower {
            levels,
            cycle: c,
            graph,
        } => {
            if *levels == 0 {
                return Err(CliError::Usage("tower needs at least one level".into()));
            }
            let tower = match (c, graph) {
                (Some(base), _) => cycle_cover_tower(*base, *levels),
                (None, Some(p)) => {
                    let base = read_graph(run, p)?;
                    let seed = run.seed_for("tower");
                    voltage_z2_tower(&base, *levels, seed)?
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "tower needs --cycle N or --graph FILE".into(),
                    ))
                }
            };
            let ok = tower.verify()?;
            let mut maps = String::new();
            for (i, m) in tower.maps.iter().enumerate() {
                for (v, w) in m.iter().enumerate() {
                    let _ = writeln!(maps, "map {} {v} {w}", i + 1);
                }
            }
            run.say(format!(
                "tower of {} levels, sizes {:?}, covering verified: {ok}, reseeds {}",
                tower.levels.len(),
                tower.levels.iter().map(|g| g.len()).collect::<Vec<_>>(),
                tower.reseeds
            ));
            run.field(
                "sizes",
                tower.levels.iter().map(|g| g.len()).collect::<Vec<_>>(),
            );
            run.field("covering", ok);
            emit_graph(run, "top.txt", tower.top());
            run.artifact("maps.txt", maps);
            if !ok {
                return Ok(Status::CertificateFailure);
            }
        }
        ConstructCmd::Cubic {
            sizes,
            girth,
            stage_budget,
        } => {
            if sizes.iter().any(|s| s % 2 == 1 || *s < 4) {
                return Err(CliError::Usage(
                    "cubic graph sizes must be even and at least 4".into(),
                ));
            }
            let seed = run.seed_for("cubic");
            let rep = large_girth_sequence(sizes, *girth, seed, *stage_budget)?;
            for (i, g) in rep.graphs.iter().enumerate() {
                run.say(format!("cubic {}: girth {}", g.len(), rep.girths[i]));
                run.artifact(&format!("cubic{i}.txt"), write_graph(g));
            }
            run.field("girths", &rep.girths);
        }
        ConstructCmd::Nonexact {
            depth,
            girth,
            stage_budget,
            first_cubic_size,
            max_level_size,
            replay,
        } => {
            let params = match replay {
                Some(p) => {
                    let text = read_input(run, p)?;
                    NonexactBuild::params_from_manifest(&text)
                        .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
                }
                None => NonexactParams {
                    depth: *depth,
                    seed: run.seed,
                    girth: *girth,
                    stage_budget: *stage_budget,
                    first_cubic_size: *first_cubic_size,
                    max_level_size: *max_level_size,
                },
            };
            let build = build_nonexact(params)?;
            let problems = build.check()?;
            for lv in &build.levels {
                run.say(format!(
                    "level {}: host {} vertices, graph {} vertices",
                    lv.index,
                    lv.h.len(),
                    lv.g.len()
                ));
            }
            for p in &problems {
                run.say(format!("invariant violated: {p}"));
            }
            run.field("radii", &build.radii);
            run.field(
                "levels",
                build
                    .levels
                    .iter()
                    .map(|l| (l.h.len(), l.g.len()))
                    .collect::<Vec<_>>(),
            );
            run.field("violations", &problems);
            let record = build.manifest();
            if let Some(p) = replay {
                let old = read_input(run, p)?;
                let same = old == record;
                run.say(format!(
                    "replay reproduces the record byte for byte: {same}"
                ));
                run.field("reproduced", same);
                if !same {
                    return Ok(Status::CertificateFailure);
                }
            }
            run.artifact("build.txt", record);
            emit_graph(run, "odd_union.txt", &build.odd_union()?);
            for (i, g) in build.even_graphs().into_iter().enumerate() {
                run.artifact(&format!("even{}.txt", 2 * (i + 1)), write_graph(g));
            }
            if !problems.is_empty() {
                return Ok(Status::CertificateFailure);
            }
        }
    }
    Ok(Status::Success)
}

#[derive(Subcommand, Debug)]
pub enum ColorCmd {
    /// Resample until no path of up to 2 nmax vertices is repetitive
    Nonrep {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long, default_value_t = 16)]
        alphabet: u32,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[arg(long)]
        max_resamples: Option<u64>,
    },
    /// Greedy coloring in which vertices within distance d differ
    Proper {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long, default_value_t = 1)]
        distance: u32,
    },
    /// Search a coloring file for a repetitive path
    Verify {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
}

impl ColorCmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Nonrep { .. } => "nonrep",
            Self::Proper { .. } => "proper",
            Self::Verify { .. } => "verify",
        }
    }
}

fn color(run: &mut Run, cmd: &ColorCmd) -> Result<Status, CliError> {
    match cmd {
        ColorCmd::Nonrep {
            view,
            alphabet,
            nmax,
            max_resamples,
        } => {
            let l = load(run, view)?;
            let seed = run.seed_for("coloring");
            let budget = Budget {
                max_resamples: *max_resamples,
                deadline: run.deadline(),
            };
            match nonrepetitive_color(l.view(), &l.window, *alphabet, *nmax, seed, budget) {
                Ok(c) => {
                    run.say(format!(
                        "nonrepetitive coloring of {} vertices with {} colors up to n = {nmax}",
                        l.window.len(),
                        alphabet
                    ));
                    run.artifact("coloring.txt", write_coloring(&c));
                }
                Err(ColoringError::BudgetExhausted {
                    best,
                    witness,
                    resamples,
                }) => {
                    run.say(format!(
                        "budget exhausted after {resamples} resamples; repetition {:?}",
                        witness.path
                    ));
                    run.field("witness", &witness.path);
                    run.artifact("coloring.txt", write_coloring(&best));
                    return Ok(Status::Budget);
                }
                Err(e) => return Err(e.into()),
            }
        }
        ColorCmd::Proper { view, distance } => {
            let l = load(run, view)?;
            let c = distance_proper_coloring(l.view(), &l.window, *distance)?;
            run.say(format!(
                "{} colors, proper at distance {distance}",
                c.alphabet()
            ));
            run.field("alphabet", c.alphabet());
            run.artifact("coloring.txt", write_coloring(&c));
        }
        ColorCmd::Verify {
            view,
            coloring,
            nmax,
        } => {
            let l = load(run, view)?;
            let text = read_input(run, coloring)?;
            let mut c = parse_coloring(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", coloring.display())))?;
            match c.verify_nonrepetitive(l.view(), *nmax)? {
                Some(w) => {
                    let colors: Vec<Option<u32>> = w.path.iter().map(|&v| c.get(v)).collect();
                    run.say(format!(
                        "repetitive path of {} vertices: {:?}",
                        w.path.len(),
                        w.path
                    ));
                    run.say(format!("colors along it: {colors:?}"));
                    run.field("witness", &w.path);
                    return Ok(Status::CertificateFailure);
                }
                None => run.say(format!("no repetitive path of up to {} vertices", 2 * nmax)),
            }
        }
    }
    Ok(Status::Success)
}

#[derive(Subcommand, Debug)]
pub enum UrsCmd {
    /// Least S such that window vertices within R have distinct S-balls
    Genericity {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long = "R", alias = "r")]
        r: u32,
        #[arg(long = "Smax", alias = "smax")]
        s_max: u32,
    },
    /// Partition the window by ball type
    Classes {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        r: u32,
        /// Also report the covering radius of the classes
        #[arg(long)]
        covering: bool,
    },
    /// Distance to the nearest vertex with the same ball as the root
    Repetition {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        r: u32,
    },
}

impl UrsCmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Genericity { .. } => "genericity",
            Self::Classes { .. } => "classes",
            Self::Repetition { .. } => "repetition",
        }
    }
}

fn urs(run: &mut Run, cmd: &UrsCmd) -> Result<Status, CliError> {
    match cmd {
        UrsCmd::Genericity { view, r, s_max } => {
            let l = load(run, view)?;
            let cert = genericity_radius(l.view(), &l.window, *r, *s_max, &l.label)?;
            run.say(cert.to_string());
            run.artifact("certificate.txt", format!("{cert}\n"));
            run.field("frontier_skipped", cert.frontier_skipped);
            match cert.outcome {
                GenericityOutcome::Certified { s } => run.field("S", s),
                GenericityOutcome::Counterexample { x, y, s } => {
                    run.say(format!(
                        "counterexample at S = {s}: vertices {x} and {y} have equal balls"
                    ));
                    run.field("witness", json!({"x": x, "y": y, "S": s}));
                    return Ok(Status::CertificateFailure);
                }
            }
        }
        UrsCmd::Classes { view, r, covering } => {
            let l = load(run, view)?;
            let p = er_classes(l.view(), &l.window, *r)?;
            let mut text = format!("classes r={} window={} count={}\n", r, l.label, p.len());
            for (i, (code, m)) in p.codes.iter().zip(&p.members).enumerate() {
                let _ = writeln!(text, "class {i} {} {}", m.len(), code.hex());
            }
            run.say(format!(
                "{} classes at radius {r} over {} vertices",
                p.len(),
                l.window.len()
            ));
            run.field("classes", p.len());
            run.field("frequencies", p.frequencies());
            if *covering {
                let c = covering_radius(l.view(), &l.window, *r)?;
                run.say(format!(
                    "covering radius {} (frontier binds: {}, uncovered {})",
                    c.t, c.frontier_binds, c.uncovered
                ));
                run.field("covering_radius", c.t);
            }
            run.artifact("classes.txt", text);
        }
        UrsCmd::Repetition { view, r } => {
            let l = load(run, view)?;
            let t = repetition_window(l.view(), l.root, *r, &l.window)?;
            match t {
                Some(t) => run.say(format!(
                    "every window vertex is within {t} of a copy of the root's {r}-ball"
                )),
                None => {
                    run.say("some window vertex sees no copy of the root's ball inside the window")
                }
            }
            run.field("repetition_radius", t);
        }
    }
    Ok(Status::Success)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Balls,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum SoficCmd {
    /// Search for a set of small boundary around the root and write nested windows
    Folner {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "balls")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 100_000)]
        max_size: usize,
    },
    /// Close the window to a finite Schreier graph
    Complete {
        #[command(flatten)]
        view: ViewArgs,
        /// Compare the completion's balls of this radius with the view's
        #[arg(long)]
        z_radius: Option<u32>,
        /// Window of the view supplying reference balls (defaults to the completed window)
        #[arg(long)]
        reference: Option<String>,
    },
    /// Histogram of ball types, and distance to a second finite graph
    Bs {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Remove edges until every component has at most k vertices
    Hyperfinite {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        exact: bool,
    },
    /// Two displacement-bounded injections with disjoint images, or a Hall violator
    Doubling {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long)]
        c: u32,
        #[arg(long, default_value_t = 0)]
        margin: u32,
        /// Also build the compression coloring and decode it everywhere
        #[arg(long)]
        compress: bool,
    },
    /// Ball-average or ray witnesses of almost-invariant unit vectors
    Propa {
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Use the ray witness on the colored 3-regular tree with this scale
        #[arg(long)]
        ray: Option<u32>,
        #[arg(long, default_value_t = 12)]
        tree_depth: u32,
        #[arg(long, default_value_t = 4)]
        sample_depth: u32,
    },
}

impl SoficCmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Folner { .. } => "folner",
            Self::Complete { .. } => "complete",
            Self::Bs { .. } => "bs",
            Self::Hyperfinite { .. } => "hyperfinite",
            Self::Doubling { .. } => "doubling",
            Self::Propa { .. } => "propa",
        }
    }
}

fn sofic(run: &mut Run, cmd: &SoficCmd) -> Result<Status, CliError> {
    match cmd {
        SoficCmd::Folner {
            view,
            eps,
            strategy,
            max_size,
        } => {
            let l = load_lenient(run, view)?;
            let strat = match strategy {
                StrategyArg::Balls => FolnerStrategy::Balls,
                StrategyArg::Greedy => FolnerStrategy::GreedyGrow,
            };
            let rep = match folner_search(l.view(), l.root, *eps, strat, *max_size) {
                Ok(r) => r,
                Err(SoficError::FolnerBudget { best, .. }) => {
                    run.say(format!(
                        "no set within {max_size} vertices; best ratio {best}"
                    ));
                    run.field("best_ratio", best);
                    return Ok(Status::Budget);
                }
                Err(e) => return Err(e.into()),
            };
            let mut windows = Vec::new();
            if matches!(strat, FolnerStrategy::Balls) {
                for r in 0.. {
                    let b: Vec<Vertex> = bfs(l.view(), &[l.root], r, None)?
                        .into_iter()
                        .map(|p| p.0)
                        .collect();
                    if b.len() >= rep.subset.len() {
                        break;
                    }
                    windows.push(b);
                }
            }
            windows.push(rep.subset.vertices().to_vec());
            run.say(format!(
                "set of {} vertices, {} on the boundary, ratio {}",
                rep.subset.len(),
                rep.boundary,
                rep.ratio
            ));
            run.field("size", rep.subset.len());
            run.field("boundary", rep.boundary);
            run.field("ratio", rep.ratio);
            let file = WindowsFile { windows };
            run.artifact(
                "folner.json",
                serde_json::to_string(&file).expect("windows serialize"),
            );
        }
        SoficCmd::Complete {
            view,
            z_radius,
            reference,
        } => {
            let l = load(run, view)?;
            let seed = run.seed_for("complete");
            let done = complete_to_schreier(l.view(), &l.window, seed)?;
            run.say(format!(
                "completed {} vertices; parity fixes on generators {:?}",
                done.window.len(),
                done.parity_fixes
            ));
            if let Some(r) = z_radius {
                let refw = match reference {
                    Some(spec) => window_from_spec(l.view(), spec, l.root)?,
                    None => l.window.clone(),
                };
                let refs = reference_codes(l.view(), &refw, *r)?;
                let z = z_vertex_fraction(&done.graph, &refs, *r)?;
                run.say(format!(
                    "fraction of vertices whose {r}-ball occurs in the view: {z}"
                ));
                run.field("z_fraction", z);
            }
            emit_graph(run, "completion.txt", &done.graph);
        }
        SoficCmd::Bs { view, r, against } => {
            let l = load(run, view)?;
            let h = bs_histogram(l.view(), &l.window, *r)?;
            run.say(format!(
                "{} ball types at radius {r} over {} vertices",
                h.counts.len(),
                h.total
            ));
            run.field("types", h.counts.len());
            if let Some(p) = against {
                let g = read_graph(run, p)?;
                let other = bs_histogram(&g, &Window::all(&g)?, *r)?;
                let d = bs_distance(&h, &other)?;
                run.say(format!("distance to {}: {d}", p.display()));
                run.field("distance", d);
            }
            run.artifact("histogram.txt", write_histogram(&h));
        }
        SoficCmd::Hyperfinite { view, k, exact } => {
            let l = load(run, view)?;
            let mode = if *exact {
                DecomposeMode::Exact
            } else {
                DecomposeMode::Heuristic {
                    seed: run.seed_for("hyperfinite"),
                }
            };
            let d = hyperfinite_decompose(l.finite()?, *k, mode)?;
            run.say(format!(
                "removed {} edges ({} per vertex); largest component {}",
                d.removed.len(),
                d.fraction,
                d.max_component()
            ));
            run.field("removed", d.removed.len());
            run.field("fraction", d.fraction);
            run.artifact("decomposition.txt", d.write());
        }
        SoficCmd::Doubling {
            view,
            c,
            margin,
            compress,
        } => {
            let l = load(run, view)?;
            match doubling_maps(l.view(), &l.window, *c, *margin)? {
                DoublingOutcome::Maps(m) => {
                    let ok = m.verify(l.view())?;
                    let mut text = format!("doubling c={} size={}\n", m.c, m.phi1.len());
                    for (x, y) in &m.phi1 {
                        let _ = writeln!(text, "phi1 {x} {y}");
                    }
                    for (x, y) in &m.phi2 {
                        let _ = writeln!(text, "phi2 {x} {y}");
                    }
                    run.say(format!(
                        "maps on {} interior vertices, verified: {ok}",
                        m.phi1.len()
                    ));
                    run.field("outcome", "maps");
                    run.field("verified", ok);
                    run.artifact("doubling.txt", text);
                    if !ok {
                        return Ok(Status::CertificateFailure);
                    }
                    if *compress {
                        let c1 = distance_proper_coloring(l.view(), &l.window, 1)?;
                        let c2 = distance_proper_coloring(l.view(), &l.window, 2 * c)?;
                        let cc = compression_coloring(l.view(), &l.window, &m, &c1, &c2)?;
                        let mut decoded = 0;
                        for (&x, &y1) in &m.phi1 {
                            if decode_compression(l.view(), &cc, x)? == (y1, m.phi2[&x]) {
                                decoded += 1;
                            }
                        }
                        run.say(format!(
                            "compression decodes {decoded} of {} vertices",
                            m.phi1.len()
                        ));
                        run.field("decoded", decoded);
                        run.artifact("compression.txt", write_coloring(&cc.as_coloring()?));
                        if decoded != m.phi1.len() {
                            return Ok(Status::CertificateFailure);
                        }
                    }
                }
                DoublingOutcome::Violator(a) => {
                    let ok = verify_violator(l.view(), &l.window, *c, &a)?;
                    run.say(format!(
                        "Hall violator of {} vertices, verified: {ok}",
                        a.len()
                    ));
                    run.field("outcome", "violator");
                    run.field("verified", ok);
                    let mut text = format!("violator c={} size={}\n", c, a.len());
                    for v in &a {
                        let _ = writeln!(text, "vertex {v}");
                    }
                    run.artifact("violator.txt", text);
                    if !ok {
                        return Ok(Status::CertificateFailure);
                    }
                }
            }
        }
        SoficCmd::Propa {
            view,
            k,
            ray,
            tree_depth,
            sample_depth,
        } => {
            if let Some(n) = ray {
                let enc = tree_ray_encoding(*tree_depth)?;
                let w = property_a_ray_witness(&enc, *sample_depth, *n)?;
                let mut worst_norm: f64 = 0.0;
                let mut worst_step: f64 = 0.0;
                for &x in w.vectors.keys() {
                    worst_norm = worst_norm.max((w.norm(x).unwrap_or(0.0) - 1.0).abs());
                    let fx = enc.phi(x);
                    if let Some(d) = w.distance_sq(x, fx) {
                        worst_step = worst_step.max(d);
                    }
                }
                run.say(format!(
                    "{} ray vectors at scale {n}: norms within {worst_norm} of 1, largest step defect {worst_step}",
                    w.vectors.len()
                ));
                run.field("vectors", w.vectors.len());
                run.field("norm_error", worst_norm);
                run.field("step_defect_sq", worst_step);
                return Ok(Status::Success);
            }
            let l = load(run, view)?;
            let rep = property_a_ball_witness(l.view(), &l.window, *k)?;
            run.say(format!(
                "{} pairs checked at scale {k}; largest defect {}, {} over the bound",
                rep.pairs,
                rep.max_defect_sq,
                rep.violations.len()
            ));
            run.field("pairs", rep.pairs);
            run.field("max_defect_sq", rep.max_defect_sq);
            run.field("violations", rep.violations.len());
            if !rep.violations.is_empty() {
                return Ok(Status::CertificateFailure);
            }
        }
    }
    Ok(Status::Success)
}

/// As [`load`], but an infinite view without a window is fine.
fn load_lenient(run: &mut Run, view: &ViewArgs) -> Result<Loaded, CliError> {
    if view.window.is_none() && view.graph.is_none() {
        let mut v = view.clone();
        v.window = Some("ball:0".into());
        return load(run, &v);
    }
    load(run, view)
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[command(flatten)]
    pub view: ViewArgs,
    /// Kernel file
    #[arg(long, conflicts_with_all = ["word", "identity"])]
    pub kernel: Option<PathBuf>,
    /// Permutation kernel of a word of generator names
    #[arg(long, conflicts_with = "identity")]
    pub word: Option<String>,
    #[arg(long)]
    pub identity: bool,
    /// Add the adjoint of the word kernel (shift plus its inverse)
    #[arg(long, requires = "word")]
    pub symmetric: bool,
}

#[derive(Subcommand, Debug)]
pub enum KernelCmd {
    /// Print one entry and write the kernel table
    Eval {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Product with a second kernel file or word
    Mul {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long, conflicts_with = "by_word")]
        by: Option<PathBuf>,
        #[arg(long)]
        by_word: Option<String>,
    },
    /// Operator norm: power-iteration lower bound and Schur upper bound
    Norm {
        #[command(flatten)]
        k: KernelArgs,
        /// Windows file; default is the view window
        #[arg(long)]
        windows: Option<PathBuf>,
        #[arg(long, default_value_t = 300)]
        iters: usize,
    },
    /// Normalized diagonal sums over nested windows
    Trace {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long)]
        windows: PathBuf,
    },
    /// Keep entries between vertices of equal r-ball type
    Qr {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long)]
        r: u32,
    },
    /// Compress to local hulls and spread back with ball-average vectors
    Cp {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long)]
        scale: u32,
        /// Radius around the root of the vertices whose rows are rebuilt
        #[arg(long)]
        inner: u32,
    },
}

impl KernelCmd {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Eval { .. } => "eval",
            Self::Mul { .. } => "mul",
            Self::Norm { .. } => "norm",
            Self::Trace { .. } => "trace",
            Self::Qr { .. } => "qr",
            Self::Cp { .. } => "cp",
        }
    }
}

fn load_kernel(
    run: &mut Run,
    l: &Loaded,
    args: &KernelArgs,
    d: &Domain<'_, dyn GraphView + '_>,
) -> Result<LocalKernel, CliError> {
    let k = if let Some(p) = &args.kernel {
        let text = read_input(run, p)?;
        parse_kernel(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
    } else if let Some(w) = &args.word {
        let word = l.view().gens().parse_word(w)?;
        let k = kappa(d, &word)?;
        if args.symmetric {
            let inv = l.view().gens().inverse_word(&word);
            crate::kernel::kernel_add(d, &k, &kappa(d, &inv)?)?
        } else {
            k
        }
    } else if args.identity {
        identity(d)?
    } else {
        return Err(CliError::Usage(
            "choose a kernel: --kernel FILE, --word W or --identity".into(),
        ));
    };
    if k.gens != d.gens() {
        return Err(CliError::Input(
            "kernel was built for a different generator set".into(),
        ));
    }
    Ok(k)
}

fn kernel(run: &mut Run, cmd: &KernelCmd) -> Result<Status, CliError> {
    let args = match cmd {
        KernelCmd::Eval { k, .. }
        | KernelCmd::Mul { k, .. }
        | KernelCmd::Norm { k, .. }
        | KernelCmd::Trace { k, .. }
        | KernelCmd::Qr { k, .. }
        | KernelCmd::Cp { k, .. } => k,
    };
    let l = load(run, &args.view)?;
    let d: Domain<'_, dyn GraphView> = Domain::new(l.view(), l.window.clone());
    let k = load_kernel(run, &l, args, &d)?;
    match cmd {
        KernelCmd::Eval { x, y, .. } => {
            let (x, y) = (l.vertex(x)?, l.vertex(y)?);
            let v = kernel_eval(&k, l.view(), x, y)?;
            run.say(format!("K({x}, {y}) = {} + {}i", v.re, v.im));
            run.field("value", [v.re, v.im]);
            run.artifact("kernel.txt", write_kernel(&k));
        }
        KernelCmd::Mul { by, by_word, .. } => {
            let right = match (by, by_word) {
                (Some(p), _) => {
                    let text = read_input(run, p)?;
                    parse_kernel(&text)
                        .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
                }
                (None, Some(w)) => kappa(&d, &l.view().gens().parse_word(w)?)?,
                (None, None) => {
                    return Err(CliError::Usage("mul needs --by FILE or --by-word W".into()))
                }
            };
            let p = kernel_mul(&d, &k, &right)?;
            run.say(format!(
                "product of width {} on {} ball types",
                p.width,
                p.table.len()
            ));
            run.field("width", p.width);
            run.artifact("product.txt", write_kernel(&p));
        }
        KernelCmd::Norm { windows, iters, .. } => {
            let ws = match windows {
                Some(p) => read_windows(run, p)?,
                None => vec![l.window.clone()],
            };
            let est = norm_estimate(&d, &k, &ws, *iters)?;
            for (n, lb) in &est.per_window {
                run.say(format!("window of {n} vertices: lower bound {lb}"));
            }
            run.say(format!("norm in [{}, {}]", est.lower, est.upper));
            run.field("lower", est.lower);
            run.field("upper", est.upper);
            run.field("converged", est.converged);
        }
        KernelCmd::Trace { windows, .. } => {
            let ws = read_windows(run, windows)?;
            let rep = amenable_trace(l.view(), &k, &ws)?;
            let mut values = Vec::new();
            for e in &rep.entries {
                run.say(format!(
                    "|F| = {}: trace {} + {}i, boundary ratio {}, commutator {}, defect {} <= {}",
                    e.size,
                    e.value.re,
                    e.value.im,
                    e.boundary_ratio,
                    e.commutator,
                    e.defect,
                    e.defect_bound
                ));
                values.push(e.value.re);
            }
            if rep.not_nested {
                run.say("windows are not nested");
            }
            run.field("values", values);
            run.field(
                "defects",
                rep.entries.iter().map(|e| e.defect).collect::<Vec<_>>(),
            );
        }
        KernelCmd::Qr { r, .. } => {
            let q = qr_project(&d, &k, *r)?;
            run.say(format!(
                "projection at radius {r}: {} ball types",
                q.table.len()
            ));
            run.artifact("projected.txt", write_kernel(&q));
        }
        KernelCmd::Cp { scale, inner, .. } => {
            let w = property_a_ball_witness(l.view(), &l.window, *scale)?.witness;
            let inner_w = Window::ball(l.view(), l.root, *inner)?;
            let di: Domain<'_, dyn GraphView> = Domain::new(l.view(), inner_w.clone());
            let n = hull_size(l.view(), &inner_w, *scale)?;
            let rep = cp_approx(&di, &k, &w, n)?;
            run.say(format!(
                "hull {} vertices; largest entry change {}",
                rep.hull, rep.deviation
            ));
            run.field("deviation", rep.deviation);
            run.field("hull", rep.hull);
            run.artifact("cp.txt", write_kernel(&rep.kernel));
        }
    }
    Ok(Status::Success)
}
