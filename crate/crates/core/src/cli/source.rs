use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use super::{CliError, Run};
use crate::constructions::PeriodicColoredGrid;
use crate::graph::{parse_graph, FiniteGraph, GraphView, LazyGrid, Vertex, Window};

#[derive(Args, Clone, Debug)]
pub struct ViewArgs {
    /// Finite graph file
    #[arg(long, conflicts_with_all = ["grid", "colored_grid"])]
    pub graph: Option<PathBuf>,
    /// The infinite square grid
    #[arg(long, conflicts_with = "colored_grid")]
    pub grid: bool,
    /// The grid relabeled by a periodic genericity coloring of this period
    #[arg(long)]
    pub colored_grid: Option<usize>,
    /// `WxH` rectangle at the origin, `ball:R` around the root, or `all`
    #[arg(long)]
    pub window: Option<String>,
    /// Root vertex: an id, or `x,y` on grids
    #[arg(long)]
    pub root: Option<String>,
}

pub enum Source {
    Finite(FiniteGraph),
    Grid(LazyGrid),
    Colored(Box<PeriodicColoredGrid>),
}

pub struct Loaded {
    pub source: Source,
    pub window: Window,
    pub root: Vertex,
    pub label: String,
}

impl Loaded {
    pub fn view(&self) -> &dyn GraphView {
        match &self.source {
            Source::Finite(g) => g,
            Source::Grid(g) => g,
            Source::Colored(g) => g.as_ref(),
        }
    }

    pub fn finite(&self) -> Result<&FiniteGraph, CliError> {
        match &self.source {
            Source::Finite(g) => Ok(g),
            _ => Err(CliError::Usage(
                "this command needs a finite --graph".into(),
            )),
        }
    }

    pub fn is_grid(&self) -> bool {
        !matches!(self.source, Source::Finite(_))
    }

    pub fn vertex(&self, text: &str) -> Result<Vertex, CliError> {
        parse_vertex(text, self.is_grid())
    }
}

pub fn parse_vertex(text: &str, grid: bool) -> Result<Vertex, CliError> {
    if let Some((x, y)) = text.split_once(',') {
        if !grid {
            return Err(CliError::Usage(format!(
                "coordinates `{text}` need a grid view"
            )));
        }
        let c = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|_| CliError::Usage(format!("bad coordinate in `{text}`")))
        };
        return Ok(LazyGrid::vertex(c(x)?, c(y)?));
    }
    text.parse()
        .map_err(|_| CliError::Usage(format!("bad vertex `{text}`")))
}

pub fn read_input(run: &mut Run, path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    run.record_input(path, &text);
    Ok(text)
}

pub fn read_graph(run: &mut Run, path: &Path) -> Result<FiniteGraph, CliError> {
    let text = read_input(run, path)?;
    parse_graph(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Colored grids use alphabet 16 with repetitions excluded up to 8 vertices.
pub const COLORED_GRID_ALPHABET: u32 = 16;
pub const COLORED_GRID_NMAX: u32 = 4;

pub fn load(run: &mut Run, args: &ViewArgs) -> Result<Loaded, CliError> {
    let (source, label) = if let Some(p) = &args.graph {
        (Source::Finite(read_graph(run, p)?), p.display().to_string())
    } else if args.grid {
        (Source::Grid(LazyGrid::new(None)), "grid".to_string())
    } else if let Some(period) = args.colored_grid {
        let seed = run.seed_for("colored-grid");
        let g = PeriodicColoredGrid::new(period, COLORED_GRID_ALPHABET, COLORED_GRID_NMAX, seed)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        (
            Source::Colored(Box::new(g)),
            format!("colored-grid{period}"),
        )
    } else {
        return Err(CliError::Usage(
            "choose a view: --graph FILE, --grid or --colored-grid PERIOD".into(),
        ));
    };
    let grid = !matches!(source, Source::Finite(_));
    let root = match &args.root {
        Some(t) => parse_vertex(t, grid)?,
        None if grid => LazyGrid::origin(),
        None => 0,
    };
    let mut loaded = Loaded {
        source,
        window: Window::new([]),
        root,
        label,
    };
    let spec = args.window.as_deref().unwrap_or("all");
    loaded.window = window_from_spec(loaded.view(), spec, root)?;
    loaded.label = format!("{}:{spec}", loaded.label);
    Ok(loaded)
}

pub fn window_from_spec(
    view: &dyn GraphView,
    spec: &str,
    root: Vertex,
) -> Result<Window, CliError> {
    if spec == "all" {
        return Window::all(view).map_err(|_| {
            CliError::Usage("infinite view: give --window WxH or --window ball:R".into())
        });
    }
    if let Some(r) = spec.strip_prefix("ball:") {
        let r: u32 = r
            .parse()
            .map_err(|_| CliError::Usage(format!("bad ball radius in `{spec}`")))?;
        return Ok(Window::ball(view, root, r)?);
    }
    let (w, h) = spec
        .split_once('x')
        .ok_or_else(|| CliError::Usage(format!("bad window `{spec}`")))?;
    let n = |s: &str| {
        s.parse::<i32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| CliError::Usage(format!("bad window `{spec}`")))
    };
    if view.finite_vertices().is_some() {
        return Err(CliError::Usage("rectangles need a grid view".into()));
    }
    Ok(Window::new(LazyGrid::rectangle(n(w)?, n(h)?)))
}

/// A list of vertex windows, as written by `sofic folner`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowsFile {
    pub windows: Vec<Vec<Vertex>>,
}

pub fn read_windows(run: &mut Run, path: &Path) -> Result<Vec<Window>, CliError> {
    let text = read_input(run, path)?;
    let f: WindowsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), e.line())))?;
    Ok(f.windows.into_iter().map(Window::new).collect())
}
