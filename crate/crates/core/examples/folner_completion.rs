//! Følner balls in the grid, and finite Schreier graphs obtained by closing
//! up a ball: the larger the ball, the more vertices look like the grid.

use urs_core::graph::{LazyGrid, Window};
use urs_core::sofic::{
    boundary_ratio, complete_to_schreier, folner_search, reference_codes, z_vertex_fraction,
    FolnerStrategy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = LazyGrid::new(None);
    let o = LazyGrid::origin();
    for strategy in [FolnerStrategy::Balls, FolnerStrategy::GreedyGrow] {
        let f = folner_search(&g, o, 0.1, strategy, 5000)?;
        println!(
            "{strategy:?}: {} vertices, ratio {:.4}",
            f.subset.len(),
            f.ratio
        );
    }
    let refs = reference_codes(&g, &Window::new([o]), 2)?;
    for radius in [5, 10, 20, 40] {
        let w = Window::ball(&g, o, radius)?;
        let done = complete_to_schreier(&g, &w, 1)?;
        println!(
            "ball {radius}: boundary ratio {:.4}, grid-like fraction {:.4}",
            boundary_ratio(&g, &w)?.ratio,
            z_vertex_fraction(&done.graph, &refs, 2)?
        );
    }
    Ok(())
}
