//! Unit vectors witnessing property A: normalized balls in the grid and ray
//! segments in the tree.

use urs_core::constructions::tree_ray_encoding;
use urs_core::graph::{LazyGrid, Window};
use urs_core::sofic::{property_a_ball_witness, property_a_ray_witness};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = LazyGrid::new(None);
    for k in [1, 2, 4, 8, 16] {
        let w = Window::ball(&g, LazyGrid::origin(), k + 2)?;
        let rep = property_a_ball_witness(&g, &w, k)?;
        println!(
            "grid balls of radius {k}: worst squared defect {:.4}, {} bound violations",
            rep.max_defect_sq,
            rep.violations.len()
        );
    }
    let enc = tree_ray_encoding(20)?;
    for n in 1..=4 {
        let wit = property_a_ray_witness(&enc, 3, n)?;
        let s = enc.window(1).iter().next().ok_or("empty window")?;
        println!(
            "ray segments of {} vertices: defect {:.4}",
            n * n,
            wit.distance_sq(s, enc.phi(s)).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
