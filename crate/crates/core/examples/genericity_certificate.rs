//! Certify that nearby vertices of a colored grid have distinguishable balls,
//! and watch the uncolored cycle fail the same test.

use std::time::Instant;

use urs_core::constructions::{cycle, PeriodicColoredGrid};
use urs_core::graph::{GraphView, Window};
use urs_core::urs::{covering_radius, genericity_radius};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Instant::now();
    let grid = PeriodicColoredGrid::new(10, 16, 4, 7)?;
    println!(
        "{} edge labels, colors decode: {}",
        grid.gens().len(),
        grid.decodes()
    );
    let window = PeriodicColoredGrid::window(100, 100);
    let cert = genericity_radius(&grid, &window, 3, 10, "grid100")?;
    println!("{cert}");
    for side in [40, 80] {
        let rep = covering_radius(&grid, &PeriodicColoredGrid::window(side, side), 2)?;
        println!("covering radius at r=2 on {side}x{side}: {rep:?}");
    }
    let c8 = cycle(8);
    println!(
        "{}",
        genericity_radius(&c8, &Window::all(&c8)?, 1, 6, "C8")?
    );
    println!("elapsed {:?}", t.elapsed());
    Ok(())
}
