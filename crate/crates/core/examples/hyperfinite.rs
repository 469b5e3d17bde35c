//! Cutting graphs into pieces of bounded size: cheap on a cycle, expensive
//! on a cubic graph of large girth.

use urs_core::constructions::{cycle, large_girth_sequence};
use urs_core::sofic::{hyperfinite_decompose, DecomposeMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cubic = large_girth_sequence(&[200, 500], 6, 3, 400)?;
    for k in [5, 20, 50] {
        let c = hyperfinite_decompose(&cycle(500), k, DecomposeMode::Heuristic { seed: 1 })?;
        print!("K={k}: cycle {:.3}", c.fraction);
        for (g, girth) in cubic.graphs.iter().zip(&cubic.girths) {
            let h = hyperfinite_decompose(g, k, DecomposeMode::Heuristic { seed: 1 })?;
            print!(", cubic n={} girth {girth} {:.3}", g.len(), h.fraction);
        }
        println!();
    }
    let small = cycle(9);
    let exact = hyperfinite_decompose(&small, 2, DecomposeMode::Exact)?;
    println!(
        "C9 into pieces of 2: {} edges, census {:?}",
        exact.removed.len(),
        exact.census
    );
    Ok(())
}
