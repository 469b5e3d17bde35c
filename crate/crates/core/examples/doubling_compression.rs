//! Doubling maps on a tree window, the Hall violator that rules them out on
//! the grid, and a coloring from which the maps can be decoded locally.

use urs_core::coloring::{
    compression_coloring, decode_compression, distance_proper_coloring, Coloring,
};
use urs_core::graph::{LazyGrid, LazyTree, Window};
use urs_core::sofic::{doubling_maps, DoublingOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = LazyGrid::new(None);
    let gw = Window::new(LazyGrid::rectangle(30, 30));
    match doubling_maps(&grid, &gw, 2, 2)? {
        DoublingOutcome::Violator(a) => {
            println!("grid 30x30 at C=2: violator of {} vertices", a.len())
        }
        DoublingOutcome::Maps(_) => println!("grid 30x30 at C=2: doubled"),
    }

    let tree = LazyTree::new(3, 16);
    let tw = Window::new(tree.ball(9));
    let DoublingOutcome::Maps(maps) = doubling_maps(&tree, &tw, 2, 2)? else {
        return Err("tree window not doubled".into());
    };
    println!(
        "tree: {} vertices doubled, maps verify: {}",
        maps.phi1.len(),
        maps.verify(&tree)?
    );
    let c1 = Coloring::new(
        tw.clone(),
        (0..tw.len()).map(|i| (i % 4) as u32).collect(),
        4,
    )?;
    let c2 = distance_proper_coloring(&tree, &tw, 4)?;
    let cc = compression_coloring(&tree, &tw, &maps, &c1, &c2)?;
    let ok = maps
        .phi1
        .keys()
        .filter(|&&x| {
            decode_compression(&tree, &cc, x).ok() == Some((maps.phi1[&x], maps.phi2[&x]))
        })
        .count();
    println!(
        "decoded {ok} of {} vertices from the coloring alone",
        maps.phi1.len()
    );
    Ok(())
}
