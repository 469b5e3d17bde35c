//! Towers of finite covers: cycles doubling, random voltage lifts of a cubic
//! graph, and a check that each projection is a covering map.

use urs_core::constructions::{cycle_cover_tower, is_covering_map, random_cubic, voltage_z2_tower};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = cycle_cover_tower(3, 5);
    let sizes: Vec<usize> = t.levels.iter().map(|g| g.len()).collect();
    println!("cycle tower {sizes:?}");
    let base = random_cubic(10, 4)?;
    let v = voltage_z2_tower(&base, 5, 4)?;
    for (i, map) in v.maps.iter().enumerate() {
        println!(
            "level {} -> {}: {} -> {} vertices, covering {}",
            i + 1,
            i,
            v.levels[i + 1].len(),
            v.levels[i].len(),
            is_covering_map(&v.levels[i + 1], &v.levels[i], map)?
        );
    }
    println!("disconnected lifts redrawn: {}", v.reseeds);
    Ok(())
}
