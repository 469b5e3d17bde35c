//! Build the layered graph sequence with default parameters, check its
//! invariants, and rebuild it from its own manifest.

use urs_core::constructions::{build_nonexact, NonexactBuild, NonexactParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = build_nonexact(NonexactParams::default())?;
    for lv in &b.levels {
        println!(
            "level {}: base {} vertices, host {} vertices",
            lv.index,
            lv.g.len(),
            lv.h.len()
        );
    }
    println!("radii {:?}", b.radii);
    println!("invariant problems: {:?}", b.check()?);
    let record = b.manifest();
    let again = build_nonexact(NonexactBuild::params_from_manifest(&record)?)?;
    println!("rebuild identical: {}", again.manifest() == record);
    Ok(())
}
