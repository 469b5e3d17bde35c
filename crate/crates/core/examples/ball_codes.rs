//! Canonical ball codes: equal codes mean isomorphic labeled balls, and the
//! Schreier distance is read off the largest radius where they agree.

use urs_core::ball::{code_at, schreier_distance};
use urs_core::constructions::{involution_cycle, path};
use urs_core::graph::Window;
use urs_core::urs::er_classes;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c12 = involution_cycle(12);
    let p12 = path(12);
    println!(
        "C12 codes at 0 and 6 agree: {}",
        code_at(&c12, 0, 4)? == code_at(&c12, 6, 4)?
    );
    for v in [0, 3, 6] {
        let d = schreier_distance(&c12, 0, &p12, v, 8)?;
        println!(
            "C12 at 0 vs P12 at {v}: agreeing radius {:?}",
            d.agreeing_radius
        );
    }
    for r in 0..4 {
        let classes = er_classes(&p12, &Window::all(&p12)?, r)?;
        println!("P12 has {} ball types at radius {r}", classes.len());
    }
    Ok(())
}
