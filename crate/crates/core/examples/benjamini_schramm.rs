//! Local statistics: ball-type histograms of cycles and paths, and how the
//! total variation between them shrinks as the path grows.

use urs_core::constructions::{involution_cycle, path};
use urs_core::graph::Window;
use urs_core::sofic::{bs_distance, bs_histogram, write_histogram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 2;
    let c = involution_cycle(64);
    let hc = bs_histogram(&c, &Window::all(&c)?, r)?;
    for n in [8, 16, 32, 64, 128] {
        let p = path(n);
        let hp = bs_histogram(&p, &Window::all(&p)?, r)?;
        println!("C64 vs P{n} at radius {r}: {:.4}", bs_distance(&hc, &hp)?);
    }
    let p8 = path(8);
    print!(
        "{}",
        write_histogram(&bs_histogram(&p8, &Window::all(&p8)?, 1)?)
    );
    Ok(())
}
