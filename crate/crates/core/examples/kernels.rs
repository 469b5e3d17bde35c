//! Local kernels on the colored grid: translation and diagonal operators,
//! products, norm bounds, diagonal projection and traces along balls.

use num_complex::Complex64;
use urs_core::constructions::PeriodicColoredGrid;
use urs_core::graph::{GraphView, LazyGrid, Window};
use urs_core::kernel::{
    amenable_trace, diag, identity, kappa, kernel_add, kernel_mul, kernel_scale, norm_estimate,
    qr_project, rho, write_kernel, Domain,
};
use urs_core::urs::er_classes;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cg = PeriodicColoredGrid::new(10, 16, 4, 7)?;
    let o = LazyGrid::origin();
    let w = Window::ball(&cg, o, 12)?;
    let d = Domain::new(&cg, w.clone());
    let part = er_classes(&cg, &w, 1)?;
    let moving: Vec<usize> = (0..cg.gens().len())
        .filter(|&g| cg.step(o, g).ok() != Some(o))
        .collect();
    let weights: Vec<Complex64> = (0..part.len())
        .map(|i| Complex64::new(i as f64 / part.len() as f64, 0.0))
        .collect();
    let x = kappa(&d, &[moving[0]])?;
    let k = kernel_add(
        &d,
        &kernel_mul(&d, &rho(&cg, &part, &weights)?, &x)?,
        &identity(&d)?,
    )?;
    let k = kernel_add(
        &d,
        &k,
        &kernel_scale(
            &kappa(&d, &[moving[1], moving[1]])?,
            Complex64::new(0.0, 0.5),
        ),
    )?;
    println!(
        "{} generators, {} color classes, kernel width {}",
        cg.gens().len(),
        part.len(),
        k.width
    );

    let est = norm_estimate(
        &d,
        &k,
        &[Window::ball(&cg, o, 6)?, Window::ball(&cg, o, 10)?],
        200,
    )?;
    println!("norm in [{:.4}, {:.4}]", est.lower, est.upper);

    let q = qr_project(&d, &k, 1)?;
    let dk = diag(&d, &k)?;
    println!(
        "radius-1 projection has width {}, diagonal part width {}",
        q.width, dk.width
    );

    let windows: Vec<Window> = [3, 6, 9]
        .iter()
        .map(|&r| Window::ball(&cg, o, r))
        .collect::<Result<_, _>>()?;
    for e in amenable_trace(&cg, &k, &windows)?.entries {
        println!(
            "|F|={:4} trace {:.4} defect {:.4} <= {:.4}",
            e.size, e.value, e.defect, e.defect_bound
        );
    }
    let small = write_kernel(&kappa(
        &Domain::new(&cg, Window::ball(&cg, o, 1)?),
        &[moving[0]],
    )?);
    println!(
        "{} lines of kernel text for one step on a radius-1 ball",
        small.lines().count()
    );
    Ok(())
}
