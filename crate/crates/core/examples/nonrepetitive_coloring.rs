//! Resample a path into a square-free 3-coloring, then check it and a
//! deliberately bad coloring with the repetition finder.

use urs_core::coloring::{
    find_repetitive_path, lll_alphabet_bound, nonrepetitive_color, Budget, Coloring,
};
use urs_core::constructions::path;
use urs_core::graph::Window;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = path(40);
    let all = Window::all(&p)?;
    let col = nonrepetitive_color(&p, &all, 3, 20, 7, Budget::resamples(5_000_000))?;
    let word: String = (0..40)
        .map(|v| char::from(b'a' + col.get(v).unwrap() as u8))
        .collect();
    println!("{word}");
    println!(
        "repetition: {:?}",
        find_repetitive_path(&p, &col, &all, 20)?
    );

    let bad = Coloring::new(
        all.clone(),
        (0..40).map(|v| (v / 3 % 2) as u32).collect(),
        2,
    )?;
    println!(
        "bad coloring witness: {:?}",
        find_repetitive_path(&p, &bad, &all, 20)?
    );
    for d in 1..=4 {
        println!(
            "guaranteed alphabet for degree {d}: {}",
            lll_alphabet_bound(d)
        );
    }
    Ok(())
}
