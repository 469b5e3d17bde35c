//! Drive the command line in-process: build a cycle, color it, verify the
//! coloring and compare its local statistics with a path.

use urs_core::cli::run;

fn urs(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("urs").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    print!(
        "{}{}",
        String::from_utf8_lossy(&out),
        String::from_utf8_lossy(&err)
    );
    println!("exit {code}\n");
    code
}

fn main() {
    let dir = std::env::temp_dir().join("urs-cli-session");
    let d = dir.to_str().unwrap();
    let graph = dir.join("cycle.txt");
    let g = graph.to_str().unwrap();
    let coloring = dir.join("coloring.txt");
    urs(&["--out", d, "construct", "cycle", "--n", "24"]);
    urs(&[
        "--seed", "4", "--out", d, "color", "nonrep", "--graph", g, "--nmax", "6",
    ]);
    urs(&[
        "color",
        "verify",
        "--graph",
        g,
        "--coloring",
        coloring.to_str().unwrap(),
        "--nmax",
        "6",
    ]);
    urs(&["urs", "genericity", "--graph", g, "--R", "2", "--Smax", "6"]);
    let edges = dir.join("ring.txt");
    let ring: String = (0..24)
        .map(|i| format!("{i} {} {}\n", (i + 1) % 24, i % 2))
        .collect();
    std::fs::write(&edges, ring).unwrap();
    urs(&[
        "--out",
        d,
        "construct",
        "involution",
        "--edges",
        edges.to_str().unwrap(),
    ]);
    urs(&["--out", d, "construct", "path", "--n", "24"]);
    let inv = dir.join("involution.txt");
    urs(&[
        "sofic",
        "bs",
        "--graph",
        inv.to_str().unwrap(),
        "--r",
        "2",
        "--against",
        dir.join("path.txt").to_str().unwrap(),
    ]);
}
