//! ```text
//! kernel width=1 radius=2 gens=3fa1...
//! entry 9c0e... 0 1 0
//! entry 9c0e... 2 0.5 -0.5
//! zero 41d7...
//! ```
//!
//! `zero` marks a ball type on which the kernel is defined with an all-zero
//! row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{KernelError, LocalKernel};
use crate::ball::BallCode;

pub fn write_kernel(k: &LocalKernel) -> String {
    let mut out = format!(
        "kernel width={} radius={} gens={}\n",
        k.width, k.radius, k.gens
    );
    for (code, row) in &k.table {
        let hex = code.hex();
        if row.is_empty() {
            let _ = writeln!(out, "zero {hex}");
        }
        for (a, c) in row {
            let _ = writeln!(out, "entry {hex} {a} {:?} {:?}", c.re, c.im);
        }
    }
    out
}

pub fn parse_kernel(text: &str) -> Result<LocalKernel, KernelError> {
    let mut header: Option<(u32, u32, String)> = None;
    let mut table: BTreeMap<BallCode, Vec<(u32, Complex64)>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |m: &str| KernelError::Parse {
            line,
            message: m.to_string(),
        };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let t: Vec<&str> = body.split_whitespace().collect();
        match (t[0], header.is_some()) {
            ("kernel", false) => {
                let field = |k: &str| {
                    t[1..]
                        .iter()
                        .find_map(|f| f.strip_prefix(k))
                        .ok_or_else(|| err(&format!("header lacks {k}")))
                };
                let width = field("width=")?.parse().map_err(|_| err("bad width"))?;
                let radius = field("radius=")?.parse().map_err(|_| err("bad radius"))?;
                if radius < width {
                    return Err(err("radius below width"));
                }
                header = Some((width, radius, field("gens=")?.to_string()));
            }
            ("kernel", true) => return Err(err("second header")),
            (_, false) => return Err(err("missing `kernel` header")),
            ("zero", true) if t.len() == 2 => {
                let code = BallCode::from_hex(t[1]).map_err(|_| err("bad code"))?;
                table.entry(code).or_default();
            }
            ("entry", true) if t.len() == 5 => {
                let code = BallCode::from_hex(t[1]).map_err(|_| err("bad code"))?;
                let a: u32 = t[2].parse().map_err(|_| err("bad address"))?;
                let re: f64 = t[3].parse().map_err(|_| err("bad real part"))?;
                let im: f64 = t[4].parse().map_err(|_| err("bad imaginary part"))?;
                let row = table.entry(code).or_default();
                if row.iter().any(|e| e.0 == a) {
                    return Err(err("duplicate entry"));
                }
                row.push((a, Complex64::new(re, im)));
            }
            _ => {
                return Err(err(
                    "expected `entry <code> <address> <re> <im>` or `zero <code>`",
                ))
            }
        }
    }
    let (width, radius, gens) = header.ok_or(KernelError::Parse {
        line: 1,
        message: "empty kernel file".into(),
    })?;
    for row in table.values_mut() {
        row.sort_by_key(|e| e.0);
    }
    Ok(LocalKernel {
        width,
        radius,
        gens,
        table,
    })
}
