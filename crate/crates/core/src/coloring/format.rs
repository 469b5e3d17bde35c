//! ```text
//! coloring alphabet 4 nonrepetitive 8 proper -
//! color 0 3
//! color 1 0
//! ```

use std::fmt::Write as _;

use super::{Coloring, ColoringError};
use crate::graph::{GraphError, Window};

fn perr(line: usize, message: impl Into<String>) -> ColoringError {
    ColoringError::Graph(GraphError::Parse {
        line,
        message: message.into(),
    })
}

fn opt(v: Option<u32>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

/// Vertices are written in domain order.
pub fn write_coloring(c: &Coloring) -> String {
    let mut out = format!(
        "coloring alphabet {} nonrepetitive {} proper {}\n",
        c.alphabet(),
        opt(c.nonrepetitive_up_to()),
        opt(c.proper_at_distance())
    );
    for (v, col) in c.domain().iter().zip(c.colors()) {
        let _ = writeln!(out, "color {v} {col}");
    }
    out
}

pub fn parse_coloring(text: &str) -> Result<Coloring, ColoringError> {
    let mut header = None;
    let mut vertices = Vec::new();
    let mut colors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let t: Vec<&str> = body.split_whitespace().collect();
        match t[0] {
            "coloring" => {
                if t.len() != 7 || t[1] != "alphabet" || t[3] != "nonrepetitive" || t[5] != "proper"
                {
                    return Err(perr(
                        line,
                        "expected `coloring alphabet <k> nonrepetitive <n|-> proper <d|->`",
                    ));
                }
                let num = |s: &str| -> Result<Option<u32>, ColoringError> {
                    if s == "-" {
                        Ok(None)
                    } else {
                        s.parse()
                            .map(Some)
                            .map_err(|_| perr(line, format!("bad number `{s}`")))
                    }
                };
                let k = num(t[2])?.ok_or_else(|| perr(line, "alphabet size required"))?;
                header = Some((k, num(t[4])?, num(t[6])?));
            }
            "color" => {
                if header.is_none() {
                    return Err(perr(line, "color line before header"));
                }
                if t.len() != 3 {
                    return Err(perr(line, "expected `color <vertex-id> <symbol>`"));
                }
                vertices.push(
                    t[1].parse::<u64>()
                        .map_err(|_| perr(line, format!("bad vertex `{}`", t[1])))?,
                );
                colors.push(
                    t[2].parse::<u32>()
                        .map_err(|_| perr(line, format!("bad symbol `{}`", t[2])))?,
                );
            }
            other => return Err(perr(line, format!("unknown record `{other}`"))),
        }
    }
    let (k, nonrep, proper) = header.ok_or_else(|| perr(1, "missing header"))?;
    let domain = Window::new(vertices.iter().copied());
    if domain.len() != vertices.len() {
        return Err(perr(1, "duplicate vertex"));
    }
    let mut c = Coloring::new(domain, colors, k)?;
    c.set_metadata(nonrep, proper);
    Ok(c)
}
