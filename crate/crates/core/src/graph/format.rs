//! Line-oriented text format for finite graphs.
//!
//! ```text
//! gens 3 pairing s:S S:s a:a involutions a
//! v 0 color 2 s:1 S:3 a:2
//! ```
//!
//! The pairing list gives every generator in order as `name:inverse`; the
//! involution list repeats the self-paired names (`-` when empty). Vertex
//! lines may come in any order; fixed points are omitted. Writing sorts
//! vertices by id and moves by generator, so parse followed by write is a
//! canonical form.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{FiniteGraph, GraphError, GraphView};
use crate::gens::GeneratorSet;

fn perr(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<GeneratorSet, GraphError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() < 5 || toks[0] != "gens" || toks[2] != "pairing" {
        return Err(perr(
            line,
            "expected `gens <k> pairing <list> involutions <list>`",
        ));
    }
    let k: usize = toks[1]
        .parse()
        .map_err(|_| perr(line, format!("bad generator count `{}`", toks[1])))?;
    let inv_pos = toks
        .iter()
        .position(|&t| t == "involutions")
        .ok_or_else(|| perr(line, "missing `involutions`"))?;
    let pairs = &toks[3..inv_pos];
    if pairs.len() != k {
        return Err(perr(
            line,
            format!("expected {k} pairing entries, found {}", pairs.len()),
        ));
    }
    let mut names = Vec::with_capacity(k);
    let mut partner = Vec::with_capacity(k);
    for p in pairs {
        let (a, b) = p
            .split_once(':')
            .ok_or_else(|| perr(line, format!("pairing entry `{p}` is not `name:inverse`")))?;
        names.push(a.to_string());
        partner.push(b.to_string());
    }
    let mut inverse = Vec::with_capacity(k);
    for b in &partner {
        inverse.push(
            names
                .iter()
                .position(|n| n == b)
                .ok_or_else(|| perr(line, format!("unknown inverse `{b}`")))?,
        );
    }
    let gens = GeneratorSet::new(names, inverse).map_err(|e| perr(line, e.to_string()))?;
    let mut declared: Vec<usize> = Vec::new();
    for t in &toks[inv_pos + 1..] {
        if *t == "-" {
            continue;
        }
        let g = gens
            .index_of(t)
            .ok_or_else(|| perr(line, format!("unknown involution `{t}`")))?;
        declared.push(g);
    }
    declared.sort_unstable();
    let actual: Vec<usize> = (0..k).filter(|&g| gens.is_involution(g)).collect();
    if declared != actual {
        return Err(perr(line, "involution list disagrees with pairing"));
    }
    Ok(gens)
}

struct VertexLine {
    line: usize,
    id: u64,
    color: Option<u32>,
    moves: Vec<(usize, u64)>,
}

/// Parse the text format. Errors carry the 1-based line number.
pub fn parse_graph(text: &str) -> Result<FiniteGraph, GraphError> {
    let mut gens = None;
    let mut rows: Vec<VertexLine> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with("gens") {
            if gens.is_some() {
                return Err(perr(line, "duplicate header"));
            }
            gens = Some(parse_header(line, body)?);
            continue;
        }
        let g = gens
            .as_ref()
            .ok_or_else(|| perr(line, "vertex line before header"))?;
        let mut toks = body.split_whitespace();
        if toks.next() != Some("v") {
            return Err(perr(line, "expected a `v` line"));
        }
        let id_tok = toks.next().ok_or_else(|| perr(line, "missing vertex id"))?;
        let id: u64 = id_tok
            .parse()
            .map_err(|_| perr(line, format!("bad vertex id `{id_tok}`")))?;
        let mut color = None;
        let mut moves = Vec::new();
        let rest: Vec<&str> = toks.collect();
        let mut j = 0;
        while j < rest.len() {
            if rest[j] == "color" {
                let c = rest
                    .get(j + 1)
                    .ok_or_else(|| perr(line, "missing color symbol"))?;
                color = Some(
                    c.parse()
                        .map_err(|_| perr(line, format!("bad color symbol `{c}`")))?,
                );
                j += 2;
                continue;
            }
            let (name, target) = rest[j]
                .split_once(':')
                .ok_or_else(|| perr(line, format!("bad move `{}`", rest[j])))?;
            let gi = g
                .index_of(name)
                .ok_or_else(|| perr(line, format!("unknown generator `{name}`")))?;
            let t: u64 = target
                .parse()
                .map_err(|_| perr(line, format!("bad target `{target}`")))?;
            moves.push((gi, t));
            j += 1;
        }
        rows.push(VertexLine {
            line,
            id,
            color,
            moves,
        });
    }
    let gens = gens.ok_or_else(|| perr(1, "missing header"))?;
    rows.sort_by_key(|r| r.id);
    for w in rows.windows(2) {
        if w[0].id == w[1].id {
            return Err(perr(w[1].line, format!("duplicate vertex {}", w[1].id)));
        }
    }
    let index: HashMap<u64, u32> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id, i as u32))
        .collect();
    let colored = rows.iter().filter(|r| r.color.is_some()).count();
    if colored != 0 && colored != rows.len() {
        let bad = rows.iter().find(|r| r.color.is_none()).unwrap();
        return Err(perr(bad.line, "vertex has no color while others do"));
    }
    let mut b = FiniteGraph::builder(gens, rows.len());
    for (i, r) in rows.iter().enumerate() {
        for &(g, t) in &r.moves {
            let ti = *index
                .get(&t)
                .ok_or_else(|| perr(r.line, format!("target {t} is not a vertex")))?;
            b.set_one(i as u32, g, ti)
                .map_err(|e| perr(r.line, e.to_string()))?;
        }
    }
    let mut graph = b.build().map_err(|e| match e {
        GraphError::NotDeterministic { vertex, generator } => perr(
            rows[vertex as usize].line,
            format!("generator {generator} is not inverted by its pair"),
        ),
        other => other,
    })?;
    if colored > 0 {
        graph = graph.with_colors(rows.iter().map(|r| r.color.unwrap()).collect())?;
    }
    graph.set_ids(rows.iter().map(|r| r.id).collect());
    Ok(graph)
}

/// Serialize in canonical order.
pub fn write_graph(g: &FiniteGraph) -> String {
    let gens = g.gens();
    let mut out = String::new();
    let pairing: Vec<String> = (0..gens.len())
        .map(|i| format!("{}:{}", gens.name(i), gens.name(gens.inverse(i))))
        .collect();
    let invs: Vec<&str> = (0..gens.len())
        .filter(|&i| gens.is_involution(i))
        .map(|i| gens.name(i))
        .collect();
    let _ = writeln!(
        out,
        "gens {} pairing {} involutions {}",
        gens.len(),
        pairing.join(" "),
        if invs.is_empty() {
            "-".to_string()
        } else {
            invs.join(" ")
        }
    );
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| g.external_id(v));
    for v in order {
        let _ = write!(out, "v {}", g.external_id(v));
        if let Some(c) = g.colors() {
            let _ = write!(out, " color {}", c[v]);
        }
        for &(h, w) in g.raw_moves(v) {
            let _ = write!(
                out,
                " {}:{}",
                gens.name(h as usize),
                g.external_id(w as usize)
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "gens 2 pairing s:S S:s involutions -\n\
v 10 s:11 S:13\n\
v 11 s:12 S:10\n\
v 12 s:13 S:11\n\
v 13 s:10 S:12\n";

    #[test]
    fn round_trip_is_byte_stable() {
        let g = parse_graph(SQUARE).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(write_graph(&g), SQUARE);
    }

    #[test]
    fn reordered_input_is_canonicalized() {
        let shuffled = "gens 2 pairing s:S S:s involutions -\n\
v 12 S:11 s:13\n\
v 10 s:11 S:13\n\
v 13 s:10 S:12\n\
v 11 s:12 S:10\n";
        assert_eq!(write_graph(&parse_graph(shuffled).unwrap()), SQUARE);
    }

    #[test]
    fn colors_and_involutions() {
        let text =
            "gens 1 pairing a:a involutions a\nv 0 color 3 a:1\nv 1 color 4 a:0\nv 2 color 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.color(2), Some(3));
        assert_eq!(write_graph(&g), text);
    }

    #[test]
    fn errors_are_positioned() {
        let bad = "gens 2 pairing s:S S:s involutions -\nv 0 s:1 S:1\nv 1 s:0 q:0\n";
        match parse_graph(bad) {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let one_way = "gens 2 pairing s:S S:s involutions -\nv 0 s:1\nv 1\n";
        assert!(matches!(
            parse_graph(one_way),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }
}
