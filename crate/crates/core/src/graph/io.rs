//! `GRAPH1` text format.
//!
//! ```text
//! GRAPH1 <W> <H>
//! <n>
//! v <id> <x> <y>      (n lines)
//! <m>
//! e <id1> <id2>       (m lines)
//! ```
//!
//! Floats are written with six decimals. Blank lines are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::GRAPH_FORMAT;

use super::{SpatialGraph, Vertex, VertexId};

pub fn save_graph(graph: &SpatialGraph) -> Vec<u8> {
    let mut out = String::with_capacity(32 + 40 * graph.vertex_count() + 16 * graph.edge_count());
    let _ = writeln!(out, "{GRAPH_FORMAT} {:.6} {:.6}", graph.width(), graph.height());
    let _ = writeln!(out, "{}", graph.vertex_count());
    for v in graph.vertices() {
        let _ = writeln!(out, "v {} {:.6} {:.6}", v.id, v.pos.x, v.pos.y);
    }
    let _ = writeln!(out, "{}", graph.edge_count());
    for (a, b) in graph.edge_ids() {
        let _ = writeln!(out, "e {a} {b}");
    }
    out.into_bytes()
}

pub fn load_graph(bytes: &[u8]) -> Result<SpatialGraph> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(0, format!("input is not UTF-8: {e}")))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let mut fields = header.split_whitespace();
    match fields.next() {
        Some(GRAPH_FORMAT) => {}
        Some(other) => return Err(Error::parse(ln, format!("expected `{GRAPH_FORMAT}`, found `{other}`"))),
        None => return Err(Error::parse(ln, "missing header")),
    }
    let width: f64 = field(&mut fields, ln, "width")?;
    let height: f64 = field(&mut fields, ln, "height")?;
    no_trailing(&mut fields, ln)?;

    let n = count(&mut lines, "vertex count")?;
    let mut vertices = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let (ln, line) = lines.next().ok_or_else(|| Error::parse(0, "unexpected end of input in vertex list"))?;
        let mut fields = line.split_whitespace();
        expect_tag(&mut fields, ln, "v")?;
        let id: VertexId = field(&mut fields, ln, "vertex id")?;
        let x: f64 = field(&mut fields, ln, "x")?;
        let y: f64 = field(&mut fields, ln, "y")?;
        no_trailing(&mut fields, ln)?;
        vertices.push(Vertex { id, pos: Point::new(x, y) });
    }

    let m = count(&mut lines, "edge count")?;
    let mut edges = Vec::with_capacity(m.min(1 << 20));
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or_else(|| Error::parse(0, "unexpected end of input in edge list"))?;
        let mut fields = line.split_whitespace();
        expect_tag(&mut fields, ln, "e")?;
        let a: VertexId = field(&mut fields, ln, "edge endpoint")?;
        let b: VertexId = field(&mut fields, ln, "edge endpoint")?;
        no_trailing(&mut fields, ln)?;
        edges.push((a, b));
    }
    if let Some((ln, line)) = lines.next() {
        return Err(Error::parse(ln, format!("unexpected trailing record `{line}`")));
    }
    SpatialGraph::new(width, height, vertices, &edges)
}

fn field<'a, T: FromStr>(fields: &mut impl Iterator<Item = &'a str>, line: usize, name: &str) -> Result<T> {
    let raw = fields
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing field `{name}`")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid value `{raw}` for field `{name}`")))
}

fn no_trailing<'a>(fields: &mut impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match fields.next() {
        Some(extra) => Err(Error::parse(line, format!("unexpected trailing field `{extra}`"))),
        None => Ok(()),
    }
}

fn expect_tag<'a>(fields: &mut impl Iterator<Item = &'a str>, line: usize, tag: &str) -> Result<()> {
    match fields.next() {
        Some(t) if t == tag => Ok(()),
        Some(t) => Err(Error::parse(line, format!("unknown record tag `{t}`, expected `{tag}`"))),
        None => Err(Error::parse(line, "empty record")),
    }
}

fn count<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, name: &str) -> Result<usize> {
    let (ln, line) = lines
        .next()
        .ok_or_else(|| Error::parse(0, format!("missing {name}")))?;
    line.parse()
        .map_err(|_| Error::parse(ln, format!("invalid {name} `{line}`")))
}
