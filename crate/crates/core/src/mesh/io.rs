//! Plain-text mesh format.
//!
//! ```text
//! dim <d>
//! vertices <n>
//! <x> [<y> [<z>]]
//! cells <m>
//! <i0> <i1> ... <id>
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Indices are 0-based.

use std::fmt::Write;

use super::Mesh;
use crate::error::{Error, Result};

pub fn serialize_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim {}", mesh.dim());
    let _ = writeln!(out, "vertices {}", mesh.num_vertices());
    for i in 0..mesh.num_vertices() {
        let line: Vec<String> = mesh.vertex(i).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "cells {}", mesh.num_cells());
    for cell in mesh.cells() {
        let line: Vec<String> = cell.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, plus its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header(lines: &mut Lines<'_>, key: &str, last_line: usize) -> Result<(usize, usize)> {
    let (ln, line) = lines
        .next_content()
        .ok_or_else(|| parse_err(last_line, format!("expected '{key} <count>'")))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(parse_err(ln, format!("expected '{key} <count>', found '{line}'")));
    }
    let value = parts
        .next()
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| parse_err(ln, format!("missing or invalid count after '{key}'")))?;
    if parts.next().is_some() {
        return Err(parse_err(ln, "trailing tokens in header"));
    }
    Ok((ln, value))
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (ln, dim) = header(&mut lines, "dim", 1)?;
    if !(1..=3).contains(&dim) {
        return Err(parse_err(ln, format!("dim must be 1, 2 or 3, got {dim}")));
    }
    let (mut ln, nv) = header(&mut lines, "vertices", ln)?;
    let mut coords = Vec::with_capacity(nv * dim);
    for _ in 0..nv {
        let (l, line) = lines
            .next_content()
            .ok_or_else(|| parse_err(ln, "unexpected end of input in vertex list"))?;
        ln = l;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad coordinate: {e}")))?;
        if vals.len() != dim {
            return Err(parse_err(
                ln,
                format!("expected {dim} coordinates, found {}", vals.len()),
            ));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(ln, "non-finite coordinate"));
        }
        coords.extend(vals);
    }
    let (mut ln, nc) = header(&mut lines, "cells", ln)?;
    let mut cells = Vec::with_capacity(nc * (dim + 1));
    let mut cell_lines = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (l, line) = lines
            .next_content()
            .ok_or_else(|| parse_err(ln, "unexpected end of input in cell list"))?;
        ln = l;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad vertex index: {e}")))?;
        if idx.len() != dim + 1 {
            return Err(parse_err(
                ln,
                format!("expected {} indices, found {}", dim + 1, idx.len()),
            ));
        }
        if let Some(bad) = idx.iter().find(|&&v| v >= nv) {
            return Err(parse_err(
                ln,
                format!("vertex index {bad} out of range ({nv} vertices)"),
            ));
        }
        cells.extend(idx);
        cell_lines.push(ln);
    }
    if let Some((l, _)) = lines.next_content() {
        return Err(parse_err(l, "unexpected content after cell list"));
    }
    let mut mesh = Mesh::from_parts(dim, coords, cells);
    mesh.normalize_cells()
        .map_err(|(c, vol)| parse_err(cell_lines[c], format!("degenerate cell (volume {vol:e})")))?;
    Ok(mesh)
}
