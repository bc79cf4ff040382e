//! Line-oriented graph and update-stream formats.
//!
//! Graph files hold `v <id> [c1,c2,...]` and `e <u> <v>` records; update
//! streams hold `+v`, `-v`, `+e`, `-e` and `!v` records. `#` starts a comment.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ColorSet, DegreePolicy, DynamicGraph, GraphError, UpdateOp, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

struct Record<'a> {
    line: usize,
    fields: Vec<(usize, &'a str)>,
}

fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut fields = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    fields.push((s + 1, &body[s..pos]));
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            fields.push((s + 1, &body[s..]));
        }
        (!fields.is_empty()).then_some(Record { line: i + 1, fields })
    })
}

impl Record<'_> {
    fn err(&self, col: usize, msg: impl Into<String>) -> FormatError {
        FormatError::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn arity(&self, min: usize, max: usize) -> Result<(), FormatError> {
        let n = self.fields.len() - 1;
        if n < min || n > max {
            let col = self.fields.get(max + 1).map_or(self.fields[0].0, |f| f.0);
            return Err(self.err(col, format!("`{}` expects {min}..={max} arguments, found {n}", self.fields[0].1)));
        }
        Ok(())
    }

    fn vertex(&self, i: usize) -> Result<VertexId, FormatError> {
        let (col, s) = self.fields[i];
        s.parse::<u32>().map(VertexId).map_err(|_| self.err(col, format!("invalid vertex id `{s}`")))
    }

    fn colors(&self, i: usize) -> Result<ColorSet, FormatError> {
        let Some(&(col, s)) = self.fields.get(i) else {
            return Ok(ColorSet::new());
        };
        let mut out = ColorSet::new();
        for name in s.split(',') {
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
                return Err(self.err(col, format!("invalid color list `{s}`")));
            }
            out.insert(name);
        }
        Ok(out)
    }
}

/// Parses a graph file. Vertex records are applied before edge records, so
/// their relative order in the file does not matter.
pub fn parse_graph(text: &str, policy: DegreePolicy) -> Result<DynamicGraph, FormatError> {
    let mut g = DynamicGraph::new(policy).map_err(|source| FormatError::Graph { line: 0, source })?;
    let mut edges = Vec::new();
    for rec in records(text) {
        match rec.fields[0].1 {
            "v" => {
                rec.arity(1, 2)?;
                let op = UpdateOp::AddVertex(rec.vertex(1)?, rec.colors(2)?);
                g.apply(&op).map_err(|source| FormatError::Graph { line: rec.line, source })?;
            }
            "e" => {
                rec.arity(2, 2)?;
                edges.push((rec.line, UpdateOp::AddEdge(rec.vertex(1)?, rec.vertex(2)?)));
            }
            other => return Err(rec.err(rec.fields[0].0, format!("unknown record `{other}`"))),
        }
    }
    for (line, op) in edges {
        g.apply(&op).map_err(|source| FormatError::Graph { line, source })?;
    }
    Ok(g)
}

/// Parses an update stream into operations (not validated against a graph).
pub fn parse_updates(text: &str) -> Result<Vec<(usize, UpdateOp)>, FormatError> {
    let mut out = Vec::new();
    for rec in records(text) {
        let op = match rec.fields[0].1 {
            "+v" => {
                rec.arity(1, 2)?;
                UpdateOp::AddVertex(rec.vertex(1)?, rec.colors(2)?)
            }
            "-v" => {
                rec.arity(1, 1)?;
                UpdateOp::RemoveVertex(rec.vertex(1)?)
            }
            "+e" => {
                rec.arity(2, 2)?;
                UpdateOp::AddEdge(rec.vertex(1)?, rec.vertex(2)?)
            }
            "-e" => {
                rec.arity(2, 2)?;
                UpdateOp::RemoveEdge(rec.vertex(1)?, rec.vertex(2)?)
            }
            "!v" => {
                rec.arity(1, 2)?;
                UpdateOp::Relabel(rec.vertex(1)?, rec.colors(2)?)
            }
            other => return Err(rec.err(rec.fields[0].0, format!("unknown update `{other}`"))),
        };
        out.push((rec.line, op));
    }
    Ok(out)
}

/// Serializes a graph in the format read by [`parse_graph`].
pub fn write_graph(g: &DynamicGraph) -> String {
    let mut s = String::new();
    for v in g.sorted_vertices() {
        let colors = g.colors(v).expect("live vertex");
        if colors.is_empty() {
            let _ = writeln!(s, "v {v}");
        } else {
            let _ = writeln!(s, "v {v} {colors}");
        }
    }
    for (u, v) in g.sorted_edges() {
        let _ = writeln!(s, "e {u} {v}");
    }
    s
}
