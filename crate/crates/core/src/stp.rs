//! Reader for the SteinLib STP format (undirected subset).
//!
//! ```text
//! 33D32945 STP File, STP Format Version 1.0
//! SECTION Graph
//! Nodes 3
//! Edges 3
//! E 1 2 1
//! ...
//! END
//! SECTION Terminals
//! Terminals 2
//! T 1
//! T 3
//! END
//! EOF
//! ```
//!
//! Keywords are case-insensitive. Sections other than `Graph` and `Terminals`
//! are skipped. Decimal weights are scaled to integers by the largest number of
//! decimal places seen in the file.

use std::fmt::Write as _;
use std::io::{self, Read};

use thiserror::Error;

use crate::graph::{Cost, Edge, Graph, GraphError, Vertex};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: negative edge weight {weight}")]
    NegativeWeight { line: usize, weight: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Graph,
    Terminals,
    Skipped,
}

/// A weight token split into integer digits and fractional digits.
struct RawWeight {
    line: usize,
    int_part: String,
    frac_part: String,
}

fn parse_weight(tok: &str, line: usize) -> Result<RawWeight, ParseError> {
    if tok.starts_with('-') {
        return Err(ParseError::NegativeWeight {
            line,
            weight: tok.to_owned(),
        });
    }
    let tok = tok.strip_prefix('+').unwrap_or(tok);
    let (int_part, frac_part) = match tok.split_once('.') {
        Some((a, b)) => (a, b.trim_end_matches('0')),
        None => (tok, ""),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits(int_part) || !digits(frac_part) {
        return Err(syntax(line, format!("invalid weight '{tok}'")));
    }
    Ok(RawWeight {
        line,
        int_part: int_part.to_owned(),
        frac_part: frac_part.to_owned(),
    })
}

fn scale_weight(w: &RawWeight, scale: usize) -> Result<Cost, ParseError> {
    let mut s = String::with_capacity(w.int_part.len() + scale);
    s.push_str(&w.int_part);
    s.push_str(&w.frac_part);
    for _ in w.frac_part.len()..scale {
        s.push('0');
    }
    if s.is_empty() {
        return Ok(0);
    }
    s.parse::<Cost>()
        .map_err(|_| syntax(w.line, "weight does not fit in 64 bits"))
}

fn parse_vertex(tok: Option<&str>, line: usize) -> Result<Vertex, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing vertex id"))?;
    tok.parse::<Vertex>()
        .map_err(|_| syntax(line, format!("invalid vertex id '{tok}'")))
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what} count")))?;
    tok.parse::<usize>()
        .map_err(|_| syntax(line, format!("invalid {what} count '{tok}'")))
}

pub fn parse_stp(text: &str) -> Result<Graph, ParseError> {
    let mut section = Section::None;
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<usize> = None;
    let mut declared_terminals: Option<usize> = None;
    let mut raw_edges: Vec<(Vertex, Vertex, RawWeight)> = Vec::new();
    let mut terminals: Vec<Vertex> = Vec::new();
    let mut saw_eof = false;

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut toks = raw_line.split_whitespace();
        let Some(head) = toks.next() else { continue };
        let key = head.to_ascii_uppercase();

        if key == "EOF" {
            saw_eof = true;
            break;
        }
        if section == Section::None && key == "33D32945" {
            continue;
        }
        if key == "SECTION" {
            if section != Section::None {
                return Err(syntax(line, "nested SECTION without END"));
            }
            let name = toks
                .next()
                .ok_or_else(|| syntax(line, "SECTION without a name"))?;
            section = match name.to_ascii_uppercase().as_str() {
                "GRAPH" => Section::Graph,
                "TERMINALS" => Section::Terminals,
                _ => Section::Skipped,
            };
            continue;
        }
        if key == "END" {
            if section == Section::None {
                return Err(syntax(line, "END outside of a section"));
            }
            section = Section::None;
            continue;
        }

        match section {
            Section::Skipped => {}
            Section::None => {
                return Err(syntax(
                    line,
                    format!("unexpected '{head}' outside a section"),
                ));
            }
            Section::Graph => match key.as_str() {
                "NODES" => nodes = Some(parse_count(toks.next(), line, "node")?),
                "EDGES" => declared_edges = Some(parse_count(toks.next(), line, "edge")?),
                "E" => {
                    let u = parse_vertex(toks.next(), line)?;
                    let v = parse_vertex(toks.next(), line)?;
                    let w = toks
                        .next()
                        .ok_or_else(|| syntax(line, "edge without weight"))?;
                    raw_edges.push((u, v, parse_weight(w, line)?));
                }
                "A" | "ARCS" => {
                    return Err(syntax(line, "directed arcs are not supported"));
                }
                _ => return Err(syntax(line, format!("unknown Graph entry '{head}'"))),
            },
            Section::Terminals => match key.as_str() {
                "TERMINALS" => {
                    declared_terminals = Some(parse_count(toks.next(), line, "terminal")?)
                }
                "T" => terminals.push(parse_vertex(toks.next(), line)?),
                // Root markers of the rooted variants carry no information here.
                "ROOT" | "ROOTP" | "TP" => {}
                _ => return Err(syntax(line, format!("unknown Terminals entry '{head}'"))),
            },
        }
    }

    let last = text.lines().count();
    if section != Section::None {
        return Err(syntax(last, "unterminated SECTION"));
    }
    if !saw_eof {
        return Err(syntax(last, "missing EOF"));
    }
    let vertex_count = nodes.ok_or_else(|| syntax(last, "missing 'Nodes' declaration"))?;
    if let Some(m) = declared_edges {
        if m != raw_edges.len() {
            return Err(syntax(
                last,
                format!("declared {m} edges but found {}", raw_edges.len()),
            ));
        }
    }
    if let Some(t) = declared_terminals {
        if t != terminals.len() {
            return Err(syntax(
                last,
                format!("declared {t} terminals but found {}", terminals.len()),
            ));
        }
    }

    let scale = raw_edges
        .iter()
        .map(|(_, _, w)| w.frac_part.len())
        .max()
        .unwrap_or(0);
    let edges = raw_edges
        .iter()
        .map(|(u, v, w)| Ok(Edge::new(*u, *v, scale_weight(w, scale)?)))
        .collect::<Result<Vec<_>, ParseError>>()?;

    let mut g = Graph::new(vertex_count, edges, terminals)?;
    if vertex_count > 1 && g.vertices().any(|v| g.incident(v).is_empty()) {
        return Err(GraphError::Disconnected.into());
    }
    g.set_weight_scale(scale as u32);
    Ok(g)
}

pub fn read_stp(mut reader: impl Read) -> Result<Graph, ParseError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_stp(&text)
}

/// Serializes a graph back to STP. Weights are written as stored integers.
/// Formats a stored cost in input units, undoing decimal scaling.
pub fn format_cost(cost: Cost, scale: u32) -> String {
    if scale == 0 {
        return cost.to_string();
    }
    let digits = format!("{:0>width$}", cost, width = scale as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - scale as usize);
    format!("{int}.{frac}")
}

/// Writes `g` in STP format. Vertices with neither an edge nor a terminal
/// role are dropped and the rest renumbered in order, since the parser
/// rejects them.
pub fn write_stp(g: &Graph) -> String {
    let mut id = vec![0 as Vertex; g.vertex_count() + 1];
    let mut n: Vertex = 0;
    for v in g.vertices() {
        if g.degree(v) > 0 || g.is_terminal(v) {
            n += 1;
            id[v as usize] = n;
        }
    }
    let mut out = String::new();
    out.push_str("33D32945 STP File, STP Format Version 1.0\n\nSECTION Graph\n");
    let _ = writeln!(out, "Nodes {n}");
    let _ = writeln!(out, "Edges {}", g.edge_count());
    for e in g.edges() {
        let w = format_cost(e.cost, g.weight_scale());
        let _ = writeln!(out, "E {} {} {w}", id[e.u as usize], id[e.v as usize]);
    }
    out.push_str("END\n\nSECTION Terminals\n");
    let _ = writeln!(out, "Terminals {}", g.terminals().len());
    for &t in g.terminals() {
        let _ = writeln!(out, "T {}", id[t as usize]);
    }
    out.push_str("END\n\nEOF\n");
    out
}
