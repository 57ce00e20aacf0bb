//! Reading graphs from edge lists, GML and DIMACS files.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{GraphError, NodeId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    /// Whitespace separated `u v [w]` lines, 0-based ids, optional header.
    Edgelist,
    Gml,
    /// `p edge n m` followed by `e u v [w]` lines, 1-based ids.
    Dimacs,
}

impl GraphFormat {
    /// Guess from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "edgelist" | "edges" | "el" | "txt" => Some(GraphFormat::Edgelist),
            "gml" => Some(GraphFormat::Gml),
            "dimacs" | "dim" | "col" | "clq" => Some(GraphFormat::Dimacs),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GraphFormat::Edgelist => "edgelist",
            GraphFormat::Gml => "gml",
            GraphFormat::Dimacs => "dimacs",
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" => Ok(GraphFormat::Edgelist),
            "gml" => Ok(GraphFormat::Gml),
            "dimacs" => Ok(GraphFormat::Dimacs),
            other => Err(IngestError::FormatMismatch(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("content does not look like the requested format: {0}")]
    FormatMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse { line, message: message.into() }
}

pub fn ingest(path: &Path, format: GraphFormat) -> Result<WeightedGraph, IngestError> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, format)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<WeightedGraph, IngestError> {
    let detected = sniff(text);
    if detected.is_some_and(|d| d != format) {
        return Err(IngestError::FormatMismatch(format!("expected {format}, content looks like {}", detected.unwrap())));
    }
    match format {
        GraphFormat::Edgelist => parse_edgelist(text),
        GraphFormat::Gml => parse_gml(text),
        GraphFormat::Dimacs => parse_dimacs(text),
    }
}

/// Format suggested by the first meaningful line, if it is distinctive.
fn sniff(text: &str) -> Option<GraphFormat> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('c'))?;
    if first.starts_with("p ") {
        Some(GraphFormat::Dimacs)
    } else if first.starts_with("graph") || first.starts_with("Creator") || first.starts_with("Version") {
        Some(GraphFormat::Gml)
    } else {
        None
    }
}

fn parse_int<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T, IngestError> {
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

pub fn parse_edgelist(text: &str) -> Result<WeightedGraph, IngestError> {
    let mut edges = Vec::new();
    let mut n = 0;
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if !seen_data && toks[0].parse::<usize>().is_err() {
            // Header row.
            seen_data = true;
            continue;
        }
        seen_data = true;
        if !(2..=3).contains(&toks.len()) {
            return Err(parse_err(line, format!("expected `u v [w]`, got {} fields", toks.len())));
        }
        let u: NodeId = parse_int(toks[0], line, "node")?;
        let v: NodeId = parse_int(toks[1], line, "node")?;
        let w: i64 = toks.get(2).map_or(Ok(1), |t| parse_int(t, line, "weight"))?;
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Ok(WeightedGraph::new(n, &edges)?)
}

pub fn parse_dimacs(text: &str) -> Result<WeightedGraph, IngestError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "second problem line"));
                }
                let [_, _, n, m] = toks[..] else {
                    return Err(parse_err(line, "expected `p edge n m`"));
                };
                header = Some((parse_int(n, line, "node count")?, parse_int(m, line, "edge count")?, line));
            }
            Some("e") => {
                let Some((n, _, _)) = header else {
                    return Err(parse_err(line, "edge before problem line"));
                };
                if !(3..=4).contains(&toks.len()) {
                    return Err(parse_err(line, "expected `e u v [w]`"));
                }
                let u: usize = parse_int(toks[1], line, "node")?;
                let v: usize = parse_int(toks[2], line, "node")?;
                let w: i64 = toks.get(3).map_or(Ok(1), |t| parse_int(t, line, "weight"))?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(parse_err(line, format!("node out of range 1..={n}")));
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(other) => return Err(parse_err(line, format!("unknown line type {other:?}"))),
        }
    }
    let Some((n, m, line)) = header else {
        return Err(IngestError::FormatMismatch("no `p edge n m` line".into()));
    };
    if edges.len() != m {
        return Err(parse_err(line, format!("header promises {m} edges, found {}", edges.len())));
    }
    Ok(WeightedGraph::new(n, &edges)?)
}

#[derive(Debug, Clone, PartialEq)]
enum GmlValue {
    Int(i64),
    Real(f64),
    Str(String),
    /// Entries with the line of their key.
    List(Vec<(String, GmlValue, usize)>),
}

struct GmlLexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Open,
    Close,
}

impl GmlLexer<'_> {
    fn next_tok(&mut self) -> Result<Option<(Tok, usize)>, IngestError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some('\n') => {
                    self.line += 1;
                    self.chars.next();
                }
                Some(c) if c.is_whitespace() => {
                    self.chars.next();
                }
                Some('#') => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.chars.next();
                    }
                }
                _ => break,
            }
        }
        let line = self.line;
        let tok = match self.chars.next().unwrap() {
            '[' => Tok::Open,
            ']' => Tok::Close,
            '"' => {
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(parse_err(line, "unterminated string")),
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                self.line += 1;
                            }
                            s.push(c);
                        }
                    }
                }
                Tok::Str(s)
            }
            c => {
                let mut s = c.to_string();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.chars.next();
                }
                Tok::Word(s)
            }
        };
        Ok(Some((tok, line)))
    }
}

fn parse_gml_list(lex: &mut GmlLexer, nested: bool) -> Result<Vec<(String, GmlValue, usize)>, IngestError> {
    let mut out = Vec::new();
    loop {
        let Some((tok, line)) = lex.next_tok()? else {
            return if nested { Err(parse_err(lex.line, "missing `]`")) } else { Ok(out) };
        };
        let key_line = line;
        let key = match tok {
            Tok::Close if nested => return Ok(out),
            Tok::Word(w) if w.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') => w,
            other => return Err(parse_err(line, format!("expected a key, got {other:?}"))),
        };
        let Some((tok, line)) = lex.next_tok()? else {
            return Err(parse_err(line, format!("key {key:?} has no value")));
        };
        let value = match tok {
            Tok::Open => GmlValue::List(parse_gml_list(lex, true)?),
            Tok::Str(s) => GmlValue::Str(s),
            Tok::Word(w) => match (w.parse::<i64>(), w.parse::<f64>()) {
                (Ok(i), _) => GmlValue::Int(i),
                (_, Ok(f)) => GmlValue::Real(f),
                _ => return Err(parse_err(line, format!("bad value {w:?}"))),
            },
            Tok::Close => return Err(parse_err(line, "unexpected `]`")),
        };
        out.push((key, value, key_line));
    }
}

/// GML with a top-level `graph [ ... ]`; node ids are remapped to `0..n` in
/// order of appearance. Edge weights come from `weight` or `value` keys.
pub fn parse_gml(text: &str) -> Result<WeightedGraph, IngestError> {
    let mut lex = GmlLexer { chars: text.chars().peekable(), line: 1 };
    let top = parse_gml_list(&mut lex, false)?;
    let Some(GmlValue::List(graph)) = top.iter().find(|(k, _, _)| k == "graph").map(|(_, v, _)| v) else {
        return Err(IngestError::FormatMismatch("no `graph [ ... ]` block".into()));
    };
    let int = |list: &[(String, GmlValue, usize)], keys: &[&str]| {
        list.iter().find(|(k, _, _)| keys.contains(&k.as_str())).map(|(_, v, _)| match v {
            GmlValue::Int(i) => Ok(*i),
            GmlValue::Real(f) if f.fract() == 0.0 => Ok(*f as i64),
            other => Err(format!("{keys:?} must be an integer, got {other:?}")),
        })
    };
    let mut ids: HashMap<i64, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    for (key, value, line) in graph {
        let line = *line;
        let GmlValue::List(items) = value else { continue };
        match key.as_str() {
            "node" => {
                let id = int(items, &["id"])
                    .ok_or_else(|| parse_err(line, "node without id"))?
                    .map_err(|m| parse_err(line, m))?;
                let next = ids.len();
                if ids.insert(id, next).is_some() {
                    return Err(parse_err(line, format!("duplicate node id {id}")));
                }
            }
            "edge" => {
                let get = |k: &str| {
                    int(items, &[k]).ok_or_else(|| parse_err(line, format!("edge without {k}")))?.map_err(|m| parse_err(line, m))
                };
                let w = int(items, &["weight", "value"]).unwrap_or(Ok(1)).map_err(|m| parse_err(line, m))?;
                edges.push((get("source")?, get("target")?, w, line));
            }
            _ => {}
        }
    }
    let mut mapped = Vec::with_capacity(edges.len());
    for (s, t, w, line) in edges {
        let lookup = |x: i64| ids.get(&x).copied().ok_or_else(|| parse_err(line, format!("edge uses unknown node {x}")));
        mapped.push((lookup(s)?, lookup(t)?, w));
    }
    Ok(WeightedGraph::new(ids.len(), &mapped)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_k5() {
        let mut text = String::from("c complete graph\np edge 5 10\n");
        for u in 1..=5 {
            for v in u + 1..=5 {
                text += &format!("e {u} {v}\n");
            }
        }
        let g = parse_graph(&text, GraphFormat::Dimacs).unwrap();
        assert_eq!(g, WeightedGraph::complete(5));
    }

    #[test]
    fn edgelist_weights_and_header() {
        let g = parse_graph("0 1 3\n", GraphFormat::Edgelist).unwrap();
        assert_eq!((g.n(), g.m(), g.weight(0)), (2, 1, 3));
        let g = parse_graph("source target weight\n# comment\n0 1\n1 2 4\n", GraphFormat::Edgelist).unwrap();
        assert_eq!((g.n(), g.m(), g.total_weight()), (3, 2, 5));
        assert!(matches!(
            parse_graph("0 1\n1 x\n", GraphFormat::Edgelist),
            Err(IngestError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn gml_remaps_ids() {
        let text = r#"Creator "test"
graph [
  directed 0
  node [ id 10 label "a" ]
  node [ id 20 ]
  node [ id 5 ]
  edge [ source 10 target 20 weight 2 ]
  edge [ source 20 target 5 ]
]"#;
        let g = parse_graph(text, GraphFormat::Gml).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_between(0, 1).map(|e| g.weight(e)), Some(2));
        assert!(g.edge_between(1, 2).is_some());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_graph("graph [ node [ id 1 ]", GraphFormat::Gml), Err(IngestError::Parse { .. })));
        assert!(matches!(parse_graph("p edge 3 1\n", GraphFormat::Edgelist), Err(IngestError::FormatMismatch(_))));
        assert!(matches!(parse_graph("p edge 3 2\ne 1 2\n", GraphFormat::Dimacs), Err(IngestError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("p edge 3 1\ne 1 4\n", GraphFormat::Dimacs), Err(IngestError::Parse { line: 2, .. })));
    }
}
