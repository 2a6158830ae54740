//! Hypergraph representation, validation, derived degree statistics, and the
//! reduction from weighted set cover.
//!
//! Vertex ids are dense `0..n`. Edges are stored as sorted id lists so that
//! traces and file round-trips are canonical. Duplicate edges are allowed:
//! the algorithm treats each hyperedge as an independent network client.

use serde::Serialize;
use std::fmt;

/// A vertex-weighted hypergraph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    weights: Vec<u64>,
    edges: Vec<Vec<u32>>,
}

/// Derived degree statistics.
///
/// `rank` is the maximum edge size, `max_degree` the maximum number of edges
/// containing a single vertex, and `local_max_degree[e]` the maximum degree
/// over the members of edge `e`. Both `rank` and `max_degree` are reported as
/// at least 1 so the degenerate edge-free hypergraph still has usable
/// parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub rank: usize,
    pub max_degree: usize,
    pub vertex_degree: Vec<usize>,
    pub local_max_degree: Vec<usize>,
}

/// A weighted set system: `subsets[i] = (weight, sorted element ids)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    pub num_elements: usize,
    pub subsets: Vec<(u64, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    EmptyEdge { edge: usize },
    DuplicateVertex { edge: usize, vertex: u32 },
    VertexOutOfRange { edge: usize, vertex: u32 },
    WeightBelowOne { vertex: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyEdge { edge } => write!(f, "edge {edge} is empty"),
            Violation::DuplicateVertex { edge, vertex } => {
                write!(f, "edge {edge} lists vertex {vertex} more than once")
            }
            Violation::VertexOutOfRange { edge, vertex } => {
                write!(f, "edge {edge} references vertex {vertex} out of range")
            }
            Violation::WeightBelowOne { vertex } => {
                write!(f, "vertex {vertex} has weight < 1")
            }
        }
    }
}

/// Outcome of [`Hypergraph::validate`]; empty means the instance is usable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Hypergraph {
    /// Builds a hypergraph without validating it; edge id lists are sorted
    /// into canonical order (duplicates within an edge are kept so that
    /// `validate` can report them).
    pub fn new(weights: Vec<u64>, mut edges: Vec<Vec<u32>>) -> Self {
        for e in &mut edges {
            e.sort_unstable();
        }
        Hypergraph { weights, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, v: u32) -> u64 {
        self.weights[v as usize]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn edge(&self, e: u32) -> &[u32] {
        &self.edges[e as usize]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(1)
    }

    /// Total weight of a vertex set.
    pub fn weight_of(&self, vertices: &[u32]) -> u64 {
        vertices.iter().map(|&v| self.weights[v as usize]).sum()
    }

    /// Checks the structural invariants: nonempty edges, no duplicate ids,
    /// ids in range, weights at least 1.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (v, &w) in self.weights.iter().enumerate() {
            if w < 1 {
                violations.push(Violation::WeightBelowOne { vertex: v as u32 });
            }
        }
        let n = self.vertex_count() as u32;
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_empty() {
                violations.push(Violation::EmptyEdge { edge: i });
                continue;
            }
            for w in e.windows(2) {
                if w[0] == w[1] {
                    violations.push(Violation::DuplicateVertex { edge: i, vertex: w[0] });
                }
            }
            for &v in e {
                if v >= n {
                    violations.push(Violation::VertexOutOfRange { edge: i, vertex: v });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Exact degree statistics by direct recount.
    pub fn degree_stats(&self) -> DegreeStats {
        let mut vertex_degree = vec![0usize; self.vertex_count()];
        for e in &self.edges {
            for &v in e {
                vertex_degree[v as usize] += 1;
            }
        }
        let local_max_degree = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| vertex_degree[v as usize]).max().unwrap_or(0))
            .collect();
        DegreeStats {
            rank: self.edges.iter().map(Vec::len).max().unwrap_or(0).max(1),
            max_degree: vertex_degree.iter().copied().max().unwrap_or(0).max(1),
            vertex_degree,
            local_max_degree,
        }
    }

    /// Incidence lists: for each vertex, the ids of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v as usize].push(i as u32);
            }
        }
        inc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetCoverError {
    #[error("element {0} is contained in no subset; the reduction would create an uncoverable edge")]
    UncoveredElement(u32),
    #[error("subset {0} has weight < 1")]
    WeightBelowOne(usize),
    #[error("subset {subset} references element {element} out of range")]
    ElementOutOfRange { subset: usize, element: u32 },
}

impl SetSystem {
    pub fn new(num_elements: usize, subsets: Vec<(u64, Vec<u32>)>) -> Self {
        let mut subsets = subsets;
        for (_, s) in &mut subsets {
            s.sort_unstable();
            s.dedup();
        }
        SetSystem { num_elements, subsets }
    }
}

/// Reduction from weighted set cover: one vertex per subset (same weight),
/// one hyperedge per element containing the vertices of the subsets that
/// hold it. Element frequency becomes edge size, so the hypergraph rank is
/// the maximum element frequency.
pub fn from_set_cover(s: &SetSystem) -> Result<Hypergraph, SetCoverError> {
    let mut edges = vec![Vec::new(); s.num_elements];
    for (i, (w, members)) in s.subsets.iter().enumerate() {
        if *w < 1 {
            return Err(SetCoverError::WeightBelowOne(i));
        }
        for &x in members {
            if x as usize >= s.num_elements {
                return Err(SetCoverError::ElementOutOfRange { subset: i, element: x });
            }
            edges[x as usize].push(i as u32);
        }
    }
    if let Some(x) = edges.iter().position(Vec::is_empty) {
        return Err(SetCoverError::UncoveredElement(x as u32));
    }
    let weights = s.subsets.iter().map(|(w, _)| *w).collect();
    Ok(Hypergraph::new(weights, edges))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    CountMismatch { line: usize, expected: usize, found: usize },
    #[error("missing line {line}: {message}")]
    Truncated { line: usize, message: String },
}

fn bad(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, message: message.into() }
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { iter: text.lines().enumerate(), line_no: 0 }
    }

    /// Next significant line (skips blanks and `#` comments).
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        for (idx, raw) in self.iter.by_ref() {
            self.line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((idx + 1, line));
        }
        Err(ParseError::Truncated { line: self.line_no + 1, message: what.to_string() })
    }
}

fn parse_fields<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<Vec<T>, ParseError> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| bad(line_no, format!("invalid number `{t}`"))))
        .collect()
}

/// Parses the hypergraph text format:
///
/// ```text
/// n m
/// w_0 ... w_{n-1}
/// k v_1 ... v_k     (m edge lines)
/// ```
///
/// Blank lines and lines starting with `#` are ignored.
pub fn read_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next("header `n m`")?;
    let head: Vec<usize> = parse_fields(ln, header)?;
    if head.len() != 2 {
        return Err(ParseError::CountMismatch { line: ln, expected: 2, found: head.len() });
    }
    let (n, m) = (head[0], head[1]);
    let weights: Vec<u64> = if n == 0 {
        Vec::new()
    } else {
        let (ln, wline) = lines.next("weights line")?;
        let w: Vec<u64> = parse_fields(ln, wline)?;
        if w.len() != n {
            return Err(ParseError::CountMismatch { line: ln, expected: n, found: w.len() });
        }
        w
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, eline) = lines.next("edge line")?;
        let fields: Vec<u64> = parse_fields(ln, eline)?;
        if fields.is_empty() {
            return Err(bad(ln, "empty edge line"));
        }
        let k = fields[0] as usize;
        if fields.len() != k + 1 {
            return Err(ParseError::CountMismatch { line: ln, expected: k + 1, found: fields.len() });
        }
        let members = fields[1..]
            .iter()
            .map(|&v| u32::try_from(v).map_err(|_| bad(ln, format!("vertex id {v} too large"))))
            .collect::<Result<Vec<u32>, _>>()?;
        edges.push(members);
    }
    Ok(Hypergraph::new(weights, edges))
}

/// Canonical text rendering; `read_hypergraph` then `write_hypergraph` is a
/// normalizing round trip.
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", h.vertex_count(), h.edge_count()));
    if h.vertex_count() > 0 {
        let ws: Vec<String> = h.weights().iter().map(u64::to_string).collect();
        out.push_str(&ws.join(" "));
        out.push('\n');
    }
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(u32::to_string).collect();
        out.push_str(&format!("{} {}\n", e.len(), ids.join(" ")));
    }
    out
}

/// Parses the set-system text format:
///
/// ```text
/// |X| m
/// w k x_1 ... x_k   (m subset lines)
/// ```
pub fn read_set_system(text: &str) -> Result<SetSystem, ParseError> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next("header `|X| m`")?;
    let head: Vec<usize> = parse_fields(ln, header)?;
    if head.len() != 2 {
        return Err(ParseError::CountMismatch { line: ln, expected: 2, found: head.len() });
    }
    let (num_elements, m) = (head[0], head[1]);
    let mut subsets = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, sline) = lines.next("subset line")?;
        let fields: Vec<u64> = parse_fields(ln, sline)?;
        if fields.len() < 2 {
            return Err(bad(ln, "subset line needs at least `w k`"));
        }
        let w = fields[0];
        let k = fields[1] as usize;
        if fields.len() != k + 2 {
            return Err(ParseError::CountMismatch { line: ln, expected: k + 2, found: fields.len() });
        }
        let members = fields[2..]
            .iter()
            .map(|&v| u32::try_from(v).map_err(|_| bad(ln, format!("element id {v} too large"))))
            .collect::<Result<Vec<u32>, _>>()?;
        subsets.push((w, members));
    }
    Ok(SetSystem::new(num_elements, subsets))
}
