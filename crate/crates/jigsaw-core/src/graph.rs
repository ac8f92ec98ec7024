//! Graph and partition primitives shared by the solvers and experiments.
//!
//! Vertices are integers `1..=n`. Edges are unordered pairs stored
//! canonically as `(min, max)`, sorted lexicographically and free of
//! duplicates and self-loops. Graphs are immutable after construction, so
//! they can be shared read-only across trial workers.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count must be at least 1")]
    ZeroVertices,
    #[error("endpoint {v} out of range 1..={n}")]
    VertexOutOfRange { v: Vertex, n: u32 },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("red and blue vertex counts differ ({red} vs {blue})")]
    MismatchedColors { red: u32, blue: u32 },
    #[error("induced vertex set is empty")]
    EmptyInducedSet,
    #[error("duplicate vertex {0} in induced set")]
    DuplicateInducedVertex(Vertex),
}

/// A simple undirected graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph from arbitrary edge pairs, canonicalizing endpoint
    /// order and rejecting loops, duplicates, and out-of-range endpoints.
    pub fn new<I>(n: u32, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n == 0 {
            return Err(GraphError::ZeroVertices);
        }
        let mut canon: Vec<(Vertex, Vertex)> = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange { v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        for w in canon.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(Self::from_sorted_canonical(n, canon))
    }

    /// Fast path for generators that already emit sorted canonical pairs.
    pub(crate) fn from_sorted_canonical(n: u32, edges: Vec<(Vertex, Vertex)>) -> Self {
        debug_assert!(n >= 1);
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u >= 1 && u < v && v <= n));
        let mut adj = vec![Vec::new(); n as usize + 1];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: u32) -> Result<Self, GraphError> {
        Self::new(n, std::iter::empty())
    }

    pub fn complete(n: u32) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::ZeroVertices);
        }
        let mut edges = Vec::with_capacity(n as usize * (n as usize - 1) / 2);
        for u in 1..=n {
            for v in u + 1..=n {
                edges.push((u, v));
            }
        }
        Ok(Self::from_sorted_canonical(n, edges))
    }

    /// Path 1-2-...-n.
    pub fn path(n: u32) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::ZeroVertices);
        }
        Ok(Self::from_sorted_canonical(
            n,
            (1..n).map(|u| (u, u + 1)).collect(),
        ))
    }

    /// Cycle 1-2-...-n-1. Needs n ≥ 3 to stay simple.
    pub fn cycle(n: u32) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::VertexOutOfRange { v: n, n: 3 });
        }
        let mut edges: Vec<(Vertex, Vertex)> = (1..n).map(|u| (u, u + 1)).collect();
        edges.push((1, n));
        edges.sort_unstable();
        Ok(Self::from_sorted_canonical(n, edges))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(min,max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        if u == v || u == 0 || v == 0 || u > self.n || v > self.n {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Set union of edge sets; both graphs must share the vertex count.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        if self.n != other.n {
            return Err(GraphError::MismatchedColors {
                red: self.n,
                blue: other.n,
            });
        }
        let mut merged = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(self.edges[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.edges[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(self.edges[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.edges[i..]);
        merged.extend_from_slice(&other.edges[j..]);
        Ok(Graph::from_sorted_canonical(self.n, merged))
    }
}

/// A double graph: the same vertex set carrying a red edge set and a blue
/// edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleGraph {
    red: Graph,
    blue: Graph,
}

impl DoubleGraph {
    pub fn new(red: Graph, blue: Graph) -> Result<Self, GraphError> {
        if red.n != blue.n {
            return Err(GraphError::MismatchedColors {
                red: red.n,
                blue: blue.n,
            });
        }
        Ok(DoubleGraph { red, blue })
    }

    pub fn n(&self) -> u32 {
        self.red.n
    }

    pub fn red(&self) -> &Graph {
        &self.red
    }

    pub fn blue(&self) -> &Graph {
        &self.blue
    }

    pub fn color(&self, c: Color) -> &Graph {
        match c {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    /// Color-wise edge union.
    pub fn union(&self, other: &DoubleGraph) -> Result<DoubleGraph, GraphError> {
        DoubleGraph::new(self.red.union(&other.red)?, self.blue.union(&other.blue)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

/// Disjoint-set partition of `1..=n` with union by rank and path halving.
#[derive(Debug, Clone)]
pub struct Partition {
    parent: Vec<u32>,
    rank: Vec<u8>,
    count: usize,
}

impl Partition {
    pub fn singletons(n: u32) -> Self {
        assert!(n >= 1, "partition needs at least one vertex");
        Partition {
            parent: (0..=n).collect(),
            rank: vec![0; n as usize + 1],
            count: n as usize,
        }
    }

    pub fn n(&self) -> u32 {
        self.parent.len() as u32 - 1
    }

    pub fn cluster_count(&self) -> usize {
        self.count
    }

    pub fn find(&mut self, v: Vertex) -> Vertex {
        debug_assert!(v >= 1 && (v as usize) < self.parent.len());
        let mut x = v;
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Merges the clusters of `u` and `v`; false if already together.
    pub fn union(&mut self, u: Vertex, v: Vertex) -> bool {
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        let (hi, lo) = if self.rank[ru as usize] >= self.rank[rv as usize] {
            (ru, rv)
        } else {
            (rv, ru)
        };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        self.count -= 1;
        true
    }

    pub fn same(&mut self, u: Vertex, v: Vertex) -> bool {
        self.find(u) == self.find(v)
    }

    /// Blocks with sorted members, ordered by smallest element.
    pub fn blocks(&mut self) -> Vec<Vec<Vertex>> {
        let n = self.n();
        let mut by_root: Vec<Vec<Vertex>> = vec![Vec::new(); n as usize + 1];
        for v in 1..=n {
            let r = self.find(v);
            by_root[r as usize].push(v);
        }
        // ascending v above means each block is already sorted and blocks
        // indexed by root appear in order of... root id, not smallest member;
        // sort explicitly by first element.
        let mut blocks: Vec<Vec<Vertex>> = by_root.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }
}

/// The auxiliary graph on current cluster ids whose components get merged
/// in one round of the dynamics.
#[derive(Debug, Clone)]
pub struct ClusterGraph {
    nodes: Vec<u32>,
    edges: BTreeSet<(u32, u32)>,
}

impl ClusterGraph {
    pub fn new(mut nodes: Vec<u32>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        ClusterGraph {
            nodes,
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, a: u32, b: u32) {
        assert_ne!(a, b, "cluster-graph edge must join distinct clusters");
        debug_assert!(self.nodes.binary_search(&a).is_ok());
        debug_assert!(self.nodes.binary_search(&b).is_ok());
        self.edges.insert((a.min(b), a.max(b)));
    }

    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    /// Connected components as sorted id lists, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut comp = Vec::new();
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut adj: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for &start in &self.nodes {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut members = Vec::new();
            seen.insert(start);
            while let Some(x) = stack.pop() {
                members.push(x);
                if let Some(ns) = adj.get(&x) {
                    for &y in ns {
                        if seen.insert(y) {
                            stack.push(y);
                        }
                    }
                }
            }
            members.sort_unstable();
            comp.push(members);
        }
        comp.sort_by_key(|c| c[0]);
        comp
    }
}

/// Connected components of a plain graph.
pub fn connected_components(g: &Graph) -> Partition {
    let mut parts = Partition::singletons(g.n());
    for &(u, v) in g.edges() {
        parts.union(u, v);
    }
    parts
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g).cluster_count() == 1
}

/// An induced double graph along with the relabeling back to the host graph.
///
/// `labels[i]` is the original vertex carrying new label `i+1`; the map is
/// strictly increasing, so canonical edge order survives relabeling.
#[derive(Debug, Clone)]
pub struct Induced {
    pub dg: DoubleGraph,
    pub labels: Vec<Vertex>,
}

impl Induced {
    pub fn original_label(&self, new: Vertex) -> Vertex {
        self.labels[new as usize - 1]
    }
}

/// Restricts both colors to `u_set`, relabeling vertices 1..|U| by
/// increasing original label.
pub fn induce(dg: &DoubleGraph, u_set: &[Vertex]) -> Result<Induced, GraphError> {
    if u_set.is_empty() {
        return Err(GraphError::EmptyInducedSet);
    }
    let n = dg.n();
    let mut labels = u_set.to_vec();
    labels.sort_unstable();
    for w in labels.windows(2) {
        if w[0] == w[1] {
            return Err(GraphError::DuplicateInducedVertex(w[0]));
        }
    }
    for &v in &labels {
        if v == 0 || v > n {
            return Err(GraphError::VertexOutOfRange { v, n });
        }
    }
    let mut new_label = vec![0u32; n as usize + 1];
    for (i, &v) in labels.iter().enumerate() {
        new_label[v as usize] = i as u32 + 1;
    }
    let restrict = |g: &Graph| -> Graph {
        let edges: Vec<(Vertex, Vertex)> = g
            .edges()
            .iter()
            .filter_map(|&(u, v)| {
                let (nu, nv) = (new_label[u as usize], new_label[v as usize]);
                (nu != 0 && nv != 0).then_some((nu, nv))
            })
            .collect();
        Graph::from_sorted_canonical(labels.len() as u32, edges)
    };
    let dg = DoubleGraph::new(restrict(dg.red()), restrict(dg.blue())).expect("same n");
    Ok(Induced { dg, labels })
}

/// Serializes a double graph in the edge-list text format:
/// header `n m_red m_blue`, then `R u v` lines, then `B u v` lines,
/// edges in canonical sorted order. Output is byte-stable.
pub fn write_edge_list(dg: &DoubleGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {}",
        dg.n(),
        dg.red().edge_count(),
        dg.blue().edge_count()
    );
    for &(u, v) in dg.red().edges() {
        let _ = writeln!(out, "R {} {}", u, v);
    }
    for &(u, v) in dg.blue().edges() {
        let _ = writeln!(out, "B {} {}", u, v);
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected header \"n m_red m_blue\"")]
    BadHeader,
    #[error("vertex count must be at least 1")]
    ZeroVertices,
    #[error("expected edge line \"{expected} u v\"")]
    BadEdgeLine { expected: char },
    #[error("endpoint {v} out of range 1..={n}")]
    OutOfRange { v: u64, n: u32 },
    #[error("endpoints must satisfy u < v (got {u} {v})")]
    NotIncreasing { u: u64, v: u64 },
    #[error("duplicate {color} edge ({u}, {v})")]
    Duplicate { color: char, u: Vertex, v: Vertex },
    #[error("missing edge lines (expected {expected} more)")]
    MissingLines { expected: usize },
    #[error("unexpected trailing content")]
    TrailingContent,
}

/// Parses the edge-list text format. Blank lines are ignored; all stated
/// format violations are rejected with the offending line number.
pub fn parse_edge_list(text: &str) -> Result<DoubleGraph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_no, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::BadHeader,
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = ParseError {
        line: header_no,
        kind: ParseErrorKind::BadHeader,
    };
    if fields.len() != 3 {
        return Err(bad_header);
    }
    let n: u32 = fields[0].parse().map_err(|_| ParseError {
        line: header_no,
        kind: ParseErrorKind::BadHeader,
    })?;
    let m_red: usize = fields[1].parse().map_err(|_| bad_header_at(header_no))?;
    let m_blue: usize = fields[2].parse().map_err(|_| bad_header_at(header_no))?;
    if n == 0 {
        return Err(ParseError {
            line: header_no,
            kind: ParseErrorKind::ZeroVertices,
        });
    }

    let mut seen: std::collections::HashSet<(char, Vertex, Vertex)> =
        std::collections::HashSet::with_capacity(m_red + m_blue);
    let mut red_edges = Vec::with_capacity(m_red);
    let mut blue_edges = Vec::with_capacity(m_blue);
    let mut last_line = header_no;

    for (color, count, sink) in [('R', m_red, &mut red_edges), ('B', m_blue, &mut blue_edges)] {
        for _ in 0..count {
            let (line_no, line) = lines.next().ok_or(ParseError {
                line: last_line,
                kind: ParseErrorKind::MissingLines { expected: count },
            })?;
            last_line = line_no;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = ParseError {
                line: line_no,
                kind: ParseErrorKind::BadEdgeLine { expected: color },
            };
            if toks.len() != 3 || toks[0] != color.to_string() {
                return Err(bad);
            }
            let u: u64 = toks[1].parse().map_err(|_| bad_edge_at(line_no, color))?;
            let v: u64 = toks[2].parse().map_err(|_| bad_edge_at(line_no, color))?;
            for w in [u, v] {
                if w == 0 || w > n as u64 {
                    return Err(ParseError {
                        line: line_no,
                        kind: ParseErrorKind::OutOfRange { v: w, n },
                    });
                }
            }
            if u >= v {
                return Err(ParseError {
                    line: line_no,
                    kind: ParseErrorKind::NotIncreasing { u, v },
                });
            }
            let (u, v) = (u as Vertex, v as Vertex);
            if !seen.insert((color, u, v)) {
                return Err(ParseError {
                    line: line_no,
                    kind: ParseErrorKind::Duplicate { color, u, v },
                });
            }
            sink.push((u, v));
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(ParseError {
            line: line_no,
            kind: ParseErrorKind::TrailingContent,
        });
    }
    red_edges.sort_unstable();
    blue_edges.sort_unstable();
    Ok(DoubleGraph::new(
        Graph::from_sorted_canonical(n, red_edges),
        Graph::from_sorted_canonical(n, blue_edges),
    )
    .expect("same n"))
}

fn bad_header_at(line: usize) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::BadHeader,
    }
}

fn bad_edge_at(line: usize, expected: char) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::BadEdgeLine { expected },
    }
}
