//! Undirected simple graphs, the DIMACS-style text format, and classical
//! brute-force clique routines used as the reference for every quantum result.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest vertex count the exhaustive routines accept.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header, expected `p edge <n> <m>`")]
    BadHeader { line: usize },
    #[error("line {line}: missing `p edge` header before edge lines")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed edge line, expected `e <u> <v>`")]
    BadEdgeLine { line: usize },
    #[error("line {line}: unrecognised line `{text}`")]
    UnknownLine { line: usize, text: String },
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("self-loop on vertex {v}")]
    SelfLoop { v: usize },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("vertex {v} is outside 0..{n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("exhaustive search is capped at {max} vertices, graph has {n}")]
    TooLarge { n: usize, max: usize },
}

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored normalised as `(u, v)` with `u < v`, so iteration is in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { v: u });
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge { u: e.0, v: e.1 });
            }
        }
        Ok(Graph { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: BTreeSet::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order, each with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Parses the DIMACS-like text format: a `p edge <n> <m>` header, then
    /// `m` lines `e <u> <v>` with 1-indexed endpoints. `c` lines are comments.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            match tokens.next() {
                Some("c") => continue,
                Some("p") => {
                    if header.is_some() {
                        return Err(GraphError::BadHeader { line });
                    }
                    let fields: Vec<&str> = tokens.collect();
                    if fields.len() != 3 || (fields[0] != "edge" && fields[0] != "col") {
                        return Err(GraphError::BadHeader { line });
                    }
                    let n = fields[1].parse().map_err(|_| GraphError::BadHeader { line })?;
                    let m = fields[2].parse().map_err(|_| GraphError::BadHeader { line })?;
                    header = Some((n, m));
                }
                Some("e") => {
                    let Some((n, _)) = header else {
                        return Err(GraphError::MissingHeader { line });
                    };
                    let fields: Vec<&str> = tokens.collect();
                    if fields.len() != 2 {
                        return Err(GraphError::BadEdgeLine { line });
                    }
                    let u: usize = fields[0].parse().map_err(|_| GraphError::BadEdgeLine { line })?;
                    let v: usize = fields[1].parse().map_err(|_| GraphError::BadEdgeLine { line })?;
                    if u == 0 || v == 0 || u > n || v > n {
                        return Err(GraphError::EndpointOutOfRange {
                            u: u.wrapping_sub(1),
                            v: v.wrapping_sub(1),
                            n,
                        });
                    }
                    edges.push((u - 1, v - 1));
                }
                Some(_) => {
                    return Err(GraphError::UnknownLine { line, text: trimmed.to_string() });
                }
                None => unreachable!(),
            }
        }
        let (n, m) = header.ok_or(GraphError::MissingHeader { line: 0 })?;
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch { declared: m, found: edges.len() });
        }
        Graph::new(n, edges)
    }

    /// Renders the graph back to the DIMACS-like format.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.edges.len());
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Number of edges with both endpoints in `s`.
    pub fn induced_edge_count(&self, s: &VertexSet) -> usize {
        let m = s.members();
        let mut count = 0;
        for (i, &u) in m.iter().enumerate() {
            for &v in &m[i + 1..] {
                if self.has_edge(u, v) {
                    count += 1;
                }
            }
        }
        count
    }

    /// True iff every pair of members of `s` is adjacent.
    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let m = s.members();
        m.iter()
            .enumerate()
            .all(|(i, &u)| m[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    fn check_brute_force(&self) -> Result<(), GraphError> {
        if self.n > BRUTE_FORCE_MAX_VERTICES {
            return Err(GraphError::TooLarge { n: self.n, max: BRUTE_FORCE_MAX_VERTICES });
        }
        Ok(())
    }

    /// All `k`-cliques in lexicographic order of their sorted member lists.
    pub fn enumerate_k_cliques(&self, k: usize) -> Result<Vec<VertexSet>, GraphError> {
        self.check_brute_force()?;
        if k > self.n {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let s = VertexSet::from_sorted_unchecked(combo.clone());
            if self.is_clique(&s) {
                out.push(s);
            }
            // Advance to the next combination in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if combo[i] < self.n - k + i {
                    break;
                }
            }
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    /// A maximum clique; among ties the lexicographically smallest.
    pub fn max_clique_bruteforce(&self) -> Result<VertexSet, GraphError> {
        self.check_brute_force()?;
        for k in (1..=self.n).rev() {
            if k * (k - 1) / 2 > self.edge_count() {
                continue;
            }
            if let Some(first) = self.enumerate_k_cliques(k)?.into_iter().next() {
                return Ok(first);
            }
        }
        Ok(VertexSet::empty())
    }

    /// Size of a maximum clique.
    pub fn clique_number(&self) -> Result<usize, GraphError> {
        Ok(self.max_clique_bruteforce()?.len())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({u},{v})")?;
        }
        write!(f, "])")
    }
}

/// A set of vertices, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        VertexSet(set.into_iter().collect())
    }

    fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        VertexSet(members)
    }

    /// Checks every member is a vertex of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        match self.0.iter().find(|&&v| v >= g.n()) {
            Some(&v) => Err(GraphError::VertexOutOfRange { v, n: g.n() }),
            None => Ok(()),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Length-`n` 0/1 string, leftmost character is vertex 0.
    pub fn to_ket(&self, n: usize) -> String {
        (0..n).map(|v| if self.contains(v) { '1' } else { '0' }).collect()
    }

    /// Inverse of [`VertexSet::to_ket`]; returns `None` on any character other
    /// than `0` or `1`.
    pub fn from_ket(ket: &str) -> Option<Self> {
        let mut members = Vec::new();
        for (v, ch) in ket.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => members.push(v),
                _ => return None,
            }
        }
        Some(VertexSet(members))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// `n choose k` in u64; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Erdős–Rényi `G(n, p)` with a fixed seed.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    Graph { n, edges }
}

/// Small instances used throughout the tests, examples and reports.
pub mod named {
    use super::Graph;

    /// Six vertices, nine edges; maximum clique {1,2,3,4}, triangles
    /// {0,1,2}, {1,2,3}, {1,2,4}, {1,3,4}, {2,3,4}.
    pub fn six_vertex() -> Graph {
        Graph::new(6, [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5)])
            .expect("static graph")
    }

    /// Triangle {0,1,2} with a pendant vertex 3 hanging off vertex 2.
    pub fn one_triangle() -> Graph {
        Graph::new(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).expect("static graph")
    }

    /// 4-cycle 0-1-2-3 plus the chord (0,2).
    pub fn square_one_diagonal() -> Graph {
        Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).expect("static graph")
    }

    /// Star with centre 0 and leaves 1..n.
    pub fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v))).expect("static graph")
    }

    /// The four 4-vertex instances of the comparison tables, by name.
    pub fn comparison_set() -> Vec<(&'static str, Graph)> {
        vec![
            ("one_triangle", one_triangle()),
            ("square_one_diagonal", square_one_diagonal()),
            ("complete", Graph::complete(4)),
            ("star", star(4)),
        ]
    }
}
