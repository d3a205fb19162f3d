//! Graphs and the Hamiltonian-circuit membership encoding.

use thiserror::Error;

use crate::grammar::Grammar;
use crate::grammar::is_identifier;
use crate::vector::TermVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<String>,
    /// Vertex index pairs; both directions are implied when undirected.
    pub edges: Vec<(usize, usize)>,
    pub directed: bool,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>, directed: bool) -> Self {
        Graph {
            vertices,
            edges,
            directed,
        }
    }

    /// Vertices `v0 … v{n−1}`.
    pub fn numbered(n: usize, edges: Vec<(usize, usize)>, directed: bool) -> Self {
        Graph::new((0..n).map(|i| format!("v{i}")).collect(), edges, directed)
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Directed arcs, with both orientations for undirected edges.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(u, v) in &self.edges {
            out.push((u, v));
            if !self.directed && u != v {
                out.push((v, u));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Reads an edge list: `#` comments, an optional `directed` line, an
/// optional `vertices: a b c` line (for isolated vertices or a fixed
/// order), then one `u v` edge per line. Vertices not declared are added
/// in order of appearance.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut g = Graph::new(Vec::new(), Vec::new(), false);
    let add = |g: &mut Graph, name: &str, line: usize| -> Result<usize, GraphError> {
        if !is_identifier(name) {
            return Err(GraphError::Syntax {
                line,
                message: format!("bad vertex name `{name}`"),
            });
        }
        Ok(g.vertex(name).unwrap_or_else(|| {
            g.vertices.push(name.to_string());
            g.vertices.len() - 1
        }))
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if s == "directed" {
            g.directed = true;
            continue;
        }
        if let Some(rest) = s.strip_prefix("vertices:") {
            for name in rest.split_whitespace() {
                add(&mut g, name, line)?;
            }
            continue;
        }
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(GraphError::Syntax {
                line,
                message: "expected `u v`".into(),
            });
        }
        let u = add(&mut g, parts[0], line)?;
        let v = add(&mut g, parts[1], line)?;
        g.edges.push((u, v));
    }
    Ok(g)
}

/// `Σ` = the vertices, one state `q_v` per vertex, a transition
/// `q_u →^v q_v` per arc and a final `ε` transition at the start vertex:
/// `(1,…,1) ∈ Ψ` iff some closed walk from the start enters every vertex
/// exactly once, i.e. there is a Hamiltonian circuit.
pub fn encode_hamiltonian_membership(gr: &Graph, start: usize) -> Result<(Grammar, TermVector), GraphError> {
    if gr.vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    if start >= gr.vertices.len() {
        return Err(GraphError::UnknownVertex(start.to_string()));
    }
    let state = |v: usize| format!("q_{}", gr.vertices[v]);
    let mut b = Grammar::builder(&gr.vertices).start(&state(start));
    for v in 0..gr.vertices.len() {
        b = b.nonterminal(&state(v));
    }
    for (u, v) in gr.arcs() {
        b = b.rule(&state(u), &gr.vertices[v], &state(v));
    }
    b = b.rule(&state(start), "", "");
    let g = b.build().expect("well-formed construction");
    Ok((g, TermVector::from_vec(vec![1; gr.vertices.len()])))
}

/// Whether a cyclic vertex order starting at `start` follows arcs all the
/// way round (for one vertex, a self-loop).
pub fn hamiltonian_circuit(gr: &Graph, start: usize) -> bool {
    let n = gr.vertices.len();
    if n == 0 || start >= n {
        return false;
    }
    let arcs = gr.arcs();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in arcs {
        adj[u][v] = true;
    }
    fn extend(adj: &[Vec<bool>], start: usize, at: usize, used: &mut [bool], left: usize) -> bool {
        if left == 0 {
            return adj[at][start];
        }
        for v in 0..adj.len() {
            if !used[v] && adj[at][v] {
                used[v] = true;
                if extend(adj, start, v, used, left - 1) {
                    return true;
                }
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[start] = true;
    extend(&adj, start, start, &mut used, n - 1)
}
