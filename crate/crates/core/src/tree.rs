//! Derivation trees and their correspondence with subruns.

use thiserror::Error;

use crate::grammar::Grammar;
use crate::runs::{order_subrun, RunError, SubrunCert, TransitionMultiset};
use crate::vector::{NtMultiset, TransId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("vertex {0} has an invalid parent")]
    BadParent(usize),
    #[error("vertex {vertex}: F(v) would be negative for {nonterminal}")]
    NegativeFree { vertex: usize, nonterminal: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub transition: TransId,
    pub parent: Option<usize>,
}

/// A rooted tree labeled by transitions. Vertex 0 is the root and every
/// other vertex has a parent with a smaller index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTree {
    vertices: Vec<Vertex>,
}

impl DerivationTree {
    /// Builds a tree from vertices and checks the shape and `F(v) ≥ 0`.
    pub fn new(g: &Grammar, vertices: Vec<Vertex>) -> Result<Self, TreeError> {
        let t = DerivationTree { vertices };
        t.validate(g)?;
        Ok(t)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(move |(_, w)| w.parent == Some(v))
            .map(|(i, _)| i)
    }

    /// `F(v) = target(v) − Σ_children [source(w)]`, as signed counts.
    fn free_signed(&self, g: &Grammar, v: usize) -> Vec<i64> {
        let mut f = g
            .transition(self.vertices[v].transition)
            .targets
            .to_dense(g.num_nonterminals());
        for w in self.children(v) {
            f[g.transition(self.vertices[w].transition).source.0] -= 1;
        }
        f
    }

    pub fn free(&self, g: &Grammar, v: usize) -> NtMultiset {
        NtMultiset::from_dense(&self.free_signed(g, v))
    }

    /// `F(T) = Σ_v F(v)`
    pub fn free_total(&self, g: &Grammar) -> NtMultiset {
        let mut total = NtMultiset::new();
        for v in 0..self.vertices.len() {
            for (q, k) in self.free(g, v).iter() {
                total.insert(q, k);
            }
        }
        total
    }

    pub fn validate(&self, g: &Grammar) -> Result<(), TreeError> {
        if self.vertices.is_empty() {
            return Err(TreeError::Empty);
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let ok = match v.parent {
                None => i == 0,
                Some(p) => p < i,
            };
            if !ok || v.transition.0 >= g.num_transitions() {
                return Err(TreeError::BadParent(i));
            }
        }
        for v in 0..self.vertices.len() {
            if let Some(q) = self.free_signed(g, v).iter().position(|&k| k < 0) {
                return Err(TreeError::NegativeFree {
                    vertex: v,
                    nonterminal: g.nonterminals()[q].clone(),
                });
            }
        }
        Ok(())
    }

    /// Root has depth 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(p) = v.parent {
                d[i] = d[p] + 1;
            }
        }
        d
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }
}

/// `U(T)`: how many vertices carry each transition.
pub fn tree_to_multiset(g: &Grammar, t: &DerivationTree) -> TransitionMultiset {
    let mut m = TransitionMultiset::zero(g.num_transitions());
    for v in t.vertices() {
        m.add_one(v.transition);
    }
    m
}

/// Builds a tree with `U(T) = R` and `F(T) = to` for a subrun from a single
/// nonterminal: transitions are taken in firing order and each is hung
/// below the lowest-index vertex that still has its source free.
pub fn subrun_to_tree(g: &Grammar, cert: &SubrunCert) -> Result<DerivationTree, RunError> {
    if cert.from.size() != 1 {
        return Err(RunError::NotSingleton);
    }
    let order = order_subrun(g, cert)?;
    if order.is_empty() {
        return Err(RunError::Empty);
    }
    let n = g.num_nonterminals();
    let mut vertices: Vec<Vertex> = Vec::with_capacity(order.len());
    let mut free: Vec<Vec<i64>> = Vec::with_capacity(order.len());
    for t in order {
        let tr = g.transition(t);
        let parent = if vertices.is_empty() {
            None
        } else {
            let p = free
                .iter()
                .position(|f| f[tr.source.0] > 0)
                .expect("the firing order only uses produced nonterminals");
            free[p][tr.source.0] -= 1;
            Some(p)
        };
        vertices.push(Vertex {
            transition: t,
            parent,
        });
        free.push(tr.targets.to_dense(n));
    }
    Ok(DerivationTree { vertices })
}
