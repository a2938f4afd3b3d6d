use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::indep::IndependenceTester;

/// Simple undirected graph over a [`Domain`]: symmetric, no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    domain: Domain,
    adj: Vec<VarSet>,
}

impl UndirectedGraph {
    pub fn empty(domain: Domain) -> Self {
        let n = domain.len();
        UndirectedGraph {
            domain,
            adj: vec![VarSet::empty(); n],
        }
    }

    pub fn from_edges(domain: Domain, edges: &[(VarId, VarId)]) -> Result<Self> {
        let mut g = UndirectedGraph::empty(domain);
        for &(a, b) in edges {
            let n = g.domain.len();
            if a.0 >= n || b.0 >= n {
                return Err(Error::IndexOutOfRange(a.0.max(b.0), n));
            }
            if a == b {
                return Err(Error::InvalidArgument("self-loop in undirected graph".into()));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub(crate) fn add_edge(&mut self, a: VarId, b: VarId) {
        debug_assert_ne!(a, b);
        self.adj[a.0].insert(b);
        self.adj[b.0].insert(a);
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.adj[a.0].contains(b)
    }

    pub fn neighbors(&self, v: VarId) -> &VarSet {
        &self.adj[v.0]
    }

    /// Edges as `(smaller, larger)` index pairs in ascending order.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|b| b.0 > a).map(|b| (VarId(a), b)));
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(VarSet::len).sum::<usize>() / 2
    }

    pub fn is_symmetric(&self) -> bool {
        self.adj
            .iter()
            .enumerate()
            .all(|(a, ns)| !ns.contains(VarId(a)) && ns.iter().all(|b| self.adj[b.0].contains(VarId(a))))
    }

    /// Nodes reachable from `seeds` without passing through `blocked`.
    pub fn reachable(&self, seeds: &VarSet, blocked: &VarSet) -> VarSet {
        let mut seen = seeds.clone();
        let mut queue: VecDeque<VarId> = seeds.iter().collect();
        while let Some(v) = queue.pop_front() {
            for w in &self.adj[v.0] {
                if !blocked.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Undirected separation: every path from `x` to `y` meets `z`.
    pub fn separated(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> bool {
        self.reachable(x, z).is_disjoint(y)
    }

    /// Graphviz rendering with nodes in domain order and edges sorted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for name in self.domain.names() {
            let _ = writeln!(out, "  {};", dot_id(name));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(
                out,
                "  {} -- {};",
                dot_id(self.domain.name(a)),
                dot_id(self.domain.name(b))
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_id(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Minimal undirected independence map by edge exclusion: `X – Y` iff
/// `X` and `Y` are dependent given every other variable.
pub fn ug_edge_exclusion<T: IndependenceTester + ?Sized>(tester: &T) -> Result<UndirectedGraph> {
    let domain = tester.domain().clone();
    let all = domain.all();
    let n = domain.len();
    let pairs: Vec<(VarId, VarId)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (VarId(a), VarId(b))))
        .collect();
    let kept: Vec<(VarId, VarId)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let rest = all.without(a).without(b);
            tester.decide_pair(a, b, &rest).map(|d| (a, b, d.dependent()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, _, dep)| dep)
        .map(|(a, b, _)| (a, b))
        .collect();
    UndirectedGraph::from_edges(domain, &kept)
}

/// Nodes sharing a connected component with some target, minus the targets.
pub fn relevant_via_ug(g: &UndirectedGraph, targets: &VarSet) -> Result<VarSet> {
    g.domain().check(targets)?;
    Ok(g.reachable(targets, &VarSet::empty()).difference(targets))
}
