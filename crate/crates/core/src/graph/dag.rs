use std::collections::VecDeque;

use super::UndirectedGraph;
use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};

/// Directed acyclic graph stored as parent sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    domain: Domain,
    parents: Vec<VarSet>,
    children: Vec<VarSet>,
    order: Vec<VarId>,
}

impl Dag {
    pub fn new(domain: Domain, edges: &[(VarId, VarId)]) -> Result<Self> {
        let n = domain.len();
        let mut parents = vec![VarSet::empty(); n];
        let mut children = vec![VarSet::empty(); n];
        for &(p, c) in edges {
            if p.0 >= n || c.0 >= n {
                return Err(Error::IndexOutOfRange(p.0.max(c.0), n));
            }
            if p == c {
                return Err(Error::InvalidModel(format!("self-loop on `{}`", domain.name(p))));
            }
            parents[c.0].insert(p);
            children[p.0].insert(c);
        }
        // Kahn's algorithm, smallest index first for a stable order
        let mut indeg: Vec<usize> = parents.iter().map(VarSet::len).collect();
        let mut ready: std::collections::BTreeSet<VarId> = (0..n).filter(|&i| indeg[i] == 0).map(VarId).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for c in &children[v.0] {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidModel("graph contains a directed cycle".into()));
        }
        Ok(Dag {
            domain,
            parents,
            children,
            order,
        })
    }

    pub fn empty(domain: Domain) -> Self {
        Dag::new(domain, &[]).expect("edgeless graph is acyclic")
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn parents(&self, v: VarId) -> &VarSet {
        &self.parents[v.0]
    }

    pub fn children(&self, v: VarId) -> &VarSet {
        &self.children[v.0]
    }

    /// Topological order; ties resolved by ascending index.
    pub fn topological_order(&self) -> &[VarId] {
        &self.order
    }

    /// `(parent, child)` pairs sorted by child, then parent.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for p in ps {
                out.push((p, VarId(c)));
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().map(VarSet::len).sum()
    }

    /// `set` together with all its ancestors.
    pub fn ancestral_closure(&self, set: &VarSet) -> VarSet {
        let mut seen = set.clone();
        let mut stack: Vec<VarId> = set.iter().collect();
        while let Some(v) = stack.pop() {
            for p in &self.parents[v.0] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Moral graph: parent-child links plus links between co-parents.
    pub fn moral_graph(&self) -> UndirectedGraph {
        let mut g = UndirectedGraph::empty(self.domain.clone());
        for (c, ps) in self.parents.iter().enumerate() {
            let ps = ps.as_slice();
            for (i, &p) in ps.iter().enumerate() {
                g.add_edge(p, VarId(c));
                for &q in &ps[i + 1..] {
                    g.add_edge(p, q);
                }
            }
        }
        g
    }

    /// d-separation of `x` and `y` by `z`, by reachability over
    /// (node, direction) states: a trail may pass a non-collider only when
    /// it is outside `z`, and a collider only when it or a descendant is in `z`.
    pub fn d_separated(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<bool> {
        for s in [x, y, z] {
            self.domain.check(s)?;
        }
        self.domain.ensure_disjoint(&[("x", x), ("y", y), ("z", z)])?;
        let anc_z = self.ancestral_closure(z);
        let n = self.len();
        // visited[v][0]: reached from a child (moving up); [1]: from a parent (moving down)
        let mut visited = vec![[false; 2]; n];
        let mut queue: VecDeque<(VarId, usize)> = x.iter().map(|v| (v, 0)).collect();
        const UP: usize = 0;
        const DOWN: usize = 1;
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v.0][dir] {
                continue;
            }
            visited[v.0][dir] = true;
            let in_z = z.contains(v);
            if !in_z && y.contains(v) {
                return Ok(false);
            }
            if dir == UP && !in_z {
                queue.extend(self.parents[v.0].iter().map(|p| (p, UP)));
                queue.extend(self.children[v.0].iter().map(|c| (c, DOWN)));
            } else if dir == DOWN {
                if !in_z {
                    queue.extend(self.children[v.0].iter().map(|c| (c, DOWN)));
                }
                if anc_z.contains(v) {
                    queue.extend(self.parents[v.0].iter().map(|p| (p, UP)));
                }
            }
        }
        Ok(true)
    }
}
