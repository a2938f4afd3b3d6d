use rayon::prelude::*;

use super::UndirectedGraph;
use crate::domain::{VarId, VarSet};
use crate::error::Result;
use crate::indep::IndependenceTester;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovBoundary {
    pub node: VarId,
    pub boundary: VarSet,
    pub tests_performed: usize,
    pub max_conditioning_size: usize,
}

/// Incremental association Markov boundary search.
///
/// Grow: repeatedly add the candidate most strongly associated with `node`
/// given the current boundary (largest `|statistic|`, lowest index on ties)
/// as long as it tests dependent. Shrink: drop, in ascending order, every
/// member that tests independent of `node` given the rest of the boundary.
pub fn markov_boundary_iamb<T: IndependenceTester + ?Sized>(tester: &T, node: VarId) -> Result<MarkovBoundary> {
    let domain = tester.domain();
    domain.check(&VarSet::singleton(node))?;
    let mut boundary = VarSet::empty();
    let mut tests = 0usize;
    let mut max_cond = 0usize;

    loop {
        let mut best: Option<(f64, VarId)> = None;
        for c in domain.all().without(node).difference(&boundary).iter() {
            let d = tester.decide_pair(node, c, &boundary)?;
            tests += 1;
            max_cond = max_cond.max(boundary.len());
            if d.dependent() {
                let a = d.association();
                // strict comparison keeps the lowest index on ties
                if best.is_none_or(|(b, _)| a > b) {
                    best = Some((a, c));
                }
            }
        }
        match best {
            Some((_, c)) => {
                boundary.insert(c);
            }
            None => break,
        }
    }

    for m in boundary.clone().iter() {
        let rest = boundary.without(m);
        let d = tester.decide_pair(node, m, &rest)?;
        tests += 1;
        max_cond = max_cond.max(rest.len());
        if d.independent {
            boundary = rest;
        }
    }

    Ok(MarkovBoundary {
        node,
        boundary,
        tests_performed: tests,
        max_conditioning_size: max_cond,
    })
}

#[derive(Clone, Debug)]
pub struct MbGraph {
    pub graph: UndirectedGraph,
    pub boundaries: Vec<MarkovBoundary>,
    /// `(x, y)` with `y` in the boundary of `x` but not the reverse.
    pub asymmetries: Vec<(VarId, VarId)>,
}

impl MbGraph {
    pub fn max_conditioning_size(&self) -> usize {
        self.boundaries
            .iter()
            .map(|b| b.max_conditioning_size)
            .max()
            .unwrap_or(0)
    }

    pub fn tests_performed(&self) -> usize {
        self.boundaries.iter().map(|b| b.tests_performed).sum()
    }
}

/// Undirected map from Markov boundaries. An edge needs membership in both
/// directions; one-sided memberships are kept as asymmetry warnings.
pub fn ug_via_markov_boundaries<T: IndependenceTester + ?Sized>(tester: &T) -> Result<MbGraph> {
    let domain = tester.domain().clone();
    let boundaries: Vec<MarkovBoundary> = (0..domain.len())
        .into_par_iter()
        .map(|i| markov_boundary_iamb(tester, VarId(i)))
        .collect::<Result<_>>()?;
    let mut graph = UndirectedGraph::empty(domain);
    let mut asymmetries = Vec::new();
    for mb in &boundaries {
        for y in &mb.boundary {
            if boundaries[y.0].boundary.contains(mb.node) {
                if mb.node < y {
                    graph.add_edge(mb.node, y);
                }
            } else {
                log::warn!(
                    "Markov boundary asymmetry: {} lists {} but not vice versa",
                    graph.domain().name(mb.node),
                    graph.domain().name(y)
                );
                asymmetries.push((mb.node, y));
            }
        }
    }
    Ok(MbGraph {
        graph,
        boundaries,
        asymmetries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::exact::GaussianModel;
    use crate::graph::ug_edge_exclusion;
    use crate::indep::ExactOracle;

    fn oracle(names: &[&str], cov: &[f64]) -> ExactOracle {
        let d = Domain::new(names.iter().copied()).unwrap();
        let n = d.len();
        ExactOracle::new(GaussianModel::from_rows(d, vec![0.0; n], cov).unwrap())
    }

    #[test]
    fn chain_middle_boundary() {
        let o = oracle(&["A", "B", "T"], &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 2.0, 3.0]);
        let mb = markov_boundary_iamb(&o, VarId(1)).unwrap();
        assert_eq!(mb.boundary, VarSet::from_indices([0, 2]));
        let mb = markov_boundary_iamb(&o, VarId(0)).unwrap();
        assert_eq!(mb.boundary, VarSet::from_indices([1]));
        let g = ug_via_markov_boundaries(&o).unwrap();
        assert_eq!(g.graph, ug_edge_exclusion(&o).unwrap());
        assert!(g.asymmetries.is_empty());
    }

    #[test]
    fn collider_parent_includes_spouse() {
        // C1 -> S <- T, S = C1 + T + e
        let o = oracle(&["C1", "S", "T"], &[1.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 1.0]);
        let mb = markov_boundary_iamb(&o, VarId(0)).unwrap();
        assert_eq!(mb.boundary, VarSet::from_indices([1, 2]));
    }

    #[test]
    fn isolated_node_has_empty_boundary() {
        let o = oracle(&["A", "B", "D"], &[1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(markov_boundary_iamb(&o, VarId(2)).unwrap().boundary.is_empty());
    }
}
