//! Identification of the relevant set `R` for a target set `T`.
//!
//! - [`find_relevant`] / [`find_relevant_with_context`]: frontier expansion over
//!   the (context-conditional) marginal-dependence graph. A node is relevant
//!   iff a chain of pairwise dependent nodes links it to some target.
//! - [`purge_context`]: drops context nodes that are irrelevant given the rest
//!   of the context.
//! - [`oracle_relevant`]: exhaustive search over conditioning sets on an exact
//!   model; exponential, used to cross-check the frontier search.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;

use crate::domain::{VarId, VarSet};
use crate::error::{Error, Result};
use crate::indep::IndependenceTester;

/// Largest candidate pool `oracle_relevant` will enumerate (2^k subsets).
pub const ORACLE_MAX_CANDIDATES: usize = 20;

/// Dependence chain from a relevant node to a target; consecutive nodes
/// tested dependent (given the context).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessChain(pub Vec<VarId>);

impl WitnessChain {
    pub fn nodes(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Discovery path of the frontier search.
    Chain(WitnessChain),
    /// Smallest conditioning set (context excluded) under which the node
    /// depends on the targets.
    ConditioningSet(VarSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceReport {
    pub targets: VarSet,
    pub context: VarSet,
    pub relevant: VarSet,
    pub irrelevant: VarSet,
    pub witnesses: BTreeMap<VarId, Witness>,
    pub tests_performed: usize,
    /// Decisions forced to "independent" by a data test's sample guard.
    pub low_power_tests: usize,
}

/// Decision cache keyed by unordered pair; the context is fixed per search.
struct PairCache<'a, T: ?Sized> {
    tester: &'a T,
    context: &'a VarSet,
    decisions: DashMap<(VarId, VarId), bool>,
    misses: AtomicUsize,
    low_power: AtomicUsize,
}

impl<'a, T: IndependenceTester + ?Sized> PairCache<'a, T> {
    fn new(tester: &'a T, context: &'a VarSet) -> Self {
        PairCache {
            tester,
            context,
            decisions: DashMap::new(),
            misses: AtomicUsize::new(0),
            low_power: AtomicUsize::new(0),
        }
    }

    fn dependent(&self, a: VarId, b: VarId) -> Result<bool> {
        let key = (a.min(b), a.max(b));
        if let Some(hit) = self.decisions.get(&key) {
            return Ok(*hit);
        }
        let d = self.tester.decide_pair(key.0, key.1, self.context)?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        if d.low_power {
            self.low_power.fetch_add(1, Ordering::Relaxed);
        }
        Ok(*self.decisions.entry(key).or_insert(d.dependent()))
    }
}

fn validate<T: IndependenceTester + ?Sized>(tester: &T, targets: &VarSet, context: &VarSet) -> Result<()> {
    let domain = tester.domain();
    domain.check(targets)?;
    domain.check(context)?;
    if targets.is_empty() {
        return Err(Error::EmptySet("targets"));
    }
    domain.ensure_disjoint(&[("targets", targets), ("context", context)])
}

/// Relevant set of `targets` from marginal dependence tests.
pub fn find_relevant<T: IndependenceTester + ?Sized>(tester: &T, targets: &VarSet) -> Result<RelevanceReport> {
    find_relevant_with_context(tester, targets, &VarSet::empty())
}

/// Relevant set of `targets` when every query also conditions on `context`:
/// all pairwise tests are conditioned on `context`, and context nodes are
/// neither candidates nor chain members.
pub fn find_relevant_with_context<T: IndependenceTester + ?Sized>(
    tester: &T,
    targets: &VarSet,
    context: &VarSet,
) -> Result<RelevanceReport> {
    let order: Vec<VarId> = tester.domain().all().iter().collect();
    find_relevant_ordered(tester, targets, context, &order)
}

/// Frontier search that visits frontier nodes and candidates in the order
/// given by `order` (a permutation of the domain). The relevant set does not
/// depend on the order; witness chains may.
pub fn find_relevant_ordered<T: IndependenceTester + ?Sized>(
    tester: &T,
    targets: &VarSet,
    context: &VarSet,
    order: &[VarId],
) -> Result<RelevanceReport> {
    validate(tester, targets, context)?;
    let n = tester.domain().len();
    let mut rank = vec![usize::MAX; n];
    for (i, v) in order.iter().enumerate() {
        if v.0 >= n || rank[v.0] != usize::MAX {
            return Err(Error::InvalidArgument(
                "order must be a permutation of the domain".into(),
            ));
        }
        rank[v.0] = i;
    }
    if order.len() != n {
        return Err(Error::InvalidArgument(
            "order must be a permutation of the domain".into(),
        ));
    }

    let cache = PairCache::new(tester, context);
    let mut reached = targets.clone();
    let mut parent: BTreeMap<VarId, VarId> = BTreeMap::new();
    let mut frontier: Vec<VarId> = order.iter().copied().filter(|v| targets.contains(*v)).collect();

    while !frontier.is_empty() {
        let remaining: Vec<VarId> = order
            .iter()
            .copied()
            .filter(|v| !reached.contains(*v) && !context.contains(*v))
            .collect();
        // Each candidate scans the frontier and stops at its first dependence.
        let found: Vec<(VarId, Option<VarId>)> = remaining
            .par_iter()
            .map(|&c| {
                for &f in &frontier {
                    if cache.dependent(f, c)? {
                        return Ok((c, Some(f)));
                    }
                }
                Ok((c, None))
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (c, p) in found {
            if let Some(p) = p {
                parent.insert(c, p);
                reached.insert(c);
                next.push(c);
            }
        }
        frontier = next;
    }

    let relevant = reached.difference(targets);
    let irrelevant = tester.domain().all().difference(&reached).difference(context);
    let witnesses = relevant
        .iter()
        .map(|v| {
            let mut chain = vec![v];
            let mut cur = v;
            while let Some(&p) = parent.get(&cur) {
                chain.push(p);
                cur = p;
            }
            (v, Witness::Chain(WitnessChain(chain)))
        })
        .collect();
    Ok(RelevanceReport {
        targets: targets.clone(),
        context: context.clone(),
        relevant,
        irrelevant,
        witnesses,
        tests_performed: cache.misses.load(Ordering::Relaxed),
        low_power_tests: cache.low_power.load(Ordering::Relaxed),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurgeStep {
    pub removed: VarId,
    /// Context the removal was evaluated against (`C \ {removed}`).
    pub reduced_context: VarSet,
    /// `R(C \ {removed})`, which did not contain `removed`.
    pub relevant_without: VarSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurgeResult {
    pub context: VarSet,
    pub audit: Vec<PurgeStep>,
    pub tests_performed: usize,
}

/// Repeatedly removes a context node `X` with `X ∉ R(C \ {X})`, scanning
/// candidates in ascending index order and restarting after every removal,
/// until no context node qualifies.
pub fn purge_context<T: IndependenceTester + ?Sized>(
    tester: &T,
    targets: &VarSet,
    context: &VarSet,
) -> Result<PurgeResult> {
    validate(tester, targets, context)?;
    let mut current = context.clone();
    let mut audit = Vec::new();
    let mut tests = 0;
    'scan: loop {
        for x in current.clone().iter() {
            let reduced = current.without(x);
            let r = find_relevant_with_context(tester, targets, &reduced)?;
            tests += r.tests_performed;
            if !r.relevant.contains(x) {
                log::debug!("purging context node {x}: not in R({reduced})");
                audit.push(PurgeStep {
                    removed: x,
                    reduced_context: reduced.clone(),
                    relevant_without: r.relevant,
                });
                current = reduced;
                continue 'scan;
            }
        }
        break;
    }
    Ok(PurgeResult {
        context: current,
        audit,
        tests_performed: tests,
    })
}

/// Exhaustive relevance: `X` is relevant iff `X ⊥̸ T | Z ∪ C` for some
/// `Z ⊆ U \ T \ C \ {X}`. Conditioning sets are tried by size, then
/// lexicographically, and the first dependence is kept as the witness.
/// The target set is always queried jointly.
pub fn oracle_relevant<T: IndependenceTester + ?Sized>(
    tester: &T,
    targets: &VarSet,
    context: &VarSet,
) -> Result<RelevanceReport> {
    if tester.exact_model().is_none() {
        return Err(Error::NotExact);
    }
    validate(tester, targets, context)?;
    let candidates = tester.domain().all().difference(targets).difference(context);
    if candidates.len() > ORACLE_MAX_CANDIDATES {
        return Err(Error::DomainTooLarge {
            size: candidates.len(),
            limit: ORACLE_MAX_CANDIDATES,
        });
    }
    let per_node: Vec<(VarId, Option<VarSet>, usize)> = candidates
        .as_slice()
        .par_iter()
        .map(|&x| {
            let others = candidates.without(x);
            let xs = VarSet::singleton(x);
            let mut tests = 0;
            for k in 0..=others.len() {
                let mut subsets = Vec::new();
                others.combinations(k, &mut subsets);
                for z in subsets {
                    tests += 1;
                    if tester.decide(&xs, targets, &z.union(context))?.dependent() {
                        return Ok((x, Some(z), tests));
                    }
                }
            }
            Ok((x, None, tests))
        })
        .collect::<Result<_>>()?;

    let mut relevant = VarSet::empty();
    let mut witnesses = BTreeMap::new();
    let mut tests = 0;
    for (x, w, t) in per_node {
        tests += t;
        if let Some(z) = w {
            relevant.insert(x);
            witnesses.insert(x, Witness::ConditioningSet(z));
        }
    }
    Ok(RelevanceReport {
        targets: targets.clone(),
        context: context.clone(),
        irrelevant: candidates.difference(&relevant),
        relevant,
        witnesses,
        tests_performed: tests,
        low_power_tests: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::exact::GaussianModel;
    use crate::indep::ExactOracle;

    fn s(i: &[usize]) -> VarSet {
        VarSet::from_indices(i.iter().copied())
    }

    /// A -> B -> T plus an unrelated D.
    fn chain_with_isolate() -> ExactOracle {
        ExactOracle::new(
            GaussianModel::from_rows(
                Domain::new(["A", "B", "T", "D"]).unwrap(),
                vec![0.0; 4],
                &[
                    1.0, 1.0, 1.0, 0.0, //
                    1.0, 2.0, 2.0, 0.0, //
                    1.0, 2.0, 3.0, 0.0, //
                    0.0, 0.0, 0.0, 1.0,
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn chain_relevance_and_witnesses() {
        let o = chain_with_isolate();
        let r = find_relevant(&o, &s(&[2])).unwrap();
        assert_eq!(r.relevant, s(&[0, 1]));
        assert_eq!(r.irrelevant, s(&[3]));
        // both A and B are marginally dependent on T, so both chains are direct
        assert_eq!(
            r.witnesses[&VarId(0)],
            Witness::Chain(WitnessChain(vec![VarId(0), VarId(2)]))
        );
        assert_eq!(oracle_relevant(&o, &s(&[2]), &s(&[])).unwrap().relevant, r.relevant);
    }

    #[test]
    fn all_targets_gives_empty_relevant_set() {
        let o = chain_with_isolate();
        let r = find_relevant(&o, &s(&[0, 1, 2, 3])).unwrap();
        assert!(r.relevant.is_empty() && r.irrelevant.is_empty());
        assert_eq!(r.tests_performed, 0);
    }

    #[test]
    fn input_errors() {
        let o = chain_with_isolate();
        assert!(matches!(find_relevant(&o, &s(&[])), Err(Error::EmptySet(_))));
        assert!(matches!(
            find_relevant_with_context(&o, &s(&[2]), &s(&[2, 1])),
            Err(Error::Overlap(_))
        ));
        assert!(find_relevant(&o, &s(&[9])).is_err());
        assert!(find_relevant_ordered(&o, &s(&[2]), &s(&[]), &[VarId(0), VarId(0), VarId(1), VarId(2)]).is_err());
    }

    #[test]
    fn empty_context_matches_plain_search() {
        let o = chain_with_isolate();
        assert_eq!(
            find_relevant(&o, &s(&[2])).unwrap(),
            find_relevant_with_context(&o, &s(&[2]), &s(&[])).unwrap()
        );
        let p = purge_context(&o, &s(&[2]), &s(&[])).unwrap();
        assert!(p.context.is_empty() && p.audit.is_empty());
    }

    #[test]
    fn context_blocks_chain() {
        // given B, A is independent of T
        let o = chain_with_isolate();
        let r = find_relevant_with_context(&o, &s(&[2]), &s(&[1])).unwrap();
        assert!(r.relevant.is_empty());
        assert_eq!(r.irrelevant, s(&[0, 3]));
        // B itself is relevant without context, so it stays
        let p = purge_context(&o, &s(&[2]), &s(&[1])).unwrap();
        assert_eq!(p.context, s(&[1]));
        // D is purged
        let p = purge_context(&o, &s(&[2]), &s(&[1, 3])).unwrap();
        assert_eq!(p.context, s(&[1]));
        assert_eq!(p.audit.len(), 1);
        assert_eq!(p.audit[0].removed, VarId(3));
    }

    #[test]
    fn oracle_requires_exact_model() {
        use crate::indep::{ColumnKind, Dataset, FisherZ};
        let ds = Dataset::from_rows(
            Domain::numbered(2),
            vec![ColumnKind::Continuous; 2],
            &(0..20).map(|i| vec![i as f64, (i * i % 7) as f64]).collect::<Vec<_>>(),
        )
        .unwrap();
        let t = FisherZ::new(ds, 0.05).unwrap();
        assert!(matches!(oracle_relevant(&t, &s(&[0]), &s(&[])), Err(Error::NotExact)));
    }

    #[test]
    fn oracle_guard() {
        let n = 23;
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            cov[i * n + i] = 1.0;
        }
        let o = ExactOracle::new(GaussianModel::from_rows(Domain::numbered(n), vec![0.0; n], &cov).unwrap());
        assert!(matches!(
            oracle_relevant(&o, &s(&[0]), &s(&[])),
            Err(Error::DomainTooLarge { .. })
        ));
        let ctx: Vec<usize> = (1..17).collect();
        let r = oracle_relevant(&o, &s(&[0]), &s(&ctx)).unwrap();
        assert!(r.relevant.is_empty());
    }
}
