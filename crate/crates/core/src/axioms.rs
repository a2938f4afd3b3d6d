//! Exhaustive conditional-independence enumeration and graphoid axiom checks
//! for small exact models.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::exact::{increment, table_size};
use crate::exact::{ExactModel, EXACT_ZERO_TOL};

/// Largest domain [`enumerate_independencies`] accepts.
pub const MAX_ENUMERATION_VARS: usize = 8;
/// Largest domain [`check_axiom`] accepts.
pub const MAX_AXIOM_VARS: usize = 6;
/// Default cap on `|x|`, `|y|` (and `|w|`) in enumerations and axiom instances.
pub const DEFAULT_MAX_SET_SIZE: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndependenceStatement {
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
    pub holds: bool,
}

impl IndependenceStatement {
    pub fn render(&self, domain: &Domain) -> String {
        let names = |s: &VarSet| {
            let n = domain.set_names(s);
            if n.len() == 1 {
                n[0].clone()
            } else {
                format!("{{{}}}", n.join(","))
            }
        };
        let rel = if self.holds { "⊥" } else { "⊥̸" };
        let z = if self.z.is_empty() {
            "∅".to_string()
        } else {
            names(&self.z)
        };
        format!("{} {rel} {} | {z}", names(&self.x), names(&self.y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
    WeakTransitivity,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
        Axiom::Intersection,
        Axiom::Composition,
        Axiom::WeakTransitivity,
    ];

    /// The four properties every distribution satisfies.
    pub const SEMI_GRAPHOID: [Axiom; 4] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Decomposition => "decomposition",
            Axiom::WeakUnion => "weak-union",
            Axiom::Contraction => "contraction",
            Axiom::Intersection => "intersection",
            Axiom::Composition => "composition",
            Axiom::WeakTransitivity => "weak-transitivity",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown axiom `{s}`")))
    }
}

/// An instance whose premises hold in the model while the conclusion fails.
/// For weak transitivity `failed` holds both disjuncts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub premises: Vec<IndependenceStatement>,
    pub failed: Vec<IndependenceStatement>,
}

/// Memoized exact independence lookups. `None` marks queries the model
/// cannot answer exactly.
struct Memo<'a> {
    model: &'a ExactModel,
    tol: f64,
    seen: HashMap<(VarSet, VarSet, VarSet), Option<bool>>,
}

impl<'a> Memo<'a> {
    fn new(model: &'a ExactModel) -> Self {
        Memo {
            model,
            tol: EXACT_ZERO_TOL,
            seen: HashMap::new(),
        }
    }

    fn holds(&mut self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<Option<bool>> {
        let key = (x.clone(), y.clone(), z.clone());
        if let Some(&v) = self.seen.get(&key) {
            return Ok(v);
        }
        let v = match self.model.independent(x, y, z, self.tol) {
            Ok(b) => Some(b),
            Err(Error::UnsupportedQuery(_)) => None,
            Err(e) => return Err(e),
        };
        self.seen.insert(key, v);
        Ok(v)
    }

    fn statement(&mut self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<Option<IndependenceStatement>> {
        Ok(self.holds(x, y, z)?.map(|holds| IndependenceStatement {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            holds,
        }))
    }
}

fn guard(domain: &Domain, limit: usize) -> Result<()> {
    if domain.len() > limit {
        return Err(Error::DomainTooLarge {
            size: domain.len(),
            limit,
        });
    }
    Ok(())
}

/// Every statement `x ⊥ y | z` with `1 ≤ |x|, |y| ≤ max_set_size`, disjoint
/// sets, `x` before `y` in the size-then-lexicographic order, and `z` any
/// subset of the remaining variables. Queries the model cannot decide
/// exactly are left out.
pub fn enumerate_independencies(model: &ExactModel, max_set_size: usize) -> Result<Vec<IndependenceStatement>> {
    let domain = model.domain();
    guard(domain, MAX_ENUMERATION_VARS)?;
    let sides: Vec<VarSet> = domain
        .all()
        .subsets_up_to(max_set_size)
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    let mut memo = Memo::new(model);
    let mut out = Vec::new();
    for (i, x) in sides.iter().enumerate() {
        for y in sides[i + 1..].iter().filter(|y| y.is_disjoint(x)) {
            let rest = domain.all().difference(&x.union(y));
            for z in rest.subsets() {
                if let Some(s) = memo.statement(x, y, &z)? {
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

/// True iff both models decide every enumerated statement the same way.
pub fn same_independencies(a: &ExactModel, b: &ExactModel, max_set_size: usize) -> Result<bool> {
    if a.domain().names() != b.domain().names() {
        return Err(Error::InvalidArgument(
            "models are defined over different variables".into(),
        ));
    }
    Ok(enumerate_independencies(a, max_set_size)? == enumerate_independencies(b, max_set_size)?)
}

/// Role assignments of every variable to one of `x`, `y`, `z`, `w` or none,
/// in a fixed order.
fn instances(n: usize) -> impl Iterator<Item = [VarSet; 4]> {
    let total = 5usize.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut roles: [VarSet; 4] = Default::default();
        for v in 0..n {
            let r = code % 5;
            code /= 5;
            if r > 0 {
                roles[r - 1].insert(VarId(v));
            }
        }
        roles
    })
}

/// Every instance of `axiom` over disjoint `x`, `y`, `z`, `w` (each of `x`,
/// `y`, `w` at most `max_set_size`; `w` a single node for weak transitivity)
/// whose premises hold but whose conclusion fails. Instances touching a
/// query the model cannot answer exactly are skipped.
pub fn check_axiom(model: &ExactModel, axiom: Axiom, max_set_size: usize) -> Result<Vec<AxiomViolation>> {
    guard(model.domain(), MAX_AXIOM_VARS)?;
    let mut memo = Memo::new(model);
    let mut out = Vec::new();
    for [x, y, z, w] in instances(model.domain().len()) {
        if x.is_empty() || y.is_empty() || x.len() > max_set_size || y.len() > max_set_size || w.len() > max_set_size {
            continue;
        }
        let w_ok = match axiom {
            Axiom::Symmetry => w.is_empty(),
            Axiom::WeakTransitivity => w.len() == 1,
            _ => !w.is_empty(),
        };
        if !w_ok {
            continue;
        }
        if let Some(v) = instance(&mut memo, axiom, &x, &y, &z, &w)? {
            out.push(v);
        }
    }
    Ok(out)
}

fn instance(
    memo: &mut Memo<'_>,
    axiom: Axiom,
    x: &VarSet,
    y: &VarSet,
    z: &VarSet,
    w: &VarSet,
) -> Result<Option<AxiomViolation>> {
    let yw = y.union(w);
    let (premises, conclusions): (Vec<[&VarSet; 3]>, Vec<[VarSet; 3]>) = match axiom {
        Axiom::Symmetry => (vec![[x, y, z]], vec![[y.clone(), x.clone(), z.clone()]]),
        Axiom::Decomposition => (vec![[x, &yw, z]], vec![[x.clone(), y.clone(), z.clone()]]),
        Axiom::WeakUnion => (vec![[x, &yw, z]], vec![[x.clone(), y.clone(), z.union(w)]]),
        Axiom::Contraction => {
            let zy = z.union(y);
            return finish(
                memo,
                axiom,
                &[[x, y, z], [x, w, &zy]],
                &[[x.clone(), yw.clone(), z.clone()]],
            );
        }
        Axiom::Intersection => {
            let zw = z.union(w);
            let zy = z.union(y);
            return finish(
                memo,
                axiom,
                &[[x, y, &zw], [x, w, &zy]],
                &[[x.clone(), yw.clone(), z.clone()]],
            );
        }
        Axiom::Composition => (vec![[x, y, z], [x, w, z]], vec![[x.clone(), yw.clone(), z.clone()]]),
        Axiom::WeakTransitivity => {
            let zw = z.union(w);
            return finish(
                memo,
                axiom,
                &[[x, y, z], [x, y, &zw]],
                &[[x.clone(), w.clone(), z.clone()], [w.clone(), y.clone(), z.clone()]],
            );
        }
    };
    finish(memo, axiom, &premises, &conclusions)
}

/// Premises must all hold; the conclusion is a disjunction and fails only
/// when every listed statement fails.
fn finish(
    memo: &mut Memo<'_>,
    axiom: Axiom,
    premises: &[[&VarSet; 3]],
    conclusions: &[[VarSet; 3]],
) -> Result<Option<AxiomViolation>> {
    let mut held = Vec::with_capacity(premises.len());
    for [a, b, c] in premises {
        match memo.statement(a, b, c)? {
            Some(s) if s.holds => held.push(s),
            _ => return Ok(None),
        }
    }
    let mut failed = Vec::with_capacity(conclusions.len());
    for [a, b, c] in conclusions {
        match memo.statement(a, b, c)? {
            Some(s) if !s.holds => failed.push(s),
            _ => return Ok(None),
        }
    }
    Ok(Some(AxiomViolation {
        axiom,
        premises: held,
        failed,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureStatus {
    /// The derived model satisfies composition and weak transitivity.
    Holds,
    /// The derived model violates at least one of them.
    Violated,
    /// The conditioned models disagree on their independencies across
    /// assignments, so closure is not claimed.
    HypothesisFailed,
    /// The input model already violates composition or weak transitivity.
    InputViolates,
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub status: ClosureStatus,
    pub violations: Vec<AxiomViolation>,
    /// Model after hiding and conditioning; absent when the input check failed.
    pub derived: Option<ExactModel>,
    /// Assignments of the conditioned variables compared for the hypothesis.
    pub assignments_compared: usize,
}

const CLOSURE_AXIOMS: [Axiom; 2] = [Axiom::Composition, Axiom::WeakTransitivity];

fn closure_violations(model: &ExactModel, max_set_size: usize) -> Result<Vec<AxiomViolation>> {
    let mut out = Vec::new();
    for a in CLOSURE_AXIOMS {
        out.extend(check_axiom(model, a, max_set_size)?);
    }
    Ok(out)
}

/// Hides `hidden`, then conditions on `given`, and re-checks composition and
/// weak transitivity. With conditioning, the independencies of the hidden
/// marginal given every other assignment of the conditioned variables (every
/// positive-probability state for tables, one shifted value for Gaussians)
/// must match those given `given`; otherwise the status is
/// [`ClosureStatus::HypothesisFailed`].
pub fn check_closure(
    model: &ExactModel,
    hidden: &VarSet,
    given: &[(VarId, f64)],
    max_set_size: usize,
) -> Result<ClosureReport> {
    guard(model.domain(), MAX_AXIOM_VARS)?;
    let input = closure_violations(model, max_set_size)?;
    if !input.is_empty() {
        return Ok(ClosureReport {
            status: ClosureStatus::InputViolates,
            violations: input,
            derived: None,
            assignments_compared: 0,
        });
    }
    let marginal = model.hide(hidden)?;
    // conditioned variables addressed by name in the marginal's domain
    let given: Vec<(VarId, f64)> = given
        .iter()
        .map(|&(v, x)| {
            let name = model.domain().name(v);
            marginal
                .domain()
                .id(name)
                .map(|id| (id, x))
                .ok_or_else(|| Error::Overlap(format!("`{name}` is both hidden and conditioned on")))
        })
        .collect::<Result<_>>()?;
    if given.is_empty() {
        let violations = closure_violations(&marginal, max_set_size)?;
        let status = if violations.is_empty() {
            ClosureStatus::Holds
        } else {
            ClosureStatus::Violated
        };
        return Ok(ClosureReport {
            status,
            violations,
            derived: Some(marginal),
            assignments_compared: 0,
        });
    }

    let derived = marginal.condition(&given)?;
    let mut compared = 1;
    for alt in alternative_assignments(&marginal, &given)? {
        let other = match marginal.condition(&alt) {
            Ok(m) => m,
            Err(Error::ZeroProbabilityEvent) => continue,
            Err(e) => return Err(e),
        };
        compared += 1;
        if !same_independencies(&derived, &other, max_set_size)? {
            return Ok(ClosureReport {
                status: ClosureStatus::HypothesisFailed,
                violations: Vec::new(),
                derived: Some(derived),
                assignments_compared: compared,
            });
        }
    }
    let violations = closure_violations(&derived, max_set_size)?;
    let status = if violations.is_empty() {
        ClosureStatus::Holds
    } else {
        ClosureStatus::Violated
    };
    Ok(ClosureReport {
        status,
        violations,
        derived: Some(derived),
        assignments_compared: compared,
    })
}

fn alternative_assignments(model: &ExactModel, given: &[(VarId, f64)]) -> Result<Vec<Vec<(VarId, f64)>>> {
    match model {
        ExactModel::Gaussian(_) => Ok(vec![given.iter().map(|&(v, x)| (v, x + 1.0)).collect()]),
        ExactModel::Discrete(joint) => {
            let cards: Vec<usize> = given.iter().map(|(v, _)| joint.cardinalities()[v.0]).collect();
            let size = table_size(&cards)?;
            let mut state = vec![0usize; cards.len()];
            let mut out = Vec::with_capacity(size);
            for _ in 0..size {
                let alt: Vec<(VarId, f64)> = given.iter().zip(&state).map(|(&(v, _), &s)| (v, s as f64)).collect();
                if alt != given {
                    out.push(alt);
                }
                increment(&mut state, &cards);
            }
            Ok(out)
        }
        ExactModel::Mixture(_) => Err(Error::InvalidArgument(
            "closure checks need a Gaussian or discrete model".into(),
        )),
    }
}
