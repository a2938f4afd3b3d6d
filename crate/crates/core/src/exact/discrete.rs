use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Exact joint probability table over finite-cardinality variables.
///
/// Storage is a flat row-major table: the first variable varies slowest and
/// the last variable fastest, so cell order is the mixed-radix encoding of
/// the assignment.
#[derive(Clone, Debug)]
pub struct DiscreteJoint {
    domain: Domain,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl DiscreteJoint {
    pub fn new(domain: Domain, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidModel("discrete joint needs at least one variable".into()));
        }
        if cards.len() != domain.len() {
            return Err(Error::InvalidModel(format!(
                "{} cardinalities for {} variables",
                cards.len(),
                domain.len()
            )));
        }
        if cards.contains(&0) {
            return Err(Error::InvalidModel("cardinalities must be positive".into()));
        }
        let size = table_size(&cards)?;
        if probs.len() != size {
            return Err(Error::InvalidModel(format!(
                "table has {} entries, expected {size}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidModel(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteJoint { domain, cards, probs })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Flat index of a full assignment.
    pub fn index_of(&self, assignment: &[usize]) -> usize {
        assignment.iter().zip(&self.cards).fold(0, |acc, (&v, &c)| acc * c + v)
    }

    pub fn prob(&self, assignment: &[usize]) -> f64 {
        self.probs[self.index_of(assignment)]
    }

    /// Marginal table over `vars` (in the given order), row-major.
    pub fn marginal_table(&self, vars: &[usize]) -> Vec<f64> {
        project(&self.probs, &self.cards, vars)
    }

    pub fn marginalize(&self, keep: &VarSet) -> Result<DiscreteJoint> {
        if keep.is_empty() {
            return Err(Error::EmptySet("marginalization keep set"));
        }
        let domain = self.domain.restrict(keep)?;
        let idx = keep.indices();
        let cards = idx.iter().map(|&i| self.cards[i]).collect();
        Ok(DiscreteJoint {
            domain,
            cards,
            probs: self.marginal_table(&idx),
        })
    }

    /// Conditions on `given` (variable, state) pairs and drops those variables.
    pub fn condition(&self, given: &[(VarId, usize)]) -> Result<DiscreteJoint> {
        let cond: VarSet = given.iter().map(|(v, _)| *v).collect();
        if cond.len() != given.len() {
            return Err(Error::InvalidArgument("variable conditioned twice".into()));
        }
        self.domain.check(&cond)?;
        if cond.is_empty() {
            return Ok(self.clone());
        }
        if cond.len() == self.domain.len() {
            return Err(Error::ConditionOnAll);
        }
        for &(v, s) in given {
            if s >= self.cards[v.0] {
                return Err(Error::InvalidArgument(format!(
                    "state {s} out of range for `{}` (cardinality {})",
                    self.domain.name(v),
                    self.cards[v.0]
                )));
            }
        }
        let rest = self.domain.all().difference(&cond);
        let rest_idx = rest.indices();
        let rest_cards: Vec<usize> = rest_idx.iter().map(|&i| self.cards[i]).collect();
        let mut out = vec![0.0; rest_cards.iter().product()];
        let mut state = vec![0usize; self.cards.len()];
        for &p in &self.probs {
            if given.iter().all(|&(v, s)| state[v.0] == s) {
                let k = rest_idx.iter().fold(0, |acc, &i| acc * self.cards[i] + state[i]);
                out[k] += p;
            }
            increment(&mut state, &self.cards);
        }
        let mass: f64 = out.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvent);
        }
        out.iter_mut().for_each(|p| *p /= mass);
        Ok(DiscreteJoint {
            domain: self.domain.restrict(&rest)?,
            cards: rest_cards,
            probs: out,
        })
    }

    /// Conditional mutual information `I(x; y | z)` in bits.
    pub fn conditional_mutual_information(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<f64> {
        for s in [x, y, z] {
            self.domain.check(s)?;
        }
        self.domain.ensure_disjoint(&[("x", x), ("y", y), ("z", z)])?;
        if x.is_empty() || y.is_empty() {
            return Ok(0.0);
        }
        let (xs, ys, zs) = (x.indices(), y.indices(), z.indices());
        let mut vars = xs.clone();
        vars.extend(&ys);
        vars.extend(&zs);
        let cards: Vec<usize> = vars.iter().map(|&i| self.cards[i]).collect();
        let joint = self.marginal_table(&vars);

        let nx = xs.len();
        let ny = ys.len();
        let pos_xz: Vec<usize> = (0..nx).chain(nx + ny..vars.len()).collect();
        let pos_yz: Vec<usize> = (nx..vars.len()).collect();
        let pos_z: Vec<usize> = (nx + ny..vars.len()).collect();
        let p_xz = project(&joint, &cards, &pos_xz);
        let p_yz = project(&joint, &cards, &pos_yz);
        let p_z = project(&joint, &cards, &pos_z);

        let enc = |state: &[usize], pos: &[usize]| pos.iter().fold(0, |acc, &i| acc * cards[i] + state[i]);
        let mut state = vec![0usize; vars.len()];
        let mut cmi = 0.0;
        for &p in &joint {
            if p > 0.0 {
                let a = p_xz[enc(&state, &pos_xz)];
                let b = p_yz[enc(&state, &pos_yz)];
                let c = p_z[enc(&state, &pos_z)];
                cmi += p * ((p * c) / (a * b)).log2();
            }
            increment(&mut state, &cards);
        }
        Ok(cmi.max(0.0))
    }
}

pub(crate) fn table_size(cards: &[usize]) -> Result<usize> {
    cards
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .ok_or(Error::DomainTooLarge {
            size: usize::MAX,
            limit: usize::MAX,
        })
}

/// Advances a mixed-radix counter (last position fastest).
pub(crate) fn increment(state: &mut [usize], cards: &[usize]) {
    for i in (0..state.len()).rev() {
        state[i] += 1;
        if state[i] < cards[i] {
            return;
        }
        state[i] = 0;
    }
}

/// Sums a row-major table down to the positions in `keep` (kept in that order).
pub(crate) fn project(table: &[f64], cards: &[usize], keep: &[usize]) -> Vec<f64> {
    let out_len: usize = keep.iter().map(|&i| cards[i]).product();
    let mut out = vec![0.0; out_len];
    let mut state = vec![0usize; cards.len()];
    for &p in table {
        let k = keep.iter().fold(0, |acc, &i| acc * cards[i] + state[i]);
        out[k] += p;
        increment(&mut state, cards);
    }
    out
}
