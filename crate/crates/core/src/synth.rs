//! Ground-truth generators: random DAGs, linear-Gaussian and discrete
//! parameterizations, sampling, and the named fixtures used throughout the
//! test suites.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::exact::{increment, table_size, CgMixture, DiscreteJoint, ExactModel, GaussianModel};
use crate::graph::Dag;
use crate::indep::{ColumnKind, Dataset, ExactOracle, IndependenceTester};
use crate::linalg;
use crate::relevance::{find_relevant_with_context, oracle_relevant, purge_context};

/// Largest joint table [`DiscreteBn::to_joint`] will build.
pub const MAX_JOINT_CELLS: usize = 10_000_000;

/// Range of absolute edge coefficients for random linear-Gaussian models.
pub const COEFFICIENT_RANGE: (f64, f64) = (0.3, 0.9);
/// Range of noise variances for random linear-Gaussian models.
pub const NOISE_RANGE: (f64, f64) = (0.5, 1.5);
/// Smallest cell of every random CPT row.
pub const CPT_FLOOR: f64 = 0.05;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG: shuffle the nodes with the seeded generator, then add each
/// forward edge (earlier to later in the shuffled order) with probability
/// `edge_prob`.
pub fn random_dag(n: usize, edge_prob: f64, seed: u64) -> Result<Dag> {
    random_dag_with(n, edge_prob, &mut rng_from_seed(seed))
}

pub fn random_dag_with<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<Dag> {
    if n == 0 {
        return Err(Error::InvalidArgument("a DAG needs at least one node".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                edges.push((VarId(perm[i]), VarId(perm[j])));
            }
        }
    }
    Dag::new(Domain::numbered(n), &edges)
}

/// `k` distinct nodes out of `n`, drawn uniformly with the seeded generator.
pub fn random_targets(n: usize, k: usize, seed: u64) -> Result<VarSet> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {k} targets from {n} nodes"
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok(rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(VarId)
        .collect())
}

/// Linear structural equation model `X = m + B X + e`, `e ~ N(0, diag(noise))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearGaussianBn {
    dag: Dag,
    coefficients: BTreeMap<(VarId, VarId), f64>,
    noise_variances: Vec<f64>,
    means: Vec<f64>,
}

impl LinearGaussianBn {
    pub fn new(
        dag: Dag,
        coefficients: BTreeMap<(VarId, VarId), f64>,
        noise_variances: Vec<f64>,
        means: Vec<f64>,
    ) -> Result<Self> {
        let n = dag.len();
        if noise_variances.len() != n || means.len() != n {
            return Err(Error::InvalidModel(
                "one noise variance and one mean per node required".into(),
            ));
        }
        if let Some(v) = noise_variances.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidModel(format!("noise variance {v} is not positive")));
        }
        if means.iter().any(|m| !m.is_finite()) || coefficients.values().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        let edges = dag.edges();
        if edges.len() != coefficients.len() || edges.iter().any(|e| !coefficients.contains_key(e)) {
            return Err(Error::InvalidModel("exactly one coefficient per edge required".into()));
        }
        Ok(LinearGaussianBn {
            dag,
            coefficients,
            noise_variances,
            means,
        })
    }

    /// Random parameters on a given DAG: coefficients `±U[0.3, 0.9]`,
    /// noise variances `U[0.5, 1.5]`, zero means.
    pub fn random_params<R: Rng + ?Sized>(dag: Dag, rng: &mut R) -> Self {
        let coefficients = dag
            .edges()
            .into_iter()
            .map(|e| {
                let mag = rng.random_range(COEFFICIENT_RANGE.0..=COEFFICIENT_RANGE.1);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                (e, sign * mag)
            })
            .collect();
        let noise_variances = (0..dag.len())
            .map(|_| rng.random_range(NOISE_RANGE.0..=NOISE_RANGE.1))
            .collect();
        let means = vec![0.0; dag.len()];
        LinearGaussianBn {
            dag,
            coefficients,
            noise_variances,
            means,
        }
    }

    /// Random DAG and parameters from one seeded stream.
    pub fn random(n: usize, edge_prob: f64, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let dag = random_dag_with(n, edge_prob, &mut rng)?;
        Ok(Self::random_params(dag, &mut rng))
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn domain(&self) -> &Domain {
        self.dag.domain()
    }

    pub fn coefficients(&self) -> &BTreeMap<(VarId, VarId), f64> {
        &self.coefficients
    }

    pub fn noise_variances(&self) -> &[f64] {
        &self.noise_variances
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Exact joint: `Σ = (I - B)^-1 Ω (I - B)^-T`, `μ = (I - B)^-1 m`.
    pub fn to_gaussian(&self) -> Result<GaussianModel> {
        let n = self.dag.len();
        let mut i_minus_b = DMatrix::<f64>::identity(n, n);
        for (&(p, c), &w) in &self.coefficients {
            i_minus_b[(c.0, p.0)] -= w;
        }
        let a = i_minus_b
            .try_inverse()
            .ok_or_else(|| Error::InvalidModel("structural matrix is singular".into()))?;
        let omega = DMatrix::from_diagonal(&DVector::from_column_slice(&self.noise_variances));
        let cov = &a * omega * a.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        let mean = &a * DVector::from_column_slice(&self.means);
        GaussianModel::new(self.dag.domain().clone(), mean.iter().copied().collect(), cov)
    }
}

/// Discrete BN with one CPT per node. CPT rows follow the mixed-radix order
/// of the parent configuration (parents in ascending index, first slowest);
/// each row lists the node's state probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteBn {
    dag: Dag,
    cards: Vec<usize>,
    cpts: Vec<Vec<f64>>,
}

impl DiscreteBn {
    pub fn new(dag: Dag, cards: Vec<usize>, cpts: Vec<Vec<f64>>) -> Result<Self> {
        let n = dag.len();
        if cards.len() != n || cpts.len() != n {
            return Err(Error::InvalidModel(
                "one cardinality and one CPT per node required".into(),
            ));
        }
        if cards.contains(&0) {
            return Err(Error::InvalidModel("cardinalities must be positive".into()));
        }
        for v in 0..n {
            let name = dag.domain().name(VarId(v));
            let rows = dag.parents(VarId(v)).iter().map(|p| cards[p.0]).product::<usize>();
            if cpts[v].len() != rows * cards[v] {
                return Err(Error::InvalidModel(format!(
                    "CPT of `{name}` has {} entries, expected {}",
                    cpts[v].len(),
                    rows * cards[v]
                )));
            }
            for row in cpts[v].chunks(cards[v]) {
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidModel(format!("CPT of `{name}` has an invalid entry")));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidModel(format!("a CPT row of `{name}` sums to {s}")));
                }
            }
        }
        Ok(DiscreteBn { dag, cards, cpts })
    }

    /// Random CPTs: normalized i.i.d. exponential draws, then squeezed so
    /// every cell is at least [`CPT_FLOOR`].
    pub fn random_params<R: Rng + ?Sized>(dag: Dag, cards: Vec<usize>, rng: &mut R) -> Result<Self> {
        let mut cpts = Vec::with_capacity(dag.len());
        for v in 0..dag.len() {
            let k = cards[v];
            if k as f64 * CPT_FLOOR >= 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "cardinality {k} too large for the CPT floor"
                )));
            }
            let rows = dag.parents(VarId(v)).iter().map(|p| cards[p.0]).product::<usize>();
            let mut cpt = Vec::with_capacity(rows * k);
            for _ in 0..rows {
                let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = draws.iter().sum();
                let mut row: Vec<f64> = draws
                    .iter()
                    .map(|d| CPT_FLOOR + (1.0 - k as f64 * CPT_FLOOR) * d / total)
                    .collect();
                let residue = 1.0 - row.iter().sum::<f64>();
                row[0] += residue;
                cpt.extend(row);
            }
            cpts.push(cpt);
        }
        DiscreteBn::new(dag, cards, cpts)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn domain(&self) -> &Domain {
        self.dag.domain()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn cpts(&self) -> &[Vec<f64>] {
        &self.cpts
    }

    pub fn cpt_entry(&self, v: VarId, assignment: &[usize]) -> f64 {
        let row = self
            .dag
            .parents(v)
            .iter()
            .fold(0, |acc, p| acc * self.cards[p.0] + assignment[p.0]);
        self.cpts[v.0][row * self.cards[v.0] + assignment[v.0]]
    }

    /// Joint table from the chain-rule factorization.
    pub fn to_joint(&self) -> Result<DiscreteJoint> {
        let size = table_size(&self.cards)?;
        if size > MAX_JOINT_CELLS {
            return Err(Error::DomainTooLarge {
                size,
                limit: MAX_JOINT_CELLS,
            });
        }
        let n = self.dag.len();
        let mut probs = Vec::with_capacity(size);
        let mut state = vec![0usize; n];
        for _ in 0..size {
            probs.push((0..n).map(|v| self.cpt_entry(VarId(v), &state)).product());
            increment(&mut state, &self.cards);
        }
        // floating-point products can drift from an exact unit total
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        DiscreteJoint::new(self.dag.domain().clone(), self.cards.clone(), probs)
    }
}

/// `n` i.i.d. draws via `μ + L z` with `L` the Cholesky factor of the covariance.
pub fn sample_gaussian(model: &GaussianModel, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let p = model.dim();
    let l = linalg::cholesky(model.cov())?.l();
    let mut rng = rng_from_seed(seed);
    let mut columns = vec![Vec::with_capacity(n); p];
    let mut z = DVector::<f64>::zeros(p);
    for _ in 0..n {
        for i in 0..p {
            z[i] = StandardNormal.sample(&mut rng);
        }
        let x = &l * &z + model.mean();
        for i in 0..p {
            columns[i].push(x[i]);
        }
    }
    Dataset::new(model.domain().clone(), vec![ColumnKind::Continuous; p], columns)
}

/// `n` i.i.d. draws by inverse-CDF lookup over the flat table.
pub fn sample_discrete(model: &DiscreteJoint, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let cards = model.cardinalities();
    let mut cdf = Vec::with_capacity(model.probs().len());
    let mut acc = 0.0;
    for p in model.probs() {
        acc += p;
        cdf.push(acc);
    }
    let last_positive = model.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = rng_from_seed(seed);
    let mut columns = vec![Vec::with_capacity(n); cards.len()];
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let mut cell = cdf.partition_point(|&c| c <= u).min(last_positive);
        for i in (0..cards.len()).rev() {
            columns[i].push((cell % cards[i]) as f64);
            cell /= cards[i];
        }
    }
    let kinds = cards
        .iter()
        .map(|&c| ColumnKind::Categorical { cardinality: c })
        .collect();
    Dataset::new(model.domain().clone(), kinds, columns)
}

pub fn sample(model: &ExactModel, n: usize, seed: u64) -> Result<Dataset> {
    match model {
        ExactModel::Gaussian(m) => sample_gaussian(m, n, seed),
        ExactModel::Discrete(m) => sample_discrete(m, n, seed),
        ExactModel::Mixture(_) => Err(Error::InvalidArgument("sampling mixtures is not supported".into())),
    }
}

/// Singleton queries `(x, y, z)` with `|z| ≤ max_cond` where d-separation in
/// `dag` and a vanishing partial correlation in `model` disagree.
pub fn faithfulness_violations(
    dag: &Dag,
    model: &GaussianModel,
    max_cond: usize,
    tol: f64,
) -> Result<Vec<(VarId, VarId, VarSet)>> {
    let n = dag.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = (VarId(a), VarId(b));
            let rest = dag.domain().all().without(x).without(y);
            for z in rest.subsets_up_to(max_cond) {
                let sep = dag.d_separated(&VarSet::singleton(x), &VarSet::singleton(y), &z)?;
                let zero = model.partial_correlation(x, y, &z)?.abs() < tol;
                if sep != zero {
                    out.push((x, y, z));
                }
            }
        }
    }
    Ok(out)
}

/// Selection-bias fixture: `I → C1`, `I → C2`, `C1 → S ← C2`, `T → S`,
/// variables ordered `C1, C2, I, S, T`, and its distribution given `S = 0`.
#[derive(Clone, Debug)]
pub struct SelectionExample {
    pub bn: LinearGaussianBn,
    pub joint: GaussianModel,
    /// The joint conditioned on `S = 0`, over `C1, C2, I, T`.
    pub conditioned: GaussianModel,
}

pub const SELECTION_VALUE: f64 = 0.0;

pub fn selection_model() -> Result<SelectionExample> {
    let domain = Domain::new(["C1", "C2", "I", "S", "T"])?;
    let (c1, c2, i, s, t) = (VarId(0), VarId(1), VarId(2), VarId(3), VarId(4));
    let coefs = [
        ((i, c1), 0.8),
        ((i, c2), 0.7),
        ((c1, s), 0.6),
        ((c2, s), 0.5),
        ((t, s), 0.9),
    ];
    let edges: Vec<_> = coefs.iter().map(|(e, _)| *e).collect();
    let dag = Dag::new(domain, &edges)?;
    let bn = LinearGaussianBn::new(dag, coefs.into_iter().collect(), vec![1.0; 5], vec![0.0; 5])?;
    let joint = bn.to_gaussian()?;
    let conditioned = joint.condition(&[(s, SELECTION_VALUE)])?;
    let fig = SelectionExample { bn, joint, conditioned };
    fig.self_check()?;
    Ok(fig)
}

impl SelectionExample {
    /// Verifies the selection-bias outcomes on the conditioned model with
    /// both the frontier search and the exhaustive oracle.
    pub fn self_check(&self) -> Result<()> {
        let o = ExactOracle::new(self.conditioned.clone());
        let d = o.domain();
        let id = |n: &str| d.id(n).expect("fixture variable");
        let set = |names: &[&str]| names.iter().map(|n| id(n)).collect::<VarSet>();
        let t = set(&["T"]);
        let expectations: [(&[&str], &[&str]); 4] = [
            (&["C1", "C2"], &[]),
            (&["C2"], &["C1", "I"]),
            (&["C1"], &["C2", "I"]),
            (&[], &["C1", "C2", "I"]),
        ];
        for (ctx, want) in expectations {
            let ctx = set(ctx);
            let want = set(want);
            let fast = find_relevant_with_context(&o, &t, &ctx)?.relevant;
            let slow = oracle_relevant(&o, &t, &ctx)?.relevant;
            if fast != want || slow != want {
                return Err(Error::SelfCheck(format!(
                    "R({}) expected {}, frontier search gave {}, oracle gave {}",
                    d.set_names(&ctx).join(","),
                    d.set_names(&want).join(","),
                    d.set_names(&fast).join(","),
                    d.set_names(&slow).join(",")
                )));
            }
        }
        let purged = purge_context(&o, &t, &set(&["C1", "C2"]))?;
        if !purged.audit.is_empty() {
            return Err(Error::SelfCheck("purging {C1, C2} removed a node".into()));
        }
        Ok(())
    }
}

/// Four binary nodes, `Z` child of `X`, `Y`, `W` with uniform roots,
/// `Z = XOR(X, Y)` when `W = 0` and `Z = OR(X, Y)` when `W = 1`.
/// Variable order: `X, Y, Z, W`.
pub fn xor_or_model() -> DiscreteBn {
    let domain = Domain::new(["X", "Y", "Z", "W"]).expect("fixed names");
    let (x, y, z, w) = (VarId(0), VarId(1), VarId(2), VarId(3));
    let dag = Dag::new(domain, &[(x, z), (y, z), (w, z)]).expect("acyclic");
    let uniform = vec![0.5, 0.5];
    // parent configuration order: X slowest, then Y, then W
    let mut z_cpt = Vec::with_capacity(16);
    for xv in 0..2u8 {
        for yv in 0..2u8 {
            for wv in 0..2u8 {
                let on = if wv == 0 { xv ^ yv } else { xv | yv };
                z_cpt.extend(if on == 1 { [0.0, 1.0] } else { [1.0, 0.0] });
            }
        }
    }
    DiscreteBn::new(dag, vec![2; 4], vec![uniform.clone(), uniform.clone(), z_cpt, uniform]).expect("valid CPTs")
}

/// Two continuous variables `X`, `Y` and a binary selector `Z`. Both
/// components have zero means and unit variances; the correlation is `+0.5`
/// in one and `-0.5` in the other; equal weights.
pub fn cg_counterexample() -> CgMixture {
    let domain = Domain::new(["X", "Y"]).expect("fixed names");
    let comp = |rho: f64| GaussianModel::from_rows(domain.clone(), vec![0.0, 0.0], &[1.0, rho, rho, 1.0]).expect("PD");
    CgMixture::new("Z", vec![comp(0.5), comp(-0.5)], vec![0.5, 0.5]).expect("valid mixture")
}
