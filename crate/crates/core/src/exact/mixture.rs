use nalgebra::DMatrix;

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::exact::GaussianModel;
use crate::linalg;

/// Conditional-Gaussian mixture: one discrete selector whose states index
/// Gaussian components over a shared continuous sub-domain.
///
/// The full domain is the continuous variables followed by the selector.
/// Only queries that either condition on the selector or place it on one side
/// are decidable exactly; everything else is reported as unsupported.
#[derive(Clone, Debug)]
pub struct CgMixture {
    domain: Domain,
    selector: VarId,
    components: Vec<GaussianModel>,
    weights: Vec<f64>,
}

impl CgMixture {
    pub fn new(selector_name: &str, components: Vec<GaussianModel>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("mixture needs at least one component".into()));
        }
        if components.len() != weights.len() {
            return Err(Error::InvalidModel(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidModel("mixture weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("mixture weights sum to {total}, not 1")));
        }
        let cont = components[0].domain().clone();
        if components.iter().any(|c| c.domain() != &cont) {
            return Err(Error::InvalidModel("mixture components must share one domain".into()));
        }
        let mut names: Vec<String> = cont.names().to_vec();
        names.push(selector_name.to_string());
        let domain = Domain::new(names)?;
        Ok(CgMixture {
            selector: VarId(cont.len()),
            domain,
            components,
            weights,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn selector(&self) -> VarId {
        self.selector
    }

    pub fn components(&self) -> &[GaussianModel] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn active(&self) -> impl Iterator<Item = &GaussianModel> {
        self.components
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(c, _)| c)
    }

    /// Non-negative score that is zero exactly when `x ⊥ y | z`.
    pub fn dependence(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<f64> {
        for s in [x, y, z] {
            self.domain.check(s)?;
        }
        self.domain.ensure_disjoint(&[("x", x), ("y", y), ("z", z)])?;
        if x.is_empty() || y.is_empty() {
            return Ok(0.0);
        }
        let sel = self.selector;
        if z.contains(sel) {
            // every component is a Gaussian given the selector
            let zc = z.without(sel);
            let mut worst = 0.0f64;
            for c in self.active() {
                worst = worst.max(c.block_dependence(x, y, &zc)?);
            }
            return Ok(worst);
        }
        let (a, b) = if y.contains(sel) {
            (x, y)
        } else if x.contains(sel) {
            (y, x)
        } else {
            return Err(Error::UnsupportedQuery(format!(
                "{x} vs {y} given {z}: the selector is neither conditioned on nor queried"
            )));
        };
        // a ⊥ {sel} ∪ b' | z  ⇔  a ⊥ sel | z  ∧  a ⊥ b' | z ∪ {sel}
        let mut score = self.selector_moment_gap(a, z)?;
        let rest = b.without(sel);
        if !rest.is_empty() {
            for c in self.active() {
                score = score.max(c.block_dependence(a, &rest, z)?);
            }
        }
        Ok(score)
    }

    /// Largest difference across components in the conditional law of `a`
    /// given the continuous set `z` (regression coefficients, intercept and
    /// residual covariance). Zero iff `a ⊥ selector | z`.
    fn selector_moment_gap(&self, a: &VarSet, z: &VarSet) -> Result<f64> {
        let ai = a.indices();
        let zi = z.indices();
        let laws: Vec<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> = self
            .active()
            .map(|c| conditional_law(c, &ai, &zi))
            .collect::<Result<_>>()?;
        let (b0, c0, s0) = &laws[0];
        let mut gap = 0.0f64;
        for (b, c, s) in &laws[1..] {
            gap = gap.max((b - b0).amax());
            gap = gap.max(c.iter().zip(c0).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max));
            gap = gap.max((s - s0).amax());
        }
        Ok(gap)
    }
}

fn conditional_law(c: &GaussianModel, a: &[usize], z: &[usize]) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let mean_a = linalg::select_vec(c.mean(), a);
    if z.is_empty() {
        return Ok((
            DMatrix::zeros(a.len(), 0),
            mean_a.iter().copied().collect(),
            linalg::select(c.cov(), a, a),
        ));
    }
    let szz = linalg::select(c.cov(), z, z);
    let sza = linalg::select(c.cov(), z, a);
    let coef = linalg::cholesky(&szz)?.solve(&sza).transpose();
    let intercept = mean_a - &coef * linalg::select_vec(c.mean(), z);
    let resid = linalg::schur_complement(c.cov(), a, z)?;
    Ok((coef, intercept.iter().copied().collect(), resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(m: [f64; 2], rho: f64) -> GaussianModel {
        GaussianModel::from_rows(Domain::new(["X", "Y"]).unwrap(), m.to_vec(), &[1.0, rho, rho, 1.0]).unwrap()
    }

    fn s(i: &[usize]) -> VarSet {
        VarSet::from_indices(i.iter().copied())
    }

    #[test]
    fn identical_components_are_independent_of_selector() {
        let m = CgMixture::new("Z", vec![comp([0.0, 0.0], 0.3), comp([0.0, 0.0], 0.3)], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.dependence(&s(&[0, 1]), &s(&[2]), &s(&[])).unwrap(), 0.0);
        assert_eq!(m.dependence(&s(&[2]), &s(&[0]), &s(&[1])).unwrap(), 0.0);
    }

    #[test]
    fn off_diagonal_only_difference() {
        let m = CgMixture::new("Z", vec![comp([0.0, 0.0], 0.5), comp([0.0, 0.0], -0.5)], vec![0.5, 0.5]).unwrap();
        let e = s(&[]);
        assert!(m.dependence(&s(&[0]), &s(&[2]), &e).unwrap() < 1e-12);
        assert!(m.dependence(&s(&[1]), &s(&[2]), &e).unwrap() < 1e-12);
        assert!((m.dependence(&s(&[0, 1]), &s(&[2]), &e).unwrap() - 1.0).abs() < 1e-12);
        // X and Y dependent within each component
        assert!(m.dependence(&s(&[0]), &s(&[1]), &s(&[2])).unwrap() > 0.4);
        // X given Y differs in slope across components
        assert!(m.dependence(&s(&[0]), &s(&[2]), &s(&[1])).unwrap() > 0.9);
    }

    #[test]
    fn mean_shift_is_dependence() {
        let m = CgMixture::new("Z", vec![comp([0.0, 0.0], 0.0), comp([1.0, 0.0], 0.0)], vec![0.5, 0.5]).unwrap();
        assert!(m.dependence(&s(&[0]), &s(&[2]), &s(&[])).unwrap() > 0.5);
        assert_eq!(m.dependence(&s(&[1]), &s(&[2]), &s(&[])).unwrap(), 0.0);
    }

    #[test]
    fn zero_weight_components_ignored() {
        let m = CgMixture::new("Z", vec![comp([0.0, 0.0], 0.0), comp([1.0, 0.0], 0.0)], vec![1.0, 0.0]).unwrap();
        assert_eq!(m.dependence(&s(&[0]), &s(&[2]), &s(&[])).unwrap(), 0.0);
    }

    #[test]
    fn marginal_continuous_query_unsupported() {
        let m = CgMixture::new("Z", vec![comp([0.0, 0.0], 0.5), comp([0.0, 0.0], -0.5)], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            m.dependence(&s(&[0]), &s(&[1]), &s(&[])),
            Err(Error::UnsupportedQuery(_))
        ));
        assert!(m.dependence(&s(&[0]), &s(&[0, 2]), &s(&[])).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(CgMixture::new("Z", vec![comp([0.0, 0.0], 0.0)], vec![0.5]).is_err());
        assert!(CgMixture::new("X", vec![comp([0.0, 0.0], 0.0)], vec![1.0]).is_err());
        assert!(CgMixture::new("Z", vec![], vec![]).is_err());
    }
}
