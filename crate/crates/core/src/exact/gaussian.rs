use nalgebra::{DMatrix, DVector};

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::linalg;

const SYMMETRY_TOL: f64 = 1e-10;

/// Exact multivariate normal over named variables.
///
/// The covariance is checked to be symmetric and positive definite at
/// construction, so every later query can rely on invertible sub-blocks.
#[derive(Clone, Debug)]
pub struct GaussianModel {
    domain: Domain,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianModel {
    pub fn new(domain: Domain, mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = domain.len();
        if n == 0 {
            return Err(Error::InvalidModel("gaussian model needs at least one variable".into()));
        }
        if mean.len() != n || cov.nrows() != n || cov.ncols() != n {
            return Err(Error::InvalidModel(format!(
                "dimension mismatch: {n} variables, mean of length {}, covariance {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidModel("non-finite mean".into()));
        }
        if !linalg::is_symmetric(&cov, SYMMETRY_TOL) {
            return Err(Error::InvalidModel("covariance is not symmetric".into()));
        }
        linalg::cholesky(&cov)?;
        Ok(GaussianModel {
            domain,
            mean: DVector::from_vec(mean),
            cov,
        })
    }

    /// Convenience constructor from a row-major covariance slice.
    pub fn from_rows(domain: Domain, mean: Vec<f64>, cov_rows: &[f64]) -> Result<Self> {
        let n = domain.len();
        if cov_rows.len() != n * n {
            return Err(Error::InvalidModel(format!(
                "covariance has {} entries, expected {}",
                cov_rows.len(),
                n * n
            )));
        }
        Self::new(domain, mean, DMatrix::from_row_slice(n, n, cov_rows))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn marginalize(&self, keep: &VarSet) -> Result<GaussianModel> {
        if keep.is_empty() {
            return Err(Error::EmptySet("marginalization keep set"));
        }
        let domain = self.domain.restrict(keep)?;
        let idx = keep.indices();
        Ok(GaussianModel {
            domain,
            mean: linalg::select_vec(&self.mean, &idx),
            cov: linalg::select(&self.cov, &idx, &idx),
        })
    }

    /// Conditions on `given` (variable, observed value) pairs.
    pub fn condition(&self, given: &[(VarId, f64)]) -> Result<GaussianModel> {
        let cond: VarSet = given.iter().map(|(v, _)| *v).collect();
        if cond.len() != given.len() {
            return Err(Error::InvalidArgument("variable conditioned twice".into()));
        }
        self.domain.check(&cond)?;
        if cond.is_empty() {
            return Ok(self.clone());
        }
        if cond.len() == self.dim() {
            return Err(Error::ConditionOnAll);
        }
        let rest = self.domain.all().difference(&cond);
        let a = rest.indices();
        // order the observed values like the sorted conditioning set
        let mut obs: Vec<(VarId, f64)> = given.to_vec();
        obs.sort_by_key(|(v, _)| *v);
        let b: Vec<usize> = obs.iter().map(|(v, _)| v.0).collect();
        let w = DVector::from_iterator(b.len(), obs.iter().map(|(_, x)| *x));

        let sbb = linalg::select(&self.cov, &b, &b);
        let sba = linalg::select(&self.cov, &b, &a);
        let chol = linalg::cholesky(&sbb)?;
        let shift = chol.solve(&(w - linalg::select_vec(&self.mean, &b)));
        let mean = linalg::select_vec(&self.mean, &a) + sba.transpose() * shift;
        let cov = linalg::select(&self.cov, &a, &a) - sba.transpose() * chol.solve(&sba);
        let cov = (&cov + cov.transpose()) * 0.5;
        GaussianModel::new(self.domain.restrict(&rest)?, mean.iter().copied().collect(), cov)
    }

    pub fn partial_correlation(&self, x: VarId, y: VarId, z: &VarSet) -> Result<f64> {
        if x == y {
            return Err(Error::Overlap("x and y are the same variable".into()));
        }
        if z.contains(x) || z.contains(y) {
            return Err(Error::Overlap("conditioning set contains x or y".into()));
        }
        self.domain.check(&VarSet::from_iter([x, y]))?;
        self.domain.check(z)?;
        linalg::partial_correlation(&self.cov, x.0, y.0, &z.indices())
    }

    /// Largest absolute partial correlation between members of `x` and `y`
    /// given `z`; zero iff `x ⊥ y | z`.
    pub fn block_dependence(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<f64> {
        for s in [x, y, z] {
            self.domain.check(s)?;
        }
        linalg::max_block_partial_correlation(&self.cov, &x.indices(), &y.indices(), &z.indices())
    }

    /// Smallest eigenvalue of the covariance.
    pub fn min_eigenvalue(&self) -> f64 {
        self.cov.clone().symmetric_eigenvalues().min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn chain() -> GaussianModel {
        // A -> B -> C, unit coefficients and unit noise:
        // Var = (1, 2, 3), Cov(A,B) = 1, Cov(A,C) = 1, Cov(B,C) = 2
        GaussianModel::from_rows(
            Domain::new(["A", "B", "C"]).unwrap(),
            vec![0.0; 3],
            &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 2.0, 3.0],
        )
        .unwrap()
    }

    fn collider() -> GaussianModel {
        // C1 -> S <- T with S = C1 + T + e, unit variances
        GaussianModel::from_rows(
            Domain::new(["C1", "S", "T"]).unwrap(),
            vec![0.0; 3],
            &[1.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let d = Domain::new(["a", "b"]).unwrap();
        assert!(GaussianModel::from_rows(d.clone(), vec![0.0; 2], &[1.0, 0.5, 0.4, 1.0]).is_err());
        assert!(matches!(
            GaussianModel::from_rows(d, vec![0.0; 2], &[1.0, 2.0, 2.0, 1.0]),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn marginalize_diagonal_keeps_block() {
        let m = GaussianModel::from_rows(
            Domain::new(["a", "b", "c"]).unwrap(),
            vec![1.0, 2.0, 3.0],
            &[2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0],
        )
        .unwrap();
        let k = m.marginalize(&VarSet::from_indices([0, 2])).unwrap();
        assert_eq!(k.domain().names(), &["a", "c"]);
        assert_eq!(k.cov(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]));
        assert_eq!(k.mean().as_slice(), &[1.0, 3.0]);
        assert!(matches!(m.marginalize(&VarSet::empty()), Err(Error::EmptySet(_))));
        assert!(m.marginalize(&VarSet::from_indices([7])).is_err());
    }

    #[test]
    fn marginalize_full_is_identity() {
        let m = chain();
        let k = m.marginalize(&m.domain().all()).unwrap();
        assert_eq!(k.cov(), m.cov());
        assert_eq!(k.domain(), m.domain());
    }

    #[test]
    fn hiding_chain_middle_keeps_dependence() {
        let m = chain().marginalize(&VarSet::from_indices([0, 2])).unwrap();
        assert_abs_diff_eq!(m.cov()[(0, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn condition_on_independent_variable_leaves_block() {
        let m = GaussianModel::from_rows(
            Domain::new(["a", "b", "c"]).unwrap(),
            vec![0.0; 3],
            &[2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 4.0],
        )
        .unwrap();
        let c = m.condition(&[(VarId(2), 1.7)]).unwrap();
        assert_eq!(c.cov(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]));
        assert_eq!(c.mean().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn conditioning_on_collider_couples_parents() {
        let c = collider().condition(&[(VarId(1), 0.0)]).unwrap();
        // Schur complement: [[1,0],[0,1]] - [1,1]^T [1,1] / 3
        assert_abs_diff_eq!(c.cov()[(0, 1)], -1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.cov()[(0, 0)], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn condition_shifts_mean() {
        // Var(a)=1, Var(b)=2, Cov=1 → E[a | b=4] = 0 + 1/2 * 4 = 2
        let m =
            GaussianModel::from_rows(Domain::new(["a", "b"]).unwrap(), vec![0.0, 0.0], &[1.0, 1.0, 1.0, 2.0]).unwrap();
        let c = m.condition(&[(VarId(1), 4.0)]).unwrap();
        assert_abs_diff_eq!(c.mean()[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.cov()[(0, 0)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn condition_errors() {
        let m = chain();
        assert!(matches!(
            m.condition(&[(VarId(0), 0.0), (VarId(1), 0.0), (VarId(2), 0.0)]),
            Err(Error::ConditionOnAll)
        ));
        assert!(m.condition(&[(VarId(0), 0.0), (VarId(0), 1.0)]).is_err());
    }

    #[test]
    fn partial_correlations() {
        let m = chain();
        // Pearson: 1 / sqrt(1*3)
        assert_abs_diff_eq!(
            m.partial_correlation(VarId(0), VarId(2), &VarSet::empty()).unwrap(),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-14
        );
        assert!(
            m.partial_correlation(VarId(0), VarId(2), &VarSet::from_indices([1]))
                .unwrap()
                .abs()
                < 1e-12
        );

        let c = collider();
        assert_eq!(
            c.partial_correlation(VarId(0), VarId(2), &VarSet::empty()).unwrap(),
            0.0
        );
        // -1/3 / (2/3) = -0.5
        assert_abs_diff_eq!(
            c.partial_correlation(VarId(0), VarId(2), &VarSet::from_indices([1]))
                .unwrap(),
            -0.5,
            epsilon = 1e-12
        );
        assert!(c.partial_correlation(VarId(0), VarId(0), &VarSet::empty()).is_err());
        assert!(c
            .partial_correlation(VarId(0), VarId(2), &VarSet::from_indices([0]))
            .is_err());
    }
}
