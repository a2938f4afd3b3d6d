//! Exact probability models: the ground truth behind every oracle.

mod discrete;
mod gaussian;
mod mixture;

pub use discrete::DiscreteJoint;
pub use gaussian::GaussianModel;
pub use mixture::CgMixture;

pub(crate) use discrete::{increment, table_size};

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};

/// Dependence scores below this are treated as exact independence:
/// partial correlations for Gaussian models, bits of conditional mutual
/// information for discrete tables, moment gaps for mixtures.
pub const EXACT_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum ExactModel {
    Gaussian(GaussianModel),
    Discrete(DiscreteJoint),
    Mixture(CgMixture),
}

impl ExactModel {
    pub fn domain(&self) -> &Domain {
        match self {
            ExactModel::Gaussian(m) => m.domain(),
            ExactModel::Discrete(m) => m.domain(),
            ExactModel::Mixture(m) => m.domain(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExactModel::Gaussian(_) => "gaussian",
            ExactModel::Discrete(_) => "discrete-joint",
            ExactModel::Mixture(_) => "cg-mixture",
        }
    }

    /// Non-negative score that is zero exactly when `x ⊥ y | z`.
    pub fn dependence(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<f64> {
        match self {
            ExactModel::Gaussian(m) => {
                m.domain().ensure_disjoint(&[("x", x), ("y", y), ("z", z)])?;
                if x.is_empty() || y.is_empty() {
                    return Ok(0.0);
                }
                m.block_dependence(x, y, z)
            }
            ExactModel::Discrete(m) => m.conditional_mutual_information(x, y, z),
            ExactModel::Mixture(m) => m.dependence(x, y, z),
        }
    }

    pub fn independent(&self, x: &VarSet, y: &VarSet, z: &VarSet, tol: f64) -> Result<bool> {
        Ok(self.dependence(x, y, z)? < tol)
    }

    /// Gaussian models are always strictly positive; tables are checked cell by cell.
    pub fn is_strictly_positive(&self) -> bool {
        match self {
            ExactModel::Gaussian(_) => true,
            ExactModel::Discrete(m) => m.is_strictly_positive(),
            ExactModel::Mixture(_) => true,
        }
    }

    pub fn marginalize(&self, keep: &VarSet) -> Result<ExactModel> {
        match self {
            ExactModel::Gaussian(m) => m.marginalize(keep).map(ExactModel::Gaussian),
            ExactModel::Discrete(m) => m.marginalize(keep).map(ExactModel::Discrete),
            ExactModel::Mixture(_) => Err(Error::InvalidArgument(
                "marginalizing a conditional-Gaussian mixture is not supported".into(),
            )),
        }
    }

    /// Conditions on observed values; discrete states must be whole numbers.
    pub fn condition(&self, given: &[(VarId, f64)]) -> Result<ExactModel> {
        match self {
            ExactModel::Gaussian(m) => m.condition(given).map(ExactModel::Gaussian),
            ExactModel::Discrete(m) => {
                let states = given
                    .iter()
                    .map(|&(v, x)| {
                        if x >= 0.0 && x.fract() == 0.0 && x.is_finite() {
                            Ok((v, x as usize))
                        } else {
                            Err(Error::InvalidArgument(format!("`{x}` is not a discrete state")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                m.condition(&states).map(ExactModel::Discrete)
            }
            ExactModel::Mixture(_) => Err(Error::InvalidArgument(
                "conditioning a conditional-Gaussian mixture is not supported".into(),
            )),
        }
    }

    /// Drops `hidden`, returning the marginal over the remaining variables.
    pub fn hide(&self, hidden: &VarSet) -> Result<ExactModel> {
        if hidden.is_empty() {
            return Ok(self.clone());
        }
        self.domain().check(hidden)?;
        self.marginalize(&self.domain().all().difference(hidden))
    }
}

impl From<GaussianModel> for ExactModel {
    fn from(m: GaussianModel) -> Self {
        ExactModel::Gaussian(m)
    }
}

impl From<DiscreteJoint> for ExactModel {
    fn from(m: DiscreteJoint) -> Self {
        ExactModel::Discrete(m)
    }
}

impl From<CgMixture> for ExactModel {
    fn from(m: CgMixture) -> Self {
        ExactModel::Mixture(m)
    }
}
