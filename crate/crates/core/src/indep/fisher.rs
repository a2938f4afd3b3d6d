use dashmap::DashMap;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{validate_query, Dataset, IndependenceTester, TestDecision, TestKind};
use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::linalg;

type PairKey = (VarId, VarId, VarSet);

/// Fisher's z test on the sample partial correlation.
///
/// `r` is obtained by inverting the sample covariance of `{x, y} ∪ z`, the
/// same routine the exact Gaussian oracle uses. The statistic is
/// `sqrt(n - |z| - 3) * atanh(r)` and the pair is declared independent when
/// `|z_stat|` does not exceed the two-sided normal quantile at `alpha`.
pub struct FisherZ {
    data: Dataset,
    alpha: f64,
    critical: f64,
    cache: DashMap<PairKey, TestDecision>,
}

impl FisherZ {
    pub fn new(data: Dataset, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if let Some(i) = data.kinds().iter().position(|k| k.is_categorical()) {
            return Err(Error::InvalidData(format!(
                "Fisher's z needs continuous columns; `{}` is categorical",
                data.domain().names()[i]
            )));
        }
        let critical = std_normal().inverse_cdf(1.0 - alpha / 2.0);
        Ok(FisherZ {
            data,
            alpha,
            critical,
            cache: DashMap::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn critical_value(&self) -> f64 {
        self.critical
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    fn compute(&self, x: VarId, y: VarId, z: &VarSet) -> TestDecision {
        let n = self.data.n_rows() as f64;
        let dof = n - z.len() as f64 - 3.0;
        if dof < 1.0 {
            return TestDecision {
                independent: true,
                statistic: 0.0,
                p_value: Some(1.0),
                conditioning_size: z.len(),
                low_power: true,
            };
        }
        let mut idx = vec![x.0, y.0];
        idx.extend(z.indices());
        let cov = self.data.sample_covariance(&idx);
        let zi: Vec<usize> = (2..idx.len()).collect();
        let statistic = match linalg::partial_correlation(&cov, 0, 1, &zi) {
            Ok(r) if r.abs() < 1.0 - PERFECT_CORRELATION_GAP => dof.sqrt() * r.atanh(),
            Ok(r) => f64::INFINITY.copysign(r),
            // a singular sample covariance means an exact linear relation
            Err(_) => f64::INFINITY,
        };
        fisher_decision(statistic, self.critical, z.len())
    }
}

/// Sample correlations this close to ±1 are rounding noise around an exact
/// linear relation.
const PERFECT_CORRELATION_GAP: f64 = 1e-12;

pub(crate) fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

fn fisher_decision(statistic: f64, critical: f64, conditioning_size: usize) -> TestDecision {
    let p_value = if statistic.is_finite() {
        (2.0 * std_normal().cdf(-statistic.abs())).min(1.0)
    } else {
        0.0
    };
    TestDecision {
        independent: statistic.abs() <= critical,
        statistic,
        p_value: Some(p_value),
        conditioning_size,
        low_power: false,
    }
}

impl IndependenceTester for FisherZ {
    fn domain(&self) -> &Domain {
        self.data.domain()
    }

    fn decide(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<TestDecision> {
        validate_query(self.domain(), x, y, z)?;
        if x.len() != 1 || y.len() != 1 {
            return Err(Error::SetValuedDataQuery(x.len(), y.len()));
        }
        let (a, b) = (x.as_slice()[0], y.as_slice()[0]);
        let key = (a.min(b), a.max(b), z.clone());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let d = self.compute(key.0, key.1, z);
        Ok(self.cache.entry(key).or_insert(d).clone())
    }

    fn kind(&self) -> TestKind {
        TestKind::FisherZ
    }
}
