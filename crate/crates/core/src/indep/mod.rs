//! The independence-decision contract and its backends.
//!
//! Every backend answers "is `x ⊥ y | z`?" through [`IndependenceTester`].
//! Exact oracles accept set-valued queries; data tests only accept singleton
//! `x` and `y`.

mod data;
mod fisher;
mod gsquared;
mod oracle;

pub use data::{ColumnKind, Dataset};
pub use fisher::FisherZ;
pub use gsquared::GSquared;
pub use oracle::ExactOracle;

use std::fmt;
use std::str::FromStr;

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::exact::{ExactModel, EXACT_ZERO_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct TestDecision {
    pub independent: bool,
    /// Test statistic: |partial correlation| or CMI for oracles, z for
    /// Fisher, G² for the discrete test. `+inf` marks a degenerate sample.
    pub statistic: f64,
    /// Present iff a data test produced the decision.
    pub p_value: Option<f64>,
    pub conditioning_size: usize,
    /// Set when the minimum-sample guard forced an "independent" answer.
    pub low_power: bool,
}

impl TestDecision {
    pub fn dependent(&self) -> bool {
        !self.independent
    }

    /// Strength of association used to rank IAMB candidates.
    pub fn association(&self) -> f64 {
        self.statistic.abs()
    }
}

pub trait IndependenceTester: Send + Sync {
    fn domain(&self) -> &Domain;

    fn decide(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<TestDecision>;

    /// The underlying model when this tester is an exact oracle.
    fn exact_model(&self) -> Option<&ExactModel> {
        None
    }

    fn kind(&self) -> TestKind;

    fn decide_pair(&self, x: VarId, y: VarId, z: &VarSet) -> Result<TestDecision> {
        self.decide(&VarSet::singleton(x), &VarSet::singleton(y), z)
    }
}

impl<T: IndependenceTester + ?Sized> IndependenceTester for &T {
    fn domain(&self) -> &Domain {
        (**self).domain()
    }

    fn decide(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<TestDecision> {
        (**self).decide(x, y, z)
    }

    fn exact_model(&self) -> Option<&ExactModel> {
        (**self).exact_model()
    }

    fn kind(&self) -> TestKind {
        (**self).kind()
    }
}

impl<T: IndependenceTester + ?Sized> IndependenceTester for Box<T> {
    fn domain(&self) -> &Domain {
        (**self).domain()
    }

    fn decide(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<TestDecision> {
        (**self).decide(x, y, z)
    }

    fn exact_model(&self) -> Option<&ExactModel> {
        (**self).exact_model()
    }

    fn kind(&self) -> TestKind {
        (**self).kind()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    Oracle,
    FisherZ,
    GSquared,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Oracle => "oracle",
            TestKind::FisherZ => "fisher-z",
            TestKind::GSquared => "g2",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(TestKind::Oracle),
            "fisher-z" => Ok(TestKind::FisherZ),
            "g2" => Ok(TestKind::GSquared),
            other => Err(Error::InvalidArgument(format!("unknown test kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TesterConfig {
    pub alpha: f64,
    pub oracle_tolerance: f64,
    pub kind: TestKind,
}

impl Default for TesterConfig {
    fn default() -> Self {
        TesterConfig {
            alpha: 0.01,
            oracle_tolerance: EXACT_ZERO_TOL,
            kind: TestKind::Oracle,
        }
    }
}

impl TesterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.oracle_tolerance > 0.0 && self.oracle_tolerance.is_finite()) {
            return Err(Error::InvalidArgument("oracle tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn oracle(&self, model: ExactModel) -> Result<ExactOracle> {
        self.validate()?;
        Ok(ExactOracle::with_tolerance(model, self.oracle_tolerance))
    }

    /// Builds the data test selected by `kind`.
    pub fn data_tester(&self, data: Dataset) -> Result<Box<dyn IndependenceTester>> {
        self.validate()?;
        match self.kind {
            TestKind::FisherZ => Ok(Box::new(FisherZ::new(data, self.alpha)?)),
            TestKind::GSquared => Ok(Box::new(GSquared::new(data, self.alpha)?)),
            TestKind::Oracle => Err(Error::InvalidArgument("the oracle test needs a model, not data".into())),
        }
    }
}

/// Shared query validation: known indices, nonempty `x`/`y`, pairwise disjoint.
pub(crate) fn validate_query(domain: &Domain, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<()> {
    for s in [x, y, z] {
        domain.check(s)?;
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet("independence query side"));
    }
    domain.ensure_disjoint(&[("x", x), ("y", y), ("z", z)])
}
