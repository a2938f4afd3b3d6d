use super::{validate_query, IndependenceTester, TestDecision, TestKind};
use crate::domain::{Domain, VarSet};
use crate::error::Result;
use crate::exact::{ExactModel, EXACT_ZERO_TOL};

/// Decides independence by reading it off an exact model.
#[derive(Clone, Debug)]
pub struct ExactOracle {
    model: ExactModel,
    tolerance: f64,
}

impl ExactOracle {
    pub fn new(model: impl Into<ExactModel>) -> Self {
        Self::with_tolerance(model, EXACT_ZERO_TOL)
    }

    pub fn with_tolerance(model: impl Into<ExactModel>, tolerance: f64) -> Self {
        ExactOracle {
            model: model.into(),
            tolerance,
        }
    }

    pub fn model(&self) -> &ExactModel {
        &self.model
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

impl IndependenceTester for ExactOracle {
    fn domain(&self) -> &Domain {
        self.model.domain()
    }

    fn decide(&self, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<TestDecision> {
        validate_query(self.domain(), x, y, z)?;
        // one canonical orientation so swapped queries are bit-identical
        let (a, b) = if y < x { (y, x) } else { (x, y) };
        let dep = self.model.dependence(a, b, z)?;
        Ok(TestDecision {
            independent: dep < self.tolerance,
            statistic: dep,
            p_value: None,
            conditioning_size: z.len(),
            low_power: false,
        })
    }

    fn exact_model(&self) -> Option<&ExactModel> {
        Some(&self.model)
    }

    fn kind(&self) -> TestKind {
        TestKind::Oracle
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::VarId;
    use crate::exact::{DiscreteJoint, GaussianModel};
    use crate::Error;

    #[test]
    fn diagonal_gaussian_is_fully_independent() {
        let d = crate::Domain::numbered(3);
        let m = GaussianModel::from_rows(d, vec![0.0; 3], &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let o = ExactOracle::new(m);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let r = o.decide_pair(VarId(a), VarId(b), &VarSet::empty()).unwrap();
            assert!(r.independent);
            assert!(r.p_value.is_none());
        }
    }

    #[test]
    fn xor_slice_set_query_is_dependent() {
        let mut probs = vec![0.0; 8];
        for x in 0..2 {
            for y in 0..2 {
                probs[x * 4 + y * 2 + (x ^ y)] = 0.25;
            }
        }
        let d = DiscreteJoint::new(crate::Domain::new(["X", "Y", "Z"]).unwrap(), vec![2, 2, 2], probs).unwrap();
        let o = ExactOracle::new(d);
        let r = o
            .decide(
                &VarSet::from_indices([0, 1]),
                &VarSet::from_indices([2]),
                &VarSet::empty(),
            )
            .unwrap();
        assert!(r.dependent());
        assert!(o.decide_pair(VarId(0), VarId(2), &VarSet::empty()).unwrap().independent);
    }

    #[test]
    fn rejects_overlap_and_empty_sides() {
        let o = ExactOracle::new(
            GaussianModel::from_rows(crate::Domain::numbered(2), vec![0.0; 2], &[1.0, 0.0, 0.0, 1.0]).unwrap(),
        );
        let a = VarSet::from_indices([0]);
        assert!(matches!(o.decide(&a, &a, &VarSet::empty()), Err(Error::Overlap(_))));
        assert!(o.decide(&a, &VarSet::empty(), &VarSet::empty()).is_err());
    }
}
