use std::collections::BTreeMap;

use dashmap::DashMap;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{validate_query, ColumnKind, Dataset, IndependenceTester, TestDecision, TestKind};
use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};

type PairKey = (VarId, VarId, VarSet);

/// Likelihood-ratio (G²) test of conditional independence for categorical data.
///
/// `G² = 2 Σ n_xyz ln(n_xyz n_z / (n_xz n_yz))`, i.e. `2n` times the
/// empirical conditional mutual information in nats. Degrees of freedom are
/// counted per observed stratum of `z` as `(r_x - 1)(r_y - 1)`, where `r_x`
/// and `r_y` only count categories seen in that stratum; strata and
/// categories with all-zero counts contribute nothing.
pub struct GSquared {
    data: Dataset,
    alpha: f64,
    cards: Vec<usize>,
    cache: DashMap<PairKey, TestDecision>,
}

/// Fewer than this many rows per degree of freedom trips the sample guard.
pub const MIN_ROWS_PER_DOF: f64 = 5.0;

impl GSquared {
    pub fn new(data: Dataset, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let cards = data
            .kinds()
            .iter()
            .enumerate()
            .map(|(i, k)| match k {
                ColumnKind::Categorical { cardinality } => Ok(*cardinality),
                ColumnKind::Continuous => Err(Error::InvalidData(format!(
                    "the G² test needs categorical columns; `{}` is continuous",
                    data.domain().names()[i]
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GSquared {
            data,
            alpha,
            cards,
            cache: DashMap::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn compute(&self, x: VarId, y: VarId, z: &VarSet) -> TestDecision {
        let cx = self.cards[x.0];
        let cy = self.cards[y.0];
        let xs = self.data.column(x);
        let ys = self.data.column(y);
        let zcols: Vec<&[f64]> = z.iter().map(|v| self.data.column(v)).collect();
        let n = self.data.n_rows();

        // stratum key -> cx*cy table of counts
        let mut strata: BTreeMap<Vec<u32>, Vec<u64>> = BTreeMap::new();
        for r in 0..n {
            let key: Vec<u32> = zcols.iter().map(|c| c[r] as u32).collect();
            let cell = xs[r] as usize * cy + ys[r] as usize;
            strata.entry(key).or_insert_with(|| vec![0; cx * cy])[cell] += 1;
        }

        let mut g2 = 0.0;
        let mut dof = 0usize;
        for table in strata.values() {
            let mut nx = vec![0u64; cx];
            let mut ny = vec![0u64; cy];
            let mut nz = 0u64;
            for a in 0..cx {
                for b in 0..cy {
                    let c = table[a * cy + b];
                    nx[a] += c;
                    ny[b] += c;
                    nz += c;
                }
            }
            for a in 0..cx {
                for b in 0..cy {
                    let c = table[a * cy + b];
                    if c > 0 {
                        let c = c as f64;
                        g2 += c * ((c * nz as f64) / (nx[a] as f64 * ny[b] as f64)).ln();
                    }
                }
            }
            let rx = nx.iter().filter(|&&c| c > 0).count();
            let ry = ny.iter().filter(|&&c| c > 0).count();
            dof += rx.saturating_sub(1) * ry.saturating_sub(1);
        }
        let statistic = (2.0 * g2).max(0.0);

        if dof == 0 {
            return TestDecision {
                independent: true,
                statistic,
                p_value: Some(1.0),
                conditioning_size: z.len(),
                low_power: false,
            };
        }
        if (n as f64) < MIN_ROWS_PER_DOF * dof as f64 {
            return TestDecision {
                independent: true,
                statistic,
                p_value: Some(1.0),
                conditioning_size: z.len(),
                low_power: true,
            };
        }
        let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(1.0);
        TestDecision {
            independent: p_value > self.alpha,
            statistic,
            p_value: Some(p_value),
            conditioning_size: z.len(),
            low_power: false,
        }
    }
}

impl IndependenceTester for GSquared {
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
        TestKind::GSquared
    }
}
