use nalgebra::DMatrix;

use crate::domain::{Domain, VarId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Continuous,
    Categorical { cardinality: usize },
}

impl ColumnKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnKind::Categorical { .. })
    }
}

/// Complete-case data matrix stored column by column.
#[derive(Clone, Debug)]
pub struct Dataset {
    domain: Domain,
    kinds: Vec<ColumnKind>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(domain: Domain, kinds: Vec<ColumnKind>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if kinds.len() != domain.len() || columns.len() != domain.len() {
            return Err(Error::InvalidData(format!(
                "{} variables, {} column kinds, {} columns",
                domain.len(),
                kinds.len(),
                columns.len()
            )));
        }
        let n = columns.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidData("dataset has no rows".into()));
        }
        for (i, (col, kind)) in columns.iter().zip(&kinds).enumerate() {
            let name = &domain.names()[i];
            if col.len() != n {
                return Err(Error::InvalidData(format!(
                    "column `{name}` has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(v) = col.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!(
                    "column `{name}` holds non-finite value {v}"
                )));
            }
            if let ColumnKind::Categorical { cardinality } = *kind {
                if cardinality == 0 {
                    return Err(Error::InvalidData(format!("column `{name}` has zero cardinality")));
                }
                if let Some(v) = col
                    .iter()
                    .find(|&&v| v < 0.0 || v.fract() != 0.0 || v >= cardinality as f64)
                {
                    return Err(Error::InvalidData(format!(
                        "column `{name}` value {v} is not a category in 0..{cardinality}"
                    )));
                }
            }
        }
        Ok(Dataset { domain, kinds, columns })
    }

    /// Builds a dataset from row-major values.
    pub fn from_rows(domain: Domain, kinds: Vec<ColumnKind>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = domain.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidData(format!(
                    "row {r} has {} values, expected {p}",
                    row.len()
                )));
            }
            for (c, v) in row.iter().enumerate() {
                columns[c].push(*v);
            }
        }
        Dataset::new(domain, kinds, columns)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    pub fn kind(&self, v: VarId) -> ColumnKind {
        self.kinds[v.0]
    }

    pub fn column(&self, v: VarId) -> &[f64] {
        &self.columns[v.0]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[r]).collect()
    }

    /// Unbiased sample covariance of the listed columns.
    pub fn sample_covariance(&self, idx: &[usize]) -> DMatrix<f64> {
        let n = self.n_rows();
        let means: Vec<f64> = idx
            .iter()
            .map(|&i| self.columns[i].iter().sum::<f64>() / n as f64)
            .collect();
        let k = idx.len();
        let mut cov = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let ca = &self.columns[idx[a]];
                let cb = &self.columns[idx[b]];
                let s: f64 = ca.iter().zip(cb).map(|(u, v)| (u - means[a]) * (v - means[b])).sum();
                let v = s / (n.max(2) - 1) as f64;
                cov[(a, b)] = v;
                cov[(b, a)] = v;
            }
        }
        cov
    }

    /// Rescales column `v` by `a * x + b`. Used to check scale invariance.
    pub fn affine_column(&self, v: VarId, a: f64, b: f64) -> Result<Dataset> {
        let mut out = self.clone();
        out.columns[v.0].iter_mut().for_each(|x| *x = a * *x + b);
        Dataset::new(out.domain, out.kinds, out.columns)
    }
}
