use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VarId, VarSet};
use crate::error::{Error, Result};
use crate::exact::{CgMixture, DiscreteJoint, ExactModel, GaussianModel};
use crate::graph::Dag;
use crate::synth::{DiscreteBn, LinearGaussianBn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindHint {
    Continuous,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub mean: Vec<f64>,
    /// Row-major covariance.
    pub cov: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelSpec {
    GaussianBn {
        variables: Vec<String>,
        edges: Vec<(String, String)>,
        /// Keyed `"PARENT->CHILD"`.
        coefficients: BTreeMap<String, f64>,
        noise_variances: BTreeMap<String, f64>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        means: BTreeMap<String, f64>,
    },
    DiscreteBn {
        variables: Vec<String>,
        edges: Vec<(String, String)>,
        cardinalities: BTreeMap<String, usize>,
        /// One row per parent configuration, parents in variable order with
        /// the first slowest.
        cpts: BTreeMap<String, Vec<Vec<f64>>>,
    },
    Gaussian {
        variables: Vec<String>,
        mean: Vec<f64>,
        cov: Vec<f64>,
    },
    DiscreteJoint {
        variables: Vec<String>,
        cardinalities: BTreeMap<String, usize>,
        /// Row-major table, first variable slowest.
        probs: Vec<f64>,
    },
    CgMixture {
        /// Continuous variables; the selector is appended after them.
        variables: Vec<String>,
        selector: String,
        weights: Vec<f64>,
        components: Vec<ComponentSpec>,
    },
}

/// A model document: one model plus the load-time hiding and selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub spec: ModelSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hidden: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub selection: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub column_kinds: BTreeMap<String, KindHint>,
}

/// Model as queried: hidden variables marginalized out, then selection applied.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: ExactModel,
    /// Generating graph of BN documents, over the full variable list.
    pub dag: Option<Dag>,
    pub column_kinds: BTreeMap<String, KindHint>,
}

fn edge_key(p: &str, c: &str) -> String {
    format!("{p}->{c}")
}

fn resolve_one(domain: &Domain, name: &str) -> Result<VarId> {
    domain
        .id(name)
        .ok_or_else(|| Error::UnknownVariables(vec![name.to_string()]))
}

fn per_variable<T: Copy>(
    domain: &Domain,
    map: &BTreeMap<String, T>,
    field: &str,
    default: Option<T>,
) -> Result<Vec<T>> {
    domain.resolve(&map.keys().collect::<Vec<_>>())?;
    domain
        .names()
        .iter()
        .map(|n| {
            map.get(n)
                .copied()
                .or(default)
                .ok_or_else(|| Error::InvalidModel(format!("`{field}` has no entry for `{n}`")))
        })
        .collect()
}

fn build_dag(domain: &Domain, edges: &[(String, String)]) -> Result<Dag> {
    let ids = edges
        .iter()
        .map(|(p, c)| Ok((resolve_one(domain, p)?, resolve_one(domain, c)?)))
        .collect::<Result<Vec<_>>>()?;
    Dag::new(domain.clone(), &ids)
}

impl ModelFile {
    pub fn bare(spec: ModelSpec) -> Self {
        ModelFile {
            spec,
            hidden: Vec::new(),
            selection: BTreeMap::new(),
            column_kinds: BTreeMap::new(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Pretty-printed document with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model documents serialize");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn variables(&self) -> &[String] {
        match &self.spec {
            ModelSpec::GaussianBn { variables, .. }
            | ModelSpec::DiscreteBn { variables, .. }
            | ModelSpec::Gaussian { variables, .. }
            | ModelSpec::DiscreteJoint { variables, .. }
            | ModelSpec::CgMixture { variables, .. } => variables,
        }
    }

    /// The model before hiding and selection, plus its graph for BN documents.
    pub fn base_model(&self) -> Result<(ExactModel, Option<Dag>)> {
        let domain = Domain::new(self.variables().iter().cloned())?;
        match &self.spec {
            ModelSpec::GaussianBn {
                edges,
                coefficients,
                noise_variances,
                means,
                ..
            } => {
                let dag = build_dag(&domain, edges)?;
                let mut coefs = BTreeMap::new();
                for (p, c) in edges {
                    let key = edge_key(p, c);
                    let w = coefficients
                        .get(&key)
                        .ok_or_else(|| Error::InvalidModel(format!("no coefficient for edge `{key}`")))?;
                    coefs.insert((resolve_one(&domain, p)?, resolve_one(&domain, c)?), *w);
                }
                let known: std::collections::BTreeSet<String> = edges.iter().map(|(p, c)| edge_key(p, c)).collect();
                if let Some(extra) = coefficients.keys().find(|k| !known.contains(*k)) {
                    return Err(Error::InvalidModel(format!(
                        "coefficient `{extra}` does not match an edge"
                    )));
                }
                let noise = per_variable(&domain, noise_variances, "noise_variances", None)?;
                let means = per_variable(&domain, means, "means", Some(0.0))?;
                let bn = LinearGaussianBn::new(dag.clone(), coefs, noise, means)?;
                Ok((bn.to_gaussian()?.into(), Some(dag)))
            }
            ModelSpec::DiscreteBn {
                edges,
                cardinalities,
                cpts,
                ..
            } => {
                let dag = build_dag(&domain, edges)?;
                let cards = per_variable(&domain, cardinalities, "cardinalities", None)?;
                domain.resolve(&cpts.keys().collect::<Vec<_>>())?;
                for (n, rows) in cpts {
                    let k = cards[resolve_one(&domain, n)?.0];
                    if rows.iter().any(|r| r.len() != k) {
                        return Err(Error::InvalidModel(format!("every CPT row of `{n}` needs {k} entries")));
                    }
                }
                let flat = domain
                    .names()
                    .iter()
                    .map(|n| {
                        cpts.get(n)
                            .map(|rows| rows.iter().flatten().copied().collect())
                            .ok_or_else(|| Error::InvalidModel(format!("`cpts` has no entry for `{n}`")))
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                let bn = DiscreteBn::new(dag.clone(), cards, flat)?;
                Ok((bn.to_joint()?.into(), Some(dag)))
            }
            ModelSpec::Gaussian { mean, cov, .. } => {
                Ok((GaussianModel::from_rows(domain, mean.clone(), cov)?.into(), None))
            }
            ModelSpec::DiscreteJoint {
                cardinalities, probs, ..
            } => {
                let cards = per_variable(&domain, cardinalities, "cardinalities", None)?;
                Ok((DiscreteJoint::new(domain, cards, probs.clone())?.into(), None))
            }
            ModelSpec::CgMixture {
                selector,
                weights,
                components,
                ..
            } => {
                let comps = components
                    .iter()
                    .map(|c| GaussianModel::from_rows(domain.clone(), c.mean.clone(), &c.cov))
                    .collect::<Result<Vec<_>>>()?;
                Ok((CgMixture::new(selector, comps, weights.clone())?.into(), None))
            }
        }
    }

    /// Builds the model, hides `hidden`, then conditions on `selection`.
    pub fn load(&self) -> Result<LoadedModel> {
        let (base, dag) = self.base_model()?;
        let full = base.domain().clone();
        let hidden = full.resolve(&self.hidden)?;
        let names: Vec<&String> = self.selection.keys().collect();
        let selected = full.resolve(&names)?;
        if !hidden.is_disjoint(&selected) {
            let both = full.set_names(&hidden.intersection(&selected)).join(", ");
            return Err(Error::Overlap(format!("hidden and selected: {both}")));
        }
        let marginal = base.hide(&hidden)?;
        let given: Vec<(VarId, f64)> = self
            .selection
            .iter()
            .map(|(n, v)| Ok((resolve_one(marginal.domain(), n)?, *v)))
            .collect::<Result<_>>()?;
        let model = if given.is_empty() {
            marginal
        } else {
            marginal.condition(&given)?
        };
        Ok(LoadedModel {
            model,
            dag,
            column_kinds: self.column_kinds.clone(),
        })
    }

    pub fn from_gaussian_bn(bn: &LinearGaussianBn) -> Self {
        let d = bn.domain();
        let edges: Vec<(String, String)> = bn
            .dag()
            .edges()
            .iter()
            .map(|&(p, c)| (d.name(p).to_string(), d.name(c).to_string()))
            .collect();
        let coefficients = bn
            .coefficients()
            .iter()
            .map(|(&(p, c), w)| (edge_key(d.name(p), d.name(c)), *w))
            .collect();
        let noise_variances = d
            .names()
            .iter()
            .cloned()
            .zip(bn.noise_variances().iter().copied())
            .collect();
        let means = if bn.means().iter().all(|m| *m == 0.0) {
            BTreeMap::new()
        } else {
            d.names().iter().cloned().zip(bn.means().iter().copied()).collect()
        };
        Self::bare(ModelSpec::GaussianBn {
            variables: d.names().to_vec(),
            edges,
            coefficients,
            noise_variances,
            means,
        })
    }

    pub fn from_discrete_bn(bn: &DiscreteBn) -> Self {
        let d = bn.domain();
        let edges = bn
            .dag()
            .edges()
            .iter()
            .map(|&(p, c)| (d.name(p).to_string(), d.name(c).to_string()))
            .collect();
        let cards = bn.cardinalities();
        let cardinalities = d.names().iter().cloned().zip(cards.iter().copied()).collect();
        let cpts = d
            .names()
            .iter()
            .enumerate()
            .map(|(v, n)| (n.clone(), bn.cpts()[v].chunks(cards[v]).map(<[f64]>::to_vec).collect()))
            .collect();
        Self::bare(ModelSpec::DiscreteBn {
            variables: d.names().to_vec(),
            edges,
            cardinalities,
            cpts,
        })
    }

    pub fn from_exact(model: &ExactModel) -> Self {
        let d = model.domain();
        let spec = match model {
            ExactModel::Gaussian(g) => ModelSpec::Gaussian {
                variables: d.names().to_vec(),
                mean: g.mean().iter().copied().collect(),
                cov: g.cov().transpose().iter().copied().collect(),
            },
            ExactModel::Discrete(j) => ModelSpec::DiscreteJoint {
                variables: d.names().to_vec(),
                cardinalities: d
                    .names()
                    .iter()
                    .cloned()
                    .zip(j.cardinalities().iter().copied())
                    .collect(),
                probs: j.probs().to_vec(),
            },
            ExactModel::Mixture(m) => {
                let cont = m.components()[0].domain();
                ModelSpec::CgMixture {
                    variables: cont.names().to_vec(),
                    selector: d.name(m.selector()).to_string(),
                    weights: m.weights().to_vec(),
                    components: m
                        .components()
                        .iter()
                        .map(|c| ComponentSpec {
                            mean: c.mean().iter().copied().collect(),
                            cov: c.cov().transpose().iter().copied().collect(),
                        })
                        .collect(),
                }
            }
        };
        Self::bare(spec)
    }
}

impl LoadedModel {
    pub fn read(path: &Path) -> Result<Self> {
        ModelFile::read(path)?.load()
    }

    /// Names of variables hidden at load time are not in `model.domain()`;
    /// this lists the graph nodes that survive.
    pub fn visible(&self) -> VarSet {
        match &self.dag {
            Some(dag) => dag
                .domain()
                .names()
                .iter()
                .enumerate()
                .filter(|(_, n)| self.model.domain().id(n).is_some())
                .map(|(i, _)| VarId(i))
                .collect(),
            None => self.model.domain().all(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{cg_counterexample, selection_model, xor_or_model};

    const CHAIN: &str = r#"{
        "type": "gaussian-bn",
        "variables": ["A", "B", "T"],
        "edges": [["A", "B"], ["B", "T"]],
        "coefficients": {"A->B": 1.0, "B->T": 1.0},
        "noise_variances": {"A": 1.0, "B": 1.0, "T": 1.0}
    }"#;

    #[test]
    fn chain_document() {
        let m = ModelFile::from_json(CHAIN).unwrap().load().unwrap();
        let ExactModel::Gaussian(g) = &m.model else { panic!() };
        assert_eq!(g.cov()[(2, 2)], 3.0);
        assert_eq!(m.dag.unwrap().n_edges(), 2);
    }

    #[test]
    fn hide_then_condition() {
        let mut f = ModelFile::from_json(CHAIN).unwrap();
        f.hidden = vec!["A".into()];
        f.selection.insert("B".into(), 1.0);
        let m = f.load().unwrap();
        assert_eq!(m.model.domain().names(), &["T"]);
        assert_eq!(m.visible(), VarSet::from_indices([2]));
        f.hidden = vec!["B".into()];
        assert!(matches!(f.load(), Err(Error::Overlap(_))));
        f.hidden = vec!["Q".into()];
        assert!(matches!(f.load(), Err(Error::UnknownVariables(v)) if v == ["Q"]));
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let bad_coef = CHAIN.replace("\"B->T\": 1.0", "\"B->A\": 1.0");
        assert!(ModelFile::from_json(&bad_coef).unwrap().load().is_err());
        let missing_noise = CHAIN.replace(", \"T\": 1.0", "");
        assert!(ModelFile::from_json(&missing_noise).unwrap().load().is_err());
        let bad_edge = CHAIN.replace("[\"B\", \"T\"]", "[\"B\", \"Q\"]");
        assert!(matches!(
            ModelFile::from_json(&bad_edge).unwrap().load(),
            Err(Error::UnknownVariables(_))
        ));
        assert!(ModelFile::from_json("{\"type\": \"nope\"}").is_err());
        assert!(ModelFile::from_json("[]").is_err());
    }

    #[test]
    fn documents_round_trip() {
        let fig = selection_model().unwrap();
        let files = [
            ModelFile::from_gaussian_bn(&fig.bn),
            ModelFile::from_discrete_bn(&xor_or_model()),
            ModelFile::from_exact(&fig.conditioned.clone().into()),
            ModelFile::from_exact(&xor_or_model().to_joint().unwrap().into()),
            ModelFile::from_exact(&cg_counterexample().into()),
        ];
        for f in files {
            let text = f.to_json();
            let back = ModelFile::from_json(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_json(), text);
            back.load().unwrap();
        }
    }

    #[test]
    fn xor_or_selection_matches_library_slice() {
        let mut f = ModelFile::from_discrete_bn(&xor_or_model());
        f.selection.insert("W".into(), 0.0);
        let loaded = f.load().unwrap();
        let direct = ExactModel::from(xor_or_model().to_joint().unwrap())
            .condition(&[(VarId(3), 0.0)])
            .unwrap();
        let (ExactModel::Discrete(a), ExactModel::Discrete(b)) = (&loaded.model, &direct) else {
            panic!()
        };
        assert_eq!(a.probs(), b.probs());
    }
}
