use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axioms::{Axiom, AxiomViolation, IndependenceStatement};
use crate::domain::Domain;
use crate::error::Result;
use crate::graph::{MbGraph, UndirectedGraph};
use crate::relevance::{PurgeResult, RelevanceReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessDoc {
    Chain { nodes: Vec<String> },
    ConditioningSet { set: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceDoc {
    pub targets: Vec<String>,
    pub context: Vec<String>,
    pub relevant: Vec<String>,
    pub irrelevant: Vec<String>,
    pub witnesses: BTreeMap<String, WitnessDoc>,
    pub tests_performed: usize,
    pub low_power_tests: usize,
}

impl RelevanceDoc {
    pub fn new(report: &RelevanceReport, domain: &Domain) -> Self {
        let witnesses = report
            .witnesses
            .iter()
            .map(|(v, w)| {
                let doc = match w {
                    Witness::Chain(c) => WitnessDoc::Chain {
                        nodes: c.nodes().iter().map(|n| domain.name(*n).to_string()).collect(),
                    },
                    Witness::ConditioningSet(z) => WitnessDoc::ConditioningSet {
                        set: domain.set_names(z),
                    },
                };
                (domain.name(*v).to_string(), doc)
            })
            .collect();
        RelevanceDoc {
            targets: domain.set_names(&report.targets),
            context: domain.set_names(&report.context),
            relevant: domain.set_names(&report.relevant),
            irrelevant: domain.set_names(&report.irrelevant),
            witnesses,
            tests_performed: report.tests_performed,
            low_power_tests: report.low_power_tests,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurgeStepDoc {
    pub removed: String,
    pub reduced_context: Vec<String>,
    pub relevant_without: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurgeDoc {
    pub initial_context: Vec<String>,
    pub context: Vec<String>,
    pub removed: Vec<PurgeStepDoc>,
    pub tests_performed: usize,
}

impl PurgeDoc {
    pub fn new(initial: &[String], result: &PurgeResult, domain: &Domain) -> Self {
        PurgeDoc {
            initial_context: initial.to_vec(),
            context: domain.set_names(&result.context),
            removed: result
                .audit
                .iter()
                .map(|s| PurgeStepDoc {
                    removed: domain.name(s.removed).to_string(),
                    reduced_context: domain.set_names(&s.reduced_context),
                    relevant_without: domain.set_names(&s.relevant_without),
                })
                .collect(),
            tests_performed: result.tests_performed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub method: String,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asymmetries: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_conditioning_size: Option<usize>,
}

impl GraphDoc {
    pub fn new(method: &str, g: &UndirectedGraph) -> Self {
        let d = g.domain();
        GraphDoc {
            method: method.to_string(),
            nodes: d.names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(a, b)| (d.name(a).to_string(), d.name(b).to_string()))
                .collect(),
            asymmetries: Vec::new(),
            max_conditioning_size: None,
        }
    }

    pub fn from_markov_boundaries(mb: &MbGraph) -> Self {
        let d = mb.graph.domain();
        let mut doc = GraphDoc::new("iamb", &mb.graph);
        doc.asymmetries = mb
            .asymmetries
            .iter()
            .map(|&(a, b)| (d.name(a).to_string(), d.name(b).to_string()))
            .collect();
        doc.max_conditioning_size = Some(mb.max_conditioning_size());
        doc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementDoc {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub holds: bool,
}

impl StatementDoc {
    pub fn new(s: &IndependenceStatement, domain: &Domain) -> Self {
        StatementDoc {
            x: domain.set_names(&s.x),
            y: domain.set_names(&s.y),
            z: domain.set_names(&s.z),
            holds: s.holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub premises: Vec<StatementDoc>,
    pub failed: Vec<StatementDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheckDoc {
    pub axiom: Axiom,
    pub violations: Vec<ViolationDoc>,
}

impl AxiomCheckDoc {
    pub fn new(axiom: Axiom, violations: &[AxiomViolation], domain: &Domain) -> Self {
        AxiomCheckDoc {
            axiom,
            violations: violations
                .iter()
                .map(|v| ViolationDoc {
                    premises: v.premises.iter().map(|s| StatementDoc::new(s, domain)).collect(),
                    failed: v.failed.iter().map(|s| StatementDoc::new(s, domain)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthDoc {
    pub kind: String,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Output of one CLI command. Sections not produced by the command are
/// omitted from the serialized form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    /// Echo of the effective settings, flag name to value.
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevance: Option<RelevanceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<RelevanceDoc>,
    /// Whether the frontier search and the exhaustive oracle agree, when both ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purge: Option<PurgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axioms: Vec<AxiomCheckDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthDoc>,
    pub warnings: Vec<String>,
    pub tests_performed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        ReportDocument {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{VarId, VarSet};
    use crate::relevance::WitnessChain;

    fn sample() -> ReportDocument {
        let d = Domain::new(["A", "B", "T"]).unwrap();
        let mut witnesses = BTreeMap::new();
        witnesses.insert(VarId(1), Witness::Chain(WitnessChain(vec![VarId(1), VarId(2)])));
        witnesses.insert(VarId(0), Witness::ConditioningSet(VarSet::from_indices([1])));
        let rep = RelevanceReport {
            targets: VarSet::from_indices([2]),
            context: VarSet::empty(),
            relevant: VarSet::from_indices([0, 1]),
            irrelevant: VarSet::empty(),
            witnesses,
            tests_performed: 3,
            low_power_tests: 0,
        };
        let mut doc = ReportDocument::new("relevant");
        doc.config.insert("alpha".into(), "0.01".into());
        doc.relevance = Some(RelevanceDoc::new(&rep, &d));
        doc.warnings.push("few rows".into());
        doc.tests_performed = 3;
        doc.timing_ms = Some(0.1 + 0.2);
        doc
    }

    #[test]
    fn names_not_indices() {
        let doc = sample();
        let rel = doc.relevance.as_ref().unwrap();
        assert_eq!(rel.relevant, vec!["A", "B"]);
        assert_eq!(
            rel.witnesses["B"],
            WitnessDoc::Chain {
                nodes: vec!["B".into(), "T".into()]
            }
        );
    }

    #[test]
    fn round_trip() {
        let doc = sample();
        let text = doc.to_json();
        assert_eq!(ReportDocument::from_json(&text).unwrap(), doc);
        assert!(!text.contains("\"graph\""));
    }
}
