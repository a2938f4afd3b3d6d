use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use relnodes::axioms::{check_axiom, check_closure, Axiom, ClosureStatus};
use relnodes::graph::{relevant_via_ug, ug_edge_exclusion, ug_via_markov_boundaries};
use relnodes::indep::{Dataset, IndependenceTester, TestKind, TesterConfig};
use relnodes::io::{
    parse_condition, parse_name_list, read_csv_path, write_csv_path, AxiomCheckDoc, GraphDoc, KindHint, LoadedModel,
    ModelFile, PurgeDoc, RelevanceDoc, ReportDocument, SynthDoc,
};
use relnodes::relevance::{find_relevant_with_context, oracle_relevant, purge_context};
use relnodes::synth::{self, DiscreteBn, LinearGaussianBn};
use relnodes::{Domain, Error, Result, VarId, VarSet};

use crate::args::*;

/// Data tests with fewer rows than this many per variable get a warning
/// when every other variable is conditioned on.
const ROWS_PER_VARIABLE: usize = 5;

fn unreadable(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("cannot read `{}`: {e}", path.display()))
}

fn read_model(path: &Path, conditions: &[String]) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
    let mut loaded = ModelFile::from_json(&text)?.load()?;
    if !conditions.is_empty() {
        let parsed = conditions
            .iter()
            .map(|c| parse_condition(c))
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<&String> = parsed.iter().map(|(n, _)| n).collect();
        let ids = loaded.model.domain().resolve(&names)?;
        if ids.len() != parsed.len() {
            return Err(Error::InvalidArgument("a variable is conditioned on twice".into()));
        }
        let given: Vec<(VarId, f64)> = parsed
            .iter()
            .map(|(n, v)| (loaded.model.domain().id(n).expect("resolved"), *v))
            .collect();
        loaded.model = loaded.model.condition(&given)?;
    }
    Ok(loaded)
}

fn kind_overrides(input: &InputArgs) -> Result<BTreeMap<String, KindHint>> {
    let mut out = BTreeMap::new();
    if let Some(schema) = &input.schema {
        let text = std::fs::read_to_string(schema).map_err(|e| unreadable(schema, e))?;
        out.extend(ModelFile::from_json(&text)?.column_kinds);
    }
    for (list, hint) in [
        (&input.categorical, KindHint::Categorical),
        (&input.continuous, KindHint::Continuous),
    ] {
        if let Some(list) = list {
            for name in parse_name_list(list)? {
                out.insert(name, hint);
            }
        }
    }
    Ok(out)
}

/// A tester plus what the report needs to know about it.
struct Source {
    tester: Box<dyn IndependenceTester>,
    rows: Option<usize>,
}

fn test_kind(input: &InputArgs) -> TestKind {
    match (input.oracle, input.test) {
        (true, _) | (false, Some(TestArg::Oracle)) => TestKind::Oracle,
        (false, Some(TestArg::FisherZ)) => TestKind::FisherZ,
        (false, Some(TestArg::G2)) => TestKind::GSquared,
        (false, None) if input.model.is_some() => TestKind::Oracle,
        (false, None) => TestKind::FisherZ,
    }
}

fn open_source(input: &InputArgs, config: &mut BTreeMap<String, String>) -> Result<Source> {
    let kind = test_kind(input);
    let tc = TesterConfig {
        alpha: input.alpha,
        kind,
        ..TesterConfig::default()
    };
    tc.validate()?;
    config.insert("test".into(), kind.to_string());
    if kind != TestKind::Oracle {
        config.insert("alpha".into(), input.alpha.to_string());
    }
    if let Some(path) = &input.model {
        config.insert("model".into(), path.display().to_string());
        if !input.conditions.is_empty() {
            config.insert("condition".into(), input.conditions.join(","));
        }
        if kind != TestKind::Oracle {
            return Err(Error::InvalidArgument(format!("the {kind} test needs --data")));
        }
        let loaded = read_model(path, &input.conditions)?;
        return Ok(Source {
            tester: Box::new(tc.oracle(loaded.model)?),
            rows: None,
        });
    }
    let path = input.data.as_ref().expect("clap requires --data or --model");
    config.insert("data".into(), path.display().to_string());
    if kind == TestKind::Oracle {
        return Err(Error::InvalidArgument("the oracle test needs --model".into()));
    }
    if !path.exists() {
        return Err(unreadable(path, "no such file"));
    }
    let data: Dataset = read_csv_path(path, &kind_overrides(input)?)?;
    let rows = data.n_rows();
    Ok(Source {
        tester: tc.data_tester(data)?,
        rows: Some(rows),
    })
}

fn names(domain: &Domain, list: &str) -> Result<VarSet> {
    domain.resolve(&parse_name_list(list)?)
}

fn finish(mut report: ReportDocument, output: &OutputArgs, started: Instant) -> Result<ReportDocument> {
    report.config.insert("seed".into(), output.seed.to_string());
    if output.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok(report)
}

pub fn relevant(args: &RelevantArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("relevant");
    let src = open_source(&args.input, &mut report.config)?;
    let domain = src.tester.domain().clone();
    let targets = names(&domain, &args.targets)?;
    let context = names(&domain, &args.context)?;
    let r = find_relevant_with_context(&src.tester, &targets, &context)?;
    if r.low_power_tests > 0 {
        report.warnings.push(format!(
            "{} test(s) had too few rows and were treated as independent",
            r.low_power_tests
        ));
    }
    report.tests_performed = r.tests_performed;
    report.relevance = Some(RelevanceDoc::new(&r, &domain));
    finish(report, &args.output, started)
}

pub fn purge(args: &PurgeArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("purge");
    let src = open_source(&args.input, &mut report.config)?;
    let domain = src.tester.domain().clone();
    let targets = names(&domain, &args.targets)?;
    let context = names(&domain, &args.context)?;
    let p = purge_context(&src.tester, &targets, &context)?;
    let r = find_relevant_with_context(&src.tester, &targets, &p.context)?;
    report.tests_performed = p.tests_performed + r.tests_performed;
    report.purge = Some(PurgeDoc::new(&domain.set_names(&context), &p, &domain));
    report.relevance = Some(RelevanceDoc::new(&r, &domain));
    finish(report, &args.output, started)
}

pub fn ug(args: &UgArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("ug");
    let src = open_source(&args.input, &mut report.config)?;
    let domain = src.tester.domain().clone();
    let p = domain.len();
    let (graph, doc) = match args.method {
        MethodArg::EdgeExclusion => {
            report.config.insert("method".into(), "edge-exclusion".into());
            if let Some(n) = src.rows.filter(|&n| n < ROWS_PER_VARIABLE * p) {
                report.warnings.push(format!(
                    "{n} rows for {p} variables: tests conditioning on all other variables have little power"
                ));
            }
            let g = ug_edge_exclusion(&src.tester)?;
            report.tests_performed = p * p.saturating_sub(1) / 2;
            let doc = GraphDoc::new("edge-exclusion", &g);
            (g, doc)
        }
        MethodArg::Iamb => {
            report.config.insert("method".into(), "iamb".into());
            let mb = ug_via_markov_boundaries(&src.tester)?;
            for &(a, b) in &mb.asymmetries {
                report.warnings.push(format!(
                    "Markov boundary of {} contains {} but not the reverse",
                    domain.name(a),
                    domain.name(b)
                ));
            }
            report.tests_performed = mb.tests_performed();
            (mb.graph.clone(), GraphDoc::from_markov_boundaries(&mb))
        }
    };
    if let Some(t) = &args.targets {
        let targets = names(&domain, t)?;
        let relevant = relevant_via_ug(&graph, &targets)?;
        let rest = domain.all().difference(&targets);
        let r = relnodes::relevance::RelevanceReport {
            irrelevant: rest.difference(&relevant),
            relevant,
            targets,
            context: VarSet::empty(),
            witnesses: BTreeMap::new(),
            tests_performed: 0,
            low_power_tests: 0,
        };
        report.relevance = Some(RelevanceDoc::new(&r, &domain));
    }
    if let Some(path) = &args.dot {
        std::fs::write(path, graph.to_dot())?;
    }
    report.graph = Some(doc);
    finish(report, &args.output, started)
}

pub fn oracle(args: &OracleArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("oracle");
    report.config.insert("model".into(), args.model.display().to_string());
    if !args.conditions.is_empty() {
        report.config.insert("condition".into(), args.conditions.join(","));
    }
    let loaded = read_model(&args.model, &args.conditions)?;
    let tester = TesterConfig::default().oracle(loaded.model)?;
    let domain = tester.domain().clone();
    let targets = names(&domain, &args.targets)?;
    let context = names(&domain, &args.context)?;
    let slow = oracle_relevant(&tester, &targets, &context)?;
    report.tests_performed = slow.tests_performed;
    if args.compare {
        let fast = find_relevant_with_context(&tester, &targets, &context)?;
        report.agreement = Some(fast.relevant == slow.relevant);
        if fast.relevant != slow.relevant {
            report
                .warnings
                .push("frontier search and exhaustive oracle disagree".into());
        }
        report.tests_performed += fast.tests_performed;
        report.relevance = Some(RelevanceDoc::new(&fast, &domain));
    }
    report.oracle = Some(RelevanceDoc::new(&slow, &domain));
    finish(report, &args.output, started)
}

pub fn synth(args: &SynthArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("synth");
    let seed = args.output.seed;
    let (file, kind) = match args.fixture {
        Some(FixtureArg::Selection) => {
            let fig = synth::selection_model()?;
            let mut f = ModelFile::from_gaussian_bn(&fig.bn);
            f.selection.insert("S".into(), synth::SELECTION_VALUE);
            (f, "selection")
        }
        Some(FixtureArg::XorOr) => (ModelFile::from_discrete_bn(&synth::xor_or_model()), "xor-or"),
        Some(FixtureArg::CgCounterexample) => (
            ModelFile::from_exact(&synth::cg_counterexample().into()),
            "cg-counterexample",
        ),
        None => {
            report.config.insert("nodes".into(), args.nodes.to_string());
            report.config.insert("edge_prob".into(), args.edge_prob.to_string());
            let mut rng = synth::rng_from_seed(seed);
            let dag = synth::random_dag_with(args.nodes, args.edge_prob, &mut rng)?;
            match args.kind {
                KindArg::Gaussian => (
                    ModelFile::from_gaussian_bn(&LinearGaussianBn::random_params(dag, &mut rng)),
                    "gaussian-bn",
                ),
                KindArg::Discrete => {
                    report.config.insert("cardinality".into(), args.cardinality.to_string());
                    let cards = vec![args.cardinality; args.nodes];
                    (
                        ModelFile::from_discrete_bn(&DiscreteBn::random_params(dag, cards, &mut rng)?),
                        "discrete-bn",
                    )
                }
            }
        }
    };
    report.config.insert("kind".into(), kind.into());
    let loaded = file.load()?;
    let (nodes, edges) = match &loaded.dag {
        Some(dag) => {
            let d = dag.domain();
            (
                d.names().to_vec(),
                dag.edges()
                    .iter()
                    .map(|&(p, c)| (d.name(p).to_string(), d.name(c).to_string()))
                    .collect(),
            )
        }
        None => (loaded.model.domain().names().to_vec(), Vec::new()),
    };
    if let Some(path) = &args.out_model {
        std::fs::write(path, file.to_json())?;
    }
    if let (Some(n), Some(path)) = (args.samples, &args.out_data) {
        report.config.insert("samples".into(), n.to_string());
        let data = synth::sample(&loaded.model, n, seed)?;
        write_csv_path(path, &data)?;
    }
    report.synth = Some(SynthDoc {
        kind: kind.into(),
        nodes,
        edges,
        samples: args.samples,
    });
    finish(report, &args.output, started)
}

pub fn axioms(args: &AxiomsArgs) -> Result<ReportDocument> {
    let started = Instant::now();
    let mut report = ReportDocument::new("axioms");
    report.config.insert("model".into(), args.model.display().to_string());
    report
        .config
        .insert("max_set_size".into(), args.max_set_size.to_string());
    let list: Vec<Axiom> = match &args.check {
        Some(s) => parse_name_list(s)?.iter().map(|a| a.parse()).collect::<Result<_>>()?,
        None => Axiom::ALL.to_vec(),
    };
    if list.is_empty() {
        return Err(Error::InvalidArgument("--check lists no axioms".into()));
    }
    report.config.insert(
        "check".into(),
        list.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
    );
    if !args.hide.is_empty() {
        report.config.insert("hide".into(), args.hide.clone());
    }
    if !args.conditions.is_empty() {
        report.config.insert("condition".into(), args.conditions.join(","));
    }

    if args.closure {
        report.config.insert("closure".into(), "true".into());
        let loaded = read_model(&args.model, &[])?;
        let d = loaded.model.domain();
        let hidden = names(d, &args.hide)?;
        let given = args
            .conditions
            .iter()
            .map(|c| {
                let (n, v) = parse_condition(c)?;
                Ok((d.resolve(&[n])?.first().expect("one name"), v))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = check_closure(&loaded.model, &hidden, &given, args.max_set_size)?;
        let status = match r.status {
            ClosureStatus::Holds => "holds",
            ClosureStatus::Violated => "violated",
            ClosureStatus::HypothesisFailed => "hypothesis-failed",
            ClosureStatus::InputViolates => "input-violates",
        };
        report.config.insert("closure_status".into(), status.into());
        if r.status == ClosureStatus::HypothesisFailed {
            report.warnings.push(format!(
                "independencies differ across the {} conditioning assignment(s) compared",
                r.assignments_compared
            ));
        }
        let domain = r.derived.as_ref().map_or(d, |m| m.domain());
        for axiom in [Axiom::Composition, Axiom::WeakTransitivity] {
            let v: Vec<_> = r.violations.iter().filter(|v| v.axiom == axiom).cloned().collect();
            report.axioms.push(AxiomCheckDoc::new(axiom, &v, domain));
        }
        return finish(report, &args.output, started);
    }

    let mut loaded = read_model(&args.model, &[])?;
    let hidden = names(loaded.model.domain(), &args.hide)?;
    loaded.model = loaded.model.hide(&hidden)?;
    let model = if args.conditions.is_empty() {
        loaded.model
    } else {
        let d = loaded.model.domain();
        let given = args
            .conditions
            .iter()
            .map(|c| {
                let (n, v) = parse_condition(c)?;
                Ok((d.resolve(&[n])?.first().expect("one name"), v))
            })
            .collect::<Result<Vec<_>>>()?;
        loaded.model.condition(&given)?
    };
    if list.contains(&Axiom::Intersection) && !model.is_strictly_positive() {
        report
            .warnings
            .push("model is not strictly positive; intersection may fail legitimately".into());
    }
    for axiom in list {
        let v = check_axiom(&model, axiom, args.max_set_size)?;
        report.axioms.push(AxiomCheckDoc::new(axiom, &v, model.domain()));
    }
    finish(report, &args.output, started)
}
