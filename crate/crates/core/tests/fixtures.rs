//! Worked examples checked against values computed outside this crate.

use approx::assert_abs_diff_eq;
use relnodes::exact::{ExactModel, GaussianModel};
use relnodes::graph::{relevant_via_ug, ug_edge_exclusion, ug_via_markov_boundaries, Dag};
use relnodes::indep::{ExactOracle, IndependenceTester};
use relnodes::relevance::{find_relevant, oracle_relevant, purge_context};
use relnodes::synth::{faithfulness_violations, selection_model, xor_or_model, LinearGaussianBn};
use relnodes::{Domain, VarId, VarSet};

fn ids(d: &Domain, names: &[&str]) -> VarSet {
    d.resolve(names).unwrap()
}

/// Covariance of the selection-bias fixture, row-major over C1, C2, I, S, T.
const SELECTION_JOINT: [f64; 25] = [
    1.64, 0.56, 0.8, 1.264, 0.0, //
    0.56, 1.49, 0.7, 1.081, 0.0, //
    0.8, 0.7, 1.0, 0.83, 0.0, //
    1.264, 1.081, 0.83, 3.1089, 0.9, //
    0.0, 0.0, 0.0, 0.9, 1.0,
];

/// The same after conditioning on S, over C1, C2, I, T.
const SELECTION_CONDITIONED: [f64; 16] = [
    1.1260896136897296,
    0.12049277879635878,
    0.4625430216475281,
    -0.3659172054424395, //
    0.12049277879635872,
    1.1141239666763163,
    0.41139953038052035,
    -0.3129402682620863, //
    0.4625430216475281,
    0.41139953038052035,
    0.7784103702274117,
    -0.24027791180160188, //
    -0.3659172054424395,
    -0.3129402682620863,
    -0.24027791180160188,
    0.739457685998263,
];

#[test]
fn selection_covariances() {
    let f = selection_model().unwrap();
    for (a, b) in f.joint.cov().transpose().iter().zip(SELECTION_JOINT) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
    }
    for (a, b) in f.conditioned.cov().transpose().iter().zip(SELECTION_CONDITIONED) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
    }
}

#[test]
fn selection_graphs() {
    let f = selection_model().unwrap();
    let o = ExactOracle::new(f.conditioned.clone());
    let d = o.domain().clone();
    let ug = ug_edge_exclusion(&o).unwrap();
    let edges: Vec<(String, String)> = ug
        .edges()
        .iter()
        .map(|&(a, b)| (d.name(a).to_string(), d.name(b).to_string()))
        .collect();
    let want = [("C1", "C2"), ("C1", "I"), ("C1", "T"), ("C2", "I"), ("C2", "T")];
    assert_eq!(edges, want.map(|(a, b)| (a.to_string(), b.to_string())));
    assert!(ug.separated(&ids(&d, &["I"]), &ids(&d, &["T"]), &ids(&d, &["C1", "C2"])));
    assert_eq!(ug_via_markov_boundaries(&o).unwrap().graph, ug);
    let t = ids(&d, &["T"]);
    let all_but_t = ids(&d, &["C1", "C2", "I"]);
    assert_eq!(relevant_via_ug(&ug, &t).unwrap(), all_but_t);
    assert_eq!(find_relevant(&o, &t).unwrap().relevant, all_but_t);
    assert_eq!(oracle_relevant(&o, &t, &VarSet::empty()).unwrap().relevant, all_but_t);

    let dag = f.bn.dag();
    let dd = dag.domain();
    assert!(dag
        .d_separated(&ids(dd, &["I"]), &ids(dd, &["T"]), &ids(dd, &["C1", "C2", "S"]))
        .unwrap());
    assert!(faithfulness_violations(dag, &f.joint, 3, 1e-9).unwrap().is_empty());
}

#[test]
fn purging_an_irrelevant_context_node() {
    let f = selection_model().unwrap();
    let o = ExactOracle::new(f.conditioned);
    let d = o.domain().clone();
    let p = purge_context(&o, &ids(&d, &["T"]), &ids(&d, &["C1", "C2", "I"])).unwrap();
    assert_eq!(p.context, ids(&d, &["C1", "C2"]));
    assert_eq!(p.audit.len(), 1);
    assert_eq!(d.name(p.audit[0].removed), "I");
}

#[test]
fn chain_hiding_and_collider_conditioning() {
    let dag = Dag::new(
        Domain::new(["A", "B", "C"]).unwrap(),
        &[(VarId(0), VarId(1)), (VarId(1), VarId(2))],
    )
    .unwrap();
    let coefs = dag.edges().into_iter().map(|e| (e, 1.0)).collect();
    let g = LinearGaussianBn::new(dag, coefs, vec![1.0; 3], vec![0.0; 3])
        .unwrap()
        .to_gaussian()
        .unwrap();
    let hidden: ExactModel = ExactModel::Gaussian(g).hide(&VarSet::from_indices([1])).unwrap();
    let ExactModel::Gaussian(ac) = hidden else {
        unreachable!()
    };
    assert_eq!(ac.domain().names(), &["A", "C"]);
    assert_abs_diff_eq!(ac.cov()[(0, 1)], 1.0, epsilon = 1e-12);

    // C1 -> S <- T with unit coefficients and noise
    let collider = GaussianModel::from_rows(
        Domain::new(["C1", "S", "T"]).unwrap(),
        vec![0.0; 3],
        &[1.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 1.0],
    )
    .unwrap();
    assert_eq!(
        collider
            .partial_correlation(VarId(0), VarId(2), &VarSet::empty())
            .unwrap(),
        0.0
    );
    let given = collider.condition(&[(VarId(1), 2.0)]).unwrap();
    assert_abs_diff_eq!(given.cov()[(0, 1)], -1.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn xor_or_slices() {
    let joint = xor_or_model().to_joint().unwrap();
    let slice = joint.condition(&[(VarId(3), 0)]).unwrap();
    let s = |i: &[usize]| VarSet::from_indices(i.iter().copied());
    assert_abs_diff_eq!(
        slice
            .conditional_mutual_information(&s(&[0]), &s(&[2]), &s(&[]))
            .unwrap(),
        0.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        slice
            .conditional_mutual_information(&s(&[0, 1]), &s(&[2]), &s(&[]))
            .unwrap(),
        1.0,
        epsilon = 1e-12
    );
    // OR slice: P(Z = 1 | X = 0) = 1/2 while P(Z = 1 | X = 1) = 1
    let or = joint.condition(&[(VarId(3), 1)]).unwrap();
    assert!(or.conditional_mutual_information(&s(&[0]), &s(&[2]), &s(&[])).unwrap() > 0.1);
    let m = or.marginalize(&s(&[0, 2])).unwrap();
    assert_abs_diff_eq!(m.prob(&[0, 1]), 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(m.prob(&[1, 1]), 0.5, epsilon = 1e-12);
}
