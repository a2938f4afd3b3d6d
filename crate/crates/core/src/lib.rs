//! Identification of the variables relevant to every conditional query about
//! a target set, using only marginal (or context-conditional) independence
//! tests, together with exhaustive and graph-based cross-checks.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: variable universes and index sets.
//! - [`exact`]: exact Gaussian, discrete and conditional-Gaussian models.
//! - [`indep`]: the independence-decision contract, exact oracles and the
//!   Fisher z / G² data tests.
//! - [`relevance`]: marginal-dependence frontier search, the context variant,
//!   context purging and the exhaustive oracle.
//! - [`graph`]: DAGs, d-separation, minimal undirected maps and IAMB.
//! - [`synth`]: random models, sampling and named fixtures.
//! - [`axioms`]: enumeration of independencies and graphoid property checks.
//! - [`io`]: model files, dataset CSV and report documents.

pub mod axioms;
pub mod domain;
pub mod error;
pub mod exact;
pub mod graph;
pub mod indep;
pub mod io;
pub mod linalg;
pub mod relevance;
pub mod synth;

pub use domain::{Domain, VarId, VarSet};
pub use error::{Error, Result};
