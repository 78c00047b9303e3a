//! Categorical synthetic data generation and evaluation.
//!
//! * [`bn`]: CPT fitting for an expert DAG and ancestral sampling.
//! * [`baseline`]: independent and correlated attribute modes with Laplace noise
//!   and greedy mutual-information structure learning.
//! * [`copula`]: Gaussian copula over category intervals.
//! * [`inference`]: exact posteriors by variable elimination.
//! * [`eval`]: chi-square, KL, TVD, entropy and mutual information, plus method ranking.
//! * [`pipeline`]: CSV ingestion, the end-to-end run and report emission.

pub mod baseline;
pub mod bn;
pub mod copula;
pub mod cpt;
pub mod dag;
pub mod distribution;
pub mod error;
pub mod eval;
pub mod fixture;
pub mod inference;
pub mod io;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod rng;
pub mod schema;
pub mod special;
pub mod table;

pub use cpt::Cpt;
pub use dag::Dag;
pub use distribution::Distribution;
pub use error::{Error, Result};
pub use model::BayesNet;
pub use par::Execution;
pub use schema::{CategoricalSchema, VariableKind, VariableSpec};
pub use table::DataTable;
