//! Bundled ground-truth network standing in for a private survey dataset.
//!
//! Topology: `Gender → Age → Disability → {InteractionFamily,
//! InteractionServices, InteractionHealthcare}` with cardinalities
//! 2, 3, 10, 5, 5, 5. The CPTs are fixed constants below. They are tilted so that
//! observing `Disability = Developmental` raises `P(Age = 65+)` from about 0.26
//! to about 0.37 and moves `InteractionFamily` mass to `Often`/`Always`.

use std::sync::Arc;

use crate::bn::{ancestral_sample_with, SampleRequest};
use crate::dag::Dag;
use crate::error::Result;
use crate::model::BayesNet;
use crate::par::Execution;
use crate::schema::{CategoricalSchema, VariableKind, VariableSpec};
use crate::table::DataTable;

/// Cohort size of the survey the fixture imitates.
pub const SURVEY_ROWS: usize = 54_000;

pub const GENDER: usize = 0;
pub const AGE: usize = 1;
pub const DISABILITY: usize = 2;
pub const INTERACTION_FAMILY: usize = 3;
pub const INTERACTION_SERVICES: usize = 4;
pub const INTERACTION_HEALTHCARE: usize = 5;

pub const DEVELOPMENTAL: usize = 7;
pub const AGE_65_PLUS: usize = 2;

const FREQUENCY: [&str; 5] = ["Never", "Rarely", "Sometimes", "Often", "Always"];

pub fn fixture_schema() -> CategoricalSchema {
    CategoricalSchema::new(vec![
        VariableSpec::new("Gender", VariableKind::Nominal, &["Male", "Female"]),
        VariableSpec::new("Age", VariableKind::Ordinal, &["15-24", "25-64", "65+"]),
        VariableSpec::new(
            "Disability",
            VariableKind::Nominal,
            &[
                "Seeing",
                "Hearing",
                "Mobility",
                "Flexibility",
                "Dexterity",
                "Pain",
                "Learning",
                "Developmental",
                "MentalHealth",
                "Memory",
            ],
        ),
        VariableSpec::new("InteractionFamily", VariableKind::Ordinal, &FREQUENCY),
        VariableSpec::new("InteractionServices", VariableKind::Ordinal, &FREQUENCY),
        VariableSpec::new("InteractionHealthcare", VariableKind::Ordinal, &FREQUENCY),
    ])
    .expect("fixture schema is valid")
}

pub fn fixture_dag() -> Dag {
    let names = fixture_schema().names().map(str::to_string).collect();
    Dag::from_edges(
        names,
        &[
            ("Gender", "Age"),
            ("Age", "Disability"),
            ("Disability", "InteractionFamily"),
            ("Disability", "InteractionServices"),
            ("Disability", "InteractionHealthcare"),
        ],
    )
    .expect("fixture graph is acyclic")
}

/// The DAG edges as `(parent, child)` column pairs, in reporting order.
pub fn fixture_edges() -> Vec<(usize, usize)> {
    vec![
        (GENDER, AGE),
        (AGE, DISABILITY),
        (DISABILITY, INTERACTION_FAMILY),
        (DISABILITY, INTERACTION_SERVICES),
        (DISABILITY, INTERACTION_HEALTHCARE),
    ]
}

fn rows(r: &[&[f64]]) -> Vec<Vec<f64>> {
    r.iter().map(|x| x.to_vec()).collect()
}

pub fn fixture_model() -> BayesNet {
    let gender = rows(&[&[0.45, 0.55]]);
    let age = rows(&[&[0.15, 0.60, 0.25], &[0.13, 0.60, 0.27]]);
    let disability = rows(&[
        &[0.05, 0.04, 0.06, 0.06, 0.03, 0.16, 0.20, 0.06, 0.28, 0.06],
        &[0.08, 0.07, 0.14, 0.14, 0.06, 0.24, 0.06, 0.05, 0.10, 0.06],
        &[0.11, 0.13, 0.19, 0.16, 0.08, 0.15, 0.02, 0.086, 0.03, 0.044],
    ]);
    let family = rows(&[
        &[0.40, 0.25, 0.18, 0.10, 0.07],
        &[0.30, 0.25, 0.22, 0.13, 0.10],
        &[0.42, 0.26, 0.17, 0.09, 0.06],
        &[0.45, 0.25, 0.16, 0.08, 0.06],
        &[0.40, 0.26, 0.18, 0.10, 0.06],
        &[0.38, 0.26, 0.19, 0.10, 0.07],
        &[0.16, 0.20, 0.27, 0.20, 0.17],
        &[0.06, 0.12, 0.22, 0.30, 0.30],
        &[0.18, 0.22, 0.27, 0.19, 0.14],
        &[0.14, 0.18, 0.26, 0.22, 0.20],
    ]);
    let services = rows(&[
        &[0.20, 0.22, 0.26, 0.18, 0.14],
        &[0.16, 0.20, 0.26, 0.21, 0.17],
        &[0.28, 0.26, 0.22, 0.14, 0.10],
        &[0.34, 0.26, 0.20, 0.12, 0.08],
        &[0.33, 0.27, 0.21, 0.11, 0.08],
        &[0.36, 0.26, 0.20, 0.11, 0.07],
        &[0.22, 0.24, 0.25, 0.16, 0.13],
        &[0.10, 0.16, 0.24, 0.26, 0.24],
        &[0.20, 0.22, 0.26, 0.18, 0.14],
        &[0.17, 0.21, 0.26, 0.20, 0.16],
    ]);
    let healthcare = rows(&[
        &[0.30, 0.26, 0.22, 0.13, 0.09],
        &[0.22, 0.24, 0.25, 0.16, 0.13],
        &[0.26, 0.25, 0.24, 0.15, 0.10],
        &[0.34, 0.27, 0.21, 0.11, 0.07],
        &[0.36, 0.27, 0.20, 0.10, 0.07],
        &[0.20, 0.23, 0.27, 0.18, 0.12],
        &[0.32, 0.26, 0.21, 0.12, 0.09],
        &[0.14, 0.18, 0.24, 0.24, 0.20],
        &[0.15, 0.19, 0.26, 0.22, 0.18],
        &[0.18, 0.21, 0.25, 0.20, 0.16],
    ]);
    BayesNet::from_rows(
        Arc::new(fixture_schema()),
        fixture_dag(),
        vec![gender, age, disability, family, services, healthcare],
    )
    .expect("fixture CPTs are valid")
}

/// Ground-truth model and `n_rows` records sampled from it with `seed`.
pub fn make_fixture(seed: u64, n_rows: usize) -> Result<(BayesNet, DataTable)> {
    make_fixture_with(seed, n_rows, Execution::default())
}

pub fn make_fixture_with(seed: u64, n_rows: usize, exec: Execution) -> Result<(BayesNet, DataTable)> {
    let model = fixture_model();
    let data = ancestral_sample_with(&model, SampleRequest::new(n_rows, seed)?, exec)?;
    Ok((model, data))
}
