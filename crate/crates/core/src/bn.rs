//! CPT estimation for a fixed DAG and ancestral sampling.

use rand::Rng;

use crate::cpt::Cpt;
use crate::dag::Dag;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::BayesNet;
use crate::par::{self, Execution};
use crate::rng::record_stream;
use crate::table::DataTable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Pseudo-count added to every category of every CPT row.
    pub smoothing_alpha: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { smoothing_alpha: 1.0 }
    }
}

impl FitOptions {
    pub fn new(smoothing_alpha: f64) -> Result<Self> {
        if !(smoothing_alpha.is_finite() && smoothing_alpha >= 0.0) {
            return Err(Error::input(format!("smoothing alpha must be >= 0, got {smoothing_alpha}")));
        }
        Ok(FitOptions { smoothing_alpha })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleRequest {
    pub n_rows: usize,
    pub seed: u64,
}

impl SampleRequest {
    pub fn new(n_rows: usize, seed: u64) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::input("n_rows must be at least 1"));
        }
        Ok(SampleRequest { n_rows, seed })
    }
}

/// Counts of `node` per parent configuration, laid out `config * card + value`.
pub fn conditional_counts(data: &DataTable, node: usize, parents: &[usize]) -> Vec<u64> {
    let schema = data.schema();
    let card = schema.cardinality(node);
    let n_configs: usize = parents.iter().map(|&p| schema.cardinality(p)).product();
    let mut counts = vec![0u64; n_configs * card];
    for row in data.rows() {
        let cfg = parents.iter().fold(0, |acc, &p| acc * schema.cardinality(p) + row[p]);
        counts[cfg * card + row[node]] += 1;
    }
    counts
}

/// Maximum-likelihood CPTs with additive smoothing:
/// `(count(c | cfg) + α) / (total(cfg) + α·card)`.
pub fn fit_cpts(data: &DataTable, dag: &Dag, opts: FitOptions) -> Result<Vec<Cpt>> {
    if data.is_empty() {
        return Err(Error::input("cannot fit CPTs on an empty table"));
    }
    FitOptions::new(opts.smoothing_alpha)?;
    let dag = dag.aligned_to(data.schema())?;
    let schema = data.schema();
    (0..dag.len())
        .map(|node| {
            let parents = dag.parents(node).to_vec();
            let parent_cards: Vec<usize> = parents.iter().map(|&p| schema.cardinality(p)).collect();
            let card = schema.cardinality(node);
            let counts = conditional_counts(data, node, &parents);
            let rows = counts
                .chunks_exact(card)
                .enumerate()
                .map(|(cfg, row)| {
                    let total: u64 = row.iter().sum();
                    if total == 0 && opts.smoothing_alpha == 0.0 {
                        return Err(Error::input(format!(
                            "parent configuration {cfg} of `{}` never occurs in the data; set smoothing alpha > 0",
                            schema.variable(node).name
                        )));
                    }
                    let denom = total as f64 + opts.smoothing_alpha * card as f64;
                    Distribution::new(row.iter().map(|&c| (c as f64 + opts.smoothing_alpha) / denom).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            Cpt::new(node, card, parents, parent_cards, rows)
        })
        .collect()
}

/// Fits CPTs and bundles them with the schema and (aligned) DAG.
pub fn fit_bayes_net(data: &DataTable, dag: &Dag, opts: FitOptions) -> Result<BayesNet> {
    let cpts = fit_cpts(data, dag, opts)?;
    BayesNet::new(data.schema_arc().clone(), dag.aligned_to(data.schema())?, cpts)
}

pub fn ancestral_sample(model: &BayesNet, req: SampleRequest) -> Result<DataTable> {
    ancestral_sample_with(model, req, Execution::default())
}

/// Draws `req.n_rows` records. Record `r` uses stream `r` of `req.seed` and
/// consumes one uniform per node in topological order, so the output does not
/// depend on how records are split across workers.
pub fn ancestral_sample_with(model: &BayesNet, req: SampleRequest, exec: Execution) -> Result<DataTable> {
    SampleRequest::new(req.n_rows, req.seed)?;
    let order = model.dag().topological_order();
    let cpts = model.cpts();
    let values = par::fill_rows(req.n_rows, model.dag().len(), exec, |r, record: &mut [usize]| {
        let mut rng = record_stream(req.seed, r as u64);
        for &node in order {
            let cpt = &cpts[node];
            let u: f64 = rng.random();
            record[node] = cpt.row(cpt.config_of_record(record)).sample_index(u);
        }
    });
    Ok(DataTable::from_flat_unchecked(model.schema_arc().clone(), values))
}

/// `Σ_rows ln P(row)`; errors on the first impossible record.
pub fn log_likelihood(data: &DataTable, model: &BayesNet) -> Result<f64> {
    if data.schema() != model.schema() {
        return Err(Error::input("table schema differs from model schema"));
    }
    let mut ll = 0.0;
    for (i, row) in data.rows().enumerate() {
        let p = model.joint_probability(row)?;
        if p <= 0.0 {
            return Err(Error::ZeroProbabilityRecord { row: i });
        }
        ll += p.ln();
    }
    Ok(ll)
}
