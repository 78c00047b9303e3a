//! End-to-end run: ingest → fit → sample → evaluate → rank → write artifacts.
//!
//! Seeds: each method gets `derive_seed(config.seed, label_tag(label))`, where
//! `label_tag` is the first eight bytes (big-endian) of SHA-256 of the method
//! label. Fitting noise uses `derive_seed(method_seed, 1)` and sampling uses
//! `derive_seed(method_seed, 2)`. A method's output therefore depends only on
//! the global seed, its own parameters and the input data.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baseline::{fit_correlated, fit_independent, learn_structure_with, PrivacyBudget, StructureOptions};
use crate::bn::{fit_bayes_net, FitOptions};
use crate::copula::fit_copula;
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_pair, rank_methods, render_ranking_markdown, render_structure_markdown, EvalOptions, EvalReport,
    MethodScore, DEFAULT_GATE_ALPHA, DEFAULT_KL_SMOOTHING,
};
use crate::io::{export_csv, ingest_csv, load_dag, load_schema, write_bytes, SynthModel};
use crate::model::FORMAT_VERSION;
use crate::par::{self, Execution};
use crate::rng::derive_seed;
use crate::table::DataTable;

/// `epsilon = 5` or `epsilon = "off"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSetting {
    Value(f64),
    Word(String),
}

impl EpsilonSetting {
    pub fn budget(&self) -> Result<PrivacyBudget> {
        match self {
            EpsilonSetting::Value(v) => PrivacyBudget::epsilon(*v),
            EpsilonSetting::Word(w) => w.parse(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<EpsilonSetting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_parents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<u64>,
}

impl MethodSpec {
    pub fn named(method: &str) -> Self {
        MethodSpec { method: method.to_string(), epsilon: None, max_parents: None, alpha: None, epochs: None }
    }
}

/// A validated method with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    BayesNet { alpha: f64 },
    Independent { budget: PrivacyBudget },
    Correlated { budget: PrivacyBudget, max_parents: usize },
    Copula,
    /// Recognized but not implemented; reported as excluded.
    OutOfScope { id: String, epochs: Option<u64> },
}

impl Method {
    pub fn from_spec(spec: &MethodSpec) -> Result<Self> {
        let reject = |what: &str| -> Result<Method> {
            Err(Error::input(format!("`{what}` is not a parameter of method `{}`", spec.method)))
        };
        let budget = || spec.epsilon.as_ref().map_or(Ok(PrivacyBudget::Off), EpsilonSetting::budget);
        if spec.epochs.is_some() && spec.method != "ctgan" {
            return Err(Error::input(format!(
                "`epochs` is only meaningful for ctgan, not `{}`",
                spec.method
            )));
        }
        match spec.method.as_str() {
            "bn" => {
                if spec.epsilon.is_some() {
                    return reject("epsilon");
                }
                if spec.max_parents.is_some() {
                    return reject("max_parents");
                }
                let alpha = spec.alpha.unwrap_or(FitOptions::default().smoothing_alpha);
                FitOptions::new(alpha)?;
                Ok(Method::BayesNet { alpha })
            }
            "independent" => {
                if spec.max_parents.is_some() {
                    return reject("max_parents");
                }
                if spec.alpha.is_some() {
                    return reject("alpha");
                }
                Ok(Method::Independent { budget: budget()? })
            }
            "correlated" => {
                if spec.alpha.is_some() {
                    return reject("alpha");
                }
                let max_parents = spec
                    .max_parents
                    .ok_or_else(|| Error::input("method `correlated` requires `max_parents`"))?;
                Ok(Method::Correlated { budget: budget()?, max_parents })
            }
            "copula" => {
                if spec.epsilon.is_some() {
                    return reject("epsilon");
                }
                if spec.max_parents.is_some() {
                    return reject("max_parents");
                }
                if spec.alpha.is_some() {
                    return reject("alpha");
                }
                Ok(Method::Copula)
            }
            "ctgan" => Ok(Method::OutOfScope { id: "ctgan".into(), epochs: spec.epochs }),
            other => Err(Error::input(format!(
                "unknown method `{other}`; expected one of bn, independent, correlated, copula"
            ))),
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Method::BayesNet { .. } => "bn",
            Method::Independent { .. } => "independent",
            Method::Correlated { .. } => "correlated",
            Method::Copula => "copula",
            Method::OutOfScope { id, .. } => id,
        }
    }

    /// Parameter string for reports, e.g. `k = 2, epsilon = 5`.
    pub fn parameters(&self) -> String {
        match self {
            Method::BayesNet { alpha } if *alpha == 1.0 => String::new(),
            Method::BayesNet { alpha } => format!("alpha = {alpha}"),
            Method::Independent { budget } => format!("epsilon = {budget}"),
            Method::Correlated { budget, max_parents } => format!("k = {max_parents}, epsilon = {budget}"),
            Method::Copula => String::new(),
            Method::OutOfScope { epochs: Some(e), .. } => format!("epochs = {e}"),
            Method::OutOfScope { .. } => String::new(),
        }
    }

    /// File-name-safe unique label.
    pub fn label(&self) -> String {
        match self {
            Method::BayesNet { alpha } if *alpha == 1.0 => "bn".into(),
            Method::BayesNet { alpha } => format!("bn_alpha{alpha}"),
            Method::Independent { budget } => format!("independent_eps{budget}"),
            Method::Correlated { budget, max_parents } => format!("correlated_k{max_parents}_eps{budget}"),
            Method::Copula => "copula".into(),
            Method::OutOfScope { id, epochs: Some(e) } => format!("{id}_epochs{e}"),
            Method::OutOfScope { id, .. } => id.clone(),
        }
    }
}

fn default_gate_alpha() -> f64 {
    DEFAULT_GATE_ALPHA
}

fn default_kl_smoothing() -> f64 {
    DEFAULT_KL_SMOOTHING
}

/// Relative paths are resolved against the directory of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: PathBuf,
    /// Schema JSON; when absent the schema is inferred from the CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    /// Expert DAG JSON, required by `bn`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert_dag: Option<PathBuf>,
    pub methods: Vec<MethodSpec>,
    /// Rows per synthetic table; defaults to the dataset size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_rows: Option<usize>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// `[source, target]` pairs for mutual-information reporting; defaults to the expert DAG's edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[String; 2]>>,
    #[serde(default = "default_gate_alpha")]
    pub gate_alpha: f64,
    #[serde(default = "default_kl_smoothing")]
    pub kl_smoothing: f64,
}

impl PipelineConfig {
    /// Parses TOML (or JSON when the file ends in `.json`) and resolves relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_text(path)?;
        let mut cfg: PipelineConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::input(format!("invalid config {}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.dataset);
        resolve(&mut cfg.output_dir);
        if let Some(p) = cfg.schema.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.expert_dag.as_mut() {
            resolve(p);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<Vec<Method>> {
        if self.methods.is_empty() {
            return Err(Error::input("config lists no methods"));
        }
        if !(self.gate_alpha > 0.0 && self.gate_alpha < 1.0) {
            return Err(Error::input("gate_alpha must lie in (0, 1)"));
        }
        if !(self.kl_smoothing >= 0.0 && self.kl_smoothing.is_finite()) {
            return Err(Error::input("kl_smoothing must be finite and non-negative"));
        }
        if self.n_rows == Some(0) {
            return Err(Error::input("n_rows must be at least 1"));
        }
        let methods = self.methods.iter().map(Method::from_spec).collect::<Result<Vec<_>>>()?;
        let mut labels: Vec<String> = methods.iter().map(Method::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("method `{}` is listed twice", w[0])));
        }
        if self.expert_dag.is_none() && methods.iter().any(|m| matches!(m, Method::BayesNet { .. })) {
            return Err(Error::input("method `bn` requires `expert_dag`"));
        }
        Ok(methods)
    }

    /// SHA-256 (hex) of the canonical JSON form of this config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Seed tag of a method label.
pub fn label_tag(label: &str) -> u64 {
    let d = Sha256::digest(label.as_bytes());
    u64::from_be_bytes(d[..8].try_into().expect("8 bytes"))
}

pub fn method_seed(global: u64, label: &str) -> u64 {
    derive_seed(global, label_tag(label))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<StageTiming>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodEvaluation {
    pub label: String,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub gate_alpha: f64,
    pub kl_smoothing: f64,
    pub ranking: Vec<MethodScore>,
    pub evaluations: Vec<MethodEvaluation>,
}

impl RunReport {
    pub fn to_markdown(&self) -> String {
        let mut md = String::from("# Synthetic data comparison\n\n");
        md.push_str(&render_ranking_markdown(&self.ranking, self.gate_alpha));
        if let Some(best) = self.ranking.iter().find(|s| s.rank == Some(1)) {
            if let Some(ev) = self.evaluations.iter().find(|e| e.label == best.label) {
                md.push_str(&format!("\n## Structure preservation: {} (bits)\n\n", best.label));
                md.push_str(&render_structure_markdown(&ev.report.structure));
            }
        }
        md
    }
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub report: RunReport,
}

struct MethodOutput {
    score: MethodScore,
    evaluation: Option<EvalReport>,
    model_json: Option<String>,
    synthetic: Option<DataTable>,
    millis: f64,
}

/// Fits one method. `fit_seed` drives any privacy noise.
pub fn fit_method(
    method: &Method,
    real: &DataTable,
    expert_dag: Option<&Dag>,
    fit_seed: u64,
    exec: Execution,
) -> Result<SynthModel> {
    Ok(match method {
        Method::BayesNet { alpha } => {
            let dag = expert_dag.ok_or_else(|| Error::input("method `bn` requires an expert DAG"))?;
            SynthModel::BayesNet(fit_bayes_net(real, dag, FitOptions::new(*alpha)?)?)
        }
        Method::Independent { budget } => SynthModel::BayesNet(fit_independent(real, *budget, fit_seed)?),
        Method::Correlated { budget, max_parents } => {
            let dag = learn_structure_with(real, StructureOptions::new(*max_parents), *budget, exec)?;
            SynthModel::BayesNet(fit_correlated(real, &dag, *budget, fit_seed)?)
        }
        Method::Copula => SynthModel::Copula(fit_copula(real)?),
        Method::OutOfScope { id, .. } => return Err(Error::input(out_of_scope_reason(id))),
    })
}

/// Fits with `derive_seed(seed, 1)` and samples with `derive_seed(seed, 2)`.
pub fn fit_and_sample(
    method: &Method,
    real: &DataTable,
    expert_dag: Option<&Dag>,
    n_rows: usize,
    seed: u64,
    exec: Execution,
) -> Result<(SynthModel, DataTable)> {
    let model = fit_method(method, real, expert_dag, derive_seed(seed, 1), exec)?;
    let synth = model.sample(n_rows, derive_seed(seed, 2), exec)?;
    Ok((model, synth))
}

/// Failure text recorded for recognized but unimplemented methods.
pub fn out_of_scope_reason(id: &str) -> String {
    format!("excluded: out of scope ({id} training is not implemented)")
}

fn resolve_edges(cfg: &PipelineConfig, real: &DataTable, dag: Option<&Dag>) -> Result<Vec<(usize, usize)>> {
    let schema = real.schema();
    match (&cfg.edges, dag) {
        (Some(edges), _) => edges
            .iter()
            .map(|[a, b]| Ok((schema.require_index(a)?, schema.require_index(b)?)))
            .collect(),
        (None, Some(d)) => Ok(d.edges()),
        (None, None) => Ok(Vec::new()),
    }
}

fn rel(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).to_string_lossy().replace('\\', "/")
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn run_pipeline(cfg: &PipelineConfig, exec: Execution) -> Result<RunOutcome> {
    let methods = cfg.validate()?;
    let mut stages = Vec::new();
    let clock = Instant::now();
    let schema = cfg.schema.as_deref().map(load_schema).transpose()?;
    let real = ingest_csv(&cfg.dataset, schema.as_ref())?;
    if real.is_empty() {
        return Err(Error::input("dataset has no records"));
    }
    let dag = cfg.expert_dag.as_deref().map(load_dag).transpose()?.map(|d| d.aligned_to(real.schema())).transpose()?;
    let edges = resolve_edges(cfg, &real, dag.as_ref())?;
    let n_rows = cfg.n_rows.unwrap_or(real.n_rows());
    stages.push(StageTiming { stage: "ingest".into(), millis: clock.elapsed().as_secs_f64() * 1e3 });

    let eval_opts = EvalOptions { kl_smoothing: cfg.kl_smoothing, exec };
    let outputs: Vec<MethodOutput> = par::map_range(methods.len(), exec, |i| {
        let method = &methods[i];
        let start = Instant::now();
        let label = method.label();
        let params = method.parameters();
        let seed = method_seed(cfg.seed, &label);
        if let Method::OutOfScope { id, .. } = method {
            return MethodOutput {
                score: MethodScore::failed(method.id(), &params, &label, out_of_scope_reason(id)),
                evaluation: None,
                model_json: None,
                synthetic: None,
                millis: 0.0,
            };
        }
        let result = fit_and_sample(method, &real, dag.as_ref(), n_rows, seed, exec).and_then(|(model, synth)| {
            let report = evaluate_pair(&real, &synth, &edges, eval_opts)?;
            Ok((model.to_json()?, synth, report))
        });
        let millis = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok((json, synth, report)) => MethodOutput {
                score: MethodScore::from_report(method.id(), &params, &label, &report),
                evaluation: Some(report),
                model_json: Some(json),
                synthetic: Some(synth),
                millis,
            },
            Err(e) => MethodOutput {
                score: MethodScore::failed(method.id(), &params, &label, e.to_string()),
                evaluation: None,
                model_json: None,
                synthetic: None,
                millis,
            },
        }
    });

    let out = &cfg.output_dir;
    let mut artifacts = Vec::new();
    let mut scores = Vec::with_capacity(outputs.len());
    let mut evaluations = Vec::new();
    for o in outputs {
        let label = o.score.label.clone();
        stages.push(StageTiming { stage: format!("method:{label}"), millis: o.millis });
        if let Some(synth) = &o.synthetic {
            let p = out.join("synthetic").join(format!("{label}.csv"));
            export_csv(synth, &p)?;
            artifacts.push(rel(&p, out));
        }
        if let Some(json) = &o.model_json {
            let p = out.join("models").join(format!("{label}.json"));
            write_bytes(&p, json.as_bytes())?;
            artifacts.push(rel(&p, out));
        }
        if let Some(report) = o.evaluation {
            for h in &report.histograms {
                let p = out.join("histograms").join(&label).join(format!("{}.csv", sanitize(&h.column)));
                write_bytes(&p, h.to_csv()?.as_bytes())?;
                artifacts.push(rel(&p, out));
            }
            evaluations.push(MethodEvaluation { label: label.clone(), report });
        }
        scores.push(o.score);
    }

    let t = Instant::now();
    let ranking = rank_methods(scores, cfg.gate_alpha)?;
    stages.push(StageTiming { stage: "rank".into(), millis: t.elapsed().as_secs_f64() * 1e3 });

    let report = RunReport {
        format_version: FORMAT_VERSION,
        gate_alpha: cfg.gate_alpha,
        kl_smoothing: cfg.kl_smoothing,
        ranking,
        evaluations,
    };
    let p = out.join("report.json");
    write_bytes(&p, serde_json::to_string_pretty(&report)?.as_bytes())?;
    artifacts.push(rel(&p, out));
    let p = out.join("report.md");
    write_bytes(&p, report.to_markdown().as_bytes())?;
    artifacts.push(rel(&p, out));

    stages.push(StageTiming { stage: "total".into(), millis: clock.elapsed().as_secs_f64() * 1e3 });
    let manifest = RunManifest {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        stages,
        artifacts,
    };
    write_bytes(&out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(RunOutcome { manifest, report })
}
