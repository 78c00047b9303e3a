//! Command line front end. Exit codes: 0 success, 2 input/config error,
//! 3 numeric/model error, 4 inconsistent evidence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use catsynth::eval::{evaluate_pair, rank_methods, render_ranking_markdown, EvalOptions, EvalReport, MethodScore};
use catsynth::fixture::{fixture_dag, make_fixture_with};
use catsynth::inference::{evidence_shift_report, Direction, Evidence, Query};
use catsynth::io::{export_csv, ingest_csv, load_dag, load_schema, write_bytes, SynthModel};
use catsynth::pipeline::{fit_method, method_seed, run_pipeline, EpsilonSetting, Method, MethodSpec, PipelineConfig};
use catsynth::rng::derive_seed;
use catsynth::{Error, Execution, Result};

#[derive(Parser)]
#[command(name = "catsynth", version, about = "Categorical synthetic data: fit, sample, evaluate, rank and query")]
struct Cli {
    /// Worker threads; 1 runs sequentially, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the bundled fixture: real.csv, model.json, schema.json, dag.json, config.toml.
    Fixture {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = catsynth::fixture::SURVEY_ROWS)]
        rows: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one synthesizer and write its model JSON.
    Fit(FitArgs),
    /// Draw synthetic records from a model JSON.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a synthetic CSV against the real one.
    Eval {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        synth: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        /// DAG whose edges get mutual-information rows.
        #[arg(long)]
        dag: Option<PathBuf>,
        #[arg(long, default_value_t = catsynth::eval::DEFAULT_KL_SMOOTHING)]
        kl_smoothing: f64,
        /// Report JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gate and rank evaluation reports; each report's file stem is its label.
    Rank {
        #[arg(long = "report", required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value_t = catsynth::eval::DEFAULT_GATE_ALPHA)]
        alpha: f64,
        /// Ranking JSON path; the markdown table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Posterior shift of a target variable under evidence.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        target: String,
        /// VAR=LABEL, repeatable.
        #[arg(long = "evidence", value_parser = parse_evidence)]
        evidence: Vec<(String, String)>,
        #[arg(long, value_enum, default_value_t = DirectionArg::Predictive)]
        direction: DirectionArg,
    },
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// bn, independent, correlated or copula.
    #[arg(long)]
    method: String,
    /// Privacy budget: a positive number or `off`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    max_parents: Option<usize>,
    /// Additive smoothing for `bn`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Expert DAG for `bn`.
    #[arg(long)]
    dag: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Predictive,
    Diagnostic,
}

fn parse_evidence(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((var, label)) if !var.is_empty() && !label.is_empty() => Ok((var.to_string(), label.to_string())),
        _ => Err(format!("expected VAR=LABEL, got `{s}`")),
    }
}

const FIXTURE_CONFIG: &str = r#"dataset = "real.csv"
schema = "schema.json"
expert_dag = "dag.json"
seed = 7
output_dir = "run"

[[methods]]
method = "bn"

[[methods]]
method = "independent"
epsilon = 10

[[methods]]
method = "correlated"
max_parents = 2
epsilon = 5

[[methods]]
method = "copula"
"#;

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn fit(args: FitArgs, exec: Execution) -> Result<()> {
    let spec = MethodSpec {
        method: args.method,
        epsilon: args.epsilon.map(EpsilonSetting::Word),
        max_parents: args.max_parents,
        alpha: args.alpha,
        epochs: None,
    };
    let method = Method::from_spec(&spec)?;
    let schema = args.schema.as_deref().map(load_schema).transpose()?;
    let real = ingest_csv(&args.data, schema.as_ref())?;
    let dag = args.dag.as_deref().map(load_dag).transpose()?.map(|d| d.aligned_to(real.schema())).transpose()?;
    // Same seed expansion as `run`, so a fit here matches the pipeline's fit.
    let fit_seed = derive_seed(method_seed(args.seed, &method.label()), 1);
    let model = fit_method(&method, &real, dag.as_ref(), fit_seed, exec)?;
    write_bytes(&args.out, model.to_json()?.as_bytes())
}

fn eval(
    real: &Path,
    synth: &Path,
    schema: Option<&Path>,
    dag: Option<&Path>,
    kl_smoothing: f64,
    exec: Execution,
) -> Result<EvalReport> {
    let schema = match schema {
        Some(p) => Some(load_schema(p)?),
        None => None,
    };
    let real = ingest_csv(real, schema.as_ref())?;
    // The synthetic table must share the real table's category order.
    let synth = ingest_csv(synth, Some(real.schema()))?;
    let edges = match dag {
        Some(p) => load_dag(p)?.aligned_to(real.schema())?.edges(),
        None => Vec::new(),
    };
    evaluate_pair(&real, &synth, &edges, EvalOptions { kl_smoothing, exec })
}

fn rank(reports: &[PathBuf], alpha: f64, out: Option<&Path>) -> Result<()> {
    let mut scores = Vec::with_capacity(reports.len());
    for path in reports {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Error::Input(format!("cannot derive a label from {}", path.display())))?;
        let report: EvalReport = serde_json::from_str(&catsynth::io::read_text(path)?)?;
        scores.push(MethodScore::from_report(&label, "", &label, &report));
    }
    let ranked = rank_methods(scores, alpha)?;
    print!("{}", render_ranking_markdown(&ranked, alpha));
    if let Some(p) = out {
        write_bytes(p, serde_json::to_string_pretty(&ranked)?.as_bytes())?;
    }
    Ok(())
}

fn query(model: &Path, target: &str, evidence: &[(String, String)], direction: DirectionArg) -> Result<()> {
    let model = match SynthModel::load(model)? {
        SynthModel::BayesNet(m) => m,
        SynthModel::Copula(_) => return Err(Error::Input("query needs a Bayesian-network model".into())),
    };
    let schema = model.schema();
    let target = schema.require_index(target)?;
    let evidence = Evidence::from_labels(schema, evidence)?;
    let direction = match direction {
        DirectionArg::Predictive => Direction::Predictive,
        DirectionArg::Diagnostic => Direction::Diagnostic,
    };
    let query = Query::new(target, evidence, direction)?;
    let report = evidence_shift_report(&model, &query)?;
    print_json(&report.to_json(schema, &query))
}

fn execute(cli: Cli) -> Result<()> {
    let exec = if cli.threads == 1 { Execution::Sequential } else { Execution::Parallel };
    #[cfg(feature = "parallel")]
    if cli.threads > 1 {
        // Ignore the error raised when a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match cli.command {
        Command::Fixture { seed, rows, out } => {
            let (model, data) = make_fixture_with(seed, rows, exec)?;
            export_csv(&data, &out.join("real.csv"))?;
            write_bytes(&out.join("model.json"), model.to_json()?.as_bytes())?;
            write_bytes(&out.join("schema.json"), serde_json::to_string_pretty(model.schema())?.as_bytes())?;
            write_bytes(&out.join("dag.json"), serde_json::to_string_pretty(&fixture_dag())?.as_bytes())?;
            write_bytes(&out.join("config.toml"), FIXTURE_CONFIG.as_bytes())
        }
        Command::Fit(args) => fit(args, exec),
        Command::Sample { model, rows, seed, out } => {
            let table = SynthModel::load(&model)?.sample(rows, seed, exec)?;
            export_csv(&table, &out)
        }
        Command::Eval { real, synth, schema, dag, kl_smoothing, out } => {
            let report = eval(&real, &synth, schema.as_deref(), dag.as_deref(), kl_smoothing, exec)?;
            match out {
                Some(p) => write_bytes(&p, serde_json::to_string_pretty(&report)?.as_bytes()),
                None => print_json(&report),
            }
        }
        Command::Rank { reports, alpha, out } => rank(&reports, alpha, out.as_deref()),
        Command::Run { config, seed, out } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let outcome = run_pipeline(&cfg, exec)?;
            print!("{}", render_ranking_markdown(&outcome.report.ranking, cfg.gate_alpha));
            Ok(())
        }
        Command::Query { model, target, evidence, direction } => query(&model, &target, &evidence, direction),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
