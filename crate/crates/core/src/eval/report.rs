//! Evaluation of a (real, synthetic) table pair and its renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{
    column_chi_square, column_kl, column_tvd, counts_to_distribution, entropy_bits, pair_mutual_information,
    DEFAULT_KL_SMOOTHING,
};
use super::rank::MethodScore;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::table::DataTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnMetrics {
    pub name: String,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// nats
    pub kl: f64,
    pub tvd: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub kl_median: f64,
    pub chi_square_median: f64,
    pub tvd_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeEntropy {
    pub node: String,
    pub real: f64,
    pub synthetic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeInformation {
    pub source: String,
    pub target: String,
    pub real: f64,
    pub synthetic: f64,
}

/// Entropy per node and mutual information per edge, both in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureMetrics {
    pub entropy: Vec<NodeEntropy>,
    pub mutual_information: Vec<EdgeInformation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub column: String,
    pub categories: Vec<String>,
    pub real_freq: Vec<f64>,
    pub synth_freq: Vec<f64>,
}

impl Histogram {
    /// CSV with header `category,real_freq,synth_freq`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["category", "real_freq", "synth_freq"])?;
        for ((c, r), s) in self.categories.iter().zip(&self.real_freq).zip(&self.synth_freq) {
            w.write_record([c.as_str(), &r.to_string(), &s.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub kl_smoothing: f64,
    pub exec: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { kl_smoothing: DEFAULT_KL_SMOOTHING, exec: Execution::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub kl: String,
    pub entropy: String,
    pub mutual_information: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { kl: "nats".into(), entropy: "bits".into(), mutual_information: "bits".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub units: Units,
    pub n_real: usize,
    pub n_synthetic: usize,
    pub columns: Vec<ColumnMetrics>,
    pub aggregates: Aggregates,
    pub structure: StructureMetrics,
    pub histograms: Vec<Histogram>,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Column metrics, structure metrics over `edges` (pairs of column indices)
/// and histogram data for one synthetic table.
pub fn evaluate_pair(real: &DataTable, synth: &DataTable, edges: &[(usize, usize)], opts: EvalOptions) -> Result<EvalReport> {
    if real.schema() != synth.schema() {
        return Err(Error::input("real and synthetic tables have different schemas"));
    }
    if real.is_empty() || synth.is_empty() {
        return Err(Error::input("cannot evaluate an empty table"));
    }
    let schema = real.schema();
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= schema.len() || b >= schema.len()) {
        return Err(Error::input(format!("edge ({a}, {b}) refers to a missing column")));
    }

    struct PerColumn {
        metrics: ColumnMetrics,
        entropy: NodeEntropy,
        histogram: Histogram,
    }

    let per_column = par::map_range(schema.len(), opts.exec, |col| -> Result<PerColumn> {
        let spec = schema.variable(col);
        let rc = real.column_counts(col);
        let sc = synth.column_counts(col);
        let rd = counts_to_distribution(&rc)?;
        let sd = counts_to_distribution(&sc)?;
        let chi = column_chi_square(&rc, &sc, spec.kind)?;
        Ok(PerColumn {
            metrics: ColumnMetrics {
                name: spec.name.clone(),
                chi_square: chi.statistic,
                degrees_of_freedom: chi.degrees_of_freedom,
                p_value: chi.p_value,
                kl: column_kl(&rd, &sd, opts.kl_smoothing)?,
                tvd: column_tvd(&rd, &sd)?,
            },
            entropy: NodeEntropy {
                node: spec.name.clone(),
                real: entropy_bits(rd.probs()),
                synthetic: entropy_bits(sd.probs()),
            },
            histogram: Histogram {
                column: spec.name.clone(),
                categories: spec.categories.clone(),
                real_freq: rd.probs().to_vec(),
                synth_freq: sd.probs().to_vec(),
            },
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mutual_information = edges
        .iter()
        .map(|&(a, b)| {
            let (ca, cb) = (schema.cardinality(a), schema.cardinality(b));
            let mi = |t: &DataTable| {
                let counts: Vec<f64> = t.pair_counts(a, b).into_iter().map(|c| c as f64).collect();
                pair_mutual_information(&counts, ca, cb)
            };
            Ok(EdgeInformation {
                source: schema.variable(a).name.clone(),
                target: schema.variable(b).name.clone(),
                real: mi(real)?,
                synthetic: mi(synth)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = Vec::with_capacity(per_column.len());
    let mut entropy = Vec::with_capacity(per_column.len());
    let mut histograms = Vec::with_capacity(per_column.len());
    for pc in per_column {
        columns.push(pc.metrics);
        entropy.push(pc.entropy);
        histograms.push(pc.histogram);
    }
    let kls: Vec<f64> = columns.iter().map(|c| c.kl).collect();
    let chis: Vec<f64> = columns.iter().map(|c| c.chi_square).collect();
    let aggregates = Aggregates {
        kl_median: median(&kls),
        chi_square_median: median(&chis),
        tvd_mean: columns.iter().map(|c| c.tvd).sum::<f64>() / columns.len() as f64,
    };
    Ok(EvalReport {
        units: Units::default(),
        n_real: real.n_rows(),
        n_synthetic: synth.n_rows(),
        columns,
        aggregates,
        structure: StructureMetrics { entropy, mutual_information },
        histograms,
    })
}

fn mode_name(method: &str) -> &str {
    match method {
        "bn" => "Bayesian Network",
        "independent" => "Independent attribute mode",
        "correlated" => "Correlated attribute mode",
        "copula" => "Gaussian Copula",
        "ctgan" => "CTGAN",
        other => other,
    }
}

fn sci(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.2E}")
    } else {
        format!("{x:.4}")
    }
}

/// Markdown comparison table: Mode / Parameters / KL median / Chi-Square / TVD / Rank.
/// Chi-square medians of methods that failed the gate are bold.
pub fn render_ranking_markdown(scores: &[MethodScore], alpha: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| Mode | Parameters | KL median | Chi-Square | TVD | Rank |");
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for s in scores {
        let params = if s.parameters.is_empty() { "-" } else { &s.parameters };
        match (&s.aggregates, &s.failure) {
            (Some(a), None) => {
                let chi = if s.gate_passed { format!("{:.4}", a.chi_square_median) } else { format!("**{:.4}**", a.chi_square_median) };
                let rank = s.rank.map_or("-".to_string(), |r| r.to_string());
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {:.4} | {} |",
                    mode_name(&s.method),
                    params,
                    sci(a.kl_median),
                    chi,
                    a.tvd_mean,
                    rank
                );
            }
            (_, failure) => {
                let why = failure.as_deref().unwrap_or("no evaluation");
                let _ = writeln!(out, "| {} | {} | - | - | - | {} |", mode_name(&s.method), params, why);
            }
        }
    }
    let _ = writeln!(
        out,
        "\nBold chi-square: at least one column has p < {alpha}; such methods are excluded from ranking. KL in nats."
    );
    out
}

/// Entropy-per-node and MI-per-edge comparison blocks (bits).
pub fn render_structure_markdown(structure: &StructureMetrics) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| Node | Entropy Synthetic | Entropy Real |");
    let _ = writeln!(out, "|---|---|---|");
    for e in &structure.entropy {
        let _ = writeln!(out, "| {} | {:.5} | {:.5} |", e.node, e.synthetic, e.real);
    }
    if !structure.mutual_information.is_empty() {
        let _ = writeln!(out, "\n| Source | Target | MI Synthetic | MI Real |");
        let _ = writeln!(out, "|---|---|---|---|");
        for m in &structure.mutual_information {
            let _ = writeln!(out, "| {} | {} | {:.6} | {:.6} |", m.source, m.target, m.synthetic, m.real);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::chain;
    use crate::bn::{ancestral_sample, SampleRequest};

    #[test]
    fn self_comparison_is_perfect() {
        let m = chain();
        let t = ancestral_sample(&m, SampleRequest::new(5000, 1).unwrap()).unwrap();
        let r = evaluate_pair(&t, &t, &[(0, 1)], EvalOptions::default()).unwrap();
        for c in &r.columns {
            assert_eq!(c.tvd, 1.0);
            assert!(c.kl.abs() < 1e-12);
            assert_eq!(c.p_value, 1.0);
        }
        for e in &r.structure.entropy {
            assert_eq!(e.real, e.synthetic);
        }
        assert_eq!(r.structure.mutual_information[0].real, r.structure.mutual_information[0].synthetic);
        assert!(r.structure.mutual_information[0].real > 0.1);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let m = chain();
        let t = ancestral_sample(&m, SampleRequest::new(10, 1).unwrap()).unwrap();
        let other = crate::model::tests::binary_schema(&["X", "Y"]);
        let u = DataTable::new(other, vec![vec![0, 0]]).unwrap();
        assert!(evaluate_pair(&t, &u, &[], EvalOptions::default()).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn histogram_csv_shape() {
        let h = Histogram {
            column: "A".into(),
            categories: vec!["x".into(), "y, z".into()],
            real_freq: vec![0.25, 0.75],
            synth_freq: vec![0.5, 0.5],
        };
        assert_eq!(h.to_csv().unwrap(), "category,real_freq,synth_freq\nx,0.25,0.5\n\"y, z\",0.75,0.5\n");
    }
}
