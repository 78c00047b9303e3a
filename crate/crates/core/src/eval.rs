//! Synthetic-data quality metrics and method ranking.

mod metrics;
mod rank;
mod report;

pub use metrics::{
    column_chi_square, column_kl, column_tvd, node_entropy, pair_mutual_information, ChiSquareTest,
    DEFAULT_KL_SMOOTHING, MIN_EXPECTED_COUNT,
};
pub use rank::{rank_methods, MethodScore, DEFAULT_GATE_ALPHA, TVD_TIE_TOLERANCE};
pub use report::{
    evaluate_pair, render_ranking_markdown, render_structure_markdown, Aggregates, ColumnMetrics, EdgeInformation,
    EvalOptions, EvalReport, Histogram, NodeEntropy, StructureMetrics, Units,
};
