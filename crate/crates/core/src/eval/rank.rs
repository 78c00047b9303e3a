//! Gate-then-rank selection of synthesis methods.

use serde::{Deserialize, Serialize};

use super::report::{Aggregates, ColumnMetrics, EvalReport};
use crate::error::{Error, Result};

/// Conventional significance level for the per-column chi-square gate.
pub const DEFAULT_GATE_ALPHA: f64 = 0.05;
/// Mean TVDs closer than this are treated as tied and ordered by KL median.
pub const TVD_TIE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    /// Method id (`bn`, `independent`, ...).
    pub method: String,
    /// Human-readable parameters, e.g. `epsilon = 10`.
    pub parameters: String,
    /// Unique run label used for artifact names.
    pub label: String,
    pub columns: Vec<ColumnMetrics>,
    pub aggregates: Option<Aggregates>,
    pub gate_passed: bool,
    /// `None` means excluded.
    pub rank: Option<usize>,
    /// Why the method produced no evaluation, if it failed or was rejected.
    pub failure: Option<String>,
}

impl MethodScore {
    pub fn from_report(method: &str, parameters: &str, label: &str, report: &EvalReport) -> Self {
        MethodScore {
            method: method.to_string(),
            parameters: parameters.to_string(),
            label: label.to_string(),
            columns: report.columns.clone(),
            aggregates: Some(report.aggregates),
            gate_passed: false,
            rank: None,
            failure: None,
        }
    }

    pub fn failed(method: &str, parameters: &str, label: &str, reason: impl Into<String>) -> Self {
        MethodScore {
            method: method.to_string(),
            parameters: parameters.to_string(),
            label: label.to_string(),
            columns: Vec::new(),
            aggregates: None,
            gate_passed: false,
            rank: None,
            failure: Some(reason.into()),
        }
    }
}

/// Applies the chi-square gate (every column `p ≥ alpha`) and ranks passing
/// methods by mean TVD, descending; near-ties go to the smaller KL median.
/// Ranked methods come first, then excluded ones ordered by label. The result
/// does not depend on the input order.
pub fn rank_methods(scores: Vec<MethodScore>, alpha: f64) -> Result<Vec<MethodScore>> {
    if scores.is_empty() {
        return Err(Error::input("no methods to rank"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input(format!("gate alpha must lie in (0, 1), got {alpha}")));
    }
    let (mut passing, mut excluded): (Vec<_>, Vec<_>) = scores
        .into_iter()
        .map(|mut s| {
            s.gate_passed = s.failure.is_none()
                && s.aggregates.is_some()
                && !s.columns.is_empty()
                && s.columns.iter().all(|c| c.p_value >= alpha);
            s.rank = None;
            s
        })
        .partition(|s| s.gate_passed);

    let tvd = |s: &MethodScore| s.aggregates.map_or(0.0, |a| a.tvd_mean);
    let kl = |s: &MethodScore| s.aggregates.map_or(f64::INFINITY, |a| a.kl_median);
    passing.sort_by(|a, b| {
        tvd(b)
            .total_cmp(&tvd(a))
            .then(kl(a).total_cmp(&kl(b)))
            .then_with(|| a.label.cmp(&b.label))
            .then_with(|| a.parameters.cmp(&b.parameters))
    });
    // Within TVD ties, bubble smaller KL forward. Each swap removes one KL inversion.
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 0..passing.len().saturating_sub(1) {
            let (a, b) = (&passing[i], &passing[i + 1]);
            if (tvd(a) - tvd(b)).abs() < TVD_TIE_TOLERANCE && kl(b) < kl(a) {
                passing.swap(i, i + 1);
                swapped = true;
            }
        }
    }
    for (i, s) in passing.iter_mut().enumerate() {
        s.rank = Some(i + 1);
    }
    excluded.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.parameters.cmp(&b.parameters)));
    passing.extend(excluded);
    Ok(passing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(label: &str, tvd: f64, kl: f64, p: f64) -> MethodScore {
        let col = ColumnMetrics {
            name: "X".into(),
            chi_square: 1.0,
            degrees_of_freedom: 1,
            p_value: p,
            kl,
            tvd,
        };
        MethodScore {
            method: label.into(),
            parameters: String::new(),
            label: label.into(),
            columns: vec![col],
            aggregates: Some(Aggregates { kl_median: kl, chi_square_median: 1.0, tvd_mean: tvd }),
            gate_passed: false,
            rank: None,
            failure: None,
        }
    }

    #[test]
    fn table_one_ordering() {
        let ranked = rank_methods(
            vec![score("ctgan", 0.9236, 0.007, 0.3), score("bn", 0.9979, 3.2e-6, 0.5), score("copula", 0.976, 2e-4, 0.2)],
            DEFAULT_GATE_ALPHA,
        )
        .unwrap();
        let order: Vec<_> = ranked.iter().map(|s| (s.label.as_str(), s.rank)).collect();
        assert_eq!(order, [("bn", Some(1)), ("copula", Some(2)), ("ctgan", Some(3))]);
    }

    #[test]
    fn failing_gate_is_excluded_despite_high_tvd() {
        let ranked = rank_methods(
            vec![score("independent", 0.9746, 3e-4, 0.01), score("correlated", 0.9611, 8e-4, 0.4)],
            DEFAULT_GATE_ALPHA,
        )
        .unwrap();
        assert_eq!(ranked[0].label, "correlated");
        assert_eq!(ranked[0].rank, Some(1));
        assert_eq!(ranked[1].label, "independent");
        assert_eq!(ranked[1].rank, None);
        assert!(!ranked[1].gate_passed);
    }

    #[test]
    fn single_method_and_empty_list() {
        let ranked = rank_methods(vec![score("bn", 0.9, 0.1, 0.9)], 0.05).unwrap();
        assert_eq!(ranked[0].rank, Some(1));
        assert!(rank_methods(vec![], 0.05).is_err());
    }

    #[test]
    fn near_tie_goes_to_lower_kl() {
        let ranked =
            rank_methods(vec![score("a", 0.95005, 0.01, 0.5), score("b", 0.95, 0.001, 0.5)], 0.05).unwrap();
        assert_eq!(ranked[0].label, "b");
    }

    #[test]
    fn failures_are_excluded() {
        let ranked = rank_methods(
            vec![MethodScore::failed("ctgan", "epochs = 300", "ctgan", "excluded: out of scope"), score("bn", 0.99, 0.0, 0.5)],
            0.05,
        )
        .unwrap();
        assert_eq!(ranked[0].label, "bn");
        assert_eq!(ranked[1].rank, None);
    }

    proptest! {
        #[test]
        fn input_order_does_not_matter(
            entries in prop::collection::vec((0.9f64..1.0, 0.0f64..0.01, 0.0f64..1.0), 1..8),
            seed in any::<u64>(),
        ) {
            let scores: Vec<_> = entries
                .iter()
                .enumerate()
                .map(|(i, &(t, k, p))| score(&format!("m{i}"), t, k, p))
                .collect();
            let mut shuffled = scores.clone();
            // deterministic Fisher-Yates from the seed
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = crate::rng::splitmix64(s);
                shuffled.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let a = rank_methods(scores, 0.05).unwrap();
            let b = rank_methods(shuffled, 0.05).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
