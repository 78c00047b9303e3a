use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries must sum to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Deviations up to this size are silently renormalized; larger ones are errors.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// A probability vector over one variable's categories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution(Vec<f64>);

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(p: Vec<f64>) -> Result<Self> {
        Distribution::new(p)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.0
    }
}

impl Distribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("distribution over zero categories"));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::input(format!("invalid probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        let dev = (total - 1.0).abs();
        if dev > RENORMALIZE_TOLERANCE {
            return Err(Error::input(format!("probabilities sum to {total}, not 1")));
        }
        if dev > 0.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Distribution(probs))
    }

    /// Normalizes non-negative weights; errors when they are all zero.
    pub fn from_weights<I: IntoIterator<Item = f64>>(weights: I) -> Result<Self> {
        let w: Vec<f64> = weights.into_iter().collect();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::input("weights must be finite and non-negative"));
        }
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::numeric("cannot normalize all-zero weights"));
        }
        Ok(Distribution(w.into_iter().map(|x| x / total).collect()))
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        Distribution(vec![1.0 / k as f64; k])
    }

    pub fn one_hot(k: usize, index: usize) -> Self {
        assert!(index < k);
        let mut p = vec![0.0; k];
        p[index] = 1.0;
        Distribution(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Inverse-CDF draw: the first category whose cumulative mass exceeds `u`.
    /// Zero-probability categories are never returned.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = i;
                if u < acc {
                    return i;
                }
            }
        }
        last_positive
    }
}
