//! Per-column distance metrics and information measures.
//!
//! Units: KL divergence in nats; entropy and mutual information in bits.

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::schema::VariableKind;
use crate::special::chi_square_sf;

/// Default smoothing mass added to each synthetic category before KL.
pub const DEFAULT_KL_SMOOTHING: f64 = 1e-9;
/// Buckets whose expected count falls below this are merged.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

fn same_support(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "category sets differ: {} vs {} categories",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Similarity score `1 − ½ Σ|R − S|`: 1 for identical, 0 for disjoint support.
pub fn column_tvd(real: &Distribution, synth: &Distribution) -> Result<f64> {
    same_support(real, synth)?;
    let l1: f64 = real.probs().iter().zip(synth.probs()).map(|(r, s)| (r - s).abs()).sum();
    Ok((1.0 - 0.5 * l1).clamp(0.0, 1.0))
}

/// `KL(real ‖ synth)` in nats after adding `smoothing` to every synthetic
/// category and renormalizing.
pub fn column_kl(real: &Distribution, synth: &Distribution, smoothing: f64) -> Result<f64> {
    same_support(real, synth)?;
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::input("KL smoothing must be finite and non-negative"));
    }
    let norm = 1.0 + smoothing * synth.len() as f64;
    let mut kl = 0.0;
    for (&p, &q) in real.probs().iter().zip(synth.probs()) {
        if p > 0.0 {
            let q = (q + smoothing) / norm;
            kl += p * (p / q).ln();
        }
    }
    Ok(kl.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Goodness of fit of synthetic counts against real proportions.
///
/// Expected counts are the real proportions scaled to the synthetic total.
/// Buckets with expected count below [`MIN_EXPECTED_COUNT`] are merged, the
/// smallest first: ordinal categories into the adjacent bucket with the smaller
/// expected count (the following one on ties), nominal categories into the
/// bucket with the largest expected count.
pub fn column_chi_square(real_counts: &[u64], synth_counts: &[u64], kind: VariableKind) -> Result<ChiSquareTest> {
    if real_counts.len() != synth_counts.len() {
        return Err(Error::input("real and synthetic category sets differ"));
    }
    let real_total: u64 = real_counts.iter().sum();
    if real_total == 0 {
        return Err(Error::input("real column has no observations"));
    }
    let synth_total: u64 = synth_counts.iter().sum();
    let scale = synth_total as f64 / real_total as f64;
    // (expected, observed)
    let mut buckets: Vec<(f64, f64)> =
        real_counts.iter().zip(synth_counts).map(|(&r, &s)| (r as f64 * scale, s as f64)).collect();

    while buckets.len() > 1 {
        let Some(small) = buckets
            .iter()
            .enumerate()
            .filter(|(_, b)| b.0 < MIN_EXPECTED_COUNT)
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(i, _)| i)
        else {
            break;
        };
        let target = match kind {
            VariableKind::Ordinal => {
                if small == 0 {
                    1
                } else if small == buckets.len() - 1 || buckets[small - 1].0 < buckets[small + 1].0 {
                    small - 1
                } else {
                    small + 1
                }
            }
            VariableKind::Nominal => buckets
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != small)
                .fold(None::<(usize, f64)>, |best, (i, b)| match best {
                    Some((_, e)) if e >= b.0 => best,
                    _ => Some((i, b.0)),
                })
                .map(|(i, _)| i)
                .expect("at least two buckets"),
        };
        let (e, o) = buckets[small];
        buckets[target].0 += e;
        buckets[target].1 += o;
        buckets.remove(small);
    }

    if buckets.len() < 2 {
        return Err(Error::numeric("chi-square test undefined: fewer than 2 categories after merging"));
    }
    let statistic: f64 = buckets.iter().map(|&(e, o)| (o - e) * (o - e) / e).sum();
    let dof = buckets.len() - 1;
    Ok(ChiSquareTest { statistic, degrees_of_freedom: dof, p_value: chi_square_sf(statistic, dof) })
}

/// Shannon entropy in bits, `0 · log 0 = 0`.
pub fn node_entropy(marginal: &Distribution) -> f64 {
    entropy_bits(marginal.probs())
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Plug-in mutual information in bits from a row-major `n_x × n_y` table of
/// joint counts (or probabilities).
pub fn pair_mutual_information(joint: &[f64], n_x: usize, n_y: usize) -> Result<f64> {
    if joint.len() != n_x * n_y {
        return Err(Error::input("joint table size does not match its dimensions"));
    }
    if joint.iter().any(|&c| !c.is_finite() || c < 0.0) {
        return Err(Error::input("joint counts must be finite and non-negative"));
    }
    let total: f64 = joint.iter().sum();
    if total <= 0.0 {
        return Err(Error::input("joint table is empty"));
    }
    let mut px = vec![0.0; n_x];
    let mut py = vec![0.0; n_y];
    for x in 0..n_x {
        for y in 0..n_y {
            let c = joint[x * n_y + y];
            px[x] += c;
            py[y] += c;
        }
    }
    let mut mi = 0.0;
    for x in 0..n_x {
        for y in 0..n_y {
            let c = joint[x * n_y + y];
            if c > 0.0 {
                // p(x,y) / (p(x) p(y)) = c·N / (cx·cy)
                mi += (c / total) * (c * total / (px[x] * py[y])).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

pub(crate) fn counts_to_distribution(counts: &[u64]) -> Result<Distribution> {
    Distribution::from_weights(counts.iter().map(|&c| c as f64))
}
