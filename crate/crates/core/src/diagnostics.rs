//! Weight-degeneracy diagnostics and a Monte Carlo bias probe.
//!
//! The effective sample size (ESS) and the variance of the normalized weights
//! are the two standard lenses on particle degeneracy: ESS collapses toward 1
//! and the weight variance grows as the weight mass concentrates on few
//! particles. Both are recorded every filter step *before* resampling, so
//! time series of either quantity compare resampling schemes on equal terms.

use crate::error::SmcError;
use crate::resample::{AncestorIndices, Scheme, WeightVector};
use crate::rng::Rng;

/// Per-step filter diagnostics, recorded before the resampling decision.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// 1-based observation index.
    pub t: usize,
    /// Effective sample size of the pre-resampling weights.
    pub ess: f64,
    /// Population variance of the pre-resampling weights.
    pub weight_variance: f64,
    /// Distinct ancestors chosen at this step; equals the particle count when
    /// no resampling fired.
    pub unique_ancestors: usize,
}

/// Effective sample size `1 / sum(w^2)` of a normalized weight vector.
///
/// Evaluated in the scale-invariant form `(sum u)^2 / sum(u^2)` with
/// `u = w / max(w)`, which is algebraically identical but returns the exact
/// boundary values: `n` when all weights are equal (every `u` is exactly 1)
/// and 1 when a single weight carries all the mass. The naive form misses
/// both boundaries by a few ulps because `1/n` is not representable.
pub fn ess_estimate(weights: &WeightVector) -> f64 {
    let w = weights.as_slice();
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in w {
        let u = x / max;
        sum += u;
        sum_sq += u * u;
    }
    (sum * sum) / sum_sq
}

/// Population variance of the normalized weights around their exact mean
/// `1/n`.
///
/// Using the literal `1/n` rather than a recomputed sample mean keeps the
/// uniform case at exactly zero and matches the identity
/// `Var(w) = E[w^2] - 1/n^2` implied by the weights summing to one.
pub fn weight_variance(weights: &WeightVector) -> f64 {
    let w = weights.as_slice();
    let n = w.len() as f64;
    let mean = 1.0 / n;
    let mut acc = 0.0;
    for &x in w {
        let d = x - mean;
        acc += d * d;
    }
    acc / n
}

/// Number of distinct particles that received at least one offspring.
pub fn unique_ancestors(tags: &AncestorIndices) -> usize {
    let mut sorted: Vec<usize> = tags.as_slice().to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Monte Carlo probe of resampling bias: runs `replicates` independent
/// resampling rounds and returns, per particle index, the mean offspring
/// count minus the unbiased target `n * w`.
///
/// For the classical schemes the deviations shrink toward zero as replicates
/// grow; for the deterministic-domain scheme the starved indices show their
/// full `-n * w` deficit, making the bias directly visible.
pub fn count_bias_probe(
    scheme: Scheme,
    weights: &WeightVector,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>, SmcError> {
    if replicates == 0 {
        return Err(SmcError::InvalidCount("bias probe needs at least one replicate".into()));
    }
    let m = weights.len();
    let mut totals = vec![0u64; m];
    let mut rng = Rng::new(seed);
    for _ in 0..replicates {
        let tags = scheme.resample(weights, n, &mut rng)?;
        for &t in tags.as_slice() {
            totals[t] += 1;
        }
    }
    let reps = replicates as f64;
    Ok(weights
        .as_slice()
        .iter()
        .zip(&totals)
        .map(|(&w, &c)| c as f64 / reps - n as f64 * w)
        .collect())
}
