//! Weight normalization and the five resampling schemes.
//!
//! Every scheme maps a normalized weight vector over `M` particles to `N`
//! ancestor indices ("tags"): tag `j` means the new particle copies old
//! particle `j`. The schemes differ in how much randomness they inject:
//!
//! * **multinomial** — `N` independent inverse-CDF draws; unbiased, highest
//!   variance. The draw is a literal linear scan of the cumulative weights
//!   from the front, so its cost grows with `N * M`.
//! * **residual** — each index first receives `floor(N * w)` copies
//!   deterministically; the remainder is filled multinomially from the
//!   fractional parts.
//! * **stratified** — one uniform per stratum `((k-1)/N, k/N]`, mapped through
//!   the inverse CDF.
//! * **systematic** — a single uniform offset shared by all `N` grid
//!   positions `(k - 1 + u) / N`.
//! * **rdd** (repetitive deterministic domain, median variant) — the
//!   deterministic `floor(N * w)` copies define a fixed domain; if a slot
//!   remains, the median-weight particle is appended; any remaining slots are
//!   drawn repeatedly from that fixed domain with the member particles'
//!   weights renormalized. Low-weight particles outside the domain are never
//!   selected, which trades a small bias for a visible variance reduction.
//!
//! Inverse-CDF selection everywhere uses the same rule: pick the first index
//! whose cumulative weight reaches the target, never running past the last
//! positive-weight entry (so float shortfall in the final cumulative sum
//! cannot select a zero-weight particle).

use crate::error::SmcError;
use crate::rng::Rng;
use std::fmt;
use std::str::FromStr;

/// Tolerance for "already normalized" validation in
/// [`WeightVector::from_normalized`].
const NORMALIZED_SUM_TOLERANCE: f64 = 1e-9;

/// A normalized particle weight vector: finite, non-negative entries that sum
/// to one (up to float rounding), with at least one strictly positive entry.
///
/// The invariant is established at construction so the resamplers and
/// diagnostics can consume weights without re-validating.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    /// Normalizes raw non-negative weights to sum to one.
    pub fn normalize(raw: &[f64]) -> Result<Self, SmcError> {
        if raw.is_empty() {
            return Err(SmcError::InvalidWeights("empty weight vector".into()));
        }
        let mut sum = 0.0;
        for (i, &x) in raw.iter().enumerate() {
            if !x.is_finite() {
                return Err(SmcError::InvalidWeights(format!(
                    "weight {x} at index {i} is not finite"
                )));
            }
            if x < 0.0 {
                return Err(SmcError::InvalidWeights(format!(
                    "weight {x} at index {i} is negative"
                )));
            }
            sum += x;
        }
        if sum <= 0.0 {
            return Err(SmcError::InvalidWeights("all weights are zero".into()));
        }
        if !sum.is_finite() {
            return Err(SmcError::InvalidWeights("weight sum overflowed".into()));
        }
        let w = raw
            .iter()
            .map(|&x| {
                let v = x / sum;
                // Collapse -0.0 (possible when raw contains -0.0) to +0.0 so
                // ordering by value is oblivious to the zero sign.
                if v == 0.0 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        Ok(WeightVector { w })
    }

    /// Wraps weights that are already normalized; the sum must be within
    /// `1e-9` of one.
    pub fn from_normalized(w: Vec<f64>) -> Result<Self, SmcError> {
        if w.is_empty() {
            return Err(SmcError::InvalidWeights("empty weight vector".into()));
        }
        let mut sum = 0.0;
        for (i, &x) in w.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(SmcError::InvalidWeights(format!(
                    "weight {x} at index {i} is outside [0, 1]"
                )));
            }
            sum += x;
        }
        if (sum - 1.0).abs() > NORMALIZED_SUM_TOLERANCE {
            return Err(SmcError::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        let w = w.into_iter().map(|x| if x == 0.0 { 0.0 } else { x }).collect();
        Ok(WeightVector { w })
    }

    /// The uniform vector `[1/n; n]`, the state of affairs right after any
    /// resampling step.
    pub fn uniform(n: usize) -> Result<Self, SmcError> {
        if n == 0 {
            return Err(SmcError::InvalidCount("weight vector length must be positive".into()));
        }
        Ok(WeightVector {
            w: vec![1.0 / n as f64; n],
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Ancestor indices produced by a resampling step: `tags[k] = j` means the
/// k-th offspring copies particle `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestorIndices {
    tags: Vec<usize>,
}

impl AncestorIndices {
    /// Wraps a tag vector produced elsewhere (e.g. by a hand-written oracle in
    /// tests). No validation is performed.
    pub fn from_tags(tags: Vec<usize>) -> Self {
        AncestorIndices { tags }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Offspring count per original particle index, for a population of `m`
    /// particles. Panics if a tag is out of range, which would indicate a bug
    /// in the producing resampler.
    pub fn counts(&self, m: usize) -> Vec<usize> {
        let mut c = vec![0usize; m];
        for &t in &self.tags {
            c[t] += 1;
        }
        c
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.tags
    }
}

/// The resampling scheme selector used by the filter engine, the benchmarks,
/// and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Multinomial,
    Residual,
    Stratified,
    Systematic,
    Rdd,
}

impl Scheme {
    /// All schemes, in the order used by benchmark tables.
    pub const ALL: [Scheme; 5] = [
        Scheme::Multinomial,
        Scheme::Residual,
        Scheme::Stratified,
        Scheme::Systematic,
        Scheme::Rdd,
    ];

    /// Stable lowercase name used in CLI flags and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Multinomial => "multinomial",
            Scheme::Residual => "residual",
            Scheme::Stratified => "stratified",
            Scheme::Systematic => "systematic",
            Scheme::Rdd => "rdd",
        }
    }

    /// Draws `n` ancestor tags with this scheme.
    pub fn resample(
        self,
        weights: &WeightVector,
        n: usize,
        rng: &mut Rng,
    ) -> Result<AncestorIndices, SmcError> {
        match self {
            Scheme::Multinomial => multinomial_resample(weights, n, rng),
            Scheme::Residual => residual_resample(weights, n, rng),
            Scheme::Stratified => stratified_resample(weights, n, rng),
            Scheme::Systematic => systematic_resample(weights, n, rng),
            Scheme::Rdd => rdd_median_resample(weights, n, rng),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SmcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multinomial" => Ok(Scheme::Multinomial),
            "residual" => Ok(Scheme::Residual),
            "stratified" => Ok(Scheme::Stratified),
            "systematic" => Ok(Scheme::Systematic),
            "rdd" => Ok(Scheme::Rdd),
            other => Err(SmcError::InvalidConfig(format!(
                "unknown resampler '{other}' (expected multinomial, residual, stratified, systematic, or rdd)"
            ))),
        }
    }
}

fn ensure_positive_count(n: usize) -> Result<(), SmcError> {
    if n == 0 {
        Err(SmcError::InvalidCount("resample target must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Index of the last strictly positive weight. Well defined by the
/// `WeightVector` invariant.
fn last_positive_index(w: &[f64]) -> usize {
    w.iter()
        .rposition(|&x| x > 0.0)
        .expect("WeightVector guarantees at least one positive weight")
}

/// First index whose cumulative value reaches `target`, capped at `cap`.
fn first_index_at_or_above(q: &[f64], cap: usize, target: f64) -> usize {
    let mut j = 0;
    while j < cap && q[j] < target {
        j += 1;
    }
    j
}

/// Multinomial resampling: `n` independent inverse-CDF draws.
///
/// Each draw scans the cumulative weights from the front, so a call costs
/// `O(n * m)` — the price of the textbook construction, and the reason this
/// scheme anchors the slow end of the timing benchmark.
pub fn multinomial_resample(
    weights: &WeightVector,
    n: usize,
    rng: &mut Rng,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    let w = weights.as_slice();
    let cap = last_positive_index(w);
    let mut q = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for &x in w {
        acc += x;
        q.push(acc);
    }
    let mut tags = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.next_uniform();
        tags.push(first_index_at_or_above(&q, cap, u));
    }
    Ok(AncestorIndices::from_tags(tags))
}

/// Residual resampling: deterministic `floor(n * w)` copies, then multinomial
/// draws from the fractional remainders.
pub fn residual_resample(
    weights: &WeightVector,
    n: usize,
    rng: &mut Rng,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    let w = weights.as_slice();
    let m = w.len();
    let mut tags = Vec::with_capacity(n);
    let mut residual = vec![0.0; m];
    for j in 0..m {
        let exact = n as f64 * w[j];
        let mut copies = exact.floor() as usize;
        // The floor counts sum to at most n in exact arithmetic; the clamp
        // guards against pathological rounding.
        copies = copies.min(n - tags.len());
        for _ in 0..copies {
            tags.push(j);
        }
        residual[j] = exact - copies as f64;
    }
    let remaining = n - tags.len();
    if remaining > 0 {
        let mut q = Vec::with_capacity(m);
        let mut acc = 0.0;
        for &r in &residual {
            acc += r;
            q.push(acc);
        }
        let rsum = acc;
        if rsum > 0.0 {
            let cap = residual
                .iter()
                .rposition(|&x| x > 0.0)
                .expect("residual sum positive implies a positive entry");
            for _ in 0..remaining {
                let target = rng.next_uniform() * rsum;
                tags.push(first_index_at_or_above(&q, cap, target));
            }
        } else {
            // All remainders rounded to zero yet slots remain: fall back to
            // drawing from the original weights.
            let cap = last_positive_index(w);
            let mut q = Vec::with_capacity(m);
            let mut acc = 0.0;
            for &x in w {
                acc += x;
                q.push(acc);
            }
            for _ in 0..remaining {
                let u = rng.next_uniform();
                tags.push(first_index_at_or_above(&q, cap, u));
            }
        }
    }
    Ok(AncestorIndices::from_tags(tags))
}

/// Stratified resampling: one uniform per stratum `((k-1)/n, k/n]`.
///
/// Positions are strictly increasing across strata, so a single merge pass
/// over the cumulative weights suffices.
pub fn stratified_resample(
    weights: &WeightVector,
    n: usize,
    rng: &mut Rng,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    let w = weights.as_slice();
    let cap = last_positive_index(w);
    let mut tags = Vec::with_capacity(n);
    let mut j = 0usize;
    let mut cum = w[0];
    for k in 0..n {
        let pos = (k as f64 + rng.next_uniform()) / n as f64;
        while j < cap && cum < pos {
            j += 1;
            cum += w[j];
        }
        tags.push(j);
    }
    Ok(AncestorIndices::from_tags(tags))
}

/// Systematic resampling with an explicit offset `u0` in `(0, 1]`.
///
/// This is the deterministic core of [`systematic_resample`]; it is public so
/// textbook examples with a pinned offset can be reproduced exactly. The grid
/// positions are `(k - 1 + u0) / n` for `k = 1..=n`, which pins every
/// offspring count to `floor(n * w)` or `ceil(n * w)`.
pub fn systematic_resample_from_offset(
    weights: &WeightVector,
    n: usize,
    u0: f64,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    if !(u0 > 0.0 && u0 <= 1.0) {
        return Err(SmcError::InvalidParams(format!(
            "systematic offset {u0} must lie in (0, 1]"
        )));
    }
    let w = weights.as_slice();
    let cap = last_positive_index(w);
    let mut tags = Vec::with_capacity(n);
    let mut j = 0usize;
    let mut cum = w[0];
    for k in 0..n {
        let pos = (k as f64 + u0) / n as f64;
        while j < cap && cum < pos {
            j += 1;
            cum += w[j];
        }
        tags.push(j);
    }
    Ok(AncestorIndices::from_tags(tags))
}

/// Systematic resampling: a single uniform offset drives all `n` positions.
pub fn systematic_resample(
    weights: &WeightVector,
    n: usize,
    rng: &mut Rng,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    let u0 = rng.next_uniform();
    systematic_resample_from_offset(weights, n, u0)
}

/// Original index of the median-weight particle under a stable ascending sort
/// of the weights. The 1-based rank is `floor((n + 1) / 2)`, clamped to the
/// available range when `n` exceeds the number of particles.
fn median_tag(w: &[f64], n: usize) -> usize {
    let m = w.len();
    let mut order: Vec<usize> = (0..m).collect();
    let r = n.div_ceil(2).clamp(1, m);
    // Selecting under (weight, index) order is equivalent to a stable
    // ascending sort on weight alone: ties resolve to the lower index first.
    // Selection keeps this O(m) instead of a full sort.
    order.select_nth_unstable_by(r - 1, |&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    order[r - 1]
}

/// Repetitive deterministic-domain resampling with median completion.
///
/// Three stages:
///
/// 1. *Deterministic:* index `j` receives `floor(n * w[j])` copies. The copies
///    laid down here (the "domain") are the only particles that can ever be
///    selected later.
/// 2. *Median:* if slots remain, the median-weight particle's index is
///    appended once, so the domain is never empty even when every weight is
///    below `1/n`.
/// 3. *Repetitive:* remaining slots are drawn independently from the domain
///    multiset, with each slot weighted by its particle's (renormalized)
///    weight. Slots holding the same index stack, so a particle with two
///    deterministic copies is twice as likely per unit weight to be drawn
///    again.
///
/// Particles below weight `1/n` that are not the median receive exactly zero
/// offspring — the scheme's deliberate bias — while every particle keeps at
/// least its `floor(n * w)` guaranteed copies.
pub fn rdd_median_resample(
    weights: &WeightVector,
    n: usize,
    rng: &mut Rng,
) -> Result<AncestorIndices, SmcError> {
    ensure_positive_count(n)?;
    let w = weights.as_slice();

    let mut tags: Vec<usize> = Vec::with_capacity(n);
    for (j, &wj) in w.iter().enumerate() {
        let mut copies = (n as f64 * wj).floor() as usize;
        copies = copies.min(n - tags.len());
        for _ in 0..copies {
            tags.push(j);
        }
        if tags.len() == n {
            break;
        }
    }
    if tags.len() < n {
        tags.push(median_tag(w, n));
    }

    let filled = tags.len();
    if filled < n {
        let dsum: f64 = tags.iter().map(|&j| w[j]).sum();
        let mut q = Vec::with_capacity(filled);
        let mut acc = 0.0;
        if dsum > 0.0 {
            for &j in tags.iter() {
                acc += w[j];
                q.push(acc);
            }
        } else {
            // Only reachable when the domain is the lone median tag and its
            // weight is zero; treat the domain as uniform.
            for k in 0..filled {
                acc = (k + 1) as f64;
                q.push(acc);
            }
        }
        let total = acc;
        while tags.len() < n {
            let target = rng.next_uniform() * total;
            let slot = first_index_at_or_above(&q, filled - 1, target);
            let tag = tags[slot];
            tags.push(tag);
        }
    }
    Ok(AncestorIndices::from_tags(tags))
}
