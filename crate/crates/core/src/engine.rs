//! The bootstrap particle filter.
//!
//! The proposal is the model's own transition, so each step's incremental
//! weight is just the observation likelihood. Weights are carried in log
//! space and normalized through a max-shift, which keeps a single dominant
//! particle from underflowing the rest of the vector to zero.
//!
//! Randomness is split into two child streams of the configured seed — one
//! for particle propagation, one for resampling — so two runs that differ
//! only in the resampling scheme see *identical* particle trajectories up to
//! the first step where the schemes actually select different ancestors.
//! That pairing is what makes cross-scheme variance comparisons sharp.

use crate::diagnostics::{ess_estimate, unique_ancestors, weight_variance, StepDiagnostics};
use crate::error::SmcError;
use crate::models::StateSpaceModel;
use crate::resample::{Scheme, WeightVector};
use crate::rng::Rng;

/// Filter configuration: particle count, resampling policy, and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub n_particles: usize,
    pub resampler: Scheme,
    /// Resample when `ess < ess_threshold_fraction * n_particles`; must lie
    /// in `[0, 1]`. Zero disables adaptive resampling entirely.
    pub ess_threshold_fraction: f64,
    /// Resample unconditionally at every step, ignoring the threshold.
    pub resample_every_step: bool,
    pub seed: u64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            n_particles: 20,
            resampler: Scheme::Rdd,
            ess_threshold_fraction: 0.5,
            resample_every_step: false,
            seed: 1,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), SmcError> {
        if self.n_particles == 0 {
            return Err(SmcError::InvalidCount("particle count must be at least 1".into()));
        }
        if !(self.ess_threshold_fraction.is_finite()
            && (0.0..=1.0).contains(&self.ess_threshold_fraction))
        {
            return Err(SmcError::InvalidConfig(format!(
                "ess threshold fraction {} must lie in [0, 1]",
                self.ess_threshold_fraction
            )));
        }
        Ok(())
    }
}

/// The particle cloud after `t` observation updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    /// Number of observations absorbed so far.
    pub t: usize,
    pub particles: Vec<f64>,
    /// Unnormalized log-weights; all zero right after initialization or a
    /// resampling step.
    pub logweights: Vec<f64>,
}

impl ParticleState {
    /// Draws `n` particles from the model's initial distribution with equal
    /// weights. This is the state *before* the first observation.
    pub fn init<M: StateSpaceModel>(model: &M, n: usize, rng: &mut Rng) -> Result<Self, SmcError> {
        if n == 0 {
            return Err(SmcError::InvalidCount("particle count must be at least 1".into()));
        }
        let particles = (0..n).map(|_| model.sample_initial(rng)).collect();
        Ok(ParticleState {
            t: 0,
            particles,
            logweights: vec![0.0; n],
        })
    }

    /// Normalized weights via max-shifted exponentiation.
    pub fn normalized_weights(&self) -> Result<WeightVector, SmcError> {
        let max = self
            .logweights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(SmcError::WeightCollapse { step: self.t });
        }
        let raw: Vec<f64> = self.logweights.iter().map(|&lw| (lw - max).exp()).collect();
        WeightVector::normalize(&raw)
    }
}

/// Adds the per-particle observation log-likelihoods onto the previous
/// log-weights. Fails with a weight collapse when every updated weight is
/// zero (the caller substitutes the actual step index).
pub fn weight_update(prev_logw: &[f64], obs_loglik: &[f64]) -> Result<Vec<f64>, SmcError> {
    assert_eq!(
        prev_logw.len(),
        obs_loglik.len(),
        "log-weight and log-likelihood vectors must have equal length"
    );
    let out: Vec<f64> = prev_logw
        .iter()
        .zip(obs_loglik)
        .map(|(&lw, &ll)| lw + ll)
        .collect();
    if out.iter().all(|&v| v == f64::NEG_INFINITY) {
        return Err(SmcError::WeightCollapse { step: 0 });
    }
    Ok(out)
}

/// What one filter step produced: diagnostics measured before resampling,
/// whether resampling fired, and the weighted posterior-mean estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub diagnostics: StepDiagnostics,
    pub resampled: bool,
    pub mean: f64,
}

/// One bootstrap step: propagate, weight, estimate, then resample if the
/// policy calls for it. Mutates `state` in place.
pub fn bpf_step<M: StateSpaceModel>(
    state: &mut ParticleState,
    y: f64,
    model: &M,
    cfg: &FilterConfig,
    prop_rng: &mut Rng,
    res_rng: &mut Rng,
) -> Result<StepOutcome, SmcError> {
    let n = state.particles.len();
    let step = state.t + 1;
    let with_step = |e: SmcError| match e {
        SmcError::WeightCollapse { .. } => SmcError::WeightCollapse { step },
        other => other,
    };

    for x in state.particles.iter_mut() {
        *x = model.sample_transition(*x, prop_rng);
    }
    let loglik: Vec<f64> = state
        .particles
        .iter()
        .map(|&x| model.obs_loglik(x, y))
        .collect();
    state.logweights = weight_update(&state.logweights, &loglik).map_err(with_step)?;
    state.t = step;

    let weights = state.normalized_weights().map_err(with_step)?;
    let mean = weights
        .as_slice()
        .iter()
        .zip(&state.particles)
        .map(|(&w, &x)| w * x)
        .sum();
    let ess = ess_estimate(&weights);
    let wvar = weight_variance(&weights);

    let fire =
        cfg.resample_every_step || ess < cfg.ess_threshold_fraction * n as f64;
    let (unique, resampled) = if fire {
        let tags = cfg.resampler.resample(&weights, n, res_rng)?;
        let unique = unique_ancestors(&tags);
        state.particles = tags
            .as_slice()
            .iter()
            .map(|&j| state.particles[j])
            .collect();
        state.logweights = vec![0.0; n];
        (unique, true)
    } else {
        (n, false)
    };

    Ok(StepOutcome {
        diagnostics: StepDiagnostics {
            t: state.t,
            ess,
            weight_variance: wvar,
            unique_ancestors: unique,
        },
        resampled,
        mean,
    })
}

/// Full filter pass over an observation sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// Posterior-mean estimate per observation, computed before resampling.
    pub means: Vec<f64>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Whether resampling fired at each step.
    pub resample_events: Vec<bool>,
}

/// Runs the bootstrap filter over `observations`.
pub fn run_filter<M: StateSpaceModel>(
    model: &M,
    observations: &[f64],
    cfg: &FilterConfig,
) -> Result<FilterOutput, SmcError> {
    cfg.validate()?;
    if observations.is_empty() {
        return Err(SmcError::InsufficientData(
            "filter needs at least one observation".into(),
        ));
    }
    let mut root = Rng::new(cfg.seed);
    let mut prop_rng = root.spawn();
    let mut res_rng = root.spawn();
    let mut state = ParticleState::init(model, cfg.n_particles, &mut prop_rng)?;

    let mut means = Vec::with_capacity(observations.len());
    let mut diagnostics = Vec::with_capacity(observations.len());
    let mut resample_events = Vec::with_capacity(observations.len());
    for &y in observations {
        let outcome = bpf_step(&mut state, y, model, cfg, &mut prop_rng, &mut res_rng)?;
        means.push(outcome.mean);
        diagnostics.push(outcome.diagnostics);
        resample_events.push(outcome.resampled);
    }
    Ok(FilterOutput {
        means,
        diagnostics,
        resample_events,
    })
}
