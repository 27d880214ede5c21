//! Reference state-space models and the exact Kalman oracle.
//!
//! Two scalar models exercise the filter:
//!
//! * **Linear-Gaussian (LGSS)** — `x_t = phi * x_{t-1} + v_t`,
//!   `y_t = x_t + e_t` with Gaussian noise. Its posterior is available in
//!   closed form through the Kalman filter, which makes it the yardstick for
//!   particle-filter accuracy.
//! * **Stochastic volatility (SV)** — the latent log-variance follows a
//!   mean-reverting AR(1), `x_t = mu + rho * (x_{t-1} - mu) + v_t`, and a
//!   return is observed as `y_t ~ N(0, exp(x_t) * tau)`. Nonlinear in the
//!   observation, so no exact filter exists.
//!
//! Both models start from their stationary distribution: the filters,
//! simulators, and the Kalman recursion all treat the initial state as
//! unobserved and propagate once before weighing the first observation.

use crate::error::SmcError;
use crate::rng::Rng;

const LN_2PI: f64 = 1.8378770664093453;

/// Log-density of `N(mean, var)` evaluated at `x`. `var` must be positive.
pub fn gaussian_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + var.ln() + d * d / var)
}

/// A scalar hidden-Markov model the bootstrap filter can run against.
pub trait StateSpaceModel {
    /// Draws the unobserved initial state `x_0`.
    fn sample_initial(&self, rng: &mut Rng) -> f64;
    /// Draws `x_t` given `x_{t-1}`.
    fn sample_transition(&self, x_prev: f64, rng: &mut Rng) -> f64;
    /// Log-likelihood of observation `y` given state `x`.
    fn obs_loglik(&self, x: f64, y: f64) -> f64;
}

/// Parameters of the linear-Gaussian model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssParams {
    /// State autoregression coefficient.
    pub phi: f64,
    /// State noise standard deviation.
    pub sigma_v: f64,
    /// Observation noise standard deviation.
    pub sigma_e: f64,
}

impl Default for LgssParams {
    fn default() -> Self {
        LgssParams {
            phi: 0.75,
            sigma_v: 1.0,
            sigma_e: 0.1,
        }
    }
}

impl LgssParams {
    /// Full validation, including `|phi| < 1` so the stationary initial
    /// distribution exists.
    pub fn validate(&self) -> Result<(), SmcError> {
        self.validate_noise()?;
        if self.phi.abs() >= 1.0 {
            return Err(SmcError::InvalidParams(format!(
                "phi = {} must satisfy |phi| < 1 for a stationary state process",
                self.phi
            )));
        }
        Ok(())
    }

    /// Noise-only validation used by the explicit-prior Kalman filter, which
    /// is well defined for any finite `phi` (including unit roots).
    pub fn validate_noise(&self) -> Result<(), SmcError> {
        if !self.phi.is_finite() {
            return Err(SmcError::InvalidParams(format!("phi = {} is not finite", self.phi)));
        }
        if !(self.sigma_v.is_finite() && self.sigma_v > 0.0) {
            return Err(SmcError::InvalidParams(format!(
                "sigma_v = {} must be positive and finite",
                self.sigma_v
            )));
        }
        if !(self.sigma_e.is_finite() && self.sigma_e > 0.0) {
            return Err(SmcError::InvalidParams(format!(
                "sigma_e = {} must be positive and finite",
                self.sigma_e
            )));
        }
        Ok(())
    }

    /// Variance of the stationary state distribution,
    /// `sigma_v^2 / (1 - phi^2)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma_v * self.sigma_v / (1.0 - self.phi * self.phi)
    }
}

/// The linear-Gaussian model, ready to drive the particle filter.
#[derive(Debug, Clone)]
pub struct LgssModel {
    params: LgssParams,
}

impl LgssModel {
    pub fn new(params: LgssParams) -> Result<Self, SmcError> {
        params.validate()?;
        Ok(LgssModel { params })
    }

    pub fn params(&self) -> &LgssParams {
        &self.params
    }
}

impl StateSpaceModel for LgssModel {
    fn sample_initial(&self, rng: &mut Rng) -> f64 {
        rng.next_gaussian(0.0, self.params.stationary_variance().sqrt())
    }

    fn sample_transition(&self, x_prev: f64, rng: &mut Rng) -> f64 {
        rng.next_gaussian(self.params.phi * x_prev, self.params.sigma_v)
    }

    fn obs_loglik(&self, x: f64, y: f64) -> f64 {
        gaussian_logpdf(y, x, self.params.sigma_e * self.params.sigma_e)
    }
}

/// Parameters of the stochastic volatility model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvParams {
    /// Mean log-variance level.
    pub mu: f64,
    /// Persistence of the log-variance process.
    pub rho: f64,
    /// Log-variance noise standard deviation.
    pub sigma_v: f64,
    /// Observation variance scale: `y_t ~ N(0, exp(x_t) * tau)`.
    pub tau: f64,
}

impl Default for SvParams {
    fn default() -> Self {
        SvParams {
            mu: 0.0,
            rho: 0.95,
            sigma_v: 0.2,
            tau: 1.0,
        }
    }
}

impl SvParams {
    pub fn validate(&self) -> Result<(), SmcError> {
        if !self.mu.is_finite() {
            return Err(SmcError::InvalidParams(format!("mu = {} is not finite", self.mu)));
        }
        if !self.rho.is_finite() || self.rho.abs() >= 1.0 {
            return Err(SmcError::InvalidParams(format!(
                "rho = {} must satisfy |rho| < 1 for a stationary log-variance process",
                self.rho
            )));
        }
        if !(self.sigma_v.is_finite() && self.sigma_v > 0.0) {
            return Err(SmcError::InvalidParams(format!(
                "sigma_v = {} must be positive and finite",
                self.sigma_v
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(SmcError::InvalidParams(format!(
                "tau = {} must be positive and finite",
                self.tau
            )));
        }
        Ok(())
    }

    /// Variance of the stationary log-variance distribution.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma_v * self.sigma_v / (1.0 - self.rho * self.rho)
    }
}

/// The stochastic volatility model.
#[derive(Debug, Clone)]
pub struct SvModel {
    params: SvParams,
}

impl SvModel {
    pub fn new(params: SvParams) -> Result<Self, SmcError> {
        params.validate()?;
        Ok(SvModel { params })
    }

    pub fn params(&self) -> &SvParams {
        &self.params
    }
}

impl StateSpaceModel for SvModel {
    fn sample_initial(&self, rng: &mut Rng) -> f64 {
        rng.next_gaussian(self.params.mu, self.params.stationary_variance().sqrt())
    }

    fn sample_transition(&self, x_prev: f64, rng: &mut Rng) -> f64 {
        let mean = self.params.mu + self.params.rho * (x_prev - self.params.mu);
        rng.next_gaussian(mean, self.params.sigma_v)
    }

    fn obs_loglik(&self, x: f64, y: f64) -> f64 {
        gaussian_logpdf(y, 0.0, x.exp() * self.params.tau)
    }
}

/// Simulates `t` steps of the LGSS model from its stationary initial state.
/// Returns `(states, observations)`, both of length `t`; the unobserved `x_0`
/// is dropped.
pub fn lgss_simulate(
    params: &LgssParams,
    t: usize,
    rng: &mut Rng,
) -> Result<(Vec<f64>, Vec<f64>), SmcError> {
    params.validate()?;
    if t == 0 {
        return Err(SmcError::InvalidCount("simulation length must be at least 1".into()));
    }
    let model = LgssModel::new(*params)?;
    let mut states = Vec::with_capacity(t);
    let mut obs = Vec::with_capacity(t);
    let mut x = model.sample_initial(rng);
    for _ in 0..t {
        x = model.sample_transition(x, rng);
        states.push(x);
        obs.push(rng.next_gaussian(x, params.sigma_e));
    }
    Ok((states, obs))
}

/// Simulates `t` steps of the SV model from its stationary initial state.
/// Returns `(log_variances, returns)`, both of length `t`.
pub fn sv_simulate(
    params: &SvParams,
    t: usize,
    rng: &mut Rng,
) -> Result<(Vec<f64>, Vec<f64>), SmcError> {
    params.validate()?;
    if t == 0 {
        return Err(SmcError::InvalidCount("simulation length must be at least 1".into()));
    }
    let model = SvModel::new(*params)?;
    let mut states = Vec::with_capacity(t);
    let mut obs = Vec::with_capacity(t);
    let mut x = model.sample_initial(rng);
    for _ in 0..t {
        x = model.sample_transition(x, rng);
        states.push(x);
        let sd = (x.exp() * params.tau).sqrt();
        obs.push(rng.next_gaussian(0.0, sd));
    }
    Ok((states, obs))
}

/// Posterior filtering moments from the Kalman recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanOutput {
    /// Posterior mean `E[x_t | y_1..y_t]` for each observation.
    pub means: Vec<f64>,
    /// Posterior variance `Var[x_t | y_1..y_t]` for each observation.
    pub variances: Vec<f64>,
}

/// Kalman filter with the stationary initial distribution, matching the
/// particle filter's initialization exactly.
pub fn kalman_filter(params: &LgssParams, observations: &[f64]) -> Result<KalmanOutput, SmcError> {
    params.validate()?;
    kalman_filter_with_prior(params, 0.0, params.stationary_variance(), observations)
}

/// Kalman filter with an explicit prior `x_0 ~ N(prior_mean, prior_var)`.
///
/// With the prior supplied directly there is no stationarity requirement, so
/// any finite `phi` is accepted — useful for unit-root diagnostics such as
/// watching the posterior variance contract under `phi = 1`.
pub fn kalman_filter_with_prior(
    params: &LgssParams,
    prior_mean: f64,
    prior_var: f64,
    observations: &[f64],
) -> Result<KalmanOutput, SmcError> {
    params.validate_noise()?;
    if !(prior_mean.is_finite() && prior_var.is_finite() && prior_var >= 0.0) {
        return Err(SmcError::InvalidParams(format!(
            "prior N({prior_mean}, {prior_var}) is not a valid Gaussian"
        )));
    }
    if observations.is_empty() {
        return Err(SmcError::InsufficientData(
            "kalman filter needs at least one observation".into(),
        ));
    }
    let var_v = params.sigma_v * params.sigma_v;
    let var_e = params.sigma_e * params.sigma_e;
    let mut mean = prior_mean;
    let mut var = prior_var;
    let mut means = Vec::with_capacity(observations.len());
    let mut variances = Vec::with_capacity(observations.len());
    for &y in observations {
        // Predict x_t | y_1..y_{t-1}.
        let mean_pred = params.phi * mean;
        let var_pred = params.phi * params.phi * var + var_v;
        // Update with y_t; the observation map is the identity.
        let innovation_var = var_pred + var_e;
        let gain = var_pred / innovation_var;
        mean = mean_pred + gain * (y - mean_pred);
        var = (1.0 - gain) * var_pred;
        means.push(mean);
        variances.push(var);
    }
    Ok(KalmanOutput { means, variances })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lgss_params_validation() {
        assert!(LgssParams::default().validate().is_ok());
        assert!(matches!(
            LgssParams { phi: 1.0, ..LgssParams::default() }.validate(),
            Err(SmcError::InvalidParams(_))
        ));
        assert!(matches!(
            LgssParams { sigma_v: 0.0, ..LgssParams::default() }.validate(),
            Err(SmcError::InvalidParams(_))
        ));
        assert!(matches!(
            LgssParams { sigma_e: -0.1, ..LgssParams::default() }.validate(),
            Err(SmcError::InvalidParams(_))
        ));
        // Noise-only validation admits a unit root.
        assert!(LgssParams { phi: 1.0, ..LgssParams::default() }
            .validate_noise()
            .is_ok());
    }

    #[test]
    fn sv_params_validation() {
        assert!(SvParams::default().validate().is_ok());
        assert!(matches!(
            SvParams { rho: 1.0, ..SvParams::default() }.validate(),
            Err(SmcError::InvalidParams(_))
        ));
        assert!(matches!(
            SvParams { tau: 0.0, ..SvParams::default() }.validate(),
            Err(SmcError::InvalidParams(_))
        ));
    }

    #[test]
    fn gaussian_logpdf_standard_normal_at_zero() {
        // -0.5 * ln(2 pi)
        let expected = -0.9189385332046727;
        assert!((gaussian_logpdf(0.0, 0.0, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn gaussian_logpdf_penalizes_distance() {
        let near = gaussian_logpdf(0.1, 0.0, 1.0);
        let far = gaussian_logpdf(3.0, 0.0, 1.0);
        assert!(near > far);
        // Exact quadratic decay: logpdf(x) - logpdf(0) = -x^2 / (2 var).
        let diff = gaussian_logpdf(2.0, 0.0, 4.0) - gaussian_logpdf(0.0, 0.0, 4.0);
        assert!((diff - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn lgss_simulate_shapes_and_determinism() {
        let params = LgssParams::default();
        let mut a = Rng::new(10);
        let mut b = Rng::new(10);
        let (xs, ys) = lgss_simulate(&params, 50, &mut a).unwrap();
        let (xs2, ys2) = lgss_simulate(&params, 50, &mut b).unwrap();
        assert_eq!(xs.len(), 50);
        assert_eq!(ys.len(), 50);
        assert_eq!(xs, xs2);
        assert_eq!(ys, ys2);
        assert!(matches!(
            lgss_simulate(&params, 0, &mut a),
            Err(SmcError::InvalidCount(_))
        ));
    }

    #[test]
    fn lgss_simulate_degenerate_noise_pins_the_trajectory_near_zero() {
        // In the noiseless limit the stationary initial law collapses onto
        // zero and every state and observation sticks there.
        let params = LgssParams {
            phi: 0.6,
            sigma_v: 1e-12,
            sigma_e: 1e-12,
        };
        let mut rng = Rng::new(5);
        let (xs, ys) = lgss_simulate(&params, 100, &mut rng).unwrap();
        assert!(xs.iter().all(|x| x.abs() < 1e-9));
        assert!(ys.iter().all(|y| y.abs() < 1e-9));
    }

    #[test]
    fn lgss_simulate_with_zero_phi_draws_iid_states() {
        // phi = 0 removes all persistence: states are iid N(0, sigma_v^2) and
        // the sample variance over 1e5 draws lands within two percent.
        let params = LgssParams {
            phi: 0.0,
            sigma_v: 1.5,
            sigma_e: 1.0,
        };
        let mut rng = Rng::new(99);
        let (xs, _) = lgss_simulate(&params, 100_000, &mut rng).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let expected = params.sigma_v * params.sigma_v;
        assert!(
            (var - expected).abs() / expected < 0.02,
            "iid state variance {var} vs {expected}"
        );
    }

    #[test]
    fn lgss_simulated_moments_match_stationary_theory() {
        let params = LgssParams {
            phi: 0.5,
            sigma_v: 1.0,
            sigma_e: 0.3,
        };
        let mut rng = Rng::new(314);
        let (xs, ys) = lgss_simulate(&params, 200_000, &mut rng).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let expected_var = params.stationary_variance();
        assert!(mean.abs() < 0.02, "state mean {mean} should be near 0");
        assert!(
            (var - expected_var).abs() / expected_var < 0.05,
            "state variance {var} vs stationary {expected_var}"
        );
        // Observation noise: y - x should have variance sigma_e^2.
        let noise_var = ys
            .iter()
            .zip(&xs)
            .map(|(y, x)| (y - x) * (y - x))
            .sum::<f64>()
            / n;
        assert!((noise_var - 0.09).abs() < 0.005, "observation noise variance {noise_var}");
    }

    #[test]
    fn sv_simulate_shapes_and_volatility_clustering() {
        let params = SvParams::default();
        let mut rng = Rng::new(77);
        let (xs, ys) = sv_simulate(&params, 100_000, &mut rng).unwrap();
        assert_eq!(xs.len(), 100_000);
        assert_eq!(ys.len(), 100_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.05, "log-variance mean {mean} should be near mu = 0");
        let expected = params.stationary_variance();
        assert!(
            (var - expected).abs() / expected < 0.1,
            "log-variance variance {var} vs stationary {expected}"
        );
        // Squared returns must track exp(state): correlation between exp(x)
        // and y^2 is positive under volatility clustering.
        let ev: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let y2: Vec<f64> = ys.iter().map(|y| y * y).collect();
        let me = ev.iter().sum::<f64>() / n;
        let my = y2.iter().sum::<f64>() / n;
        let cov = ev
            .iter()
            .zip(&y2)
            .map(|(a, b)| (a - me) * (b - my))
            .sum::<f64>()
            / n;
        assert!(cov > 0.0, "squared returns should covary with exp(state)");
    }

    #[test]
    fn sv_transition_with_zero_rho_forgets_the_past() {
        let params = SvParams {
            rho: 0.0,
            ..SvParams::default()
        };
        let model = SvModel::new(params).unwrap();
        let mut a = Rng::new(5);
        let mut b = Rng::new(5);
        let from_low = model.sample_transition(-10.0, &mut a);
        let from_high = model.sample_transition(10.0, &mut b);
        assert_eq!(from_low.to_bits(), from_high.to_bits());
    }

    #[test]
    fn sv_obs_loglik_matches_gaussian_in_the_log_variance() {
        let params = SvParams::default();
        let model = SvModel::new(params).unwrap();
        // At x = 0 and tau = 1 the return distribution is standard normal.
        let expected = -0.9189385332046727;
        assert!((model.obs_loglik(0.0, 0.0) - expected).abs() < 1e-15);
        // Larger log-variance flattens the likelihood of a big return.
        assert!(model.obs_loglik(2.0, 3.0) > model.obs_loglik(-2.0, 3.0));
    }

    #[test]
    fn kalman_one_step_hand_computation() {
        // phi = 0.5, unit noises, prior N(0, 1), y = 1:
        // predict (0, 1.25); gain 1.25/2.25; posterior mean = var = 5/9.
        let params = LgssParams {
            phi: 0.5,
            sigma_v: 1.0,
            sigma_e: 1.0,
        };
        let out = kalman_filter_with_prior(&params, 0.0, 1.0, &[1.0]).unwrap();
        assert!((out.means[0] - 5.0 / 9.0).abs() < 1e-12, "mean {}", out.means[0]);
        assert!((out.variances[0] - 5.0 / 9.0).abs() < 1e-12, "var {}", out.variances[0]);
    }

    #[test]
    fn kalman_flat_likelihood_reduces_to_prediction() {
        // With enormous observation noise the update is a no-op, so the mean
        // decays geometrically from the prior and the variance approaches the
        // predicted variance.
        let params = LgssParams {
            phi: 0.75,
            sigma_v: 1.0,
            sigma_e: 1e12,
        };
        let ys = vec![5.0; 10];
        let out = kalman_filter_with_prior(&params, 2.0, 0.5, &ys).unwrap();
        let mut mean = 2.0;
        for (t, m) in out.means.iter().enumerate() {
            mean *= 0.75;
            assert!((m - mean).abs() < 1e-9, "step {t}: {m} vs {mean}");
        }
    }

    #[test]
    fn kalman_posterior_variance_contracts_under_unit_root() {
        // phi = 1 with (numerically) frozen state noise: each update must
        // strictly shrink the posterior variance toward zero.
        let params = LgssParams {
            phi: 1.0,
            sigma_v: 1e-154,
            sigma_e: 1.0,
        };
        let ys = vec![0.3, -0.1, 0.2, 0.0, 0.4, -0.2, 0.1, 0.05];
        let out = kalman_filter_with_prior(&params, 0.0, 10.0, &ys).unwrap();
        let mut prev = 10.0;
        for (t, &v) in out.variances.iter().enumerate() {
            assert!(v > 0.0 && v < prev, "step {t}: variance {v} should shrink below {prev}");
            prev = v;
        }
    }

    #[test]
    fn kalman_posterior_variance_never_exceeds_predicted_variance() {
        let params = LgssParams::default();
        let mut rng = Rng::new(21);
        let (_, ys) = lgss_simulate(&params, 200, &mut rng).unwrap();
        let out = kalman_filter(&params, &ys).unwrap();
        let mut var = params.stationary_variance();
        for (t, &v) in out.variances.iter().enumerate() {
            let var_pred = params.phi * params.phi * var + params.sigma_v * params.sigma_v;
            assert!(
                v > 0.0 && v <= var_pred,
                "step {t}: posterior variance {v} vs predicted {var_pred}"
            );
            var = v;
        }
    }

    #[test]
    fn kalman_rejects_degenerate_input() {
        let params = LgssParams::default();
        assert!(matches!(
            kalman_filter(&params, &[]),
            Err(SmcError::InsufficientData(_))
        ));
        assert!(matches!(
            kalman_filter_with_prior(&params, 0.0, -1.0, &[1.0]),
            Err(SmcError::InvalidParams(_))
        ));
        assert!(matches!(
            kalman_filter_with_prior(&params, f64::NAN, 1.0, &[1.0]),
            Err(SmcError::InvalidParams(_))
        ));
    }

    #[test]
    fn stationary_initial_samples_match_theory() {
        let params = LgssParams {
            phi: 0.9,
            sigma_v: 0.5,
            sigma_e: 1.0,
        };
        let model = LgssModel::new(params).unwrap();
        let mut rng = Rng::new(808);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| model.sample_initial(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let expected = params.stationary_variance();
        assert!(mean.abs() < 0.02);
        assert!((var - expected).abs() / expected < 0.05, "{var} vs {expected}");
    }
}
