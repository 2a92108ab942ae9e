//! Closed-form link analysis: equivalent-noise decomposition, SINR moments,
//! Gamma moment matching, outage probability and ergodic capacity.
//!
//! With the co-phasing design `theta_bar_n = -arg(h_hat_n)` the SINR is
//! `gamma = gamma0 (sum_n beta_n |h_hat_n|)^2`, and each `|h_hat_n|` is
//! modeled as Rician with shape `kappa_n = (1 - eta)/eps_n` and scale
//! `Omega_n = 1 - eta + eps_n`.

use std::f64::consts::{LOG2_E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::estimator::error_variances;
use crate::link::LinkBudget;
use crate::special_fn::{digamma, laguerre_1_2, laguerre_3_2, reg_lower_gamma};

/// Powers of the four equivalent-noise contributions at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePowers {
    /// Phase noise acting on the estimated channel.
    pub phase: f64,
    /// Signal leaking through the estimation error.
    pub estimation: f64,
    /// RIS amplifier thermal noise.
    pub amplifier: f64,
    /// Receiver noise.
    pub receiver: f64,
}

impl NoisePowers {
    pub fn total(&self) -> f64 {
        self.phase + self.estimation + self.amplifier + self.receiver
    }
}

pub fn noise_power_terms(link: &LinkBudget, eps: &[f64]) -> NoisePowers {
    let s = link.signal_gain;
    let xi2 = link.xi * link.xi;
    let (mut weighted_eps, mut weighted_err) = (0.0, 0.0);
    for (b, e) in link.gains.iter().zip(eps) {
        weighted_eps += b * b * e;
        weighted_err += b * b * (link.eta - e);
    }
    NoisePowers {
        phase: s * (1.0 - xi2) * weighted_eps,
        estimation: s * weighted_err,
        amplifier: link.amp_noise * link.gain_energy(),
        receiver: link.rx_noise,
    }
}

/// Total equivalent noise in one step,
/// `s sum beta^2 (eta - xi^2 eps) + rho_r sigma_a^2 B + sigma_w^2`.
pub fn equivalent_noise(link: &LinkBudget, eps: &[f64]) -> f64 {
    let xi2 = link.xi * link.xi;
    let leak: f64 = link
        .gains
        .iter()
        .zip(eps)
        .map(|(b, e)| b * b * (link.eta - xi2 * e))
        .sum();
    link.signal_gain * leak + link.amp_noise * link.gain_energy() + link.rx_noise
}

/// SINR prefactor `gamma0 = s xi^2 / X_n`.
pub fn gamma0(link: &LinkBudget, eps: &[f64]) -> Result<f64> {
    let xn = equivalent_noise(link, eps);
    if !(xn > 0.0) {
        return Err(Error::Degenerate("equivalent noise power is zero".into()));
    }
    Ok(link.signal_gain * link.xi * link.xi / xn)
}

/// `gamma0 (sum_n beta_n |h_hat_n|)^2`.
pub fn instantaneous_sinr(gamma0: f64, gains: &[f64], h_hat: &[Complex64]) -> f64 {
    let amp: f64 = gains.iter().zip(h_hat).map(|(b, h)| b * h.norm()).sum();
    gamma0 * amp * amp
}

/// Shape, scale and the first four raw moments of a Rician amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianMoments {
    pub kappa: f64,
    pub omega: f64,
    /// `E|h|^k` for `k = 1..4`.
    pub mu: [f64; 4],
}

impl RicianMoments {
    /// Degenerate amplitude fixed at `a` (an element with `eps_n = 0`).
    pub fn point_mass(a: f64) -> Self {
        RicianMoments {
            kappa: f64::INFINITY,
            omega: a * a,
            mu: [a, a * a, a * a * a, a * a * a * a],
        }
    }

    /// Same as [`rician_moments`] but with caller-supplied Laguerre
    /// functions `L_{1/2}` and `L_{3/2}`.
    pub fn with_laguerre(
        eta: f64,
        eps: f64,
        l_half: impl Fn(f64) -> f64,
        l_three_halves: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(
                "rician_moments",
                format!("estimate variance {eps} must be > 0"),
            ));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain(
                "rician_moments",
                format!("eta = {eta} outside [0, 1]"),
            ));
        }
        let kappa = (1.0 - eta) / eps;
        let omega = 1.0 - eta + eps;
        let k1 = kappa + 1.0;
        let mu1 = (PI * omega / (4.0 * k1)).sqrt() * l_half(-kappa);
        let mu3 = (9.0 * PI * omega.powi(3) / (16.0 * k1.powi(3))).sqrt() * l_three_halves(-kappa);
        let mu4 = (kappa * kappa + 4.0 * kappa + 2.0) * omega * omega / (k1 * k1);
        Ok(RicianMoments {
            kappa,
            omega,
            mu: [mu1, omega, mu3, mu4],
        })
    }
}

/// Moments of `|h_hat_n|` for estimate variance `eps` and channel variance `eta`.
pub fn rician_moments(eta: f64, eps: f64) -> Result<RicianMoments> {
    RicianMoments::with_laguerre(eta, eps, laguerre_1_2, laguerre_3_2)
}

/// Moments for every element, treating `eps_n = 0` as a point mass at
/// `sqrt(1 - eta)`.
pub fn element_moments(eta: f64, eps: &[f64]) -> Result<Vec<RicianMoments>> {
    eps.iter()
        .map(|&e| {
            if e == 0.0 {
                Ok(RicianMoments::point_mass((1.0 - eta).max(0.0).sqrt()))
            } else {
                rician_moments(eta, e)
            }
        })
        .collect()
}

/// `(E[gamma], E[gamma^2])` for `gamma = gamma0 (sum beta_n |h_hat_n|)^2` with
/// independent amplitudes.
///
/// The fourth power expands into multinomial terms over distinct index sets
/// with coefficients 1 (`n^4`), 4 (`n1^3 n2`), 6 (`{n1, n2}` squared pairs),
/// 12 (`n1^2` times a distinct pair `{n2, n3}`) and 24 (four distinct
/// indices). Each distinct-index sum is reduced to power sums by
/// inclusion-exclusion, so the cost is O(N).
pub fn sinr_moments(gamma0: f64, gains: &[f64], moments: &[RicianMoments]) -> (f64, f64) {
    // a = beta mu1, b = beta^2 mu2, c = beta^3 mu3, d = beta^4 mu4
    let mut s = PowerSums::default();
    for (beta, m) in gains.iter().zip(moments) {
        let a = beta * m.mu[0];
        let b = beta * beta * m.mu[1];
        let c = beta.powi(3) * m.mu[2];
        let d = beta.powi(4) * m.mu[3];
        s.a1 += a;
        s.a2 += a * a;
        s.a3 += a * a * a;
        s.a4 += a * a * a * a;
        s.b1 += b;
        s.b2 += b * b;
        s.c1 += c;
        s.d1 += d;
        s.ab += a * b;
        s.aab += a * a * b;
        s.ac += a * c;
    }
    let a1 = s.a1;
    // ordered pairs n1 != n2
    let pairs_aa = a1 * a1 - s.a2;
    let second = s.b1 + pairs_aa;

    let pairs_ca = s.c1 * a1 - s.ac;
    let pairs_bb = s.b1 * s.b1 - s.b2;
    // ordered triples, all distinct: b_{n1} a_{n2} a_{n3}
    let triples_baa = s.b1 * a1 * a1 - 2.0 * a1 * s.ab - s.b1 * s.a2 + 2.0 * s.aab;
    // ordered quadruples, all distinct
    let quads =
        a1.powi(4) - 6.0 * a1 * a1 * s.a2 + 3.0 * s.a2 * s.a2 + 8.0 * a1 * s.a3 - 6.0 * s.a4;

    // convert ordered sums to sums over distinct index sets
    let fourth = s.d1
        + 4.0 * pairs_ca
        + 6.0 * (pairs_bb / 2.0)
        + 12.0 * (triples_baa / 2.0)
        + 24.0 * (quads / 24.0);
    (gamma0 * second, gamma0 * gamma0 * fourth)
}

#[derive(Default)]
struct PowerSums {
    a1: f64,
    a2: f64,
    a3: f64,
    a4: f64,
    b1: f64,
    b2: f64,
    c1: f64,
    d1: f64,
    ab: f64,
    aab: f64,
    ac: f64,
}

/// Moment-matched Gamma parameters for `gamma` and for `1 + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
    pub shape_prime: f64,
    pub scale_prime: f64,
}

pub fn gamma_match(mean: f64, second_moment: f64) -> Result<GammaFit> {
    let var = second_moment - mean * mean;
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate(format!(
            "SINR variance {var} is not positive"
        )));
    }
    if !(mean > 0.0) {
        return Err(Error::Degenerate(format!(
            "SINR mean {mean} is not positive"
        )));
    }
    let m1 = mean + 1.0;
    Ok(GammaFit {
        shape: mean * mean / var,
        scale: var / mean,
        shape_prime: m1 * m1 / var,
        scale_prime: var / m1,
    })
}

/// `Pr(gamma < threshold)` under `Gamma(shape, scale)`.
pub fn outage_probability(shape: f64, scale: f64, threshold: f64) -> Result<f64> {
    if !(scale > 0.0) || !(threshold >= 0.0) {
        return Err(Error::domain(
            "outage_probability",
            format!("scale {scale} and threshold {threshold} must be positive"),
        ));
    }
    reg_lower_gamma(shape, threshold / scale)
}

/// `E[log2(1 + gamma)]` with `1 + gamma ~ Gamma(shape', scale')`:
/// `log2(e) psi((E + 1)^2 / V) + log2(V / (E + 1))`.
pub fn ergodic_capacity(mean: f64, var: f64) -> Result<f64> {
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate(format!(
            "SINR variance {var} is not positive"
        )));
    }
    let m1 = mean + 1.0;
    Ok(LOG2_E * digamma(m1 * m1 / var)? + (var / m1).log2())
}

/// Large-`N`, high-power capacity with equal gains:
/// `log2(1 + (pi/4) xi^2 eps / (eta - xi^2 eps) L_{1/2}^2((eta - 1)/eps) N)`,
/// where `eps = T xi^2 eta^2 / (T xi^2 eta + N (1 - xi^2))`.
pub fn asymptotic_capacity_from(xi: f64, eta: f64, n: usize, pilot_len: usize) -> Result<f64> {
    let (t, nf) = (pilot_len as f64, n as f64);
    let xi2 = xi * xi;
    let denom = t * xi2 * eta + nf * (1.0 - xi2);
    if !(denom > 0.0) {
        return Err(Error::Degenerate(
            "no training energy reaches the estimator".into(),
        ));
    }
    let eps = t * xi2 * eta * eta / denom;
    let gap = eta - xi2 * eps;
    if !(gap > 1e-15 * eta.max(1e-300)) {
        return Err(Error::Degenerate(
            "perfect estimation without phase noise: capacity grows without bound".into(),
        ));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let l = laguerre_1_2((eta - 1.0) / eps);
    Ok((1.0 + PI / 4.0 * xi2 * eps / gap * l * l * nf).log2())
}

pub fn asymptotic_capacity(cfg: &ScenarioConfig) -> Result<f64> {
    let link = LinkBudget::from_config(cfg)?;
    if cfg.amp_gains.common().is_none() {
        return Err(Error::InvalidConfig(
            "asymptotic capacity needs equal amplitude gains".into(),
        ));
    }
    asymptotic_capacity_from(link.xi, link.eta, link.n_elements(), link.pilot_len)
}

/// Every closed-form SINR quantity for one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrStatistics {
    pub gamma0: f64,
    pub mean_gamma: f64,
    pub second_moment: f64,
    pub var_gamma: f64,
    pub fit: GammaFit,
    pub outage_prob: f64,
    /// Bits/s/Hz.
    pub capacity: f64,
}

impl SinrStatistics {
    pub fn from_link(link: &LinkBudget, eps: &[f64], threshold: f64) -> Result<Self> {
        let g0 = gamma0(link, eps)?;
        let moments = element_moments(link.eta, eps)?;
        let (mean, second) = sinr_moments(g0, &link.gains, &moments);
        let fit = gamma_match(mean, second)?;
        let var = second - mean * mean;
        Ok(SinrStatistics {
            gamma0: g0,
            mean_gamma: mean,
            second_moment: second,
            var_gamma: var,
            fit,
            outage_prob: outage_probability(fit.shape, fit.scale, threshold)?,
            capacity: ergodic_capacity(mean, var)?,
        })
    }
}

pub fn sinr_statistics(cfg: &ScenarioConfig) -> Result<SinrStatistics> {
    let link = LinkBudget::from_config(cfg)?;
    let eps = error_variances(&link)?;
    SinrStatistics::from_link(&link, &eps, cfg.sinr_threshold)
}
