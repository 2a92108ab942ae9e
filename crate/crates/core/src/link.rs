use serde::{Deserialize, Serialize};

use crate::channel::cascade_variance;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::phase_noise::coherency_factor;

/// The handful of scalars every closed-form expression depends on.
///
/// Built from a [`ScenarioConfig`], or directly when a test wants to pin
/// e.g. `rho rho_t rho_r = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// `rho rho_t rho_r`.
    pub signal_gain: f64,
    /// `rho_r sigma_a^2`, amplifier noise referred to the receiver.
    pub amp_noise: f64,
    /// `sigma_w^2`.
    pub rx_noise: f64,
    /// Coherency factor of the phase noise.
    pub xi: f64,
    /// Per-element variance of the cascaded channel.
    pub eta: f64,
    pub pilot_len: usize,
    pub gains: Vec<f64>,
}

impl LinkBudget {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let rho_t = cfg.large_scale_t()?;
        let rho_r = cfg.large_scale_r()?;
        Ok(LinkBudget {
            signal_gain: cfg.transmit_power * rho_t * rho_r,
            amp_noise: rho_r * cfg.amp_noise_var,
            rx_noise: cfg.rx_noise_var,
            xi: coherency_factor(&cfg.phase_noise),
            eta: cascade_variance(cfg.rician_k_t, cfg.rician_k_r),
            pilot_len: cfg.pilot_len,
            gains: cfg.gains()?,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.gains.len()
    }

    /// `sum beta_n^2`.
    pub fn gain_energy(&self) -> f64 {
        self.gains.iter().map(|b| b * b).sum()
    }

    /// The scaled-identity part of the pilot covariance:
    /// `s (1 - xi^2) B + rho_r sigma_a^2 B + sigma_w^2`, with `B = sum beta^2`.
    pub fn pilot_noise_floor(&self) -> f64 {
        let b = self.gain_energy();
        self.signal_gain * (1.0 - self.xi * self.xi) * b + self.amp_noise * b + self.rx_noise
    }
}
