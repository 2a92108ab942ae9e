//! RIS phase noise: sampling, the coherency factor `xi = E[e^{j theta}]`, and
//! intended vs. actual RIS response vectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::PhaseNoiseModel;
use crate::error::{Error, Result};
use crate::special_fn::{bessel_i0_scaled, bessel_i1_scaled};

/// `E[e^{j theta}]` of the phase noise. Real because both densities are
/// symmetric around zero.
pub fn coherency_factor(model: &PhaseNoiseModel) -> f64 {
    match *model {
        PhaseNoiseModel::VonMises { concentration } => {
            if concentration == 0.0 {
                0.0
            } else {
                bessel_i1_scaled(concentration) / bessel_i0_scaled(concentration)
            }
        }
        PhaseNoiseModel::Uniform { half_width } => {
            if half_width == 0.0 {
                1.0
            } else {
                half_width.sin() / half_width
            }
        }
        PhaseNoiseModel::None => 1.0,
    }
}

/// Draws phase errors for one model. Construction precomputes the von Mises
/// rejection envelope so repeated draws are cheap.
#[derive(Debug, Clone, Copy)]
pub enum PhaseNoiseSampler {
    None,
    Uniform {
        half_width: f64,
    },
    /// Best-Fisher wrapped-Cauchy envelope with parameter `r`.
    VonMises {
        concentration: f64,
        r: f64,
    },
    /// Concentration so small the density is flat.
    Circular,
}

impl PhaseNoiseSampler {
    pub fn new(model: &PhaseNoiseModel) -> Self {
        match *model {
            PhaseNoiseModel::None => PhaseNoiseSampler::None,
            PhaseNoiseModel::Uniform { half_width } => PhaseNoiseSampler::Uniform { half_width },
            PhaseNoiseModel::VonMises { concentration } if concentration < 1e-8 => {
                PhaseNoiseSampler::Circular
            }
            PhaseNoiseModel::VonMises { concentration } => {
                let k = concentration;
                let tau = 1.0 + (1.0 + 4.0 * k * k).sqrt();
                let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * k);
                PhaseNoiseSampler::VonMises {
                    concentration: k,
                    r: (1.0 + rho * rho) / (2.0 * rho),
                }
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, PhaseNoiseSampler::None)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PhaseNoiseSampler::None => 0.0,
            PhaseNoiseSampler::Uniform { half_width } => {
                half_width * (2.0 * rng.random::<f64>() - 1.0)
            }
            PhaseNoiseSampler::Circular => PI * (2.0 * rng.random::<f64>() - 1.0),
            PhaseNoiseSampler::VonMises { concentration, r } => loop {
                let u1: f64 = rng.random();
                let u2: f64 = rng.random();
                let z = (PI * u1).cos();
                let f = (1.0 + r * z) / (r + z);
                let c = concentration * (r - f);
                if c * (2.0 - c) > u2 || (c / u2).ln() + 1.0 - c >= 0.0 {
                    let theta = f.clamp(-1.0, 1.0).acos();
                    break if rng.random::<bool>() { theta } else { -theta };
                }
            },
        }
    }

    /// `e^{j theta}` for a fresh draw.
    pub fn sample_phasor<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        if self.is_none() {
            return Complex64::new(1.0, 0.0);
        }
        let (s, c) = self.sample(rng).sin_cos();
        Complex64::new(c, s)
    }
}

/// `n` i.i.d. phase errors from `model`.
pub fn sample_phase_noise<R: Rng + ?Sized>(
    model: &PhaseNoiseModel,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let sampler = PhaseNoiseSampler::new(model);
    (0..n).map(|_| sampler.sample(rng)).collect()
}

/// Intended and realized RIS reflection coefficients for one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisResponse {
    /// `beta_n e^{j theta_bar_n}`
    pub intended: Vec<Complex64>,
    /// `beta_n e^{j (theta_bar_n + theta_tilde_n)}`
    pub actual: Vec<Complex64>,
}

/// Phase that co-phases `h_n`; zero for a zero estimate.
pub fn cophasing_angle(h: Complex64) -> f64 {
    if h == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        -h.arg()
    }
}

/// Sets `theta_bar_n = -arg(h_hat_n)` and perturbs each phase by a fresh
/// noise draw.
pub fn apply_phase_design<R: Rng + ?Sized>(
    estimate: &[Complex64],
    gains: &[f64],
    model: &PhaseNoiseModel,
    rng: &mut R,
) -> Result<RisResponse> {
    if estimate.len() != gains.len() {
        return Err(Error::InvalidConfig(format!(
            "{} channel estimates for {} gains",
            estimate.len(),
            gains.len()
        )));
    }
    let sampler = PhaseNoiseSampler::new(model);
    let mut intended = Vec::with_capacity(gains.len());
    let mut actual = Vec::with_capacity(gains.len());
    for (h, &beta) in estimate.iter().zip(gains) {
        let z = Complex64::from_polar(beta, cophasing_angle(*h));
        intended.push(z);
        actual.push(z * sampler.sample_phasor(rng));
    }
    Ok(RisResponse { intended, actual })
}
