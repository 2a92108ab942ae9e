//! Rician transmitter-RIS and RIS-receiver channels and their cascade.
//!
//! Small-scale channels are kept in normalized form (unit second moment per
//! element); the large-scale gains `rho_t`, `rho_r` are carried alongside so
//! the absolute channels can be recovered.
//!
//! The RIS lies in the x-z plane with its normal along y. Element `n` sits at
//! `(i_x delta_x, 0, i_y delta_y)` from the first element, with row-major
//! indexing `n = i_y N_x + i_x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{Point3, ScenarioConfig};
use crate::error::{Error, Result};

/// Which end of the RIS a line-of-sight vector points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Tx,
    Rx,
}

/// Direction of an endpoint as seen from the RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayAngles {
    /// Angle between the direction and the RIS normal.
    pub off_normal: f64,
    /// Azimuth of the direction's projection in the RIS plane, measured from
    /// the x axis towards z.
    pub in_plane: f64,
}

impl ArrayAngles {
    pub fn from_geometry(ris: Point3, endpoint: Point3) -> Result<Self> {
        let d = [
            endpoint[0] - ris[0],
            endpoint[1] - ris[1],
            endpoint[2] - ris[2],
        ];
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if !(norm > 0.0) {
            return Err(Error::DegenerateGeometry(
                "endpoint coincides with the RIS".into(),
            ));
        }
        let (ux, uy, uz) = (d[0] / norm, d[1] / norm, d[2] / norm);
        Ok(ArrayAngles {
            off_normal: uy.abs().clamp(0.0, 1.0).acos(),
            in_plane: uz.atan2(ux),
        })
    }
}

/// Unit-modulus planar-array response towards `endpoint`.
pub fn los_steering(cfg: &ScenarioConfig, endpoint: Endpoint) -> Result<Vec<Complex64>> {
    let target = match endpoint {
        Endpoint::Tx => cfg.tx_pos,
        Endpoint::Rx => cfg.rx_pos,
    };
    let angles = ArrayAngles::from_geometry(cfg.ris_pos, target)?;
    Ok(planar_response(
        angles,
        cfg.ris_rows,
        cfg.ris_cols,
        cfg.element_spacing,
        cfg.wavelength,
    ))
}

/// Phase ramp `-2 pi / lambda (i_x dx sin a cos b + i_y dy sin a sin b)`.
pub fn planar_response(
    angles: ArrayAngles,
    nx: usize,
    ny: usize,
    spacing: [f64; 2],
    wavelength: f64,
) -> Vec<Complex64> {
    let k = 2.0 * PI / wavelength;
    let (s, _) = angles.off_normal.sin_cos();
    let step_x = k * spacing[0] * s * angles.in_plane.cos();
    let step_y = k * spacing[1] * s * angles.in_plane.sin();
    let mut v = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let phase = -(ix as f64 * step_x + iy as f64 * step_y);
            v.push(Complex64::from_polar(1.0, phase));
        }
    }
    v
}

/// One draw of the small-scale channels and the cascade `h_n = g_t,n g*_r,n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub g_t: Vec<Complex64>,
    pub g_r: Vec<Complex64>,
    pub h: Vec<Complex64>,
    /// Large-scale gain of the transmitter-RIS hop.
    pub rho_t: f64,
    /// Large-scale gain of the RIS-receiver hop.
    pub rho_r: f64,
}

impl ChannelRealization {
    pub fn absolute_g_t(&self) -> Vec<Complex64> {
        let s = self.rho_t.sqrt();
        self.g_t.iter().map(|g| g * s).collect()
    }

    pub fn absolute_g_r(&self) -> Vec<Complex64> {
        let s = self.rho_r.sqrt();
        self.g_r.iter().map(|g| g * s).collect()
    }

    /// Cascade of the absolute channels, `sqrt(rho_t rho_r) h`.
    pub fn absolute_h(&self) -> Vec<Complex64> {
        let s = (self.rho_t * self.rho_r).sqrt();
        self.h.iter().map(|h| h * s).collect()
    }
}

/// First and second order statistics of the normalized cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStatistics {
    /// `E[h]`.
    pub mean_h: Vec<Complex64>,
    /// Per-element variance; the covariance is `eta I`.
    pub eta: f64,
}

// kappa / (1 + kappa), with the pure line-of-sight limit.
fn los_fraction(k: f64) -> f64 {
    if k.is_infinite() {
        1.0
    } else {
        k / (1.0 + k)
    }
}

/// `eta = (1 + k_t + k_r) / (1 + k_t + k_r + k_t k_r)`, written as
/// `1 - k_t k_r / ((1 + k_t)(1 + k_r))` so infinite factors are handled.
pub fn cascade_variance(k_t: f64, k_r: f64) -> f64 {
    1.0 - los_fraction(k_t) * los_fraction(k_r)
}

/// Mean and covariance of `h`. The mean has modulus `sqrt(1 - eta)` per
/// element so that `E|h_n|^2 = 1`.
pub fn channel_statistics(cfg: &ScenarioConfig) -> Result<ChannelStatistics> {
    let gt = los_steering(cfg, Endpoint::Tx)?;
    let gr = los_steering(cfg, Endpoint::Rx)?;
    let scale = (los_fraction(cfg.rician_k_t) * los_fraction(cfg.rician_k_r)).sqrt();
    Ok(ChannelStatistics {
        mean_h: gt
            .iter()
            .zip(&gr)
            .map(|(t, r)| t * r.conj() * scale)
            .collect(),
        eta: cascade_variance(cfg.rician_k_t, cfg.rician_k_r),
    })
}

/// `CN(0, 1)` draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Precomputed line-of-sight parts for repeated channel draws.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    los_t: Vec<Complex64>,
    los_r: Vec<Complex64>,
    scatter_t: f64,
    scatter_r: f64,
    rho_t: f64,
    rho_r: f64,
}

impl ChannelSampler {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let (ft, fr) = (los_fraction(cfg.rician_k_t), los_fraction(cfg.rician_k_r));
        let scale = |v: Vec<Complex64>, f: f64| v.into_iter().map(|x| x * f.sqrt()).collect();
        Ok(ChannelSampler {
            los_t: scale(los_steering(cfg, Endpoint::Tx)?, ft),
            los_r: scale(los_steering(cfg, Endpoint::Rx)?, fr),
            scatter_t: (1.0 - ft).sqrt(),
            scatter_r: (1.0 - fr).sqrt(),
            rho_t: cfg.large_scale_t()?,
            rho_r: cfg.large_scale_r()?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let n = self.los_t.len();
        let mut g_t = Vec::with_capacity(n);
        let mut g_r = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for (lt, lr) in self.los_t.iter().zip(&self.los_r) {
            let t = if self.scatter_t > 0.0 {
                lt + complex_normal(rng) * self.scatter_t
            } else {
                *lt
            };
            let r = if self.scatter_r > 0.0 {
                lr + complex_normal(rng) * self.scatter_r
            } else {
                *lr
            };
            g_t.push(t);
            g_r.push(r);
            h.push(t * r.conj());
        }
        ChannelRealization {
            g_t,
            g_r,
            h,
            rho_t: self.rho_t,
            rho_r: self.rho_r,
        }
    }
}

/// One Rician channel draw for `cfg`.
pub fn sample_channels<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    Ok(ChannelSampler::new(cfg)?.sample(rng))
}
