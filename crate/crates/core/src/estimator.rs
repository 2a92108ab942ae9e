//! Pilot training and LMMSE estimation of the cascaded channel.
//!
//! With an orthogonal training matrix (`Zbar^H Zbar = T diag(beta^2)`) the
//! pilot covariance `C_yy = a Zbar Zbar^H + c I` never has to be inverted:
//! pushing `Zbar^H` through gives `Zbar^H C_yy^-1 = (a T diag(beta^2) + c I)^-1 Zbar^H`,
//! so each element of the estimate is a scaled correlation of the pilots
//! with one training column. A dense Cholesky route is kept for validation.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_statistics, complex_normal, ChannelRealization};
use crate::config::{ScenarioConfig, TrainingBasis};
use crate::error::{Error, Result};
use crate::link::LinkBudget;
use crate::phase_noise::PhaseNoiseSampler;

/// `T x N` intended RIS configurations used during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPattern {
    pub basis: TrainingBasis,
    pub pilot_len: usize,
    pub n_elements: usize,
    /// Row-major `T x N`; row `t` is `beta_n e^{j theta_bar_{t,n}}`.
    pub zbar: Vec<Complex64>,
}

impl TrainingPattern {
    /// First `N` columns of the `T x T` DFT or Sylvester-Hadamard matrix,
    /// column `n` scaled by `beta_n`.
    pub fn new(basis: TrainingBasis, pilot_len: usize, gains: &[f64]) -> Result<Self> {
        let n = gains.len();
        if pilot_len < n {
            return Err(Error::Pattern(format!(
                "T = {pilot_len} patterns cannot resolve N = {n} elements"
            )));
        }
        if basis == TrainingBasis::Hadamard && !pilot_len.is_power_of_two() {
            return Err(Error::Pattern(format!(
                "Sylvester Hadamard needs a power-of-two T, got {pilot_len}"
            )));
        }
        let mut zbar = Vec::with_capacity(pilot_len * n);
        for t in 0..pilot_len {
            for (col, &beta) in gains.iter().enumerate() {
                let unit = match basis {
                    TrainingBasis::Dft => {
                        // reduce t*n mod T first so large indices stay exact
                        let k = (t * col) % pilot_len;
                        Complex64::from_polar(1.0, -2.0 * PI * k as f64 / pilot_len as f64)
                    }
                    TrainingBasis::Hadamard => {
                        let sign = if (t & col).count_ones() % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        Complex64::new(sign, 0.0)
                    }
                };
                zbar.push(unit * beta);
            }
        }
        Ok(TrainingPattern {
            basis,
            pilot_len,
            n_elements: n,
            zbar,
        })
    }

    pub fn row(&self, t: usize) -> &[Complex64] {
        &self.zbar[t * self.n_elements..(t + 1) * self.n_elements]
    }

    pub fn get(&self, t: usize, n: usize) -> Complex64 {
        self.zbar[t * self.n_elements + n]
    }

    /// `Zbar^H Zbar`, row-major `N x N`.
    pub fn gram(&self) -> Vec<Complex64> {
        let n = self.n_elements;
        let mut g = vec![Complex64::new(0.0, 0.0); n * n];
        for t in 0..self.pilot_len {
            let row = self.row(t);
            for i in 0..n {
                let zi = row[i].conj();
                for j in 0..n {
                    g[i * n + j] += zi * row[j];
                }
            }
        }
        g
    }

    /// `Zbar^H v` for a length-`T` vector.
    pub fn adjoint_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_elements];
        for (t, vt) in v.iter().enumerate() {
            for (o, z) in out.iter_mut().zip(self.row(t)) {
                *o += z.conj() * vt;
            }
        }
        out
    }

    /// `Zbar x` for a length-`N` vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.pilot_len)
            .map(|t| self.row(t).iter().zip(x).map(|(z, h)| z * h).sum())
            .collect()
    }
}

pub fn make_training_pattern(
    cfg: &ScenarioConfig,
    basis: TrainingBasis,
) -> Result<TrainingPattern> {
    TrainingPattern::new(basis, cfg.pilot_len, &cfg.gains()?)
}

/// Draws the `T` pilot observations
/// `y = sqrt(rho rho_t rho_r) Z h + sqrt(rho_r) nu + w`.
///
/// Each symbol and element gets its own phase-noise draw. The amplifier term
/// `nu_t = sum_n z_{t,n} a_{t,n} g*_{r,n}` is drawn directly as
/// `CN(0, sigma_a^2 sum_n beta_n^2 |g_{r,n}|^2)`, which is its exact
/// distribution given the channel since `|z_{t,n}| = beta_n`.
pub fn synthesize_pilots<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    pattern: &TrainingPattern,
    channel: &ChannelRealization,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let link = LinkBudget::from_config(cfg)?;
    let sampler = PhaseNoiseSampler::new(&cfg.phase_noise);
    let mut y = vec![Complex64::new(0.0, 0.0); pattern.pilot_len];
    synthesize_pilots_into(&link, pattern, &sampler, channel, rng, &mut y);
    Ok(y)
}

pub(crate) fn synthesize_pilots_into<R: Rng + ?Sized>(
    link: &LinkBudget,
    pattern: &TrainingPattern,
    sampler: &PhaseNoiseSampler,
    channel: &ChannelRealization,
    rng: &mut R,
    y: &mut [Complex64],
) {
    let amp = link.amp_noise
        * link
            .gains
            .iter()
            .zip(&channel.g_r)
            .map(|(b, g)| b * b * g.norm_sqr())
            .sum::<f64>();
    let amp_sd = amp.sqrt();
    let rx_sd = link.rx_noise.sqrt();
    let sig = link.signal_gain.sqrt();
    for (t, yt) in y.iter_mut().enumerate() {
        let row = pattern.row(t);
        let mut acc = Complex64::new(0.0, 0.0);
        if sampler.is_none() {
            for (z, h) in row.iter().zip(&channel.h) {
                acc += z * h;
            }
        } else {
            for (z, h) in row.iter().zip(&channel.h) {
                acc += z * sampler.sample_phasor(rng) * h;
            }
        }
        let mut v = acc * sig;
        if amp_sd > 0.0 {
            v += complex_normal(rng) * amp_sd;
        }
        if rx_sd > 0.0 {
            v += complex_normal(rng) * rx_sd;
        }
        *yt = v;
    }
}

/// Closed-form variances of the estimate,
/// `eps_n = T s xi^2 beta_n^2 eta^2 / (T s xi^2 beta_n^2 eta + c)`.
pub fn error_variances(link: &LinkBudget) -> Result<Vec<f64>> {
    let (denoms, numer) = per_element_denominators(link)?;
    Ok(link
        .gains
        .iter()
        .zip(&denoms)
        .map(|(b, d)| numer * b * b * link.eta / d)
        .collect())
}

// Returns (a T beta_n^2 + c) per element and a T = T s xi^2 eta.
fn per_element_denominators(link: &LinkBudget) -> Result<(Vec<f64>, f64)> {
    let c = link.pilot_noise_floor();
    let at = link.pilot_len as f64 * link.signal_gain * link.xi * link.xi * link.eta;
    let denoms: Vec<f64> = link.gains.iter().map(|b| at * b * b + c).collect();
    let rank_deficient = c == 0.0 && link.pilot_len > link.n_elements();
    if rank_deficient || denoms.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::SingularCovariance);
    }
    Ok((denoms, at))
}

/// `eta - mean(eps_n)`.
pub fn nmse_from_variances(eta: f64, eps: &[f64]) -> f64 {
    eta - eps.iter().sum::<f64>() / eps.len() as f64
}

/// Normalized MSE `E||h - h_hat||^2 / E||h||^2` of the LMMSE estimate.
pub fn nmse_analytic(cfg: &ScenarioConfig) -> Result<f64> {
    let link = LinkBudget::from_config(cfg)?;
    Ok(nmse_from_variances(link.eta, &error_variances(&link)?))
}

/// High-power limit of the N-MSE,
/// `(1/N) sum_n (1 - xi^2) B eta / (T xi^2 beta_n^2 eta + (1 - xi^2) B)`.
pub fn nmse_floor(link: &LinkBudget) -> f64 {
    let b = link.gain_energy();
    let leak = (1.0 - link.xi * link.xi) * b;
    let t = link.pilot_len as f64;
    let sum: f64 = link
        .gains
        .iter()
        .map(|g| {
            let d = t * link.xi * link.xi * g * g * link.eta + leak;
            if d == 0.0 {
                0.0
            } else {
                leak * link.eta / d
            }
        })
        .sum();
    sum / link.n_elements() as f64
}

/// Output of one LMMSE estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub h_hat: Vec<Complex64>,
    /// Variance of each estimated element; the error variance is `eta - eps_n`.
    pub eps: Vec<f64>,
    pub nmse_analytic: f64,
}

impl EstimationResult {
    /// `||h - h_hat||^2` against the true channel.
    pub fn squared_error(&self, h: &[Complex64]) -> f64 {
        squared_error(h, &self.h_hat)
    }
}

pub fn squared_error(h: &[Complex64], h_hat: &[Complex64]) -> f64 {
    h.iter().zip(h_hat).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// LMMSE estimator with all pattern-dependent quantities precomputed.
#[derive(Debug, Clone)]
pub struct LmmseEstimator {
    pattern: TrainingPattern,
    mean_h: Vec<Complex64>,
    pilot_mean: Vec<Complex64>,
    weights: Vec<f64>,
    eps: Vec<f64>,
    nmse: f64,
}

impl LmmseEstimator {
    pub fn new(
        link: &LinkBudget,
        pattern: TrainingPattern,
        mean_h: Vec<Complex64>,
    ) -> Result<Self> {
        if pattern.n_elements != link.n_elements() || mean_h.len() != link.n_elements() {
            return Err(Error::InvalidConfig(
                "dimension mismatch between link, pattern and mean".into(),
            ));
        }
        let (denoms, _) = per_element_denominators(link)?;
        let s = link.signal_gain.sqrt();
        let weights = denoms.iter().map(|d| s * link.eta * link.xi / d).collect();
        let scaled_mean: Vec<Complex64> = mean_h.iter().map(|m| m * (s * link.xi)).collect();
        let pilot_mean = pattern.apply(&scaled_mean);
        let eps = error_variances(link)?;
        let nmse = nmse_from_variances(link.eta, &eps);
        Ok(LmmseEstimator {
            pattern,
            mean_h,
            pilot_mean,
            weights,
            eps,
            nmse,
        })
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let link = LinkBudget::from_config(cfg)?;
        let pattern = make_training_pattern(cfg, cfg.training_basis)?;
        let stats = channel_statistics(cfg)?;
        Self::new(&link, pattern, stats.mean_h)
    }

    pub fn pattern(&self) -> &TrainingPattern {
        &self.pattern
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn nmse(&self) -> f64 {
        self.nmse
    }

    /// `h_hat = E[h] + C_hy C_yy^-1 (y - E[y])`, written into `out`.
    pub fn estimate_into(&self, y: &[Complex64], out: &mut [Complex64]) {
        let n = self.mean_h.len();
        out.copy_from_slice(&self.mean_h);
        let mut corr = vec![Complex64::new(0.0, 0.0); n];
        for (t, (yt, mt)) in y.iter().zip(&self.pilot_mean).enumerate() {
            let r = yt - mt;
            for (c, z) in corr.iter_mut().zip(self.pattern.row(t)) {
                *c += z.conj() * r;
            }
        }
        for ((o, c), w) in out.iter_mut().zip(&corr).zip(&self.weights) {
            *o += c * *w;
        }
    }

    pub fn estimate(&self, y: &[Complex64]) -> EstimationResult {
        let mut h_hat = vec![Complex64::new(0.0, 0.0); self.mean_h.len()];
        self.estimate_into(y, &mut h_hat);
        EstimationResult {
            h_hat,
            eps: self.eps.clone(),
            nmse_analytic: self.nmse,
        }
    }
}

/// One-shot LMMSE estimate for `cfg` from pilots `y`.
pub fn lmmse_estimate(
    cfg: &ScenarioConfig,
    pattern: &TrainingPattern,
    y: &[Complex64],
) -> Result<EstimationResult> {
    let link = LinkBudget::from_config(cfg)?;
    let stats = channel_statistics(cfg)?;
    Ok(LmmseEstimator::new(&link, pattern.clone(), stats.mean_h)?.estimate(y))
}

/// Dense-matrix covariances `(C_hy, C_yy)` exactly as written, with no use of
/// pattern orthogonality.
pub fn dense_covariances(
    link: &LinkBudget,
    pattern: &TrainingPattern,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let (t_len, n) = (pattern.pilot_len, pattern.n_elements);
    let z = DMatrix::from_row_slice(t_len, n, &pattern.zbar);
    let zh = z.adjoint();
    let s = link.signal_gain;
    let c_hy = &zh * Complex64::new(s.sqrt() * link.eta * link.xi, 0.0);
    let mut c_yy = &z * &zh * Complex64::new(s * link.xi * link.xi * link.eta, 0.0);
    let floor = link.pilot_noise_floor();
    for i in 0..t_len {
        c_yy[(i, i)] += floor;
    }
    (c_hy, c_yy)
}

/// `diag(C_hy C_yy^-1 C_hy^H)` by Cholesky solve.
pub fn error_variances_dense(link: &LinkBudget, pattern: &TrainingPattern) -> Result<Vec<f64>> {
    let (c_hy, c_yy) = dense_covariances(link, pattern);
    let chol = Cholesky::new(c_yy).ok_or(Error::SingularCovariance)?;
    let x = chol.solve(&c_hy.adjoint());
    let prod = &c_hy * x;
    Ok((0..pattern.n_elements).map(|i| prod[(i, i)].re).collect())
}

/// Dense-route estimate, for cross-checking [`LmmseEstimator`].
pub fn estimate_dense(
    link: &LinkBudget,
    pattern: &TrainingPattern,
    mean_h: &[Complex64],
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    let (c_hy, c_yy) = dense_covariances(link, pattern);
    let chol = Cholesky::new(c_yy).ok_or(Error::SingularCovariance)?;
    let scaled: Vec<Complex64> = mean_h
        .iter()
        .map(|m| m * (link.signal_gain.sqrt() * link.xi))
        .collect();
    let ey = pattern.apply(&scaled);
    let innov = nalgebra::DVector::from_iterator(y.len(), y.iter().zip(&ey).map(|(a, b)| a - b));
    let gain = &c_hy * chol.solve(&innov);
    Ok(mean_h.iter().zip(gain.iter()).map(|(m, g)| m + g).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSampler;
    use crate::config::{default_scenario, PhaseNoiseModel};
    use crate::units::dbm_to_watts;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_link(n: usize, t: usize) -> LinkBudget {
        LinkBudget {
            signal_gain: 1.0,
            amp_noise: 0.0,
            rx_noise: 1.0,
            xi: 1.0,
            eta: 1.0,
            pilot_len: t,
            gains: vec![1.0; n],
        }
    }

    fn assert_gram(p: &TrainingPattern, gains: &[f64], tol: f64) {
        let g = p.gram();
        let n = gains.len();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    p.pilot_len as f64 * gains[i] * gains[i]
                } else {
                    0.0
                };
                assert!(
                    (g[i * n + j] - want).norm() <= tol,
                    "gram[{i},{j}] = {}",
                    g[i * n + j]
                );
            }
        }
    }

    #[test]
    fn hadamard_two() {
        let p = TrainingPattern::new(TrainingBasis::Hadamard, 2, &[1.0, 1.0]).unwrap();
        let re: Vec<f64> = p.zbar.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 1.0, 1.0, -1.0]);
        assert!(p.zbar.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn pattern_orthogonality() {
        let p = TrainingPattern::new(TrainingBasis::Dft, 4, &[1.0; 4]).unwrap();
        assert_gram(&p, &[1.0; 4], 1e-12);
        let p = TrainingPattern::new(TrainingBasis::Dft, 2, &[1.0, 2.0]).unwrap();
        assert_gram(&p, &[1.0, 2.0], 1e-12);
        // T > N keeps the leading columns orthogonal
        let gains = [0.5, 1.5, 3.0];
        let p = TrainingPattern::new(TrainingBasis::Dft, 7, &gains).unwrap();
        assert_gram(&p, &gains, 1e-12);
        let p = TrainingPattern::new(TrainingBasis::Hadamard, 8, &gains).unwrap();
        assert_gram(&p, &gains, 0.0);
        let p = TrainingPattern::new(TrainingBasis::Dft, 256, &[1.0; 256]).unwrap();
        assert_gram(&p, &[1.0; 256], 1e-10);
    }

    #[test]
    fn pattern_errors() {
        assert!(TrainingPattern::new(TrainingBasis::Dft, 3, &[1.0; 4]).is_err());
        assert!(TrainingPattern::new(TrainingBasis::Hadamard, 6, &[1.0; 4]).is_err());
    }

    #[test]
    fn closed_form_example() {
        let link = unit_link(4, 4);
        let eps = error_variances(&link).unwrap();
        assert!(eps.iter().all(|e| (e - 0.8).abs() < 1e-15));
    }

    #[test]
    fn closed_form_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &n in &[2usize, 4, 8, 16] {
            for model in [
                PhaseNoiseModel::Uniform { half_width: 0.5 },
                PhaseNoiseModel::VonMises { concentration: 4.0 },
            ] {
                let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
                let link = LinkBudget {
                    signal_gain: 0.7,
                    amp_noise: 0.05,
                    rx_noise: 0.3,
                    xi: crate::phase_noise::coherency_factor(&model),
                    eta: 0.75,
                    pilot_len: n,
                    gains: gains.clone(),
                };
                let p = TrainingPattern::new(TrainingBasis::Dft, n, &gains).unwrap();
                let a = error_variances(&link).unwrap();
                let b = error_variances_dense(&link, &p).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!(((x - y) / y).abs() < 1e-10, "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn default_scenario_routes_agree() {
        let mut cfg = default_scenario();
        cfg.transmit_power = dbm_to_watts(10.0);
        let link = LinkBudget::from_config(&cfg).unwrap();
        let p = make_training_pattern(&cfg, TrainingBasis::Dft).unwrap();
        let a = error_variances(&link).unwrap();
        let b = error_variances_dense(&link, &p).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(((x - y) / y).abs() < 1e-10);
        }
    }

    #[test]
    fn fast_estimate_matches_dense() {
        let cfg = default_scenario();
        let mut cfg = cfg;
        cfg.ris_rows = 4;
        cfg.ris_cols = 2;
        cfg.pilot_len = 8;
        cfg.transmit_power = dbm_to_watts(40.0);
        let link = LinkBudget::from_config(&cfg).unwrap();
        let est = LmmseEstimator::from_config(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = crate::channel::sample_channels(&cfg, &mut rng).unwrap();
        let y = synthesize_pilots(&cfg, est.pattern(), &ch, &mut rng).unwrap();
        let fast = est.estimate(&y).h_hat;
        let stats = channel_statistics(&cfg).unwrap();
        let dense = estimate_dense(&link, est.pattern(), &stats.mean_h, &y).unwrap();
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
        }
    }

    #[test]
    fn zero_innovation_returns_mean() {
        let cfg = default_scenario();
        let link = LinkBudget::from_config(&cfg).unwrap();
        let est = LmmseEstimator::from_config(&cfg).unwrap();
        let stats = channel_statistics(&cfg).unwrap();
        let scaled: Vec<_> = stats
            .mean_h
            .iter()
            .map(|m| m * (link.signal_gain.sqrt() * link.xi))
            .collect();
        let ey = est.pattern().apply(&scaled);
        let h = est.estimate(&ey).h_hat;
        for (a, b) in h.iter().zip(&stats.mean_h) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn noiseless_pilots() {
        let mut cfg = default_scenario();
        cfg.phase_noise = PhaseNoiseModel::None;
        cfg.amp_noise_var = 0.0;
        cfg.rx_noise_var = 0.0;
        let p = make_training_pattern(&cfg, TrainingBasis::Dft).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = crate::channel::sample_channels(&cfg, &mut rng).unwrap();
        let y = synthesize_pilots(&cfg, &p, &ch, &mut rng).unwrap();
        let s = (cfg.transmit_power * ch.rho_t * ch.rho_r).sqrt();
        let want = p.apply(&ch.h);
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b * s).norm() < 1e-12 * s);
        }
        // with zero noise and no phase noise the channel is recovered exactly
        let est = lmmse_estimate(&cfg, &p, &y).unwrap();
        assert!(est.squared_error(&ch.h) < 1e-20);
    }

    #[test]
    fn zero_power_pilots_are_noise() {
        let mut cfg = default_scenario();
        cfg.transmit_power = 0.0;
        let p = make_training_pattern(&cfg, TrainingBasis::Dft).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = crate::channel::sample_channels(&cfg, &mut rng).unwrap();
        let trials = 2000;
        let mut power = 0.0;
        for _ in 0..trials {
            let y = synthesize_pilots(&cfg, &p, &ch, &mut rng).unwrap();
            power += y.iter().map(|v| v.norm_sqr()).sum::<f64>() / y.len() as f64;
        }
        power /= trials as f64;
        let link = LinkBudget::from_config(&cfg).unwrap();
        let amp: f64 = ch.g_r.iter().map(|g| g.norm_sqr()).sum::<f64>() * link.amp_noise;
        let want = amp + link.rx_noise;
        assert!(((power - want) / want).abs() < 0.02);
        assert!(nmse_analytic(&cfg).unwrap() == link.eta);
    }

    #[test]
    fn singular_covariance() {
        let mut link = unit_link(4, 4);
        link.rx_noise = 0.0;
        link.signal_gain = 0.0;
        assert!(matches!(
            error_variances(&link),
            Err(Error::SingularCovariance)
        ));
        let mut link = unit_link(4, 8);
        link.rx_noise = 0.0;
        assert!(matches!(
            error_variances(&link),
            Err(Error::SingularCovariance)
        ));
    }

    #[test]
    fn floor_limits() {
        let mut link = unit_link(8, 8);
        link.eta = 0.75;
        assert_eq!(nmse_floor(&link), 0.0);
        link.xi = 0.9;
        link.signal_gain = 1e12;
        let eps = error_variances(&link).unwrap();
        let high = nmse_from_variances(link.eta, &eps);
        assert!(((high - nmse_floor(&link)) / nmse_floor(&link)).abs() < 1e-9);
    }

    #[test]
    fn pilot_variance_matches_covariance_diagonal() {
        // Var[y_t] over channel, phase-noise and thermal-noise draws equals
        // the diagonal of C_yy.
        let mut cfg = default_scenario();
        cfg.ris_rows = 4;
        cfg.ris_cols = 4;
        cfg.pilot_len = 16;
        cfg.transmit_power = dbm_to_watts(45.0);
        let link = LinkBudget::from_config(&cfg).unwrap();
        let p = make_training_pattern(&cfg, TrainingBasis::Dft).unwrap();
        let (_, c_yy) = dense_covariances(&link, &p);
        let sampler = ChannelSampler::new(&cfg).unwrap();
        let ps = PhaseNoiseSampler::new(&cfg.phase_noise);
        let stats = channel_statistics(&cfg).unwrap();
        let scaled: Vec<_> = stats
            .mean_h
            .iter()
            .map(|m| m * (link.signal_gain.sqrt() * link.xi))
            .collect();
        let ey = p.apply(&scaled);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let trials = 100_000;
        let mut var = [0.0; 16];
        let mut y = vec![Complex64::new(0.0, 0.0); 16];
        for _ in 0..trials {
            let ch = sampler.sample(&mut rng);
            synthesize_pilots_into(&link, &p, &ps, &ch, &mut rng, &mut y);
            for t in 0..16 {
                var[t] += (y[t] - ey[t]).norm_sqr();
            }
        }
        for t in 0..16 {
            let v = var[t] / trials as f64;
            let want = c_yy[(t, t)].re;
            assert!(((v - want) / want).abs() < 0.03, "t={t}: {v} vs {want}");
        }
    }
}
