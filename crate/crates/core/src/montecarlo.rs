//! End-to-end link simulation: channel draw, pilot training, LMMSE
//! estimation, co-phasing under fresh phase noise, and SINR evaluation.
//!
//! Every trial owns an independent ChaCha stream keyed by the master seed,
//! the sweep point and the trial index, and trial results are reduced in
//! index order. A sweep is therefore bit-identical for any thread count.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{asymptotic_capacity, gamma0, SinrStatistics};
use crate::channel::{channel_statistics, ChannelSampler};
use crate::config::{AmpGains, PhaseNoiseModel, ScenarioConfig};
use crate::error::{Error, Result};
use crate::estimator::{make_training_pattern, nmse_floor, synthesize_pilots_into, LmmseEstimator};
use crate::link::LinkBudget;
use crate::phase_noise::PhaseNoiseSampler;
use crate::units::dbm_to_watts;

/// How the per-trial SINR denominator is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// Realized desired power over the statistical equivalent-noise power.
    #[default]
    Expected,
    /// Realized desired power over the realized interference of this trial.
    Realized,
}

/// Per-trial powers of the terms in the received data symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentPowers {
    pub signal: f64,
    pub phase: f64,
    pub estimation: f64,
    pub amplifier: f64,
    pub receiver: f64,
}

impl ComponentPowers {
    pub fn interference(&self) -> f64 {
        self.phase + self.estimation + self.amplifier + self.receiver
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Seed of the stream family this trial drew from.
    pub stream_seed: u64,
    pub trial: u64,
    /// `(1/N) sum |h_hat_n - h_n|^2`.
    pub squared_error: f64,
    pub gamma: f64,
    pub powers: ComponentPowers,
}

/// Everything that stays fixed across trials of one operating point.
pub struct LinkSimulator {
    link: LinkBudget,
    sampler: ChannelSampler,
    estimator: LmmseEstimator,
    phase: PhaseNoiseSampler,
    gamma0: f64,
    mode: GammaMode,
}

impl LinkSimulator {
    pub fn new(cfg: &ScenarioConfig, mode: GammaMode) -> Result<Self> {
        let link = LinkBudget::from_config(cfg)?;
        let pattern = make_training_pattern(cfg, cfg.training_basis)?;
        let stats = channel_statistics(cfg)?;
        let estimator = LmmseEstimator::new(&link, pattern, stats.mean_h)?;
        let g0 = gamma0(&link, estimator.eps())?;
        Ok(LinkSimulator {
            sampler: ChannelSampler::new(cfg)?,
            phase: PhaseNoiseSampler::new(&cfg.phase_noise),
            link,
            estimator,
            gamma0: g0,
            mode,
        })
    }

    pub fn link(&self) -> &LinkBudget {
        &self.link
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn run_trial<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> TrialRecord {
        let n = self.link.n_elements();
        let channel = self.sampler.sample(rng);
        let mut y = vec![Complex64::new(0.0, 0.0); self.link.pilot_len];
        synthesize_pilots_into(
            &self.link,
            self.estimator.pattern(),
            &self.phase,
            &channel,
            rng,
            &mut y,
        );
        let mut h_hat = vec![Complex64::new(0.0, 0.0); n];
        self.estimator.estimate_into(&y, &mut h_hat);

        let s = self.link.signal_gain;
        let xi = self.link.xi;
        let mut sq_err = 0.0;
        let mut amp_sum = 0.0;
        let mut phase_acc = Complex64::new(0.0, 0.0);
        let mut err_acc = Complex64::new(0.0, 0.0);
        let mut amp_energy = 0.0;
        for i in 0..n {
            let beta = self.link.gains[i];
            let est = h_hat[i];
            let err = channel.h[i] - est;
            sq_err += err.norm_sqr();
            amp_sum += beta * est.norm();
            // intended phasor co-phases the estimate; the applied one adds fresh noise
            let intended = if est.norm() > 0.0 {
                est.conj() / est.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let applied = intended * self.phase.sample_phasor(rng);
            phase_acc += beta * (applied - xi * intended) * est;
            err_acc += beta * applied * err;
            amp_energy += beta * beta * channel.g_r[i].norm_sqr();
        }
        let powers = ComponentPowers {
            signal: s * xi * xi * amp_sum * amp_sum,
            phase: s * phase_acc.norm_sqr(),
            estimation: s * err_acc.norm_sqr(),
            amplifier: self.link.amp_noise * amp_energy,
            receiver: self.link.rx_noise,
        };
        let gamma = match self.mode {
            GammaMode::Expected => self.gamma0 * amp_sum * amp_sum,
            GammaMode::Realized => {
                let den = powers.interference();
                if den > 0.0 {
                    powers.signal / den
                } else {
                    f64::INFINITY
                }
            }
        };
        TrialRecord {
            stream_seed: 0,
            trial: 0,
            squared_error: sq_err / n as f64,
            gamma,
            powers,
        }
    }
}

/// One full trial on a caller-supplied generator.
pub fn run_link_trial<R: rand::Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<TrialRecord> {
    Ok(LinkSimulator::new(cfg, GammaMode::Expected)?.run_trial(rng))
}

/// SplitMix64 finalizer, used to spread (seed, point) pairs over seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream family for sweep point `point`.
pub fn point_seed(master_seed: u64, point: u64) -> u64 {
    mix(mix(master_seed) ^ point.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn trial_rng(stream_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub mode: GammaMode,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            trials: 10_000,
            seed: 1,
            threads: None,
            mode: GammaMode::Expected,
        }
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `opts.trials` trials for one operating point, in trial order.
pub fn run_trials(cfg: &ScenarioConfig, opts: &SimOptions, point: u64) -> Result<Vec<TrialRecord>> {
    let sim = LinkSimulator::new(cfg, opts.mode)?;
    let seed = point_seed(opts.seed, point);
    with_pool(opts.threads, || {
        (0..opts.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                let mut rec = sim.run_trial(&mut rng);
                rec.stream_seed = seed;
                rec.trial = t;
                rec
            })
            .collect()
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: impl Iterator<Item = f64>) -> Self {
        // Welford, in the given order
        let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
        for x in xs {
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        let stderr = if n > 1.0 {
            (m2 / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        Estimate {
            mean: if n > 0.0 { mean } else { f64::NAN },
            stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMetrics {
    pub trials: u64,
    pub nmse: Estimate,
    pub mean_gamma: Estimate,
    pub second_moment: Estimate,
    pub outage: Estimate,
    pub capacity: Estimate,
    pub mean_powers: ComponentPowers,
}

impl EmpiricalMetrics {
    pub fn from_records(records: &[TrialRecord], threshold: f64) -> Self {
        let n = records.len().max(1) as f64;
        let mut powers = ComponentPowers::default();
        for r in records {
            powers.signal += r.powers.signal / n;
            powers.phase += r.powers.phase / n;
            powers.estimation += r.powers.estimation / n;
            powers.amplifier += r.powers.amplifier / n;
            powers.receiver += r.powers.receiver / n;
        }
        EmpiricalMetrics {
            trials: records.len() as u64,
            nmse: Estimate::from_samples(records.iter().map(|r| r.squared_error)),
            mean_gamma: Estimate::from_samples(records.iter().map(|r| r.gamma)),
            second_moment: Estimate::from_samples(records.iter().map(|r| r.gamma * r.gamma)),
            outage: Estimate::from_samples(
                records
                    .iter()
                    .map(|r| f64::from(u8::from(r.gamma < threshold))),
            ),
            capacity: Estimate::from_samples(
                records
                    .iter()
                    .map(|r| r.gamma.ln_1p() / std::f64::consts::LN_2),
            ),
            mean_powers: powers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMetrics {
    pub nmse: f64,
    pub nmse_floor: f64,
    pub mean_gamma: f64,
    pub var_gamma: f64,
    pub outage: f64,
    pub capacity: f64,
    /// Large-array limit, present only for equal gains.
    pub capacity_asymptote: Option<f64>,
}

impl AnalyticMetrics {
    pub fn evaluate(cfg: &ScenarioConfig) -> Result<Self> {
        let link = LinkBudget::from_config(cfg)?;
        let eps = crate::estimator::error_variances(&link)?;
        let stats = SinrStatistics::from_link(&link, &eps, cfg.sinr_threshold)?;
        Ok(AnalyticMetrics {
            nmse: crate::estimator::nmse_from_variances(link.eta, &eps),
            nmse_floor: nmse_floor(&link),
            mean_gamma: stats.mean_gamma,
            var_gamma: stats.var_gamma,
            outage: stats.outage_prob,
            capacity: stats.capacity,
            capacity_asymptote: asymptotic_capacity(cfg).ok(),
        })
    }
}

/// Scenario parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Grid values in dBm.
    TransmitPower,
    /// Grid values are element counts.
    RisSize,
    /// Common amplitude gain, linear.
    Gain,
    /// Phase-noise power, keeping the configured model family.
    PhaseNoisePower,
    PilotLen,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TransmitPower => "transmit_power",
            SweepAxis::RisSize => "ris_size",
            SweepAxis::Gain => "gain",
            SweepAxis::PhaseNoisePower => "phase_noise_power",
            SweepAxis::PilotLen => "pilot_len",
        }
    }

    /// A copy of `cfg` with this axis set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut out = cfg.clone();
        match self {
            SweepAxis::TransmitPower => out.transmit_power = dbm_to_watts(value),
            SweepAxis::RisSize => {
                let n = as_count(value, "RIS size")?;
                let (rows, cols) = near_square_factors(n);
                out.resize_ris(rows, cols)?;
            }
            SweepAxis::Gain => out.amp_gains = AmpGains::Uniform(value),
            SweepAxis::PhaseNoisePower => {
                out.phase_noise = PhaseNoiseModel::from_power(cfg.phase_noise.kind(), value)?;
            }
            SweepAxis::PilotLen => out.pilot_len = as_count(value, "pilot length")?,
        }
        out.validate()?;
        Ok(out)
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "transmit_power" | "rho" | "rho_dbm" => SweepAxis::TransmitPower,
            "ris_size" | "n" => SweepAxis::RisSize,
            "gain" | "beta" => SweepAxis::Gain,
            "phase_noise_power" | "sigma_p2" => SweepAxis::PhaseNoisePower,
            "pilot_len" | "t" => SweepAxis::PilotLen,
            _ => return Err(Error::UnknownAxis(s.to_string())),
        })
    }
}

fn as_count(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value < 1e9 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidConfig(format!(
            "{what} must be a positive integer, got {value}"
        )))
    }
}

/// `rows x cols = n` with `rows` the largest divisor not above `sqrt(n)`.
pub fn near_square_factors(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && n % rows != 0 {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub analytic: AnalyticMetrics,
    /// Absent when the sweep ran with zero trials.
    pub empirical: Option<EmpiricalMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Analytic and (when `opts.trials > 0`) simulated metrics along one axis.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: SweepAxis,
    grid: &[f64],
    opts: &SimOptions,
) -> Result<SweepResult> {
    let mut points = Vec::with_capacity(grid.len());
    for (i, &value) in grid.iter().enumerate() {
        let point_cfg = axis.apply(cfg, value)?;
        points.push(evaluate_point(&point_cfg, value, opts, i as u64)?);
    }
    Ok(SweepResult {
        axis,
        trials: opts.trials,
        seed: opts.seed,
        points,
    })
}

/// One sweep point; `point` selects the RNG stream family.
pub fn evaluate_point(
    cfg: &ScenarioConfig,
    value: f64,
    opts: &SimOptions,
    point: u64,
) -> Result<SweepPoint> {
    let analytic = AnalyticMetrics::evaluate(cfg)?;
    let empirical = if opts.trials > 0 {
        let records = run_trials(cfg, opts, point)?;
        Some(EmpiricalMetrics::from_records(&records, cfg.sinr_threshold))
    } else {
        None
    };
    Ok(SweepPoint {
        value,
        analytic,
        empirical,
    })
}
