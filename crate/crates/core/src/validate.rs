//! A self-check of the closed forms against the independent reference
//! routes in [`crate::oracle`] and against a short full-link simulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{sinr_moments, RicianMoments};
use crate::config::{default_scenario, AmpGains, PhaseNoiseKind, PhaseNoiseModel};
use crate::estimator::{error_variances, error_variances_dense, TrainingPattern};
use crate::link::LinkBudget;
use crate::montecarlo::{evaluate_point, SimOptions};
use crate::oracle;
use crate::phase_noise::{coherency_factor, PhaseNoiseSampler};
use crate::special_fn::{
    bessel_i0, digamma, laguerre_1_2, laguerre_3_2, laguerre_half, laguerre_half_series,
    reg_lower_gamma, HalfDegree,
};
use crate::units::dbm_to_watts;

/// Deliberate defects for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    #[default]
    None,
    /// Evaluate the Laguerre functions at `+kappa` instead of `-kappa`.
    LaguerreSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Full-link trials per operating point; zero skips the simulation check.
    pub trials: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub fault: Fault,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            trials: 2_000,
            seed: 1,
            threads: None,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn moments_for(fault: Fault, eta: f64, eps: f64) -> RicianMoments {
    let result = match fault {
        Fault::None => RicianMoments::with_laguerre(eta, eps, laguerre_1_2, laguerre_3_2),
        Fault::LaguerreSign => {
            RicianMoments::with_laguerre(eta, eps, |x| laguerre_1_2(-x), |x| laguerre_3_2(-x))
        }
    };
    result.expect("validation inputs are in range")
}

fn check(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn run_validation(opts: &ValidationOptions) -> ValidationReport {
    let mut checks = vec![
        special_functions(),
        laguerre_identity(),
        rician_moments_quadrature(opts.fault),
        moment_expansion(opts.fault),
        lmmse_closed_form(),
        coherency(opts.seed),
    ];
    if opts.trials > 0 {
        checks.push(full_link(opts));
    }
    ValidationReport { checks }
}

fn special_functions() -> CheckOutcome {
    let i0 = bessel_i0(1.0);
    let psi = digamma(1.0).unwrap_or(f64::NAN);
    let p = reg_lower_gamma(1.0, 1.0).unwrap_or(f64::NAN);
    let ok = (i0 - 1.266_065_878).abs() <= 1e-9
        && (psi + 0.577_215_664_9).abs() <= 1e-10
        && (p - (1.0 - (-1.0f64).exp())).abs() <= 1e-10;
    check(
        "special function values",
        ok,
        format!("I0(1) = {i0:.12}, psi(1) = {psi:.12}, P(1,1) = {p:.12}"),
    )
}

fn laguerre_identity() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let x = -20.0 * i as f64 / 400.0;
        for deg in [HalfDegree::OneHalf, HalfDegree::ThreeHalves] {
            let a = laguerre_half(deg, x).unwrap_or(f64::NAN);
            let b = laguerre_half_series(deg, x).unwrap_or(f64::NAN);
            worst = worst.max(rel(a, b));
        }
    }
    check(
        "Laguerre closed form vs series on [-20, 0]",
        worst <= 1e-10,
        format!("max rel err {worst:.2e}"),
    )
}

fn rician_moments_quadrature(fault: Fault) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for &(eta, eps) in &[(0.75, 0.5), (0.75, 0.05), (0.3, 0.2)] {
        let m = moments_for(fault, eta, eps);
        let q = oracle::rician_moments_quadrature(m.kappa, m.omega);
        for k in 0..4 {
            worst = worst.max(rel(m.mu[k], q[k]));
        }
    }
    check(
        "Rician amplitude moments vs density quadrature",
        worst <= 1e-8,
        format!("max rel err {worst:.2e}"),
    )
}

fn moment_expansion(fault: Fault) -> CheckOutcome {
    let eta = 0.75;
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let gains: Vec<f64> = (0..n).map(|i| 0.6 + 0.45 * i as f64).collect();
        let eps: Vec<f64> = (0..n).map(|i| 0.08 + 0.1 * i as f64).collect();
        let moments: Vec<_> = eps.iter().map(|&e| moments_for(fault, eta, e)).collect();
        let (e1, e2) = sinr_moments(1.3, &gains, &moments);
        let (b1, b2) = oracle::sinr_moments_printed_form(1.3, &gains, eta, &eps);
        worst = worst.max(rel(e1, b1)).max(rel(e2, b2));
    }
    check(
        "SINR moments: power sums vs nested loops, N <= 6",
        worst <= 1e-12,
        format!("max rel err {worst:.2e}"),
    )
}

fn lmmse_closed_form() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = default_scenario();
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for kind in [PhaseNoiseKind::VonMises, PhaseNoiseKind::Uniform] {
        for n in [2usize, 4, 8, 16] {
            let mut cfg = base.clone();
            cfg.ris_rows = 1;
            cfg.ris_cols = n;
            cfg.pilot_len = n;
            cfg.transmit_power = dbm_to_watts(30.0);
            cfg.phase_noise = PhaseNoiseModel::from_power(kind, 0.1).expect("valid power");
            cfg.amp_gains =
                AmpGains::PerElement((0..n).map(|_| rng.random_range(0.5..4.0)).collect());
            let outcome = LinkBudget::from_config(&cfg).and_then(|link| {
                let pattern = TrainingPattern::new(cfg.training_basis, n, &link.gains)?;
                Ok((
                    error_variances(&link)?,
                    error_variances_dense(&link, &pattern)?,
                ))
            });
            match outcome {
                Ok((fast, dense)) => {
                    for (a, b) in fast.iter().zip(&dense) {
                        worst = worst.max(rel(*a, *b));
                    }
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    let detail = match &failure {
        Some(e) => format!("error: {e}"),
        None => format!("max rel err {worst:.2e}"),
    };
    check(
        "LMMSE closed-form variances vs dense covariance",
        failure.is_none() && worst <= 1e-10,
        detail,
    )
}

fn coherency(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = 200_000;
    let mut worst: f64 = 0.0;
    let models = [
        PhaseNoiseModel::VonMises { concentration: 2.0 },
        PhaseNoiseModel::Uniform { half_width: 0.5 },
    ];
    for model in models {
        let sampler = PhaseNoiseSampler::new(&model);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let c = sampler.sample(&mut rng).cos();
            s += c;
            s2 += c * c;
        }
        let mean = s / draws as f64;
        let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        worst = worst.max((mean - coherency_factor(&model)).abs() / se);
    }
    check(
        "phase-noise coherency factor vs sampling",
        worst <= 4.0,
        format!("max deviation {worst:.2} standard errors"),
    )
}

fn full_link(opts: &ValidationOptions) -> CheckOutcome {
    let cfg = default_scenario();
    let sim = SimOptions {
        trials: opts.trials,
        seed: opts.seed,
        threads: opts.threads,
        ..SimOptions::default()
    };
    let mut worst: f64 = 0.0;
    for (i, dbm) in [0.0, 20.0, 40.0].into_iter().enumerate() {
        let mut c = cfg.clone();
        c.transmit_power = dbm_to_watts(dbm);
        match evaluate_point(&c, dbm, &sim, i as u64) {
            Ok(p) => {
                let e = p.empirical.expect("trials > 0");
                worst = worst.max(rel(e.nmse.mean, p.analytic.nmse));
            }
            Err(e) => return check("full-link N-MSE", false, format!("error: {e}")),
        }
    }
    // the per-trial relative spread is about 0.2, so short runs get a wider band
    let tol = 0.03_f64.max(0.6 / (opts.trials as f64).sqrt());
    check(
        "full-link N-MSE vs analytic at 0, 20, 40 dBm",
        worst <= tol,
        format!("max rel err {worst:.4} (tol {tol:.4})"),
    )
}
