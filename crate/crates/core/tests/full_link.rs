//! End-to-end checks of the closed forms against the link simulator.

use activeris_core::analysis::{gamma_match, outage_probability, sinr_statistics};
use activeris_core::config::{default_scenario, AmpGains, ScenarioConfig};
use activeris_core::montecarlo::{
    evaluate_point, run_link_trial, run_trials, sweep, trial_rng, EmpiricalMetrics, SimOptions,
    SweepAxis,
};
use activeris_core::oracle::ks_distance;
use activeris_core::special_fn::reg_lower_gamma;
use activeris_core::units::dbm_to_watts;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

fn opts(trials: u64, seed: u64) -> SimOptions {
    SimOptions {
        trials,
        seed,
        ..SimOptions::default()
    }
}

fn at(dbm: f64, beta: f64) -> ScenarioConfig {
    let mut cfg = default_scenario();
    cfg.transmit_power = dbm_to_watts(dbm);
    cfg.amp_gains = AmpGains::Uniform(beta);
    cfg
}

#[test]
fn matched_gamma_cdf_is_close_to_simulated_sinr() {
    let cfg = default_scenario();
    let s = sinr_statistics(&cfg).unwrap();
    let records = run_trials(&cfg, &opts(20_000, 3), 0).unwrap();
    let mut gamma: Vec<f64> = records.iter().map(|r| r.gamma).collect();
    let d = ks_distance(&mut gamma, |x| {
        reg_lower_gamma(s.fit.shape, x / s.fit.scale).unwrap()
    });
    assert!(d <= 0.03, "KS distance {d}");
}

#[test]
fn simulated_mean_sinr_tracks_the_closed_form() {
    // The closed form models the estimate as complex normal; the product of
    // two Rician hops is not, which shows up as a bias of a few tenths of a
    // percent at the reference operating point.
    let cfg = default_scenario();
    let p = evaluate_point(&cfg, 20.0, &opts(10_000, 4), 0).unwrap();
    let e = p.empirical.unwrap();
    let rel = (e.mean_gamma.mean - p.analytic.mean_gamma).abs() / p.analytic.mean_gamma;
    assert!(rel < 0.01, "relative gap {rel}");
}

#[test]
fn doubled_gain_capacity_and_outage_examples() {
    let p = evaluate_point(&at(20.0, 2.0), 20.0, &opts(20_000, 5), 0).unwrap();
    let e = p.empirical.unwrap();
    assert!((e.capacity.mean - p.analytic.capacity).abs() <= 0.15);

    let p = evaluate_point(&at(0.0, 2.0), 0.0, &opts(20_000, 6), 0).unwrap();
    assert!((p.empirical.unwrap().outage.mean - p.analytic.outage).abs() <= 0.02);
}

#[test]
fn sweeps_are_reproducible() {
    let mut cfg = default_scenario();
    cfg.resize_ris(4, 4).unwrap();
    let grid = [0.0, 20.0];
    let mut o = opts(300, 77);
    o.threads = Some(1);
    let a = sweep(&cfg, SweepAxis::TransmitPower, &grid, &o).unwrap();
    o.threads = Some(4);
    let b = sweep(&cfg, SweepAxis::TransmitPower, &grid, &o).unwrap();
    assert_eq!(a, b);
    let single = sweep(&cfg, SweepAxis::TransmitPower, &grid[..1], &o).unwrap();
    assert_eq!(single.points[0], a.points[0]);

    let r1 = run_link_trial(&cfg, &mut trial_rng(1, 2)).unwrap();
    let r2 = run_link_trial(&cfg, &mut trial_rng(1, 2)).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn other_sweep_axes() {
    let cfg = default_scenario();
    let none = opts(0, 1);
    let by_gain = sweep(&cfg, SweepAxis::Gain, &[1.0, 2.0, 4.0], &none).unwrap();
    let nmse: Vec<f64> = by_gain.points.iter().map(|p| p.analytic.nmse).collect();
    assert!(nmse[0] > nmse[1] && nmse[1] > nmse[2]);

    let by_noise = sweep(&cfg, SweepAxis::PhaseNoisePower, &[0.01, 0.1], &none).unwrap();
    assert!(by_noise.points[0].analytic.nmse_floor < by_noise.points[1].analytic.nmse_floor);

    let by_pilots = sweep(&cfg, SweepAxis::PilotLen, &[64.0, 128.0, 256.0], &none).unwrap();
    let nmse: Vec<f64> = by_pilots.points.iter().map(|p| p.analytic.nmse).collect();
    assert!(nmse[0] > nmse[1] && nmse[1] > nmse[2]);

    let by_size = sweep(&cfg, SweepAxis::RisSize, &[16.0, 64.0], &opts(50, 2)).unwrap();
    assert!(by_size.points[0].analytic.capacity < by_size.points[1].analytic.capacity);
    assert_eq!(by_size.points[1].empirical.as_ref().unwrap().trials, 50);
}

#[test]
fn outage_is_monotone_in_power_and_threshold() {
    let cfg = default_scenario();
    let grid: Vec<f64> = (-10..=50).step_by(5).map(f64::from).collect();
    let r = sweep(&cfg, SweepAxis::TransmitPower, &grid, &opts(0, 1)).unwrap();
    for w in r.points.windows(2) {
        assert!(w[1].analytic.outage <= w[0].analytic.outage);
    }
    let s = sinr_statistics(&at(21.0, 1.0)).unwrap();
    let mut prev = 0.0;
    for i in 1..=40 {
        let p = outage_probability(s.fit.shape, s.fit.scale, f64::from(i) * 0.5).unwrap();
        assert!(p >= prev);
        prev = p;
    }
}

#[test]
fn gamma_match_recovers_sampled_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dist = Gamma::new(3.0, 1.5).unwrap();
    let n = 400_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x: f64 = dist.sample(&mut rng);
        s1 += x;
        s2 += x * x;
    }
    let fit = gamma_match(s1 / n as f64, s2 / n as f64).unwrap();
    assert!((fit.shape - 3.0).abs() < 0.05, "{}", fit.shape);
    assert!((fit.scale - 1.5).abs() < 0.03, "{}", fit.scale);
}

#[test]
fn empirical_metrics_use_the_threshold() {
    let cfg = default_scenario();
    let records = run_trials(&cfg, &opts(500, 9), 0).unwrap();
    let low = EmpiricalMetrics::from_records(&records, 0.0);
    let high = EmpiricalMetrics::from_records(&records, f64::INFINITY);
    assert_eq!(low.outage.mean, 0.0);
    assert_eq!(high.outage.mean, 1.0);
}
