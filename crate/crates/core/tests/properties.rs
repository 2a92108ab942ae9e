//! Randomized invariants across the estimation and analysis pipeline.

use activeris_core::analysis::{ergodic_capacity, sinr_statistics};
use activeris_core::config::{default_scenario, AmpGains, PhaseNoiseKind, PhaseNoiseModel};
use activeris_core::estimator::{error_variances, nmse_floor, nmse_from_variances};
use activeris_core::link::LinkBudget;
use activeris_core::units::dbm_to_watts;
use proptest::prelude::*;

fn model() -> impl Strategy<Value = PhaseNoiseKind> {
    prop_oneof![
        Just(PhaseNoiseKind::Uniform),
        Just(PhaseNoiseKind::VonMises)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimate_variances_are_bounded(
        dbm in -20.0f64..70.0,
        beta in 0.5f64..4.0,
        sigma in 0.0f64..0.5,
        kind in model(),
        k in 0.0f64..10.0,
    ) {
        let mut cfg = default_scenario();
        cfg.transmit_power = dbm_to_watts(dbm);
        cfg.amp_gains = AmpGains::Uniform(beta);
        cfg.phase_noise = PhaseNoiseModel::from_power(kind, sigma).unwrap();
        cfg.rician_k_t = k;
        let link = LinkBudget::from_config(&cfg).unwrap();
        let eps = error_variances(&link).unwrap();
        for e in &eps {
            prop_assert!(*e >= 0.0 && *e <= link.eta * (1.0 + 1e-12));
        }
        let nmse = nmse_from_variances(link.eta, &eps);
        prop_assert!(nmse >= nmse_floor(&link) * (1.0 - 1e-9));
        prop_assert!(nmse <= link.eta);
    }

    #[test]
    fn more_power_never_hurts(
        dbm in -10.0f64..55.0,
        step in 1.0f64..10.0,
        beta in 0.5f64..4.0,
        kind in model(),
    ) {
        let mut cfg = default_scenario();
        cfg.amp_gains = AmpGains::Uniform(beta);
        cfg.phase_noise = PhaseNoiseModel::from_power(kind, 0.05).unwrap();
        cfg.transmit_power = dbm_to_watts(dbm);
        let lo = sinr_statistics(&cfg).unwrap();
        cfg.transmit_power = dbm_to_watts(dbm + step);
        let hi = sinr_statistics(&cfg).unwrap();
        prop_assert!(hi.mean_gamma >= lo.mean_gamma);
        prop_assert!(hi.outage_prob <= lo.outage_prob + 1e-12);
        prop_assert!(hi.capacity >= lo.capacity - 1e-9);
    }

    #[test]
    fn statistics_invariants(dbm in -10.0f64..60.0, beta in 0.5f64..4.0) {
        let mut cfg = default_scenario();
        cfg.transmit_power = dbm_to_watts(dbm);
        cfg.amp_gains = AmpGains::Uniform(beta);
        let s = sinr_statistics(&cfg).unwrap();
        prop_assert!(s.second_moment >= s.mean_gamma * s.mean_gamma);
        prop_assert!(((s.fit.shape * s.fit.scale) / s.mean_gamma - 1.0).abs() < 1e-9);
        prop_assert!(((s.fit.shape * s.fit.scale * s.fit.scale) / s.var_gamma - 1.0).abs() < 1e-9);
        prop_assert!(((s.fit.shape_prime * s.fit.scale_prime) / (s.mean_gamma + 1.0) - 1.0).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&s.outage_prob));
        // Jensen: E[log2(1 + gamma)] <= log2(1 + E[gamma]), up to the Gamma fit
        prop_assert!(s.capacity <= (1.0 + s.mean_gamma).log2() + 1e-9);
    }

    #[test]
    fn capacity_is_monotone_in_mean(mean in 0.01f64..1e3, cv in 0.01f64..2.0) {
        let var = (cv * mean).powi(2);
        let a = ergodic_capacity(mean, var).unwrap();
        let b = ergodic_capacity(mean * 1.1, var).unwrap();
        prop_assert!(b > a);
    }
}
