//! Slow reference computations that share no algebra with the fast paths.
//!
//! Used by the unit tests, the acceptance suite and `activeris validate`.

use std::f64::consts::PI;

use crate::analysis::RicianMoments;
use crate::special_fn::{bessel_i0_scaled, laguerre_half_series, HalfDegree};

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `E|h|^k`, `k = 1..4`, by integrating the Rician density directly.
pub fn rician_moments_quadrature(kappa: f64, omega: f64) -> [f64; 4] {
    let sigma2 = omega / (2.0 * (kappa + 1.0));
    let sigma = sigma2.sqrt();
    let nu = (kappa * omega / (kappa + 1.0)).sqrt();
    let lo = (nu - 14.0 * sigma).max(0.0);
    let hi = nu + 14.0 * sigma;
    let pdf = |r: f64| {
        let z = r * nu / sigma2;
        // I0(z) = I0s(z) e^z folded into the exponent
        r / sigma2 * (-(r - nu).powi(2) / (2.0 * sigma2)).exp() * bessel_i0_scaled(z)
    };
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = simpson(|r| r.powi(k as i32 + 1) * pdf(r), lo, hi, 40_000);
    }
    out
}

/// SINR moments from the Laguerre-form expression, summing over distinct
/// index sets with explicit nested loops. Requires every `eps_n > 0`.
pub fn sinr_moments_printed_form(gamma0: f64, gains: &[f64], eta: f64, eps: &[f64]) -> (f64, f64) {
    let n = gains.len();
    let kappa: Vec<f64> = eps.iter().map(|e| (1.0 - eta) / e).collect();
    let omega: Vec<f64> = eps.iter().map(|e| 1.0 - eta + e).collect();
    let l1 = |i: usize| laguerre_half_series(HalfDegree::OneHalf, -kappa[i]).unwrap();
    let l3 = |i: usize| laguerre_half_series(HalfDegree::ThreeHalves, -kappa[i]).unwrap();
    let q: Vec<f64> = (0..n).map(|i| gains[i] * eps[i].sqrt() * l1(i)).collect();
    let r: Vec<f64> = (0..n)
        .map(|i| gains[i].powi(3) * eps[i].powf(1.5) * l3(i))
        .collect();
    let w: Vec<f64> = (0..n).map(|i| gains[i] * gains[i] * omega[i]).collect();

    let mut first = 0.0;
    for i in 0..n {
        first += w[i];
        for j in 0..n {
            if i != j {
                first += PI / 4.0 * q[i] * q[j];
            }
        }
    }

    let mut fourth = 0.0;
    for i in 0..n {
        let e = eps[i];
        fourth += gains[i].powi(4) * (2.0 * e * e + 4.0 * e * (1.0 - eta) + (1.0 - eta).powi(2));
        for j in 0..n {
            if j == i {
                continue;
            }
            fourth += 1.5 * PI * r[i] * q[j];
            if j > i {
                fourth += 6.0 * w[i] * w[j];
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                if j != i && k != i {
                    fourth += 3.0 * PI * w[i] * q[j] * q[k];
                }
            }
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    fourth += 1.5 * PI * PI * q[a] * q[b] * q[c] * q[d];
                }
            }
        }
    }
    (gamma0 * first, gamma0 * gamma0 * fourth)
}

/// SINR moments by convolving raw moments of independent summands one
/// element at a time: `E[(S + X)^j] = sum_i C(j, i) E[S^i] E[X^(j-i)]`.
pub fn sinr_moments_convolution(
    gamma0: f64,
    gains: &[f64],
    moments: &[RicianMoments],
) -> (f64, f64) {
    const BINOM: [[f64; 5]; 5] = [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0],
        [1.0, 3.0, 3.0, 1.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0],
    ];
    let mut sum = [1.0, 0.0, 0.0, 0.0, 0.0];
    for (beta, m) in gains.iter().zip(moments) {
        let x = [
            1.0,
            beta * m.mu[0],
            beta.powi(2) * m.mu[1],
            beta.powi(3) * m.mu[2],
            beta.powi(4) * m.mu[3],
        ];
        let mut next = [0.0; 5];
        for j in 0..5 {
            for i in 0..=j {
                next[j] += BINOM[j][i] * sum[i] * x[j - i];
            }
        }
        sum = next;
    }
    (gamma0 * sum[2], gamma0 * gamma0 * sum[4])
}

/// Regularized lower incomplete gamma `P(s, x)` by quadrature of
/// `t^(s-1) e^-t`, using the substitution `t = u^2` when `s < 1`.
pub fn reg_lower_gamma_quadrature(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let norm = crate::special_fn::ln_gamma(s);
    let part = if s < 1.0 {
        // t = u^(1/s): dt = (1/s) u^(1/s - 1) du, t^(s-1) dt = (1/s) du
        let ub = x.powf(s);
        simpson(|u| (-(u.powf(1.0 / s))).exp() / s, 0.0, ub, 200_000)
    } else {
        simpson(
            |t| {
                if t == 0.0 {
                    if s == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    ((s - 1.0) * t.ln() - t).exp()
                }
            },
            0.0,
            x,
            200_000,
        )
    };
    (part.ln() - norm).exp()
}

/// Largest gap between an empirical CDF and a reference CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::reg_lower_gamma;

    #[test]
    fn simpson_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 2);
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn incomplete_gamma_grid() {
        for &s in &[0.5, 1.0, 2.0, 5.0, 20.0] {
            for i in 1..=25 {
                let x = 2.0 * i as f64;
                let fast = reg_lower_gamma(s, x).unwrap();
                let slow = reg_lower_gamma_quadrature(s, x);
                assert!((fast - slow).abs() < 1e-9, "P({s},{x}): {fast} vs {slow}");
            }
            for &x in &[0.01, 0.3, 0.9] {
                let fast = reg_lower_gamma(s, x).unwrap();
                let slow = reg_lower_gamma_quadrature(s, x);
                assert!((fast - slow).abs() < 1e-9, "P({s},{x}): {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_distance(&mut xs, |x| x.clamp(0.0, 1.0)) <= 0.0005 + 1e-12);
    }
}
