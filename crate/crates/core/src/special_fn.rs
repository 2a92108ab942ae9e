//! Special functions over real scalars.
//!
//! Modified Bessel functions of order 0 and 1, the Gamma function, the
//! regularized lower incomplete Gamma function, the digamma function and the
//! Laguerre "polynomials" of degree 1/2 and 3/2 that appear in Rician moments.
//! Everything here is pure and allocation free.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-17;

// Above this argument the Bessel power series is replaced by the
// Hankel asymptotic expansion.
const BESSEL_SERIES_LIMIT: f64 = 50.0;

/// Half-integer degree of a Laguerre function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfDegree {
    /// Degree 1/2.
    OneHalf,
    /// Degree 3/2.
    ThreeHalves,
}

impl HalfDegree {
    pub fn value(self) -> f64 {
        match self {
            HalfDegree::OneHalf => 0.5,
            HalfDegree::ThreeHalves => 1.5,
        }
    }
}

fn finite(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("non-finite argument {x}")))
    }
}

/// Modified Bessel function of the first kind, `I_order(x)`, for order 0 or 1.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    finite("bessel_i", x)?;
    match order {
        0 => Ok(bessel_i0(x)),
        1 => Ok(bessel_i1(x)),
        _ => Err(Error::domain(
            "bessel_i",
            format!("order {order} unsupported (only 0 and 1)"),
        )),
    }
}

/// `I_0(x)`. Overflows to infinity for |x| beyond roughly 713.
pub fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SERIES_LIMIT {
        i0_series(ax)
    } else {
        bessel_i0_scaled(ax) * ax.exp()
    }
}

/// `I_1(x)`, odd in `x`.
pub fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_LIMIT {
        i1_series(ax)
    } else {
        bessel_i1_scaled(ax) * ax.exp()
    };
    v.copysign(x)
}

/// Exponentially scaled `e^{-|x|} I_0(x)`, finite for every finite `x`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SERIES_LIMIT {
        i0_series(ax) * (-ax).exp()
    } else {
        hankel_scaled(0.0, ax)
    }
}

/// Exponentially scaled `e^{-|x|} I_1(x)`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_LIMIT {
        i1_series(ax) * (-ax).exp()
    } else {
        hankel_scaled(1.0, ax)
    };
    v.copysign(x)
}

// sum_k (x^2/4)^k / (k!)^2, all terms positive.
fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > EPS * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

// (x/2) sum_k (x^2/4)^k / (k! (k+1)!)
fn i1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut k = 1.0;
    while term > EPS * sum {
        term *= q / (k * (k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k prod_{i<=k} (4nu^2 - (2i-1)^2) / (k! (8x)^k)
fn hankel_scaled(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// The Gamma function for positive arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma", format!("argument {x} must be > 0")));
    }
    Ok(ln_gamma(x).exp())
}

/// Regularized lower incomplete Gamma function `P(shape, x)`.
///
/// Series expansion below `x = shape + 1`, Lentz continued fraction for the
/// upper tail above it.
pub fn reg_lower_gamma(shape: f64, x: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::domain(
            "reg_lower_gamma",
            format!("shape {shape} must be > 0"),
        ));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "reg_lower_gamma",
            format!("x = {x} must be >= 0"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let log_prefactor = shape * x.ln() - x - ln_gamma(shape);
    let p = if x < shape + 1.0 {
        lower_gamma_series(shape, x, log_prefactor)
    } else {
        1.0 - upper_gamma_fraction(shape, x, log_prefactor)
    };
    Ok(p.clamp(0.0, 1.0))
}

fn lower_gamma_series(shape: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut denom = shape;
    let mut term = 1.0 / shape;
    let mut sum = term;
    for _ in 0..1_000_000 {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum * log_prefactor.exp()
}

fn upper_gamma_fraction(shape: f64, x: f64, log_prefactor: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - shape;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1_000_000 {
        let an = -(i as f64) * (i as f64 - shape);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    log_prefactor.exp() * h
}

/// Digamma function `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "digamma",
            format!("argument {x} must be > 0"),
        ));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail: -sum B_2k / (2k x^2k)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// Laguerre function `L_p(x) = 1F1(-p; 1; x)` for `p` in {1/2, 3/2}.
///
/// Evaluated through the modified-Bessel closed forms, which stay well
/// conditioned for the large negative arguments that Rician moments need.
pub fn laguerre_half(degree: HalfDegree, x: f64) -> Result<f64> {
    finite("laguerre_half", x)?;
    Ok(match degree {
        HalfDegree::OneHalf => laguerre_1_2(x),
        HalfDegree::ThreeHalves => laguerre_3_2(x),
    })
}

/// `L_{1/2}(x) = e^{x/2} [(1 - x) I_0(-x/2) - x I_1(-x/2)]`.
pub(crate) fn laguerre_1_2(x: f64) -> f64 {
    let u = 0.5 * x.abs();
    let growth = x.max(0.0).exp();
    growth * ((1.0 - x) * bessel_i0_scaled(u) + x.abs() * bessel_i1_scaled(u))
}

// Kummer contiguous relation with b = 1, a = -1/2:
// 3/2 M(-3/2) = (2 - x) M(-1/2) - 1/2 M(1/2),  M(1/2; 1; x) = e^{x/2} I_0(x/2).
pub(crate) fn laguerre_3_2(x: f64) -> f64 {
    let u = 0.5 * x.abs();
    let m_half = x.max(0.0).exp() * bessel_i0_scaled(u);
    (2.0 / 3.0) * ((2.0 - x) * laguerre_1_2(x) - 0.5 * m_half)
}

/// Confluent-hypergeometric series for `L_p(x)`, kept as an independent
/// route to [`laguerre_half`].
///
/// Negative arguments go through Kummer's transformation
/// `1F1(-p; 1; x) = e^x 1F1(1 + p; 1; -x)` so that every term is positive.
pub fn laguerre_half_series(degree: HalfDegree, x: f64) -> Result<f64> {
    finite("laguerre_half_series", x)?;
    let p = degree.value();
    let (a, z, scale) = if x < 0.0 {
        (1.0 + p, -x, x.exp())
    } else {
        (-p, x, 1.0)
    };
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (a + k) * z / ((k + 1.0) * (k + 1.0));
        sum += term;
        k += 1.0;
        if term.abs() <= EPS * sum.abs() || term == 0.0 {
            break;
        }
        if k > 100_000.0 {
            break;
        }
    }
    Ok(scale * sum)
}
