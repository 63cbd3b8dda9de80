//! Confluent hypergeometric functions: Kummer's ₁F₁, Tricomi's U and the
//! Whittaker function W built on top of U.

use super::gamma::ln_gamma;
use super::quadrature::{integrate_with, QuadratureOptions};
use crate::error::{Error, Result};

const KUMMER_MAX_TERMS: usize = 100_000;

/// Kummer's confluent hypergeometric function ₁F₁(a; b; x).
///
/// Summed by term ratios. Negative arguments go through
/// ₁F₁(a;b;x) = eˣ ₁F₁(b−a;b;−x) so the series never alternates when
/// a, b − a ≥ 0.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) || !a.is_finite() || !x.is_finite() {
        return Err(Error::domain("kummer_1f1", format!("requires finite a, x and b > 0, got ({a}, {b}, {x})")));
    }
    if x < 0.0 {
        return Ok(x.exp() * series_1f1(b - a, b, -x)?);
    }
    series_1f1(a, b, x)
}

fn series_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * x / (kf + 1.0);
        sum += term;
        if term.abs() <= f64::EPSILON * 0.5 * sum.abs() || term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "kummer_1f1 series", iterations: KUMMER_MAX_TERMS })
}

/// Tricomi's confluent hypergeometric function U(a, b, x) for a > 0, x > 0,
/// from
///
/// U(a,b,x) = 1/Γ(a) ∫₀^∞ e^{−xt} t^{a−1} (1+t)^{b−a−1} dt.
pub fn tricomi_u(a: f64, b: f64, x: f64) -> Result<f64> {
    tricomi_u_with(a, b, x, 1e-13)
}

/// As [`tricomi_u`] with an explicit relative tolerance for the quadrature.
pub fn tricomi_u_with(a: f64, b: f64, x: f64, rel_tol: f64) -> Result<f64> {
    if !(a > 0.0) || !(x > 0.0) || !b.is_finite() || !x.is_finite() {
        return Err(Error::domain("tricomi_u", format!("requires a > 0, x > 0, finite b, got ({a}, {b}, {x})")));
    }
    let integrand = tricomi_integrand(a, b, x);
    // Most of the mass sits within t ≲ max(a, 1)/x.
    let scale = (a.max(1.0) / x).clamp(1e-3, 1e3);
    let opts = QuadratureOptions { abs_tol: 0.0, rel_tol, semi_infinite_scale: scale, ..Default::default() };
    let res = integrate_with(integrand, 0.0, f64::INFINITY, &opts)?;
    Ok(res.value * (-ln_gamma(a)?).exp())
}

/// The integrand of the Laplace-type representation of U, without the 1/Γ(a)
/// prefactor. Exposed so tests can integrate it independently.
pub fn tricomi_integrand(a: f64, b: f64, x: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        ((a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() - x * t).exp()
    }
}

/// Whittaker function W_{κ,μ}(x) = e^{−x/2} x^{μ+1/2} U(μ−κ+1/2, 1+2μ, x).
///
/// W is even in μ, so |μ| is used; the U parameter μ−κ+1/2 must then be
/// positive.
pub fn whittaker_w(kappa: f64, mu: f64, x: f64) -> Result<f64> {
    let mu = mu.abs();
    let a = mu - kappa + 0.5;
    if !(a > 0.0) {
        return Err(Error::domain(
            "whittaker_w",
            format!("requires |mu| - kappa + 1/2 > 0, got kappa={kappa}, mu={mu}"),
        ));
    }
    let u = tricomi_u(a, 1.0 + 2.0 * mu, x)?;
    Ok((-0.5 * x + (mu + 0.5) * x.ln()).exp() * u)
}
