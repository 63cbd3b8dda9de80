//! Oracles shared by the integration tests. Nothing here calls the library's
//! quadrature.

#![allow(dead_code)]

use fpe_similarity::solutions::SolutionClass;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of g over [a, b]; `g` receives (x, x − a, b − x) so
/// endpoint factors can be formed without cancellation.
pub fn tanh_sinh<G: Fn(f64, f64, f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    let w = b - a;
    let node = |t: f64| {
        let u = HALF_PI * t.sinh();
        let left = w / (1.0 + (2.0 * u).exp());
        let right = w / (1.0 + (-2.0 * u).exp());
        let weight = w * HALF_PI * t.cosh() / (2.0 * u.cosh().powi(2));
        if left <= 0.0 || right <= 0.0 || !weight.is_finite() {
            return 0.0;
        }
        let x = if left < right { a + left } else { b - right };
        weight * g(x, left, right)
    };
    double_exponential(node)
}

/// Exp-sinh quadrature of g over [a, ∞) with length scale `scale`.
pub fn exp_sinh<G: Fn(f64) -> f64>(g: G, a: f64, scale: f64) -> f64 {
    let node = |t: f64| {
        let e = (HALF_PI * t.sinh()).exp();
        let weight = scale * HALF_PI * t.cosh() * e;
        if e == 0.0 || !weight.is_finite() {
            return 0.0;
        }
        let v = g(a + scale * e);
        if v == 0.0 {
            0.0
        } else {
            weight * v
        }
    };
    double_exponential(node)
}

/// Trapezoid sums on t ∈ [−6.5, 6.5] with step halving until two levels agree;
/// the range reaches the underflow limit so x^{−0.95}-type endpoints lose
/// nothing measurable.
fn double_exponential<N: Fn(f64) -> f64>(node: N) -> f64 {
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum: f64 = {
        let n = (t_max / h) as i64;
        (-n..=n).map(|k| node(k as f64 * h)).sum()
    };
    let mut estimate = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let n = (t_max / h) as i64;
        // only the new odd nodes
        sum += (-n..=n).filter(|k| k % 2 != 0).map(|k| node(k as f64 * h)).sum::<f64>();
        let next = sum * h;
        if (next - estimate).abs() <= 1e-15 * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// ln Γ by Stirling's series after shifting the argument above 20.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut x = x;
    while x < 20.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// ₁F₁(a; b; x) for b > a > 0 from the Euler integral
/// Γ(b)/(Γ(a)Γ(b−a)) ∫₀¹ e^{xt} t^{a−1} (1−t)^{b−a−1} dt.
pub fn kummer_euler(a: f64, b: f64, x: f64) -> f64 {
    let ln_pre = ln_gamma_stirling(b) - ln_gamma_stirling(a) - ln_gamma_stirling(b - a);
    let g = |t: f64, tl: f64, tr: f64| (x * t + (a - 1.0) * tl.ln() + (b - a - 1.0) * tr.ln() + ln_pre).exp();
    tanh_sinh(g, 0.0, 1.0)
}

/// ∫ of the class profile without normalization, by double-exponential
/// quadrature from the class formulas.
pub fn profile_integral(class: SolutionClass) -> f64 {
    match class {
        SolutionClass::ClassI { z1, z2, a1, a2 } => {
            tanh_sinh(|_, l: f64, r: f64| (a1 * l.ln() + a2 * r.ln()).exp(), z1, z2)
        }
        SolutionClass::ClassII { z2, a1, a2, beta } => {
            tanh_sinh(|z, l: f64, r: f64| (a1 * l.ln() + a2 * r.ln() + beta * z).exp(), 0.0, z2)
        }
        SolutionClass::ClassIII { z1, a1, a2, beta } => {
            let scale = (a1 + a2 + 1.0) / beta;
            exp_sinh(|z| if z > z1 { (a1 * (z - z1).ln() + a2 * z.ln() - beta * z).exp() } else { 0.0 }, z1, scale)
        }
    }
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// α ∈ ±[0.5, 3].
pub fn random_alpha(rng: &mut ChaCha8Rng) -> f64 {
    let a = uniform(rng, 0.5, 3.0);
    if rng.random::<bool>() {
        a
    } else {
        -a
    }
}

pub fn random_class_i(rng: &mut ChaCha8Rng) -> SolutionClass {
    let z1 = uniform(rng, -3.0, 3.0);
    SolutionClass::ClassI {
        z1,
        z2: z1 + uniform(rng, 0.3, 5.0),
        a1: uniform(rng, 0.1, 5.0),
        a2: uniform(rng, 0.1, 5.0),
    }
}

pub fn random_class_ii(rng: &mut ChaCha8Rng) -> SolutionClass {
    SolutionClass::ClassII {
        z2: uniform(rng, 0.3, 4.0),
        a1: uniform(rng, 0.1, 5.0),
        a2: uniform(rng, 0.1, 5.0),
        beta: uniform(rng, -4.0, 4.0),
    }
}

pub fn random_class_iii(rng: &mut ChaCha8Rng) -> SolutionClass {
    SolutionClass::ClassIII {
        z1: uniform(rng, 0.0, 3.0),
        a1: uniform(rng, 0.1, 4.0),
        a2: uniform(rng, 0.1, 4.0),
        beta: uniform(rng, 0.3, 3.0),
    }
}

/// Points k + ½ of n on [lo, hi].
pub fn interior_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (k as f64 + 0.5) / n as f64 * (hi - lo))
}
