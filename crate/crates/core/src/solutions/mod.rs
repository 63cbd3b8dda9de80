//! The three solvable families and evaluation of their densities, currents,
//! coefficients, boundaries and moments.
//!
//! Every model is built from its stationary profile y and its diffusion
//! profile ρ₂; the drift profile is always generated as ρ₁ = fρ₂ + ρ₂′ + αz
//! with f = y′/y, never typed in separately.

mod class;
mod presets;

use std::sync::Arc;

pub use class::{ClassISubclass, ClassKind, ModelSpec, SolutionClass};
pub use presets::{figure_preset, FigurePreset, FIGURE_PRESETS};

use class::Kernel;

use crate::error::Result;
use crate::scaling::{check_time, ProfileFn, ScaleInvariantProfile, ScalingExponents};
use crate::specfun::{integrate_with, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormSource {
    ClosedForm,
    Quadrature,
}

/// Normalization constant A from both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    /// ln A actually used by the model.
    pub ln_a: f64,
    pub source: NormSource,
    /// ln A from Beta / ₁F₁ / Whittaker closed forms.
    pub closed_form_ln_a: Option<f64>,
    /// ln A from direct quadrature of y.
    pub quadrature_ln_a: f64,
}

impl Normalization {
    pub fn closed_form(&self) -> Option<f64> {
        self.closed_form_ln_a.map(f64::exp)
    }

    pub fn quadrature(&self) -> f64 {
        self.quadrature_ln_a.exp()
    }

    /// |A_closed / A_quad − 1|, if a closed form exists.
    pub fn relative_discrepancy(&self) -> Option<f64> {
        self.closed_form_ln_a.map(|c| (c - self.quadrature_ln_a).exp_m1().abs())
    }
}

#[derive(Debug, Clone)]
pub struct SimilaritySolution {
    exponents: ScalingExponents,
    spec: ModelSpec,
    profile: ScaleInvariantProfile,
    norm: Normalization,
    kernel: Kernel,
}

/// Relative tolerance for the quadrature route to A.
const NORM_REL_TOL: f64 = 1e-13;

pub fn build_solution(alpha: f64, params: impl Into<ModelSpec>) -> Result<SimilaritySolution> {
    let spec = params.into();
    spec.class.validate()?;
    let exponents = ScalingExponents::new(alpha)?;
    let kernel = Kernel::new(spec);
    let (z_lo, z_hi) = kernel.domain();

    let f: ProfileFn = Arc::new(move |z| kernel.f(z));
    let f_prime: ProfileFn = Arc::new(move |z| kernel.f_prime(z));
    let rho2: ProfileFn = Arc::new(move |z| kernel.rho2(z));
    let rho2_prime: ProfileFn = Arc::new(move |z| kernel.rho2_prime(z));
    let second = kernel.rho2_second();
    let rho2_second: ProfileFn = Arc::new(move |_| second);
    // ρ₁ = fρ₂ + ρ₂′ + αz with the product taken in cancelled form, so the
    // drift stays finite at the endpoints where ρ₂ = 0
    let rho1: ProfileFn = Arc::new(move |z| kernel.f_rho2(z) + kernel.rho2_prime(z) + alpha * z);
    let profile = ScaleInvariantProfile { alpha, rho1, rho2, rho2_prime, rho2_second, f, f_prime, z_lo, z_hi };

    let quadrature_ln_a = -ln_integral_by_quadrature(&kernel)?;
    let norm = match spec.class.kind() {
        ClassKind::I | ClassKind::II => {
            let c = -kernel.ln_integral_closed_form()?;
            Normalization { ln_a: c, source: NormSource::ClosedForm, closed_form_ln_a: Some(c), quadrature_ln_a }
        }
        ClassKind::III => Normalization {
            ln_a: quadrature_ln_a,
            source: NormSource::Quadrature,
            closed_form_ln_a: kernel.ln_integral_closed_form().ok().map(|v| -v),
            quadrature_ln_a,
        },
    };
    Ok(SimilaritySolution { exponents, spec, profile, norm, kernel })
}

/// ln ∫ y dz over the domain. The integrand is rescaled by its largest
/// sampled value so large exponents neither overflow nor underflow.
fn ln_integral_by_quadrature(kernel: &Kernel) -> Result<f64> {
    let (lo, hi) = kernel.domain();
    let (shift, scale) = sample_peak(kernel);
    let g = |z: f64| (kernel.ln_y(z) - shift).exp();
    let opts =
        QuadratureOptions { abs_tol: 0.0, rel_tol: NORM_REL_TOL, semi_infinite_scale: scale, ..Default::default() };
    let value = if hi.is_finite() && lo.is_finite() {
        integrate_with(g, lo, hi, &opts)?.value
    } else if lo.is_finite() {
        integrate_with(g, lo, f64::INFINITY, &opts)?.value
    } else {
        // mirrored half-line model: integrate the reflection
        integrate_with(|z: f64| g(-z), -hi, f64::INFINITY, &opts)?.value
    };
    Ok(value.ln() + shift)
}

/// Largest ln y on a coarse sample and a length scale for semi-infinite
/// splitting.
fn sample_peak(kernel: &Kernel) -> (f64, f64) {
    let (lo, hi) = kernel.domain();
    let (a, b, scale) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi, hi - lo),
        _ => {
            let (a1, a2) = kernel.class.exponents();
            let beta = match kernel.class {
                SolutionClass::ClassII { beta, .. } | SolutionClass::ClassIII { beta, .. } => beta.abs(),
                SolutionClass::ClassI { .. } => 1.0,
            };
            let reach = (a1 + a2 + 1.0) / beta + 10.0 / beta;
            if lo.is_finite() {
                (lo, lo + reach, reach)
            } else {
                (hi - reach, hi, reach)
            }
        }
    };
    let n = 400;
    let peak = (1..n).map(|i| kernel.ln_y(a + (b - a) * i as f64 / n as f64)).fold(f64::NEG_INFINITY, f64::max);
    (if peak.is_finite() { peak } else { 0.0 }, scale)
}

impl SimilaritySolution {
    pub fn exponents(&self) -> &ScalingExponents {
        &self.exponents
    }

    pub fn alpha(&self) -> f64 {
        self.exponents.alpha()
    }

    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    pub fn class_params(&self) -> SolutionClass {
        self.spec.class
    }

    pub fn profile(&self) -> &ScaleInvariantProfile {
        &self.profile
    }

    pub fn normalization(&self) -> &Normalization {
        &self.norm
    }

    pub fn norm_a(&self) -> f64 {
        self.norm.ln_a.exp()
    }

    pub fn norm_source(&self) -> NormSource {
        self.norm.source
    }

    pub fn z_domain(&self) -> (f64, f64) {
        (self.profile.z_lo, self.profile.z_hi)
    }

    /// Replaces the drift profile, leaving y, ρ₂ and A untouched. The result
    /// is no longer a solution; this exists so the verification checks can
    /// be shown to reject a wrong drift.
    pub fn with_drift(mut self, rho1: ProfileFn) -> Self {
        self.profile.rho1 = rho1;
        self
    }

    /// Unnormalized stationary profile y(z) (0 outside the domain).
    pub fn y_unnormalized(&self, z: f64) -> f64 {
        self.kernel.ln_y(z).exp()
    }

    /// Normalized y(z) = A·y_unnormalized(z).
    pub fn y(&self, z: f64) -> f64 {
        (self.norm.ln_a + self.kernel.ln_y(z)).exp()
    }

    /// Analytic y′(z) = f(z)·y(z) on the open domain.
    pub fn y_prime(&self, z: f64) -> f64 {
        if !self.profile.is_interior(z) {
            return 0.0;
        }
        self.kernel.f(z) * self.y(z)
    }

    /// Analytic y″(z) = (f′ + f²)·y on the open domain.
    pub fn y_second(&self, z: f64) -> f64 {
        if !self.profile.is_interior(z) {
            return 0.0;
        }
        let f = self.kernel.f(z);
        (self.kernel.f_prime(z) + f * f) * self.y(z)
    }

    /// Drift profile in the published polynomial form (cross-check only).
    pub fn rho1_polynomial(&self, z: f64) -> f64 {
        self.kernel.rho1_polynomial(self.alpha(), z)
    }

    pub fn rho1_polynomial_prime(&self, z: f64) -> f64 {
        self.kernel.rho1_polynomial_prime(self.alpha(), z)
    }

    /// W(x, t) = t^{−α} A y(x/t^α), zero outside the moving domain.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t, "density")?;
        Ok(self.density_unchecked(x, t))
    }

    pub(crate) fn density_unchecked(&self, x: f64, t: f64) -> f64 {
        let alpha = self.alpha();
        let z = x / t.powf(alpha);
        (self.norm.ln_a + self.kernel.ln_y(z) - alpha * t.ln()).exp()
    }

    /// Probability current J = (α/t)·x·W (the C = 0 branch).
    pub fn current(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t, "current")?;
        Ok(self.alpha() / t * x * self.density_unchecked(x, t))
    }

    /// J from its definition D¹W − ∂ₓ(D²W), with the x-derivative taken
    /// analytically: t^{−1}[(ρ₁ − ρ₂′)y − ρ₂y′].
    pub fn current_from_definition(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t, "current")?;
        let z = x / t.powf(self.alpha());
        if !self.profile.is_interior(z) {
            return Ok(0.0);
        }
        let p = &self.profile;
        let y = self.y(z);
        let j = ((p.rho1)(z) - (p.rho2_prime)(z)) * y - (p.rho2)(z) * self.y_prime(z);
        Ok(j / t)
    }

    /// (D¹, D²) = (t^{α−1}ρ₁(z), t^{2α−1}ρ₂(z)); both zero outside the
    /// moving domain.
    pub fn coefficients(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        check_time(t, "coefficients")?;
        Ok(self.coefficients_unchecked(x, t))
    }

    pub(crate) fn coefficients_unchecked(&self, x: f64, t: f64) -> (f64, f64) {
        let alpha = self.alpha();
        let z = x / t.powf(alpha);
        if !self.profile.contains(z) {
            return (0.0, 0.0);
        }
        (t.powf(alpha - 1.0) * (self.profile.rho1)(z), t.powf(2.0 * alpha - 1.0) * (self.profile.rho2)(z))
    }

    /// (x_lo(t), x_hi(t)) = (z_lo t^α, z_hi t^α); infinite ends pass through.
    pub fn boundary_positions(&self, t: f64) -> Result<(f64, f64)> {
        check_time(t, "boundary_positions")?;
        Ok(self.boundary_positions_unchecked(t))
    }

    pub(crate) fn boundary_positions_unchecked(&self, t: f64) -> (f64, f64) {
        let s = t.powf(self.alpha());
        let (lo, hi) = self.z_domain();
        let scale = |z: f64| if z.is_finite() { z * s } else { z };
        (scale(lo), scale(hi))
    }

    /// ∫ x^k W(x,t) dx = t^{kα} ∫ z^k y(z) dz.
    pub fn moment(&self, k: u32, t: f64) -> Result<f64> {
        check_time(t, "moment")?;
        let zk = self.z_moment(k, 1e-12)?;
        Ok(t.powf(k as f64 * self.alpha()) * zk)
    }

    /// ∫ z^k y(z) dz with relative tolerance `rel_tol`.
    pub fn z_moment(&self, k: u32, rel_tol: f64) -> Result<f64> {
        let g = |z: f64| {
            if k == 0 {
                self.y(z)
            } else {
                z.powi(k as i32) * self.y(z)
            }
        };
        self.integrate_z(g, rel_tol)
    }

    /// Integrates a function of z over the model's z-domain.
    pub fn integrate_z<G: Fn(f64) -> f64>(&self, g: G, rel_tol: f64) -> Result<f64> {
        let (lo, hi) = self.z_domain();
        let (_, scale) = sample_peak(&self.kernel);
        let opts = QuadratureOptions { abs_tol: 1e-300, rel_tol, semi_infinite_scale: scale, ..Default::default() };
        let r = if lo.is_finite() {
            integrate_with(g, lo, hi, &opts)?
        } else {
            integrate_with(|z: f64| g(-z), -hi, f64::INFINITY, &opts)?
        };
        Ok(r.value)
    }

    /// ∫ W(x, t) dx computed directly in x.
    pub fn total_mass(&self, t: f64, rel_tol: f64) -> Result<f64> {
        check_time(t, "total_mass")?;
        let (lo, hi) = self.boundary_positions_unchecked(t);
        let scale = sample_peak(&self.kernel).1 * t.powf(self.alpha());
        let opts = QuadratureOptions { abs_tol: 1e-300, rel_tol, semi_infinite_scale: scale, ..Default::default() };
        let w = |x: f64| self.density_unchecked(x, t);
        let r = if lo.is_finite() {
            integrate_with(w, lo, hi, &opts)?
        } else {
            integrate_with(|x: f64| w(-x), -hi, f64::INFINITY, &opts)?
        };
        Ok(r.value)
    }

    /// Finite z-interval holding all but `tail` of the probability mass.
    /// Finite endpoints are returned unchanged.
    pub fn truncated_z_domain(&self, tail: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.z_domain();
        if lo.is_finite() && hi.is_finite() {
            return Ok((lo, hi));
        }
        // work on the half-line [start, ∞) in the unmirrored direction
        let (start, dir) = if lo.is_finite() { (lo, 1.0) } else { (-hi, -1.0) };
        let tail_mass = |cut: f64| -> Result<f64> {
            let opts = QuadratureOptions { abs_tol: tail * 1e-3, rel_tol: 1e-10, ..Default::default() };
            Ok(integrate_with(|u: f64| self.y(dir * u), cut, f64::INFINITY, &opts)?.value)
        };
        let (_, scale) = sample_peak(&self.kernel);
        let mut cut = start + scale;
        while tail_mass(cut)? > tail {
            cut += scale;
        }
        let (mut a, mut b) = (cut - scale, cut);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if tail_mass(mid)? > tail {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-9 * scale {
                break;
            }
        }
        Ok(if dir > 0.0 { (lo, b) } else { (-b, hi) })
    }

    /// Residual of the first integral ρ₂y′ + (ρ₂′ − ρ₁ + αz)y = 0 at z, with
    /// the magnitude of its largest term as the local scale.
    pub fn first_integral_residual(&self, z: f64) -> (f64, f64) {
        let p = &self.profile;
        let y = self.y(z);
        let t1 = (p.rho2)(z) * self.y_prime(z);
        let t2 = ((p.rho2_prime)(z) - (p.rho1)(z) + self.alpha() * z) * y;
        (t1 + t2, t1.abs().max(t2.abs()))
    }

    /// Residual of the reduced second-order equation
    /// ρ₂y″ + (2ρ₂′ − ρ₁ + αz)y′ + (ρ₂″ − ρ₁′ + α)y = 0 at z, using the
    /// drift derivative of the published polynomial, with the largest term
    /// magnitude as scale.
    pub fn reduced_ode_residual(&self, z: f64) -> (f64, f64) {
        let p = &self.profile;
        let alpha = self.alpha();
        let t1 = (p.rho2)(z) * self.y_second(z);
        let t2 = (2.0 * (p.rho2_prime)(z) - (p.rho1)(z) + alpha * z) * self.y_prime(z);
        let t3 = ((p.rho2_second)(z) - self.rho1_polynomial_prime(z) + alpha) * self.y(z);
        (t1 + t2 + t3, t1.abs().max(t2.abs()).max(t3.abs()))
    }
}
