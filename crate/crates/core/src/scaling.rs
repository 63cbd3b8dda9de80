//! Scale-transformation algebra.
//!
//! Under x → εᵃx, t → εᵇt the equation keeps its form when the density and
//! the two coefficients scale with indices c, d, e satisfying
//! b = a − d = 2a − e; normalization forces c = −a. Only α = a/b is
//! physical, so the canonical gauge here is b = 1.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    alpha: f64,
}

impl ScalingExponents {
    /// Exponents in the b = 1 gauge.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::from_indices(alpha, 1.0)
    }

    /// Exponents for arbitrary nonzero (a, b); c, d, e follow from the
    /// form-invariance and normalization relations.
    pub fn from_indices(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a == 0.0 || b == 0.0 {
            return Err(Error::domain(
                "make_exponents",
                format!("scaling indices must be finite and nonzero, got a={a}, b={b}"),
            ));
        }
        Ok(Self { a, b, c: -a, d: a - b, e: 2.0 * a - b, alpha: a / b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn e(&self) -> f64 {
        self.e
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Shorthand for [`ScalingExponents::new`].
pub fn make_exponents(alpha: f64) -> Result<ScalingExponents> {
    ScalingExponents::new(alpha)
}

/// z = x / t^α.
pub fn similarity_variable(x: f64, t: f64, alpha: f64) -> Result<f64> {
    check_time(t, "similarity_variable")?;
    Ok(x / t.powf(alpha))
}

pub(crate) fn check_time(t: f64, op: &'static str) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("time must be finite and positive, got {t}")))
    }
}

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// ρ₁(z) = f(z)ρ₂(z) + ρ₂′(z) + αz, the inverse of the definition of f.
pub fn drift_from_f(f: ProfileFn, rho2: ProfileFn, rho2_prime: ProfileFn, alpha: f64) -> ProfileFn {
    Arc::new(move |z| f(z) * rho2(z) + rho2_prime(z) + alpha * z)
}

/// f(z) = (ρ₁(z) − ρ₂′(z) − αz) / ρ₂(z); undefined where ρ₂ vanishes.
pub fn f_from_drift(rho1: f64, rho2: f64, rho2_prime: f64, alpha: f64, z: f64) -> f64 {
    (rho1 - rho2_prime - alpha * z) / rho2
}

/// Scale-invariant drift and diffusion profiles on a static z-domain,
/// with the log-derivative f of the stationary profile y.
#[derive(Clone)]
pub struct ScaleInvariantProfile {
    pub alpha: f64,
    pub rho1: ProfileFn,
    pub rho2: ProfileFn,
    pub rho2_prime: ProfileFn,
    pub rho2_second: ProfileFn,
    pub f: ProfileFn,
    pub f_prime: ProfileFn,
    /// May be −∞.
    pub z_lo: f64,
    /// May be +∞.
    pub z_hi: f64,
}

impl ScaleInvariantProfile {
    /// Builds a profile with ρ₁ generated from f through [`drift_from_f`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_f(
        alpha: f64,
        f: ProfileFn,
        f_prime: ProfileFn,
        rho2: ProfileFn,
        rho2_prime: ProfileFn,
        rho2_second: ProfileFn,
        z_lo: f64,
        z_hi: f64,
    ) -> Self {
        let rho1 = drift_from_f(f.clone(), rho2.clone(), rho2_prime.clone(), alpha);
        Self { alpha, rho1, rho2, rho2_prime, rho2_second, f, f_prime, z_lo, z_hi }
    }

    /// Closed domain membership.
    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_lo && z <= self.z_hi
    }

    pub fn is_interior(&self, z: f64) -> bool {
        z > self.z_lo && z < self.z_hi
    }

    /// f recomputed from the stored ρ₁ and ρ₂ by its definition.
    pub fn f_from_coefficients(&self, z: f64) -> f64 {
        f_from_drift((self.rho1)(z), (self.rho2)(z), (self.rho2_prime)(z), self.alpha, z)
    }

    /// ρ₁′ = f′ρ₂ + fρ₂′ + ρ₂″ + α.
    pub fn rho1_prime(&self, z: f64) -> f64 {
        (self.f_prime)(z) * (self.rho2)(z) + (self.f)(z) * (self.rho2_prime)(z) + (self.rho2_second)(z) + self.alpha
    }
}

impl fmt::Debug for ScaleInvariantProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScaleInvariantProfile")
            .field("alpha", &self.alpha)
            .field("z_lo", &self.z_lo)
            .field("z_hi", &self.z_hi)
            .finish_non_exhaustive()
    }
}
