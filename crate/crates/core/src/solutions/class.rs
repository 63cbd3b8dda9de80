//! Parameter sets of the three solvable families and their closed-form
//! ingredients.

use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::{kummer_1f1, ln_beta, ln_gamma, whittaker_w};

/// Parameters of one of the three families. All densities vanish at finite
/// boundaries because a1, a2 > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionClass {
    /// Two moving boundaries z1 t^α ≤ x ≤ z2 t^α; y = (z−z1)^a1 (z2−z)^a2.
    ClassI { z1: f64, z2: f64, a1: f64, a2: f64 },
    /// Fixed wall at 0, moving wall at z2 t^α; y = z^a1 (z2−z)^a2 e^{βz}.
    ClassII { z2: f64, a1: f64, a2: f64, beta: f64 },
    /// Moving wall at z1 t^α, open to +∞; y = (z−z1)^a1 z^a2 e^{−βz}.
    ClassIII { z1: f64, a1: f64, a2: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    I,
    II,
    III,
}

/// Subclasses of Class I by the signs of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassISubclass {
    /// Both endpoints nonzero with the same sign.
    SameSign,
    /// One endpoint at the fixed point 0.
    FixedEndpoint,
    /// Endpoints straddle the origin.
    Straddling,
}

impl SolutionClass {
    pub fn kind(&self) -> ClassKind {
        match self {
            SolutionClass::ClassI { .. } => ClassKind::I,
            SolutionClass::ClassII { .. } => ClassKind::II,
            SolutionClass::ClassIII { .. } => ClassKind::III,
        }
    }

    pub fn exponents(&self) -> (f64, f64) {
        match *self {
            SolutionClass::ClassI { a1, a2, .. }
            | SolutionClass::ClassII { a1, a2, .. }
            | SolutionClass::ClassIII { a1, a2, .. } => (a1, a2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a1, a2) = self.exponents();
        let all_finite = match *self {
            SolutionClass::ClassI { z1, z2, .. } => z1.is_finite() && z2.is_finite(),
            SolutionClass::ClassII { z2, beta, .. } => z2.is_finite() && beta.is_finite(),
            SolutionClass::ClassIII { z1, beta, .. } => z1.is_finite() && beta.is_finite(),
        };
        if !all_finite || !a1.is_finite() || !a2.is_finite() {
            return Err(Error::InvalidParameters(format!("non-finite parameter in {self}")));
        }
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::InvalidParameters(format!("a1 and a2 must be positive, got a1={a1}, a2={a2}")));
        }
        match *self {
            SolutionClass::ClassI { z1, z2, .. } if !(z1 < z2) => {
                Err(Error::InvalidParameters(format!("Class I needs z1 < z2, got z1={z1}, z2={z2}")))
            }
            SolutionClass::ClassII { z2, .. } if !(z2 > 0.0) => {
                Err(Error::InvalidParameters(format!("Class II needs z2 > 0, got z2={z2}")))
            }
            SolutionClass::ClassIII { z1, .. } if !(z1 >= 0.0) => Err(Error::InvalidParameters(format!(
                "Class III needs z1 >= 0 (z^a2 must stay real and positive on the domain), got z1={z1}"
            ))),
            SolutionClass::ClassIII { beta, .. } if !(beta > 0.0) => {
                Err(Error::InvalidParameters(format!("Class III needs beta > 0, got beta={beta}")))
            }
            _ => Ok(()),
        }
    }

    pub fn class_one_subclass(&self) -> Option<ClassISubclass> {
        match *self {
            SolutionClass::ClassI { z1, z2, .. } => Some(if z1 == 0.0 || z2 == 0.0 {
                ClassISubclass::FixedEndpoint
            } else if (z1 > 0.0) == (z2 > 0.0) {
                ClassISubclass::SameSign
            } else {
                ClassISubclass::Straddling
            }),
            _ => None,
        }
    }

    /// The reflected model x → −x. Class I is closed under reflection, so
    /// its image is another Class I parameter set; the half-line classes
    /// keep their parameters and are evaluated through the reflection.
    pub fn reflect(self) -> ModelSpec {
        match self {
            SolutionClass::ClassI { z1, z2, a1, a2 } => {
                ModelSpec { class: SolutionClass::ClassI { z1: -z2, z2: -z1, a1: a2, a2: a1 }, mirrored: false }
            }
            other => ModelSpec { class: other, mirrored: true },
        }
    }
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SolutionClass::ClassI { z1, z2, a1, a2 } => {
                write!(f, "Class I (z1={z1}, z2={z2}, a1={a1}, a2={a2})")
            }
            SolutionClass::ClassII { z2, a1, a2, beta } => {
                write!(f, "Class II (z2={z2}, a1={a1}, a2={a2}, beta={beta})")
            }
            SolutionClass::ClassIII { z1, a1, a2, beta } => {
                write!(f, "Class III (z1={z1}, a1={a1}, a2={a2}, beta={beta})")
            }
        }
    }
}

/// A parameter set together with its orientation on the x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub class: SolutionClass,
    /// Evaluate the reflected model W(−x, t).
    pub mirrored: bool,
}

impl ModelSpec {
    pub fn reflect(self) -> ModelSpec {
        if self.mirrored {
            ModelSpec { class: self.class, mirrored: false }
        } else {
            self.class.reflect()
        }
    }
}

impl From<SolutionClass> for ModelSpec {
    fn from(class: SolutionClass) -> Self {
        ModelSpec { class, mirrored: false }
    }
}

/// Closed-form pieces of one family, evaluated in the model's own
/// orientation. With `sign = −1` every quantity is the reflected one:
/// y(z) → y(−z), f(z) → −f(−z), ρ₂(z) → ρ₂(−z), ρ₂′(z) → −ρ₂′(−z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Kernel {
    pub class: SolutionClass,
    pub sign: f64,
}

impl Kernel {
    pub fn new(spec: ModelSpec) -> Self {
        Self { class: spec.class, sign: if spec.mirrored { -1.0 } else { 1.0 } }
    }

    fn base_domain(&self) -> (f64, f64) {
        match self.class {
            SolutionClass::ClassI { z1, z2, .. } => (z1, z2),
            SolutionClass::ClassII { z2, .. } => (0.0, z2),
            SolutionClass::ClassIII { z1, .. } => (z1, f64::INFINITY),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        let (lo, hi) = self.base_domain();
        if self.sign > 0.0 {
            (lo, hi)
        } else {
            (-hi, -lo)
        }
    }

    /// ln y (unnormalized); −∞ on the boundary and outside the domain.
    pub fn ln_y(&self, z: f64) -> f64 {
        let z = self.sign * z;
        let (lo, hi) = self.base_domain();
        if !(z >= lo && z <= hi) {
            return f64::NEG_INFINITY;
        }
        match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => a1 * (z - z1).ln() + a2 * (z2 - z).ln(),
            SolutionClass::ClassII { z2, a1, a2, beta } => a1 * z.ln() + a2 * (z2 - z).ln() + beta * z,
            SolutionClass::ClassIII { z1, a1, a2, beta } => a1 * (z - z1).ln() + a2 * z.ln() - beta * z,
        }
    }

    /// f = y′/y on the open domain.
    pub fn f(&self, z: f64) -> f64 {
        let s = self.sign;
        let z = s * z;
        s * match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => a1 / (z - z1) - a2 / (z2 - z),
            SolutionClass::ClassII { z2, a1, a2, beta } => a1 / z - a2 / (z2 - z) + beta,
            SolutionClass::ClassIII { z1, a1, a2, beta } => a1 / (z - z1) + a2 / z - beta,
        }
    }

    /// f·ρ₂ with the endpoint poles cancelled; finite on the closed domain.
    pub fn f_rho2(&self, z: f64) -> f64 {
        let s = self.sign;
        let z = s * z;
        s * match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => a1 * (z2 - z) - a2 * (z - z1),
            SolutionClass::ClassII { z2, a1, a2, beta } => a1 * (z2 - z) - a2 * z + beta * z * (z2 - z),
            SolutionClass::ClassIII { z1, a1, a2, beta } => a1 * z + a2 * (z - z1) - beta * z * (z - z1),
        }
    }

    pub fn f_prime(&self, z: f64) -> f64 {
        let z = self.sign * z;
        match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => -a1 / (z - z1).powi(2) - a2 / (z2 - z).powi(2),
            SolutionClass::ClassII { z2, a1, a2, .. } => -a1 / (z * z) - a2 / (z2 - z).powi(2),
            SolutionClass::ClassIII { z1, a1, a2, .. } => -a1 / (z - z1).powi(2) - a2 / (z * z),
        }
    }

    /// ρ₂ inside the closed domain, 0 outside.
    pub fn rho2(&self, z: f64) -> f64 {
        let z = self.sign * z;
        let (lo, hi) = self.base_domain();
        if !(z >= lo && z <= hi) {
            return 0.0;
        }
        match self.class {
            SolutionClass::ClassI { z1, z2, .. } => (z - z1) * (z2 - z),
            SolutionClass::ClassII { z2, .. } => z * (z2 - z),
            SolutionClass::ClassIII { z1, .. } => (z - z1) * z,
        }
    }

    pub fn rho2_prime(&self, z: f64) -> f64 {
        let s = self.sign;
        let z = s * z;
        s * match self.class {
            SolutionClass::ClassI { z1, z2, .. } => z1 + z2 - 2.0 * z,
            SolutionClass::ClassII { z2, .. } => z2 - 2.0 * z,
            SolutionClass::ClassIII { z1, .. } => 2.0 * z - z1,
        }
    }

    pub fn rho2_second(&self) -> f64 {
        match self.class {
            SolutionClass::ClassI { .. } | SolutionClass::ClassII { .. } => -2.0,
            SolutionClass::ClassIII { .. } => 2.0,
        }
    }

    /// The drift profile in the published polynomial form. Only used to
    /// cross-check the ρ₁ generated from f.
    pub fn rho1_polynomial(&self, alpha: f64, z: f64) -> f64 {
        let s = self.sign;
        let z = s * z;
        s * match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => (alpha - a1 - a2 - 2.0) * z + (a1 + 1.0) * z2 + (a2 + 1.0) * z1,
            SolutionClass::ClassII { z2, a1, a2, beta } => {
                -beta * z * z + (alpha - a1 - a2 - 2.0 + beta * z2) * z + (a1 + 1.0) * z2
            }
            SolutionClass::ClassIII { z1, a1, a2, beta } => {
                -beta * z * z + (alpha + a1 + a2 + 2.0 + beta * z1) * z - (a2 + 1.0) * z1
            }
        }
    }

    /// Derivative of [`Kernel::rho1_polynomial`].
    pub fn rho1_polynomial_prime(&self, alpha: f64, z: f64) -> f64 {
        let z = self.sign * z;
        match self.class {
            SolutionClass::ClassI { a1, a2, .. } => alpha - a1 - a2 - 2.0,
            SolutionClass::ClassII { z2, a1, a2, beta } => -2.0 * beta * z + (alpha - a1 - a2 - 2.0 + beta * z2),
            SolutionClass::ClassIII { z1, a1, a2, beta } => -2.0 * beta * z + (alpha + a1 + a2 + 2.0 + beta * z1),
        }
    }

    /// ln ∫ y dz from the closed forms: Beta for Class I, Beta·₁F₁ for
    /// Class II, Γ·Whittaker W with argument βz1 for Class III.
    pub fn ln_integral_closed_form(&self) -> Result<f64> {
        match self.class {
            SolutionClass::ClassI { z1, z2, a1, a2 } => {
                Ok((a1 + a2 + 1.0) * (z2 - z1).ln() + ln_beta(a1 + 1.0, a2 + 1.0)?)
            }
            SolutionClass::ClassII { z2, a1, a2, beta } => {
                let hyp = kummer_1f1(a1 + 1.0, a1 + a2 + 2.0, beta * z2)?;
                Ok((a1 + a2 + 1.0) * z2.ln() + ln_beta(a1 + 1.0, a2 + 1.0)? + hyp.ln())
            }
            SolutionClass::ClassIII { z1, a1, a2, beta } => {
                let n = a1 + a2;
                if z1 == 0.0 {
                    // y = z^{a1+a2} e^{−βz}
                    return Ok(ln_gamma(n + 1.0)? - (n + 1.0) * beta.ln());
                }
                let x = beta * z1;
                let w = whittaker_w(0.5 * (a2 - a1), -0.5 * (n + 1.0), x)?;
                Ok(-0.5 * (n + 2.0) * beta.ln() + 0.5 * n * z1.ln() + ln_gamma(a1 + 1.0)? - 0.5 * x + w.ln())
            }
        }
    }
}
