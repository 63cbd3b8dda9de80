//! Exact similarity solutions of one-dimensional Fokker–Planck equations with
//! time-dependent coefficients on domains whose boundaries move as
//! x_k(t) = z_k t^α, together with independent numerical checks.
//!
//! - [`scaling`]: scaling exponents, the similarity variable z = x/t^α and the
//!   drift/diffusion profile relation.
//! - [`specfun`]: log-gamma, Beta, ₁F₁, Tricomi U / Whittaker W, adaptive
//!   quadrature.
//! - [`solutions`]: the three solvable families and their densities,
//!   currents, coefficients and moments.
//! - [`pde`]: finite-volume evolution of the transformed equation on the
//!   fixed z-domain in log-time.
//! - [`sde`]: Euler–Maruyama particle ensembles with reflecting moving walls.

pub mod error;
pub mod pde;
pub mod scaling;
pub mod sde;
pub mod solutions;
pub mod specfun;

pub use error::{Error, Result};
