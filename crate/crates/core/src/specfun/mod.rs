//! Special functions and quadrature used by the normalization constants and
//! the verification oracles.

mod gamma;
mod hypergeometric;
mod quadrature;

pub use gamma::{beta, ln_beta, ln_gamma};
pub use hypergeometric::{kummer_1f1, tricomi_integrand, tricomi_u, tricomi_u_with, whittaker_w};
pub use quadrature::{integrate_adaptive, integrate_with, QuadratureOptions, QuadratureResult};
