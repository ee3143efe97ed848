//! Complex-argument special functions: Γ, Riemann and Hurwitz ζ, K_ν, σ_s(n).

pub mod bessel;
pub mod divisor;
pub mod gamma;
pub mod quad;
pub mod zeta;

pub use bessel::{bessel_k, bessel_k_scaled, BesselK};
pub use divisor::{divisor_sigma, divisors};
pub use gamma::{complex_gamma, gamma_ratio, ln_gamma, rgamma, EULER_GAMMA};
pub use zeta::{hurwitz_zeta, riemann_zeta, RIEMANN_ZETA_PRIME_ZERO};
