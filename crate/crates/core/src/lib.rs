//! Numerical verification of gradient decay for the Dirichlet heat semigroup
//! on the exterior of the unit ball in R³.
//!
//! For radial data `f(x) = F(|x|)` the substitution `v(t, r) = (r + 1) U(t, r + 1)`
//! turns the exterior problem into the half-line heat equation with a
//! Dirichlet condition at `r = 0`, whose solution is an image-kernel integral
//! against `g(r) = (r + 1) F(r + 1)`. Everything in this crate is built on that
//! reduction:
//!
//! * [`special_kernels`]: Gaussian, image kernel and its r-derivative, the
//!   recombined gradient kernel `K(t, r, s)`, and `erf`/`erfc`.
//! * [`quadrature`]: radial profiles, kernel-times-profile integrals and
//!   weighted `L^p` norms (including `p = ∞`).
//! * [`solver`]: `v`, `∂_r v`, `‖∇u(t)‖_p` and `‖u(t)‖_∞` for exterior data.
//! * [`optimality`]: the extremal family `f_m`, `t_m = m²`, and the certified
//!   quotient `Q_m = t_m^μ ‖∇u_m(t_m)‖_p`.
//! * [`decay`]: log-log fits of `(t, ‖∇u(t)‖_p)` sweeps against the exponent law.
//! * [`validate`] and [`cli`]: oracle suite, CSV/JSON reporting, command runner.
//!
//! The `examples/` directory of this crate has one runnable program per capability.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference tables and fitted coefficients keep their source digits.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod corpus;
pub mod decay;
mod error;
pub mod exponent;
pub mod optimality;
pub mod quadrature;
pub mod solver;
pub mod special_kernels;
pub mod validate;

pub use error::{Error, Result};
pub use exponent::Exponent;
