//! Numerical tools for sup-norm bounds of holomorphic cusp forms and Jacobi
//! cusp forms on the full modular group and its congruence subgroups.
//!
//! The crate is organised bottom-up:
//!
//! - [`hyperbolic`]: points of the upper half-plane, Möbius actions, the
//!   displacement function and reduction to the standard fundamental domain.
//! - [`arithmetic`]: enumeration of group elements by displacement, the
//!   counting function and its integral inequality, congruence subgroups and
//!   coset counts.
//! - [`qseries`]: truncated Fourier expansions (Eisenstein series, Δ, η-powers),
//!   pointwise Petersson norms, Petersson inner products and sup-norm search.
//! - [`thetajacobi`]: Jacobi theta functions, theta decompositions of Jacobi
//!   cusp forms, both forms of the Jacobi Petersson inner product.
//! - [`bounds`]: the truncated Bergman-kernel series and evaluators for every
//!   explicit bound constant, with measured-vs-bound reports.

pub mod arithmetic;
pub mod bounds;
pub mod error;
pub mod hyperbolic;
pub mod qseries;
pub mod quad;
pub mod sum;
pub mod thetajacobi;

pub use error::{Error, Result};
pub use num_complex::Complex64;
