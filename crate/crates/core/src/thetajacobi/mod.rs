//! Jacobi forms of weight k and index m on SL₂(ℤ): the theta functions
//! θ_{μ,m}, theta decompositions φ = Σ h_μ θ_{μ,m}, pointwise Petersson norms
//! on ℍ×ℂ, both forms of the Petersson inner product, and sup-norm search.
//!
//! Values that grow like `e^{2πm y²/η}` are handled in scaled form: the
//! `*_scaled` evaluators return `φ(τ,z)·e^{−2πm y²/η}`, whose squared modulus
//! times η^k is the pointwise norm.

pub mod coeffs;
pub mod decomposition;
pub mod inner;
pub mod search;
pub mod theta;

pub use coeffs::{phi_10_1, JacobiFormCoeffs, Phi10Product};
pub use decomposition::{assemble_jacobi, assemble_jacobi_scaled, extract_h_mu, ThetaComponentVector};
pub use inner::{
    gamma01_coset_representatives, jacobi_inner_4d, jacobi_inner_theta, theta_component_l2_norms_gamma01,
    ComponentNorms, JacobiQuadrature,
};
pub use search::{cauchy_schwarz_chain_check, jacobi_supnorm_search, JacobiSearchConfig, JacobiSupSearch};
pub use theta::{theta_eval, theta_eval_scaled, theta_pet_norm, theta_sum_bound_check, JacobiPoint, ThetaValue};

use crate::error::Result;

/// A function on ℍ×ℂ with the weight/index data needed for its norm.
pub trait JacobiFunction: Sync {
    fn weight(&self) -> f64;
    fn index(&self) -> u32;

    /// `φ(τ,z)·e^{−2πm y²/η}`.
    fn eval_scaled(&self, p: &JacobiPoint) -> Result<num_complex::Complex64>;

    /// Squared pointwise Petersson norm `|φ|²η^k e^{−4πm y²/η}`.
    fn pet_norm(&self, p: &JacobiPoint) -> Result<f64> {
        Ok(self.eval_scaled(p)?.norm_sqr() * p.tau.eta().powf(self.weight()))
    }
}

/// Squared pointwise Petersson norm of any [`JacobiFunction`].
pub fn jacobi_pet_norm<F: JacobiFunction + ?Sized>(phi: &F, p: &JacobiPoint) -> Result<f64> {
    phi.pet_norm(p)
}

/// A Jacobi function multiplied by a real constant.
#[derive(Clone, Debug)]
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: JacobiFunction> JacobiFunction for Scaled<F> {
    fn weight(&self) -> f64 {
        self.inner.weight()
    }
    fn index(&self) -> u32 {
        self.inner.index()
    }
    fn eval_scaled(&self, p: &JacobiPoint) -> Result<num_complex::Complex64> {
        Ok(self.inner.eval_scaled(p)? * self.factor)
    }
}
