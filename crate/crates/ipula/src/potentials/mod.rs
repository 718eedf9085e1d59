//! Target potentials.
//!
//! A potential is a proper convex function `U` on `R^n`, strongly convex with
//! some modulus `sigma > 0`, possibly nonsmooth. The sampling machinery only
//! ever talks to the [`CompositePotential`] contract: values, a deterministic
//! subgradient selection, and whatever structure the potential can expose
//! (closed-form prox of the whole function, a smooth/nonsmooth splitting
//! `U = f + g`, a closed-form prox of `g` alone).
//!
//! Bundled potentials:
//!
//! * [`QuadraticPotential`]: `(sigma/2)||x - c||^2`, fully closed-form; the
//!   fixture every envelope identity can be checked against.
//! * [`ElasticNetPotential`]: `lambda ||x||_1 + (s/2)||x||^2`, closed-form
//!   prox via soft thresholding, kinks at zero.
//! * [`TvDeblurPotential`]: `||Hx - y||^2 / (2 sigma^2) + lambda_tv TV(x)
//!   + (lambda_2/2)||x||^2` with an FFT-backed periodic blur `H`; no
//!   closed-form prox (which is why inexact inner solves exist at all).

mod blur;
mod elastic_net;
mod quadratic;
mod tv;

pub use blur::{blur_adjoint, blur_apply, BlurOperator};
pub use elastic_net::{soft_threshold, ElasticNetPotential};
pub use quadratic::QuadraticPotential;
pub use tv::{tv_seminorm, tv_subgradient, TvDeblurPotential, TvRidgePotential};

use crate::scalar::Scalar;

/// Contract between potentials and the envelope/sampling machinery.
///
/// Methods taking a state panic on dimension mismatch (programming error);
/// the fallible entry points in [`crate::envelope`] and [`crate::samplers`]
/// validate dimensions once and return typed errors.
pub trait CompositePotential<F: Scalar>: Send + Sync {
    fn dimension(&self) -> usize;

    /// `U(x)`.
    fn value(&self, x: &[F]) -> F;

    /// Deterministic subgradient selection; at kinks the zero element of the
    /// local interval is chosen (`sign(0) = 0`).
    fn subgradient_select(&self, x: &[F]) -> Vec<F>;

    /// Subgradient selection used for prox residuals, anchored at `anchor`
    /// with parameter `gamma`. Wherever the subdifferential is a singleton
    /// this must agree with [`Self::subgradient_select`]; where it has
    /// freedom (kinks) the implementation may pick the element minimizing
    /// `||u + (candidate - anchor)/gamma||`, which keeps the residual an
    /// upper bound on the true gradient error while making it tight at the
    /// exact prox.
    fn residual_subgradient(&self, candidate: &[F], anchor: &[F], gamma: F) -> Vec<F> {
        let _ = (anchor, gamma);
        self.subgradient_select(candidate)
    }

    /// Strong-convexity modulus `sigma` of `U` (zero only for internal
    /// nonsmooth parts; sampling targets must be strictly positive).
    fn strong_convexity(&self) -> F;

    /// Closed-form `prox_U^gamma(anchor)` when the potential has one.
    fn exact_prox(&self, _anchor: &[F], _gamma: F) -> Option<Vec<F>> {
        None
    }

    /// `grad f(x)` of the smooth part when a splitting `U = f + g` is exposed.
    fn smooth_part_gradient(&self, _x: &[F]) -> Option<Vec<F>> {
        None
    }

    /// Closed-form `prox_g^t(v)` of the nonsmooth part, when it has one.
    fn nonsmooth_prox_closed(&self, _v: &[F], _t: F) -> Option<Vec<F>> {
        None
    }

    /// The nonsmooth part `g` as a standalone potential, for inexact g-prox
    /// solves when no closed form exists.
    fn nonsmooth_part(&self) -> Option<&dyn CompositePotential<F>> {
        None
    }
}

/// `U(x)`; spec-level free function over the trait.
pub fn value<F: Scalar>(potential: &dyn CompositePotential<F>, x: &[F]) -> F {
    potential.value(x)
}

/// Deterministic subgradient selection.
pub fn subgradient_select<F: Scalar>(potential: &dyn CompositePotential<F>, x: &[F]) -> Vec<F> {
    potential.subgradient_select(x)
}

/// Closed-form prox when available.
pub fn exact_prox<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    x: &[F],
    gamma: F,
) -> Option<Vec<F>> {
    potential.exact_prox(x, gamma)
}

#[cfg(test)]
pub(crate) mod convexity_checks {
    use super::*;
    use crate::linalg;
    use crate::rng::{stream_rng, STREAM_AUX};
    use crate::scalar::Scalar;

    /// Asserts the strong-convexity inequality and subgradient validity of
    /// `potential` on random pairs drawn from `N(0, scale^2 I)`.
    pub fn assert_strongly_convex<F: Scalar>(
        potential: &dyn CompositePotential<F>,
        scale: f64,
        trials: usize,
        seed: u64,
        tol: f64,
    ) {
        let n = potential.dimension();
        let mut rng = stream_rng(seed, STREAM_AUX);
        let sigma = potential.strong_convexity();
        for trial in 0..trials {
            let x: Vec<F> = (0..n)
                .map(|_| F::standard_normal(&mut rng) * F::cast(scale))
                .collect();
            let z: Vec<F> = (0..n)
                .map(|_| F::standard_normal(&mut rng) * F::cast(scale))
                .collect();
            // Subgradient inequality with the strong-convexity correction:
            // U(z) >= U(x) + <u, z - x> + sigma/2 ||z - x||^2.
            let u = potential.subgradient_select(&x);
            let diff: Vec<F> = z.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            let lhs = potential.value(&z);
            let rhs = potential.value(&x)
                + linalg::dot(&u, &diff)
                + sigma / F::cast(2.0) * linalg::norm_squared(&diff);
            assert!(
                lhs >= rhs - F::cast(tol),
                "strong subgradient inequality failed at trial {trial}: lhs={lhs}, rhs={rhs}"
            );
        }
    }
}
