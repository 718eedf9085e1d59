//! Isotropic quadratic potential `U(x) = (sigma/2) ||x - c||^2`.
//!
//! Everything about this potential is closed-form, including its envelope:
//!
//! * `prox_U^gamma(x) = (x + gamma sigma c) / (1 + gamma sigma)`
//! * `U_gamma(x) = sigma / (2 (1 + gamma sigma)) ||x - c||^2`
//! * `grad U_gamma(x) = m_gamma (x - c)` with `m_gamma = sigma / (1 + gamma sigma)`
//!
//! which makes it the oracle fixture for every envelope identity and for the
//! statistical checks (the envelope target is exactly Gaussian).

use super::CompositePotential;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct QuadraticPotential<F> {
    sigma: F,
    center: Vec<F>,
}

impl<F: Scalar> QuadraticPotential<F> {
    pub fn new(sigma: F, center: Vec<F>) -> Result<Self> {
        if !(sigma.is_finite() && sigma > F::zero()) {
            return Err(Error::invalid("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        if center.is_empty() {
            return Err(Error::invalid("center", "must be nonempty"));
        }
        Ok(QuadraticPotential { sigma, center })
    }

    /// Center `c` at which `U` attains its minimum 0.
    pub fn center(&self) -> &[F] {
        &self.center
    }

    pub fn sigma(&self) -> F {
        self.sigma
    }

    /// Envelope strong-convexity modulus `m_gamma = sigma / (1 + gamma sigma)`.
    pub fn envelope_modulus(&self, gamma: F) -> F {
        self.sigma / (F::one() + gamma * self.sigma)
    }

    /// Closed-form `U_gamma(x)`.
    pub fn envelope_value(&self, x: &[F], gamma: F) -> F {
        let half = F::cast(0.5);
        half * self.envelope_modulus(gamma) * linalg::distance_squared(x, &self.center)
    }

    /// Closed-form `grad U_gamma(x) = m_gamma (x - c)`.
    pub fn envelope_gradient(&self, x: &[F], gamma: F) -> Vec<F> {
        let m = self.envelope_modulus(gamma);
        x.iter().zip(&self.center).map(|(&xi, &ci)| m * (xi - ci)).collect()
    }
}

impl<F: Scalar> CompositePotential<F> for QuadraticPotential<F> {
    fn dimension(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.center.len(), "quadratic potential: state dimension");
        F::cast(0.5) * self.sigma * linalg::distance_squared(x, &self.center)
    }

    fn subgradient_select(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.center.len(), "quadratic potential: state dimension");
        x.iter().zip(&self.center).map(|(&xi, &ci)| self.sigma * (xi - ci)).collect()
    }

    fn strong_convexity(&self) -> F {
        self.sigma
    }

    fn exact_prox(&self, anchor: &[F], gamma: F) -> Option<Vec<F>> {
        let gs = gamma * self.sigma;
        let denom = F::one() + gs;
        Some(
            anchor
                .iter()
                .zip(&self.center)
                .map(|(&xi, &ci)| (xi + gs * ci) / denom)
                .collect(),
        )
    }

    fn smooth_part_gradient(&self, x: &[F]) -> Option<Vec<F>> {
        Some(self.subgradient_select(x))
    }

    fn nonsmooth_prox_closed(&self, v: &[F], _t: F) -> Option<Vec<F>> {
        // g == 0, so its prox is the identity.
        Some(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot() -> QuadraticPotential<f64> {
        QuadraticPotential::new(1.0, vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn value_matches_closed_form() {
        let p = QuadraticPotential::new(2.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(p.value(&[1.0, 1.0]), 2.0);
    }

    #[test]
    fn prox_shrinks_toward_center() {
        let p = pot();
        let y = p.exact_prox(&[2.0, 0.0], 1.0).unwrap();
        assert_eq!(y, vec![1.0, 0.0]);
    }

    #[test]
    fn prox_with_offset_center() {
        let p = QuadraticPotential::new(1.0, vec![3.0f64]).unwrap();
        let y = p.exact_prox(&[0.0], 1.0).unwrap();
        assert!((y[0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn envelope_closed_forms_agree_with_definition() {
        // U_gamma(x) = min_y U(y) + ||x-y||^2/(2 gamma), attained at the prox.
        let p = QuadraticPotential::new(0.7, vec![0.4, -1.1, 2.0]).unwrap();
        let x = [1.0f64, 2.0, -0.5];
        for &gamma in &[0.1, 1.0, 10.0] {
            let y = p.exact_prox(&x, gamma).unwrap();
            let direct = p.value(&y) + linalg::distance_squared(&x, &y) / (2.0 * gamma);
            assert!(
                (direct - p.envelope_value(&x, gamma)).abs() < 1e-12,
                "gamma={gamma}: direct={direct}, closed={}",
                p.envelope_value(&x, gamma)
            );
            let g = p.envelope_gradient(&x, gamma);
            for (i, gi) in g.iter().enumerate() {
                let expected = (x[i] - y[i]) / gamma;
                assert!((gi - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_sigma() {
        assert!(QuadraticPotential::new(0.0, vec![1.0]).is_err());
        assert!(QuadraticPotential::new(-1.0, vec![1.0]).is_err());
    }

    #[test]
    fn strong_convexity_inequality_holds() {
        let p = QuadraticPotential::new(1.3, vec![0.2, 0.4, -0.6, 1.0]).unwrap();
        crate::potentials::convexity_checks::assert_strongly_convex(&p, 2.0, 200, 11, 1e-10);
    }
}
