//! Elastic-net potential `U(x) = lambda ||x||_1 + (s/2) ||x||^2`.
//!
//! Strongly convex with modulus `s`, nonsmooth on the coordinate hyperplanes,
//! and still fully solvable in closed form:
//! `prox_U^gamma(x)_i = soft(x_i, gamma lambda) / (1 + gamma s)`.
//! That combination (kinks plus an exact prox to compare against) is what the
//! residual-soundness checks are built on.

use super::CompositePotential;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `soft(x, t) = sign(x) max(|x| - t, 0)`.
pub fn soft_threshold<F: Scalar>(x: F, t: F) -> F {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        F::zero()
    }
}

#[derive(Clone, Debug)]
pub struct ElasticNetPotential<F> {
    l1_weight: F,
    quad_weight: F,
    dimension: usize,
}

impl<F: Scalar> ElasticNetPotential<F> {
    pub fn new(l1_weight: F, quad_weight: F, dimension: usize) -> Result<Self> {
        if !(l1_weight.is_finite() && l1_weight >= F::zero()) {
            return Err(Error::invalid("l1_weight", format!("must be >= 0, got {l1_weight}")));
        }
        if !(quad_weight.is_finite() && quad_weight > F::zero()) {
            return Err(Error::invalid("quad_weight", format!("must be > 0, got {quad_weight}")));
        }
        if dimension == 0 {
            return Err(Error::invalid("dimension", "must be >= 1"));
        }
        Ok(ElasticNetPotential { l1_weight, quad_weight, dimension })
    }

    pub fn l1_weight(&self) -> F {
        self.l1_weight
    }

    pub fn quad_weight(&self) -> F {
        self.quad_weight
    }
}

impl<F: Scalar> CompositePotential<F> for ElasticNetPotential<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.dimension, "elastic net: state dimension");
        let half = F::cast(0.5);
        let mut acc = crate::linalg::KahanSum::default();
        for &xi in x {
            acc.add(self.l1_weight * xi.abs() + half * self.quad_weight * xi * xi);
        }
        acc.value()
    }

    fn subgradient_select(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.dimension, "elastic net: state dimension");
        x.iter()
            .map(|&xi| {
                let sign = if xi > F::zero() {
                    F::one()
                } else if xi < F::zero() {
                    -F::one()
                } else {
                    F::zero()
                };
                self.l1_weight * sign + self.quad_weight * xi
            })
            .collect()
    }

    fn residual_subgradient(&self, candidate: &[F], anchor: &[F], gamma: F) -> Vec<F> {
        assert_eq!(candidate.len(), self.dimension, "elastic net: candidate dimension");
        assert_eq!(anchor.len(), self.dimension, "elastic net: anchor dimension");
        candidate
            .iter()
            .zip(anchor)
            .map(|(&yi, &xi)| {
                if yi == F::zero() {
                    // Subdifferential is [-lambda, lambda]; pick the element
                    // cancelling the anchor term as far as possible.
                    let target = (xi - yi) / gamma;
                    num_traits::clamp(target, -self.l1_weight, self.l1_weight)
                } else {
                    let sign = if yi > F::zero() { F::one() } else { -F::one() };
                    self.l1_weight * sign + self.quad_weight * yi
                }
            })
            .collect()
    }

    fn strong_convexity(&self) -> F {
        self.quad_weight
    }

    fn exact_prox(&self, anchor: &[F], gamma: F) -> Option<Vec<F>> {
        let denom = F::one() + gamma * self.quad_weight;
        Some(
            anchor
                .iter()
                .map(|&xi| soft_threshold(xi, gamma * self.l1_weight) / denom)
                .collect(),
        )
    }

    fn smooth_part_gradient(&self, x: &[F]) -> Option<Vec<F>> {
        Some(x.iter().map(|&xi| self.quad_weight * xi).collect())
    }

    fn nonsmooth_prox_closed(&self, v: &[F], t: F) -> Option<Vec<F>> {
        Some(v.iter().map(|&vi| soft_threshold(vi, t * self.l1_weight)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot() -> ElasticNetPotential<f64> {
        ElasticNetPotential::new(1.0, 1.0, 2).unwrap()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
    }

    #[test]
    fn subgradient_uses_zero_at_kinks() {
        let p = pot();
        assert_eq!(p.subgradient_select(&[0.0, 2.0]), vec![0.0, 3.0]);
    }

    #[test]
    fn prox_matches_componentwise_formula() {
        let p = ElasticNetPotential::new(1.0, 1.0, 1).unwrap();
        assert_eq!(p.exact_prox(&[3.0], 1.0).unwrap(), vec![1.0]);
        assert_eq!(p.exact_prox(&[0.5], 1.0).unwrap(), vec![0.0]);
        assert_eq!(p.exact_prox(&[-3.0], 1.0).unwrap(), vec![-1.0]);
    }

    #[test]
    fn residual_subgradient_is_exact_at_the_prox() {
        // At the exact prox the anchored selection must certify optimality,
        // including on dead-zone components where the iterate sits at 0.
        let p = ElasticNetPotential::new(1.0, 1.0, 4).unwrap();
        let anchor = [3.0f64, 0.5, -0.25, -4.0];
        let gamma = 1.0;
        let y = p.exact_prox(&anchor, gamma).unwrap();
        let u = p.residual_subgradient(&y, &anchor, gamma);
        for i in 0..4 {
            let r = u[i] + (y[i] - anchor[i]) / gamma;
            assert!(r.abs() <= 1e-12, "component {i}: residual {r}");
        }
    }

    #[test]
    fn residual_subgradient_matches_plain_selection_off_kinks() {
        let p = pot();
        let candidate = [0.9, -1.4];
        let anchor = [3.0, 3.0];
        assert_eq!(p.residual_subgradient(&candidate, &anchor, 1.0), p.subgradient_select(&candidate));
    }

    #[test]
    fn value_in_f32_instantiates() {
        let p: ElasticNetPotential<f32> = ElasticNetPotential::new(1.0, 1.0, 2).unwrap();
        assert!((p.value(&[1.0, -1.0]) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn strong_convexity_inequality_holds() {
        let p = ElasticNetPotential::new(0.8, 1.2, 5).unwrap();
        crate::potentials::convexity_checks::assert_strongly_convex(&p, 1.5, 200, 13, 1e-10);
    }
}
