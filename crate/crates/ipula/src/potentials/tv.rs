//! Anisotropic total variation and the deblurring potential built on it.
//!
//! `TV(x) = sum |x[i, j+1] - x[i, j]| + |x[i+1, j] - x[i, j]|` over all
//! pixels with periodic wrap in both directions (consistent with the FFT
//! blur). The subgradient selection applies `sign` edgewise with
//! `sign(0) = 0` and accumulates the signed divergence per pixel.

use rustfft::FftNum;

use super::{BlurOperator, CompositePotential};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Periodic anisotropic TV seminorm of a row-major `width x height` image.
pub fn tv_seminorm<F: Scalar>(x: &[F], width: usize, height: usize) -> F {
    assert_eq!(x.len(), width * height, "tv: image size");
    let mut acc = linalg::KahanSum::default();
    for i in 0..height {
        let below = if i + 1 == height { 0 } else { i + 1 };
        for j in 0..width {
            let right = if j + 1 == width { 0 } else { j + 1 };
            let c = x[i * width + j];
            acc.add((x[i * width + right] - c).abs());
            acc.add((x[below * width + j] - c).abs());
        }
    }
    acc.value()
}

/// Subgradient of [`tv_seminorm`] with the edgewise `sign(0) = 0` selection.
pub fn tv_subgradient<F: Scalar>(x: &[F], width: usize, height: usize) -> Vec<F> {
    assert_eq!(x.len(), width * height, "tv: image size");
    let sgn = |v: F| {
        if v > F::zero() {
            F::one()
        } else if v < F::zero() {
            -F::one()
        } else {
            F::zero()
        }
    };
    let mut g = vec![F::zero(); width * height];
    for i in 0..height {
        let below = if i + 1 == height { 0 } else { i + 1 };
        for j in 0..width {
            let right = if j + 1 == width { 0 } else { j + 1 };
            let p = i * width + j;
            // Each edge difference d = x[q] - x[p] contributes -sign(d) to
            // pixel p and +sign(d) to pixel q.
            let dh = sgn(x[i * width + right] - x[p]);
            g[p] -= dh;
            g[i * width + right] += dh;
            let dv = sgn(x[below * width + j] - x[p]);
            g[p] -= dv;
            g[below * width + j] += dv;
        }
    }
    g
}

/// `lambda_tv TV(x) + (lambda_2 / 2) ||x||^2`: the nonsmooth part of the
/// deblurring potential, usable on its own as a prox target.
#[derive(Clone, Debug)]
pub struct TvRidgePotential<F> {
    tv_weight: F,
    tikhonov_weight: F,
    width: usize,
    height: usize,
}

impl<F: Scalar> TvRidgePotential<F> {
    pub fn new(tv_weight: F, tikhonov_weight: F, width: usize, height: usize) -> Result<Self> {
        if !(tv_weight.is_finite() && tv_weight >= F::zero()) {
            return Err(Error::invalid("tv_weight", format!("must be >= 0, got {tv_weight}")));
        }
        if !(tikhonov_weight.is_finite() && tikhonov_weight >= F::zero()) {
            return Err(Error::invalid(
                "tikhonov_weight",
                format!("must be >= 0, got {tikhonov_weight}"),
            ));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("width/height", "must be >= 1"));
        }
        Ok(TvRidgePotential { tv_weight, tikhonov_weight, width, height })
    }

    pub fn tv_weight(&self) -> F {
        self.tv_weight
    }

    pub fn tikhonov_weight(&self) -> F {
        self.tikhonov_weight
    }
}

impl<F: Scalar> CompositePotential<F> for TvRidgePotential<F> {
    fn dimension(&self) -> usize {
        self.width * self.height
    }

    fn value(&self, x: &[F]) -> F {
        let half = F::cast(0.5);
        self.tv_weight * tv_seminorm(x, self.width, self.height)
            + half * self.tikhonov_weight * linalg::norm_squared(x)
    }

    fn subgradient_select(&self, x: &[F]) -> Vec<F> {
        let mut g = tv_subgradient(x, self.width, self.height);
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi = *gi * self.tv_weight + self.tikhonov_weight * xi;
        }
        g
    }

    fn strong_convexity(&self) -> F {
        self.tikhonov_weight
    }

    fn exact_prox(&self, anchor: &[F], gamma: F) -> Option<Vec<F>> {
        if self.tv_weight == F::zero() {
            let denom = F::one() + gamma * self.tikhonov_weight;
            Some(anchor.iter().map(|&v| v / denom).collect())
        } else {
            None
        }
    }

    fn smooth_part_gradient(&self, x: &[F]) -> Option<Vec<F>> {
        Some(x.iter().map(|&v| self.tikhonov_weight * v).collect())
    }

    fn nonsmooth_prox_closed(&self, v: &[F], _t: F) -> Option<Vec<F>> {
        if self.tv_weight == F::zero() {
            Some(v.to_vec())
        } else {
            None
        }
    }
}

/// Deblurring potential
/// `U(x) = ||Hx - y||^2 / (2 sigma^2) + lambda_tv TV(x) + (lambda_2/2) ||x||^2`.
///
/// The smooth part is the data-fit term; TV plus ridge form the nonsmooth
/// part `g` handed to splitting baselines. No closed-form prox exists, so the
/// full-potential prox is only available through the inner solver.
pub struct TvDeblurPotential<F: Scalar + FftNum> {
    blur: BlurOperator<F>,
    observation: Vec<F>,
    noise_variance: F,
    g: TvRidgePotential<F>,
}

impl<F: Scalar + FftNum> TvDeblurPotential<F> {
    pub fn new(
        blur: BlurOperator<F>,
        observation: Vec<F>,
        noise_variance: F,
        tv_weight: F,
        tikhonov_weight: F,
    ) -> Result<Self> {
        let n = blur.width() * blur.height();
        if observation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: observation.len() });
        }
        if !(noise_variance.is_finite() && noise_variance > F::zero()) {
            return Err(Error::invalid(
                "noise_variance",
                format!("must be finite and > 0, got {noise_variance}"),
            ));
        }
        if !(tikhonov_weight.is_finite() && tikhonov_weight > F::zero()) {
            return Err(Error::invalid(
                "tikhonov_weight",
                format!("must be > 0 for a strongly convex target, got {tikhonov_weight}"),
            ));
        }
        let g = TvRidgePotential::new(tv_weight, tikhonov_weight, blur.width(), blur.height())?;
        Ok(TvDeblurPotential { blur, observation, noise_variance, g })
    }

    pub fn blur(&self) -> &BlurOperator<F> {
        &self.blur
    }

    pub fn observation(&self) -> &[F] {
        &self.observation
    }

    pub fn noise_variance(&self) -> F {
        self.noise_variance
    }

    pub fn nonsmooth(&self) -> &TvRidgePotential<F> {
        &self.g
    }

    /// `H^T (Hx - y) / sigma^2`.
    fn data_gradient(&self, x: &[F]) -> Vec<F> {
        let mut r = self.blur.apply(x);
        for (ri, &yi) in r.iter_mut().zip(&self.observation) {
            *ri -= yi;
        }
        let mut g = self.blur.adjoint(&r);
        for gi in g.iter_mut() {
            *gi /= self.noise_variance;
        }
        g
    }
}

impl<F: Scalar + FftNum> CompositePotential<F> for TvDeblurPotential<F> {
    fn dimension(&self) -> usize {
        self.observation.len()
    }

    fn value(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.observation.len(), "tv deblur: state dimension");
        let residual = self.blur.apply(x);
        let half = F::cast(0.5);
        let data = linalg::distance_squared(&residual, &self.observation)
            / (F::cast(2.0) * self.noise_variance);
        data + self.g.tv_weight() * tv_seminorm(x, self.blur.width(), self.blur.height())
            + half * self.g.tikhonov_weight() * linalg::norm_squared(x)
    }

    fn subgradient_select(&self, x: &[F]) -> Vec<F> {
        let mut g = self.data_gradient(x);
        let gpart = self.g.subgradient_select(x);
        for (gi, pi) in g.iter_mut().zip(gpart) {
            *gi += pi;
        }
        g
    }

    fn strong_convexity(&self) -> F {
        self.g.tikhonov_weight()
    }

    fn smooth_part_gradient(&self, x: &[F]) -> Option<Vec<F>> {
        Some(self.data_gradient(x))
    }

    fn nonsmooth_prox_closed(&self, v: &[F], t: F) -> Option<Vec<F>> {
        self.g.nonsmooth_prox_closed(v, t).map(|_| {
            let denom = F::one() + t * self.g.tikhonov_weight();
            v.iter().map(|&vi| vi / denom).collect()
        })
    }

    fn nonsmooth_part(&self) -> Option<&dyn CompositePotential<F>> {
        Some(&self.g)
    }
}
