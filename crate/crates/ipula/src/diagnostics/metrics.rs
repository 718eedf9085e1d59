//! Statistical metrics: PSNR, single-scale SSIM, autocorrelation, and a 1-D
//! quantile Wasserstein distance.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ensure_dimension, Error, Result};
use crate::linalg::KahanSum;
use crate::scalar::Scalar;

/// Peak signal-to-noise ratio in dB: `10 log10(peak^2 / MSE)`.
///
/// Returns `+inf` when the images are identical (zero MSE).
pub fn psnr<F: Scalar>(reference: &[F], candidate: &[F], peak: F) -> Result<F> {
    ensure_dimension(reference.len(), candidate.len())?;
    if reference.is_empty() {
        return Err(Error::invalid("reference", "must be nonempty"));
    }
    if !(peak.is_finite() && peak > F::zero()) {
        return Err(Error::invalid("peak", format!("must be finite and > 0, got {peak}")));
    }
    let mut sum = KahanSum::new();
    for (&r, &c) in reference.iter().zip(candidate) {
        let d = r - c;
        sum.add(d * d);
    }
    let mse = sum.value() / F::cast(reference.len() as f64);
    if mse == F::zero() {
        return Ok(F::infinity());
    }
    Ok(F::cast(10.0) * (peak * peak / mse).log10())
}

/// Parameters of the single-scale SSIM index.
#[derive(Clone, Copy, Debug)]
pub struct SsimConfig<F> {
    /// Side length of the square uniform window (only fully interior
    /// windows are scored).
    pub window: usize,
    pub k1: F,
    pub k2: F,
    pub peak: F,
}

impl<F: Scalar> Default for SsimConfig<F> {
    fn default() -> Self {
        SsimConfig { window: 7, k1: F::cast(0.01), k2: F::cast(0.03), peak: F::one() }
    }
}

/// Summed-area table with a one-row/one-column zero border.
fn integral_image<F: Scalar>(v: impl Fn(usize) -> F, width: usize, height: usize) -> Vec<F> {
    let w1 = width + 1;
    let mut s = vec![F::zero(); w1 * (height + 1)];
    for i in 0..height {
        let mut row = F::zero();
        for j in 0..width {
            row += v(i * width + j);
            s[(i + 1) * w1 + (j + 1)] = s[i * w1 + (j + 1)] + row;
        }
    }
    s
}

fn window_sum<F: Scalar>(s: &[F], w1: usize, i: usize, j: usize, d: usize) -> F {
    s[(i + d) * w1 + (j + d)] - s[i * w1 + (j + d)] - s[(i + d) * w1 + j] + s[i * w1 + j]
}

/// Mean single-scale SSIM over all fully interior `window x window` patches
/// (uniform weights, biased moment estimates). Symmetric in its arguments;
/// 1 for identical images, negative for anticorrelated ones.
pub fn ssim<F: Scalar>(
    reference: &[F],
    candidate: &[F],
    width: usize,
    height: usize,
    config: &SsimConfig<F>,
) -> Result<F> {
    ensure_dimension(width * height, reference.len())?;
    ensure_dimension(width * height, candidate.len())?;
    let d = config.window;
    if d == 0 || d > width || d > height {
        return Err(Error::invalid(
            "window",
            format!("must be in [1, min(width, height)] = [1, {}], got {d}", width.min(height)),
        ));
    }
    if !(config.peak.is_finite() && config.peak > F::zero()) {
        return Err(Error::invalid("peak", "must be finite and > 0"));
    }

    let c1 = (config.k1 * config.peak) * (config.k1 * config.peak);
    let c2 = (config.k2 * config.peak) * (config.k2 * config.peak);
    let w1 = width + 1;
    let sx = integral_image(|i| reference[i], width, height);
    let sy = integral_image(|i| candidate[i], width, height);
    let sxx = integral_image(|i| reference[i] * reference[i], width, height);
    let syy = integral_image(|i| candidate[i] * candidate[i], width, height);
    let sxy = integral_image(|i| reference[i] * candidate[i], width, height);

    let n = F::cast((d * d) as f64);
    let mut total = KahanSum::new();
    let mut count = 0usize;
    for i in 0..=(height - d) {
        for j in 0..=(width - d) {
            let mx = window_sum(&sx, w1, i, j, d) / n;
            let my = window_sum(&sy, w1, i, j, d) / n;
            let vx = window_sum(&sxx, w1, i, j, d) / n - mx * mx;
            let vy = window_sum(&syy, w1, i, j, d) / n - my * my;
            let cov = window_sum(&sxy, w1, i, j, d) / n - mx * my;
            let two = F::cast(2.0);
            let value = ((two * mx * my + c1) * (two * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            total.add(value);
            count += 1;
        }
    }
    Ok(total.value() / F::cast(count as f64))
}

/// Biased sample autocorrelation of a mean-removed series, normalized so
/// lag 0 equals exactly 1. Returns `max_lag + 1` values.
pub fn acf<F: Scalar>(series: &[F], max_lag: usize) -> Result<Vec<F>> {
    if series.len() < 2 {
        return Err(Error::invalid("series", "need at least 2 observations"));
    }
    if max_lag == 0 || max_lag >= series.len() {
        return Err(Error::invalid(
            "max_lag",
            format!("must be in [1, {}], got {max_lag}", series.len() - 1),
        ));
    }
    let n = series.len();
    let mut mean_sum = KahanSum::new();
    for &v in series {
        mean_sum.add(v);
    }
    let mean = mean_sum.value() / F::cast(n as f64);
    let centered: Vec<F> = series.iter().map(|&v| v - mean).collect();

    let mut raw = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let mut s = KahanSum::new();
        for t in 0..n - lag {
            s.add(centered[t] * centered[t + lag]);
        }
        raw.push(s.value());
    }
    let denom = raw[0];
    if !(denom.is_finite() && denom > F::zero()) {
        return Err(Error::ConstantSeries);
    }
    Ok(raw.into_iter().map(|v| v / denom).collect())
}

/// Quantile-based 1-D Wasserstein-2 distance between an empirical sample and
/// `N(mean, variance)`: sorted samples are matched against the Gaussian
/// quantiles at `(i + 1/2) / N`.
pub fn quantile_w2_gaussian<F: Scalar>(samples: &[F], mean: F, variance: F) -> Result<F> {
    if samples.len() < 2 {
        return Err(Error::invalid("samples", "need at least 2 observations"));
    }
    if !(variance.is_finite() && variance > F::zero()) {
        return Err(Error::invalid("variance", format!("must be finite and > 0, got {variance}")));
    }
    let mut sorted: Vec<f64> = Vec::with_capacity(samples.len());
    for &s in samples {
        let v = s.to_f64_lossy();
        if !v.is_finite() {
            return Err(Error::invalid("samples", "must be finite"));
        }
        sorted.push(v);
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));

    let normal = Normal::new(0.0, 1.0).expect("standard normal parameters are valid");
    let mu = mean.to_f64_lossy();
    let std = variance.to_f64_lossy().sqrt();
    let n = sorted.len();
    let mut sum = KahanSum::new();
    for (i, &x) in sorted.iter().enumerate() {
        let p = (i as f64 + 0.5) / n as f64;
        let target = mu + std * normal.inverse_cdf(p);
        let d = x - target;
        sum.add(d * d);
    }
    Ok(F::cast((sum.value() / n as f64).sqrt()))
}

/// Mean and standard error of a replica-indexed sample.
#[derive(Clone, Copy, Debug)]
pub struct MeanSe<F> {
    pub mean: F,
    pub se: F,
}

/// Sample mean and Monte Carlo standard error (`sd / sqrt(n)`, unbiased
/// variance). Compensated summation keeps the result independent of how the
/// replica values were gathered.
pub fn mean_and_standard_error<F: Scalar>(values: &[F]) -> Result<MeanSe<F>> {
    if values.len() < 2 {
        return Err(Error::invalid("values", "need at least 2 replicas"));
    }
    let n = F::cast(values.len() as f64);
    let mut s = KahanSum::new();
    for &v in values {
        s.add(v);
    }
    let mean = s.value() / n;
    let mut sq = KahanSum::new();
    for &v in values {
        let d = v - mean;
        sq.add(d * d);
    }
    let var = sq.value() / (n - F::one());
    Ok(MeanSe { mean, se: (var / n).sqrt() })
}
