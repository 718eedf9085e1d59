//! Deblurring-experiment plumbing: grayscale images, a bundled synthetic
//! phantom, BSNR-calibrated degradation, and Wiener-deconvolution
//! initialization.
//!
//! Images are row-major with values nominally in `[0, 1]`. The phantom is
//! pure arithmetic (no RNG, no tables loaded from disk), so experiments run
//! with no external downloads and are byte-identical across runs.

mod io;

pub use io::{load_image, save_image, BitDepth};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, KahanSum};
use crate::potentials::BlurOperator;
use crate::rng::{stream_rng, STREAM_DEGRADATION};
use crate::scalar::Scalar;
use rustfft::FftNum;

/// Row-major grayscale image with values nominally in `[0, 1]`.
///
/// Observations produced by [`degrade`] may leave the nominal range (noise is
/// not clamped); only saving quantizes and clamps.
#[derive(Clone, Debug, PartialEq)]
pub struct Image<F> {
    width: usize,
    height: usize,
    pixels: Vec<F>,
}

impl<F: Scalar> Image<F> {
    pub fn new(width: usize, height: usize, pixels: Vec<F>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("width/height", "must be >= 1"));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch { expected: width * height, got: pixels.len() });
        }
        if !all_finite(&pixels) {
            return Err(Error::invalid("pixels", "must all be finite"));
        }
        Ok(Image { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> F) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        Image::new(width, height, pixels)
    }

    pub fn constant(width: usize, height: usize, value: F) -> Result<Self> {
        Image::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[F] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<F> {
        self.pixels
    }

    pub fn min_max(&self) -> (F, F) {
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for &p in &self.pixels {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }

    /// `max - min`, the default PSNR peak.
    pub fn dynamic_range(&self) -> F {
        let (lo, hi) = self.min_max();
        hi - lo
    }
}

/// One additive ellipse of the phantom: intensity, semi-axes, center, and
/// the rotation's cosine/sine (stored as literals so the image is identical
/// across platforms).
struct PhantomEllipse {
    intensity: f64,
    a: f64,
    b: f64,
    x0: f64,
    y0: f64,
    cos_phi: f64,
    sin_phi: f64,
}

const COS_18_DEG: f64 = 0.9510565162951535;
const SIN_18_DEG: f64 = 0.30901699437494745;

/// The classic ten-ellipse head layout with soft-tissue-scale intensities.
const PHANTOM_ELLIPSES: [PhantomEllipse; 10] = [
    PhantomEllipse { intensity: 1.0, a: 0.69, b: 0.92, x0: 0.0, y0: 0.0, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: -0.8, a: 0.6624, b: 0.874, x0: 0.0, y0: -0.0184, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: -0.2, a: 0.11, b: 0.31, x0: 0.22, y0: 0.0, cos_phi: COS_18_DEG, sin_phi: -SIN_18_DEG },
    PhantomEllipse { intensity: -0.2, a: 0.16, b: 0.41, x0: -0.22, y0: 0.0, cos_phi: COS_18_DEG, sin_phi: SIN_18_DEG },
    PhantomEllipse { intensity: 0.1, a: 0.21, b: 0.25, x0: 0.0, y0: 0.35, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: 0.1, a: 0.046, b: 0.046, x0: 0.0, y0: 0.1, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: 0.1, a: 0.046, b: 0.046, x0: 0.0, y0: -0.1, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: 0.1, a: 0.046, b: 0.023, x0: -0.08, y0: -0.605, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: 0.1, a: 0.023, b: 0.023, x0: 0.0, y0: -0.606, cos_phi: 1.0, sin_phi: 0.0 },
    PhantomEllipse { intensity: 0.1, a: 0.023, b: 0.046, x0: 0.06, y0: -0.605, cos_phi: 1.0, sin_phi: 0.0 },
];

/// Deterministic piecewise-constant ellipse phantom with a smooth radial
/// gradient inside the skull; dynamic range `[0, 1]`, background 0.
pub fn phantom<F: Scalar>(width: usize, height: usize) -> Result<Image<F>> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("width/height", "must be >= 1"));
    }
    let mut pixels = Vec::with_capacity(width * height);
    for i in 0..height {
        // Pixel centers mapped to [-1, 1]^2 with y increasing upward.
        let y = (height as f64 - 2.0 * (i as f64 + 0.5)) / height as f64;
        for j in 0..width {
            let x = (2.0 * (j as f64 + 0.5) - width as f64) / width as f64;
            let mut v = 0.0f64;
            for e in &PHANTOM_ELLIPSES {
                let dx = x - e.x0;
                let dy = y - e.y0;
                let u = dx * e.cos_phi + dy * e.sin_phi;
                let w = -dx * e.sin_phi + dy * e.cos_phi;
                let q = (u / e.a) * (u / e.a) + (w / e.b) * (w / e.b);
                if q <= 1.0 {
                    v += e.intensity;
                }
            }
            // Smooth interior gradient inside the skull so total variation is
            // not concentrated on edges alone.
            let skull = &PHANTOM_ELLIPSES[0];
            let q0 = (x / skull.a) * (x / skull.a) + (y / skull.b) * (y / skull.b);
            if q0 <= 1.0 {
                v += 0.05 * (1.0 - q0);
            }
            pixels.push(F::cast(v.clamp(0.0, 1.0)));
        }
    }
    Image::new(width, height, pixels)
}

/// Blur + noise settings for [`degrade`].
#[derive(Clone, Copy, Debug)]
pub struct DegradationConfig<F> {
    /// Box-blur side length; odd so the stencil is centered.
    pub kernel_size: usize,
    /// Blurred signal-to-noise ratio in dB. `+inf` disables noise.
    pub bsnr_db: F,
    pub noise_seed: u64,
}

impl<F: Scalar> Default for DegradationConfig<F> {
    fn default() -> Self {
        DegradationConfig { kernel_size: 5, bsnr_db: F::cast(40.0), noise_seed: 0 }
    }
}

impl<F: Scalar> DegradationConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_size == 0 || self.kernel_size % 2 == 0 {
            return Err(Error::invalid(
                "kernel_size",
                format!("must be odd and >= 1, got {}", self.kernel_size),
            ));
        }
        if self.bsnr_db.is_nan() {
            return Err(Error::invalid("bsnr_db", "must not be NaN"));
        }
        Ok(())
    }
}

/// Unbiased pixelwise sample variance.
fn sample_variance<F: Scalar>(values: &[F]) -> F {
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
    sq.value() / (n - F::one())
}

/// Blur the image and add seeded white Gaussian noise whose variance is set
/// from the requested BSNR: `sigma^2 = Var(Hx) / 10^(bsnr/10)`.
///
/// Returns the observation and the realized noise standard deviation so the
/// likelihood can plug it in. An infinite BSNR disables noise and returns
/// `sigma = 0`.
pub fn degrade<F: Scalar + FftNum>(
    image: &Image<F>,
    blur: &BlurOperator<F>,
    config: &DegradationConfig<F>,
) -> Result<(Image<F>, F)> {
    config.validate()?;
    if blur.width() != image.width() || blur.height() != image.height() {
        return Err(Error::DimensionMismatch {
            expected: blur.width() * blur.height(),
            got: image.width() * image.height(),
        });
    }
    let blurred = blur.apply(image.pixels());
    if self::is_infinite_bsnr(config.bsnr_db) {
        let observation = Image::new(image.width(), image.height(), blurred)?;
        return Ok((observation, F::zero()));
    }
    let variance = sample_variance(&blurred);
    if !(variance.is_finite() && variance > F::zero()) {
        return Err(Error::DegenerateBsnr(format!(
            "blurred image has sample variance {variance}; BSNR cannot set a noise level"
        )));
    }
    let noise_var = variance / F::cast(10.0).powf(config.bsnr_db / F::cast(10.0));
    let sigma = noise_var.sqrt();
    let mut rng = stream_rng(config.noise_seed, STREAM_DEGRADATION);
    let pixels: Vec<F> =
        blurred.into_iter().map(|b| b + sigma * F::standard_normal(&mut rng)).collect();
    let observation = Image::new(image.width(), image.height(), pixels)?;
    Ok((observation, sigma))
}

fn is_infinite_bsnr<F: Scalar>(bsnr: F) -> bool {
    bsnr.is_infinite() && bsnr > F::zero()
}

/// Default Wiener regularization derived from the BSNR:
/// `r = 10^(-bsnr/10)` (noise-to-signal variance ratio).
pub fn default_wiener_regularization<F: Scalar>(bsnr_db: F) -> F {
    if is_infinite_bsnr(bsnr_db) {
        F::zero()
    } else {
        F::cast(10.0).powf(-bsnr_db / F::cast(10.0))
    }
}

/// Unclamped linear Wiener deconvolution (test hook; covariant under global
/// intensity shifts of the observation).
pub fn wiener_filter<F: Scalar + FftNum>(
    observation: &Image<F>,
    blur: &BlurOperator<F>,
    regularization: F,
) -> Result<Vec<F>> {
    if blur.width() != observation.width() || blur.height() != observation.height() {
        return Err(Error::DimensionMismatch {
            expected: blur.width() * blur.height(),
            got: observation.width() * observation.height(),
        });
    }
    if !(regularization.is_finite() && regularization >= F::zero()) {
        return Err(Error::invalid(
            "regularization",
            format!("must be finite and >= 0, got {regularization}"),
        ));
    }
    Ok(blur.deconvolve(observation.pixels(), regularization))
}

/// Wiener-deconvolution initialization: the linear filter output clamped to
/// `[0, 1]`.
pub fn wiener_init<F: Scalar + FftNum>(
    observation: &Image<F>,
    blur: &BlurOperator<F>,
    regularization: F,
) -> Result<Image<F>> {
    let mut pixels = wiener_filter(observation, blur, regularization)?;
    for p in &mut pixels {
        *p = (*p).max(F::zero()).min(F::one());
    }
    Image::new(observation.width(), observation.height(), pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::psnr;
    use crate::potentials::tv_seminorm;

    #[test]
    fn image_validates_shape_and_finiteness() {
        assert!(Image::new(2, 2, vec![0.0f64; 4]).is_ok());
        assert!(matches!(
            Image::new(2, 2, vec![0.0f64; 3]),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
        assert!(Image::new(2, 2, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(Image::<f64>::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn phantom_is_deterministic_with_zero_corners() {
        let a = phantom::<f64>(128, 128).unwrap();
        let b = phantom::<f64>(128, 128).unwrap();
        assert_eq!(a, b);
        let px = a.pixels();
        let (w, h) = (a.width(), a.height());
        for &corner in &[0, w - 1, (h - 1) * w, h * w - 1] {
            assert_eq!(px[corner], 0.0);
        }
        let (lo, hi) = a.min_max();
        assert_eq!(lo, 0.0);
        assert!(hi <= 1.0 && hi > 0.9, "peak {hi}");
    }

    #[test]
    fn phantom_total_variation_regression() {
        let img = phantom::<f64>(128, 128).unwrap();
        let tv = tv_seminorm(img.pixels(), 128, 128);
        assert!(tv > 0.0);
        let pinned = 808.72645595705183;
        assert!(
            (tv - pinned).abs() < 1e-12,
            "phantom TV drifted: got {tv:.17}, pinned {pinned:.17}"
        );
    }

    #[test]
    fn phantom_has_smooth_interior_gradient() {
        let img = phantom::<f64>(128, 128).unwrap();
        let px = img.pixels();
        // Two nearby pixels inside the skull but within one flat region of the
        // piecewise-constant part still differ through the radial term.
        let center = px[64 * 128 + 64];
        let off = px[64 * 128 + 66];
        assert!(center != off, "interior should not be flat");
        assert!((center - off).abs() < 0.01, "gradient should be gentle");
    }

    #[test]
    fn degrade_matches_bsnr_definition() {
        let img = phantom::<f64>(64, 64).unwrap();
        let blur = BlurOperator::new_box(5, 64, 64).unwrap();
        let cfg = DegradationConfig { kernel_size: 5, bsnr_db: 40.0, noise_seed: 3 };
        let (obs, sigma) = degrade(&img, &blur, &cfg).unwrap();

        let blurred = blur.apply(img.pixels());
        let var = sample_variance(&blurred);
        assert!((sigma * sigma - var * 1e-4).abs() < 1e-15);

        // Realized BSNR within 0.2 dB of the request.
        let noise_var = {
            let diffs: Vec<f64> =
                obs.pixels().iter().zip(&blurred).map(|(&o, &b)| o - b).collect();
            sample_variance(&diffs)
        };
        let realized = 10.0 * (var / noise_var).log10();
        assert!((realized - 40.0).abs() < 0.2, "realized BSNR {realized}");
    }

    #[test]
    fn degrade_is_seeded_and_infinite_bsnr_is_noise_free() {
        let img = phantom::<f64>(32, 32).unwrap();
        let blur = BlurOperator::new_box(5, 32, 32).unwrap();
        let cfg = DegradationConfig { kernel_size: 5, bsnr_db: 30.0, noise_seed: 9 };
        let (a, sa) = degrade(&img, &blur, &cfg).unwrap();
        let (b, sb) = degrade(&img, &blur, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);

        let inf_cfg = DegradationConfig { bsnr_db: f64::INFINITY, ..cfg };
        let (clean, sigma) = degrade(&img, &blur, &inf_cfg).unwrap();
        assert_eq!(sigma, 0.0);
        let blurred = blur.apply(img.pixels());
        assert_eq!(clean.pixels(), &blurred[..]);
    }

    #[test]
    fn degrade_rejects_constant_images() {
        let img = Image::constant(16, 16, 0.5f64).unwrap();
        let blur = BlurOperator::new_box(3, 16, 16).unwrap();
        let cfg = DegradationConfig::default();
        assert!(matches!(degrade(&img, &blur, &cfg), Err(Error::DegenerateBsnr(_))));
    }

    #[test]
    fn wiener_identity_kernel_shrinks_observation() {
        let obs = Image::from_fn(8, 8, |i, j| 0.1 + 0.01 * (i * 8 + j) as f64).unwrap();
        let blur = BlurOperator::from_kernel(&[1.0], 1, 8, 8).unwrap();
        let r = 0.25;
        let out = wiener_filter(&obs, &blur, r).unwrap();
        for (o, y) in out.iter().zip(obs.pixels()) {
            assert!((o - y / 1.25).abs() < 1e-12);
        }
    }

    #[test]
    fn wiener_recovers_preimage_in_noise_free_invertible_limit() {
        let truth = phantom::<f64>(16, 16).unwrap();
        let blur = BlurOperator::new_box(3, 16, 16).unwrap();
        let blurred = Image::new(16, 16, blur.apply(truth.pixels())).unwrap();
        let rec = wiener_filter(&blurred, &blur, 1e-13).unwrap();
        for (a, b) in rec.iter().zip(truth.pixels()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn wiener_filter_is_shift_covariant_unclamped() {
        let obs = phantom::<f64>(32, 32).unwrap();
        let blur = BlurOperator::new_box(5, 32, 32).unwrap();
        let r = 0.01;
        let base = wiener_filter(&obs, &blur, r).unwrap();
        let shift = 0.2;
        let shifted_obs = Image::new(
            32,
            32,
            obs.pixels().iter().map(|&p| p + shift).collect(),
        )
        .unwrap();
        let shifted = wiener_filter(&shifted_obs, &blur, r).unwrap();
        // Normalized kernel: a global shift c maps to c / (1 + r).
        for (s, b) in shifted.iter().zip(&base) {
            assert!((s - b - shift / (1.0 + r)).abs() < 1e-10);
        }
    }

    #[test]
    fn wiener_init_clamps_and_beats_observation_on_phantom() {
        let truth = phantom::<f64>(128, 128).unwrap();
        let blur = BlurOperator::new_box(5, 128, 128).unwrap();
        let cfg = DegradationConfig { kernel_size: 5, bsnr_db: 40.0, noise_seed: 17 };
        let (obs, _) = degrade(&truth, &blur, &cfg).unwrap();
        let init = wiener_init(&obs, &blur, default_wiener_regularization(40.0)).unwrap();
        let (lo, hi) = init.min_max();
        assert!(lo >= 0.0 && hi <= 1.0);
        let psnr_obs = psnr(truth.pixels(), obs.pixels(), 1.0).unwrap();
        let psnr_init = psnr(truth.pixels(), init.pixels(), 1.0).unwrap();
        assert!(
            psnr_init > psnr_obs,
            "wiener init {psnr_init} dB should beat observation {psnr_obs} dB"
        );
    }
}
