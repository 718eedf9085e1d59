//! Circular convolution operator backed by cached FFT plans.
//!
//! `H x` convolves a row-major image with a small square stencil under
//! periodic boundary conditions, implemented as a pointwise product with the
//! kernel's transfer function in the frequency domain. The adjoint uses the
//! conjugate transfer function, so `<Hx, y> == <x, H^T y>` holds to FFT
//! roundoff. Plans and the transfer function are computed once at
//! construction; `apply`/`adjoint` are `&self` and safe to share across
//! threads.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone)]
pub struct BlurOperator<F: Scalar + FftNum> {
    width: usize,
    height: usize,
    kernel: Vec<F>,
    kernel_size: usize,
    transfer: Vec<Complex<F>>,
    fft_row: Arc<dyn Fft<F>>,
    ifft_row: Arc<dyn Fft<F>>,
    fft_col: Arc<dyn Fft<F>>,
    ifft_col: Arc<dyn Fft<F>>,
}

impl<F: Scalar + FftNum> BlurOperator<F> {
    /// Normalized `kernel_size x kernel_size` box blur (entries sum to one).
    pub fn new_box(kernel_size: usize, width: usize, height: usize) -> Result<Self> {
        let k2 = F::cast((kernel_size * kernel_size) as f64);
        let kernel = vec![F::one() / k2; kernel_size * kernel_size];
        Self::from_kernel(&kernel, kernel_size, width, height)
    }

    /// Operator for an arbitrary square stencil, centered on its middle entry.
    pub fn from_kernel(kernel: &[F], kernel_size: usize, width: usize, height: usize) -> Result<Self> {
        if kernel_size == 0 || kernel_size % 2 == 0 {
            return Err(Error::invalid("kernel_size", format!("must be odd and >= 1, got {kernel_size}")));
        }
        if kernel.len() != kernel_size * kernel_size {
            return Err(Error::invalid("kernel", "length must be kernel_size^2"));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("width/height", "must be >= 1"));
        }
        if kernel_size > width || kernel_size > height {
            return Err(Error::invalid("kernel_size", "must not exceed image dimensions"));
        }

        let mut planner = FftPlanner::new();
        let fft_row = planner.plan_fft_forward(width);
        let ifft_row = planner.plan_fft_inverse(width);
        let fft_col = planner.plan_fft_forward(height);
        let ifft_col = planner.plan_fft_inverse(height);

        let mut op = BlurOperator {
            width,
            height,
            kernel: kernel.to_vec(),
            kernel_size,
            transfer: Vec::new(),
            fft_row,
            ifft_row,
            fft_col,
            ifft_col,
        };

        // Embed the stencil centered at the origin with periodic wrap, then
        // transform once to get the transfer function.
        let r = (kernel_size / 2) as isize;
        let mut embedded = vec![Complex::new(F::zero(), F::zero()); width * height];
        for di in -r..=r {
            for dj in -r..=r {
                let wv = kernel[((di + r) as usize) * kernel_size + (dj + r) as usize];
                let i = (di.rem_euclid(height as isize)) as usize;
                let j = (dj.rem_euclid(width as isize)) as usize;
                embedded[i * width + j] = embedded[i * width + j] + Complex::new(wv, F::zero());
            }
        }
        op.fft2(&mut embedded);
        op.transfer = embedded;
        Ok(op)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kernel(&self) -> &[F] {
        &self.kernel
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    /// Transfer function (frequency response), row-major.
    pub fn transfer(&self) -> &[Complex<F>] {
        &self.transfer
    }

    fn fft2(&self, buf: &mut [Complex<F>]) {
        debug_assert_eq!(buf.len(), self.width * self.height);
        self.fft_row.process(buf);
        let mut t = transpose(buf, self.width, self.height);
        self.fft_col.process(&mut t);
        transpose_into(&t, self.height, self.width, buf);
    }

    fn ifft2(&self, buf: &mut [Complex<F>]) {
        debug_assert_eq!(buf.len(), self.width * self.height);
        self.ifft_row.process(buf);
        let mut t = transpose(buf, self.width, self.height);
        self.ifft_col.process(&mut t);
        transpose_into(&t, self.height, self.width, buf);
        let scale = F::one() / F::cast((self.width * self.height) as f64);
        for v in buf.iter_mut() {
            *v = Complex::new(v.re * scale, v.im * scale);
        }
    }

    fn filter(&self, x: &[F], conjugate: bool) -> Vec<F> {
        assert_eq!(x.len(), self.width * self.height, "blur operator: image size");
        let mut buf: Vec<Complex<F>> =
            x.iter().map(|&v| Complex::new(v, F::zero())).collect();
        self.fft2(&mut buf);
        for (b, t) in buf.iter_mut().zip(&self.transfer) {
            let t = if conjugate { t.conj() } else { *t };
            *b = *b * t;
        }
        self.ifft2(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// `H x`.
    pub fn apply(&self, x: &[F]) -> Vec<F> {
        self.filter(x, false)
    }

    /// `H^T x` (equals `H x` for symmetric stencils, up to roundoff).
    pub fn adjoint(&self, x: &[F]) -> Vec<F> {
        self.filter(x, true)
    }

    /// Regularized frequency-domain deconvolution:
    /// `ifft( conj(K) fft(y) / (|K|^2 + r) )`, the linear Wiener-style
    /// inverse. `regularization` must be nonnegative; with `r = 0` the
    /// kernel spectrum must have no zeros for the output to be finite.
    pub fn deconvolve(&self, y: &[F], regularization: F) -> Vec<F> {
        assert_eq!(y.len(), self.width * self.height, "blur operator: image size");
        let mut buf: Vec<Complex<F>> =
            y.iter().map(|&v| Complex::new(v, F::zero())).collect();
        self.fft2(&mut buf);
        for (b, t) in buf.iter_mut().zip(&self.transfer) {
            let denom = t.re * t.re + t.im * t.im + regularization;
            *b = *b * t.conj() / Complex::new(denom, F::zero());
        }
        self.ifft2(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}

/// `H x` as a free function.
pub fn blur_apply<F: Scalar + FftNum>(op: &BlurOperator<F>, x: &[F]) -> Vec<F> {
    op.apply(x)
}

/// `H^T x` as a free function.
pub fn blur_adjoint<F: Scalar + FftNum>(op: &BlurOperator<F>, x: &[F]) -> Vec<F> {
    op.adjoint(x)
}

fn transpose<F: FftNum>(buf: &[Complex<F>], width: usize, height: usize) -> Vec<Complex<F>> {
    let mut out = vec![Complex::new(F::zero(), F::zero()); buf.len()];
    transpose_into(buf, width, height, &mut out);
    out
}

fn transpose_into<F: FftNum>(
    src: &[Complex<F>],
    src_width: usize,
    src_height: usize,
    dst: &mut [Complex<F>],
) {
    for i in 0..src_height {
        for j in 0..src_width {
            dst[j * src_height + i] = src[i * src_width + j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::rng::{stream_rng, STREAM_AUX};
    use crate::scalar::Scalar;

    fn random_image(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, STREAM_AUX);
        (0..n).map(|_| f64::standard_normal(&mut rng)).collect()
    }

    #[test]
    fn impulse_response_is_the_wrapped_kernel() {
        let (w, h) = (8, 8);
        let op = BlurOperator::<f64>::new_box(3, w, h).unwrap();
        let mut x = vec![0.0; w * h];
        x[0] = 1.0; // corner impulse exercises the periodic wrap
        let y = op.apply(&x);
        let ninth = 1.0 / 9.0;
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                let i = di.rem_euclid(h as i64) as usize;
                let j = dj.rem_euclid(w as i64) as usize;
                assert!(
                    (y[i * w + j] - ninth).abs() < 1e-12,
                    "pixel ({i},{j}) = {}",
                    y[i * w + j]
                );
            }
        }
        let mass: f64 = y.iter().sum();
        assert!((mass - 1.0).abs() < 1e-12, "total mass {mass}");
    }

    #[test]
    fn constants_are_preserved() {
        let op = BlurOperator::<f64>::new_box(5, 16, 12).unwrap();
        let x = vec![0.7; 16 * 12];
        let y = op.apply(&x);
        for v in y {
            assert!((v - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_identity_holds() {
        let (w, h) = (32, 24);
        let op = BlurOperator::<f64>::new_box(5, w, h).unwrap();
        for seed in 0..5u64 {
            let x = random_image(w * h, seed);
            let y = random_image(w * h, seed + 100);
            let lhs = dot(&op.apply(&x), &y);
            let rhs = dot(&x, &op.adjoint(&y));
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            assert!(
                (lhs - rhs).abs() / scale < 1e-10,
                "seed {seed}: <Hx,y>={lhs}, <x,H^T y>={rhs}"
            );
        }
    }

    #[test]
    fn operator_is_linear() {
        let (w, h) = (16, 16);
        let op = BlurOperator::<f64>::new_box(3, w, h).unwrap();
        let x = random_image(w * h, 1);
        let y = random_image(w * h, 2);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| 2.0 * a - 0.5 * b).collect();
        let lhs = op.apply(&combo);
        let hx = op.apply(&x);
        let hy = op.apply(&y);
        for i in 0..w * h {
            let rhs = 2.0 * hx[i] - 0.5 * hy[i];
            assert!((lhs[i] - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_kernel_is_identity() {
        let op = BlurOperator::<f64>::from_kernel(&[1.0], 1, 8, 8).unwrap();
        let x = random_image(64, 3);
        let y = op.apply(&x);
        for i in 0..64 {
            assert!((y[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_even_and_oversized_kernels() {
        assert!(BlurOperator::<f64>::new_box(4, 16, 16).is_err());
        assert!(BlurOperator::<f64>::new_box(17, 16, 16).is_err());
    }
}
