//! Langevin sampling for nonsmooth log-concave targets through Moreau-Yosida
//! smoothing, with certified inexact proximal oracles.
//!
//! The target potential `U` may be nonsmooth; sampling runs on its envelope
//! `U_gamma(x) = inf_y { U(y) + ||x - y||^2 / (2 gamma) }`, whose gradient is
//! `(x - prox_U^gamma(x)) / gamma`. The proximal point is computed by an
//! iterative inner solver that returns a certificate: the candidate point, a
//! selected subgradient, and the computable residual that provably upper
//! bounds the true gradient error. Tolerance schedules, contraction/coupling
//! rates, and the resulting non-asymptotic bound evaluators live alongside
//! the samplers so every bound claimed by the library can be checked against
//! runs of the library itself.
//!
//! Module map:
//!
//! * [`envelope`]: inner prox solver, certificates, tolerance schedules.
//! * [`potentials`]: the potential contract plus quadratic, elastic-net, and
//!   FFT-backed TV-deblurring potentials.
//! * [`samplers`]: the inexact proximal Langevin chain and its baselines
//!   (exact envelope ULA, MYULA-style splitting, subgradient variants),
//!   single-chain and synchronously coupled drivers.
//! * [`diagnostics`]: bound evaluators (contraction rate, coupling rate, gap
//!   and transfer bounds, stationary floor) and metrics (PSNR, SSIM, ACF,
//!   one-dimensional quantile Wasserstein distance).
//! * [`imaging`]: grayscale image I/O, the bundled phantom, blur/noise
//!   degradation, Wiener initialization.
//! * [`deblur`]: the end-to-end deblurring experiment pipeline.
//! * [`verify`]: executable checks that compare realized chain behavior
//!   against the theoretical bounds.
//!
//! Everything is generic over the floating scalar (see [`Scalar`]); `f64` is
//! the default precision.

#![forbid(unsafe_code)]

pub mod deblur;
pub mod diagnostics;
pub mod envelope;
pub mod error;
pub mod imaging;
pub mod linalg;
pub mod potentials;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar type: the CLI and the verification suites run in `f64`.
pub type DefaultScalar = f64;

/// Convenience aliases at the default precision.
pub type EnvelopeParams64 = envelope::EnvelopeParams<DefaultScalar>;
pub type ProxCertificate64 = envelope::ProxCertificate<DefaultScalar>;
pub type SamplerConfig64 = samplers::SamplerConfig<DefaultScalar>;
pub type BoundParams64 = diagnostics::BoundParams<DefaultScalar>;
pub type Image64 = imaging::Image<DefaultScalar>;
