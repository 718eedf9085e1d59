//! Convergence-bound calculators and statistical metrics.
//!
//! The bound side evaluates the contraction factors and non-asymptotic
//! envelope-gap / coupled-distance inequalities for given (σ, γ, η, δ, n);
//! the metric side turns traces and images into scalar diagnostics (PSNR,
//! SSIM, autocorrelation, one-dimensional quantile Wasserstein distance).
//! Everything here is a pure function; replicated-trace aggregation uses
//! compensated summation so results are independent of reduction order.

mod bounds;
mod metrics;

pub use bounds::{
    adaptive_gap_bound, adaptive_pathwise_verdict, adaptive_transfer_bound,
    adaptive_transfer_curve, contraction_rho, contraction_rho_from_moduli, coupling_q,
    coupling_q_from_moduli, fixed_gap_bound, pathwise_transfer_verdict, stationary_floor,
    step_matched_floor, step_matched_gap_bound, transfer_bound, BoundParams, StepMatchedFloor,
    TransferVerdict,
};
pub use metrics::{
    acf, mean_and_standard_error, psnr, quantile_w2_gaussian, ssim, MeanSe, SsimConfig,
};
