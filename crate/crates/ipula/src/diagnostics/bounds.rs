//! Contraction factors and non-asymptotic error bounds.
//!
//! Two geometric rates govern the chains on the smoothed potential:
//!
//! * `rho = 1 - m_gamma eta (1 - 2 L_gamma eta)` contracts the expected
//!   envelope objective gap (valid for `eta < 1/(2 L_gamma)`);
//! * `q = sqrt(1 - 2 m_gamma eta + L_gamma^2 eta^2)` contracts the distance
//!   between synchronously coupled chains (valid for
//!   `eta < min(2 m_gamma / L_gamma^2, 2 / L_gamma)`).
//!
//! On top of these sit the gap bounds (fixed error level `delta`, per-step
//! schedules `tau_j`, and the step-matched `tau = c sqrt(eta)` special case)
//! and the pathwise transfer bounds for coupled chains.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Inputs for every bound in this module.
///
/// `m_gamma` and `l_gamma` are always derived from `sigma` and `gamma`
/// (`m_gamma = sigma / (1 + gamma sigma)`, `l_gamma = 1 / gamma`), never set
/// directly. `b_disc` is the externally supplied Wasserstein discretization
/// floor of the exact constant-step chain; it defaults to zero and the
/// stationary-floor verdict is conditional on the supplied value. `dimension`
/// may be zero for noise-free analytic checks.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams<F> {
    pub sigma: F,
    pub gamma: F,
    pub m_gamma: F,
    pub l_gamma: F,
    pub eta: F,
    pub delta: F,
    pub dimension: usize,
    pub b_disc: F,
}

impl<F: Scalar> BoundParams<F> {
    pub fn new(sigma: F, gamma: F, eta: F, delta: F, dimension: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > F::zero()) {
            return Err(Error::invalid("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        if !(gamma.is_finite() && gamma > F::zero()) {
            return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
        }
        if !(eta.is_finite() && eta > F::zero()) {
            return Err(Error::invalid("eta", format!("must be finite and > 0, got {eta}")));
        }
        if !(delta.is_finite() && delta >= F::zero()) {
            return Err(Error::invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        Ok(BoundParams {
            sigma,
            gamma,
            m_gamma: sigma / (F::one() + gamma * sigma),
            l_gamma: F::one() / gamma,
            eta,
            delta,
            dimension,
            b_disc: F::zero(),
        })
    }

    pub fn with_b_disc(mut self, b_disc: F) -> Result<Self> {
        if !(b_disc.is_finite() && b_disc >= F::zero()) {
            return Err(Error::invalid("b_disc", format!("must be finite and >= 0, got {b_disc}")));
        }
        self.b_disc = b_disc;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: F) -> Result<Self> {
        if !(delta.is_finite() && delta >= F::zero()) {
            return Err(Error::invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    fn dim_f(&self) -> F {
        F::cast(self.dimension as f64)
    }
}

/// `rho = 1 - m eta (1 - 2 L eta)` from raw moduli; requires
/// `eta` in `(0, 1/(2L))`.
pub fn contraction_rho_from_moduli<F: Scalar>(m_gamma: F, l_gamma: F, eta: F) -> Result<F> {
    let two = F::cast(2.0);
    if !(eta > F::zero() && eta < F::one() / (two * l_gamma)) {
        return Err(Error::StepSizeOutOfRange {
            eta: eta.to_f64_lossy(),
            constraint: "eta in (0, 1/(2 L_gamma)) for the objective-gap contraction",
        });
    }
    Ok(F::one() - m_gamma * eta * (F::one() - two * l_gamma * eta))
}

/// `q = sqrt(1 - 2 m eta + L^2 eta^2)` from raw moduli; requires
/// `eta` in `(0, 2m/L^2)` and `(0, 2/L)`.
pub fn coupling_q_from_moduli<F: Scalar>(m_gamma: F, l_gamma: F, eta: F) -> Result<F> {
    let two = F::cast(2.0);
    let limit = (two * m_gamma / (l_gamma * l_gamma)).min(two / l_gamma);
    if !(eta > F::zero() && eta < limit) {
        return Err(Error::StepSizeOutOfRange {
            eta: eta.to_f64_lossy(),
            constraint: "eta in (0, 2 m_gamma / L_gamma^2) and (0, 2 / L_gamma) for the coupling contraction",
        });
    }
    let q_sq = F::one() - two * m_gamma * eta + l_gamma * l_gamma * eta * eta;
    // Non-negative for any real eta since m <= L, but guard rounding.
    Ok(q_sq.max(F::zero()).sqrt())
}

pub fn contraction_rho<F: Scalar>(params: &BoundParams<F>) -> Result<F> {
    contraction_rho_from_moduli(params.m_gamma, params.l_gamma, params.eta)
}

pub fn coupling_q<F: Scalar>(params: &BoundParams<F>) -> Result<F> {
    coupling_q_from_moduli(params.m_gamma, params.l_gamma, params.eta)
}

fn gap_noise_coefficient<F: Scalar>(params: &BoundParams<F>) -> F {
    params.eta * params.l_gamma * params.dim_f()
}

fn gap_error_coefficient<F: Scalar>(params: &BoundParams<F>) -> F {
    params.eta * (F::cast(0.5) + params.l_gamma * params.eta)
}

/// Expected envelope gap after `k` steps with a fixed per-step error cap
/// `delta`:
/// `rho^k gap0 + (eta (1/2 + L eta) delta^2 + eta L n) / (1 - rho)`.
pub fn fixed_gap_bound<F: Scalar>(params: &BoundParams<F>, k: usize, gap0: F) -> Result<F> {
    let rho = contraction_rho(params)?;
    let floor = (gap_error_coefficient(params) * params.delta * params.delta
        + gap_noise_coefficient(params))
        / (F::one() - rho);
    Ok(rho.powi(k as i32) * gap0 + floor)
}

/// Expected envelope gap with a per-step error schedule `taus`:
/// `rho^k gap0 + eta (1/2 + L eta) sum_j rho^(k-1-j) tau_j^2
///  + eta L n (1 - rho^k) / (1 - rho)`.
///
/// `taus` must supply at least `k` entries.
pub fn adaptive_gap_bound<F: Scalar>(
    params: &BoundParams<F>,
    k: usize,
    gap0: F,
    taus: &[F],
) -> Result<F> {
    if taus.len() < k {
        return Err(Error::invalid(
            "taus",
            format!("need at least {k} schedule entries, got {}", taus.len()),
        ));
    }
    let rho = contraction_rho(params)?;
    let mut conv = F::zero();
    for j in 0..k {
        conv = rho * conv + taus[j] * taus[j];
    }
    let rho_k = rho.powi(k as i32);
    let noise = gap_noise_coefficient(params) * (F::one() - rho_k) / (F::one() - rho);
    Ok(rho_k * gap0 + gap_error_coefficient(params) * conv + noise)
}

/// Coupled-chain distance bound with a fixed error cap:
/// `eta delta (1 - q^k) / (1 - q)`.
pub fn transfer_bound<F: Scalar>(params: &BoundParams<F>, k: usize) -> Result<F> {
    let q = coupling_q(params)?;
    Ok(params.eta * params.delta * (F::one() - q.powi(k as i32)) / (F::one() - q))
}

/// Coupled-chain distance bound with per-step caps:
/// `eta sum_{j<k} q^(k-1-j) tau_j`.
pub fn adaptive_transfer_bound<F: Scalar>(
    params: &BoundParams<F>,
    k: usize,
    taus: &[F],
) -> Result<F> {
    if taus.len() < k {
        return Err(Error::invalid(
            "taus",
            format!("need at least {k} schedule entries, got {}", taus.len()),
        ));
    }
    let q = coupling_q(params)?;
    let mut s = F::zero();
    for j in 0..k {
        s = q * s + taus[j];
    }
    Ok(params.eta * s)
}

/// The whole adaptive transfer curve `k = 0..=taus.len()` in one pass.
pub fn adaptive_transfer_curve<F: Scalar>(params: &BoundParams<F>, taus: &[F]) -> Result<Vec<F>> {
    let q = coupling_q(params)?;
    let mut curve = Vec::with_capacity(taus.len() + 1);
    curve.push(F::zero());
    let mut s = F::zero();
    for &tau in taus {
        s = q * s + tau;
        curve.push(params.eta * s);
    }
    Ok(curve)
}

/// Stationary Wasserstein floor: `b_disc + eta delta / (1 - q)`.
pub fn stationary_floor<F: Scalar>(params: &BoundParams<F>) -> Result<F> {
    let q = coupling_q(params)?;
    Ok(params.b_disc + params.eta * params.delta / (F::one() - q))
}

/// The two components of the step-matched (`tau = c sqrt(eta)`) gap floor.
#[derive(Clone, Copy, Debug)]
pub struct StepMatchedFloor<F> {
    /// `c^2 eta (1/2 + L eta) / (m (1 - 2 L eta))` — vanishes linearly in
    /// `eta`.
    pub oracle_term: F,
    /// `L n / (m (1 - 2 L eta))` — the discretization-noise floor, bounded
    /// away from zero.
    pub noise_term: F,
}

impl<F: Scalar> StepMatchedFloor<F> {
    pub fn total(&self) -> F {
        self.oracle_term + self.noise_term
    }
}

/// Floor of the gap bound under the step-matched schedule `tau = c sqrt(eta)`.
pub fn step_matched_floor<F: Scalar>(params: &BoundParams<F>, c: F) -> Result<StepMatchedFloor<F>> {
    // Validate the step range via rho.
    let _ = contraction_rho(params)?;
    let two = F::cast(2.0);
    let denom = params.m_gamma * (F::one() - two * params.l_gamma * params.eta);
    Ok(StepMatchedFloor {
        oracle_term: c * c * gap_error_coefficient(params) / denom,
        noise_term: params.l_gamma * params.dim_f() / denom,
    })
}

/// Gap bound under the step-matched schedule:
/// `rho^k gap0 + (L n + c^2 eta (1/2 + L eta)) / (m (1 - 2 L eta))`.
pub fn step_matched_gap_bound<F: Scalar>(
    params: &BoundParams<F>,
    c: F,
    k: usize,
    gap0: F,
) -> Result<F> {
    let rho = contraction_rho(params)?;
    let floor = step_matched_floor(params, c)?;
    Ok(rho.powi(k as i32) * gap0 + floor.total())
}

/// Result of checking a coupled trace against its distance bound.
#[derive(Clone, Copy, Debug)]
pub struct TransferVerdict<F> {
    /// `max_k distance_k / bound_k` (0/0 counts as 0).
    pub max_ratio: F,
    /// Step attaining the maximum.
    pub worst_k: usize,
    /// `max_ratio <= 1` exactly — the inequality is pathwise, so no
    /// tolerance is applied.
    pub pass: bool,
}

fn verdict_from_ratios<F: Scalar>(ratios: impl Iterator<Item = (usize, F)>) -> TransferVerdict<F> {
    let mut max_ratio = F::zero();
    let mut worst_k = 0;
    for (k, r) in ratios {
        if r > max_ratio {
            max_ratio = r;
            worst_k = k;
        }
    }
    TransferVerdict { max_ratio, worst_k, pass: max_ratio <= F::one() }
}

fn ratio<F: Scalar>(distance: F, bound: F) -> F {
    if distance == F::zero() {
        F::zero()
    } else if bound == F::zero() {
        F::infinity()
    } else {
        distance / bound
    }
}

/// Check coupled-chain distances against the fixed bound
/// `eta delta (1 - q^k)/(1 - q)` using `params.delta`.
pub fn pathwise_transfer_verdict<F: Scalar>(
    distances: &[F],
    params: &BoundParams<F>,
) -> Result<TransferVerdict<F>> {
    let q = coupling_q(params)?;
    let scale = params.eta * params.delta / (F::one() - q);
    Ok(verdict_from_ratios((0..distances.len()).map(|k| {
        let bound = scale * (F::one() - q.powi(k as i32));
        (k, ratio(distances[k], bound))
    })))
}

/// Check coupled-chain distances against the adaptive bound built from the
/// recorded per-step caps: `eta sum_{j<k} q^(k-1-j) cap_j`.
pub fn adaptive_pathwise_verdict<F: Scalar>(
    distances: &[F],
    caps: &[F],
    params: &BoundParams<F>,
) -> Result<TransferVerdict<F>> {
    if distances.len() != caps.len() + 1 {
        return Err(Error::invalid(
            "distances/caps",
            format!("expected {} distances for {} caps, got {}", caps.len() + 1, caps.len(), distances.len()),
        ));
    }
    let q = coupling_q(params)?;
    let mut s = F::zero();
    let mut ratios = Vec::with_capacity(distances.len());
    ratios.push((0, ratio(distances[0], F::zero())));
    for k in 1..distances.len() {
        s = q * s + caps[k - 1];
        ratios.push((k, ratio(distances[k], params.eta * s)));
    }
    Ok(verdict_from_ratios(ratios.into_iter()))
}
