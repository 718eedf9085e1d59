//! Single-chain driver with per-iteration records, plus a deterministic
//! multi-replica runner.

use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::envelope::moreau_envelope_value;
use crate::error::{ensure_dimension, Error, Result};
use crate::linalg::all_finite;
use crate::potentials::CompositePotential;
use crate::rng::{replica_rng, stream_rng, STREAM_CHAIN};
use crate::scalar::Scalar;

use super::{
    exact_moreau_ula_step, gradsub_step, ipula_step, myula_step, proxsub_step, SamplerConfig,
    SamplerKind, StepRecord,
};

/// Snapshot of the chain at one recorded iteration.
///
/// Row `k` documents the state `x_k` together with the inner solve the step
/// *leaving* `x_k` performed. The final row (`k == steps`) documents the last
/// state only: its residual, tolerance, and inner-iteration fields are zero
/// because no step leaves it.
#[derive(Clone, Debug)]
pub struct IterationRecord<F> {
    pub k: usize,
    /// Present only when the config asked for state snapshots.
    pub state_snapshot: Option<Vec<F>>,
    pub potential_value: F,
    /// Upper bound on the envelope value at the state: the certificate
    /// objective when the step solved the full prox, otherwise `U(x_k)`
    /// (always an upper bound since the envelope minorizes the potential).
    pub envelope_value_upper: F,
    /// Exact envelope value, when a closed-form prox is available.
    pub envelope_value_exact: Option<F>,
    pub residual: F,
    pub tolerance_used: F,
    pub inner_iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ChainTrace<F> {
    pub iterations: Vec<IterationRecord<F>>,
    pub final_state: Vec<F>,
    /// Number of scalar standard-normal draws consumed (steps * dimension):
    /// inner solves never touch the chain stream.
    pub rng_draw_count: u64,
}

fn make_record<F: Scalar>(
    k: usize,
    state: &[F],
    info: &StepRecord<F>,
    potential: &dyn CompositePotential<F>,
    gamma: F,
    record_states: bool,
) -> Result<IterationRecord<F>> {
    let potential_value = potential.value(state);
    let envelope_value_upper = match &info.full_certificate {
        Some(cert) => moreau_envelope_value(potential, state, cert, gamma)?,
        None => potential_value,
    };
    let envelope_value_exact = potential.exact_prox(state, gamma).map(|y| {
        let mut d = crate::linalg::KahanSum::new();
        for (xi, yi) in state.iter().zip(&y) {
            let e = *xi - *yi;
            d.add(e * e);
        }
        potential.value(&y) + d.value() / (F::cast(2.0) * gamma)
    });
    Ok(IterationRecord {
        k,
        state_snapshot: record_states.then(|| state.to_vec()),
        potential_value,
        envelope_value_upper,
        envelope_value_exact,
        residual: info.residual(),
        tolerance_used: info.tolerance_used,
        inner_iterations: info.inner_iterations(),
        converged: info.converged(),
    })
}

/// Run one chain with the noise stream derived from `config.seed`.
pub fn run_chain<F: Scalar>(
    kind: SamplerKind,
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    initial: &[F],
) -> Result<ChainTrace<F>> {
    let rng = stream_rng(config.seed, STREAM_CHAIN);
    run_chain_with_rng(kind, potential, config, initial, rng)
}

/// Run one chain with an explicit noise generator (used by the replica
/// runner, which gives each replica its own stream).
pub fn run_chain_with_rng<F: Scalar>(
    kind: SamplerKind,
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    initial: &[F],
    mut rng: ChaCha12Rng,
) -> Result<ChainTrace<F>> {
    config.validate()?;
    ensure_dimension(potential.dimension(), initial.len())?;
    if !(potential.strong_convexity() > F::zero()) {
        return Err(Error::invalid(
            "strong_convexity",
            "sampling requires a strongly convex potential (sigma > 0)",
        ));
    }
    if !all_finite(initial) {
        return Err(Error::NonFiniteIterate { iteration: 0 });
    }

    let n = initial.len();
    let gamma = config.gamma;
    let mut state = initial.to_vec();
    let mut warm: Option<Vec<F>> = None;
    let mut last_gradient_norm: Option<F> = None;
    let mut iterations = Vec::with_capacity(config.steps / config.record_every + 1);
    let mut draws: u64 = 0;

    for k in 0..config.steps {
        let (next, info) = match kind {
            SamplerKind::IPula => {
                ipula_step(&state, potential, config, k, warm.as_deref(), last_gradient_norm, &mut rng)?
            }
            SamplerKind::ExactUla => exact_moreau_ula_step(&state, potential, config, &mut rng)?,
            SamplerKind::Myula => myula_step(&state, potential, config, warm.as_deref(), &mut rng)?,
            SamplerKind::GradSub => gradsub_step(&state, potential, config, &mut rng)?,
            SamplerKind::ProxSub => proxsub_step(&state, potential, config, warm.as_deref(), &mut rng)?,
        };
        draws += n as u64;

        if k % config.record_every == 0 {
            iterations.push(make_record(k, &state, &info, potential, gamma, config.record_states)?);
        }

        warm = info
            .full_certificate
            .as_ref()
            .or(info.aux_certificate.as_ref())
            .map(|c| c.point.clone());
        last_gradient_norm = info.gradient_norm.or(last_gradient_norm);

        if !all_finite(&next) {
            return Err(Error::NonFiniteIterate { iteration: k + 1 });
        }
        state = next;
    }

    let final_info = StepRecord::empty();
    iterations.push(make_record(
        config.steps,
        &state,
        &final_info,
        potential,
        gamma,
        config.record_states,
    )?);

    Ok(ChainTrace { iterations, final_state: state, rng_draw_count: draws })
}

/// Run `n_chains` independent replicas in parallel.
///
/// Replica `i` draws its noise from a dedicated stream of the shared seed, so
/// the result is a deterministic function of `(config.seed, i)` regardless of
/// thread count or scheduling.
pub fn run_replicated<F: Scalar>(
    kind: SamplerKind,
    potential: &(dyn CompositePotential<F> + Sync),
    config: &SamplerConfig<F>,
    initial: &[F],
    n_chains: usize,
) -> Result<Vec<ChainTrace<F>>> {
    (0..n_chains)
        .into_par_iter()
        .map(|i| {
            let rng = replica_rng(config.seed, i as u64);
            run_chain_with_rng(kind, potential, config, initial, rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::ToleranceSchedule;
    use crate::potentials::QuadraticPotential;

    fn quad(sigma: f64, center: f64, n: usize) -> QuadraticPotential<f64> {
        QuadraticPotential::new(sigma, vec![center; n]).unwrap()
    }

    fn base_config(steps: usize) -> SamplerConfig<f64> {
        let mut cfg = SamplerConfig::new(1.0, 0.1, steps, 1234);
        cfg.schedule = ToleranceSchedule::Fixed { eps: 1e-8 };
        cfg.inner.strong_convexity_hint = 1.0;
        cfg.inner.use_exact_prox = true;
        cfg
    }

    #[test]
    fn trace_shape_and_draw_count() {
        let p = quad(1.0, 0.0, 3);
        let mut cfg = base_config(20);
        cfg.record_every = 5;
        let trace = run_chain(SamplerKind::IPula, &p, &cfg, &[1.0, 2.0, 3.0]).unwrap();
        let ks: Vec<usize> = trace.iterations.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 5, 10, 15, 20]);
        assert_eq!(trace.rng_draw_count, 20 * 3);
        let last = trace.iterations.last().unwrap();
        assert_eq!(last.inner_iterations, 0);
        assert_eq!(last.residual, 0.0);
        assert!(last.converged);
    }

    #[test]
    fn zero_steps_yields_single_record_of_initial_state() {
        let p = quad(1.0, 0.0, 2);
        let mut cfg = base_config(0);
        cfg.record_states = true;
        let trace = run_chain(SamplerKind::ExactUla, &p, &cfg, &[0.5, -0.5]).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.final_state, vec![0.5, -0.5]);
        assert_eq!(trace.iterations[0].state_snapshot.as_deref(), Some(&[0.5, -0.5][..]));
        assert_eq!(trace.rng_draw_count, 0);
    }

    #[test]
    fn same_seed_is_bitwise_reproducible_and_seeds_differ() {
        let p = quad(1.0, 0.0, 2);
        let cfg = base_config(50);
        let a = run_chain(SamplerKind::IPula, &p, &cfg, &[1.0, 1.0]).unwrap();
        let b = run_chain(SamplerKind::IPula, &p, &cfg, &[1.0, 1.0]).unwrap();
        assert_eq!(a.final_state[0].to_bits(), b.final_state[0].to_bits());
        assert_eq!(a.final_state[1].to_bits(), b.final_state[1].to_bits());

        let mut cfg2 = base_config(50);
        cfg2.seed = 4321;
        let c = run_chain(SamplerKind::IPula, &p, &cfg2, &[1.0, 1.0]).unwrap();
        assert_ne!(a.final_state[0].to_bits(), c.final_state[0].to_bits());
    }

    #[test]
    fn records_satisfy_certificate_invariants() {
        let p = quad(2.0, 1.0, 1);
        let mut cfg = base_config(30);
        cfg.inner.use_exact_prox = false;
        cfg.inner.max_inner_iterations = 2000;
        cfg.inner.strong_convexity_hint = 2.0;
        cfg.schedule = ToleranceSchedule::Decaying { c: 1e-3, alpha: 0.5 };
        let trace = run_chain(SamplerKind::IPula, &p, &cfg, &[3.0]).unwrap();
        for rec in &trace.iterations {
            if rec.converged {
                assert!(rec.residual <= rec.tolerance_used + 1e-15, "row {}", rec.k);
            }
            // Envelope value sandwich: exact <= upper, exact <= potential.
            let exact = rec.envelope_value_exact.unwrap();
            assert!(exact <= rec.envelope_value_upper + 1e-12);
            assert!(exact <= rec.potential_value + 1e-12);
        }
    }

    #[test]
    fn stationary_second_moment_matches_discrete_prediction() {
        // 1-D quadratic, sigma = 1, gamma = 1: m = 1/2, L = 1. The exact
        // discrete chain has stationary variance 2 eta / (1 - a^2) with
        // a = 1 - eta m, which for eta = 0.05 is ~2.0256 (envelope target
        // variance is 1/m = 2).
        let p = quad(1.0, 0.0, 1);
        let mut cfg = base_config(40_000);
        cfg.eta = 0.05;
        cfg.record_every = 1;
        cfg.record_states = true;
        let trace = run_chain(SamplerKind::ExactUla, &p, &cfg, &[0.0]).unwrap();
        let burn = 4_000;
        let mut sum = crate::linalg::KahanSum::new();
        let mut count = 0_usize;
        for rec in trace.iterations.iter().skip(burn) {
            let x = rec.state_snapshot.as_ref().unwrap()[0];
            sum.add(x * x);
            count += 1;
        }
        let second_moment = sum.value() / count as f64;
        let a: f64 = 1.0 - 0.05 * 0.5;
        let predicted = 2.0 * 0.05 / (1.0 - a * a);
        assert!(
            (second_moment - predicted).abs() < 0.12,
            "second moment {second_moment}, predicted {predicted}"
        );
    }

    #[test]
    fn replicas_are_deterministic_and_distinct() {
        let p = quad(1.0, 0.0, 2);
        let cfg = base_config(20);
        let runs_a = run_replicated(SamplerKind::IPula, &p, &cfg, &[1.0, 1.0], 4).unwrap();
        let runs_b = run_replicated(SamplerKind::IPula, &p, &cfg, &[1.0, 1.0], 4).unwrap();
        for (a, b) in runs_a.iter().zip(&runs_b) {
            assert_eq!(a.final_state[0].to_bits(), b.final_state[0].to_bits());
        }
        assert_ne!(runs_a[0].final_state[0].to_bits(), runs_a[1].final_state[0].to_bits());
    }

    #[test]
    fn rejects_nonfinite_initial_state() {
        let p = quad(1.0, 0.0, 1);
        let cfg = base_config(5);
        let err = run_chain(SamplerKind::IPula, &p, &cfg, &[f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIterate { iteration: 0 }));
    }

    #[test]
    fn gradsub_runs_without_prox_support() {
        let p = crate::potentials::ElasticNetPotential::new(0.5, 1.0, 2).unwrap();
        let cfg = base_config(10);
        let trace = run_chain(SamplerKind::GradSub, &p, &cfg, &[1.0, -1.0]).unwrap();
        assert_eq!(trace.iterations.len(), 11);
    }
}
