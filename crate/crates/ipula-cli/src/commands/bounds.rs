//! `bounds`: evaluate the gap and coupled-distance bound curves on a `k`
//! grid, for overlay plotting against empirical traces.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use serde_json::json;

use ipula::diagnostics::{
    adaptive_gap_bound, adaptive_transfer_curve, fixed_gap_bound, stationary_floor, transfer_bound,
    BoundParams,
};
use ipula::envelope::ToleranceSchedule;

use crate::config::RunConfig;
use crate::report::{write_json, Csv};

pub fn run(config: &RunConfig, out: &Path, seed_override: Option<u64>) -> Result<ExitCode> {
    let start = Instant::now();
    if seed_override.is_some() {
        bail!("bounds curves are pure formula evaluations; --seed does not apply");
    }
    let section = config.bounds_section()?;

    let mut params =
        BoundParams::new(section.sigma, section.gamma, section.eta, section.delta, section.dimension)?;
    if let Some(b_disc) = section.b_disc {
        params = params.with_b_disc(b_disc)?;
    }

    // Per-step caps for the adaptive curves; the default reproduces the
    // fixed-delta curves exactly.
    let schedule = match &section.schedule {
        None => ToleranceSchedule::Fixed { eps: section.delta },
        Some(s) => {
            let schedule = s.to_schedule(section.eta)?;
            if matches!(schedule, ToleranceSchedule::Relative { .. }) {
                bail!(
                    "[bounds.schedule] kind = \"relative\" needs a realized gradient \
                     trajectory; bound curves take explicit per-step caps"
                );
            }
            schedule
        }
    };
    let taus: Vec<f64> = (0..section.k_max)
        .map(|k| schedule.evaluate(k, None))
        .collect::<std::result::Result<_, _>>()?;

    let transfer_curve = adaptive_transfer_curve(&params, &taus)?;
    let mut csv =
        Csv::new(&["k", "fixed_gap", "adaptive_gap", "fixed_transfer", "adaptive_transfer"]);
    for k in 0..=section.k_max {
        csv.cell(k)
            .cell(fixed_gap_bound(&params, k, section.gap0)?)
            .cell(adaptive_gap_bound(&params, k, section.gap0, &taus)?)
            .cell(transfer_bound(&params, k)?)
            .cell(transfer_curve[k]);
        csv.end_row();
    }
    csv.write(&out.join("bounds.csv"))?;

    let summary = json!({
        "command": "bounds",
        "rows": section.k_max + 1,
        "stationary_floor": stationary_floor(&params)?,
        "runtime_seconds": start.elapsed().as_secs_f64(),
        "config": serde_json::to_value(config)?,
    });
    write_json(&out.join("summary.json"), &summary)?;

    println!("bounds: {} rows -> {}", section.k_max + 1, out.display());
    Ok(ExitCode::SUCCESS)
}
