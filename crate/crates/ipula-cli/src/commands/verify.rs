//! `verify`: run the bound verification suite and write a machine-readable
//! report. The exit status is the faithful conjunction of every check; checks
//! excluded via config are reported as skipped and fail the run unless the
//! config explicitly allows a partial suite.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use serde_json::json;

use ipula::verify::{run_check, CheckOutcome, CHECK_NAMES, DEFAULT_SEED};

use crate::config::RunConfig;
use crate::report::write_json;

fn outcome_json(outcome: &CheckOutcome) -> serde_json::Value {
    json!({
        "name": outcome.name,
        "bound": outcome.bound,
        "observed": outcome.observed,
        "margin": outcome.margin,
        "pass": outcome.pass,
        "detail": outcome.detail,
    })
}

pub fn run(config: &RunConfig, out: &Path, seed_override: Option<u64>) -> Result<ExitCode> {
    let start = Instant::now();
    let section = config.verify.clone().unwrap_or_default();
    let seed = seed_override.or(section.seed).unwrap_or(DEFAULT_SEED);

    let requested: Vec<&str> = match &section.checks {
        None => CHECK_NAMES.to_vec(),
        Some(names) => {
            let mut requested = Vec::with_capacity(names.len());
            for name in names {
                let canonical = CHECK_NAMES
                    .iter()
                    .find(|&&c| c == name)
                    .copied();
                match canonical {
                    Some(c) if requested.contains(&c) => {
                        bail!("[verify] checks lists {name:?} twice")
                    }
                    Some(c) => requested.push(c),
                    None => bail!(
                        "[verify] unknown check {name:?}; the suite consists of {CHECK_NAMES:?}"
                    ),
                }
            }
            requested
        }
    };

    let mut outcomes = Vec::new();
    for name in CHECK_NAMES {
        if !requested.contains(&name) {
            continue;
        }
        let outcome = run_check(name, seed)?;
        println!(
            "check {:<32} {} (bound {:e}, observed {:e}, margin {:e})",
            outcome.name,
            if outcome.pass { "pass" } else { "FAIL" },
            outcome.bound,
            outcome.observed,
            outcome.margin
        );
        if !outcome.pass {
            eprintln!("verify: FAILED {}: {}", outcome.name, outcome.detail);
        }
        outcomes.push(outcome);
    }
    let skipped: Vec<&str> = CHECK_NAMES.iter().copied().filter(|n| !requested.contains(n)).collect();
    for name in &skipped {
        println!(
            "check {name:<32} skipped{}",
            if section.allow_partial { " (allowed by config)" } else { "" }
        );
    }

    let all_pass = outcomes.iter().all(|o| o.pass);
    let ok = all_pass && (skipped.is_empty() || section.allow_partial);
    if !skipped.is_empty() && !section.allow_partial {
        eprintln!(
            "verify: {} check(s) skipped without allow_partial = true: {skipped:?}",
            skipped.len()
        );
    }

    let report = json!({
        "seed": seed,
        "allow_partial": section.allow_partial,
        "checks": outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
        "skipped": skipped,
        "all_executed_pass": all_pass,
        "pass": ok,
        "runtime_seconds": start.elapsed().as_secs_f64(),
        "config": serde_json::to_value(config)?,
    });
    write_json(&out.join("verify_report.json"), &report)?;

    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
