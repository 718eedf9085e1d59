//! `sample`: run one chain (or independent replicas) on a fixture potential
//! and write the trace artifacts.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use serde_json::json;

use ipula::samplers::{run_chain, run_replicated, ChainTrace};

use crate::config::RunConfig;
use crate::report::{write_json, write_state_binary, Csv};

const TRACE_COLUMNS: [&str; 6] =
    ["k", "potential_value", "envelope_upper", "residual", "tolerance", "inner_iters"];

fn write_trace(path: &Path, trace: &ChainTrace<f64>) -> Result<usize> {
    let mut csv = Csv::new(&TRACE_COLUMNS);
    for row in &trace.iterations {
        csv.cell(row.k)
            .cell(row.potential_value)
            .cell(row.envelope_value_upper)
            .cell(row.residual)
            .cell(row.tolerance_used)
            .cell(row.inner_iterations);
        csv.end_row();
    }
    csv.write(path)?;
    Ok(trace.iterations.len())
}

/// Replica aggregates, reduced in replica-index order so the bytes do not
/// depend on the worker count.
fn write_replica_summary(path: &Path, traces: &[ChainTrace<f64>]) -> Result<()> {
    let mut csv = Csv::new(&[
        "k",
        "mean_potential",
        "min_potential",
        "max_potential",
        "mean_envelope_upper",
        "mean_residual",
    ]);
    let rows = traces[0].iterations.len();
    let count = traces.len() as f64;
    for i in 0..rows {
        let k = traces[0].iterations[i].k;
        let mut sum_potential = ipula::linalg::KahanSum::new();
        let mut sum_envelope = ipula::linalg::KahanSum::new();
        let mut sum_residual = ipula::linalg::KahanSum::new();
        let mut min_potential = f64::INFINITY;
        let mut max_potential = f64::NEG_INFINITY;
        for trace in traces {
            let row = &trace.iterations[i];
            assert_eq!(row.k, k, "replicas share one record grid");
            sum_potential.add(row.potential_value);
            sum_envelope.add(row.envelope_value_upper);
            sum_residual.add(row.residual);
            min_potential = min_potential.min(row.potential_value);
            max_potential = max_potential.max(row.potential_value);
        }
        csv.cell(k)
            .cell(sum_potential.value() / count)
            .cell(min_potential)
            .cell(max_potential)
            .cell(sum_envelope.value() / count)
            .cell(sum_residual.value() / count);
        csv.end_row();
    }
    csv.write(path)
}

pub fn run(config: &RunConfig, out: &Path, seed_override: Option<u64>) -> Result<ExitCode> {
    let start = Instant::now();
    let potential = config.potential_section()?.build()?;
    let section = config.sampler_section()?;
    let kind = section.chain_kind()?;
    let sampler = section.to_sampler_config(seed_override)?;
    let initial = vec![section.initial; potential.dimension()];

    let traces: Vec<ChainTrace<f64>> = if section.replicas == 1 {
        vec![run_chain(kind, potential.as_ref(), &sampler, &initial)?]
    } else {
        run_replicated(kind, potential.as_ref(), &sampler, &initial, section.replicas)?
    };

    let rows = write_trace(&out.join("trace.csv"), &traces[0])?;
    write_state_binary(&out.join("final_state.bin"), &traces[0].final_state)?;
    if section.replicas > 1 {
        write_replica_summary(&out.join("replicas_summary.csv"), &traces)?;
    }

    let rng_draw_count: u64 = traces.iter().map(|t| t.rng_draw_count).sum();
    let summary = json!({
        "command": "sample",
        "sampler": kind.name(),
        "replicas": section.replicas,
        "trace_rows": rows,
        "rng_draw_count": rng_draw_count,
        "runtime_seconds": start.elapsed().as_secs_f64(),
        "config": serde_json::to_value(config)?,
    });
    write_json(&out.join("summary.json"), &summary)?;

    println!(
        "sample: {} steps x {} replica(s) of {} -> {} ({} trace rows)",
        sampler.steps,
        section.replicas,
        kind.name(),
        out.display(),
        rows
    );
    Ok(ExitCode::SUCCESS)
}
