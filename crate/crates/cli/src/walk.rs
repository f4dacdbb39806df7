use std::path::PathBuf;

use bosewalk::ctqw::{
    self, certify_with_spectrum, default_t_max, eigendecompose, find_hitting_time, greedy_classical_walk,
    spectrum_checks, DEFAULT_SAMPLES,
};
use clap::Args;
use serde_json::json;

use crate::error::CliError;
use crate::graphs::{load_graph, resolve};
use crate::output::{display, to_value};
use crate::{parse, Context};

/// Relative tolerance for the spectral symmetry and commensurability checks.
const SPECTRUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Graph document.
    graph: PathBuf,
    /// Input vertex: a label, or an index (`#3` forces the index reading).
    #[arg(long = "in")]
    input: String,
    #[arg(long = "out")]
    output: String,
    /// Search window for the hitting time, e.g. `4pi`; defaults to 4 pi V / max weight.
    #[arg(long, value_parser = parse::time)]
    tmax: Option<f64>,
    /// Also certify transfer at exactly this time, e.g. `pi/2`.
    #[arg(long, value_parser = parse::time)]
    expected_t: Option<f64>,
    /// Grid points for the hitting-time scan.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Rows in the probability trace over [0, tmax].
    #[arg(long, default_value_t = 1001)]
    trace_points: usize,
    /// Step budget of the greedy classical walk.
    #[arg(long, default_value_t = 64)]
    greedy_steps: usize,
    #[arg(long, default_value = "walk")]
    name: String,
}

pub fn walk(ctx: &Context, a: WalkArgs) -> Result<(), CliError> {
    let path = resolve(&a.graph)?;
    let g = load_graph(&path)?;
    let input = parse::vertex(&g, &a.input).map_err(CliError::Validation)?;
    let output = parse::vertex(&g, &a.output).map_err(CliError::Validation)?;
    let t_max = a.tmax.unwrap_or_else(|| default_t_max(&g));
    if a.trace_points < 2 {
        return Err(CliError::usage("--trace-points must be at least 2"));
    }
    let spec = eigendecompose(&g)?;
    let found = find_hitting_time(&spec, input, output, t_max, a.samples)?;
    let at_expected = a
        .expected_t
        .map(|t| certify_with_spectrum(&spec, &g, input, output, Some(t)))
        .transpose()?;
    let checks = spectrum_checks(&spec, SPECTRUM_TOLERANCE);
    let greedy = greedy_classical_walk(&g, input, a.greedy_steps)?;

    let config = json!({
        "verb": "walk",
        "graph": display(&path),
        "in": input,
        "out": output,
        "tmax": t_max,
        "expected_t": a.expected_t,
        "samples": a.samples,
        "trace_points": a.trace_points,
        "greedy_steps": a.greedy_steps,
    });
    let out = ctx.emitter(&config)?;
    let label = |v: usize| g.label(v).map(str::to_string);
    let report = json!({
        "parameters": config,
        "in": { "index": input, "label": label(input) },
        "out": { "index": output, "label": label(output) },
        "units": "times in 1/tau, eigenvalues in tau",
        "hitting_time_search": to_value(&found),
        "at_expected_t": at_expected.as_ref().map(to_value),
        "spectrum": {
            "eigenvalues": spec.eigenvalues(),
            "checks": to_value(&checks),
        },
        "greedy_classical": {
            "visited": greedy.visited,
            "reached_out_at_step": greedy.reached.get(&output),
            "distinct_vertices": greedy.reached.len(),
        },
    });
    let doc = out.document(&format!("{}.certificate", a.name), &report)?;
    let times: Vec<f64> = (0..a.trace_points)
        .map(|k| t_max * k as f64 / (a.trace_points - 1) as f64)
        .collect();
    let probs = ctqw::transfer_probability(&spec, input, output, &times)?;
    let trace = out.table(
        &format!("{}.trace", a.name),
        &["t[1/tau]", "probability"],
        times.iter().zip(&probs).map(|(t, p)| vec![format!("{t:.12e}"), format!("{p:.12e}")]),
    )?;
    let shown = at_expected.as_ref().unwrap_or(&found);
    println!(
        "{} -> {}: peak {:.12} at t = {:.12} ({}) -> {}, {}",
        input,
        output,
        shown.peak_probability,
        shown.hitting_time,
        if shown.certified { "certified" } else { "not certified" },
        display(&doc),
        display(&trace)
    );
    Ok(())
}
