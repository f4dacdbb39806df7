use std::fs;
use std::path::PathBuf;

use bosewalk::lattice::{
    convergence_gate, run_transfer_experiment, LatticeConfig, PhysicalUnits, Profile, TracePoint, TransferReport,
};
use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::graphs::resolve;
use crate::output::{display, to_value, Emitter};
use crate::Context;

fn profile(s: &str) -> Result<Profile, String> {
    match s {
        "quadratic" => Ok(Profile::Quadratic),
        "gaussian" => Ok(Profile::Gaussian),
        _ => Err(format!("unknown profile `{s}` (quadratic | gaussian)")),
    }
}

/// Flags that override keys of the TOML config; names match the file keys.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_parser = profile)]
    profile: Option<Profile>,
    #[arg(long)]
    profile_width: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    points_per_well: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j0: Option<f64>,
    #[arg(long)]
    packet_width: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    damping_until: Option<f64>,
    #[arg(long)]
    samples_per_unit: Option<f64>,
}

impl Overrides {
    fn apply(&self, c: &mut LatticeConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(sites, s0, a, profile, g, points_per_well, dt, j0, packet_width, window, samples_per_unit);
        if self.profile_width.is_some() {
            c.profile_width = self.profile_width;
        }
        if self.damping_until.is_some() {
            c.damping_until = self.damping_until;
        }
    }
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// TOML file with `key = value` lines; keys are the long flag names with underscores.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Before the experiment, compare runs with dt and dt/2 up to this time and
    /// abort if the final mirror fidelities differ by 1e-4 or more.
    #[arg(long)]
    check_convergence: Option<f64>,
    #[arg(long, default_value = "lattice")]
    name: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Base configuration; flags below replace one key with a list of values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j0: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    g: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    s0: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = profile)]
    profile: Vec<Profile>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "sweep")]
    name: String,
}

fn load_config(path: Option<&PathBuf>) -> Result<LatticeConfig, CliError> {
    let Some(p) = path else {
        return Ok(LatticeConfig::default());
    };
    let p = resolve(p)?;
    let text = fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
}

fn units_block() -> Value {
    let u = PhysicalUnits::rb87_800nm();
    json!({
        "atom": "87Rb",
        "mass_kg": u.mass_kg,
        "wavelength_m": u.wavelength_m,
        "recoil_energy_joule": u.recoil_energy_joule(),
        "time_unit_seconds": u.time_unit_seconds(),
    })
}

fn report_doc(config: &LatticeConfig, report: &TransferReport, convergence: Option<f64>) -> Value {
    json!({
        "config": to_value(config),
        "units": "lengths in 1/k, energies in E_R, times in hbar/E_R unless suffixed _tau (1/tau(s0)) or _ms",
        "report": to_value(report),
        "physical_units": units_block(),
        "convergence_gate_difference": convergence,
    })
}

fn write_trace(out: &Emitter, name: &str, trace: &[TracePoint]) -> Result<PathBuf, CliError> {
    out.table(
        name,
        &["t[hbar/E_R]", "mirror_fidelity", "norm", "mean_x[1/k]", "window_population"],
        trace.iter().map(|p| {
            vec![
                format!("{:.6}", p.t),
                format!("{:.12e}", p.fidelity),
                format!("{:.15}", p.norm),
                format!("{:.9}", p.mean_x),
                format!("{:.12e}", p.window_population),
            ]
        }),
    )
}

fn describe(r: &TransferReport) -> String {
    format!(
        "peak mirror fidelity {:.4} at t = {:.1} hbar/E_R ({:.1} ms; theory {:.1}, {:+.1}%){}",
        r.peak_mirror_fidelity,
        r.hitting_time,
        r.hitting_time_ms,
        r.theory_time,
        100.0 * r.relative_deviation,
        if r.periphery_trapped { ", trapped at the periphery" } else { "" }
    )
}

pub fn lattice(ctx: &Context, a: LatticeArgs) -> Result<(), CliError> {
    let mut config = load_config(a.config.as_ref())?;
    a.overrides.apply(&mut config);
    config.validate()?;
    let convergence = a.check_convergence.map(|t| convergence_gate(&config, t)).transpose()?;
    let (report, trace) = run_transfer_experiment(&config)?;
    let out = ctx.emitter(&json!({ "verb": "lattice", "config": to_value(&config), "check_convergence": a.check_convergence }))?;
    let doc = out.document(&format!("{}.report", a.name), &report_doc(&config, &report, convergence))?;
    let tr = write_trace(&out, &format!("{}.trace", a.name), &trace)?;
    println!("{} -> {}, {}", describe(&report), display(&doc), display(&tr));
    Ok(())
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> Result<(), CliError> {
    let base = load_config(a.config.as_ref())?;
    let axis = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
    let profiles = if a.profile.is_empty() { vec![base.profile] } else { a.profile.clone() };
    let mut configs = Vec::new();
    for &s0 in &axis(&a.s0, base.s0) {
        for &aa in &axis(&a.a, base.a) {
            for &p in &profiles {
                for &g in &axis(&a.g, base.g) {
                    for &j0 in &axis(&a.j0, base.j0) {
                        configs.push(LatticeConfig { s0, a: aa, profile: p, g, j0, ..base.clone() });
                    }
                }
            }
        }
    }
    for c in &configs {
        c.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let results: Vec<_> = pool.install(|| configs.par_iter().map(run_transfer_experiment).collect());

    let all = json!({ "verb": "sweep", "configs": configs.iter().map(to_value).collect::<Vec<_>>() });
    let out = ctx.emitter(&all)?;
    let mut rows = Vec::new();
    let mut first_error = None;
    for (k, (c, r)) in configs.iter().zip(results).enumerate() {
        let stem = format!("{}-{k:03}", a.name);
        match r {
            Ok((report, trace)) => {
                out.document(&format!("{stem}.report"), &report_doc(c, &report, None))?;
                write_trace(&out, &format!("{stem}.trace"), &trace)?;
                println!("{stem}: j0={} a={} g={} s0={} {:?}: {}", c.j0, c.a, c.g, c.s0, c.profile, describe(&report));
                rows.push(json!({
                    "run": stem, "j0": c.j0, "a": c.a, "g": c.g, "s0": c.s0, "profile": to_value(&c.profile),
                    "peak_mirror_fidelity": report.peak_mirror_fidelity,
                    "hitting_time": report.hitting_time,
                    "relative_deviation": report.relative_deviation,
                    "periphery_trapped": report.periphery_trapped,
                    "damping_time": report.damping_time,
                }));
            }
            Err(e) => {
                eprintln!("{stem}: {e}");
                rows.push(json!({ "run": stem, "error": e.to_string() }));
                first_error.get_or_insert(e);
            }
        }
    }
    let summary = out.document(&format!("{}.summary", a.name), &json!({ "runs": rows }))?;
    println!("summary -> {}", display(&summary));
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
