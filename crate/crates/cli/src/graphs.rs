use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bosewalk::fock::{composition_weights, dual_graph_with_cap, multi_spin_dual_with_cap, spin_sector_decomposition};
use bosewalk::graph::{
    build_complete4, build_complete4_counterexample, build_g_line, build_hypercube, build_phased_square,
    build_triangle_complex, build_two_site, build_weighted_chain, parse_graph, rescale_to_max_weight,
    HermitianWeightedGraph,
};
use bosewalk::hierarchy::{build_loaded, estimate_size, load_leaves, parse_hierarchy};
use clap::{ArgGroup, Args, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::display;
use crate::{parse, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Two vertices joined by a unit edge.
    TwoSite,
    /// The quantum wire on N + 1 vertices (`--n`).
    GLine,
    /// Path with the given complex weights (`--weights`).
    Chain,
    /// Unit hypercube of dimension `--d`.
    Hypercube,
    /// Triangle with hops i/sqrt(3).
    Triangle,
    /// Square with phases `--alpha`, `--beta`, `--gamma`.
    Square,
    /// Complete graph with cycle weight `--a` and diagonal weight `--b`.
    K4,
    /// K4 with a = i/sqrt(2), b = i.
    K4Counterexample,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Complex weight, e.g. `0.5`, `i`, `0.3-0.7i`.
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    a: Option<Complex64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    b: Option<Complex64>,
    /// Comma-separated complex weights for `chain`.
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Vec<Complex64>,
    /// Output file stem; defaults to the family name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("particles").required(true).args(["bosons", "sectors"])))]
pub struct DualArgs {
    /// Graph document written by `graph`, `dual` or `hierarchy`.
    graph: PathBuf,
    /// Number of identical bosons.
    #[arg(long)]
    bosons: Option<u32>,
    /// Per-spin boson counts, e.g. `1,1,1`.
    #[arg(long, value_delimiter = ',')]
    sectors: Option<Vec<u32>>,
    /// Spin-component probabilities of a product initial state; with `--bosons`,
    /// reports the weight of every spin composition and the sector patterns.
    #[arg(long, value_delimiter = ',', requires = "bosons")]
    probabilities: Option<Vec<f64>>,
    #[arg(long, default_value = "dual")]
    name: String,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    /// e.g. `2 on (2 on 2)`, `(2 on (2 on 2))^2`, `3 on SQ(0.3,0.7,1.0)`, `2 on @g.graph.json`.
    expression: String,
    /// Divide all weights by the largest one; hitting times scale by the reported factor.
    #[arg(long)]
    rescale: bool,
    #[arg(long, default_value = "hierarchy")]
    name: String,
}

fn usage(msg: &str) -> CliError {
    CliError::usage(msg)
}

fn build_family(a: &GraphArgs) -> Result<HermitianWeightedGraph, CliError> {
    Ok(match a.family {
        Family::TwoSite => build_two_site(),
        Family::GLine => build_g_line(a.n.ok_or_else(|| usage("g-line needs --n"))?)?,
        Family::Chain => {
            if a.weights.is_empty() {
                return Err(usage("chain needs --weights"));
            }
            build_weighted_chain(&a.weights)?
        }
        Family::Hypercube => build_hypercube(a.d.ok_or_else(|| usage("hypercube needs --d"))?)?,
        Family::Triangle => build_triangle_complex(),
        Family::Square => build_phased_square(a.alpha, a.beta, a.gamma),
        Family::K4 => match (a.a, a.b) {
            (Some(x), Some(y)) => build_complete4(x, y)?,
            _ => return Err(usage("k4 needs --a and --b")),
        },
        Family::K4Counterexample => build_complete4_counterexample(),
    })
}

pub fn load_graph(path: &Path) -> Result<HermitianWeightedGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_graph(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Resolves a path against the working directory and checks that it exists.
pub fn resolve(path: &Path) -> Result<PathBuf, CliError> {
    fs::canonicalize(path).map_err(|e| CliError::io(path, e))
}

/// Vertex and edge counts and the multiset of weight magnitudes.
pub fn graph_summary(g: &HermitianWeightedGraph) -> Value {
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for e in g.edges() {
        *histogram.entry(format!("{:.9}", e.w.norm())).or_default() += 1;
    }
    json!({
        "vertex_count": g.vertex_count(),
        "edge_count": g.edge_count(),
        "max_weight": g.max_weight(),
        "weight_histogram": histogram
            .into_iter()
            .map(|(w, count)| json!({ "magnitude": w, "count": count }))
            .collect::<Vec<_>>(),
        "units": "weights in tau",
    })
}

fn finish(ctx: &Context, name: &str, config: Value, g: &HermitianWeightedGraph, mut extra: Value) -> Result<(), CliError> {
    let out = ctx.emitter(&config)?;
    let mut files = out.graph(name, g)?;
    let mut summary = graph_summary(g);
    summary["parameters"] = config;
    if let Value::Object(m) = extra.take() {
        for (k, v) in m {
            summary[k] = v;
        }
    }
    files.push(out.document(&format!("{name}.summary"), &summary)?);
    println!(
        "{name}: {} vertices, {} edges -> {}",
        g.vertex_count(),
        g.edge_count(),
        files.iter().map(|p| display(p)).collect::<Vec<_>>().join(", ")
    );
    Ok(())
}

fn family_name(f: Family) -> String {
    f.to_possible_value().expect("no skipped variants").get_name().to_string()
}

pub fn graph(ctx: &Context, a: GraphArgs) -> Result<(), CliError> {
    let g = build_family(&a)?;
    let family = family_name(a.family);
    let config = json!({
        "verb": "graph",
        "family": family,
        "n": a.n,
        "d": a.d,
        "alpha": a.alpha,
        "beta": a.beta,
        "gamma": a.gamma,
        "a": a.a.map(|z| [z.re, z.im]),
        "b": a.b.map(|z| [z.re, z.im]),
        "weights": a.weights.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    });
    let name = a.name.unwrap_or(family);
    finish(ctx, &name, config, &g, json!({}))
}

pub fn dual(ctx: &Context, a: DualArgs) -> Result<(), CliError> {
    let path = resolve(&a.graph)?;
    let g = load_graph(&path)?;
    let d = match (&a.sectors, a.bosons) {
        (Some(s), _) => multi_spin_dual_with_cap(&g, s, ctx.cap)?,
        (None, Some(n)) => dual_graph_with_cap(&g, n, ctx.cap)?,
        (None, None) => unreachable!("clap requires one of --bosons, --sectors"),
    };
    let mut extra = json!({});
    if let (Some(p), Some(n)) = (&a.probabilities, a.bosons) {
        let weights = composition_weights(p, n)?;
        let patterns = spin_sector_decomposition(n, p.len() as u32);
        extra["spin_compositions"] = weights
            .into_iter()
            .map(|(counts, w)| json!({ "counts": counts, "weight": w }))
            .collect();
        extra["sector_patterns"] = patterns
            .into_iter()
            .map(|p| json!({ "parts": p.parts, "multiplicity": p.multiplicity.to_string() }))
            .collect();
    }
    let config = json!({
        "verb": "dual",
        "graph": display(&path),
        "bosons": a.bosons,
        "sectors": a.sectors,
        "probabilities": a.probabilities,
        "cap": ctx.cap,
    });
    finish(ctx, &a.name, config, &d, extra)
}

pub fn hierarchy(ctx: &Context, a: HierarchyArgs) -> Result<(), CliError> {
    let spec = parse_hierarchy(&a.expression)?;
    let mut missing = None;
    let spec = spec.map_files(&mut |p| match resolve(&p) {
        Ok(abs) => abs,
        Err(e) => {
            missing.get_or_insert(e);
            p
        }
    });
    if let Some(e) = missing {
        return Err(e);
    }
    let leaves = load_leaves(&spec)?;
    let size = estimate_size(&spec, &leaves, ctx.cap)?;
    let mut g = build_loaded(&spec, &leaves, ctx.cap)?;
    let mut extra = json!({ "canonical": spec.to_string(), "estimated_vertices": size.to_string() });
    if a.rescale {
        let (unit, scale) = rescale_to_max_weight(&g)?;
        extra["rescale_factor"] = json!(scale);
        extra["note"] = json!("hitting times of the rescaled graph are rescale_factor times the original");
        g = unit;
    }
    let config = json!({
        "verb": "hierarchy",
        "expression": spec.to_string(),
        "rescale": a.rescale,
        "cap": ctx.cap,
    });
    finish(ctx, &a.name, config, &g, extra)
}
