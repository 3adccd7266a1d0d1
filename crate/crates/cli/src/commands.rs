//! Subcommand definitions and their execution.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ngd::analytics::{decay_audit, decay_profile, mfpt_solve, mfpt_spectral, stationary_distribution, DECAY_CONSTANT};
use ngd::compat::{check_compatibility, conditioned_transition, EdgeMask};
use ngd::dynamics::{
    log_grid, normalized_spectrum, point_mass, return_probability, simulate, transition_matrix, uniform,
};
use ngd::generators::{gen_barabasi_albert, gen_cycle, gen_path, BAConfig, EdgeWeights};
use ngd::io::{fmt_f64, matrix_csv, read_graph, write_edge_list, write_matrix_market};
use ngd::nonlocal::DistanceKind;
use ngd::{
    beta_heuristic, fractional_graph, laplacian, normalized_laplacian, path_graph, regularize, DistanceTables, Graph,
    KernelSpec, NonlocalGraph,
};

use crate::manifest::{OutputDir, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKernel {
    Mellin,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Fractional,
    Mellin,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceArg {
    /// Hop count.
    Comb,
    /// Weighted shortest path.
    Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Against {
    Fractional,
    Path,
    Regularized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MfptMethod {
    Spectral,
    Solve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Mtx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Beta {
    Auto,
    Value(f64),
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    if s == "auto" {
        return Ok(Beta::Auto);
    }
    match s.parse::<f64>() {
        Ok(b) if b.is_finite() && b > 0.0 => Ok(Beta::Value(b)),
        _ => Err(format!("expected `auto` or a positive number, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Uniform,
    Stationary,
    Node(usize),
}

fn parse_start(s: &str) -> Result<Start, String> {
    match s {
        "uniform" => Ok(Start::Uniform),
        "stationary" => Ok(Start::Stationary),
        _ => s
            .parse()
            .map(Start::Node)
            .map_err(|_| format!("expected `uniform`, `stationary` or a node index, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

fn parse_grid(s: &str) -> Result<TimeGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let err = || format!("expected `lo:hi:count` with 0 < lo <= hi, got {s:?}");
    if parts.len() != 3 {
        return Err(err());
    }
    let lo: f64 = parts[0].parse().map_err(|_| err())?;
    let hi: f64 = parts[1].parse().map_err(|_| err())?;
    let count: usize = parts[2].parse().map_err(|_| err())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && count >= 1) {
        return Err(err());
    }
    Ok(TimeGrid { lo, hi, count })
}

fn fractional_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a <= 1.0 => Ok(a),
        _ => Err(format!("fractional alpha must lie in (0, 1], got {s:?}")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a.is_finite() && a > 0.0 => Ok(a),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// Which non-local graph to build from the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct NonlocalArgs {
    /// Non-local construction.
    #[arg(long, value_enum, default_value_t = KernelArg::Fractional)]
    pub kernel: KernelArg,
    /// Fractional exponent in (0, 1], or path-kernel parameter > 0.
    #[arg(long, value_parser = positive)]
    pub alpha: Option<f64>,
    /// Distance for path kernels.
    #[arg(long, value_enum, default_value_t = DistanceArg::Comb)]
    pub distance: DistanceArg,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum Generator {
    /// Cycle on n nodes; edge k joins k and k+1 mod n.
    Cycle {
        #[arg(long)]
        n: usize,
        /// Weight of every edge.
        #[arg(long, default_value_t = 1.0, conflicts_with = "weights")]
        weight: f64,
        /// Comma-separated per-edge weights.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Unweighted path on n nodes.
    Path {
        #[arg(long)]
        n: usize,
    },
    /// Weighted preferential-attachment network.
    Ba {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        n0: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "operation", rename_all = "kebab-case")]
pub enum Command {
    /// Write the Laplacian D - A and the normalized Laplacian I - D^-1 A.
    Laplacian { graph: PathBuf },
    /// Fractional graph from the alpha-th power of the Laplacian.
    Fractional {
        graph: PathBuf,
        #[arg(long, value_parser = fractional_alpha)]
        alpha: f64,
    },
    /// Path graph with weights h_alpha(distance).
    Path {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kernel: PathKernel,
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = DistanceArg::Comb)]
        distance: DistanceArg,
    },
    /// Keep base edges and scale the non-local weights elsewhere by beta.
    Regularize {
        graph: PathBuf,
        #[command(flatten)]
        nonlocal: NonlocalArgs,
        /// Scale factor, or `auto` for min base weight / max off-edge weight.
        #[arg(long, default_value = "auto", value_parser = parse_beta)]
        beta: Beta,
    },
    /// Test whether a supergraph preserves the base walk's weight ratios.
    CheckCompat {
        base: PathBuf,
        /// Build the supergraph from the base graph.
        #[arg(long, value_enum, required_unless_present = "sup", conflicts_with = "sup")]
        against: Option<Against>,
        #[command(flatten)]
        nonlocal: NonlocalArgs,
        #[arg(long, default_value = "auto", value_parser = parse_beta)]
        beta: Beta,
        /// Read the supergraph from a file instead.
        #[arg(long = "super")]
        sup: Option<PathBuf>,
        /// Relative tolerance on ratio deviations.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Monte Carlo random walks.
    Walk {
        graph: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `uniform`, `stationary` or a node index.
        #[arg(long, default_value = "uniform", value_parser = parse_start)]
        start: Start,
        /// Restrict moves to the edges of this graph.
        #[arg(long)]
        conditioned_on: Option<PathBuf>,
        /// Also write every trajectory.
        #[arg(long)]
        trajectories: bool,
    },
    /// Stationary distribution, passage times, return probability and decay.
    #[command(group = clap::ArgGroup::new("quantity").required(true).multiple(true))]
    Analyze {
        graph: PathBuf,
        #[arg(long, group = "quantity")]
        stationary: bool,
        #[arg(long, group = "quantity")]
        mfpt: bool,
        #[arg(long, group = "quantity")]
        trapping: bool,
        #[arg(long, group = "quantity")]
        return_prob: bool,
        /// Log-spaced times `lo:hi:count`.
        #[arg(long, default_value = "1e-2:1e3:61", value_parser = parse_grid)]
        t_grid: TimeGrid,
        /// Audit the fractional weights against the decay bound.
        #[arg(long, group = "quantity")]
        decay_audit: bool,
        #[arg(long, default_value_t = 0.5, value_parser = fractional_alpha)]
        alpha: f64,
        /// Decay bound constant.
        #[arg(long, default_value_t = DECAY_CONSTANT)]
        c: f64,
        #[arg(long, value_enum, default_value_t = MfptMethod::Spectral)]
        method: MfptMethod,
    },
    /// Write a generated graph.
    Generate {
        #[command(subcommand)]
        family: Generator,
        #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
        format: Format,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Laplacian { .. } => "laplacian",
            Command::Fractional { .. } => "fractional",
            Command::Path { .. } => "path",
            Command::Regularize { .. } => "regularize",
            Command::CheckCompat { .. } => "check-compat",
            Command::Walk { .. } => "walk",
            Command::Analyze { .. } => "analyze",
            Command::Generate { .. } => "generate",
        }
    }

    /// Consistency checks clap cannot express; failures are usage errors.
    pub fn check(&self) -> std::result::Result<(), String> {
        let need_alpha = |nl: &NonlocalArgs| -> std::result::Result<(), String> {
            match (nl.kernel, nl.alpha) {
                (_, None) => Err("--alpha is required".into()),
                (KernelArg::Fractional, Some(a)) if a > 1.0 => {
                    Err(format!("fractional alpha must lie in (0, 1], got {a}"))
                }
                _ => Ok(()),
            }
        };
        match self {
            Command::Regularize { nonlocal, .. } => need_alpha(nonlocal),
            Command::CheckCompat { against: Some(against), nonlocal, .. } => {
                if *against == Against::Path && nonlocal.kernel == KernelArg::Fractional {
                    return Err("--against path needs --kernel mellin or --kernel laplace".into());
                }
                need_alpha(nonlocal)
            }
            Command::Generate { family: Generator::Ba { theta, .. }, .. } if !(0.0..1.0).contains(theta) => {
                Err(format!("--theta must lie in [0, 1), got {theta}"))
            }
            _ => Ok(()),
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Laplacian { graph }
            | Command::Fractional { graph, .. }
            | Command::Path { graph, .. }
            | Command::Regularize { graph, .. }
            | Command::Analyze { graph, .. } => vec![graph],
            Command::CheckCompat { base, sup, .. } => std::iter::once(base.as_path()).chain(sup.as_deref()).collect(),
            Command::Walk { graph, conditioned_on, .. } => {
                std::iter::once(graph.as_path()).chain(conditioned_on.as_deref()).collect()
            }
            Command::Generate { .. } => vec![],
        }
    }

    /// Replaces input paths by absolute ones so a manifest can be replayed
    /// from any working directory.
    pub fn canonicalize(&mut self) -> Result<()> {
        let fix = |p: &mut PathBuf| -> Result<()> {
            *p = p.canonicalize().with_context(|| format!("reading {}", p.display()))?;
            Ok(())
        };
        match self {
            Command::Laplacian { graph }
            | Command::Fractional { graph, .. }
            | Command::Path { graph, .. }
            | Command::Regularize { graph, .. }
            | Command::Analyze { graph, .. } => fix(graph),
            Command::CheckCompat { base, sup, .. } => {
                fix(base)?;
                sup.as_mut().map_or(Ok(()), fix)
            }
            Command::Walk { graph, conditioned_on, .. } => {
                fix(graph)?;
                conditioned_on.as_mut().map_or(Ok(()), fix)
            }
            Command::Generate { .. } => Ok(()),
        }
    }
}

fn load(path: &Path) -> Result<Graph> {
    read_graph(path).with_context(|| format!("loading {}", path.display()))
}

fn distance_kind(d: DistanceArg) -> DistanceKind {
    match d {
        DistanceArg::Comb => DistanceKind::Combinatorial,
        DistanceArg::Sp => DistanceKind::WeightedShortestPath,
    }
}

fn build_path(base: &Graph, kernel: PathKernel, alpha: f64, distance: DistanceArg) -> Result<NonlocalGraph> {
    let spec = match kernel {
        PathKernel::Mellin => KernelSpec::mellin(alpha, distance_kind(distance)),
        PathKernel::Laplace => KernelSpec::laplace(alpha, distance_kind(distance)),
    };
    Ok(path_graph(base, &spec, &DistanceTables::new(base))?)
}

fn build_nonlocal(base: &Graph, args: &NonlocalArgs) -> Result<NonlocalGraph> {
    let alpha = args.alpha.context("--alpha is required")?;
    match args.kernel {
        KernelArg::Fractional => Ok(fractional_graph(base, alpha)?),
        KernelArg::Mellin => build_path(base, PathKernel::Mellin, alpha, args.distance),
        KernelArg::Laplace => build_path(base, PathKernel::Laplace, alpha, args.distance),
    }
}

fn kernel_label(args: &NonlocalArgs) -> String {
    match args.kernel {
        KernelArg::Fractional => "fractional".into(),
        KernelArg::Mellin => format!("mellin/{:?}", args.distance).to_lowercase(),
        KernelArg::Laplace => format!("laplace/{:?}", args.distance).to_lowercase(),
    }
}

fn resolve_beta(base: &Graph, nonlocal: &NonlocalGraph, beta: Beta) -> Result<f64> {
    match beta {
        Beta::Auto => Ok(beta_heuristic(base, nonlocal)?),
        Beta::Value(b) => Ok(b),
    }
}

fn write_graph_outputs(out: &mut OutputDir, g: &Graph) -> Result<()> {
    out.write("weights.csv", &matrix_csv(g.weights()))?;
    out.write("laplacian.csv", &matrix_csv(&laplacian(g).entries))?;
    out.write("normalized_laplacian.csv", &matrix_csv(&normalized_laplacian(g).entries))?;
    out.write("graph.tsv", &write_edge_list(g))
}

fn vector_csv(header: &str, values: &[f64]) -> String {
    let mut s = format!("{header}\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt_f64(*v));
    }
    s
}

/// Runs `command`, writing its outputs and manifest into `out`.
pub fn execute(command: &Command, argv: Vec<String>, out: &Path) -> Result<RunManifest> {
    let inputs = command.inputs().into_iter().map(RunManifest::input_record).collect::<Result<Vec<_>>>()?;
    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        operation: command.name().to_string(),
        inputs,
        alpha: None,
        beta: None,
        kernel: None,
        seed: None,
        tolerance: None,
        argv,
        command: command.clone(),
        outputs: Vec::new(),
    };
    let mut dir = OutputDir::create(out)?;

    match command {
        Command::Laplacian { graph } => {
            let g = load(graph)?;
            dir.write("laplacian.csv", &matrix_csv(&laplacian(&g).entries))?;
            dir.write("normalized_laplacian.csv", &matrix_csv(&normalized_laplacian(&g).entries))?;
            println!("n={} edges={}", g.n(), g.edge_count());
        }
        Command::Fractional { graph, alpha } => {
            let g = load(graph)?;
            let f = fractional_graph(&g, *alpha)?;
            write_graph_outputs(&mut dir, &f.graph)?;
            manifest.alpha = Some(*alpha);
            manifest.kernel = Some("fractional".into());
            println!("n={} edges={} clamped={}", f.graph.n(), f.graph.edge_count(), f.clamped);
        }
        Command::Path { graph, kernel, alpha, distance } => {
            let g = load(graph)?;
            let p = build_path(&g, *kernel, *alpha, *distance)?;
            write_graph_outputs(&mut dir, &p.graph)?;
            manifest.alpha = Some(*alpha);
            manifest.kernel = Some(format!("{kernel:?}/{distance:?}").to_lowercase());
            println!("n={} edges={}", p.graph.n(), p.graph.edge_count());
        }
        Command::Regularize { graph, nonlocal, beta } => {
            let g = load(graph)?;
            let nl = build_nonlocal(&g, nonlocal)?;
            let b = resolve_beta(&g, &nl, *beta)?;
            let r = regularize(&g, &nl, b)?;
            write_graph_outputs(&mut dir, &r.graph)?;
            manifest.alpha = nonlocal.alpha;
            manifest.beta = Some(b);
            manifest.kernel = Some(kernel_label(nonlocal));
            println!("beta={}", fmt_f64(b));
        }
        Command::CheckCompat { base, against, nonlocal, beta, sup, tolerance } => {
            let g = load(base)?;
            let h = match (sup, against) {
                (Some(path), _) => load(path)?,
                (None, Some(Against::Fractional)) => {
                    fractional_graph(&g, nonlocal.alpha.context("--alpha is required")?)?.graph
                }
                (None, Some(Against::Path)) => build_nonlocal(&g, nonlocal)?.graph,
                (None, Some(Against::Regularized)) => {
                    let nl = build_nonlocal(&g, nonlocal)?;
                    let b = resolve_beta(&g, &nl, *beta)?;
                    manifest.beta = Some(b);
                    regularize(&g, &nl, b)?.graph
                }
                (None, None) => anyhow::bail!("either --against or --super is required"),
            };
            if sup.is_none() {
                manifest.alpha = nonlocal.alpha;
                manifest.kernel = Some(match against {
                    Some(Against::Fractional) => "fractional".into(),
                    _ => kernel_label(nonlocal),
                });
            }
            manifest.tolerance = Some(*tolerance);
            let report = check_compatibility(&g, &h, None, *tolerance)?;
            dir.write("report.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
            let mut csv = String::from("node,j,k,base_ratio,super_ratio,deviation\n");
            for w in &report.witnesses {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    w.node,
                    w.j,
                    w.k,
                    fmt_f64(w.base_ratio),
                    fmt_f64(w.super_ratio),
                    fmt_f64(w.deviation)
                );
            }
            dir.write("witnesses.csv", &csv)?;
            println!("{}", if report.compatible { "compatible" } else { "incompatible" });
            println!("worst_ratio_deviation={}", fmt_f64(report.worst_ratio_deviation));
            for w in report.witnesses.iter().take(5) {
                println!(
                    "witness node={} j={} k={} base_ratio={} super_ratio={} deviation={}",
                    w.node, w.j, w.k, w.base_ratio, w.super_ratio, w.deviation
                );
            }
        }
        Command::Walk { graph, walks, steps, seed, start, conditioned_on, trajectories } => {
            let g = load(graph)?;
            let p = match conditioned_on {
                Some(path) => conditioned_transition(&g, &EdgeMask::of(&load(path)?))?,
                None => transition_matrix(&g),
            };
            let nu = match start {
                Start::Uniform => uniform(g.n()),
                Start::Stationary => stationary_distribution(&g),
                Start::Node(v) if *v < g.n() => point_mass(g.n(), *v),
                Start::Node(v) => anyhow::bail!("start node {v} out of range for n={}", g.n()),
            };
            let ensemble = simulate(&p, &nu, *walks, *steps, *seed)?;
            let freq = ensemble.visit_frequencies();
            let mut csv = String::from("node,count,frequency\n");
            for (i, (c, f)) in ensemble.visit_histogram.iter().zip(&freq).enumerate() {
                let _ = writeln!(csv, "{i},{c},{}", fmt_f64(*f));
            }
            dir.write("visits.csv", &csv)?;
            if *trajectories {
                let mut t = String::new();
                for walk in &ensemble.trajectories {
                    let row: Vec<String> = walk.iter().map(|v| v.to_string()).collect();
                    t.push_str(&row.join(","));
                    t.push('\n');
                }
                dir.write("trajectories.csv", &t)?;
            }
            manifest.seed = Some(*seed);
            println!("walks={walks} steps={steps} seed={seed}");
        }
        Command::Analyze {
            graph,
            stationary,
            mfpt,
            trapping,
            return_prob,
            t_grid,
            decay_audit: audit,
            alpha,
            c,
            method,
        } => {
            let g = load(graph)?;
            if *stationary {
                dir.write("stationary.csv", &vector_csv("node,pi", &stationary_distribution(&g)))?;
            }
            if *mfpt || *trapping {
                let times = match method {
                    MfptMethod::Spectral => mfpt_spectral(&g)?,
                    MfptMethod::Solve => mfpt_solve(&g)?,
                };
                if *mfpt {
                    dir.write("mfpt.csv", &matrix_csv(&times.mfpt))?;
                }
                if *trapping {
                    dir.write("trapping.csv", &vector_csv("node,trapping_time", &times.trapping))?;
                }
            }
            if *return_prob {
                let times = log_grid(t_grid.lo, t_grid.hi, t_grid.count);
                let curve = return_probability(&normalized_spectrum(&g)?, &times, "graph");
                let mut csv = String::from("t,p\n");
                for (t, p) in curve.times.iter().zip(&curve.values) {
                    let _ = writeln!(csv, "{},{}", fmt_f64(*t), fmt_f64(*p));
                }
                dir.write("return_probability.csv", &csv)?;
            }
            if *audit {
                let f = fractional_graph(&g, *alpha)?;
                let report = decay_audit(&g, &f.graph, *alpha, *c)?;
                dir.write("decay_audit.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
                let mut csv = String::from("hops,max_normalized_weight\n");
                for (d, w) in decay_profile(&g, &f.graph) {
                    let _ = writeln!(csv, "{d},{}", fmt_f64(w));
                }
                dir.write("decay_profile.csv", &csv)?;
                manifest.alpha = Some(*alpha);
                println!("decay pairs={} violations={}", report.pairs_checked, report.violations.len());
            }
        }
        Command::Generate { family, format } => {
            let g = match family {
                Generator::Cycle { n, weight, weights } => match weights {
                    Some(ws) => gen_cycle(*n, EdgeWeights::PerEdge(ws.clone()))?,
                    None => gen_cycle(*n, EdgeWeights::Uniform(*weight))?,
                },
                Generator::Path { n } => gen_path(*n)?,
                Generator::Ba { n, n0, m, theta, seed } => {
                    manifest.seed = Some(*seed);
                    gen_barabasi_albert(&BAConfig { n: *n, n0: *n0, m: *m, theta: *theta, seed: *seed })?
                }
            };
            match format {
                Format::Tsv => dir.write("graph.tsv", &write_edge_list(&g))?,
                Format::Mtx => dir.write("graph.mtx", &write_matrix_market(&g))?,
            }
            println!("n={} edges={}", g.n(), g.edge_count());
        }
    }
    dir.finish(manifest)
}
