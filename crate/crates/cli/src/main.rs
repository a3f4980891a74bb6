use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use voronoi_graph::analysis::{empirical_scaling, expected_vertices_lower_bound};
use voronoi_graph::bench::{
    bench_area_accuracy, bench_integral_comparison, bench_raycast, bench_scaling, loglog_slope,
    summarize_by_fraction,
};
use voronoi_graph::integrate::mc::McConfig;
use voronoi_graph::integrate::{integrate_cells, Builtin, IntegrationMethod};
use voronoi_graph::io::read_points_file;
use voronoi_graph::{verify_mesh, voronoi_graph_with, GraphOptions, Mesh, Method, NodeSet};

#[derive(Parser)]
#[command(name = "voronoi", version, about = "Exact Voronoi diagrams and cell integration in any dimension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full diagram and write vertices and boundary rays as JSON.
    Compute(ComputeArgs),
    /// Integrate a function over cells of the diagram.
    Integrate(IntegrateArgs),
    /// Mean vertices and neighbors per cell.
    Stats(InputArgs),
    /// Expected number of vertices per cell of a random diagram.
    Bound {
        #[arg(long)]
        dim: usize,
    },
    /// Benchmarks on uniform random points.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with one point per row.
    #[arg(long)]
    input: PathBuf,
    /// The CSV file starts with a header row.
    #[arg(long)]
    header: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RaycastChoice {
    Incircle,
    IncircleHeuristic,
    Bisection,
}

impl RaycastChoice {
    fn method(self, eps: f64) -> Method {
        match self {
            RaycastChoice::Incircle => Method::Incircle { heuristic: false },
            RaycastChoice::IncircleHeuristic => Method::Incircle { heuristic: true },
            RaycastChoice::Bisection => Method::Bisection { eps },
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output JSON file; standard output if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Check every vertex and edge, and compare with brute force on small inputs.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value = "incircle-heuristic")]
    raycast: RaycastChoice,
    /// Bisection accuracy.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    /// mc, poly or hmc.
    #[arg(long, default_value = "mc")]
    method: IntegrationMethod,
    #[arg(long, default_value_t = 10_000)]
    rays: usize,
    #[arg(long, default_value_t = 10)]
    subsamples: usize,
    /// `all`, `interior` (bounded cells) or a comma-separated list of indices.
    /// Unbounded cells are never integrated and are listed under `skipped_unbounded`.
    #[arg(long, default_value = "interior")]
    cells: String,
    /// sinx2, const1, const:<c> or linear:<a_1>,...,<a_d>[;<b>].
    #[arg(long, default_value = "sinx2")]
    function: Builtin,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchCommon {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Mean nearest-neighbor calls per vertex.
    /// CSV columns: dim,n_points,method,vertices,nn_calls,nn_calls_per_vertex,spurious_vertices
    Raycast {
        #[command(flatten)]
        common: BenchCommon,
        /// Methods to run; all three if omitted.
        #[arg(long, value_enum, value_delimiter = ',')]
        method: Vec<RaycastChoice>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// Wall-clock time of full diagrams. CSV columns: n,seconds,vertices
    Scaling {
        #[command(flatten)]
        common: BenchCommon,
        #[arg(long, value_delimiter = ',', default_value = "100,300,1000,3000,10000")]
        sizes: Vec<usize>,
    },
    /// Relative deviation of Monte-Carlo from exact face areas by area fraction.
    /// CSV columns: rays,bin,faces,mean,std
    Area {
        #[command(flatten)]
        common: BenchCommon,
        #[arg(long, value_delimiter = ',', default_value = "1000,3000,10000")]
        rays: Vec<usize>,
    },
    /// Per-interface deviation 1 + 2 (I1 - I2) / (I1 + I2) between two methods.
    /// CSV columns: cell,neighbor,fraction,deviation
    Integrals {
        #[command(flatten)]
        common: BenchCommon,
        /// Two methods separated by a comma.
        #[arg(long, value_delimiter = ',', default_value = "hmc,mc")]
        methods: Vec<IntegrationMethod>,
        #[arg(long, default_value_t = 10_000)]
        rays: usize,
        #[arg(long, default_value_t = 10)]
        subsamples: usize,
        #[arg(long, default_value = "sinx2")]
        function: Builtin,
        /// Emit per-bin mean and standard deviation instead of every interface.
        /// CSV columns: bin,faces,mean,std
        #[arg(long)]
        summary: bool,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_rows<T: Serialize>(path: Option<&Path>, format: Format, rows: &[T]) -> Result<()> {
    if format == Format::Json {
        return write_json(path, &rows);
    }
    let mut w = csv::Writer::from_writer(open_output(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn load_mesh(input: &InputArgs, method: Method) -> Result<Mesh> {
    let pts = read_points_file(&input.input, input.header)
        .with_context(|| format!("reading {}", input.input.display()))?;
    let nodes = NodeSet::new(&pts)?;
    let opts = GraphOptions {
        seed: input.seed,
        method,
        start: 0,
    };
    Ok(voronoi_graph_with(&nodes, opts)?.0)
}

fn parse_cells(arg: &str, mesh: &Mesh) -> Result<Vec<usize>> {
    Ok(match arg {
        "all" => (0..mesh.nodes().len()).collect(),
        "interior" => mesh.bounded_cells(),
        list => {
            let mut v = Vec::new();
            for s in list.split(',') {
                let i: usize = s.trim().parse().with_context(|| format!("bad cell index {s:?}"))?;
                if i >= mesh.nodes().len() {
                    bail!("cell {i} out of range for {} nodes", mesh.nodes().len());
                }
                v.push(i);
            }
            v
        }
    })
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(k) => Ok(rayon::ThreadPoolBuilder::new().num_threads(k).build()?.install(job)),
        None => Ok(job()),
    }
}

fn compute(args: ComputeArgs) -> Result<ExitCode> {
    let mesh = load_mesh(&args.input, args.raycast.method(args.eps))?;
    write_json(args.output.as_deref(), &mesh.to_json())?;
    if args.verify {
        let report = verify_mesh(&mesh);
        eprintln!(
            "verified {} vertices and {} edges: {} vertex failures, {} edge failures",
            report.vertices_checked,
            report.edges_checked,
            report.vertex_failures.len(),
            report.edge_failures.len()
        );
        if let Some(o) = &report.oracle {
            eprintln!(
                "brute force: {} expected, {} missing, {} extra, max coordinate error {:e}",
                o.expected,
                o.missing.len(),
                o.extra.len(),
                o.max_coordinate_error
            );
        }
        if !report.passed() {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn integrate(args: IntegrateArgs) -> Result<ExitCode> {
    let mesh = load_mesh(&args.input, Method::default())?;
    args.function.check_dim(mesh.dim())?;
    let cells = parse_cells(&args.cells, &mesh)?;
    let cfg = McConfig {
        rays: args.rays,
        subsamples: args.subsamples,
        seed: args.input.seed,
        ..Default::default()
    };
    let (ok, skipped): (Vec<usize>, Vec<usize>) = cells.into_iter().partition(|&i| mesh.is_bounded(i));
    let results = with_threads(args.threads, || {
        integrate_cells(&mesh, &ok, args.method, &args.function, &cfg)
    })??;
    let out = json!({
        "method": args.method.to_string(),
        "exact": args.method == IntegrationMethod::Polytope,
        "function": args.function.to_string(),
        "dim": mesh.dim(),
        "seed": args.input.seed,
        "cells": results,
        "skipped_unbounded": skipped,
    });
    write_json(args.output.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn stats(args: InputArgs) -> Result<ExitCode> {
    let mesh = load_mesh(&args, Method::default())?;
    let s = empirical_scaling(&mesh);
    write_json(
        None,
        &json!({
            "stats": s,
            "note": "all cells counted, no periodic boundary; cells near the hull have fewer vertices",
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn bench(cmd: BenchCommand) -> Result<ExitCode> {
    match cmd {
        BenchCommand::Raycast { common, method, eps } => {
            let methods = if method.is_empty() {
                vec![
                    RaycastChoice::IncircleHeuristic,
                    RaycastChoice::Incircle,
                    RaycastChoice::Bisection,
                ]
            } else {
                method
            };
            let rows = methods
                .iter()
                .map(|m| bench_raycast(common.dim, common.n, m.method(eps), common.seed))
                .collect::<voronoi_graph::Result<Vec<_>>>()?;
            for r in &rows {
                if let Some(s) = r.spurious_vertices {
                    eprintln!("warning: {} found {s:+} spurious vertices", r.method);
                }
            }
            write_rows(common.output.as_deref(), common.format, &rows)?;
        }
        BenchCommand::Scaling { common, sizes } => {
            let rows = bench_scaling(common.dim, &sizes, common.seed)?;
            if rows.len() >= 2 {
                let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
                let y: Vec<f64> = rows.iter().map(|r| r.seconds.max(1e-9)).collect();
                eprintln!("log-log slope of time against n: {:.3}", loglog_slope(&x, &y));
            }
            write_rows(common.output.as_deref(), common.format, &rows)?;
        }
        BenchCommand::Area { common, rays } => {
            let rows = with_threads(common.threads, || {
                bench_area_accuracy(common.dim, common.n, &rays, common.seed)
            })??;
            write_rows(common.output.as_deref(), common.format, &rows)?;
        }
        BenchCommand::Integrals {
            common,
            methods,
            rays,
            subsamples,
            function,
            summary,
        } => {
            let [a, b] = methods[..] else {
                bail!("--methods needs exactly two methods");
            };
            function.check_dim(common.dim)?;
            let cfg = McConfig {
                rays,
                subsamples,
                seed: common.seed,
                ..Default::default()
            };
            let rows = with_threads(common.threads, || {
                bench_integral_comparison(common.dim, common.n, (a, b), &function, &cfg)
            })??;
            if summary {
                write_rows(common.output.as_deref(), common.format, &summarize_by_fraction(&rows))?;
            } else {
                write_rows(common.output.as_deref(), common.format, &rows)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Compute(a) => compute(a),
        Command::Integrate(a) => integrate(a),
        Command::Stats(a) => stats(a),
        Command::Bound { dim } => {
            let b = expected_vertices_lower_bound(dim)?;
            write_json(None, &json!({ "dim": dim, "expected_vertices_per_cell": b }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(b) => bench(b),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
