//! Benchmark experiments on uniform random points in the unit cube.
//!
//! Every experiment is a pure function of its parameters and seed; timings
//! are the only nondeterministic outputs.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{voronoi_graph_with, GraphOptions};
use crate::integrate::mc::McConfig;
use crate::integrate::{integrate_cells, Builtin, CellIntegrals, Integrand, IntegrationMethod};
use crate::mesh::Mesh;
use crate::nodes::NodeSet;
use crate::raycast::Method;
use crate::rng::uniform_points;

/// Node set of `n` uniform points in `[0,1]^d`.
pub fn uniform_nodes(n: usize, d: usize, seed: u64) -> Result<NodeSet> {
    NodeSet::new(&uniform_points(n, d, seed))
}

/// Short label of a raycast method for tables.
pub fn method_label(m: Method) -> String {
    match m {
        Method::Incircle { heuristic: true } => "incircle_heuristic".into(),
        Method::Incircle { heuristic: false } => "incircle".into(),
        Method::Bisection { eps } => format!("bisection({eps:e})"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RaycastBench {
    pub dim: usize,
    pub n_points: usize,
    pub method: String,
    pub vertices: usize,
    pub nn_calls: u64,
    pub nn_calls_per_vertex: f64,
    /// Vertex count minus that of the exact incircle diagram, when nonzero.
    pub spurious_vertices: Option<i64>,
}

/// Mean nearest-neighbor queries per vertex for a full diagram.
pub fn bench_raycast(d: usize, n: usize, method: Method, seed: u64) -> Result<RaycastBench> {
    let nodes = uniform_nodes(n, d, seed)?;
    let opts = GraphOptions {
        seed,
        method,
        start: 0,
    };
    let (mesh, stats) = voronoi_graph_with(&nodes, opts)?;
    let vertices = mesh.vertices().len();
    let spurious_vertices = match method {
        Method::Bisection { .. } => {
            let exact = voronoi_graph_with(
                &nodes,
                GraphOptions {
                    method: Method::default(),
                    ..opts
                },
            )?
            .0
            .vertices()
            .len();
            (exact != vertices).then_some(vertices as i64 - exact as i64)
        }
        Method::Incircle { .. } => None,
    };
    Ok(RaycastBench {
        dim: d,
        n_points: n,
        method: method_label(method),
        vertices,
        nn_calls: stats.raycast.nn_calls,
        nn_calls_per_vertex: stats.raycast.nn_calls as f64 / vertices as f64,
        spurious_vertices,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub seconds: f64,
    pub vertices: usize,
}

/// Wall-clock time of a full diagram for each size.
pub fn bench_scaling(d: usize, sizes: &[usize], seed: u64) -> Result<Vec<ScalingRow>> {
    sizes
        .iter()
        .map(|&n| {
            let nodes = uniform_nodes(n, d, seed)?;
            let t = Instant::now();
            let (mesh, _) = voronoi_graph_with(
                &nodes,
                GraphOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            Ok(ScalingRow {
                n,
                seconds: t.elapsed().as_secs_f64(),
                vertices: mesh.vertices().len(),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Bounded cells whose vertices all lie in the bounding box of the nodes.
///
/// Bounded cells of generators near the hull can reach far outside the
/// sampled region; their faces are hit by few, nearly tangent rays, and the
/// Monte-Carlo area estimate becomes heavy-tailed there.
pub fn cells_in_bounding_box(mesh: &Mesh) -> Vec<usize> {
    let d = mesh.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in mesh.nodes().points() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    mesh.bounded_cells()
        .into_iter()
        .filter(|&i| {
            mesh.cell_vertices(i).iter().all(|&v| {
                let r = &mesh.vertices()[v].r;
                (0..d).all(|k| r[k] >= lo[k] && r[k] <= hi[k])
            })
        })
        .collect()
}

/// Diagram on uniform points and the exact integrals of `f` on the cells
/// returned by [`cells_in_bounding_box`].
pub fn reference_integrals(d: usize, n: usize, seed: u64, f: &dyn Integrand) -> Result<(Mesh, Vec<CellIntegrals>)> {
    let nodes = uniform_nodes(n, d, seed)?;
    let (mesh, _) = voronoi_graph_with(
        &nodes,
        GraphOptions {
            seed,
            ..Default::default()
        },
    )?;
    let cells = cells_in_bounding_box(&mesh);
    let exact = integrate_cells(&mesh, &cells, IntegrationMethod::Polytope, f, &McConfig::default())?;
    Ok((mesh, exact))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaBin {
    pub rays: usize,
    /// Faces whose share of their cell's surface lies in `[bin, bin + 1)` percent.
    pub bin: usize,
    pub faces: usize,
    pub mean: f64,
    pub std: f64,
}

/// Upper end of the area-fraction bins, in percent.
pub const MAX_BIN: usize = 30;

/// Sample mean and standard deviation.
fn moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Relative deviation of Monte-Carlo face areas from exact ones, grouped by
/// the face's share `I = A_ij / sum_j A_ij` of its cell's surface in 1% bins
/// from 1% to 30%, for each ray count.
pub fn bench_area_accuracy(d: usize, n: usize, rays_list: &[usize], seed: u64) -> Result<Vec<AreaBin>> {
    let one = Builtin::Const(1.0);
    let (mesh, exact) = reference_integrals(d, n, seed, &one)?;
    let cells: Vec<usize> = exact.iter().map(|c| c.cell).collect();
    let mut out = Vec::new();
    for &rays in rays_list {
        let cfg = McConfig {
            rays,
            subsamples: 1,
            seed,
            ..Default::default()
        };
        let mc = integrate_cells(&mesh, &cells, IntegrationMethod::MonteCarlo, &one, &cfg)?;
        let mut bins: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (p, m) in exact.iter().zip(&mc) {
            let total = p.total_area();
            for (j, &a) in &p.area {
                let bin = (a / total * 100.0).floor() as usize;
                if (1..=MAX_BIN).contains(&bin) {
                    bins.entry(bin).or_default().push(m.area[j] / a - 1.0);
                }
            }
        }
        for (bin, devs) in bins {
            let (mean, std) = moments(&devs);
            out.push(AreaBin {
                rays,
                bin,
                faces: devs.len(),
                mean,
                std,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfaceComparison {
    pub cell: usize,
    pub neighbor: usize,
    /// Exact area share of the face in its cell's surface.
    pub fraction: f64,
    /// `1 + 2 (I_1 - I_2) / (I_1 + I_2)` for the two surface integrals.
    pub deviation: f64,
}

/// Per-interface comparison of surface integrals from two methods on the
/// cells of a uniform diagram that lie inside the bounding box of the nodes.
/// Sampling methods use seed `cfg.seed` for the first method and
/// `cfg.seed + 1` for the second.
pub fn bench_integral_comparison(
    d: usize,
    n: usize,
    methods: (IntegrationMethod, IntegrationMethod),
    f: &dyn Integrand,
    cfg: &McConfig,
) -> Result<Vec<InterfaceComparison>> {
    let one = Builtin::Const(1.0);
    let (mesh, exact) = reference_integrals(d, n, cfg.seed, &one)?;
    let cells: Vec<usize> = exact.iter().map(|c| c.cell).collect();
    let first = integrate_cells(&mesh, &cells, methods.0, f, cfg)?;
    // the second method draws its own rays so that area noise does not cancel
    let other = McConfig {
        seed: cfg.seed.wrapping_add(1),
        ..*cfg
    };
    let second = integrate_cells(&mesh, &cells, methods.1, f, &other)?;
    let mut out = Vec::new();
    for ((p, a), b) in exact.iter().zip(&first).zip(&second) {
        let total = p.total_area();
        for (&j, &area) in &p.area {
            let (i1, i2) = (a.surface_integral[&j], b.surface_integral[&j]);
            out.push(InterfaceComparison {
                cell: p.cell,
                neighbor: j,
                fraction: area / total,
                deviation: 1.0 + 2.0 * (i1 - i2) / (i1 + i2),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationSummary {
    pub bin: usize,
    pub faces: usize,
    pub mean: f64,
    pub std: f64,
}

/// Deviation statistics grouped by area fraction in 1% bins.
pub fn summarize_by_fraction(rows: &[InterfaceComparison]) -> Vec<DeviationSummary> {
    let mut bins: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let bin = (r.fraction * 100.0).floor() as usize;
        if (1..=MAX_BIN).contains(&bin) && r.deviation.is_finite() {
            bins.entry(bin).or_default().push(r.deviation);
        }
    }
    bins.into_iter()
        .map(|(bin, v)| {
            let (mean, std) = moments(&v);
            DeviationSummary {
                bin,
                faces: v.len(),
                mean,
                std,
            }
        })
        .collect()
}
