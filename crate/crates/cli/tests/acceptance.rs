//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//!
//! The process exits nonzero if any criterion fails, except those listed in
//! `KNOWN_UNATTAINABLE`, which are still evaluated and printed.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voronoi_graph::analysis::{empirical_scaling, expected_vertices_lower_bound};
use voronoi_graph::bench::{bench_area_accuracy, bench_raycast, loglog_slope};
use voronoi_graph::integrate::hmc::{hmc_integrate_cell, hmc_volume};
use voronoi_graph::integrate::mc::{mc_areas_only, McConfig};
use voronoi_graph::integrate::minors::determinant;
use voronoi_graph::integrate::poly::{integrate_cell_poly, integrate_cells_poly, AreaCache};
use voronoi_graph::io::write_points;
use voronoi_graph::linalg::dist;
use voronoi_graph::mesh::verify_vertex;
use voronoi_graph::oracle::brute_force_vertices;
use voronoi_graph::rng::uniform_points;
use voronoi_graph::{voronoi_graph, Builtin, Mesh, Method, NodeSet};

/// Vertices per cell of a planar diagram are `3 |V| / N < 6` by Euler's
/// formula, so the target 6.6 +- 0.5 cannot be met on any input.
const KNOWN_UNATTAINABLE: &[&str] = &["4a"];

struct Report {
    failed: Vec<String>,
    passed: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = if !pass && KNOWN_UNATTAINABLE.contains(&id) {
            " [known unattainable]"
        } else {
            ""
        };
        println!("{tag} {id:>3} {name}: {detail}{note}");
        if pass {
            self.passed += 1;
        } else {
            self.failed.push(id.to_string());
        }
    }

    /// Reported but not part of the criteria.
    fn info(&self, id: &str, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>3} {name}: {detail} [supplementary]");
    }
}

fn mesh(n: usize, d: usize, seed: u64) -> Mesh {
    voronoi_graph(&NodeSet::new(&uniform_points(n, d, seed)).unwrap(), 0).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

fn all_vertices_valid(m: &Mesh) -> bool {
    m.vertices().iter().all(|v| verify_vertex(m.nodes(), v).is_ok())
}

fn raycast_efficiency(r: &mut Report) {
    let t = Instant::now();
    let heuristic = [2.41, 2.46, 2.54, 2.62];
    let plain = [2.70, 2.82, 2.76, 2.76];
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, d) in (2..=5).enumerate() {
        let h = bench_raycast(d, 1000, Method::Incircle { heuristic: true }, 0).unwrap();
        let p = bench_raycast(d, 1000, Method::Incircle { heuristic: false }, 0).unwrap();
        let b = bench_raycast(d, 1000, Method::Bisection { eps: 1e-8 }, 0).unwrap();
        let ratio = b.nn_calls_per_vertex / h.nn_calls_per_vertex;
        ok &= (h.nn_calls_per_vertex - heuristic[k]).abs() <= 0.3;
        ok &= (p.nn_calls_per_vertex - plain[k]).abs() <= 0.3;
        if d >= 3 {
            ok &= ratio >= 2.5;
        }
        parts.push(format!(
            "d={d} heuristic {:.2} incircle {:.2} bisection/heuristic {:.1}",
            h.nn_calls_per_vertex, p.nn_calls_per_vertex, ratio
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    r.line("1", "raycast efficiency", ok, format!("{}; {secs:.1} s", parts.join("; ")));

    let coarse = bench_raycast(2, 1000, Method::Bisection { eps: 1e-4 }, 0).unwrap();
    r.info(
        "S1",
        "bisection(1e-4) d=2 calls/vertex 8.15 +- 15%",
        (coarse.nn_calls_per_vertex - 8.15).abs() <= 0.15 * 8.15,
        format!(
            "{:.2} (spurious vertices {})",
            coarse.nn_calls_per_vertex,
            coarse.spurious_vertices.unwrap_or(0)
        ),
    );
}

fn vertex_exactness(r: &mut Report) {
    let t = Instant::now();
    let (mut ok, mut worst, mut instances) = (true, 0.0f64, 0);
    for d in [2usize, 3] {
        for seed in 0..20 {
            let m = mesh(50, d, 1000 + seed);
            let oracle = brute_force_vertices(m.nodes());
            let want: BTreeSet<&Vec<usize>> = oracle.iter().map(|v| &v.sigma).collect();
            let got: BTreeSet<&Vec<usize>> = m.vertices().iter().map(|v| &v.sigma).collect();
            ok &= want == got && all_vertices_valid(&m);
            for v in &oracle {
                if let Some(mv) = m.vertex(&v.sigma) {
                    worst = worst.max(dist(&mv.r, &v.r));
                }
            }
            instances += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= worst <= 1e-8 && secs < 300.0;
    r.line(
        "2",
        "vertex sets equal brute force",
        ok,
        format!("{instances} instances, max coordinate error {worst:.1e}; {secs:.1} s"),
    );
}

fn complexity_bound(r: &mut Report) {
    let t = Instant::now();
    let printed = [6.76, 31.8, 187.0, 1296.0, 1.03e4, 9.04e4, 8.72e5, 9.09e6, 1.02e8];
    let mut worst = 0.0f64;
    for (d, want) in (2..=10).zip(printed) {
        let got = expected_vertices_lower_bound(d).unwrap();
        worst = worst.max((got - want).abs() / want);
    }
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "3",
        "vertex bound table",
        worst <= 0.01 && secs < 1.0,
        format!("max relative error {:.3}%; {secs:.4} s", 100.0 * worst),
    );
}

fn empirical_counts(r: &mut Report) {
    let m2 = mesh(1000, 2, 7);
    let s2 = empirical_scaling(&m2);
    r.line(
        "4a",
        "vertices/cell d=2 is 6.6 +- 0.5",
        (s2.vertices_per_cell - 6.6).abs() <= 0.5 && all_vertices_valid(&m2),
        format!("{:.3} (Euler bound 3(2N-5)/N = {:.3})", s2.vertices_per_cell, 3.0 * (2.0 * 1000.0 - 5.0) / 1000.0),
    );
    let m3 = mesh(1000, 3, 7);
    let s3 = empirical_scaling(&m3);
    r.line(
        "4b",
        "vertices/cell d=3 is 29.2 +- 15%",
        (s3.vertices_per_cell - 29.2).abs() <= 0.15 * 29.2 && all_vertices_valid(&m3),
        format!("{:.2} (neighbors/cell {:.2})", s3.vertices_per_cell, s3.neighbors_per_cell),
    );
}

/// Determinant by cofactor expansion along the first column.
fn cofactor(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|row| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|col| col.iter().enumerate().filter(|(r, _)| *r != row).map(|(_, x)| *x).collect())
                .collect();
            let sign = if row % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][row] * cofactor(&minor)
        })
        .sum()
}

fn determinant_recursion(r: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for d in 1..=6 {
        for _ in 0..100 {
            let cols: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let want = cofactor(&cols);
            let got = determinant(&cols).unwrap();
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "5",
        "minor recursion equals cofactor expansion",
        worst <= 1e-9 && secs < 10.0,
        format!("600 matrices, max relative error {worst:.1e}; {secs:.3} s"),
    );
}

fn polygon(m: &Mesh, i: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = m.cell_vertices(i).iter().map(|&k| m.vertices()[k].r.clone()).collect();
    let n = pts.len() as f64;
    let c = [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n];
    pts.sort_by(|p, q| (p[1] - c[1]).atan2(p[0] - c[0]).total_cmp(&(q[1] - c[1]).atan2(q[0] - c[0])));
    pts
}

fn poly_exactness(r: &mut Report) {
    let m = mesh(1000, 2, 3);
    let cells = m.bounded_cells();
    let (a, b, c) = (0.7, -1.3, 0.4);
    let f = move |x: &[f64]| a * x[0] + b * x[1] + c;
    let (mut vol_err, mut int_err) = (0.0f64, 0.0f64);
    for res in integrate_cells_poly(&m, &cells, &f).unwrap() {
        let p = polygon(&m, res.cell);
        let (mut area, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for k in 0..p.len() {
            let (u, v) = (&p[k], &p[(k + 1) % p.len()]);
            let cross = u[0] * v[1] - v[0] * u[1];
            area += cross / 2.0;
            cx += (u[0] + v[0]) * cross / 6.0;
            cy += (u[1] + v[1]) * cross / 6.0;
        }
        vol_err = vol_err.max((res.volume - area).abs());
        int_err = int_err.max((res.volume_integral - f(&[cx / area, cy / area]) * area).abs());
    }
    let mut asym = 0.0f64;
    let one = |_: &[f64]| 1.0;
    for (d, n) in [(2usize, 1000usize), (3, 1000)] {
        let m = if d == 2 { m.clone() } else { mesh(n, d, 3) };
        let side: Vec<_> = m
            .bounded_cells()
            .into_iter()
            .map(|i| integrate_cell_poly(&m, i, &one, &mut AreaCache::disabled()).unwrap())
            .collect();
        let by_cell: std::collections::HashMap<usize, &_> = side.iter().map(|s| (s.cell, s)).collect();
        for s in &side {
            for (j, a) in &s.area {
                if let Some(o) = by_cell.get(j) {
                    asym = asym.max((a - o.area[&s.cell]).abs());
                }
            }
        }
    }
    r.line(
        "6",
        "poly volumes, linear integrals, face symmetry",
        vol_err <= 1e-10 && int_err <= 1e-9 && asym <= 1e-10,
        format!(
            "{} cells: shoelace {vol_err:.1e}, f(centroid)V {int_err:.1e}, A_ij - A_ji {asym:.1e}",
            cells.len()
        ),
    );
}

fn mc_convergence(r: &mut Report) {
    let ns = NodeSet::new(&[
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![-1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, -1.0],
    ])
    .unwrap();
    let sizes = [1_000usize, 10_000, 100_000];
    let (mut vse, mut ase) = (Vec::new(), Vec::new());
    let mut ok = true;
    let mut means = Vec::new();
    for &n in &sizes {
        let (mut v, mut a) = (Vec::new(), Vec::new());
        for s in 0..50 {
            let res = mc_areas_only(&ns, 0, n, 500 + s, None).unwrap();
            v.push(res.volume);
            a.push(res.total_area());
        }
        let ((mv, sv), (ma, sa)) = (mean_std(&v), mean_std(&a));
        ok &= (mv - 1.0).abs() <= 3.0 * sv / 50f64.sqrt();
        ok &= (ma - 4.0).abs() <= 3.0 * sa / 50f64.sqrt();
        means.push(format!("n={n}: V {mv:.4} A {ma:.4}"));
        vse.push(sv);
        ase.push(sa);
    }
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let (sv, sa) = (loglog_slope(&x, &vse), loglog_slope(&x, &ase));
    ok &= (sv + 0.5).abs() <= 0.1 && (sa + 0.5).abs() <= 0.1;
    r.line(
        "7",
        "MC convergence on the unit square",
        ok,
        format!("slopes volume {sv:.3} area {sa:.3}; {}", means.join(", ")),
    );
}

fn mc_poly_agreement(r: &mut Report) {
    let m = mesh(1000, 3, 7);
    let one = |_: &[f64]| 1.0;
    let exact = integrate_cells_poly(&m, &m.bounded_cells(), &one).unwrap();
    let (mut inside, mut rel) = (0, Vec::new());
    for p in &exact {
        let mc = mc_areas_only(m.nodes(), p.cell, 10_000, 11, None).unwrap();
        if (mc.volume - p.volume).abs() <= 4.0 * mc.volume_std_error {
            inside += 1;
        }
        rel.push((mc.volume - p.volume).abs() / p.volume);
    }
    let frac = inside as f64 / exact.len() as f64;
    let med = median(rel);
    r.line(
        "8",
        "MC volumes agree with poly",
        frac >= 0.95 && med <= 0.02,
        format!("{} cells, {:.1}% within 4 SE, median deviation {:.2}%", exact.len(), 100.0 * frac, 100.0 * med),
    );
}

fn hmc_consistency(r: &mut Report) {
    let f = Builtin::SinX2;
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 2..=4 {
        let m = mesh(1000, d, 7);
        let exact = integrate_cells_poly(&m, &m.bounded_cells(), &f).unwrap();
        let mut vol_err = 0.0f64;
        for p in &exact {
            vol_err = vol_err.max((hmc_volume(&m, p.cell, &p.area).unwrap() - p.volume).abs());
        }
        let cfg = McConfig {
            rays: 10_000,
            seed: 13,
            ..Default::default()
        };
        let dev: Vec<f64> = exact
            .iter()
            .map(|p| {
                let h = hmc_integrate_cell(&m, p.cell, &f, &cfg).unwrap();
                ((h.volume_integral - p.volume_integral) / p.volume_integral).abs()
            })
            .collect();
        let med = median(dev);
        ok &= vol_err <= 1e-10 && med <= 0.05;
        parts.push(format!("d={d}: volume {vol_err:.1e}, median integral deviation {:.2}%", 100.0 * med));
    }
    r.line("9", "HMC consistency with poly", ok, parts.join("; "));
}

fn area_fraction_shape(r: &mut Report) {
    let rays = [1_000usize, 3_000, 10_000];
    let bins = bench_area_accuracy(3, 1000, &rays, 17).unwrap();
    let std_at = |n: usize, bin: usize| bins.iter().find(|b| b.rays == n && b.bin == bin).map(|b| b.std);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut spread = Vec::new();
    for &n in &rays {
        let (s1, s10) = (std_at(n, 1).unwrap_or(0.0), std_at(n, 10).unwrap_or(f64::INFINITY));
        ok &= s1 > s10;
        parts.push(format!("rays {n}: std 1% {s1:.3} 10% {s10:.3}"));
        let common: Vec<f64> = bins.iter().filter(|b| b.rays == n && b.faces >= 10).map(|b| b.std).collect();
        spread.push(common.iter().sum::<f64>() / common.len() as f64);
    }
    let x: Vec<f64> = rays.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&x, &spread);
    ok &= (slope + 0.5).abs() <= 0.1;
    r.line(
        "10",
        "area deviation by fraction",
        ok,
        format!("{}; slope {slope:.3}", parts.join(", ")),
    );
}

fn run_twice(bin: &Path, dir: &Path, args: &[&str], strip_column: Option<usize>) -> (bool, String) {
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.join(format!("out{k}"));
        let mut full: Vec<&str> = args.to_vec();
        let out_s = out.to_str().unwrap().to_string();
        full.extend(["--output", &out_s]);
        let takes_threads = matches!(args[0], "integrate" | "bench");
        if takes_threads {
            full.extend(["--threads", threads]);
        }
        let status = Command::new(bin).args(&full).status().unwrap();
        if !status.success() {
            return (false, format!("{} exited with {status}", args.join(" ")));
        }
        let mut bytes = std::fs::read(&out).unwrap();
        if let Some(col) = strip_column {
            let text = String::from_utf8(bytes).unwrap();
            bytes = text
                .lines()
                .map(|l| {
                    let mut f: Vec<&str> = l.split(',').collect();
                    f.remove(col);
                    f.join(",") + "\n"
                })
                .collect::<String>()
                .into_bytes();
        }
        outputs.push(bytes);
    }
    (outputs[0] == outputs[1] && !outputs[0].is_empty(), args[..2.min(args.len())].join(" "))
}

fn determinism(r: &mut Report) {
    let bin = Path::new(env!("CARGO_BIN_EXE_voronoi"));
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let file = std::fs::File::create(&pts).unwrap();
    write_points(file, &uniform_points(150, 3, 21)).unwrap();
    let p = pts.to_str().unwrap();
    let runs: Vec<(Vec<&str>, Option<usize>)> = vec![
        (vec!["compute", "--input", p, "--seed", "4"], None),
        (vec!["compute", "--input", p, "--raycast", "bisection", "--eps", "1e-6"], None),
        (vec!["integrate", "--input", p, "--method", "mc", "--rays", "2000", "--seed", "4"], None),
        (vec!["integrate", "--input", p, "--method", "poly"], None),
        (vec!["integrate", "--input", p, "--method", "hmc", "--rays", "2000", "--seed", "4"], None),
        (vec!["bench", "raycast", "--dim", "3", "--n", "300", "--seed", "4"], None),
        (vec!["bench", "area", "--dim", "3", "--n", "150", "--rays", "500,1000"], None),
        (vec!["bench", "integrals", "--dim", "3", "--n", "150", "--rays", "1000"], None),
        // the seconds column is a timing and excluded
        (vec!["bench", "scaling", "--dim", "2", "--sizes", "100,300"], Some(1)),
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for (args, strip) in &runs {
        let sub = tempfile::tempdir_in(dir.path()).unwrap();
        let (same, label) = run_twice(bin, sub.path(), args, *strip);
        if !same {
            bad.push(label);
        }
        ok &= same;
    }
    // stats and bound write to standard output only
    for args in [vec!["stats", "--input", p], vec!["bound", "--dim", "7"]] {
        let a = Command::new(bin).args(&args).output().unwrap();
        let b = Command::new(bin).args(&args).output().unwrap();
        let same = a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
        if !same {
            bad.push(args[0].to_string());
        }
        ok &= same;
    }
    let detail = if bad.is_empty() {
        format!("{} commands byte-identical across reruns and thread counts", runs.len() + 2)
    } else {
        format!("differing: {}", bad.join(", "))
    };
    r.line("11", "determinism", ok, detail);
}

fn main() -> ExitCode {
    let mut r = Report {
        failed: Vec::new(),
        passed: 0,
    };
    raycast_efficiency(&mut r);
    vertex_exactness(&mut r);
    complexity_bound(&mut r);
    empirical_counts(&mut r);
    determinant_recursion(&mut r);
    poly_exactness(&mut r);
    mc_convergence(&mut r);
    mc_poly_agreement(&mut r);
    hmc_consistency(&mut r);
    area_fraction_shape(&mut r);
    determinism(&mut r);

    let (known, unexpected): (Vec<&String>, Vec<&String>) =
        r.failed.iter().partition(|id| KNOWN_UNATTAINABLE.contains(&id.as_str()));
    println!(
        "summary: {} passed, {} failed ({} known unattainable: {:?}; unexpected: {:?})",
        r.passed,
        r.failed.len(),
        known.len(),
        known,
        unexpected
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
