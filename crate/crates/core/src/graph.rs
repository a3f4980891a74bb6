//! Exhaustive depth-first exploration of the Voronoi graph.
//!
//! Starting from one vertex found by descending through successively
//! lower-dimensional facets, every edge of every discovered vertex is walked
//! with a raycast. A per-edge counter of discovered endpoints skips edges whose
//! both vertices are already known, so each vertex costs roughly one raycast.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{affine_basis, circumcenter, dist, normalize, project_out};
use crate::mesh::{verify_vertex, BoundaryRay, EdgeKey, Mesh, VertexRecord, VertexViolation};
use crate::nodes::NodeSet;
use crate::oracle::brute_force_vertices;
use crate::raycast::{search_direction, Method, RayCaster, RayQuery, RaycastStats};
use crate::rng::{sample_unit_sphere, stream, Purpose, Stream};

/// Consecutive escaping rays tolerated by [`descent`] at one level.
pub const DESCENT_RETRIES: usize = 100;

/// The `d + 1` edges of a vertex: `sigma` minus one generator each.
pub fn edge_set(sigma: &[usize]) -> Vec<EdgeKey> {
    (0..sigma.len()).map(|p| EdgeKey::omitting(sigma, p)).collect()
}

/// Finds a vertex of cell `start` by shooting random rays onto facets of
/// decreasing dimension until `d + 1` generators are equidistant.
pub fn descent(
    caster: &RayCaster<'_>,
    start: usize,
    rng: &mut Stream,
    stats: &mut RaycastStats,
) -> Result<VertexRecord> {
    let nodes = caster.nodes();
    nodes.check_index(start)?;
    let d = nodes.dim();
    let mut sigma = vec![start];
    let mut r = nodes.point(start).to_vec();
    let mut misses = 0;
    while sigma.len() < d + 1 {
        let origin = nodes.point(sigma[0]);
        let basis = affine_basis(origin, sigma[1..].iter().map(|&g| nodes.point(g)), 1e-10)
            .ok_or_else(|| {
                Error::DegenerateConfiguration(format!("facet {sigma:?} is affinely dependent"))
            })?;
        let mut u = sample_unit_sphere(d, rng);
        project_out(&mut u, &basis);
        if normalize(&mut u) < 1e-6 {
            continue;
        }
        let q = RayQuery {
            eta: sigma.clone(),
            r: r.clone(),
            u,
        };
        match caster.cast(&q, stats)? {
            Some(hit) => {
                sigma = hit.sigma;
                r = hit.r;
                misses = 0;
            }
            None => {
                misses += 1;
                if misses >= DESCENT_RETRIES {
                    return Err(Error::RetryExhausted { attempts: misses });
                }
            }
        }
    }
    Ok(VertexRecord { sigma, r })
}

/// Re-solves the position of `v` from its generators. Raycasts start at the
/// previous vertex, so without this the error of `r + t u` accumulates along
/// the traversal. The solve is kept only if its generators are at least as
/// equidistant as at the raycast position.
fn polish(nodes: &NodeSet, v: &mut VertexRecord) {
    let pts: Vec<&[f64]> = v.sigma.iter().map(|&g| nodes.point(g)).collect();
    let spread = |r: &[f64]| {
        let ds: Vec<f64> = pts.iter().map(|p| dist(p, r)).collect();
        ds.iter().fold(0.0f64, |m, x| m.max((x - ds[0]).abs()))
    };
    if let Some(c) = circumcenter(&pts) {
        if spread(&c) <= spread(&v.r) {
            v.r = c;
        }
    }
}

/// Options for [`voronoi_graph_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct GraphOptions {
    pub seed: u64,
    pub method: Method,
    /// Node whose cell the initial descent starts in.
    pub start: usize,
}

/// Work counters of one exploration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphStats {
    /// Raycasts along edges (excluding the initial descent).
    pub edge_raycasts: u64,
    /// Nearest-neighbor counters over all raycasts, descent included.
    pub raycast: RaycastStats,
    /// Raycasts that landed on an already known vertex.
    pub rediscovered: u64,
}

/// Full diagram with the default incircle raycast.
pub fn voronoi_graph(nodes: &NodeSet, seed: u64) -> Result<Mesh> {
    voronoi_graph_with(
        nodes,
        GraphOptions {
            seed,
            ..Default::default()
        },
    )
    .map(|(m, _)| m)
}

pub fn voronoi_graph_with(nodes: &NodeSet, opts: GraphOptions) -> Result<(Mesh, GraphStats)> {
    let caster = RayCaster::new(nodes).with_method(opts.method);
    let mut stats = GraphStats::default();
    let mut rng = stream(opts.seed, Purpose::Descent, opts.start as u64);
    let mut first = descent(&caster, opts.start, &mut rng, &mut stats.raycast)?;
    polish(nodes, &mut first);

    let mut counts: HashMap<EdgeKey, u8> = HashMap::new();
    let mut known: HashSet<Vec<usize>> = HashSet::new();
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();

    for e in edge_set(&first.sigma) {
        *counts.entry(e).or_insert(0) += 1;
    }
    known.insert(first.sigma.clone());
    let mut stack = vec![first];

    while let Some(v) = stack.pop() {
        for pos in 0..v.sigma.len() {
            let eta = EdgeKey::omitting(&v.sigma, pos);
            if counts.get(&eta).copied().unwrap_or(0) >= 2 {
                continue;
            }
            let u = search_direction(nodes, &v.sigma, eta.as_slice())?;
            let q = RayQuery {
                eta: eta.as_slice().to_vec(),
                r: v.r.clone(),
                u,
            };
            stats.edge_raycasts += 1;
            match caster.cast(&q, &mut stats.raycast)? {
                Some(hit) => {
                    if known.insert(hit.sigma.clone()) {
                        for e in edge_set(&hit.sigma) {
                            *counts.entry(e).or_insert(0) += 1;
                        }
                        let mut v = VertexRecord {
                            sigma: hit.sigma,
                            r: hit.r,
                        };
                        polish(nodes, &mut v);
                        stack.push(v);
                    } else {
                        stats.rediscovered += 1;
                    }
                }
                None => boundary.push(BoundaryRay {
                    sigma: v.sigma.clone(),
                    u: q.u,
                    eta,
                }),
            }
        }
        vertices.push(v);
    }

    Ok((Mesh::from_parts(nodes.clone(), vertices, counts, boundary), stats))
}

/// Outcome of [`verify_mesh`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshReport {
    pub vertices_checked: usize,
    pub vertex_failures: Vec<(Vec<usize>, VertexViolation)>,
    pub edges_checked: usize,
    pub edge_failures: Vec<String>,
    /// Present when the brute-force comparison ran.
    pub oracle: Option<OracleReport>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub expected: usize,
    pub missing: Vec<Vec<usize>>,
    pub extra: Vec<Vec<usize>>,
    pub max_coordinate_error: f64,
}

impl MeshReport {
    pub fn passed(&self) -> bool {
        self.vertex_failures.is_empty()
            && self.edge_failures.is_empty()
            && self.oracle.as_ref().is_none_or(|o| {
                o.missing.is_empty() && o.extra.is_empty() && o.max_coordinate_error <= 1e-8
            })
    }
}

/// Largest input checked against the brute-force enumeration.
pub const ORACLE_MAX_NODES: usize = 200;

/// Checks every vertex, the edge counters, and (for `d <= 3`, `N <= 200`)
/// equality with the brute-force diagram.
pub fn verify_mesh(mesh: &Mesh) -> MeshReport {
    let nodes = mesh.nodes();
    let d = nodes.dim();
    let mut report = MeshReport::default();

    for v in mesh.vertices() {
        report.vertices_checked += 1;
        if let Err(e) = verify_vertex(nodes, v) {
            report.vertex_failures.push((v.sigma.clone(), e));
        }
    }

    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, v) in mesh.vertices().iter().enumerate() {
        for e in edge_set(&v.sigma) {
            incident.entry(e).or_default().push(k);
        }
    }
    let rays: HashSet<&EdgeKey> = mesh.boundary().iter().map(|b| &b.eta).collect();
    for (eta, ends) in &incident {
        report.edges_checked += 1;
        let count = mesh.edge_counts().get(eta).copied().unwrap_or(0) as usize;
        if count != ends.len() {
            report.edge_failures.push(format!(
                "edge {:?}: counter {count}, incident vertices {}",
                eta.as_slice(),
                ends.len()
            ));
            continue;
        }
        match ends.as_slice() {
            [a, b] => {
                let (sa, sb) = (&mesh.vertices()[*a], &mesh.vertices()[*b]);
                let common: Vec<usize> =
                    sa.sigma.iter().copied().filter(|g| sb.sigma.contains(g)).collect();
                if common != eta.as_slice() {
                    report
                        .edge_failures
                        .push(format!("edge {:?}: endpoints share {common:?}", eta.as_slice()));
                }
                for v in [sa, sb] {
                    let r0 = dist(&v.r, nodes.point(eta.as_slice()[0]));
                    let off = eta
                        .as_slice()
                        .iter()
                        .map(|&g| (dist(&v.r, nodes.point(g)) - r0).abs())
                        .fold(0.0, f64::max);
                    if off > crate::mesh::TOL_VERTEX * r0 {
                        report.edge_failures.push(format!(
                            "edge {:?}: generators off the sphere of {:?}",
                            eta.as_slice(),
                            v.sigma
                        ));
                    }
                }
            }
            [_] => {
                if !rays.contains(eta) {
                    report
                        .edge_failures
                        .push(format!("edge {:?}: single endpoint but no boundary ray", eta.as_slice()));
                }
            }
            _ => report.edge_failures.push(format!(
                "edge {:?}: {} incident vertices",
                eta.as_slice(),
                ends.len()
            )),
        }
    }
    if mesh.edge_counts().len() != incident.len() {
        report.edge_failures.push(format!(
            "{} counted edges but {} incident edges",
            mesh.edge_counts().len(),
            incident.len()
        ));
    }

    if d <= 3 && nodes.len() <= ORACLE_MAX_NODES {
        let expected = brute_force_vertices(nodes);
        let mut o = OracleReport {
            expected: expected.len(),
            ..Default::default()
        };
        for v in &expected {
            match mesh.vertex(&v.sigma) {
                Some(m) => {
                    let err = m
                        .r
                        .iter()
                        .zip(&v.r)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    o.max_coordinate_error = o.max_coordinate_error.max(err);
                }
                None => o.missing.push(v.sigma.clone()),
            }
        }
        let expected_keys: HashSet<&[usize]> = expected.iter().map(|v| v.sigma.as_slice()).collect();
        o.extra = mesh
            .vertices()
            .iter()
            .filter(|v| !expected_keys.contains(v.sigma.as_slice()))
            .map(|v| v.sigma.clone())
            .collect();
        report.oracle = Some(o);
    }
    report
}
