//! Vertices, edges and boundary rays of a computed diagram.

use std::collections::HashMap;

use serde::Serialize;

use crate::linalg::{dist, sq_dist};
use crate::nodes::NodeSet;

/// Relative tolerance for accepting a vertex: generator distances must agree
/// to this precision and no other node may be closer by more than it.
pub const TOL_VERTEX: f64 = 1e-8;

/// Relative band around a circumsphere inside which an extra node counts as
/// cospherical (non-general position).
pub const TOL_DEGENERATE: f64 = 1e-10;

/// A Voronoi vertex: `d + 1` sorted generator indices and its coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexRecord {
    pub sigma: Vec<usize>,
    pub r: Vec<f64>,
}

/// An edge, identified by the `d` generators equidistant along it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey(Vec<usize>);

impl EdgeKey {
    /// Sorts the given indices.
    pub fn new(mut eta: Vec<usize>) -> Self {
        eta.sort_unstable();
        EdgeKey(eta)
    }

    /// `sigma` without the element at position `pos` (stays sorted).
    pub fn omitting(sigma: &[usize], pos: usize) -> Self {
        let mut eta = Vec::with_capacity(sigma.len() - 1);
        eta.extend_from_slice(&sigma[..pos]);
        eta.extend_from_slice(&sigma[pos + 1..]);
        EdgeKey(eta)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

/// An unbounded edge leaving the vertex `sigma` in direction `u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryRay {
    pub sigma: Vec<usize>,
    pub u: Vec<f64>,
    #[serde(skip)]
    pub eta: EdgeKey,
}

/// Why a vertex failed validation.
#[derive(Clone, Debug, PartialEq)]
pub enum VertexViolation {
    Arity { expected: usize, found: usize },
    NotEquidistant { relative_spread: f64 },
    CloserNode { index: usize, distance: f64, radius: f64 },
}

/// Checks the two vertex invariants against every node by linear scan:
/// generators equidistant to `r` within [`TOL_VERTEX`] relative, and no other
/// node closer than `radius * (1 - TOL_VERTEX)`.
pub fn verify_vertex(nodes: &NodeSet, v: &VertexRecord) -> Result<(), VertexViolation> {
    let d = nodes.dim();
    if v.sigma.len() != d + 1 {
        return Err(VertexViolation::Arity {
            expected: d + 1,
            found: v.sigma.len(),
        });
    }
    let ds: Vec<f64> = v.sigma.iter().map(|&g| dist(nodes.point(g), &v.r)).collect();
    let radius = ds[0];
    let spread = ds.iter().map(|x| (x - radius).abs()).fold(0.0, f64::max);
    if spread > TOL_VERTEX * radius {
        return Err(VertexViolation::NotEquidistant {
            relative_spread: spread / radius,
        });
    }
    let limit = radius * (1.0 - TOL_VERTEX);
    for (i, x) in nodes.points().enumerate() {
        if v.sigma.contains(&i) {
            continue;
        }
        let di = sq_dist(x, &v.r).sqrt();
        if di < limit {
            return Err(VertexViolation::CloserNode {
                index: i,
                distance: di,
                radius,
            });
        }
    }
    Ok(())
}

/// Nodes, vertices, edge visit counts and unbounded edges of a diagram.
#[derive(Clone, Debug)]
pub struct Mesh {
    nodes: NodeSet,
    vertices: Vec<VertexRecord>,
    lookup: HashMap<Vec<usize>, usize>,
    edge_counts: HashMap<EdgeKey, u8>,
    boundary: Vec<BoundaryRay>,
    cell_vertices: Vec<Vec<usize>>,
    unbounded: Vec<bool>,
}

impl Mesh {
    /// Assembles a mesh; vertices are sorted by generator set and boundary
    /// rays by `(sigma, eta)` so equal diagrams compare and serialize equally.
    pub fn from_parts(
        nodes: NodeSet,
        mut vertices: Vec<VertexRecord>,
        edge_counts: HashMap<EdgeKey, u8>,
        mut boundary: Vec<BoundaryRay>,
    ) -> Self {
        vertices.sort_by(|a, b| a.sigma.cmp(&b.sigma));
        boundary.sort_by(|a, b| (&a.sigma, &a.eta).cmp(&(&b.sigma, &b.eta)));
        let lookup = vertices
            .iter()
            .enumerate()
            .map(|(k, v)| (v.sigma.clone(), k))
            .collect();
        let mut cell_vertices = vec![Vec::new(); nodes.len()];
        for (k, v) in vertices.iter().enumerate() {
            for &g in &v.sigma {
                cell_vertices[g].push(k);
            }
        }
        let mut unbounded = vec![false; nodes.len()];
        for b in &boundary {
            for &g in b.eta.as_slice() {
                unbounded[g] = true;
            }
        }
        Mesh {
            nodes,
            vertices,
            lookup,
            edge_counts,
            boundary,
            cell_vertices,
            unbounded,
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn vertex(&self, sigma: &[usize]) -> Option<&VertexRecord> {
        self.lookup.get(sigma).map(|&k| &self.vertices[k])
    }

    pub fn edge_counts(&self) -> &HashMap<EdgeKey, u8> {
        &self.edge_counts
    }

    pub fn boundary(&self) -> &[BoundaryRay] {
        &self.boundary
    }

    pub fn interior_edge_count(&self) -> usize {
        self.edge_counts.values().filter(|&&c| c == 2).count()
    }

    /// Indices into [`Mesh::vertices`] of the vertices of cell `i`.
    pub fn cell_vertices(&self, i: usize) -> &[usize] {
        &self.cell_vertices[i]
    }

    pub fn is_bounded(&self, i: usize) -> bool {
        !self.unbounded[i]
    }

    pub fn bounded_cells(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| !self.unbounded[i]).collect()
    }

    /// Sorted indices of cells sharing a face with cell `i`.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.cell_vertices[i]
            .iter()
            .flat_map(|&k| self.vertices[k].sigma.iter().copied())
            .filter(|&g| g != i)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Vertices on the interface of cells `i` and `j`.
    pub fn face_vertices(&self, i: usize, j: usize) -> Vec<usize> {
        self.cell_vertices[i]
            .iter()
            .copied()
            .filter(|&k| self.vertices[k].sigma.binary_search(&j).is_ok())
            .collect()
    }

    /// Whether an unbounded edge runs along the interface of `i` and `j`.
    pub fn face_is_unbounded(&self, i: usize, j: usize) -> bool {
        self.boundary
            .iter()
            .any(|b| b.eta.contains(i) && b.eta.contains(j))
    }

    pub fn to_json(&self) -> MeshJson<'_> {
        MeshJson {
            dim: self.dim(),
            n_nodes: self.nodes.len(),
            vertices: &self.vertices,
            boundary_rays: &self.boundary,
        }
    }
}

/// Serialized form of a mesh.
#[derive(Serialize)]
pub struct MeshJson<'a> {
    pub dim: usize,
    pub n_nodes: usize,
    pub vertices: &'a [VertexRecord],
    pub boundary_rays: &'a [BoundaryRay],
}
