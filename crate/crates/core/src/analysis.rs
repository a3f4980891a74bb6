//! Closed-form vertex-count bound and measured diagram statistics.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// `C_{k,k} = 2 pi^{k/2} k^{k-1} / (k (k+1)) * B(k^2/2, 1/2)^{-1}
/// * (Gamma(k/2) / Gamma((k+1)/2))^k`, evaluated in log space.
pub fn complexity_constant(k: usize) -> f64 {
    let kf = k as f64;
    let ln_beta = ln_gamma(kf * kf / 2.0) + ln_gamma(0.5) - ln_gamma(kf * kf / 2.0 + 0.5);
    let ln_c = 2f64.ln() + kf / 2.0 * PI.ln() + (kf - 1.0) * kf.ln()
        - (kf * (kf + 1.0)).ln()
        - ln_beta
        + kf * (ln_gamma(kf / 2.0) - ln_gamma((kf + 1.0) / 2.0));
    ln_c.exp()
}

/// Expected number of vertices per cell of a Poisson-Voronoi diagram in
/// `R^d`, `C_{d+1,d+1}`, for `2 <= d <= 30`.
pub fn expected_vertices_lower_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: d });
    }
    if d > 30 {
        return Err(Error::DimensionTooLarge { max: 30, found: d });
    }
    Ok(complexity_constant(d + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingStats {
    pub dim: usize,
    pub n_nodes: usize,
    pub n_vertices: usize,
    pub bounded_cells: usize,
    pub vertices_per_cell: f64,
    pub neighbors_per_cell: f64,
}

/// Mean number of vertices and of face-sharing neighbors per cell, over all
/// cells including unbounded ones.
pub fn empirical_scaling(mesh: &Mesh) -> ScalingStats {
    let n = mesh.nodes().len();
    let incidences: usize = (0..n).map(|i| mesh.cell_vertices(i).len()).sum();
    let neighbors: usize = (0..n).map(|i| mesh.neighbors(i).len()).sum();
    ScalingStats {
        dim: mesh.dim(),
        n_nodes: n,
        n_vertices: mesh.vertices().len(),
        bounded_cells: mesh.bounded_cells().len(),
        vertices_per_cell: incidences as f64 / n as f64,
        neighbors_per_cell: neighbors as f64 / n as f64,
    }
}
