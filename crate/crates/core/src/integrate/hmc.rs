//! Heuristic Monte-Carlo integration.
//!
//! Interface areas come from rays (or any other source); volumes follow from
//! the pyramid decomposition over the faces and integrals from vertex values
//! of `f` on each face combined with the cone rule.

use std::collections::BTreeMap;

use super::mc::{mc_integrate_mesh_cell, McConfig};
use super::{CellIntegrals, Integrand};
use crate::error::{Error, Result};
use crate::linalg::{centroid, dist};
use crate::mesh::Mesh;

fn check_cell(mesh: &Mesh, i: usize, areas: &BTreeMap<usize, f64>) -> Result<Vec<usize>> {
    mesh.nodes().check_index(i)?;
    if !mesh.is_bounded(i) {
        return Err(Error::UnboundedCell(i));
    }
    let nb = mesh.neighbors(i);
    if let Some(&j) = nb.iter().find(|j| !areas.contains_key(j)) {
        return Err(Error::MissingNeighbor { cell: i, neighbor: j });
    }
    Ok(nb)
}

/// `(1/d) sum_j |x_i - x_j| / 2 * A_ij`.
pub fn hmc_volume(mesh: &Mesh, i: usize, areas: &BTreeMap<usize, f64>) -> Result<f64> {
    let nb = check_cell(mesh, i, areas)?;
    let xi = mesh.nodes().point(i);
    let d = mesh.dim() as f64;
    Ok(nb
        .iter()
        .map(|&j| 0.5 * dist(xi, mesh.nodes().point(j)) * areas[&j])
        .sum::<f64>()
        / d)
}

/// Integral of `f` over the interface of `i` and `j` with area `a_ij`:
/// `d/(d+1) * mean_k f(v_k) * a_ij + 1/(d+1) * f(y) * a_ij` over the
/// interface vertices `v_k` and their centroid `y`.
pub fn hmc_interface_integral(mesh: &Mesh, i: usize, j: usize, a_ij: f64, f: &dyn Integrand) -> Result<f64> {
    if mesh.face_is_unbounded(i, j) {
        return Err(Error::UnboundedFace(i, j));
    }
    let d = mesh.dim();
    let verts = mesh.face_vertices(i, j);
    if verts.len() < d {
        return Err(Error::MissingNeighbor { cell: i, neighbor: j });
    }
    let pts: Vec<&[f64]> = verts.iter().map(|&k| mesh.vertices()[k].r.as_slice()).collect();
    let mean_f = pts.iter().map(|p| f.eval(p)).sum::<f64>() / pts.len() as f64;
    let y = centroid(d, pts.iter().copied());
    let df = d as f64;
    Ok(df / (df + 1.0) * mean_f * a_ij + 1.0 / (df + 1.0) * f.eval(&y) * a_ij)
}

/// Cone rule with apex `x_i` over every face:
/// `sum_j h_j/d * (d/(d+1) F_ij + 1/(d+1) f(x_i) A_ij)`, `h_j = |x_i - x_j| / 2`.
pub fn hmc_cell_integral(mesh: &Mesh, i: usize, f: &dyn Integrand, areas: &BTreeMap<usize, f64>) -> Result<f64> {
    Ok(hmc_cell(mesh, i, f, areas)?.volume_integral)
}

fn hmc_cell(mesh: &Mesh, i: usize, f: &dyn Integrand, areas: &BTreeMap<usize, f64>) -> Result<CellIntegrals> {
    let nb = check_cell(mesh, i, areas)?;
    let xi = mesh.nodes().point(i);
    let fi = f.eval(xi);
    let df = mesh.dim() as f64;
    let mut out = CellIntegrals {
        cell: i,
        volume: hmc_volume(mesh, i, areas)?,
        ..Default::default()
    };
    for j in nb {
        let a = areas[&j];
        let surf = hmc_interface_integral(mesh, i, j, a, f)?;
        let h = 0.5 * dist(xi, mesh.nodes().point(j));
        out.volume_integral += h / df * (df / (df + 1.0) * surf + 1.0 / (df + 1.0) * fi * a);
        out.area.insert(j, a);
        out.surface_integral.insert(j, surf);
    }
    Ok(out)
}

/// Full heuristic estimate for cell `i`: ray-sampled areas, then
/// [`hmc_volume`], [`hmc_interface_integral`] and [`hmc_cell_integral`].
/// Radial subsampling is never used, so `cfg.subsamples` has no effect.
pub fn hmc_integrate_cell(mesh: &Mesh, i: usize, f: &dyn Integrand, cfg: &McConfig) -> Result<CellIntegrals> {
    if !mesh.is_bounded(i) {
        return Err(Error::UnboundedCell(i));
    }
    let mc = mc_integrate_mesh_cell(mesh, i, None, cfg)?;
    let mut out = hmc_cell(mesh, i, f, &mc.area)?;
    out.n_rays = mc.n_rays;
    out.area_std_error = mc.area_std_error;
    Ok(out)
}
