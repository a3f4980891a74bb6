//! Cell volumes, interface areas and integrals over Voronoi cells.
//!
//! Three estimators share one result type:
//! - [`mc`]: rays from the generator sample the boundary distance,
//! - [`poly`]: exact decomposition into simplices, linear interpolation of `f`,
//! - [`hmc`]: Monte-Carlo areas combined with vertex values of `f`.

use std::collections::BTreeMap;

use serde::Serialize;

pub mod hmc;
pub mod integrand;
pub mod mc;
pub mod minors;
pub mod poly;

pub use integrand::{Builtin, Integrand};

/// Volume, per-neighbor interface areas and integrals of one cell.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CellIntegrals {
    pub cell: usize,
    pub volume: f64,
    /// Interface area with each neighbor.
    pub area: BTreeMap<usize, f64>,
    /// Integral of `f` over each interface.
    pub surface_integral: BTreeMap<usize, f64>,
    /// Integral of `f` over the cell.
    pub volume_integral: f64,
    pub n_rays: usize,
    pub m_subsamples: usize,
    /// Sample standard error of `volume`; zero for exact methods.
    pub volume_std_error: f64,
    /// Sample standard error of each area; empty for exact methods.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub area_std_error: BTreeMap<usize, f64>,
}

impl CellIntegrals {
    pub fn total_area(&self) -> f64 {
        self.area.values().sum()
    }
}

/// Which estimator [`integrate_cells`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrationMethod {
    MonteCarlo,
    Polytope,
    Heuristic,
}

impl std::str::FromStr for IntegrationMethod {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "mc" => Ok(IntegrationMethod::MonteCarlo),
            "poly" => Ok(IntegrationMethod::Polytope),
            "hmc" => Ok(IntegrationMethod::Heuristic),
            _ => Err(crate::error::Error::Parse(format!(
                "unknown method {s:?}, expected mc, poly or hmc"
            ))),
        }
    }
}

impl std::fmt::Display for IntegrationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IntegrationMethod::MonteCarlo => "mc",
            IntegrationMethod::Polytope => "poly",
            IntegrationMethod::Heuristic => "hmc",
        })
    }
}

/// Integrates `f` over each of `cells`, returned in ascending cell order.
///
/// Monte-Carlo and heuristic estimates run in parallel on the current rayon
/// pool; each cell draws from its own stream, so results do not depend on the
/// number of threads.
pub fn integrate_cells(
    mesh: &crate::mesh::Mesh,
    cells: &[usize],
    method: IntegrationMethod,
    f: &dyn Integrand,
    cfg: &mc::McConfig,
) -> crate::error::Result<Vec<CellIntegrals>> {
    use rayon::prelude::*;

    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    match method {
        IntegrationMethod::Polytope => poly::integrate_cells_poly(mesh, &sorted, f),
        IntegrationMethod::MonteCarlo => sorted
            .par_iter()
            .map(|&i| mc::mc_integrate_mesh_cell(mesh, i, Some(f), cfg))
            .collect(),
        IntegrationMethod::Heuristic => sorted
            .par_iter()
            .map(|&i| hmc::hmc_integrate_cell(mesh, i, f, cfg))
            .collect(),
    }
}
