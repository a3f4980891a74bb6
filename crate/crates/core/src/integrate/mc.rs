//! Monte-Carlo cell integration by raycasting from the generator.
//!
//! A ray from `x_i` in direction `y` leaves the cell at distance `l(y)`
//! through the face shared with neighbor `j`. Averaging over uniform `y`:
//!
//! - `|C_i| = S / d * E[l^d]`
//! - `|A_ij| = S * E[l^{d-1} / <n_ij, y> ; ray exits through j]`
//!
//! where `S` is the area of the unit sphere and `n_ij` the unit normal of the
//! face. Volume integrals subsample `m` radii per ray.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use statrs::function::gamma::gamma;

use super::{CellIntegrals, Integrand};
use crate::error::{Error, Result};
use crate::linalg::{add_scaled, dot, sub, norm};
use crate::mesh::Mesh;
use crate::nodes::{NodeSet, Scope};
use crate::raycast::{RayCaster, RayQuery, RaycastStats};
use crate::rng::{sample_unit_sphere, stream, Purpose};

/// Surface area `2 pi^{d/2} / Gamma(d/2)` of the unit sphere in `R^d`.
pub fn sphere_surface_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// How radii are drawn for the volume integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadialRule {
    /// `t = U^{1/d}`, density `d t^{d-1}`; each ray contributes
    /// `l^d / d` times the mean of `f`. Reduces to the volume estimate for
    /// constant `f` on the same samples.
    #[default]
    Importance,
    /// `t` uniform in `(0, 1)` weighted by `t^{d-1}`.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub rays: usize,
    pub subsamples: usize,
    pub seed: u64,
    pub radial: RadialRule,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            rays: 10_000,
            subsamples: 10,
            seed: 0,
            radial: RadialRule::default(),
        }
    }
}

/// Directions and radii come from separate streams so the sampled directions,
/// and with them volume and areas, do not depend on `subsamples` or `f`.
fn streams(seed: u64, cell: usize) -> (crate::rng::Stream, crate::rng::Stream) {
    (
        stream(seed, Purpose::MonteCarlo, 2 * cell as u64),
        stream(seed, Purpose::MonteCarlo, 2 * cell as u64 + 1),
    )
}

#[derive(Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Standard error of the mean of `n` samples, the unpushed ones being 0.
    fn std_error(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = ((self.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    }
}

/// Estimates volume, areas and (if `f` is given) integrals of cell `i`.
///
/// With `neighbors`, nearest-neighbor searches only consider those nodes and
/// every listed neighbor gets an area entry, zero if no ray hit it.
pub fn mc_integrate_cell(
    nodes: &NodeSet,
    i: usize,
    f: Option<&dyn Integrand>,
    cfg: &McConfig,
    neighbors: Option<&[usize]>,
) -> Result<CellIntegrals> {
    nodes.check_index(i)?;
    if cfg.rays == 0 || (f.is_some() && cfg.subsamples == 0) {
        return Err(Error::InvalidArgument("rays and subsamples must be at least 1".into()));
    }
    let d = nodes.dim();
    let xi = nodes.point(i);
    let caster = match neighbors {
        Some(nb) => RayCaster::new(nodes).with_scope(Scope::Subset(nb)),
        None => RayCaster::new(nodes),
    };
    let (mut dir_rng, mut rad_rng) = streams(cfg.seed, i);
    let s = sphere_surface_area(d);
    let m = if f.is_some() { cfg.subsamples } else { 0 };

    let mut area_sum: BTreeMap<usize, Moments> = BTreeMap::new();
    let mut surf_sum: BTreeMap<usize, f64> = BTreeMap::new();
    if let Some(nb) = neighbors {
        for &j in nb {
            area_sum.insert(j, Moments::default());
            surf_sum.insert(j, 0.0);
        }
    }
    let mut vol = Moments::default();
    let mut vol_f = 0.0;
    let mut stats = RaycastStats::default();

    for _ in 0..cfg.rays {
        let y = sample_unit_sphere(d, &mut dir_rng);
        let q = RayQuery {
            eta: vec![i],
            r: xi.to_vec(),
            u: y,
        };
        let Some(hit) = caster.cast(&q, &mut stats)? else {
            return Err(Error::UnboundedRay {
                cell: i,
                direction: q.u,
            });
        };
        let j = hit.new_index;
        let l = hit.t;
        let diff = sub(nodes.point(j), xi);
        let cos = dot(&diff, &q.u) / norm(&diff);
        let ld1 = l.powi(d as i32 - 1);
        let ld = ld1 * l;
        let a = ld1 / cos;
        area_sum.entry(j).or_default().push(a);
        vol.push(ld);
        if let Some(f) = f {
            *surf_sum.entry(j).or_insert(0.0) += f.eval(&hit.r) * a;
            let mut acc = 0.0;
            for _ in 0..m {
                let u: f64 = rad_rng.random();
                let (t, w) = match cfg.radial {
                    RadialRule::Importance => (u.powf(1.0 / d as f64), 1.0),
                    RadialRule::Uniform => (u, d as f64 * u.powi(d as i32 - 1)),
                };
                acc += w * f.eval(&add_scaled(xi, t * l, &q.u));
            }
            vol_f += ld * (acc / m as f64);
        }
    }

    let n = cfg.rays as f64;
    let mut out = CellIntegrals {
        cell: i,
        volume: s / (d as f64 * n) * vol.sum,
        volume_integral: s / (d as f64 * n) * vol_f,
        n_rays: cfg.rays,
        m_subsamples: m,
        volume_std_error: s / d as f64 * vol.std_error(cfg.rays),
        ..Default::default()
    };
    for (j, mo) in &area_sum {
        out.area.insert(*j, s / n * mo.sum);
        out.area_std_error.insert(*j, s * mo.std_error(cfg.rays));
        out.surface_integral
            .insert(*j, s / n * surf_sum.get(j).copied().unwrap_or(0.0));
    }
    Ok(out)
}

/// Volume and interface areas only, without evaluating any integrand.
pub fn mc_areas_only(
    nodes: &NodeSet,
    i: usize,
    rays: usize,
    seed: u64,
    neighbors: Option<&[usize]>,
) -> Result<CellIntegrals> {
    let cfg = McConfig {
        rays,
        subsamples: 0,
        seed,
        radial: RadialRule::default(),
    };
    mc_integrate_cell(nodes, i, None, &cfg, neighbors)
}

/// [`mc_integrate_cell`] restricted to the neighbors known from `mesh`.
pub fn mc_integrate_mesh_cell(
    mesh: &Mesh,
    i: usize,
    f: Option<&dyn Integrand>,
    cfg: &McConfig,
) -> Result<CellIntegrals> {
    mesh.nodes().check_index(i)?;
    let nb = mesh.neighbors(i);
    mc_integrate_cell(mesh.nodes(), i, f, cfg, Some(&nb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_surface_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_surface_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    fn square_cell() -> NodeSet {
        NodeSet::new(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn constant_integrand_reproduces_volume() {
        let ns = square_cell();
        let cfg = McConfig {
            rays: 2000,
            subsamples: 3,
            seed: 4,
            radial: RadialRule::Importance,
        };
        let one = |_: &[f64]| 1.0;
        let r = mc_integrate_cell(&ns, 0, Some(&one), &cfg, None).unwrap();
        assert_eq!(r.volume_integral, r.volume);
        for (j, a) in &r.area {
            assert_eq!(r.surface_integral[j], *a);
        }
        assert!((r.volume - 1.0).abs() < 0.05);
    }

    #[test]
    fn directions_ignore_subsamples() {
        let ns = square_cell();
        let f = |x: &[f64]| x[0] * x[0];
        let a = mc_integrate_cell(&ns, 0, Some(&f), &McConfig { subsamples: 1, ..Default::default() }, None)
            .unwrap();
        let b = mc_areas_only(&ns, 0, a.n_rays, 0, None).unwrap();
        assert_eq!(a.area, b.area);
        assert_eq!(a.volume, b.volume);
    }

    #[test]
    fn unbounded_cell_errors() {
        let ns = square_cell();
        let e = mc_areas_only(&ns, 1, 100, 0, None).unwrap_err();
        assert!(matches!(e, Error::UnboundedRay { cell: 1, .. }));
    }
}
