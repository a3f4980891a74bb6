//! Exact volumes and areas of bounded cells by recursive simplex decomposition.
//!
//! A cell is split into pyramids over its faces with apex `x_i`; each face is
//! split into cones over its own facets with apex at the facet's vertex
//! centroid, down to edges. Every resulting `d`-simplex has vertices
//! `x_i, c_2, ..., c_{d-1}, r, r'` and its volume comes from a [`MinorTable`]
//! whose trailing columns are shared along the recursion. Integrals are those
//! of the piecewise linear interpolant of `f` on this decomposition.

use std::collections::HashMap;

use super::minors::MinorTable;
use super::{CellIntegrals, Integrand};
use crate::error::{Error, Result};
use crate::linalg::{add_scaled, centroid, dist, dot, normalize, sub};
use crate::mesh::Mesh;

/// Face areas and integrals computed while processing lower-indexed cells,
/// keyed by `(min(i, j), max(i, j))`.
#[derive(Clone, Debug, Default)]
pub struct AreaCache {
    enabled: bool,
    faces: HashMap<(usize, usize), (f64, f64)>,
}

impl AreaCache {
    pub fn new() -> Self {
        AreaCache {
            enabled: true,
            faces: HashMap::new(),
        }
    }

    /// Every face is recomputed from both sides.
    pub fn disabled() -> Self {
        AreaCache::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        (i.min(j), i.max(j))
    }
}

struct Decomposition<'a> {
    mesh: &'a Mesh,
    f: &'a dyn Integrand,
    xi: &'a [f64],
    table: MinorTable,
    f_vertex: HashMap<usize, f64>,
    /// Vertices of the current face projected onto its bisector plane.
    coords: HashMap<usize, Vec<f64>>,
}

impl Decomposition<'_> {
    fn f_at_vertex(&mut self, k: usize) -> f64 {
        let (mesh, f) = (self.mesh, self.f);
        *self
            .f_vertex
            .entry(k)
            .or_insert_with(|| f.eval(&mesh.vertices()[k].r))
    }

    /// Removes the rounding noise of vertex coordinates normal to the face
    /// shared with `j`; far-away vertices would otherwise make the two sides
    /// of a face disagree on its area.
    fn project_face(&mut self, j: usize, verts: &[usize]) {
        let xj = self.mesh.nodes().point(j);
        let mut n = sub(xj, self.xi);
        normalize(&mut n);
        let mid: Vec<f64> = self.xi.iter().zip(xj).map(|(a, b)| 0.5 * (a + b)).collect();
        self.coords.clear();
        for &k in verts {
            let r = &self.mesh.vertices()[k].r;
            let off = dot(&sub(r, &mid), &n);
            self.coords.insert(k, add_scaled(r, -off, &n));
        }
    }

    /// Sum of `|det|` over the simplices of the face spanned by `verts`
    /// (whose generators include `used`, `level = |used|`), and the matching
    /// `|det|`-weighted integral of the interpolant.
    fn face(&mut self, level: usize, verts: &[usize], used: &mut Vec<usize>) -> Result<(f64, f64)> {
        let d = self.table.dim();
        let mesh = self.mesh;
        if level == d {
            let &[a, b] = verts else {
                return Err(Error::DegenerateConfiguration(format!(
                    "edge {used:?} has {} vertices",
                    verts.len()
                )));
            };
            self.table.update_minors(&sub(&self.coords[&a], self.xi), 2)?;
            let det = self
                .table
                .update_minors(&sub(&self.coords[&b], self.xi), 1)?
                .expect("column 1 completes the matrix");
            let v = det.abs();
            let fv = 0.5 * (self.f_at_vertex(a) + self.f_at_vertex(b)) * v;
            return Ok((v, fv));
        }

        let c = centroid(d, verts.iter().map(|&k| self.coords[&k].as_slice()));
        self.table.update_minors(&sub(&c, self.xi), d - level + 2)?;
        let fc = self.f.eval(&c);

        let mut next: Vec<usize> = verts
            .iter()
            .flat_map(|&k| mesh.vertices()[k].sigma.iter().copied())
            .filter(|g| !used.contains(g))
            .collect();
        next.sort_unstable();
        next.dedup();

        let (mut v, mut fsub) = (0.0, 0.0);
        for g in next {
            let sub_verts: Vec<usize> = verts
                .iter()
                .copied()
                .filter(|&k| mesh.vertices()[k].sigma.binary_search(&g).is_ok())
                .collect();
            used.push(g);
            let (sv, sf) = self.face(level + 1, &sub_verts, used)?;
            used.pop();
            v += sv;
            fsub += sf;
        }
        let k = (d - level + 1) as f64;
        Ok((v, k / (k + 1.0) * fsub + 1.0 / (k + 1.0) * fc * v))
    }
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Exact volume and interface areas of bounded cell `i`, with integrals of
/// the piecewise linear interpolant of `f`.
///
/// With an enabled cache, faces shared with a lower-indexed bounded cell are
/// taken from the cache, so cells must be processed in ascending order.
pub fn integrate_cell_poly(
    mesh: &Mesh,
    i: usize,
    f: &dyn Integrand,
    cache: &mut AreaCache,
) -> Result<CellIntegrals> {
    mesh.nodes().check_index(i)?;
    if !mesh.is_bounded(i) {
        return Err(Error::UnboundedCell(i));
    }
    let d = mesh.dim();
    let xi = mesh.nodes().point(i);
    let mut dec = Decomposition {
        mesh,
        f,
        xi,
        table: MinorTable::new(d)?,
        f_vertex: HashMap::new(),
        coords: HashMap::new(),
    };
    let dfact = factorial(d);
    let df = d as f64;

    let mut out = CellIntegrals {
        cell: i,
        ..Default::default()
    };
    let (mut vol, mut base) = (0.0, 0.0);
    for j in mesh.neighbors(i) {
        let h = 0.5 * dist(xi, mesh.nodes().point(j));
        let cached = if j < i && cache.enabled {
            match cache.faces.get(&AreaCache::key(i, j)) {
                Some(&hit) => Some(hit),
                None if mesh.is_bounded(j) => {
                    return Err(Error::MissingCache { lower: j, upper: i })
                }
                None => None,
            }
        } else {
            None
        };
        let (area, surf) = match cached {
            Some(hit) => hit,
            None => {
                let verts: Vec<usize> = mesh
                    .cell_vertices(i)
                    .iter()
                    .copied()
                    .filter(|&k| mesh.vertices()[k].sigma.binary_search(&j).is_ok())
                    .collect();
                dec.project_face(j, &verts);
                let (v, fv) = dec.face(2, &verts, &mut vec![i, j])?;
                let face = (v / dfact * df / h, fv / dfact * df / h);
                if j > i && cache.enabled {
                    cache.faces.insert(AreaCache::key(i, j), face);
                }
                face
            }
        };
        vol += h / df * area;
        base += h / df * surf;
        out.area.insert(j, area);
        out.surface_integral.insert(j, surf);
    }
    out.volume = vol;
    out.volume_integral = df / (df + 1.0) * base + 1.0 / (df + 1.0) * f.eval(xi) * vol;
    Ok(out)
}

/// Runs [`integrate_cell_poly`] over `cells` in ascending order. The cache is
/// used only when `cells` are all bounded cells, since otherwise lower
/// neighbors may never be visited.
pub fn integrate_cells_poly(mesh: &Mesh, cells: &[usize], f: &dyn Integrand) -> Result<Vec<CellIntegrals>> {
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut cache = if sorted == mesh.bounded_cells() {
        AreaCache::new()
    } else {
        AreaCache::disabled()
    };
    sorted
        .iter()
        .map(|&i| integrate_cell_poly(mesh, i, f, &mut cache))
        .collect()
}

/// Largest distance between two vertices of cell `i`.
pub fn cell_diameter(mesh: &Mesh, i: usize) -> f64 {
    let vs = mesh.cell_vertices(i);
    let mut best = 0.0f64;
    for (a, &p) in vs.iter().enumerate() {
        for &q in &vs[a + 1..] {
            best = best.max(dist(&mesh.vertices()[p].r, &mesh.vertices()[q].r));
        }
    }
    best
}

/// Taylor bounds on the interpolation error of the cell integral:
/// `(|C| M diam^2, M diam^2 / inf|f|)` for `M >= sup|f''|`.
pub fn poly_error_bounds(mesh: &Mesh, i: usize, f2_sup: f64, f_inf: f64) -> Result<(f64, f64)> {
    let one = |_: &[f64]| 1.0;
    let vol = integrate_cell_poly(mesh, i, &one, &mut AreaCache::disabled())?.volume;
    let dd = cell_diameter(mesh, i).powi(2);
    Ok((vol * f2_sup * dd, f2_sup * dd / f_inf))
}
