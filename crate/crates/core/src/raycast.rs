//! Raycasting along the equidistant set of a group of generators.
//!
//! Given generators `eta`, a point `r` equidistant to them and a unit
//! direction `u` orthogonal to their affine span, a raycast finds the first
//! `t > 0` at which `r + t u` becomes equidistant to one more node. For
//! `|eta| = d` this walks a Voronoi edge to its next vertex; for smaller `eta`
//! it lands on the next lower-dimensional facet.
//!
//! The incircle search alternates nearest-neighbor queries and exact
//! projections onto the ray until the nearest node in the forward half-space
//! is the one that produced the current candidate. The bisection search is an
//! approximate baseline kept for benchmarking.

use crate::error::{Error, Result};
use crate::linalg::{add_scaled, affine_basis, dist, dot, norm, project_out, sq_dist, sub};
use crate::mesh::TOL_DEGENERATE;
use crate::nodes::{HalfSpaceSkip, NodeSet, Scope};

/// Generators `eta` (sorted), a point `r` equidistant to them, and a unit
/// search direction `u` orthogonal to their affine span.
#[derive(Clone, Debug, PartialEq)]
pub struct RayQuery {
    pub eta: Vec<usize>,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

impl RayQuery {
    pub fn new(mut eta: Vec<usize>, r: Vec<f64>, u: Vec<f64>) -> Self {
        eta.sort_unstable();
        RayQuery { eta, r, u }
    }

    /// Checks orthogonality, normalization and equidistance.
    pub fn validate(&self, nodes: &NodeSet) -> Result<()> {
        let d = nodes.dim();
        if self.eta.is_empty() || self.eta.len() > d {
            return Err(Error::InvalidArgument(format!(
                "ray query needs 1..={d} generators, got {}",
                self.eta.len()
            )));
        }
        if self.r.len() != d || self.u.len() != d {
            return Err(Error::InvalidArgument("ray query vectors must have length d".into()));
        }
        for &g in &self.eta {
            nodes.check_index(g)?;
        }
        if (norm(&self.u) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("search direction is not unit length".into()));
        }
        let x0 = nodes.point(self.eta[0]);
        let r0 = dist(&self.r, x0);
        for &g in &self.eta[1..] {
            let xg = nodes.point(g);
            if dot(&self.u, &sub(xg, x0)).abs() > 1e-9 {
                return Err(Error::InvalidArgument(
                    "search direction is not orthogonal to the generators".into(),
                ));
            }
            if (dist(&self.r, xg) - r0).abs() > crate::mesh::TOL_VERTEX * r0 {
                return Err(Error::InvalidArgument(
                    "reference point is not equidistant to the generators".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Counters for nearest-neighbor work done by raycasts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RaycastStats {
    pub nn_calls: u64,
    pub iterations: u64,
}

impl std::ops::AddAssign for RaycastStats {
    fn add_assign(&mut self, o: Self) {
        self.nn_calls += o.nn_calls;
        self.iterations += o.iterations;
    }
}

/// Result of a successful raycast.
#[derive(Clone, Debug, PartialEq)]
pub struct RayHit {
    /// `eta` plus the new generator, sorted.
    pub sigma: Vec<usize>,
    /// The point on the ray equidistant to all of `sigma`.
    pub r: Vec<f64>,
    /// The generator that joined.
    pub new_index: usize,
    /// Ray parameter of `r` relative to the query point.
    pub t: f64,
}

/// Ray parameter at which `r + t u` is equidistant to `x0` and `x`.
pub fn project_t(r: &[f64], u: &[f64], x0: &[f64], x: &[f64]) -> Result<f64> {
    let diff = sub(x, x0);
    let den = 2.0 * dot(u, &diff);
    if den.abs() < 2e-14 * norm(&diff) {
        return Err(Error::ParallelGenerator);
    }
    Ok((sq_dist(r, x) - sq_dist(r, x0)) / den)
}

/// Warm start for a vertex search (`|eta| = d`).
///
/// Moves `r` along `u` onto the affine plane of the generators, then steps
/// forward by the height of a regular simplex whose base has the in-plane
/// circumradius `|r_proj - x|`.
pub fn initial_heuristic(q: &RayQuery, x: &[f64]) -> Vec<f64> {
    let k = q.eta.len() as f64;
    let r_proj = add_scaled(&q.r, dot(&q.u, &sub(x, &q.r)), &q.u);
    let h = dist(&r_proj, x) / ((k - 1.0) * (k + 1.0)).sqrt();
    add_scaled(&r_proj, h, &q.u)
}

/// How vertices are located along a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Exact incircle search, optionally warm-started by [`initial_heuristic`].
    Incircle { heuristic: bool },
    /// Exponential bracketing then bisection to absolute accuracy `eps` in `t`.
    Bisection { eps: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Incircle { heuristic: true }
    }
}

/// Raycaster bound to a node set, a search method and a candidate scope.
#[derive(Clone, Copy, Debug)]
pub struct RayCaster<'a> {
    nodes: &'a NodeSet,
    method: Method,
    scope: Scope<'a>,
}

impl<'a> RayCaster<'a> {
    pub fn new(nodes: &'a NodeSet) -> Self {
        RayCaster {
            nodes,
            method: Method::default(),
            scope: Scope::Index,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_scope(mut self, scope: Scope<'a>) -> Self {
        self.scope = scope;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn nodes(&self) -> &'a NodeSet {
        self.nodes
    }

    /// Returns `None` iff the ray escapes to infinity.
    pub fn cast(&self, q: &RayQuery, stats: &mut RaycastStats) -> Result<Option<RayHit>> {
        match self.method {
            Method::Incircle { heuristic } => self.incircle(q, heuristic, stats),
            Method::Bisection { eps } => self.bisection(q, eps, stats),
        }
    }

    fn forward_skip<'s>(&'s self, q: &'s RayQuery) -> HalfSpaceSkip<'s> {
        let mut level = f64::NEG_INFINITY;
        let mut scale = 1.0f64;
        for &g in &q.eta {
            let xg = self.nodes.point(g);
            level = level.max(dot(xg, &q.u));
            scale = scale.max(norm(xg));
        }
        HalfSpaceSkip {
            nodes: self.nodes,
            normal: &q.u,
            threshold: level + 1e-12 * scale,
            exclude: &q.eta,
        }
    }

    fn incircle(
        &self,
        q: &RayQuery,
        heuristic: bool,
        stats: &mut RaycastStats,
    ) -> Result<Option<RayHit>> {
        let x0 = self.nodes.point(q.eta[0]);
        let skip = self.forward_skip(q);
        let start = if heuristic && q.eta.len() == self.nodes.dim() && q.eta.len() > 1 {
            initial_heuristic(q, x0)
        } else {
            q.r.clone()
        };

        stats.nn_calls += 1;
        let Some((mut i, _)) = self.nodes.nearest_in(self.scope, &start, &skip) else {
            return Ok(None);
        };
        let mut t_prev = f64::INFINITY;
        loop {
            stats.iterations += 1;
            let xi = self.nodes.point(i);
            let t = project_t(&q.r, &q.u, x0, xi)?;
            // candidates walk strictly backwards along the ray
            if t >= t_prev {
                return Err(Error::DegenerateConfiguration(format!(
                    "raycast from {:?} did not shrink (t = {t}, previous {t_prev})",
                    q.eta
                )));
            }
            t_prev = t;
            let r_new = add_scaled(&q.r, t, &q.u);

            stats.nn_calls += 1;
            let (j, dj) = self
                .nodes
                .nearest_in(self.scope, &r_new, &skip)
                .expect("current candidate is never skipped");
            if j == i {
                let mut sigma = q.eta.clone();
                let pos = sigma.partition_point(|&g| g < i);
                sigma.insert(pos, i);
                return Ok(Some(RayHit {
                    sigma,
                    r: r_new,
                    new_index: i,
                    t,
                }));
            }
            let di = dist(&r_new, xi);
            if dj >= di * (1.0 - TOL_DEGENERATE) {
                return Err(Error::DegenerateConfiguration(format!(
                    "nodes {i} and {j} are cospherical with {:?}",
                    q.eta
                )));
            }
            i = j;
        }
    }

    fn bisection(&self, q: &RayQuery, eps: f64, stats: &mut RaycastStats) -> Result<Option<RayHit>> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidArgument(format!("bisection eps must be positive, got {eps}")));
        }
        let x0 = self.nodes.point(q.eta[0]);
        let skip = self.forward_skip(q);

        stats.nn_calls += 1;
        let Some((_, step)) = self.nodes.nearest_in(self.scope, &q.r, &skip) else {
            return Ok(None);
        };

        // `Some(j)` when node j is strictly closer than the eta generators at r + t u
        let mut probe = |t: f64| -> Option<usize> {
            let p = add_scaled(&q.r, t, &q.u);
            stats.nn_calls += 1;
            stats.iterations += 1;
            let (j, dj) = self
                .nodes
                .nearest_in(self.scope, &p, &skip)
                .expect("forward half-space is non-empty");
            (dj < dist(&p, x0)).then_some(j)
        };

        let mut lo = 0.0;
        let mut hi = step;
        let mut witness = loop {
            if let Some(j) = probe(hi) {
                break j;
            }
            lo = hi;
            hi *= 2.0;
            if hi > step * 2f64.powi(60) {
                return Err(Error::NoBracket);
            }
        };
        while hi - lo > 2.0 * eps {
            let mid = 0.5 * (lo + hi);
            match probe(mid) {
                Some(j) => {
                    hi = mid;
                    witness = j;
                }
                None => lo = mid,
            }
        }
        let t = 0.5 * (lo + hi);
        let mut sigma = q.eta.clone();
        let pos = sigma.partition_point(|&g| g < witness);
        sigma.insert(pos, witness);
        Ok(Some(RayHit {
            sigma,
            r: add_scaled(&q.r, t, &q.u),
            new_index: witness,
            t,
        }))
    }
}

/// Exact incircle raycast over the spatial index, warm-started.
pub fn raycast_incircle(
    nodes: &NodeSet,
    q: &RayQuery,
    stats: &mut RaycastStats,
) -> Result<Option<RayHit>> {
    RayCaster::new(nodes).cast(q, stats)
}

/// Bisection raycast with absolute accuracy `eps` on the ray parameter.
pub fn raycast_bisection(
    nodes: &NodeSet,
    q: &RayQuery,
    eps: f64,
    stats: &mut RaycastStats,
) -> Result<Option<RayHit>> {
    RayCaster::new(nodes)
        .with_method(Method::Bisection { eps })
        .cast(q, stats)
}

/// Unit direction along edge `eta` of vertex `sigma`, pointing away from the
/// generator in `sigma` that is not in `eta`.
pub fn search_direction(nodes: &NodeSet, sigma: &[usize], eta: &[usize]) -> Result<Vec<f64>> {
    let mut extra = sigma.iter().filter(|g| !eta.contains(g));
    let (Some(&k), None) = (extra.next(), extra.next()) else {
        return Err(Error::InvalidArgument(format!(
            "edge {eta:?} must omit exactly one generator of {sigma:?}"
        )));
    };
    let origin = nodes.point(eta[0]);
    let basis = affine_basis(origin, eta[1..].iter().map(|&g| nodes.point(g)), 1e-10)
        .ok_or_else(|| {
            Error::DegenerateConfiguration(format!("generators {eta:?} are affinely dependent"))
        })?;
    let mut w = sub(nodes.point(k), origin);
    let len = norm(&w);
    project_out(&mut w, &basis);
    let res = norm(&w);
    if res <= 1e-10 * len {
        return Err(Error::DegenerateConfiguration(format!(
            "generators {sigma:?} are affinely dependent"
        )));
    }
    Ok(w.iter().map(|x| -x / res).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> NodeSet {
        NodeSet::new(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn project_t_hand_example() {
        let t = project_t(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[2.0, 1.0]).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        let rp = [t, 0.0];
        assert!((dist(&rp, &[0.0, 1.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert!((dist(&rp, &[2.0, 1.0]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn project_t_parallel() {
        let e = project_t(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]).unwrap_err();
        assert_eq!(e, Error::ParallelGenerator);
    }

    #[test]
    fn incircle_finds_circumcenter() {
        let ns = triangle();
        let q = RayQuery::new(vec![0, 1], vec![0.5, 0.0], vec![0.0, 1.0]);
        q.validate(&ns).unwrap();
        let mut st = RaycastStats::default();
        let hit = raycast_incircle(&ns, &q, &mut st).unwrap().unwrap();
        assert_eq!(hit.sigma, vec![0, 1, 2]);
        assert!((hit.r[0] - 0.5).abs() < 1e-15 && (hit.r[1] - 0.5).abs() < 1e-15);
        assert!(st.nn_calls >= 1);
    }

    #[test]
    fn incircle_empty_halfspace_escapes() {
        let ns = triangle();
        let q = RayQuery::new(vec![0, 1], vec![0.5, 0.0], vec![0.0, -1.0]);
        let mut st = RaycastStats::default();
        assert_eq!(raycast_incircle(&ns, &q, &mut st).unwrap(), None);
        assert_eq!(st.nn_calls, 1);
    }

    #[test]
    fn bisection_approximates_circumcenter() {
        let ns = triangle();
        let q = RayQuery::new(vec![0, 1], vec![0.5, 0.0], vec![0.0, 1.0]);
        let mut st = RaycastStats::default();
        let hit = raycast_bisection(&ns, &q, 1e-8, &mut st).unwrap().unwrap();
        assert_eq!(hit.sigma, vec![0, 1, 2]);
        assert!((hit.t - 0.5).abs() <= 1e-8);
        assert!(dist(&hit.r, &[0.5, 0.5]) <= 1e-8);

        let coarse = raycast_bisection(&ns, &q, 1e-2, &mut st).unwrap().unwrap();
        assert!((coarse.t - 0.5).abs() <= 1e-2);
    }

    #[test]
    fn bisection_rejects_bad_eps() {
        let ns = triangle();
        let q = RayQuery::new(vec![0, 1], vec![0.5, 0.0], vec![0.0, 1.0]);
        let mut st = RaycastStats::default();
        assert!(raycast_bisection(&ns, &q, 0.0, &mut st).is_err());
    }

    #[test]
    fn search_direction_points_away() {
        let ns = triangle();
        let u = search_direction(&ns, &[0, 1, 2], &[0, 1]).unwrap();
        assert!((u[0]).abs() < 1e-15 && (u[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn heuristic_regular_triangle_lands_on_circumcenter() {
        // edge (0,0)-(l,0), third vertex above; search from edge midpoint upward
        let l = 2.0;
        let ns = NodeSet::new(&[vec![0.0, 0.0], vec![l, 0.0], vec![l / 2.0, l * 3f64.sqrt() / 2.0]])
            .unwrap();
        let q = RayQuery::new(vec![0, 1], vec![l / 2.0, -5.0], vec![0.0, 1.0]);
        let h = initial_heuristic(&q, ns.point(0));
        // projected radius l/2, height (l/2)/sqrt(3)
        assert!((h[1] - (l / 2.0) / 3f64.sqrt()).abs() < 1e-14);
        let circumradius = l / 3f64.sqrt();
        for g in 0..3 {
            assert!((dist(&h, ns.point(g)) - circumradius).abs() < 1e-14);
        }
    }

    #[test]
    fn heuristic_moves_off_circumcenter_in_2d() {
        let ns = triangle();
        let q = RayQuery::new(vec![0, 1], vec![0.5, 0.5], vec![0.0, 1.0]);
        let h = initial_heuristic(&q, ns.point(0));
        assert!((h[1] - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        assert!((h[0] - 0.5).abs() < 1e-15);
    }
}
