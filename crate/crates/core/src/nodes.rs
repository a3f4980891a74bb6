//! Generator points and filtered nearest-neighbor queries.

use crate::error::{Error, Result};
use crate::kdtree::{scan_nearest, KdTree, SkipPredicate};

/// Which candidates a nearest-neighbor query considers.
#[derive(Clone, Copy, Debug, Default)]
pub enum Scope<'a> {
    /// Spatial index over all nodes.
    #[default]
    Index,
    /// Linear scan over all nodes.
    Scan,
    /// Linear scan over an explicit candidate list (e.g. known neighbors of a cell).
    Subset(&'a [usize]),
}

/// The generator points `x_0, ..., x_{N-1}` of a diagram, in input order.
#[derive(Clone, Debug)]
pub struct NodeSet {
    dim: usize,
    coords: Vec<f64>,
    index: KdTree,
}

impl NodeSet {
    /// Validates the input and builds the spatial index.
    ///
    /// Requires `d >= 2`, at least `d + 1` points of equal length, finite
    /// coordinates and no exact duplicates.
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: i,
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
        }
        if dim < 2 {
            return Err(Error::DimensionTooSmall { min: 2, found: dim });
        }
        if points.len() < dim + 1 {
            return Err(Error::TooFewPoints {
                dim,
                required: dim + 1,
                found: points.len(),
            });
        }

        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .iter()
                .zip(&points[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint { first, second });
            }
        }

        let coords: Vec<f64> = points.iter().flatten().copied().collect();
        let index = KdTree::build(dim, &coords);
        Ok(NodeSet { dim, coords, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Nearest node to `q` among indices not skipped, as `(index, distance)`.
    /// Ties go to the smallest index; `None` when everything is skipped.
    pub fn nearest_neighbor<P: SkipPredicate + ?Sized>(
        &self,
        q: &[f64],
        skip: &P,
    ) -> Option<(usize, f64)> {
        self.nearest_in(Scope::Index, q, skip)
    }

    /// Brute-force reference for [`NodeSet::nearest_neighbor`].
    pub fn nearest_neighbor_scan<P: SkipPredicate + ?Sized>(
        &self,
        q: &[f64],
        skip: &P,
    ) -> Option<(usize, f64)> {
        self.nearest_in(Scope::Scan, q, skip)
    }

    pub fn nearest_in<P: SkipPredicate + ?Sized>(
        &self,
        scope: Scope<'_>,
        q: &[f64],
        skip: &P,
    ) -> Option<(usize, f64)> {
        debug_assert_eq!(q.len(), self.dim);
        let hit = match scope {
            Scope::Index => self.index.nearest(&self.coords, q, skip),
            Scope::Scan => scan_nearest(self.dim, &self.coords, 0..self.len(), q, skip),
            Scope::Subset(c) => scan_nearest(self.dim, &self.coords, c.iter().copied(), q, skip),
        };
        hit.map(|(i, d2)| (i, d2.sqrt()))
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }
}

/// Skips nodes on the closed back side of a hyperplane, plus an explicit
/// exclusion list: node `i` is a candidate iff `<x_i, normal> > threshold`
/// and `i` is not excluded.
pub struct HalfSpaceSkip<'a> {
    pub nodes: &'a NodeSet,
    pub normal: &'a [f64],
    pub threshold: f64,
    pub exclude: &'a [usize],
}

impl SkipPredicate for HalfSpaceSkip<'_> {
    fn skip(&self, index: usize) -> bool {
        if self.exclude.contains(&index) {
            return true;
        }
        let x = self.nodes.point(index);
        crate::linalg::dot(x, self.normal) <= self.threshold
    }

    fn skip_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        // same summation order as `skip`, and rounding is monotone, so the box
        // maximum bounds every contained point's computed projection
        let mut s = 0.0;
        for k in 0..self.normal.len() {
            s += (lo[k] * self.normal[k]).max(hi[k] * self.normal[k]);
        }
        s <= self.threshold
    }
}
