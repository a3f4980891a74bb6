//! Static kd-tree over a flat coordinate buffer with filtered nearest-neighbor
//! queries.
//!
//! Queries are exact: the result is the same `(index, distance)` a linear scan
//! with the same skip predicate returns, including the smallest-index
//! tie-break. Nodes keep their bounding boxes so predicates that exclude whole
//! regions (half-spaces) can prune subtrees.

use crate::linalg::sq_dist;

const LEAF_SIZE: usize = 8;
const NONE: u32 = u32::MAX;

/// Decides which point indices a nearest-neighbor query ignores.
pub trait SkipPredicate {
    fn skip(&self, index: usize) -> bool;

    /// `true` only if every point inside the box `[lo, hi]` would be skipped.
    fn skip_box(&self, _lo: &[f64], _hi: &[f64]) -> bool {
        false
    }
}

impl<F: Fn(usize) -> bool> SkipPredicate for F {
    fn skip(&self, index: usize) -> bool {
        self(index)
    }
}

/// Skips nothing.
pub struct NoSkip;

impl SkipPredicate for NoSkip {
    fn skip(&self, _index: usize) -> bool {
        false
    }
}

#[derive(Clone, Debug)]
struct Node {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
}

#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    nodes: Vec<Node>,
    // per node: lo[0..dim], hi[0..dim]
    boxes: Vec<f64>,
    perm: Vec<u32>,
}

impl KdTree {
    pub fn build(dim: usize, coords: &[f64]) -> Self {
        let n = coords.len() / dim;
        let mut tree = KdTree {
            dim,
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            boxes: Vec::new(),
            perm: (0..n as u32).collect(),
        };
        if n > 0 {
            tree.build_node(coords, 0, n);
        }
        tree
    }

    fn build_node(&mut self, coords: &[f64], start: usize, end: usize) -> u32 {
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &p in &self.perm[start..end] {
            let x = &coords[p as usize * dim..(p as usize + 1) * dim];
            for k in 0..dim {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            start: start as u32,
            end: end as u32,
            left: NONE,
            right: NONE,
        });
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        if end - start > LEAF_SIZE {
            let axis = (0..dim)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap_or(0);
            let mid = (start + end) / 2;
            self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                coords[a as usize * dim + axis].total_cmp(&coords[b as usize * dim + axis])
            });
            let left = self.build_node(coords, start, mid);
            let right = self.build_node(coords, mid, end);
            let node = &mut self.nodes[id as usize];
            node.left = left;
            node.right = right;
        }
        id
    }

    fn bbox(&self, node: u32) -> (&[f64], &[f64]) {
        let off = node as usize * 2 * self.dim;
        (
            &self.boxes[off..off + self.dim],
            &self.boxes[off + self.dim..off + 2 * self.dim],
        )
    }

    fn box_sq_dist(&self, node: u32, q: &[f64]) -> f64 {
        let (lo, hi) = self.bbox(node);
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = if q[k] < lo[k] {
                lo[k] - q[k]
            } else if q[k] > hi[k] {
                q[k] - hi[k]
            } else {
                0.0
            };
            s += d * d;
        }
        s
    }

    /// Nearest non-skipped point as `(index, squared distance)`.
    pub fn nearest<P: SkipPredicate + ?Sized>(
        &self,
        coords: &[f64],
        q: &[f64],
        skip: &P,
    ) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        self.search(0, coords, q, skip, &mut best);
        best
    }

    fn search<P: SkipPredicate + ?Sized>(
        &self,
        node: u32,
        coords: &[f64],
        q: &[f64],
        skip: &P,
        best: &mut Option<(usize, f64)>,
    ) {
        let n = &self.nodes[node as usize];
        if n.left == NONE {
            let dim = self.dim;
            for &p in &self.perm[n.start as usize..n.end as usize] {
                let p = p as usize;
                if skip.skip(p) {
                    continue;
                }
                let d2 = sq_dist(&coords[p * dim..(p + 1) * dim], q);
                if better(d2, p, *best) {
                    *best = Some((p, d2));
                }
            }
            return;
        }
        let (a, b) = (n.left, n.right);
        let (da, db) = (self.box_sq_dist(a, q), self.box_sq_dist(b, q));
        let order = if da <= db { [(a, da), (b, db)] } else { [(b, db), (a, da)] };
        for (child, d2) in order {
            // ties must still be visited: a farther box can hold an equidistant
            // point with a smaller index
            if let Some((_, bd)) = *best {
                if d2 > bd {
                    continue;
                }
            }
            let (lo, hi) = self.bbox(child);
            if skip.skip_box(lo, hi) {
                continue;
            }
            self.search(child, coords, q, skip, best);
        }
    }
}

#[inline]
fn better(d2: f64, idx: usize, best: Option<(usize, f64)>) -> bool {
    match best {
        None => true,
        Some((bi, bd)) => d2 < bd || (d2 == bd && idx < bi),
    }
}

/// Linear scan with the same ordering rule as [`KdTree::nearest`].
pub fn scan_nearest<P: SkipPredicate + ?Sized>(
    dim: usize,
    coords: &[f64],
    candidates: impl IntoIterator<Item = usize>,
    q: &[f64],
    skip: &P,
) -> Option<(usize, f64)> {
    let mut best = None;
    for p in candidates {
        if skip.skip(p) {
            continue;
        }
        let d2 = sq_dist(&coords[p * dim..(p + 1) * dim], q);
        if better(d2, p, best) {
            best = Some((p, d2));
        }
    }
    best
}
