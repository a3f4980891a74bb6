//! Brute-force diagram by enumerating every `(d + 1)`-subset of nodes.
//!
//! Cost is `O(C(N, d+1) * N)`; meant for cross-checking small inputs.

pub use crate::linalg::circumcenter;
use crate::linalg::sq_dist;
use crate::mesh::{VertexRecord, TOL_VERTEX};
use crate::nodes::NodeSet;

/// Every `(d + 1)`-subset whose circumsphere has no node strictly inside,
/// sorted by generator set.
pub fn brute_force_vertices(nodes: &NodeSet) -> Vec<VertexRecord> {
    let d = nodes.dim();
    let n = nodes.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..=d).collect();
    let mut pts: Vec<&[f64]> = Vec::with_capacity(d + 1);
    loop {
        pts.clear();
        pts.extend(idx.iter().map(|&g| nodes.point(g)));
        if let Some(c) = circumcenter(&pts) {
            let r2 = sq_dist(&c, pts[0]);
            let limit = r2 * (1.0 - TOL_VERTEX).powi(2);
            let empty = (0..n).all(|p| idx.contains(&p) || sq_dist(nodes.point(p), &c) >= limit);
            if empty {
                out.push(VertexRecord {
                    sigma: idx.clone(),
                    r: c,
                });
            }
        }
        // next combination in lexicographic order
        let mut k = d + 1;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - (d + 1 - k) {
                break;
            }
        }
        idx[k] += 1;
        for m in k + 1..=d {
            idx[m] = idx[m - 1] + 1;
        }
    }
}
