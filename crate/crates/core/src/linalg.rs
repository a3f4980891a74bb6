//! Small dense vector helpers over `&[f64]`.
//!
//! Dimensions here are tiny (2 to ~10), so everything works on plain slices
//! and short `Vec`s instead of a matrix crate.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + s * b`
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scale_in_place(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

/// Normalizes in place and returns the original norm.
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        scale_in_place(a, 1.0 / n);
    }
    n
}

pub fn centroid<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut c = vec![0.0; dim];
    let mut k = 0usize;
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
        k += 1;
    }
    if k > 0 {
        scale_in_place(&mut c, 1.0 / k as f64);
    }
    c
}

/// Removes the components of `v` along each (orthonormal) basis vector.
/// Two passes of modified Gram-Schmidt keep the residual orthogonal to
/// roughly machine precision.
pub fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
}

/// Orthonormal basis of `span{p - origin : p in points}`.
///
/// Returns `None` when a difference vector is (relatively) dependent on the
/// previous ones, i.e. when its residual norm drops below `rel_tol` times its
/// original length.
pub fn affine_basis<'a>(
    origin: &[f64],
    points: impl IntoIterator<Item = &'a [f64]>,
    rel_tol: f64,
) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let mut v = sub(p, origin);
        let len = norm(&v);
        if len == 0.0 {
            return None;
        }
        project_out(&mut v, &basis);
        let res = normalize(&mut v);
        if res <= rel_tol * len {
            return None;
        }
        basis.push(v);
    }
    Some(basis)
}

/// Circumcenter of `d + 1` points in `R^d`, or `None` if they are affinely
/// dependent.
pub fn circumcenter(points: &[&[f64]]) -> Option<Vec<f64>> {
    let d = points[0].len();
    debug_assert_eq!(points.len(), d + 1);
    let x0 = points[0];
    // 2 (x_k - x_0) . y = |x_k - x_0|^2, center = x_0 + y
    let mut a = vec![0.0; d * (d + 1)];
    for k in 0..d {
        let e = sub(points[k + 1], x0);
        let row = &mut a[k * (d + 1)..(k + 1) * (d + 1)];
        for c in 0..d {
            row[c] = 2.0 * e[c];
        }
        row[d] = dot(&e, &e);
    }
    let y = solve_augmented(&mut a, d)?;
    Some(x0.iter().zip(&y).map(|(a, b)| a + b).collect())
}

/// Gaussian elimination with partial pivoting on a `d x (d+1)` augmented matrix.
fn solve_augmented(a: &mut [f64], d: usize) -> Option<Vec<f64>> {
    let w = d + 1;
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..d {
        let piv = (col..d).max_by(|&p, &q| a[p * w + col].abs().total_cmp(&a[q * w + col].abs()))?;
        if a[piv * w + col].abs() <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for c in 0..w {
                a.swap(piv * w + c, col * w + c);
            }
        }
        for row in col + 1..d {
            let f = a[row * w + col] / a[col * w + col];
            for c in col..w {
                a[row * w + c] -= f * a[col * w + c];
            }
        }
    }
    let mut y = vec![0.0; d];
    for row in (0..d).rev() {
        let mut s = a[row * w + d];
        for c in row + 1..d {
            s -= a[row * w + c] * y[c];
        }
        y[row] = s / a[row * w + row];
    }
    Some(y)
}
