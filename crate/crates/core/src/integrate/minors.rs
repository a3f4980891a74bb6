//! Determinants by recursive expansion over minors.
//!
//! Columns are loaded from last to first. After columns `k..=d` are loaded the
//! table holds, for every set of `d - k + 1` rows, the determinant of those
//! rows of columns `k..=d`. Loading column `k` again only rewrites that level,
//! so a recursion that varies the leading columns while keeping trailing ones
//! fixed pays `O(2^d d)` per column instead of a full determinant.

use crate::error::{Error, Result};

/// Largest supported dimension; the table has `2^d` entries.
pub const MAX_DIM: usize = 10;

#[derive(Clone, Debug)]
pub struct MinorTable {
    dim: usize,
    /// Indexed by bitmask of kept rows; each mask belongs to exactly one level.
    minors: Vec<f64>,
    /// Row masks grouped by popcount.
    levels: Vec<Vec<u32>>,
    /// Lowest column (1-based) currently valid; `dim + 1` when empty.
    lowest: usize,
}

impl MinorTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                max: MAX_DIM,
                found: dim,
            });
        }
        let mut levels = vec![Vec::new(); dim + 1];
        for mask in 0u32..(1 << dim) {
            levels[mask.count_ones() as usize].push(mask);
        }
        Ok(MinorTable {
            dim,
            minors: vec![0.0; 1 << dim],
            levels,
            lowest: dim + 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Loads `v` as column `k` (1-based). Columns `k+1..=d` must be loaded.
    /// Returns the determinant of the whole matrix when `k = 1`.
    pub fn update_minors(&mut self, v: &[f64], k: usize) -> Result<Option<f64>> {
        let d = self.dim;
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                index: k,
                expected: d,
                found: v.len(),
            });
        }
        if k == 0 || k > d {
            return Err(Error::InvalidArgument(format!("column {k} outside 1..={d}")));
        }
        if k < d && self.lowest > k + 1 {
            return Err(Error::OrderViolation { column: k });
        }
        let level = d - k + 1;
        if level == 1 {
            for (j, &x) in v.iter().enumerate() {
                self.minors[1 << j] = x;
            }
        } else {
            for &mask in &self.levels[level] {
                // Laplace expansion along the new first column
                let mut det = 0.0;
                let mut sign = 1.0;
                let mut rest = mask;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    det += sign * v[j] * self.minors[(mask & !(1 << j)) as usize];
                    sign = -sign;
                }
                self.minors[mask as usize] = det;
            }
        }
        self.lowest = k;
        Ok((level == d).then(|| self.minors[(1usize << d) - 1]))
    }

    /// Determinant of the currently loaded columns `1..=d`.
    pub fn determinant(&self) -> Option<f64> {
        (self.lowest == 1).then(|| self.minors[(1usize << self.dim) - 1])
    }
}

/// Determinant of the matrix with the given columns.
pub fn determinant(columns: &[Vec<f64>]) -> Result<f64> {
    let mut t = MinorTable::new(columns.len())?;
    for k in (1..=columns.len()).rev() {
        t.update_minors(&columns[k - 1], k)?;
    }
    Ok(t.determinant().expect("all columns loaded"))
}
