use crate::error::{Error, Result};

/// Checks every dimension is ≥ 1 and returns the total dimension.
pub(crate) fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::BadDims(dims.to_vec()));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::BadDims(dims.to_vec()))
}

/// Sorted, de-duplicated, non-empty subset of subsystem indices.
pub(crate) fn validate_keep(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::BadSubsystemIndex {
            index: usize::MAX,
            count: dims.len(),
        });
    }
    if let Some(&index) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::BadSubsystemIndex {
            index,
            count: dims.len(),
        });
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    Ok(keep)
}

/// Maps flat A-major indices to (kept index, traced index) pairs.
pub(crate) struct SplitIndex {
    pub kept_dim: usize,
    pub traced_dim: usize,
    table: Vec<(usize, usize)>,
}

impl SplitIndex {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let kept_dim = keep.iter().map(|&k| dims[k]).product();
        let traced_dim = total / kept_dim;
        let is_kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
        let mut table = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..total {
            let (mut k, mut t) = (0, 0);
            for (s, &dig) in digits.iter().enumerate() {
                if is_kept[s] {
                    k = k * dims[s] + dig;
                } else {
                    t = t * dims[s] + dig;
                }
            }
            table.push((k, t));
            // increment the mixed-radix counter, last subsystem fastest
            for s in (0..dims.len()).rev() {
                digits[s] += 1;
                if digits[s] < dims[s] {
                    break;
                }
                digits[s] = 0;
            }
        }
        Self {
            kept_dim,
            traced_dim,
            table,
        }
    }

    #[inline]
    pub fn split(&self, flat: usize) -> (usize, usize) {
        self.table[flat]
    }

    /// Inverse table: `compose[k * traced_dim + t] = flat`.
    pub fn compose_table(&self) -> Vec<usize> {
        let mut out = vec![0; self.table.len()];
        for (flat, &(k, t)) in self.table.iter().enumerate() {
            out[k * self.traced_dim + t] = flat;
        }
        out
    }
}
