//! Sparse symmetric storage (upper triangle, CSC) and deterministic
//! triplet assembly.

/// Symmetric sparse matrix storing the upper triangle in compressed
/// column form. Row indices are sorted within each column; the full
/// matrix is implied by symmetry, so it is numerically symmetric by
/// construction.
#[derive(Debug, Clone)]
pub struct SparseSymmetricMatrix {
    pub dim: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Build from upper-triangle triplets `(row, col, value, tag)` with
    /// `row <= col`. Duplicates are summed in ascending tag order, so the
    /// result is bitwise independent of the triplet processing order.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64, usize)>) -> Self {
        debug_assert!(triplets.iter().all(|t| t.0 <= t.1 && t.1 < dim));
        triplets.sort_unstable_by(|a, b| (a.1, a.0, a.3).cmp(&(b.1, b.0, b.3)));
        let mut col_ptr = vec![0usize; dim + 1];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, v, _)) = iter.next() {
            let mut sum = v;
            while let Some(&(r2, c2, v2, _)) = iter.peek() {
                if r2 == r && c2 == c {
                    sum += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            col_ptr[c + 1] += 1;
            row_idx.push(r);
            values.push(sum);
        }
        for c in 0..dim {
            col_ptr[c + 1] += col_ptr[c];
        }
        SparseSymmetricMatrix {
            dim,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nnz_upper(&self) -> usize {
        self.values.len()
    }

    /// y = A x with the symmetry expanded.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for c in 0..self.dim {
            let xc = x[c];
            for p in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[p];
                let v = self.values[p];
                y[r] += v * xc;
                if r != c {
                    y[c] += v * x[r];
                }
            }
        }
    }

    /// Quadratic form xᵀ A y.
    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ay = vec![0.0; self.dim];
        self.mul_vec(y, &mut ay);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// Entry (i, j); zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let lo = self.col_ptr[c];
        let hi = self.col_ptr[c + 1];
        match self.row_idx[lo..hi].binary_search(&r) {
            Ok(p) => self.values[lo + p],
            Err(_) => 0.0,
        }
    }

    pub fn max_abs_diag(&self) -> f64 {
        let mut m: f64 = 0.0;
        for c in 0..self.dim {
            m = m.max(self.get(c, c).abs());
        }
        m
    }

    /// Dense copy, for small-system tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut a = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            for p in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[p];
                a[(r, c)] = self.values[p];
                a[(c, r)] = self.values[p];
            }
        }
        a
    }
}

/// Sparse constraint matrix stored by rows.
#[derive(Debug, Clone, Default)]
pub struct ConstraintMatrix {
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl ConstraintMatrix {
    pub fn new(ncols: usize) -> Self {
        ConstraintMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, row: Vec<(usize, f64)>) {
        self.rows.push(row);
    }

    /// y = G x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// y += Gᵀ λ.
    pub fn apply_transpose_add(&self, lambda: &[f64], y: &mut [f64]) {
        for (row, &l) in self.rows.iter().zip(lambda) {
            for &(c, v) in row {
                y[c] += v * l;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_assembly_sums_duplicates() {
        let t = vec![
            (0, 0, 1.0, 0),
            (0, 1, 2.0, 0),
            (0, 0, 3.0, 1),
            (1, 1, 4.0, 0),
        ];
        let a = SparseSymmetricMatrix::from_triplets(2, t);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(1, 1), 4.0);
    }

    #[test]
    fn assembly_is_order_independent() {
        let t1 = vec![
            (0, 0, 0.1, 0),
            (0, 0, 0.2, 1),
            (0, 0, 0.3, 2),
            (1, 2, 0.7, 1),
            (1, 2, -0.1, 2),
        ];
        let mut t2 = t1.clone();
        t2.reverse();
        let a1 = SparseSymmetricMatrix::from_triplets(3, t1);
        let a2 = SparseSymmetricMatrix::from_triplets(3, t2);
        assert_eq!(a1.values, a2.values);
        assert_eq!(a1.row_idx, a2.row_idx);
    }

    #[test]
    fn symmetric_matvec() {
        let t = vec![(0, 0, 2.0, 0), (0, 1, 1.0, 0), (1, 1, 3.0, 0)];
        let a = SparseSymmetricMatrix::from_triplets(2, t);
        let mut y = vec![0.0; 2];
        a.mul_vec(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![4.0, 7.0]);
    }
}
