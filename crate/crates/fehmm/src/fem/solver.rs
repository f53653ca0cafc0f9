//! Direct solvers for the SPD and saddle-point systems of the two-scale
//! method.
//!
//! Both paths share one LDLᵀ kernel: the system is equilibrated, a static
//! quasi-definite regularization (+α on displacement pivots, -α on
//! constraint pivots) makes the unpivoted factorization well defined, and
//! iterative refinement against the unregularized operator restores the
//! solution to the requested residual. The factorization is computed once
//! and reused across right-hand sides.

use super::ordering::saddle_order;
use super::sparse::{ConstraintMatrix, SparseSymmetricMatrix};
use crate::error::{Error, Result};

const DEFAULT_REGULARIZATION: f64 = 1e-10;
const TARGET_REL_RESIDUAL: f64 = 1e-12;
const MAX_REFINEMENT_STEPS: usize = 60;

/// Unpivoted LDLᵀ factor of a permuted symmetric matrix.
struct LdlFactor {
    n: usize,
    /// perm[k] = original index eliminated at step k.
    perm: Vec<usize>,
    iperm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl LdlFactor {
    /// Factorize an upper-CSC symmetric matrix with the given elimination
    /// order. `expect_negative[i]` is the quasi-definite pivot sign of
    /// original row i; a pivot that vanishes or lands on the wrong side is
    /// reported.
    fn new(
        a: &SparseSymmetricMatrix,
        perm: &[usize],
        expect_negative: &[bool],
        reg: f64,
    ) -> std::result::Result<Self, Vec<usize>> {
        let n = a.dim;
        debug_assert_eq!(perm.len(), n);
        let mut iperm = vec![0usize; n];
        for (k, &o) in perm.iter().enumerate() {
            iperm[o] = k;
        }

        // Permuted upper triangle.
        let mut triplets = Vec::with_capacity(a.nnz_upper());
        for c in 0..n {
            for p in a.col_ptr[c]..a.col_ptr[c + 1] {
                let r = a.row_idx[p];
                let (pi, pj) = (iperm[r], iperm[c]);
                let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
                triplets.push((lo, hi, a.values[p], 0));
            }
        }
        let ap = SparseSymmetricMatrix::from_triplets(n, triplets);

        // Symbolic: elimination tree and column counts of L.
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for p in ap.col_ptr[k]..ap.col_ptr[k + 1] {
                let mut i = ap.row_idx[p];
                while flag[i] != k {
                    if parent[i] == usize::MAX {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }

        // Numeric (up-looking, after Davis' LDL).
        let nnz_l = lp[n];
        let mut li = vec![0usize; nnz_l];
        let mut lx = vec![0f64; nnz_l];
        let mut d = vec![0f64; n];
        let mut y = vec![0f64; n];
        let mut pattern = vec![0usize; n];
        let mut fill = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];
        let mut bad = Vec::new();
        for k in 0..n {
            flag[k] = k;
            let mut top = n;
            for p in ap.col_ptr[k]..ap.col_ptr[k + 1] {
                let entry = ap.row_idx[p];
                y[entry] += ap.values[p];
                let mut len = 0usize;
                let mut i = entry;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let neg = expect_negative[perm[k]];
            let mut dk = y[k] + if neg { -reg } else { reg };
            y[k] = 0.0;
            for s in top..n {
                let i = pattern[s];
                let yi = y[i];
                y[i] = 0.0;
                let p2 = lp[i] + fill[i];
                for p in lp[i]..p2 {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                li[p2] = k;
                lx[p2] = lki;
                fill[i] += 1;
            }
            let healthy = if neg { dk < 0.0 } else { dk > 0.0 };
            if !healthy || dk.abs() <= 16.0 * reg.max(f64::MIN_POSITIVE) {
                bad.push(perm[k]);
                // Keep factoring with a benign pivot so all offenders are
                // collected in one pass.
                dk = if neg { -1.0 } else { 1.0 };
            }
            d[k] = dk;
        }
        if !bad.is_empty() {
            return Err(bad);
        }
        Ok(LdlFactor {
            n,
            perm: perm.to_vec(),
            iperm,
            lp,
            li,
            lx,
            d,
        })
    }

    /// x = A⁻¹ b through the factor.
    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            x[k] = b[self.perm[k]];
        }
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    x[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for k in 0..n {
            x[k] /= self.d[k];
        }
        for j in (0..n).rev() {
            let mut xj = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                xj -= self.lx[p] * x[self.li[p]];
            }
            x[j] = xj;
        }
        // Undo the permutation in place via a scratch pass.
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.perm[k]] = x[k];
        }
        x.copy_from_slice(&out);
    }
}

/// Shared direct solver: equilibration + regularized LDLᵀ + refinement.
pub struct DirectSolver {
    a: SparseSymmetricMatrix,
    scale: Vec<f64>,
    factor: LdlFactor,
    target: f64,
}

impl DirectSolver {
    pub fn new(
        a: SparseSymmetricMatrix,
        expect_negative: Vec<bool>,
        order: &[usize],
        reg: f64,
    ) -> std::result::Result<Self, Vec<usize>> {
        let n = a.dim;
        // Row-max equilibration, two sweeps.
        let mut scale = vec![1.0f64; n];
        for _ in 0..2 {
            let mut rowmax = vec![0.0f64; n];
            for c in 0..n {
                for p in a.col_ptr[c]..a.col_ptr[c + 1] {
                    let r = a.row_idx[p];
                    let v = (a.values[p] * scale[r] * scale[c]).abs();
                    rowmax[r] = rowmax[r].max(v);
                    rowmax[c] = rowmax[c].max(v);
                }
            }
            for i in 0..n {
                if rowmax[i] > 0.0 {
                    scale[i] /= rowmax[i].sqrt();
                }
            }
        }
        let mut scaled_triplets = Vec::with_capacity(a.nnz_upper());
        for c in 0..n {
            for p in a.col_ptr[c]..a.col_ptr[c + 1] {
                let r = a.row_idx[p];
                scaled_triplets.push((r, c, a.values[p] * scale[r] * scale[c], 0));
            }
        }
        let scaled = SparseSymmetricMatrix::from_triplets(n, scaled_triplets);
        let factor = LdlFactor::new(&scaled, order, &expect_negative, reg)?;
        Ok(DirectSolver {
            a,
            scale,
            factor,
            target: TARGET_REL_RESIDUAL,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim
    }

    pub fn matrix(&self) -> &SparseSymmetricMatrix {
        &self.a
    }

    /// Solve to the target relative residual with iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.a.dim;
        let bnorm = norm2(b);
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut work = vec![0.0; n];
        let mut step = vec![0.0; n];
        let mut best_x = x.clone();
        let mut best_res = f64::INFINITY;
        for _ in 0..MAX_REFINEMENT_STEPS {
            let res = norm2(&r) / bnorm;
            if res < best_res {
                best_res = res;
                best_x.copy_from_slice(&x);
            }
            if res <= self.target {
                return Ok(x);
            }
            if res > 1e4 * best_res {
                break;
            }
            for i in 0..n {
                work[i] = r[i] * self.scale[i];
            }
            self.factor.solve(&work, &mut step);
            for i in 0..n {
                x[i] += step[i] * self.scale[i];
            }
            self.a.mul_vec(&x, &mut work);
            for i in 0..n {
                r[i] = b[i] - work[i];
            }
        }
        let res = norm2(&r) / bnorm;
        if res < best_res {
            best_res = res;
            best_x.copy_from_slice(&x);
        }
        // 1e-10 is the contract; the refinement target is stricter.
        if best_res <= 1e-10 {
            Ok(best_x)
        } else {
            Err(Error::ResidualTooLarge {
                achieved: best_res,
                wanted: self.target,
            })
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// SPD system with Dirichlet dofs eliminated. The factorization depends on
/// the fixed dof SET only, so one factorization serves any prescribed
/// values; fixed dofs carry exactly their prescribed values in the returned
/// full-length vector.
pub struct ReducedSpdSolver {
    solver: DirectSolver,
    full_dim: usize,
    free: Vec<usize>,
    fixed_dofs: Vec<usize>,
    /// Couplings (reduced row, fixed slot, stiffness value) feeding the
    /// boundary values into the reduced right-hand side.
    couplings: Vec<(usize, usize, f64)>,
}

impl ReducedSpdSolver {
    pub fn new(
        k: &SparseSymmetricMatrix,
        fixed_dofs: &[usize],
        primal_order: &[usize],
    ) -> Result<Self> {
        let n = k.dim;
        let mut fixed_slot = vec![usize::MAX; n];
        for (s, &dof) in fixed_dofs.iter().enumerate() {
            if fixed_slot[dof] != usize::MAX {
                return Err(Error::Config(format!("dof {dof} fixed twice")));
            }
            fixed_slot[dof] = s;
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed_slot[i] == usize::MAX).collect();
        let mut new_index = vec![usize::MAX; n];
        for (ni, &oi) in free.iter().enumerate() {
            new_index[oi] = ni;
        }
        let m = free.len();
        let mut triplets = Vec::with_capacity(k.nnz_upper());
        let mut couplings = Vec::new();
        for c in 0..n {
            for p in k.col_ptr[c]..k.col_ptr[c + 1] {
                let r = k.row_idx[p];
                let v = k.values[p];
                match (fixed_slot[r] == usize::MAX, fixed_slot[c] == usize::MAX) {
                    (true, true) => triplets.push((new_index[r], new_index[c], v, 0)),
                    (false, true) => couplings.push((new_index[c], fixed_slot[r], v)),
                    (true, false) => couplings.push((new_index[r], fixed_slot[c], v)),
                    (false, false) => {}
                }
            }
        }
        let reduced = SparseSymmetricMatrix::from_triplets(m, triplets);
        let order: Vec<usize> = primal_order
            .iter()
            .filter(|&&dof| fixed_slot[dof] == usize::MAX)
            .map(|&dof| new_index[dof])
            .collect();
        debug_assert_eq!(order.len(), m);
        let solver = DirectSolver::new(reduced, vec![false; m], &order, 0.0).map_err(|bad| {
            Error::Singular {
                index: free[bad[0]],
                context: format!(
                    "reduced stiffness not positive definite ({} deficient pivots)",
                    bad.len()
                ),
            }
        })?;
        Ok(ReducedSpdSolver {
            solver,
            full_dim: n,
            free,
            fixed_dofs: fixed_dofs.to_vec(),
            couplings,
        })
    }

    pub fn reduced_dim(&self) -> usize {
        self.free.len()
    }

    /// Solve with loads `f` (full-length) and per-fixed-dof values parallel
    /// to the `fixed_dofs` passed at construction.
    pub fn solve(&self, f: &[f64], fixed_values: &[f64]) -> Result<Vec<f64>> {
        debug_assert_eq!(fixed_values.len(), self.fixed_dofs.len());
        let mut rhs: Vec<f64> = self.free.iter().map(|&oi| f[oi]).collect();
        for &(row, slot, v) in &self.couplings {
            rhs[row] -= v * fixed_values[slot];
        }
        let x_red = self.solver.solve(&rhs)?;
        let mut x = vec![0.0; self.full_dim];
        for (ni, &oi) in self.free.iter().enumerate() {
            x[oi] = x_red[ni];
        }
        for (&dof, &v) in self.fixed_dofs.iter().zip(fixed_values) {
            x[dof] = v;
        }
        Ok(x)
    }
}

/// Convenience wrapper for a single SPD solve with fixed dof values.
pub fn solve_spd(
    k: &SparseSymmetricMatrix,
    f: &[f64],
    fixed: &[(usize, f64)],
    primal_order: &[usize],
) -> Result<Vec<f64>> {
    let dofs: Vec<usize> = fixed.iter().map(|&(d, _)| d).collect();
    let values: Vec<f64> = fixed.iter().map(|&(_, v)| v).collect();
    ReducedSpdSolver::new(k, &dofs, primal_order)?.solve(f, &values)
}

/// Saddle-point system [[K, Gᵀ], [G, 0]].
pub struct ConstrainedSystem {
    pub k: SparseSymmetricMatrix,
    pub g: ConstraintMatrix,
}

pub struct SaddleSolver {
    solver: DirectSolver,
    n_primal: usize,
    n_constraints: usize,
}

impl ConstrainedSystem {
    pub fn new(k: SparseSymmetricMatrix, g: ConstraintMatrix) -> Self {
        debug_assert_eq!(k.dim, g.ncols);
        ConstrainedSystem { k, g }
    }

    /// Factorize once; G must have full row rank.
    pub fn factorize(&self, primal_order: &[usize]) -> Result<SaddleSolver> {
        let n = self.k.dim;
        let m = self.g.nrows();
        let dim = n + m;
        let mut triplets = Vec::with_capacity(self.k.nnz_upper() + 4 * m);
        for c in 0..n {
            for p in self.k.col_ptr[c]..self.k.col_ptr[c + 1] {
                triplets.push((self.k.row_idx[p], c, self.k.values[p], 0));
            }
        }
        for (r, row) in self.g.rows.iter().enumerate() {
            for &(c, v) in row {
                triplets.push((c, n + r, v, 0));
            }
            triplets.push((n + r, n + r, 0.0, 0));
        }
        let a = SparseSymmetricMatrix::from_triplets(dim, triplets);
        let order = saddle_order(n, primal_order, &self.g.rows, 16);
        let mut neg = vec![false; dim];
        for flag in neg.iter_mut().skip(n) {
            *flag = true;
        }
        let solver =
            DirectSolver::new(a, neg, &order, DEFAULT_REGULARIZATION).map_err(|bad| {
                let rows: Vec<usize> = bad.iter().filter(|&&i| i >= n).map(|&i| i - n).collect();
                if rows.is_empty() {
                    Error::Singular {
                        index: bad[0],
                        context: "saddle system: deficient displacement pivot \
                                  (null space not removed by the constraints)"
                            .into(),
                    }
                } else {
                    Error::RankDeficient { rows }
                }
            })?;
        Ok(SaddleSolver {
            solver,
            n_primal: n,
            n_constraints: m,
        })
    }
}

impl SaddleSolver {
    /// Solve K d + Gᵀλ = rhs_primal, G d = rhs_constraint.
    pub fn solve(&self, rhs_primal: &[f64], rhs_constraint: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        debug_assert_eq!(rhs_primal.len(), self.n_primal);
        debug_assert_eq!(rhs_constraint.len(), self.n_constraints);
        let mut b = Vec::with_capacity(self.n_primal + self.n_constraints);
        b.extend_from_slice(rhs_primal);
        b.extend_from_slice(rhs_constraint);
        let x = self.solver.solve(&b)?;
        let d = x[..self.n_primal].to_vec();
        let lambda = x[self.n_primal..].to_vec();
        Ok((d, lambda))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn natural_order(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    fn random_spd(n: usize, seed: u64) -> (SparseSymmetricMatrix, nalgebra::DMatrix<f64>) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = nalgebra::DMatrix::from_fn(n, n, |_, _| next());
        let dense = &m * m.transpose() + nalgebra::DMatrix::identity(n, n) * n as f64;
        let mut triplets = Vec::new();
        for j in 0..n {
            for i in 0..=j {
                triplets.push((i, j, dense[(i, j)], 0));
            }
        }
        (SparseSymmetricMatrix::from_triplets(n, triplets), dense)
    }

    #[test]
    fn spd_solve_matches_dense_lu() {
        let n = 25;
        let (a, dense) = random_spd(n, 7);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let solver = DirectSolver::new(a, vec![false; n], &natural_order(n), 0.0).unwrap();
        let x = solver.solve(&b).unwrap();
        let x_ref = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&b))
            .unwrap();
        for i in 0..n {
            assert_relative_eq!(x[i], x_ref[i], max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_spring_closed_form() {
        // 2x2 block [[k, -k], [-k, k]] with dof 0 fixed at zero and a unit
        // load at dof 1: displacement 1/k.
        let k = 100.0;
        let a = SparseSymmetricMatrix::from_triplets(
            2,
            vec![(0, 0, k, 0), (0, 1, -k, 0), (1, 1, k, 0)],
        );
        let x = solve_spd(&a, &[0.0, 1.0], &[(0, 0.0)], &natural_order(2)).unwrap();
        assert_relative_eq!(x[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(x[1], 1.0 / k, max_relative = 1e-12);
    }

    #[test]
    fn fixed_values_are_exact_and_zero_problem_is_zero() {
        let (a, _) = random_spd(10, 3);
        let x = solve_spd(&a, &[0.0; 10], &[(2, 0.0), (7, 0.0)], &natural_order(10)).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        let x = solve_spd(&a, &[0.0; 10], &[(2, 1.25)], &natural_order(10)).unwrap();
        assert_eq!(x[2], 1.25);
    }

    #[test]
    fn saddle_single_constraint_closed_form() {
        // K = I, one constraint d_0 = c.
        let n = 4;
        let mut triplets = Vec::new();
        for i in 0..n {
            triplets.push((i, i, 1.0, 0));
        }
        let k = SparseSymmetricMatrix::from_triplets(n, triplets);
        let mut g = ConstraintMatrix::new(n);
        g.push_row(vec![(0, 1.0)]);
        let sys = ConstrainedSystem::new(k, g);
        let solver = sys.factorize(&natural_order(n)).unwrap();
        let c = 3.5;
        let (d, lambda) = solver.solve(&[0.0; 4], &[c]).unwrap();
        assert_relative_eq!(d[0], c, max_relative = 1e-12);
        for i in 1..n {
            assert_relative_eq!(d[i], 0.0, epsilon = 1e-12);
        }
        // K d + Gᵀ λ = 0 at the solution.
        assert_relative_eq!(lambda[0], -c, max_relative = 1e-12);
    }

    #[test]
    fn saddle_matches_dense_lu_and_reuses_factorization() {
        let n = 18;
        let (k, kd) = random_spd(n, 11);
        let mut g = ConstraintMatrix::new(n);
        g.push_row(vec![(0, 1.0), (3, -2.0)]);
        g.push_row(vec![(5, 1.0), (9, 0.5), (17, 1.0)]);
        g.push_row((0..n).map(|c| (c, 1.0 + c as f64 * 0.1)).collect());
        let m = g.nrows();
        let mut dense = nalgebra::DMatrix::zeros(n + m, n + m);
        dense.view_mut((0, 0), (n, n)).copy_from(&kd);
        for (r, row) in g.rows.iter().enumerate() {
            for &(c, v) in row {
                dense[(n + r, c)] = v;
                dense[(c, n + r)] = v;
            }
        }
        let sys = ConstrainedSystem::new(k, g);
        let solver = sys.factorize(&natural_order(n)).unwrap();
        for trial in 0..3 {
            let rp: Vec<f64> = (0..n).map(|i| ((i + trial) as f64 * 0.21).cos()).collect();
            let rc: Vec<f64> = (0..m).map(|i| (i as f64 + trial as f64) * 0.3).collect();
            let (d, lambda) = solver.solve(&rp, &rc).unwrap();
            let mut b = nalgebra::DVector::zeros(n + m);
            for i in 0..n {
                b[i] = rp[i];
            }
            for i in 0..m {
                b[n + i] = rc[i];
            }
            let x_ref = dense.clone().lu().solve(&b).unwrap();
            for i in 0..n {
                assert_relative_eq!(d[i], x_ref[i], max_relative = 1e-9, epsilon = 1e-11);
            }
            for i in 0..m {
                assert_relative_eq!(lambda[i], x_ref[n + i], max_relative = 1e-9, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn rank_deficient_constraints_name_offending_rows() {
        let n = 6;
        let (k, _) = random_spd(n, 5);
        let mut g = ConstraintMatrix::new(n);
        g.push_row(vec![(0, 1.0), (1, -1.0)]);
        g.push_row(vec![(2, 1.0)]);
        // Duplicate of row 0.
        g.push_row(vec![(0, 1.0), (1, -1.0)]);
        let sys = ConstrainedSystem::new(k, g);
        match sys.factorize(&natural_order(n)) {
            Err(Error::RankDeficient { rows }) => assert_eq!(rows, vec![2]),
            Err(other) => panic!("expected rank-deficiency error, got {other:?}"),
            Ok(_) => panic!("expected rank-deficiency error, got a factorization"),
        }
    }

    #[test]
    fn residual_contract_on_ill_scaled_saddle() {
        // Stiffness entries around 1e9 against unit constraint rows.
        let n = 12;
        let (k0, _) = random_spd(n, 23);
        let mut triplets = Vec::new();
        for c in 0..n {
            for p in k0.col_ptr[c]..k0.col_ptr[c + 1] {
                triplets.push((k0.row_idx[p], c, k0.values[p] * 1e9, 0));
            }
        }
        let k = SparseSymmetricMatrix::from_triplets(n, triplets);
        let mut g = ConstraintMatrix::new(n);
        g.push_row(vec![(0, 1.0)]);
        g.push_row(vec![(4, 1.0), (5, 1.0)]);
        let sys = ConstrainedSystem::new(k, g);
        let solver = sys.factorize(&natural_order(n)).unwrap();
        let rp = vec![1e6; n];
        let rc = vec![1.0, -2.0];
        let (d, lambda) = solver.solve(&rp, &rc).unwrap();
        // Verify the stated residual contract directly.
        let mut kd = vec![0.0; n];
        sys.k.mul_vec(&d, &mut kd);
        sys.g.apply_transpose_add(&lambda, &mut kd);
        let prim_res: f64 = kd
            .iter()
            .zip(&rp)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = (rp.iter().map(|v| v * v).sum::<f64>()).sqrt();
        assert!(prim_res <= 1e-10 * scale, "residual {prim_res:e}");
        let gd = sys.g.apply(&d);
        for (a, b) in gd.iter().zip(&rc) {
            assert_relative_eq!(a, b, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}
