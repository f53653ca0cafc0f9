//! Element-level kernels: strain-displacement operator and element
//! stiffness by Gauss-Legendre quadrature.

use super::quadrature::QuadratureRule;
use super::shape;
use crate::error::{Error, Result};
use crate::material::ElasticityTensor;
use nalgebra::{DMatrix, Matrix2};

/// Physical shape-function gradients and the Jacobian determinant at a
/// reference point of an element with the given node coordinates.
pub fn physical_gradients(
    coords: &[[f64; 2]],
    order: usize,
    xi: [f64; 2],
) -> Result<(Vec<f64>, Vec<[f64; 2]>, f64)> {
    let (values, ref_grads) = shape::shape_functions(order, xi);
    let mut jac: Matrix2<f64> = Matrix2::zeros();
    for (g, c) in ref_grads.iter().zip(coords) {
        jac[(0, 0)] += g[0] * c[0];
        jac[(0, 1)] += g[1] * c[0];
        jac[(1, 0)] += g[0] * c[1];
        jac[(1, 1)] += g[1] * c[1];
    }
    let det = jac[(0, 0)] * jac[(1, 1)] - jac[(0, 1)] * jac[(1, 0)];
    if det <= 0.0 {
        return Err(Error::Geometry(format!(
            "non-positive Jacobian determinant {det:.3e}"
        )));
    }
    // Gradients w.r.t. x: dN/dx = J⁻ᵀ dN/dξ.
    let inv = [
        [jac[(1, 1)] / det, -jac[(1, 0)] / det],
        [-jac[(0, 1)] / det, jac[(0, 0)] / det],
    ];
    let grads = ref_grads
        .iter()
        .map(|g| {
            [
                inv[0][0] * g[0] + inv[0][1] * g[1],
                inv[1][0] * g[0] + inv[1][1] * g[1],
            ]
        })
        .collect();
    Ok((values, grads, det))
}

/// Strain at a point from element nodal displacements, engineering Voigt
/// convention (ε₁₁, ε₂₂, γ₁₂ = 2ε₁₂).
pub fn strain_at(grads: &[[f64; 2]], element_disp: &[f64]) -> [f64; 3] {
    let mut e = [0.0; 3];
    for (a, g) in grads.iter().enumerate() {
        let ux = element_disp[2 * a];
        let uy = element_disp[2 * a + 1];
        e[0] += g[0] * ux;
        e[1] += g[1] * uy;
        e[2] += g[1] * ux + g[0] * uy;
    }
    e
}

/// Element stiffness kᵉ = Σ w·det(J)·Bᵀ A(x) B.
///
/// `material` is evaluated at the physical position of each quadrature
/// point, so heterogeneous coefficients inside one element are integrated
/// as sampled.
pub fn element_stiffness(
    coords: &[[f64; 2]],
    order: usize,
    material: &dyn Fn([f64; 2]) -> ElasticityTensor,
    rule: &QuadratureRule,
) -> Result<DMatrix<f64>> {
    let n_nodes = coords.len();
    let ndof = 2 * n_nodes;
    let mut k = DMatrix::zeros(ndof, ndof);
    for (pt, w) in rule.points.iter().zip(&rule.weights) {
        let (values, grads, det) = physical_gradients(coords, order, *pt)?;
        let mut x = [0.0, 0.0];
        for (v, c) in values.iter().zip(coords) {
            x[0] += v * c[0];
            x[1] += v * c[1];
        }
        let a = material(x).voigt;
        let scale = w * det;
        // k += scale * Bᵀ A B without forming B explicitly: column blocks
        // per node a are [[gx, 0], [0, gy], [gy, gx]].
        for i in 0..n_nodes {
            let bi = [
                [grads[i][0], 0.0],
                [0.0, grads[i][1]],
                [grads[i][1], grads[i][0]],
            ];
            // A · B_i
            let mut abi = [[0.0; 2]; 3];
            for r in 0..3 {
                for c in 0..2 {
                    abi[r][c] =
                        a[(r, 0)] * bi[0][c] + a[(r, 1)] * bi[1][c] + a[(r, 2)] * bi[2][c];
                }
            }
            for j in 0..n_nodes {
                let bj = [
                    [grads[j][0], 0.0],
                    [0.0, grads[j][1]],
                    [grads[j][1], grads[j][0]],
                ];
                for r in 0..2 {
                    for c in 0..2 {
                        let mut v = 0.0;
                        for s in 0..3 {
                            v += bj[s][r] * abi[s][c];
                        }
                        k[(2 * j + r, 2 * i + c)] += scale * v;
                    }
                }
            }
        }
    }
    Ok(k)
}
