//! Scatter-add assembly of element matrices into the global sparse
//! stiffness.
//!
//! Element matrices are evaluated in parallel; the scatter uses
//! tag-ordered triplet reduction, so the assembled values are bitwise
//! independent of element processing order and thread scheduling.

use super::quadrature::QuadratureRule;
use super::sparse::SparseSymmetricMatrix;
use super::element::element_stiffness;
use crate::error::Result;
use crate::material::ElasticityTensor;
use crate::mesh::StructuredQuadMesh;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Global dof of a node and direction.
#[inline]
pub fn dof(node: usize, dir: usize) -> usize {
    2 * node + dir
}

/// Assemble a global symmetric stiffness from per-element dense matrices.
pub fn assemble(
    mesh: &StructuredQuadMesh,
    element_matrix: impl Fn(usize) -> Result<DMatrix<f64>> + Sync,
) -> Result<SparseSymmetricMatrix> {
    let n_el = mesh.num_elements();
    let matrices: Vec<DMatrix<f64>> = (0..n_el)
        .into_par_iter()
        .map(|e| element_matrix(e))
        .collect::<Result<_>>()?;
    let mut triplets = Vec::new();
    for (e, ke) in matrices.iter().enumerate() {
        let conn = &mesh.connectivity[e];
        for (a, &na) in conn.iter().enumerate() {
            for (b, &nb) in conn.iter().enumerate() {
                for r in 0..2 {
                    for c in 0..2 {
                        let gi = dof(na, r);
                        let gj = dof(nb, c);
                        if gi <= gj {
                            triplets.push((gi, gj, ke[(2 * a + r, 2 * b + c)], e));
                        }
                    }
                }
            }
        }
    }
    Ok(SparseSymmetricMatrix::from_triplets(
        mesh.num_dofs(),
        triplets,
    ))
}

/// Assemble the stiffness of a mesh with a pointwise material law and the
/// full-integration rule of the mesh order.
pub fn assemble_stiffness(
    mesh: &StructuredQuadMesh,
    material: &(dyn Fn([f64; 2]) -> ElasticityTensor + Sync),
) -> Result<SparseSymmetricMatrix> {
    let rule = QuadratureRule::for_order(mesh.order);
    assemble(mesh, |e| {
        element_stiffness(&mesh.element_coords(e), mesh.order, &material, &rule)
    })
}

/// Consistent nodal load vector of a volume force density.
pub fn volume_load(
    mesh: &StructuredQuadMesh,
    force: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
) -> Result<Vec<f64>> {
    let rule = QuadratureRule::for_order(mesh.order);
    let mut f = vec![0.0; mesh.num_dofs()];
    for e in 0..mesh.num_elements() {
        let coords = mesh.element_coords(e);
        for (pt, w) in rule.points.iter().zip(&rule.weights) {
            let (values, _, det) =
                super::element::physical_gradients(&coords, mesh.order, *pt)?;
            let mut x = [0.0, 0.0];
            for (v, c) in values.iter().zip(&coords) {
                x[0] += v * c[0];
                x[1] += v * c[1];
            }
            let body = force(x);
            for (a, &n) in mesh.connectivity[e].iter().enumerate() {
                f[dof(n, 0)] += w * det * values[a] * body[0];
                f[dof(n, 1)] += w * det * values[a] * body[1];
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature::QuadratureRule;
    use crate::material::voigt_tensor;
    use crate::mesh::build_rect_mesh;
    use approx::assert_relative_eq;

    #[test]
    fn single_element_assembly_equals_element_matrix() {
        let mesh = build_rect_mesh(1, 1, 1.0, 1.0, 1).unwrap();
        let a = voigt_tensor(3.0, 0.25).unwrap();
        let k = assemble_stiffness(&mesh, &|_| a).unwrap();
        let ke = element_stiffness(
            &mesh.element_coords(0),
            1,
            &|_| a,
            &QuadratureRule::gauss(2),
        )
        .unwrap();
        let conn = &mesh.connectivity[0];
        for (ai, &na) in conn.iter().enumerate() {
            for (bi, &nb) in conn.iter().enumerate() {
                for r in 0..2 {
                    for c in 0..2 {
                        assert_relative_eq!(
                            k.get(dof(na, r), dof(nb, c)),
                            ke[(2 * ai + r, 2 * bi + c)],
                            epsilon = 1e-14
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shared_nodes_sum_both_contributions() {
        // Hand scatter-add oracle on a 2x1 mesh of identical elements.
        let mesh = build_rect_mesh(2, 1, 2.0, 1.0, 1).unwrap();
        let a = voigt_tensor(7.0, 0.2).unwrap();
        let k = assemble_stiffness(&mesh, &|_| a).unwrap();
        let rule = QuadratureRule::gauss(2);
        let k0 = element_stiffness(&mesh.element_coords(0), 1, &|_| a, &rule).unwrap();
        let k1 = element_stiffness(&mesh.element_coords(1), 1, &|_| a, &rule).unwrap();
        let mut dense = nalgebra::DMatrix::zeros(mesh.num_dofs(), mesh.num_dofs());
        for (e, ke) in [(0usize, &k0), (1, &k1)] {
            for (ai, &na) in mesh.connectivity[e].iter().enumerate() {
                for (bi, &nb) in mesh.connectivity[e].iter().enumerate() {
                    for r in 0..2 {
                        for c in 0..2 {
                            dense[(dof(na, r), dof(nb, c))] += ke[(2 * ai + r, 2 * bi + c)];
                        }
                    }
                }
            }
        }
        for i in 0..mesh.num_dofs() {
            for j in 0..mesh.num_dofs() {
                assert_relative_eq!(k.get(i, j), dense[(i, j)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn global_rigid_mode_count_is_three() {
        let mesh = build_rect_mesh(3, 2, 1.0, 1.0, 1).unwrap();
        let a = voigt_tensor(1.0, 0.3).unwrap();
        let k = assemble_stiffness(&mesh, &|_| a).unwrap().to_dense();
        let eig = nalgebra::SymmetricEigen::new(k);
        let zero = eig.eigenvalues.iter().filter(|&&l| l.abs() < 1e-10).count();
        assert_eq!(zero, 3);
    }

    #[test]
    fn volume_load_total_force() {
        let mesh = build_rect_mesh(3, 3, 2.0, 1.0, 2).unwrap();
        let f = volume_load(&mesh, &|_| [0.0, -10.0]).unwrap();
        let total: f64 = f.iter().skip(1).step_by(2).sum();
        assert_relative_eq!(total, -20.0, max_relative = 1e-12);
    }
}
