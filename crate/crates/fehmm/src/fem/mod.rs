//! Single-scale finite element kernel.

pub mod assembly;
pub mod element;
pub mod norms;
pub mod ordering;
pub mod quadrature;
pub mod shape;
pub mod solver;
pub mod sparse;

pub use assembly::{assemble, assemble_stiffness, dof, volume_load};
pub use element::{element_stiffness, physical_gradients, strain_at};
pub use norms::{eval_field, norm_energy, norm_h1, norm_l2, FieldSample};
pub use quadrature::QuadratureRule;
pub use shape::shape_functions;
pub use solver::{solve_spd, ConstrainedSystem, DirectSolver, ReducedSpdSolver, SaddleSolver};
pub use sparse::{ConstraintMatrix, SparseSymmetricMatrix};

use crate::mesh::StructuredQuadMesh;

/// Nested-dissection elimination order for all displacement dofs of a mesh.
pub fn mesh_dof_order(mesh: &StructuredQuadMesh) -> Vec<usize> {
    let grid: Vec<(u32, u32)> = (0..mesh.num_nodes())
        .map(|n| {
            let (i, j) = mesh.node_grid_index(n);
            (i as u32, j as u32)
        })
        .collect();
    ordering::dof_order_for_nodes(&grid, mesh.order as u32)
}
