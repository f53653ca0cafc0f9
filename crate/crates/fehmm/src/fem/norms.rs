//! L², H¹ and energy norms of nodal vector fields, evaluated with the
//! mesh's full-integration Gauss rule.

use super::assembly::dof;
use super::element::{physical_gradients, strain_at};
use super::quadrature::QuadratureRule;
use crate::error::Result;
use crate::material::ElasticityTensor;
use crate::mesh::StructuredQuadMesh;

/// Displacement, displacement gradient and strain of a nodal field at one
/// reference point of an element.
pub fn eval_field(
    mesh: &StructuredQuadMesh,
    nodal: &[f64],
    element: usize,
    xi: [f64; 2],
) -> Result<FieldSample> {
    let coords = mesh.element_coords(element);
    let (values, grads, det) = physical_gradients(&coords, mesh.order, xi)?;
    let conn = &mesh.connectivity[element];
    let mut u = [0.0; 2];
    let mut grad = [[0.0; 2]; 2];
    let mut local = Vec::with_capacity(2 * conn.len());
    for (a, &n) in conn.iter().enumerate() {
        let ux = nodal[dof(n, 0)];
        let uy = nodal[dof(n, 1)];
        local.push(ux);
        local.push(uy);
        u[0] += values[a] * ux;
        u[1] += values[a] * uy;
        grad[0][0] += grads[a][0] * ux;
        grad[0][1] += grads[a][1] * ux;
        grad[1][0] += grads[a][0] * uy;
        grad[1][1] += grads[a][1] * uy;
    }
    let strain = strain_at(&grads, &local);
    let mut x = [0.0, 0.0];
    for (v, c) in values.iter().zip(&coords) {
        x[0] += v * c[0];
        x[1] += v * c[1];
    }
    Ok(FieldSample {
        position: x,
        displacement: u,
        gradient: grad,
        strain,
        jacobian_det: det,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub position: [f64; 2],
    pub displacement: [f64; 2],
    pub gradient: [[f64; 2]; 2],
    pub strain: [f64; 3],
    pub jacobian_det: f64,
}

fn integrate(
    mesh: &StructuredQuadMesh,
    nodal: &[f64],
    mut integrand: impl FnMut(&FieldSample) -> f64,
) -> Result<f64> {
    let rule = QuadratureRule::for_order(mesh.order);
    let mut sum = 0.0;
    for e in 0..mesh.num_elements() {
        for (pt, w) in rule.points.iter().zip(&rule.weights) {
            let s = eval_field(mesh, nodal, e, *pt)?;
            sum += w * s.jacobian_det * integrand(&s);
        }
    }
    Ok(sum)
}

/// ‖u‖_L² = √(∫ u·u dV).
pub fn norm_l2(mesh: &StructuredQuadMesh, nodal: &[f64]) -> Result<f64> {
    let v = integrate(mesh, nodal, |s| {
        s.displacement[0].powi(2) + s.displacement[1].powi(2)
    })?;
    Ok(v.max(0.0).sqrt())
}

/// Full H¹ norm: √(Σ_ij ∫ (∂u_i/∂x_j)² + Σ_i ∫ u_i²).
pub fn norm_h1(mesh: &StructuredQuadMesh, nodal: &[f64]) -> Result<f64> {
    let v = integrate(mesh, nodal, |s| {
        let g = &s.gradient;
        s.displacement[0].powi(2)
            + s.displacement[1].powi(2)
            + g[0][0].powi(2)
            + g[0][1].powi(2)
            + g[1][0].powi(2)
            + g[1][1].powi(2)
    })?;
    Ok(v.max(0.0).sqrt())
}

/// Energy norm √(∫ A ε(u):ε(u) dV); equals √(dᵀ K d) when K is assembled
/// with the same material and quadrature.
pub fn norm_energy(
    mesh: &StructuredQuadMesh,
    nodal: &[f64],
    material: &dyn Fn([f64; 2]) -> ElasticityTensor,
) -> Result<f64> {
    let v = integrate(mesh, nodal, |s| {
        material(s.position).energy_product(s.strain)
    })?;
    Ok(v.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::assemble_stiffness;
    use crate::material::voigt_tensor;
    use crate::mesh::build_rect_mesh;
    use approx::assert_relative_eq;

    #[test]
    fn constant_field_norms() {
        let mesh = build_rect_mesh(3, 2, 1.0, 1.0, 1).unwrap();
        let c = 0.7;
        let nodal = vec![c; mesh.num_dofs()];
        // (c, c) on a unit-area domain: L2 = |c|·√2, H1 equals L2.
        assert_relative_eq!(
            norm_l2(&mesh, &nodal).unwrap(),
            c * 2.0f64.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            norm_h1(&mesh, &nodal).unwrap(),
            c * 2.0f64.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn energy_norm_of_uniaxial_stretch() {
        // u = (x, 0) on the unit square with A = voigt(1, 0): ∫ A ε:ε = A11.
        let mesh = build_rect_mesh(4, 4, 1.0, 1.0, 2).unwrap();
        let a = voigt_tensor(1.0, 0.0).unwrap();
        let mut nodal = vec![0.0; mesh.num_dofs()];
        for (n, c) in mesh.node_coords.iter().enumerate() {
            nodal[2 * n] = c[0];
        }
        let e = norm_energy(&mesh, &nodal, &|_| a).unwrap();
        assert_relative_eq!(e * e, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn energy_norm_equals_stiffness_quadratic_form() {
        let mesh = build_rect_mesh(3, 3, 1.3, 0.8, 2).unwrap();
        let a = voigt_tensor(250.0, 0.3).unwrap();
        let k = assemble_stiffness(&mesh, &|_| a).unwrap();
        let mut state = 42u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..3 {
            let d: Vec<f64> = (0..mesh.num_dofs()).map(|_| next()).collect();
            let via_quadrature = norm_energy(&mesh, &d, &|_| a).unwrap();
            let via_matrix = k.quad_form(&d, &d).max(0.0).sqrt();
            assert_relative_eq!(via_quadrature, via_matrix, max_relative = 1e-10);
        }
    }
}
