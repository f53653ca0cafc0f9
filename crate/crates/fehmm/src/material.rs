//! Plane-strain isotropic elasticity and periodic microstructure fields.
//!
//! Stiffness tensors are stored in 3×3 symmetric Voigt form, ordered
//! (11, 22, 12) with the engineering shear convention γ₁₂ = 2ε₁₂, matching
//! the strain operator of the fem module.

use crate::error::{Error, Result};
use nalgebra::Matrix3;

/// Plane-strain stiffness in Voigt form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityTensor {
    pub voigt: Matrix3<f64>,
}

impl ElasticityTensor {
    pub fn from_voigt(voigt: Matrix3<f64>) -> Self {
        ElasticityTensor { voigt }
    }

    /// Voigt stress for an engineering-convention strain vector.
    pub fn stress(&self, strain: [f64; 3]) -> [f64; 3] {
        let mut s = [0.0; 3];
        for i in 0..3 {
            s[i] = self.voigt[(i, 0)] * strain[0]
                + self.voigt[(i, 1)] * strain[1]
                + self.voigt[(i, 2)] * strain[2];
        }
        s
    }

    /// Strain energy density ½ ε:A:ε is omitted; this is the full
    /// contraction ε:A:ε used by the energy norm.
    pub fn energy_product(&self, strain: [f64; 3]) -> f64 {
        let s = self.stress(strain);
        s[0] * strain[0] + s[1] * strain[1] + s[2] * strain[2]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let a = &self.voigt;
        (a[(0, 1)] - a[(1, 0)]).abs() <= tol
            && (a[(0, 2)] - a[(2, 0)]).abs() <= tol
            && (a[(1, 2)] - a[(2, 1)]).abs() <= tol
    }
}

/// Plane-strain isotropic stiffness from Young's modulus and Poisson ratio.
pub fn voigt_tensor(e: f64, nu: f64) -> Result<ElasticityTensor> {
    if !(e > 0.0) {
        return Err(Error::Material(format!("Young's modulus must be positive, got {e}")));
    }
    if !(-1.0 < nu && nu < 0.5) {
        return Err(Error::Material(format!(
            "Poisson ratio must lie in (-1, 0.5), got {nu}"
        )));
    }
    let c = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let a11 = c * (1.0 - nu);
    let a12 = c * nu;
    let a33 = 0.5 * e / (1.0 + nu);
    Ok(ElasticityTensor {
        voigt: Matrix3::new(a11, a12, 0.0, a12, a11, 0.0, 0.0, 0.0, a33),
    })
}

/// Which unit cell of the sine-wave stiffness distribution to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SineCell {
    /// cos·cos modulation, symmetric about the cell center.
    Symmetric,
    /// sin·sin modulation (the shifted cell).
    Shifted,
}

/// ε-periodic microstructure field sampled in RVE-local coordinates.
///
/// Piecewise-constant kinds use half-open tiling `[a, b)` so points landing
/// exactly on an interface get a deterministic phase.
#[derive(Debug, Clone, PartialEq)]
pub enum MicrostructureField {
    Homogeneous {
        e: f64,
        nu: f64,
    },
    /// Centered square inclusion of side 3/4·ε (volume fraction 9/16).
    MatrixInclusion {
        epsilon: f64,
        e_inclusion: f64,
        e_matrix: f64,
        nu: f64,
    },
    /// Alternating tiles, phase 1 at the lower-left tile.
    Chessboard {
        epsilon: f64,
        e_phase1: f64,
        e_phase2: f64,
        nu: f64,
        /// Tiles per unit cell and direction (2 reproduces the 2×2 pattern).
        tiles: usize,
    },
    /// Smooth modulation between e_min and e_max.
    SineWave {
        epsilon: f64,
        e_min: f64,
        e_max: f64,
        nu: f64,
        cell: SineCell,
    },
}

impl MicrostructureField {
    /// Default matrix-inclusion field: contrast 50, ν = 0.2.
    pub fn matrix_inclusion(epsilon: f64) -> Self {
        MicrostructureField::MatrixInclusion {
            epsilon,
            e_inclusion: 200_000.0,
            e_matrix: 40_000.0,
            nu: 0.2,
        }
    }

    /// Default chessboard field: contrast 50, ν = 0.2, 2×2 tiles.
    pub fn chessboard(epsilon: f64) -> Self {
        MicrostructureField::Chessboard {
            epsilon,
            e_phase1: 2_000_000.0,
            e_phase2: 40_000.0,
            nu: 0.2,
            tiles: 2,
        }
    }

    /// Default sine-wave field on the shifted cell, contrast 1.25.
    pub fn sine_wave(epsilon: f64) -> Self {
        MicrostructureField::SineWave {
            epsilon,
            e_min: 40_000.0,
            e_max: 50_000.0,
            nu: 0.2,
            cell: SineCell::Shifted,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            MicrostructureField::Homogeneous { .. } => None,
            MicrostructureField::MatrixInclusion { epsilon, .. }
            | MicrostructureField::Chessboard { epsilon, .. }
            | MicrostructureField::SineWave { epsilon, .. } => Some(*epsilon),
        }
    }

    /// Young's modulus at a point (periodic extension in both directions).
    pub fn youngs_modulus(&self, x: [f64; 2]) -> f64 {
        match self {
            MicrostructureField::Homogeneous { e, .. } => *e,
            MicrostructureField::MatrixInclusion {
                epsilon,
                e_inclusion,
                e_matrix,
                ..
            } => {
                let u = unit_cell_coord(x[0], *epsilon);
                let v = unit_cell_coord(x[1], *epsilon);
                if (0.125..0.875).contains(&u) && (0.125..0.875).contains(&v) {
                    *e_inclusion
                } else {
                    *e_matrix
                }
            }
            MicrostructureField::Chessboard {
                epsilon,
                e_phase1,
                e_phase2,
                tiles,
                ..
            } => {
                let u = unit_cell_coord(x[0], *epsilon);
                let v = unit_cell_coord(x[1], *epsilon);
                let t = *tiles as f64;
                let iu = ((u * t).floor() as usize).min(tiles - 1);
                let iv = ((v * t).floor() as usize).min(tiles - 1);
                if (iu + iv) % 2 == 0 {
                    *e_phase1
                } else {
                    *e_phase2
                }
            }
            MicrostructureField::SineWave {
                epsilon,
                e_min,
                e_max,
                cell,
                ..
            } => {
                let u = 2.0 * std::f64::consts::PI * x[0] / epsilon;
                let v = 2.0 * std::f64::consts::PI * x[1] / epsilon;
                let modulation = match cell {
                    SineCell::Shifted => u.sin() * v.sin(),
                    SineCell::Symmetric => u.cos() * v.cos(),
                };
                e_min + (e_max - e_min) * 0.5 * (1.0 + modulation)
            }
        }
    }

    fn poisson(&self) -> f64 {
        match self {
            MicrostructureField::Homogeneous { nu, .. }
            | MicrostructureField::MatrixInclusion { nu, .. }
            | MicrostructureField::Chessboard { nu, .. }
            | MicrostructureField::SineWave { nu, .. } => *nu,
        }
    }
}

/// Position inside the half-open unit cell [0, 1).
fn unit_cell_coord(x: f64, epsilon: f64) -> f64 {
    let u = (x / epsilon).rem_euclid(1.0);
    if u >= 1.0 {
        0.0
    } else {
        u
    }
}

/// Sample the stiffness tensor of a microstructure field at a point.
pub fn sample_field(field: &MicrostructureField, x: [f64; 2]) -> ElasticityTensor {
    let e = field.youngs_modulus(x);
    // Parameters were validated when the field was built; the closed form
    // cannot fail for E > 0 and admissible ν.
    voigt_tensor(e, field.poisson()).expect("field parameters are admissible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn voigt_tensor_at_nu_zero() {
        let a = voigt_tensor(1.0, 0.0).unwrap().voigt;
        assert_relative_eq!(a[(0, 0)], 1.0, max_relative = 1e-15);
        assert_relative_eq!(a[(1, 1)], 1.0, max_relative = 1e-15);
        assert_relative_eq!(a[(0, 1)], 0.0, max_relative = 1e-15);
        assert_relative_eq!(a[(2, 2)], 0.5, max_relative = 1e-15);
    }

    #[test]
    fn voigt_tensor_against_lame_constants() {
        // Independent route: plane strain via the Lamé constants,
        // A11 = λ + 2μ, A12 = λ, A33 = μ.
        let (e, nu) = (40_000.0, 0.2);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = 0.5 * e / (1.0 + nu);
        let a = voigt_tensor(e, nu).unwrap().voigt;
        assert_relative_eq!(a[(0, 0)], lambda + 2.0 * mu, max_relative = 1e-14);
        assert_relative_eq!(a[(0, 1)], lambda, max_relative = 1e-14);
        assert_relative_eq!(a[(2, 2)], mu, max_relative = 1e-14);
        assert_relative_eq!(a[(0, 0)], 44444.44444444444, max_relative = 1e-12);
        assert_relative_eq!(a[(0, 1)], 11111.11111111111, max_relative = 1e-12);
        assert_relative_eq!(a[(2, 2)], 16666.666666666668, max_relative = 1e-12);
    }

    #[test]
    fn voigt_tensor_symmetry_and_rejection() {
        let t = voigt_tensor(123.0, 0.31).unwrap();
        assert!(t.is_symmetric(0.0));
        assert!(voigt_tensor(1.0, 0.5).is_err());
        assert!(voigt_tensor(-1.0, 0.2).is_err());
    }

    #[test]
    fn matrix_inclusion_phases() {
        let eps = 0.005;
        let field = MicrostructureField::matrix_inclusion(eps);
        // Cell center lies in the stiff inclusion (contrast 50).
        assert_relative_eq!(
            field.youngs_modulus([0.5 * eps, 0.5 * eps]),
            200_000.0,
            max_relative = 0.0
        );
        // Cell corner lies in the homogeneous matrix phase.
        assert_relative_eq!(field.youngs_modulus([0.0, 0.0]), 40_000.0, max_relative = 0.0);
        let center = sample_field(&field, [0.5 * eps, 0.5 * eps]);
        let corner = sample_field(&field, [0.0, 0.0]);
        assert_relative_eq!(
            center.voigt[(0, 0)] / corner.voigt[(0, 0)],
            5.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn periodic_extension() {
        let eps = 0.005;
        for field in [
            MicrostructureField::matrix_inclusion(eps),
            MicrostructureField::chessboard(eps),
            MicrostructureField::sine_wave(eps),
        ] {
            for p in [[0.0011, 0.0004], [0.0032, 0.0048], [0.00425, 0.00125]] {
                let a = field.youngs_modulus(p);
                let b = field.youngs_modulus([p[0] + eps, p[1]]);
                let c = field.youngs_modulus([p[0] - 3.0 * eps, p[1] + 2.0 * eps]);
                assert_relative_eq!(a, b, max_relative = 1e-12);
                assert_relative_eq!(a, c, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn inclusion_volume_fraction_by_fine_sampling() {
        let eps = 0.005;
        let field = MicrostructureField::matrix_inclusion(eps);
        let n = 1024;
        let mut hits = 0usize;
        for j in 0..n {
            for i in 0..n {
                let x = (i as f64 + 0.5) / n as f64 * eps;
                let y = (j as f64 + 0.5) / n as f64 * eps;
                if field.youngs_modulus([x, y]) == 200_000.0 {
                    hits += 1;
                }
            }
        }
        let fraction = hits as f64 / (n * n) as f64;
        assert!((fraction - 9.0 / 16.0).abs() <= 1.0 / 1024.0);
    }

    #[test]
    fn chessboard_contrast_and_pattern() {
        let eps = 1.0;
        let field = MicrostructureField::chessboard(eps);
        let e00 = field.youngs_modulus([0.1, 0.1]);
        let e10 = field.youngs_modulus([0.6, 0.1]);
        let e11 = field.youngs_modulus([0.6, 0.6]);
        assert_relative_eq!(e00 / e10, 50.0, max_relative = 1e-12);
        assert_relative_eq!(e00, e11, max_relative = 1e-15);
    }

    #[test]
    fn sine_wave_is_continuous_and_bounded() {
        let eps = 0.005;
        let field = MicrostructureField::sine_wave(eps);
        let (e_min, e_max) = (40_000.0, 50_000.0);
        let step = 1e-6 * eps;
        let mut max_jump: f64 = 0.0;
        let mut seen_min = f64::INFINITY;
        let mut seen_max = f64::NEG_INFINITY;
        let n = 2000;
        for k in 0..n {
            let t = k as f64 / n as f64 * eps;
            let p = [t, 0.37 * eps + 0.5 * t];
            let e0 = field.youngs_modulus(p);
            let e1 = field.youngs_modulus([p[0] + step, p[1] + step]);
            max_jump = max_jump.max((e1 - e0).abs());
            seen_min = seen_min.min(e0);
            seen_max = seen_max.max(e0);
        }
        assert!(max_jump < 1e-3 * (e_max - e_min));
        assert!(seen_min >= e_min - 1e-9 && seen_max <= e_max + 1e-9);
        // The stated extremes are attained on the cell diagonal.
        assert_relative_eq!(
            field.youngs_modulus([0.25 * eps, 0.25 * eps]),
            e_max,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            field.youngs_modulus([0.75 * eps, 0.25 * eps]),
            e_min,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sampled_tensors_positive_definite() {
        let eps = 0.005;
        for field in [
            MicrostructureField::matrix_inclusion(eps),
            MicrostructureField::chessboard(eps),
            MicrostructureField::sine_wave(eps),
            MicrostructureField::Homogeneous { e: 1.0, nu: 0.3 },
        ] {
            for p in [[0.0, 0.0], [0.0025, 0.0025], [0.004, 0.001]] {
                let a = sample_field(&field, p).voigt;
                let eig = nalgebra::SymmetricEigen::new(a);
                assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
            }
        }
    }
}
