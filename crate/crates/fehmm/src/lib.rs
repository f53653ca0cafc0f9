//! Two-scale finite element homogenization (FE-HMM / FE²) for 2D linear
//! elasticity.
//!
//! The crate is organized along the two scales of the method:
//!
//! - [`mesh`]: structured Q4/Q9 quadrilateral meshes, boundary topology,
//!   periodic node pairing and point location.
//! - [`material`]: plane-strain elasticity tensors and periodic
//!   microstructure fields (matrix-inclusion, chessboard, sine wave).
//! - [`fem`]: single-scale kernel — shape functions, quadrature, sparse
//!   symmetric assembly, SPD and saddle-point direct solvers, norms.
//! - [`micro`]: RVE problems under Dirichlet, periodic and constant-traction
//!   coupling; unit displacement states, transformation matrices and
//!   homogenized tensors.
//! - [`macroscale`]: assembly and solution of the macro problem from
//!   per-quadrature-point micro operators; single-scale reference solves.
//! - [`postproc`]: exact error computation against reference meshes,
//!   superconvergent patch recovery, effectivity indices, convergence rates.
//! - [`study`]: the benchmark registry behind the CLI — convergence studies,
//!   refinement strategies, modeling-error and estimator-validation runs.

pub mod error;
pub mod fem;
pub mod macroscale;
pub mod material;
pub mod mesh;
pub mod micro;
pub mod postproc;
pub mod study;
pub mod vtk;

pub use error::{Error, Result};
pub use material::{ElasticityTensor, MicrostructureField};
pub use mesh::{PeriodicPairs, StructuredQuadMesh};

