//! Numerics for the Ornstein-Uhlenbeck Poisson semigroup: kernel
//! evaluation by subordination quadrature, Gaussian Lipschitz distances
//! and moduli, Poisson integrals of a closed test-function catalog,
//! kernel majorant certification, and seminorm estimation.

// Validations use negated comparisons so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyzer;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod majorants;
pub mod quad;
pub mod sampler;
pub mod transform;

pub use error::{Error, Result};
pub use geometry::{
    decompose, gauss_dist_1d, gauss_dist_par, gaussian_density, modulus, ModulusKind,
    ParallelSplit, Point,
};
pub use kernels::{
    mehler, poisson_kernel, poisson_kernel_dt, poisson_kernel_dt_dx, poisson_kernel_dx,
    KernelPoint,
};
pub use quad::QuadratureSpec;
pub use transform::{
    admissibility, poisson_integral, poisson_integral_dt, poisson_integral_dx,
    AdmissibilityReport, FieldKind, ScalarField, VerdictBasis,
};
