//! Fourth-order finite difference (Q2 spectral element) operators for
//! `-∇·(a∇u) + cu = f` and certificates for their monotonicity.
//!
//! The crate assembles the full operator `L̄_h` (boundary rows included) in
//! 1D and 2D, splits it for the Lorenz factorization test, evaluates the
//! closed-form mesh constraints, builds the explicit M-matrix factorizations
//! of the discrete Laplacian, and checks inverse positivity directly by a
//! banded LU.

// `!(x > 0.0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the stencil and banded-matrix formulas.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod constraints;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod factorization;
pub mod grid;
pub mod io;
pub mod lu;
pub mod sparse;

pub use assembly::{
    assemble_1d_laplacian, assemble_1d_variable, assemble_2d_laplacian, assemble_2d_variable, assemble_via_quadrature,
    scale_boundary_rows, split_operator, BoundaryRows, CoefficientField, GridRef, Layout, Scheme, SparseOperator,
    SplitRule, Splitting,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{Grid1D, Grid2D, PointClass};
pub use sparse::CsrMatrix;
