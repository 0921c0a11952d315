//! Matrix-level certificates: Z-pattern and M-matrix tests, directed-graph
//! connectivity, the Lorenz splitting conditions, and direct inverse checks.

mod graph;
mod inverse;
mod lorenz;
mod mmatrix;

pub use graph::{connects, unconnected, ConnectivityGraph};
pub use inverse::{
    dmp_certify, inverse_min_entries, DmpReport, InverseOptions, InverseReport, Sign, DEFAULT_CAP,
    DEFAULT_REL_THRESHOLD,
};
pub use lorenz::{lorenz_check, product_bound, Connectivity, EpsilonChoice, LorenzReport, ProductBound};
pub use mmatrix::{is_m_matrix_wcdd, is_z_pattern, MMatrixReport, ZPatternReport, REL_TOL};
