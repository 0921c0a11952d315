//! Assembly of the full operator (boundary identity rows included) for the
//! four Q2 finite difference schemes, the epsilon splitting used by the
//! Lorenz condition, and an independent Gauss-Lobatto quadrature assembly.

mod quadrature;
mod splitting;
mod stencil;

pub use quadrature::assemble_via_quadrature;
pub use splitting::{split_operator, SplitRule, Splitting};
pub use stencil::{assemble_1d_laplacian, assemble_1d_variable, assemble_2d_laplacian, assemble_2d_variable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, PointClass};
use crate::sparse::CsrMatrix;

/// Samples of the diffusion coefficient `a > 0` and reaction coefficient
/// `c >= 0` at every grid point, boundary included, in grid index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

impl CoefficientField {
    pub fn new(a: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.len() != c.len() {
            return Err(Error::SampleCount {
                expected: a.len(),
                got: c.len(),
            });
        }
        let field = CoefficientField { a, c };
        field.validate()?;
        Ok(field)
    }

    pub fn constant(len: usize, a: f64, c: f64) -> Self {
        CoefficientField {
            a: vec![a; len],
            c: vec![c; len],
        }
    }

    pub fn from_fn_1d(grid: &Grid1D, a: impl Fn(f64) -> f64, c: impl Fn(f64) -> f64) -> Self {
        let pts = grid.points();
        CoefficientField {
            a: pts.iter().map(|&x| a(x)).collect(),
            c: pts.iter().map(|&x| c(x)).collect(),
        }
    }

    pub fn from_fn_2d(grid: &Grid2D, a: impl Fn(f64, f64) -> f64, c: impl Fn(f64, f64) -> f64) -> Self {
        let mut av = Vec::with_capacity(grid.len());
        let mut cv = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() + 2 {
            for i in 0..grid.nx() + 2 {
                let (x, y) = (grid.x(i), grid.y(j));
                av.push(a(x, y));
                cv.push(c(x, y));
            }
        }
        CoefficientField { a: av, c: cv }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((index, &value)) = self.a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveDiffusion { index, value });
        }
        if let Some((index, &value)) = self.c.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeReaction { index, value });
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.a.len() != expected || self.c.len() != expected {
            return Err(Error::SampleCount {
                expected,
                got: self.a.len().min(self.c.len()),
            });
        }
        Ok(())
    }
}

/// How boundary rows of an operator are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryRows {
    /// `u = g`.
    Identity,
    /// `u / h^2 = g / h^2`.
    Scaled,
    /// Operator read from a file; boundary rows unknown.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Laplacian,
    Variable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridRef {
    OneD(Grid1D),
    TwoD(Grid2D),
}

/// Grid metadata attached to assembled operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub grid: GridRef,
    pub scheme: Scheme,
    /// Reaction samples used at assembly (zeros for the Laplacian).
    pub c: Vec<f64>,
}

impl Layout {
    pub fn len(&self) -> usize {
        match &self.grid {
            GridRef::OneD(g) => g.len(),
            GridRef::TwoD(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        match &self.grid {
            GridRef::OneD(g) => g.h(),
            GridRef::TwoD(g) => g.h(),
        }
    }

    pub fn class(&self, index: usize) -> PointClass {
        match &self.grid {
            GridRef::OneD(g) => g.class_of(index),
            GridRef::TwoD(g) => {
                let (i, j) = g.coords(index);
                g.class_of(i, j)
            }
        }
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        self.class(index) == PointClass::Boundary
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_boundary(k)).collect()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.is_boundary(k)).collect()
    }
}

/// The full operator `L̄_h` together with the metadata needed to split and
/// analyse it.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    matrix: CsrMatrix,
    boundary: BoundaryRows,
    layout: Option<Layout>,
}

impl SparseOperator {
    pub(crate) fn assembled(matrix: CsrMatrix, layout: Layout) -> Self {
        debug_assert_eq!(matrix.dim(), layout.len());
        SparseOperator {
            matrix,
            boundary: BoundaryRows::Identity,
            layout: Some(layout),
        }
    }

    /// Wraps a bare matrix (no grid metadata). Only the structural and
    /// inverse checks accept such operators.
    pub fn from_matrix(matrix: CsrMatrix) -> Self {
        SparseOperator {
            matrix,
            boundary: BoundaryRows::Unknown,
            layout: None,
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn boundary_rows(&self) -> BoundaryRows {
        self.boundary
    }

    pub fn layout(&self) -> Option<&Layout> {
        self.layout.as_ref()
    }

    pub fn h(&self) -> Option<f64> {
        self.layout.as_ref().map(Layout::h)
    }

    /// Indices of interior points, or every index when no layout is known.
    pub fn interior_indices(&self) -> Vec<usize> {
        match &self.layout {
            Some(l) => l.interior_indices(),
            None => (0..self.dim()).collect(),
        }
    }

    /// Replaces the identity boundary rows `u = g` by `u / h^2 = g / h^2` so
    /// every nonzero has a comparable magnitude.
    pub fn scale_boundary_rows(&self) -> Result<SparseOperator> {
        let layout = self.layout.as_ref().ok_or(Error::MissingLayout)?;
        match self.boundary {
            BoundaryRows::Scaled => return Err(Error::AlreadyScaled),
            BoundaryRows::Unknown => return Err(Error::MissingLayout),
            BoundaryRows::Identity => {}
        }
        let h = layout.h();
        let matrix = self
            .matrix
            .with_diagonal_rows(&layout.boundary_indices(), 1.0 / (h * h));
        Ok(SparseOperator {
            matrix,
            boundary: BoundaryRows::Scaled,
            layout: self.layout.clone(),
        })
    }

    /// Diagonal value used on boundary rows.
    pub fn boundary_diagonal(&self) -> Option<f64> {
        let h = self.h()?;
        match self.boundary {
            BoundaryRows::Identity => Some(1.0),
            BoundaryRows::Scaled => Some(1.0 / (h * h)),
            BoundaryRows::Unknown => None,
        }
    }
}

/// Free-function form of [`SparseOperator::scale_boundary_rows`].
pub fn scale_boundary_rows(op: &SparseOperator) -> Result<SparseOperator> {
    op.scale_boundary_rows()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_validation() {
        assert!(matches!(
            CoefficientField::new(vec![1.0, 0.0], vec![0.0, 0.0]),
            Err(Error::NonPositiveDiffusion { index: 1, .. })
        ));
        assert!(matches!(
            CoefficientField::new(vec![1.0, 1.0], vec![0.0, -1.0]),
            Err(Error::NegativeReaction { index: 1, .. })
        ));
        assert!(CoefficientField::new(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn scale_boundary_n1() {
        let g = Grid1D::unit(1).unwrap();
        let op = assemble_1d_laplacian(&g);
        let s = op.scale_boundary_rows().unwrap();
        assert_eq!(s.matrix().get(0, 0), 4.0);
        assert_eq!(s.matrix().get(2, 2), 4.0);
        assert_eq!(s.boundary_rows(), BoundaryRows::Scaled);
        assert!(matches!(s.scale_boundary_rows(), Err(Error::AlreadyScaled)));
        let bare = SparseOperator::from_matrix(op.matrix().clone());
        assert!(matches!(bare.scale_boundary_rows(), Err(Error::MissingLayout)));
    }
}
