//! Uniform 1D / 2D grids and the Q2 point classification.
//!
//! Grid points include the boundary. A 1D grid with `n` interior points has
//! `n + 2` points `x_0 .. x_{n+1}`; `n` must be odd so that the points group
//! into `(n + 1) / 2` quadratic elements `[x_{2k}, x_{2k+2}]`.
//!
//! 2D points are linearized row-major with `j` outer and `i` inner, boundary
//! included: `index = j * (nx + 2) + i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role of a grid point in the Q2 element structure.
///
/// In 2D the suffix of the edge variants names the axis along which the wide
/// (cell-end) stencil acts:
/// * `EdgeCenterX`: `i` even, `j` odd. Center of an edge parallel to the
///   y-axis; wide stencil in x, narrow stencil in y.
/// * `EdgeCenterY`: `i` odd, `j` even. Center of an edge parallel to the
///   x-axis; narrow stencil in x, wide stencil in y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    Boundary,
    CellCenter,
    /// 1D only: interior end point shared by two elements.
    CellEnd,
    EdgeCenterX,
    EdgeCenterY,
    Knot,
}

impl PointClass {
    pub fn is_interior(self) -> bool {
        self != PointClass::Boundary
    }
}

/// Stencil type along one axis at an interior point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Three-point stencil through an element midpoint (odd index).
    Narrow,
    /// Five-point stencil through an element end (even index).
    Wide,
}

fn axis_kind(i: usize) -> AxisKind {
    if i % 2 == 1 {
        AxisKind::Narrow
    } else {
        AxisKind::Wide
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    lo: f64,
    hi: f64,
    h: f64,
}

impl Grid1D {
    pub fn new(n: usize, lo: f64, hi: f64) -> Result<Self> {
        check_count(n)?;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateInterval { lo, hi });
        }
        Ok(Grid1D {
            n,
            lo,
            hi,
            h: (hi - lo) / (n + 1) as f64,
        })
    }

    /// Grid on `[0, 1]`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, 0.0, 1.0)
    }

    /// Interior point count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of quadratic elements.
    pub fn elements(&self) -> usize {
        self.n.div_ceil(2)
    }

    /// Total point count, boundary included.
    pub fn len(&self) -> usize {
        self.n + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn inv_h2(&self) -> f64 {
        1.0 / (self.h * self.h)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.h
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn classify(&self, i: usize) -> Result<PointClass> {
        if i > self.n + 1 {
            return Err(Error::IndexOutOfRange {
                i,
                j: 0,
                nx: self.n,
                ny: 0,
            });
        }
        Ok(self.class_of(i))
    }

    pub(crate) fn class_of(&self, i: usize) -> PointClass {
        if i == 0 || i == self.n + 1 {
            PointClass::Boundary
        } else if i % 2 == 1 {
            PointClass::CellCenter
        } else {
            PointClass::CellEnd
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i == 0 || i == self.n + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    x: (f64, f64),
    y: (f64, f64),
    h: f64,
}

impl Grid2D {
    /// Builds a grid over `[x.0, x.1] x [y.0, y.1]`. Both axes must share the
    /// same mesh width to within `1e-12` relative.
    pub fn new(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        check_count(nx)?;
        check_count(ny)?;
        for (lo, hi) in [x, y] {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateInterval { lo, hi });
            }
        }
        let hx = (x.1 - x.0) / (nx + 1) as f64;
        let hy = (y.1 - y.0) / (ny + 1) as f64;
        if (hx - hy).abs() > 1e-12 * hx.max(hy) {
            return Err(Error::MeshWidthMismatch { hx, hy });
        }
        Ok(Grid2D { nx, ny, x, y, h: hx })
    }

    /// Grid from an element mesh `mx x my` over `[0, mx*w] x [0, my*w]`
    /// scaled so the x extent is `lx`.
    pub fn from_elements(mx: usize, my: usize, lx: f64) -> Result<Self> {
        if mx == 0 || my == 0 {
            return Err(Error::EmptyGrid);
        }
        let ly = lx * my as f64 / mx as f64;
        Self::new(2 * mx - 1, 2 * my - 1, (0.0, lx), (0.0, ly))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Points per row, boundary included.
    pub fn row_len(&self) -> usize {
        self.nx + 2
    }

    pub fn len(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn inv_h2(&self) -> f64 {
        1.0 / (self.h * self.h)
    }

    pub fn elements(&self) -> (usize, usize) {
        (self.nx.div_ceil(2), self.ny.div_ceil(2))
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx + 1 {
            self.x.1
        } else {
            self.x.0 + i as f64 * self.h
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny + 1 {
            self.y.1
        } else {
            self.y.0 + j as f64 * self.h
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 2) + i
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % (self.nx + 2), index / (self.nx + 2))
    }

    pub fn classify(&self, i: usize, j: usize) -> Result<PointClass> {
        if i > self.nx + 1 || j > self.ny + 1 {
            return Err(Error::IndexOutOfRange {
                i,
                j,
                nx: self.nx,
                ny: self.ny,
            });
        }
        Ok(self.class_of(i, j))
    }

    pub(crate) fn class_of(&self, i: usize, j: usize) -> PointClass {
        if self.is_boundary(i, j) {
            return PointClass::Boundary;
        }
        match (i % 2 == 1, j % 2 == 1) {
            (true, true) => PointClass::CellCenter,
            (true, false) => PointClass::EdgeCenterY,
            (false, true) => PointClass::EdgeCenterX,
            (false, false) => PointClass::Knot,
        }
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx + 1 || j == self.ny + 1
    }

    /// Stencil types along x and y at an interior point.
    pub(crate) fn axis_kinds(&self, i: usize, j: usize) -> (AxisKind, AxisKind) {
        (axis_kind(i), axis_kind(j))
    }
}

pub(crate) fn axis_kind_1d(i: usize) -> AxisKind {
    axis_kind(i)
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyGrid)
    } else if n.is_multiple_of(2) {
        Err(Error::EvenCount(n))
    } else {
        Ok(())
    }
}
