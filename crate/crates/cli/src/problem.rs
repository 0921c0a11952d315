//! Parsing of mesh and coefficient flags and construction of the operator.

use std::path::PathBuf;

use monotone_q2::constraints::{bounds_from_samples, CellBounds, Region};
use monotone_q2::experiments::{
    random_coefficient, random_field, smooth_bounds, smooth_bounds_1d, smooth_coefficient, smooth_coefficient_1d,
    DOMAIN_WIDTH,
};
use monotone_q2::{
    assemble_1d_variable, assemble_2d_variable, CoefficientField, Error, Grid1D, Grid2D, Result, SparseOperator,
};

/// Element counts: `M` in 1D, `M x N` in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    pub mx: usize,
    pub my: usize,
}

impl Mesh {
    pub fn parse(s: &str, dim: u8) -> Result<Mesh> {
        let bad = || Error::InvalidArgument(format!("bad mesh {s:?}: expected element counts like 4 or 2x4"));
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let mesh = match (dim, &nums[..]) {
            (1, &[m]) => Mesh { mx: m, my: 1 },
            (2, &[m]) => Mesh { mx: m, my: m },
            (2, &[m, n]) => Mesh { mx: m, my: n },
            _ => return Err(bad()),
        };
        if mesh.mx == 0 || mesh.my == 0 {
            return Err(bad());
        }
        Ok(mesh)
    }

    pub fn label(&self, dim: u8) -> String {
        if dim == 1 {
            self.mx.to_string()
        } else {
            format!("{}x{}", self.mx, self.my)
        }
    }
}

/// Parses `M x N` for the table and sweep commands.
pub fn parse_mesh_2d(s: &str) -> Result<(usize, usize)> {
    let m = Mesh::parse(s, 2)?;
    Ok((m.mx, m.my))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefSpec {
    Const { a: f64, c: f64 },
    Smooth { d: f64 },
    Random { d: f64, seed: u64 },
    File(PathBuf),
}

impl CoefSpec {
    pub fn parse(s: &str) -> Result<CoefSpec> {
        let bad = |why: &str| Error::InvalidArgument(format!("bad coefficient {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        let nums = || -> Result<Vec<f64>> {
            rest.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad("not a number")))
                .collect()
        };
        match kind {
            "const" => match nums()?[..] {
                [a, c] => Ok(CoefSpec::Const { a, c }),
                [a] => Ok(CoefSpec::Const { a, c: 0.0 }),
                _ => Err(bad("expected const:a,c")),
            },
            "smooth" => match nums()?[..] {
                [d] => Ok(CoefSpec::Smooth { d }),
                _ => Err(bad("expected smooth:d")),
            },
            "random" => {
                let (d, seed) = rest.split_once(',').ok_or_else(|| bad("expected random:d,seed"))?;
                let d = d.trim().parse::<f64>().map_err(|_| bad("d is not a number"))?;
                let seed = seed.trim().parse::<u64>().map_err(|_| bad("seed is not an integer"))?;
                Ok(CoefSpec::Random { d, seed })
            }
            "file" => Ok(CoefSpec::File(PathBuf::from(rest))),
            _ => Err(bad("kind must be const, smooth, random or file")),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CoefSpec::Const { a, c } => format!("const a={a} c={c}"),
            CoefSpec::Smooth { d } => format!("smooth d={d} (a = 1 + d cos.., c = 10)"),
            CoefSpec::Random { d, seed } => format!("random a~U({d},{}) c=0 seed={seed}", d + 1.0),
            CoefSpec::File(p) => format!("file {}", p.display()),
        }
    }
}

pub enum GridKind {
    OneD(Grid1D),
    TwoD(Grid2D),
}

pub struct Problem {
    pub grid: GridKind,
    pub coef: CoefSpec,
    pub coeff: CoefficientField,
    pub op: SparseOperator,
}

fn read_coefficients(path: &PathBuf, len: usize) -> Result<CoefficientField> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let field: CoefficientField = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if field.len() != len {
        return Err(Error::SampleCount {
            expected: len,
            got: field.len(),
        });
    }
    CoefficientField::new(field.a, field.c)
}

impl Problem {
    pub fn build(dim: u8, mesh: Mesh, coef: CoefSpec, scale_boundary: bool) -> Result<Problem> {
        let (grid, coeff) = match dim {
            1 => {
                let g = Grid1D::new(2 * mesh.mx - 1, 0.0, DOMAIN_WIDTH)?;
                let coeff = match &coef {
                    CoefSpec::Const { a, c } => CoefficientField::constant(g.len(), *a, *c),
                    CoefSpec::Smooth { d } => smooth_coefficient_1d(&g, *d),
                    CoefSpec::Random { d, seed } => random_field(g.len(), *d, *seed),
                    CoefSpec::File(p) => read_coefficients(p, g.len())?,
                };
                (GridKind::OneD(g), coeff)
            }
            2 => {
                let g = Grid2D::from_elements(mesh.mx, mesh.my, DOMAIN_WIDTH)?;
                let coeff = match &coef {
                    CoefSpec::Const { a, c } => CoefficientField::constant(g.len(), *a, *c),
                    CoefSpec::Smooth { d } => smooth_coefficient(&g, *d),
                    CoefSpec::Random { d, seed } => random_coefficient(&g, *d, *seed),
                    CoefSpec::File(p) => read_coefficients(p, g.len())?,
                };
                (GridKind::TwoD(g), coeff)
            }
            _ => return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}"))),
        };
        coeff.validate()?;
        let op = match &grid {
            GridKind::OneD(g) => assemble_1d_variable(g, &coeff)?,
            GridKind::TwoD(g) => assemble_2d_variable(g, &coeff)?,
        };
        let op = if scale_boundary { op.scale_boundary_rows()? } else { op };
        Ok(Problem { grid, coef, coeff, op })
    }

    /// Coefficient bounds per region: analytic for the closed-form
    /// families, sample extremes (no derivatives) otherwise.
    pub fn bounds(&self) -> Box<dyn Fn(&Region) -> CellBounds + '_> {
        match (&self.coef, &self.grid) {
            (CoefSpec::Const { a, .. }, _) => {
                let a = *a;
                Box::new(move |_: &Region| CellBounds::constant(a))
            }
            (CoefSpec::Smooth { d }, GridKind::OneD(_)) => Box::new(smooth_bounds_1d(*d)),
            (CoefSpec::Smooth { d }, GridKind::TwoD(_)) => Box::new(smooth_bounds(*d)),
            _ => Box::new(bounds_from_samples(&self.coeff)),
        }
    }
}
