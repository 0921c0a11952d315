//! Element-by-element assembly of `L_h = M^{-1} S` with 3-point
//! Gauss-Lobatto quadrature. Shares nothing with the stencil code beyond the
//! grid; used as an oracle for it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::{CoefficientField, GridRef, Layout, Scheme, SparseOperator};

/// Reference nodes on [-1, 1]; they double as quadrature points.
const NODES: [f64; 3] = [-1.0, 0.0, 1.0];
/// Gauss-Lobatto weights on [-1, 1].
const WEIGHTS: [f64; 3] = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];

fn lagrange(m: usize, x: f64) -> f64 {
    (0..3)
        .filter(|&k| k != m)
        .map(|k| (x - NODES[k]) / (NODES[m] - NODES[k]))
        .product()
}

fn lagrange_deriv(m: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for skip in (0..3).filter(|&k| k != m) {
        let mut term = 1.0 / (NODES[m] - NODES[skip]);
        for k in (0..3).filter(|&k| k != m && k != skip) {
            term *= (x - NODES[k]) / (NODES[m] - NODES[k]);
        }
        total += term;
    }
    total
}

/// Basis values `phi[m][q]` and reference derivatives `dphi[m][q]` at the
/// quadrature points.
fn tables() -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let mut phi = [[0.0; 3]; 3];
    let mut dphi = [[0.0; 3]; 3];
    for m in 0..3 {
        for q in 0..3 {
            phi[m][q] = lagrange(m, NODES[q]);
            dphi[m][q] = lagrange_deriv(m, NODES[q]);
        }
    }
    (phi, dphi)
}

/// Assembles `M^{-1} S` for the bilinear form `∫ a ∇u·∇v + c u v` using
/// tensor 3-point Gauss-Lobatto quadrature, with identity boundary rows.
///
/// The lumped mass matrix is checked to be diagonal before it is inverted.
pub fn assemble_via_quadrature(grid: &GridRef, coeff: &CoefficientField) -> Result<SparseOperator> {
    let (phi, dphi) = tables();
    let (n, h, elements, dim): (usize, f64, Vec<Vec<usize>>, usize) = match grid {
        GridRef::OneD(g) => {
            let els = (0..g.elements()).map(|e| (0..3).map(|m| 2 * e + m).collect()).collect();
            (g.len(), g.h(), els, 1)
        }
        GridRef::TwoD(g) => {
            let (mx, my) = g.elements();
            let mut els = Vec::with_capacity(mx * my);
            for ey in 0..my {
                for ex in 0..mx {
                    let mut nodes = Vec::with_capacity(9);
                    for my_ in 0..3 {
                        for mx_ in 0..3 {
                            nodes.push(g.index(2 * ex + mx_, 2 * ey + my_));
                        }
                    }
                    els.push(nodes);
                }
            }
            (g.len(), g.h(), els, 2)
        }
    };
    coeff.check_len(n)?;
    coeff.validate()?;

    // element half-width is h; reference -> physical derivative factor 1/h
    let jac = h;
    let mut stiff: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut mass_diag = vec![0.0; n];

    if dim == 1 {
        for nodes in &elements {
            let mut local_mass = [[0.0; 3]; 3];
            for q in 0..3 {
                let w = WEIGHTS[q] * jac;
                let gq = nodes[q];
                let (aq, cq) = (coeff.a[gq], coeff.c[gq]);
                for t in 0..3 {
                    for s in 0..3 {
                        let grad = dphi[s][q] / h * dphi[t][q] / h;
                        let val = phi[s][q] * phi[t][q];
                        local_mass[t][s] += w * val;
                        let e = w * (aq * grad + cq * val);
                        if e != 0.0 {
                            *stiff[nodes[t]].entry(nodes[s]).or_insert(0.0) += e;
                        }
                    }
                }
            }
            accumulate_mass(nodes, &local_mass, &mut mass_diag, 3)?;
        }
    } else {
        for nodes in &elements {
            let mut local_mass = [[0.0; 9]; 9];
            for qy in 0..3 {
                for qx in 0..3 {
                    let w = WEIGHTS[qx] * WEIGHTS[qy] * jac * jac;
                    let gq = nodes[qy * 3 + qx];
                    let (aq, cq) = (coeff.a[gq], coeff.c[gq]);
                    for t in 0..9 {
                        let (tx, ty) = (t % 3, t / 3);
                        let tv = phi[tx][qx] * phi[ty][qy];
                        let tgx = dphi[tx][qx] / h * phi[ty][qy];
                        let tgy = phi[tx][qx] * dphi[ty][qy] / h;
                        for s in 0..9 {
                            let (sx, sy) = (s % 3, s / 3);
                            let sv = phi[sx][qx] * phi[sy][qy];
                            let sgx = dphi[sx][qx] / h * phi[sy][qy];
                            let sgy = phi[sx][qx] * dphi[sy][qy] / h;
                            let val = sv * tv;
                            local_mass[t][s] += w * val;
                            let e = w * (aq * (sgx * tgx + sgy * tgy) + cq * val);
                            if e != 0.0 {
                                *stiff[nodes[t]].entry(nodes[s]).or_insert(0.0) += e;
                            }
                        }
                    }
                }
            }
            accumulate_mass(nodes, &local_mass, &mut mass_diag, 9)?;
        }
    }

    let layout = Layout {
        grid: grid.clone(),
        scheme: Scheme::Variable,
        c: coeff.c.clone(),
    };
    let rows = (0..n)
        .map(|k| {
            if layout.is_boundary(k) {
                vec![(k, 1.0)]
            } else {
                let m = mass_diag[k];
                stiff[k].iter().map(|(&j, &v)| (j, v / m)).collect()
            }
        })
        .collect();
    Ok(SparseOperator::assembled(CsrMatrix::from_rows(n, rows), layout))
}

fn accumulate_mass<const N: usize>(
    nodes: &[usize],
    local: &[[f64; N]; N],
    diag: &mut [f64],
    count: usize,
) -> Result<()> {
    for t in 0..count {
        for s in 0..count {
            if s != t && local[t][s].abs() > 1e-14 * local[t][t].abs() {
                return Err(Error::InvalidArgument(format!(
                    "lumped mass matrix is not diagonal (local entry {t},{s} = {})",
                    local[t][s]
                )));
            }
        }
        diag[nodes[t]] += local[t][t];
    }
    Ok(())
}
