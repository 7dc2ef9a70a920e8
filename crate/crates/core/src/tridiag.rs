//! Symmetric tridiagonal eigenvalues with one tracked row of the eigenvector
//! matrix.
//!
//! The single-excitation Hamiltonian is a path graph with one pendant vertex
//! (the atom) hanging off the central site. Ordering the basis as
//! `(-N, .., -1, 0, e, 1, .., N)` makes it tridiagonal except for a single
//! element two places off the diagonal. [`chase_bulge`] removes that element
//! with an O(n) sequence of Givens rotations, and [`eigen_projections`] runs
//! implicit QL while carrying only the row of the eigenvector matrix that
//! belongs to the atom. Total cost is O(n^2) time and O(n) memory, against
//! O(n^3) / O(n^2) for a dense solve.

use crate::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Real symmetric tridiagonal matrix. `off[i]` couples `diag[i]` and
/// `diag[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                actual: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// Reduces a symmetric matrix that is tridiagonal apart from the pair
/// `A[k][k+2] = A[k+2][k] = bulge` to tridiagonal form, in place.
///
/// Each rotation acts on coordinates `(i+1, i+2)`; `tracked` is a vector
/// expressed in the current basis and is carried along, so on return it holds
/// its components in the final basis.
pub fn chase_bulge(t: &mut SymTridiagonal, k: usize, bulge: f64, tracked: &mut [f64]) {
    let n = t.len();
    debug_assert!(k + 2 < n);
    debug_assert_eq!(tracked.len(), n);
    let mut bulge = bulge;
    let mut i = k;
    while i + 2 < n && bulge != 0.0 {
        let a = t.off[i];
        let r = a.hypot(bulge);
        let (c, s) = (a / r, bulge / r);

        let (d1, d2, o) = (t.diag[i + 1], t.diag[i + 2], t.off[i + 1]);
        let cs = c * s;
        t.off[i] = r;
        t.diag[i + 1] = c * c * d1 + 2.0 * cs * o + s * s * d2;
        t.diag[i + 2] = s * s * d1 - 2.0 * cs * o + c * c * d2;
        t.off[i + 1] = cs * (d2 - d1) + (c * c - s * s) * o;

        if i + 3 < n {
            let next = t.off[i + 2];
            t.off[i + 2] = c * next;
            bulge = s * next;
        } else {
            bulge = 0.0;
        }

        let (x1, x2) = (tracked[i + 1], tracked[i + 2]);
        tracked[i + 1] = c * x1 + s * x2;
        tracked[i + 2] = -s * x1 + c * x2;
        i += 1;
    }
}

/// Eigenvalues of `t` (ascending) together with `row · v_m` for every
/// eigenvector `v_m`, where `row` is given in the basis of `t`.
///
/// With `row` a unit vector this is the component of each eigenvector on that
/// basis state; with `row` the tracked vector from [`chase_bulge`] it is the
/// overlap of each eigenvector with the original basis state.
pub fn eigen_projections(t: &SymTridiagonal, row: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = t.len();
    if row.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    let mut d = t.diag.clone();
    let mut e = t.off.clone();
    e.push(0.0);
    let mut z = row.to_vec();
    implicit_ql(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok((
        order.iter().map(|&i| d[i]).collect(),
        order.iter().map(|&i| z[i]).collect(),
    ))
}

/// Implicit QL with Wilkinson shifts; `z` is one row of the accumulated
/// rotation product.
fn implicit_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence(format!(
                    "QL made no progress on eigenvalue {l} after {MAX_QL_ITERATIONS} sweeps"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
