//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shifts).
//!
//! Derived from the EISPACK `tql2` procedure. Only the requested rows of the
//! eigenvector matrix are accumulated, which is all Gauss rules and
//! `⟨e_m| f(J) |e_0⟩` evaluations need.

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_VALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Tracked row indices.
    pub rows: Vec<usize>,
    /// `components[r][l]` is entry `rows[r]` of the `l`-th unit eigenvector.
    pub components: Vec<Vec<f64>>,
}

impl TridiagonalEigen {
    /// `diag` has length `n`, `off` length `n - 1`.
    pub fn compute(diag: &[f64], off: &[f64], rows: &[usize]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                n,
                off.len()
            )));
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::Range {
                what: "eigenvector row",
                requested: r,
                available: n,
            });
        }
        let mut d = diag.to_vec();
        let mut e = off.to_vec();
        e.push(0.0);
        let mut z: Vec<Vec<f64>> = rows
            .iter()
            .map(|&r| {
                let mut row = vec![0.0; n];
                row[r] = 1.0;
                row
            })
            .collect();
        ql_implicit(&mut d, &mut e, &mut z)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let values = order.iter().map(|&i| d[i]).collect();
        let components = z
            .into_iter()
            .map(|row| order.iter().map(|&i| row[i]).collect())
            .collect();
        Ok(Self {
            values,
            rows: rows.to_vec(),
            components,
        })
    }

    pub fn row(&self, r: usize) -> Option<&[f64]> {
        self.rows.iter().position(|&x| x == r).map(|i| self.components[i].as_slice())
    }
}

fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS_PER_VALUE {
                    return Err(Error::NoConvergence { iterations: sweeps });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
