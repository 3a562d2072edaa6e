//! Orthogonal polynomials, Stieltjes transforms and Gauss-quadrature
//! spectral measures of a Jacobi sequence.
//!
//! The monic polynomials satisfy
//!
//! ```text
//! P_0 = 1,  P_1 = x - α_1,  x P_n = P_{n+1} + α_{n+1} P_n + ω_n P_{n-1}
//! ```
//!
//! and the associated family `Q^(1)` is the same recurrence shifted by one
//! level. The spectral measure of the `n`-level truncation is atomic, with
//! atoms at the zeros of `P_n` and weights equal to the residues of
//! `Q^(1)_{n-1} / P_n`. Atoms are computed from the Jacobi matrix
//! (Golub–Welsch) and the residue formula is kept as a cross-check.

use log::warn;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{JacobiMode, JacobiSequence};
use crate::tridiag::TridiagonalEigen;

/// Default agreement required between the two weight formulas.
pub const WEIGHT_TOLERANCE: f64 = 1e-10;

/// Relative size of the final continued-fraction denominator treated as a pole.
const POLE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolynomialFamily {
    P,
    Q1,
}

/// Exact monomial coefficients of `P_0..P_n` (or `Q^(1)_0..Q^(1)_n`),
/// lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialSequence {
    pub family: PolynomialFamily,
    pub coeffs: Vec<Vec<BigInt>>,
}

impl PolynomialSequence {
    pub fn degree(&self, n: usize) -> usize {
        self.coeffs[n].len() - 1
    }

    pub fn coefficients(&self, n: usize) -> &[BigInt] {
        &self.coeffs[n]
    }

    /// Coefficients as `i64`, when they fit.
    pub fn coefficients_i64(&self, n: usize) -> Option<Vec<i64>> {
        self.coeffs[n].iter().map(ToPrimitive::to_i64).collect()
    }

    /// Horner evaluation on the monomial form.
    pub fn eval(&self, n: usize, z: Complex64) -> Complex64 {
        self.coeffs[n]
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

pub fn poly_recurrence(jac: &JacobiSequence, n: usize, family: PolynomialFamily) -> Result<PolynomialSequence> {
    // Q^(1) uses α and ω shifted by one level
    let shift = match family {
        PolynomialFamily::P => 0,
        PolynomialFamily::Q1 => 1,
    };
    let available = jac.levels() - shift;
    if n > available {
        return Err(Error::Range {
            what: "polynomial degree",
            requested: n,
            available,
        });
    }
    let alpha = |j: usize| BigInt::from(jac.alpha_at(j + shift));
    let omega = |j: usize| BigInt::from(jac.omega_at(j + shift));

    let mut coeffs: Vec<Vec<BigInt>> = vec![vec![BigInt::from(1)]];
    if n >= 1 {
        coeffs.push(vec![-alpha(1), BigInt::from(1)]);
    }
    for j in 1..n {
        // P_{j+1} = (x - α_{j+1}) P_j - ω_j P_{j-1}
        let pj = &coeffs[j];
        let pm = &coeffs[j - 1];
        let mut next = vec![BigInt::zero(); j + 2];
        for (i, c) in pj.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * alpha(j + 1);
        }
        for (i, c) in pm.iter().enumerate() {
            next[i] -= c * omega(j);
        }
        coeffs.push(next);
    }
    Ok(PolynomialSequence { family, coeffs })
}

/// Orthonormal values `P_m(x) / √(ω_1⋯ω_m)` for `m = 0..=m_max`.
pub fn orthonormal_values(jac: &JacobiSequence, x: f64, m_max: usize) -> Result<Vec<f64>> {
    if m_max >= jac.levels() {
        return Err(Error::Range {
            what: "stratum index",
            requested: m_max,
            available: jac.levels(),
        });
    }
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(1.0);
    if m_max >= 1 {
        let s1 = (jac.omega_at(1) as f64).sqrt();
        out.push((x - jac.alpha_at(1) as f64) / s1);
    }
    for j in 1..m_max {
        let sj = (jac.omega_at(j) as f64).sqrt();
        let sj1 = (jac.omega_at(j + 1) as f64).sqrt();
        let next = ((x - jac.alpha_at(j + 1) as f64) * out[j] - sj * out[j - 1]) / sj1;
        out.push(next);
    }
    Ok(out)
}

fn check_depth(jac: &JacobiSequence, depth: usize) -> Result<()> {
    if depth == 0 || depth > jac.levels() {
        return Err(Error::Range {
            what: "continued-fraction depth",
            requested: depth,
            available: jac.levels(),
        });
    }
    Ok(())
}

fn nearest_atom(jac: &JacobiSequence, depth: usize, z: Complex64) -> Option<f64> {
    let measure = gauss_measure(jac, depth).ok()?;
    measure
        .atoms
        .iter()
        .map(|a| a.x)
        .min_by(|a, b| (a - z.re).abs().total_cmp(&(b - z.re).abs()))
}

/// Stieltjes transform from the J-fraction truncated at `depth` levels,
/// evaluated from the bottom up.
pub fn stieltjes_cf(jac: &JacobiSequence, z: Complex64, depth: usize) -> Result<Complex64> {
    check_depth(jac, depth)?;
    let mut t = z - jac.alpha_at(depth) as f64;
    for j in (1..depth).rev() {
        t = z - jac.alpha_at(j) as f64 - jac.omega_at(j) as f64 / t;
    }
    if !t.is_finite() || t.norm() <= POLE_EPS * (1.0 + z.norm()) {
        return Err(Error::PoleProximity {
            z,
            nearest_atom: nearest_atom(jac, depth, z),
        });
    }
    Ok(t.inv())
}

/// Recurrence values `(P_n(z), Q^(1)_{n-1}(z))` without forming monomials.
fn p_and_q(jac: &JacobiSequence, z: Complex64, n: usize) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut p_prev = one;
    let mut p = z - jac.alpha_at(1) as f64;
    for j in 1..n {
        let next = (z - jac.alpha_at(j + 1) as f64) * p - jac.omega_at(j) as f64 * p_prev;
        p_prev = p;
        p = next;
    }
    let q = if n == 1 {
        one
    } else {
        let mut q_prev = one;
        let mut q = z - jac.alpha_at(2) as f64;
        for j in 1..n - 1 {
            let next = (z - jac.alpha_at(j + 2) as f64) * q - jac.omega_at(j + 1) as f64 * q_prev;
            q_prev = q;
            q = next;
        }
        q
    };
    (p, q)
}

/// Rational form `Q^(1)_{n-1}(z) / P_n(z)`.
pub fn stieltjes_rational(jac: &JacobiSequence, z: Complex64, n: usize) -> Result<Complex64> {
    check_depth(jac, n)?;
    let (p, q) = p_and_q(jac, z, n);
    if p.norm() == 0.0 {
        return Err(Error::PoleProximity {
            z,
            nearest_atom: nearest_atom(jac, n, z),
        });
    }
    Ok(q / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// Finite atomic measure `Σ_l w_l δ(x - x_l)` with ascending locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub mode: JacobiMode,
    pub k: Option<usize>,
    pub n: usize,
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// `Σ_l w_l / (z - x_l)`.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().map(|a| a.w / (z - a.x)).sum()
    }
}

// Scaled evaluation keeping a shared binary exponent so deep recurrences
// (large ω products) stay finite.
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_EXP: i32 = 498;

fn rescale(values: &mut [f64], exponent: &mut i32) {
    if values.iter().any(|v| v.abs() > RESCALE_ABOVE) {
        let f = 2f64.powi(-RESCALE_EXP);
        values.iter_mut().for_each(|v| *v *= f);
        *exponent += RESCALE_EXP;
    }
}

/// Residue of `Q^(1)_{n-1} / P_n` at a simple zero `x` of `P_n`.
fn residue_weight(jac: &JacobiSequence, n: usize, x: f64) -> f64 {
    // [P_{j-1}, P_j, P'_{j-1}, P'_j]
    let mut s = [1.0, x - jac.alpha_at(1) as f64, 0.0, 1.0];
    let mut ep = 0;
    for j in 1..n {
        let a = x - jac.alpha_at(j + 1) as f64;
        let w = jac.omega_at(j) as f64;
        let p = a * s[1] - w * s[0];
        let dp = s[1] + a * s[3] - w * s[2];
        s = [s[1], p, s[3], dp];
        rescale(&mut s, &mut ep);
    }
    let mut q = [1.0, 1.0];
    let mut eq = 0;
    if n >= 2 {
        q = [1.0, x - jac.alpha_at(2) as f64];
        for j in 1..n - 1 {
            let next = (x - jac.alpha_at(j + 2) as f64) * q[1] - jac.omega_at(j + 1) as f64 * q[0];
            q = [q[1], next];
            rescale(&mut q, &mut eq);
        }
    }
    let mut ratio = q[1] / s[3];
    let mut diff = eq - ep;
    while diff != 0 {
        let step = diff.clamp(-RESCALE_EXP, RESCALE_EXP);
        ratio *= 2f64.powi(step);
        diff -= step;
    }
    ratio
}

pub fn gauss_measure(jac: &JacobiSequence, n: usize) -> Result<SpectralMeasure> {
    gauss_measure_with_tolerance(jac, n, WEIGHT_TOLERANCE)
}

/// Atoms are the eigenvalues of the `n × n` Jacobi matrix; weights are the
/// squared first eigenvector components, cross-checked against the residue
/// formula to `tolerance`.
pub fn gauss_measure_with_tolerance(jac: &JacobiSequence, n: usize, tolerance: f64) -> Result<SpectralMeasure> {
    let (diag, off) = jac.jacobi_matrix(n)?;
    let eig = TridiagonalEigen::compute(&diag, &off, &[0])?;
    let mut atoms = Vec::with_capacity(n);
    for (l, (&x, &v0)) in eig.values.iter().zip(&eig.components[0]).enumerate() {
        let w = v0 * v0;
        let residue = residue_weight(jac, n, x);
        if !((w - residue).abs() <= tolerance) {
            return Err(Error::WeightMismatch {
                index: l,
                eigen: w,
                residue,
            });
        }
        if w <= 0.0 {
            warn!("pruning non-positive Gauss weight {w:e} at x = {x}");
            continue;
        }
        atoms.push(Atom { x, w });
    }
    if atoms.windows(2).any(|p| p[1].x <= p[0].x) {
        return Err(Error::InvariantViolation("Gauss nodes are not strictly increasing".into()));
    }
    Ok(SpectralMeasure {
        mode: jac.mode,
        k: jac.k,
        n,
        atoms,
    })
}

/// `∫ x^m dμ` for `m = 0..=m_max`.
pub fn moments(measure: &SpectralMeasure, m_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; m_max + 1];
    for a in &measure.atoms {
        let mut p = a.w;
        for slot in out.iter_mut() {
            *slot += p;
            p *= a.x;
        }
    }
    out
}
