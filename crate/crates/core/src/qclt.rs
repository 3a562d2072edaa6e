//! The k → ∞ limit of the walk on O_k with time rescaled by `1/√k`.
//!
//! The rescaled Jacobi coefficients converge to `ω = 1, 1, 2, 2, 3, 3, ...`,
//! `α ≡ 0`, whose orthogonality measure is `|x| e^{-x²} dx`. The limit
//! amplitudes are available in closed form for `m ≤ 3` (via Dawson's
//! integral) and for any `m` from a Gauss rule generated by the limit
//! sequence itself.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::closed_form_intersection;
use crate::jacobi::{jacobi_from_intersection, jacobi_limit, JacobiMode, JacobiSequence};
use crate::spectral::{gauss_measure, stieltjes_cf, SpectralMeasure};
use crate::special::dawson;
use crate::tridiag::TridiagonalEigen;
use crate::walk::SpectralWalk;

/// Minimum Gauss levels for limit quadrature; enough for `|t| ≤ 10` to
/// far below double precision.
pub const DEFAULT_LIMIT_LEVELS: usize = 160;

/// Density of the limit measure.
pub fn limit_density(x: f64) -> f64 {
    x.abs() * (-x * x).exp()
}

/// The limit measure together with a Gauss rule built from its own Jacobi
/// sequence.
#[derive(Debug, Clone)]
pub struct LimitMeasure {
    /// Integration cut-off for independent quadrature checks; tail mass is `e^{-X²}`.
    pub truncation_radius: f64,
    pub jacobi: JacobiSequence,
    pub rule: SpectralMeasure,
}

impl LimitMeasure {
    pub fn new(levels: usize) -> Result<Self> {
        let jacobi = jacobi_limit(levels)?;
        let rule = gauss_measure(&jacobi, levels)?;
        Ok(Self {
            truncation_radius: 8.0,
            jacobi,
            rule,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        limit_density(x)
    }

    /// `∫ x^j dμ_∞` from the Gauss rule, exact for `j < 2 · levels`.
    pub fn moment(&self, j: i32) -> f64 {
        self.rule.atoms.iter().map(|a| a.w * a.x.powi(j)).sum()
    }
}

/// `q_0(t) = 1 - t D(t/2)`, equivalently `1 + (i√π t/2) erf(it/2) e^{-t²/4}`.
pub fn q0_limit(t: f64) -> Complex64 {
    Complex64::new(1.0 - t * dawson(t / 2.0), 0.0)
}

/// Closed forms for `m ≤ 3`, written with `√π erf(it/2) e^{-t²/4} = 2i D(t/2)`.
pub fn qm_limit_closed(m: usize, t: f64) -> Result<Complex64> {
    let d = dawson(t / 2.0);
    let t2 = t * t;
    Ok(match m {
        0 => q0_limit(t),
        1 => Complex64::new(0.0, (t2 - 2.0) * d / 2.0 - t / 2.0),
        2 => Complex64::new((t2 * t * d - t2 - 2.0 * t * d) / 4.0, 0.0),
        3 => {
            let inner = -2.0 * t2 * t2 * d + 2.0 * t2 * t + 8.0 * t2 * d - 4.0 * t + 8.0 * d;
            Complex64::new(0.0, inner / (16.0 * std::f64::consts::SQRT_2))
        }
        _ => {
            return Err(Error::Range {
                what: "closed-form stratum",
                requested: m,
                available: 4,
            })
        }
    })
}

/// `√(ω_1⋯ω_m)` for the limit sequence.
pub fn limit_norm(m: usize) -> f64 {
    (1..=m as i64).map(|i| ((i + 1) / 2) as f64).product::<f64>().sqrt()
}

/// Limit amplitudes for arbitrary `m` from a limit-sequence Gauss rule.
#[derive(Debug, Clone)]
pub struct LimitQuadrature {
    walk: SpectralWalk,
}

impl LimitQuadrature {
    pub fn new(levels: usize) -> Result<Self> {
        let lm = LimitMeasure::new(levels)?;
        Ok(Self {
            walk: SpectralWalk::new(lm.rule, &lm.jacobi)?,
        })
    }

    /// Rule sized for strata up to `m_max`.
    pub fn for_strata(m_max: usize) -> Result<Self> {
        Self::new((m_max + 40).max(DEFAULT_LIMIT_LEVELS))
    }

    pub fn levels(&self) -> usize {
        self.walk.levels()
    }

    pub fn amplitude(&self, m: usize, t: f64) -> Result<Complex64> {
        // keep a margin of levels so the rule stays accurate for P_m
        if m + 40 > self.levels() {
            return Err(Error::Range {
                what: "limit stratum (with 40-level margin)",
                requested: m,
                available: self.levels().saturating_sub(40),
            });
        }
        self.walk.amplitude(m, t)
    }

    pub fn amplitudes(&self, t: f64, m_max: usize) -> Result<Vec<Complex64>> {
        (0..=m_max).map(|m| self.amplitude(m, t)).collect()
    }
}

pub fn qm_limit_quadrature(m: usize, t: f64) -> Result<Complex64> {
    LimitQuadrature::for_strata(m)?.amplitude(m, t)
}

/// Limit amplitude: closed form where available, quadrature otherwise.
pub fn qm_limit(m: usize, t: f64) -> Result<Complex64> {
    if m <= 3 {
        qm_limit_closed(m, t)
    } else {
        qm_limit_quadrature(m, t)
    }
}

/// Stieltjes transform of the limit measure through its J-fraction.
pub fn stieltjes_limit(z: Complex64, depth: usize) -> Result<Complex64> {
    stieltjes_cf(&jacobi_limit(depth)?, z, depth)
}

/// `⟨φ_m| e^{-itA_k/√k} |φ_0⟩` from the `k × k` Jacobi matrix of O_k.
pub fn finite_rescaled_amplitude(k: usize, m: usize, t: f64, mode: JacobiMode) -> Result<Complex64> {
    let jac = jacobi_from_intersection(&closed_form_intersection(k)?, mode)?;
    if m >= jac.levels() {
        return Err(Error::Range {
            what: "stratum index",
            requested: m,
            available: jac.levels(),
        });
    }
    let scale = (k as f64).sqrt();
    let (diag, off) = jac.jacobi_matrix(jac.levels())?;
    let diag: Vec<f64> = diag.iter().map(|a| a / scale).collect();
    let off: Vec<f64> = off.iter().map(|b| b / scale).collect();
    let eig = TridiagonalEigen::compute(&diag, &off, &[0, m])?;
    let (first, row) = (&eig.components[0], &eig.components[1]);
    Ok(eig
        .values
        .iter()
        .zip(first.iter().zip(row))
        .map(|(&x, (v0, vm))| Complex64::from_polar(v0 * vm, -x * t))
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub m: usize,
    pub t: f64,
    pub finite: Complex64,
    pub limit: Complex64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub mode: JacobiMode,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Whether the gaps strictly decrease along the requested `k` order.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

pub fn convergence_experiment(k_list: &[usize], m: usize, t: f64, mode: JacobiMode) -> Result<ConvergenceTable> {
    if mode == JacobiMode::Limit {
        return Err(Error::InvalidArgument("convergence needs a finite mode".into()));
    }
    let min_k = 3.max(m + 1);
    if let Some(&k) = k_list.iter().find(|&&k| k < min_k) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} is below the minimum {min_k} for stratum {m}"
        )));
    }
    let limit = qm_limit(m, t)?;
    let rows = k_list
        .iter()
        .map(|&k| {
            let finite = finite_rescaled_amplitude(k, m, t, mode)?;
            Ok(ConvergenceRow {
                k,
                m,
                t,
                finite,
                limit,
                gap: (finite - limit).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ConvergenceTable { mode, rows };
    if !table.strictly_decreasing() {
        log::warn!("convergence gaps are not strictly decreasing over k = {k_list:?}");
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q0_at_zero_and_small_t() {
        assert_eq!(q0_limit(0.0), Complex64::new(1.0, 0.0));
        let t = 1e-3;
        assert!((q0_limit(t).re - (1.0 - 5e-7)).abs() < 1e-12);
        assert!(q0_limit(50.0).norm() < 1e-2);
        for t in [0.5, 3.0, 9.0, 40.0] {
            assert!(q0_limit(t).norm() <= 1.0);
            assert_eq!(q0_limit(t).im, 0.0);
        }
    }

    #[test]
    fn closed_forms_vanish_at_zero() {
        for m in 1..=3 {
            assert!(qm_limit_closed(m, 0.0).unwrap().norm() < 1e-15);
        }
        assert!(qm_limit_closed(4, 1.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let quad = LimitQuadrature::for_strata(3).unwrap();
        for i in 0..=40 {
            let t = 0.25 * i as f64;
            for m in 0..=3 {
                let a = quad.amplitude(m, t).unwrap();
                let b = qm_limit_closed(m, t).unwrap();
                assert!((a - b).norm() < 1e-10, "m = {m}, t = {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn quadrature_edge_cases() {
        assert!(qm_limit_quadrature(5, 0.0).unwrap().norm() < 1e-14);
        let quad = LimitQuadrature::new(100).unwrap();
        assert!(quad.amplitude(61, 1.0).is_err());
        let total: f64 = quad
            .amplitudes(1.0, 60)
            .unwrap()
            .iter()
            .map(|q| q.norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn limit_moments_are_factorials() {
        let lm = LimitMeasure::new(40).unwrap();
        let mut fact = 1.0;
        for j in 0..=6 {
            if j > 0 {
                fact *= j as f64;
            }
            assert!((lm.moment(2 * j) - fact).abs() < 1e-10 * fact);
            assert!(lm.moment(2 * j + 1).abs() < 1e-10);
        }
        assert_eq!(lm.density(-1.0), lm.density(1.0));
    }

    #[test]
    fn norm_prefactors() {
        fn fact(n: usize) -> f64 {
            (1..=n).map(|i| i as f64).product()
        }
        for m in 0..12 {
            let expected = if m % 2 == 0 {
                fact(m / 2)
            } else {
                (fact((m - 1) / 2) * fact(m.div_ceil(2))).sqrt()
            };
            assert!((limit_norm(m) - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn derivative_identity() {
        let h = 1e-5;
        for t in [0.3, 1.0, 2.2, 6.0] {
            let d = (q0_limit(t + h) - q0_limit(t - h)) / (2.0 * h);
            let lhs = Complex64::i() * d;
            assert!((lhs - qm_limit_closed(1, t).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn stieltjes_limit_behaviour() {
        let z = Complex64::new(1.0, 1.0);
        let g = stieltjes_limit(z, 300).unwrap();
        assert!((g + stieltjes_limit(-z, 300).unwrap()).norm() < 1e-14);
        let big = Complex64::new(0.0, 1e6);
        assert!((big * stieltjes_limit(big, 300).unwrap() - 1.0).norm() < 1e-5);
    }

    #[test]
    fn convergence_gaps() {
        let table = convergence_experiment(&[4, 8, 16, 32, 64], 0, 1.0, JacobiMode::Exact).unwrap();
        assert!(table.strictly_decreasing());
        assert!(table.rows.last().unwrap().gap < 1e-2);
        let zero = convergence_experiment(&[4, 8, 16], 0, 0.0, JacobiMode::Exact).unwrap();
        assert!(zero.rows.iter().all(|r| r.gap < 1e-14));
        let m1 = convergence_experiment(&[8, 64], 1, 1.0, JacobiMode::Paper).unwrap();
        assert!(m1.rows[1].gap < m1.rows[0].gap);
        assert!(convergence_experiment(&[2], 0, 1.0, JacobiMode::Exact).is_err());
        assert!(convergence_experiment(&[4], 0, 1.0, JacobiMode::Limit).is_err());
    }

    #[test]
    fn large_k_is_cheap() {
        let q = finite_rescaled_amplitude(1000, 2, 1.0, JacobiMode::Exact).unwrap();
        assert!((q - qm_limit_closed(2, 1.0).unwrap()).norm() < 1e-3);
    }
}
