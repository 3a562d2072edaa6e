//! Continuous-time quantum walk amplitudes.
//!
//! With H = A and the walker started at the origin, the amplitude of stratum
//! `m` is
//!
//! ```text
//! q_m(t) = ⟨φ_m| e^{-iAt} |φ_0⟩ = Σ_l w_l e^{-i x_l t} P_m(x_l) / √(ω_1⋯ω_m)
//! ```
//!
//! and every vertex of stratum `m` carries amplitude `q_m(t) / √|V_m|`.
//! [`DenseOracle`] computes the same quantities from a full eigendecomposition
//! of the adjacency matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{OddGraph, Stratification};
use crate::jacobi::{JacobiMode, JacobiSequence};
use crate::spectral::{orthonormal_values, SpectralMeasure};

pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

fn phase(x: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -x * t)
}

/// A spectral measure paired with its orthonormal polynomial values at
/// every atom, for repeated amplitude evaluation.
#[derive(Debug, Clone)]
pub struct SpectralWalk {
    measure: SpectralMeasure,
    /// `basis[l][m] = P_m(x_l) / √(ω_1⋯ω_m)`
    basis: Vec<Vec<f64>>,
}

impl SpectralWalk {
    pub fn new(measure: SpectralMeasure, jac: &JacobiSequence) -> Result<Self> {
        if measure.n == 0 || measure.n > jac.levels() {
            return Err(Error::InvalidArgument(format!(
                "measure truncated at {} levels does not fit a {}-level sequence",
                measure.n,
                jac.levels()
            )));
        }
        let basis = measure
            .atoms
            .iter()
            .map(|a| orthonormal_values(jac, a.x, measure.n - 1))
            .collect::<Result<_>>()?;
        Ok(Self { measure, basis })
    }

    pub fn levels(&self) -> usize {
        self.measure.n
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn amplitude(&self, m: usize, t: f64) -> Result<Complex64> {
        if m >= self.levels() {
            return Err(Error::Range {
                what: "stratum index",
                requested: m,
                available: self.levels(),
            });
        }
        Ok(self
            .measure
            .atoms
            .iter()
            .zip(&self.basis)
            .map(|(a, p)| phase(a.x, t) * (a.w * p[m]))
            .sum())
    }

    /// `q_0(t)..q_{n-1}(t)`.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.levels()];
        for (a, p) in self.measure.atoms.iter().zip(&self.basis) {
            let e = phase(a.x, t) * a.w;
            for (slot, pm) in out.iter_mut().zip(p) {
                *slot += e * pm;
            }
        }
        out
    }
}

pub fn amplitude(measure: &SpectralMeasure, jac: &JacobiSequence, m: usize, t: f64) -> Result<Complex64> {
    if m >= measure.n {
        return Err(Error::Range {
            what: "stratum index",
            requested: m,
            available: measure.n,
        });
    }
    let mut q = Complex64::default();
    for a in &measure.atoms {
        let p = orthonormal_values(jac, a.x, m)?;
        q += phase(a.x, t) * (a.w * p[m]);
    }
    Ok(q)
}

/// Amplitudes on a time grid. `amplitudes[i][m]` is `q_m(t_grid[i])`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeSeries {
    pub mode: JacobiMode,
    pub k: Option<usize>,
    pub t_grid: Vec<f64>,
    pub amplitudes: Vec<Vec<Complex64>>,
    /// `|V_m|`, when the walk lives on an actual graph.
    pub strata_sizes: Option<Vec<f64>>,
    /// Largest `|Σ_m |q_m|² - 1|` over the grid, summed over every level of
    /// the measure even when fewer strata are emitted.
    pub conservation_max_deviation: f64,
    pub conservation_ok: bool,
}

impl AmplitudeSeries {
    pub fn with_strata_sizes(mut self, sizes: Vec<f64>) -> Self {
        self.strata_sizes = Some(sizes);
        self
    }

    pub fn m_max(&self) -> usize {
        self.amplitudes.first().map_or(0, |a| a.len().saturating_sub(1))
    }
}

pub fn amplitude_series(
    measure: &SpectralMeasure,
    jac: &JacobiSequence,
    t_grid: &[f64],
    m_max: usize,
) -> Result<AmplitudeSeries> {
    let walk = SpectralWalk::new(measure.clone(), jac)?;
    series_from_walk(&walk, t_grid, m_max, CONSERVATION_TOLERANCE)
}

pub fn series_from_walk(walk: &SpectralWalk, t_grid: &[f64], m_max: usize, tolerance: f64) -> Result<AmplitudeSeries> {
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be finite and sorted".into()));
    }
    if m_max >= walk.levels() {
        return Err(Error::Range {
            what: "stratum index",
            requested: m_max,
            available: walk.levels(),
        });
    }
    let mut worst: f64 = 0.0;
    let amplitudes = t_grid
        .iter()
        .map(|&t| {
            let mut q = walk.amplitudes(t);
            let total: f64 = q.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.max((total - 1.0).abs());
            q.truncate(m_max + 1);
            q
        })
        .collect();
    Ok(AmplitudeSeries {
        mode: walk.measure.mode,
        k: walk.measure.k,
        t_grid: t_grid.to_vec(),
        amplitudes,
        strata_sizes: None,
        conservation_max_deviation: worst,
        conservation_ok: worst <= tolerance,
    })
}

/// Probability of finding the walker on one particular vertex of stratum `m`.
pub fn vertex_probability(series: &AmplitudeSeries, m: usize, t_index: usize) -> Result<f64> {
    let sizes = series
        .strata_sizes
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("series has no strata sizes".into()))?;
    let row = series.amplitudes.get(t_index).ok_or(Error::Range {
        what: "time index",
        requested: t_index,
        available: series.t_grid.len(),
    })?;
    let q = row.get(m).ok_or(Error::Range {
        what: "stratum index",
        requested: m,
        available: row.len(),
    })?;
    Ok(q.norm_sqr() / sizes[m])
}

/// `e^{-iAt}` on the full vertex space through one dense eigendecomposition.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    origin: usize,
    strata: Vec<Vec<usize>>,
    /// `origin_row[l] = v_l[origin]`
    origin_row: Vec<f64>,
    /// `projections[m][l] = ⟨φ_m | v_l⟩`
    projections: Vec<Vec<f64>>,
}

impl DenseOracle {
    pub fn new(graph: &OddGraph, strat: &Stratification) -> Result<Self> {
        let n = graph.vertex_count();
        if strat.level.len() != n {
            return Err(Error::InvalidArgument("stratification does not match graph".into()));
        }
        let mut adj = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            for &v in graph.neighbors(u) {
                adj[(u, v)] = 1.0;
            }
        }
        let eig = SymmetricEigen::try_new(adj, f64::EPSILON, 0)
            .ok_or(Error::NoConvergence { iterations: 0 })?;
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let vectors = eig.eigenvectors;
        let origin_row = (0..n).map(|l| vectors[(strat.origin, l)]).collect();
        let projections = strat
            .strata
            .iter()
            .map(|s| {
                let norm = 1.0 / (s.len() as f64).sqrt();
                (0..n)
                    .map(|l| s.iter().map(|&a| vectors[(a, l)]).sum::<f64>() * norm)
                    .collect()
            })
            .collect();
        Ok(Self {
            values,
            vectors,
            origin: strat.origin,
            strata: strat.strata.clone(),
            origin_row,
            projections,
        })
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Full state `e^{-iAt}|o⟩`.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let n = self.values.len();
        let coeff: Vec<Complex64> = (0..n)
            .map(|l| phase(self.values[l], t) * self.origin_row[l])
            .collect();
        (0..n)
            .map(|a| (0..n).map(|l| coeff[l] * self.vectors[(a, l)]).sum())
            .collect()
    }

    /// Stratum amplitudes `⟨φ_m| e^{-iAt} |o⟩` for every stratum.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let coeff: Vec<Complex64> = self
            .values
            .iter()
            .zip(&self.origin_row)
            .map(|(&x, &c)| phase(x, t) * c)
            .collect();
        self.projections
            .iter()
            .map(|proj| proj.iter().zip(&coeff).map(|(p, c)| c * p).sum())
            .collect()
    }

    pub fn strata(&self) -> &[Vec<usize>] {
        &self.strata
    }
}

pub fn direct_oracle(graph: &OddGraph, strat: &Stratification, t: f64) -> Result<Vec<Complex64>> {
    Ok(DenseOracle::new(graph, strat)?.amplitudes(t))
}

/// Evenly spaced grid with `steps` points from `start` to `end`.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps)
            .map(|i| start + (end - start) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}
