//! Szegő–Jacobi sequences and the quantum decomposition A = A⁺ + A⁻ + A⁰.
//!
//! A [`JacobiSequence`] with `L` levels carries `ω_1..ω_{L-1}` (squared
//! off-diagonal) and `α_1..α_L` (diagonal) of the `L × L` Jacobi matrix.
//! Every mode in this crate produces integer coefficients, so they are kept
//! exactly as `i64` and converted to `f64` only at numerical boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{IntersectionNumbers, OddGraph, Stratification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobiMode {
    /// Published closed forms: `α ≡ 0`.
    Paper,
    /// True restriction of the adjacency matrix, `α_{i+1} = a_i`.
    Exact,
    /// The k → ∞ sequence `ω = 1, 1, 2, 2, 3, 3, ...`.
    Limit,
}

impl JacobiMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JacobiMode::Paper => "paper",
            JacobiMode::Exact => "exact",
            JacobiMode::Limit => "limit",
        }
    }
}

impl std::fmt::Display for JacobiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for JacobiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(JacobiMode::Paper),
            "exact" => Ok(JacobiMode::Exact),
            "limit" => Ok(JacobiMode::Limit),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiSequence {
    pub mode: JacobiMode,
    pub k: Option<usize>,
    pub omega: Vec<i64>,
    pub alpha: Vec<i64>,
}

impl JacobiSequence {
    /// Builds a sequence after checking lengths and positivity of `ω`.
    pub fn new(mode: JacobiMode, k: Option<usize>, omega: Vec<i64>, alpha: Vec<i64>) -> Result<Self> {
        if alpha.is_empty() || omega.len() + 1 != alpha.len() {
            return Err(Error::InvalidArgument(format!(
                "need len(alpha) = len(omega) + 1 >= 1, got {} and {}",
                alpha.len(),
                omega.len()
            )));
        }
        if let Some(i) = omega.iter().position(|&w| w <= 0) {
            return Err(Error::InvalidArgument(format!(
                "omega_{} = {} is not positive",
                i + 1,
                omega[i]
            )));
        }
        Ok(Self {
            mode,
            k,
            omega,
            alpha,
        })
    }

    /// Number of strata represented (size of the Jacobi matrix).
    pub fn levels(&self) -> usize {
        self.alpha.len()
    }

    /// `ω_i`, 1-based.
    pub fn omega_at(&self, i: usize) -> i64 {
        self.omega[i - 1]
    }

    /// `α_i`, 1-based.
    pub fn alpha_at(&self, i: usize) -> i64 {
        self.alpha[i - 1]
    }

    /// Diagonal and off-diagonal of the leading `n × n` Jacobi matrix.
    pub fn jacobi_matrix(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if n == 0 || n > self.levels() {
            return Err(Error::Range {
                what: "Jacobi levels",
                requested: n,
                available: self.levels(),
            });
        }
        let diag = self.alpha[..n].iter().map(|&a| a as f64).collect();
        let off = self.omega[..n - 1].iter().map(|&w| (w as f64).sqrt()).collect();
        Ok((diag, off))
    }
}

/// Paper closed form for `ω_i` on O_k.
pub fn paper_omega(k: i64, i: i64) -> i64 {
    if i % 2 == 1 {
        (i + 1) / 2 * (k - (i - 1) / 2)
    } else {
        i / 2 * (k - i / 2)
    }
}

/// `ω_i = c_{i-1} b_i` with `i = 1..=d`.
pub fn omega_from_intersection(inter: &IntersectionNumbers) -> Vec<i64> {
    (1..=inter.diameter)
        .map(|i| (inter.c[i - 1] * inter.b[i]) as i64)
        .collect()
}

pub fn jacobi_from_intersection(inter: &IntersectionNumbers, mode: JacobiMode) -> Result<JacobiSequence> {
    let levels = inter.diameter + 1;
    let (omega, alpha) = match mode {
        JacobiMode::Paper => {
            let k = inter.k as i64;
            let omega = (1..levels as i64).map(|i| paper_omega(k, i)).collect();
            (omega, vec![0; levels])
        }
        JacobiMode::Exact => {
            let alpha = inter.a.iter().map(|&a| a as i64).collect();
            (omega_from_intersection(inter), alpha)
        }
        JacobiMode::Limit => {
            return Err(Error::InvalidArgument(
                "limit mode has no finite intersection array; use jacobi_limit".into(),
            ))
        }
    };
    JacobiSequence::new(mode, Some(inter.k), omega, alpha)
}

/// The limit sequence with `levels` strata: `ω_i = ⌈i/2⌉`, `α ≡ 0`.
pub fn jacobi_limit(levels: usize) -> Result<JacobiSequence> {
    if levels == 0 {
        return Err(Error::InvalidArgument("limit sequence needs at least one level".into()));
    }
    let omega = (1..levels as i64).map(|i| (i + 1) / 2).collect();
    JacobiSequence::new(JacobiMode::Limit, None, omega, vec![0; levels])
}

/// A 0/1 matrix stored as its nonzero (row, column) positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinary {
    pub dim: usize,
    pub entries: Vec<(usize, usize)>,
}

impl SparseBinary {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for &(r, c) in &self.entries {
            y[r] += x[c];
        }
        y
    }

    pub fn transpose(&self) -> SparseBinary {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c)| (c, r)).collect();
        entries.sort_unstable();
        SparseBinary {
            dim: self.dim,
            entries,
        }
    }
}

/// Raising, lowering and level-preserving parts of the adjacency matrix.
#[derive(Debug, Clone)]
pub struct QuantumDecomposition {
    pub a_plus: SparseBinary,
    pub a_minus: SparseBinary,
    pub a_zero: SparseBinary,
}

pub fn quantum_decompose(graph: &OddGraph, strat: &Stratification) -> Result<QuantumDecomposition> {
    let n = graph.vertex_count();
    if strat.level.len() != n {
        return Err(Error::InvalidArgument("stratification does not match graph".into()));
    }
    let (mut plus, mut minus, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for col in 0..n {
        for &row in graph.neighbors(col) {
            match strat.level[row] as isize - strat.level[col] as isize {
                1 => plus.push((row, col)),
                -1 => minus.push((row, col)),
                0 => zero.push((row, col)),
                _ => {
                    return Err(Error::InvariantViolation(format!(
                        "edge {row}-{col} skips a stratum"
                    )))
                }
            }
        }
    }
    for v in [&mut plus, &mut minus, &mut zero] {
        v.sort_unstable();
    }
    let wrap = |entries| SparseBinary { dim: n, entries };
    Ok(QuantumDecomposition {
        a_plus: wrap(plus),
        a_minus: wrap(minus),
        a_zero: wrap(zero),
    })
}

/// Largest deviation seen per level for each ladder operator.
#[derive(Debug, Clone, Default)]
pub struct LadderReport {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub zero: Vec<f64>,
}

impl LadderReport {
    pub fn max_deviation(&self) -> f64 {
        self.plus
            .iter()
            .chain(&self.minus)
            .chain(&self.zero)
            .fold(0.0, |m, &x| m.max(x))
    }
}

pub const LADDER_TOLERANCE: f64 = 1e-12;

fn stratum_vector(strat: &Stratification, i: usize, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    let s = &strat.strata[i];
    let amp = 1.0 / (s.len() as f64).sqrt();
    for &a in s {
        v[a] = amp;
    }
    v
}

fn max_gap(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Checks that A⁺, A⁻, A⁰ act on the normalized stratum vectors as the
/// ladder operators of `jac`.
pub fn verify_ladder_action(
    qd: &QuantumDecomposition,
    strat: &Stratification,
    jac: &JacobiSequence,
    tolerance: f64,
) -> Result<LadderReport> {
    if jac.mode != JacobiMode::Exact {
        return Err(Error::InvalidArgument("ladder action is only exact in exact mode".into()));
    }
    let levels = strat.levels();
    if jac.levels() != levels {
        return Err(Error::Range {
            what: "Jacobi levels",
            requested: levels,
            available: jac.levels(),
        });
    }
    let dim = qd.a_plus.dim;
    let phi: Vec<Vec<f64>> = (0..levels).map(|i| stratum_vector(strat, i, dim)).collect();
    let zeros = vec![0.0; dim];
    let scaled = |i: usize, s: f64| phi[i].iter().map(|x| x * s).collect::<Vec<_>>();

    let mut report = LadderReport::default();
    for i in 0..levels {
        let up = qd.a_plus.apply(&phi[i]);
        let up_expected = if i + 1 < levels {
            scaled(i + 1, (jac.omega_at(i + 1) as f64).sqrt())
        } else {
            zeros.clone()
        };
        let down = qd.a_minus.apply(&phi[i]);
        let down_expected = if i > 0 {
            scaled(i - 1, (jac.omega_at(i) as f64).sqrt())
        } else {
            zeros.clone()
        };
        let flat = qd.a_zero.apply(&phi[i]);
        let flat_expected = scaled(i, jac.alpha_at(i + 1) as f64);

        report.plus.push(max_gap(&up, &up_expected));
        report.minus.push(max_gap(&down, &down_expected));
        report.zero.push(max_gap(&flat, &flat_expected));
    }
    for (operator, devs) in [("A+", &report.plus), ("A-", &report.minus), ("A0", &report.zero)] {
        if let Some((level, &deviation)) = devs.iter().enumerate().find(|(_, &d)| d > tolerance) {
            return Err(Error::LadderViolation {
                level,
                operator,
                deviation,
            });
        }
    }
    Ok(report)
}
