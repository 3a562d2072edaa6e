//! Continuous-time quantum walks on odd graphs O_k through their spectral
//! distributions.
//!
//! The pipeline runs graph → stratification → Jacobi coefficients →
//! orthogonal polynomials → Gauss-quadrature spectral measure → stratum
//! amplitudes, with a dense matrix-exponential oracle alongside it and the
//! k → ∞ limit in [`qclt`].

pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod jacobi;
pub mod qclt;
pub mod special;
pub mod spectral;
pub mod tridiag;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{
    build_odd_graph, closed_form_intersection, distance, distance_via_intersection, intersection_numbers,
    stratify, IntersectionNumbers, OddGraph, Stratification, K_MAX,
};
pub use jacobi::{
    jacobi_from_intersection, jacobi_limit, quantum_decompose, verify_ladder_action, JacobiMode, JacobiSequence,
    QuantumDecomposition,
};
pub use qclt::{convergence_experiment, q0_limit, qm_limit_closed, qm_limit_quadrature, stieltjes_limit};
pub use spectral::{
    gauss_measure, moments, poly_recurrence, stieltjes_cf, stieltjes_rational, PolynomialFamily,
    PolynomialSequence, SpectralMeasure,
};
pub use walk::{amplitude, amplitude_series, direct_oracle, vertex_probability, AmplitudeSeries, DenseOracle};
