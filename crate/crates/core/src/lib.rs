//! Forward and inverse resonance maps for CMV operators.
//!
//! The forward direction takes a finite sequence of Verblunsky coefficients,
//! builds the Jost function `psi_0` and its normalized Hadamard product `Pi`,
//! and locates the resonances (zeros of `psi_0`). The inverse direction goes
//! back from a resonance set through the boundary values of the Weyl–Titchmarsh
//! m-function and the Schur algorithm to the coefficients. The [`harness`]
//! module runs seeded perturbation experiments on top of both maps.
//!
//! Coefficients are indexed from 1, so `alpha[0]` in every slice holds
//! `alpha_1`. Indices beyond the stored length are exactly zero.

// `!(x > y)` is used on purpose so NaN fails argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmv;
pub mod coeffs;
pub mod error;
pub mod grid;
pub mod harness;
pub mod inverse;
pub mod jost;
pub mod par;
pub mod poly;
pub mod resonances;

pub use num_complex::Complex64;

pub use cmv::{
    build_cmv_matrix, fundamental_solutions, m_finite_section, m_forward_schur, m_taylor_coeffs,
    theta_block, transfer_matrix, BandedUnitary, LatticeSolution, Mat2,
};
pub use coeffs::{rho_data, validate_class, ClassParams, RhoData, ValidationReport, VerblunskySequence};
pub use error::{Error, Result};
pub use grid::CircleGrid;
pub use harness::{
    perturb_resonances, round_trip, run_stability_experiment, run_stability_experiment_with,
    sample_class_member, theorem_bound, theorem_bound_uniform, ExperimentConfig, Record,
    RoundTrip, StabilityReport,
};
pub use inverse::{
    extract_verblunsky, m_on_circle, pi_on_circle, psi0_zero_from_pi, reconstruct, schur_phi0,
    ReconstructionResult, StopReason,
};
pub use jost::{
    jost_function, log_growth_bound, pi_polynomial, solve_jost, tail_bound, JostValues,
};
pub use par::Execution;
pub use poly::ComplexPolynomial;
pub use resonances::{
    counting_function, find_resonances, inverse_moment, resonance_free_radius, Resonance,
    ResonanceSet,
};
