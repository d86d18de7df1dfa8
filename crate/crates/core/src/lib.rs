//! Regular polygon theories, their preparation and measurement uncertainty
//! relations, and numerical tools for approximate joint measurements.
//!
//! States and effects live in `R^3` with the Euclidean inner product. The
//! `n`-gon theory has pure states on a circle of radius `sqrt(sec(π/n))` at
//! height 1; the disc (`n = ∞`) is the real slice of the qubit.

pub mod cli;
pub mod error;
pub mod fmt;
pub mod jointopt;
pub mod lp;
pub mod noise;
pub mod polygon;
pub mod theory;
pub mod uncertainty;
pub mod vector;

pub use error::{GptError, Result, Violation};
pub use jointopt::{
    exact_joint_feasible, grid_noise, noise_sum, optimize_noise, random_feasible_joint, theorem_check, Feasibility,
    FeasibilityReport, JointMeasurement, OptimizerConfig, OptimizerResult, TheoremReport,
};
pub use noise::{joint_distribution, min_error_probability, noise, JointDistribution};
pub use polygon::{ideal_measurement, pure_state, Address, IdealMeasurement, Order, Site};
pub use theory::{Effect, Measurement, SelfDuality, State, Theory, TheoryKind};
pub use uncertainty::{entropy, gamma, pur_bound, table_entry, GammaResult, LogBase};
pub use vector::VecV;
