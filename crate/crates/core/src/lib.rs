//! Bound states of two Dirichlet strips coupled through a window in their
//! common boundary.

pub mod asymptotics;
pub mod chain;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod lemmas;
pub mod modematch;
pub mod modes;
pub mod varbound;

pub use error::{Error, ErrorClass, Result};
pub use geometry::{eigen_bracket, threshold, Geometry, GeometryConfig, SpectralWindow};
pub use modematch::{
    assemble_secular, smallest_singular_value, solve_ground_state, solve_with, EigenResult, SecularSystem,
    SolveOutcome, SolverOptions, Unresolved,
};
pub use modes::{mode_norm_on_subinterval, overlap, ModeFamily, TransverseMode};
pub use asymptotics::{fit_power_law, sandwich_report, sweep, SweepResult, SweepRow, Verdict};
pub use chain::{build_chain, gamma_constant, ConstantChain};
pub use fd::{fd_ground_state, FdResult, GridSpec};
pub use lemmas::{lemma1, lemma2, lemma3_gap, lemma4_constant, LemmaReport};
pub use varbound::{optimize_trial, TrialBound, TrialParams, TrialVariant};
