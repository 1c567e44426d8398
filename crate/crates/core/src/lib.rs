//! Critical constants for multiple testing under arbitrary dependence.
//!
//! Each generalized error rate (kFWER or `P(FDP > γ)`, step-up or step-down)
//! has an associated nonnegative matrix `A`. Any nondecreasing `c >= 0` with
//! `‖A·c‖∞ <= 1` gives a procedure `α·c` that controls the error rate at level
//! `α`, whatever the joint distribution of the p-values. This crate builds the
//! matrices, rescales classical constant families onto the feasible set,
//! improves them with a linear program, applies the resulting procedures to
//! data and runs a Monte Carlo power study.
//!
//! ```
//! use critconst::{bh_constants, fdp_su_matrix, max_bound, rescale};
//!
//! let a = fdp_su_matrix(50, 0.05)?;
//! let (c, d) = rescale(&bh_constants(50)?, &a)?;
//! assert!(d > 1.0);
//! assert!((max_bound(&a, &c)? - 1.0).abs() < 1e-12);
//! # Ok::<(), critconst::Error>(())
//! ```
//!
//! The guide in `book/` walks through each piece with runnable examples.

pub mod cache;
pub mod constants;
pub mod error;
pub mod io;
pub mod lp;
pub mod matrices;
pub mod procedures;
pub mod sim;

pub use constants::{
    bh_constants, by_constants, gr_sd_constants, lr_fdp_constants, lr_kfwer_constants, rescale,
    ConstantParams, CriticalVector, Family,
};
pub use error::{Error, Result};
pub use lp::{build_problem, diagnostics, solve, Diagnostics, LpProblem, LpSolution, LpStatus};
pub use matrices::{
    bound_vector, fdp_sd_aux, fdp_sd_matrix, fdp_su_aux, fdp_su_matrix, is_feasible,
    kfwer_sd_matrix, kfwer_su_matrix, max_bound, AssociatedMatrix, Direction, ErrorRate,
    ErrorRateSpec, FdpSdAux, FdpSuAux,
};
pub use procedures::{
    adjusted_pvalues, fdp_stats, run_procedure, run_with_constants, step_down, step_up, unit_constants,
    unit_constants_cached, AdjustedPValues, DecisionSet,
    PValueVector, ProcedureFamily, ProcedureSpec,
};
pub use cache::SolutionCache;
pub use sim::{run_study, two_sided_p, SimConfig, SimReport};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/linear-program.md")]
    mod linear_program {}
    #[doc = include_str!("../../../book/src/procedures.md")]
    mod procedures {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
