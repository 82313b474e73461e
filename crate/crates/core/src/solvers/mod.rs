//! Dual solvers for `min_A Σ_i F_i(A)` driven by per-summand prox oracles.
//!
//! All solvers work on the dual of `min_w Σ_i g_i(w) + ½‖w‖²`, where
//! `g_i` is the Lovász extension of `F_i` restricted to the box
//! `[-ε, ε]^n`, and report a discrete primal/dual pair after every outer
//! iteration.

mod aar;
mod bcd;
mod config;
mod decomposition;
mod dual;
mod rounding;
mod trace;

pub use aar::solve_aar;
pub use bcd::{momentum, solve_accelerated, solve_bcd};
pub use config::{
    diameter, epsilon_schedule, eta_d_bound, Algorithm, EpsilonMode, Momentum, SolverConfig, EPSILON_FLOOR,
};
pub use decomposition::Decomposition;
pub use dual::{bcd_step, conjugate_value, dual_objective, DualState};
pub use rounding::{round_to_set, RoundedSet};
pub use trace::{IterateEvent, NoObserver, Observer, SolveError, SolveOutcome, StepEvent, StepKind, TraceRecord};

use crate::oracle::SetFunctionOracle;
use crate::scalar::Scalar;

/// Runs the solver selected by `cfg.algorithm`.
pub fn solve<T: Scalar, F: SetFunctionOracle<T>>(
    d: &Decomposition<T, F>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<SolveOutcome<T>, SolveError<T>> {
    match cfg.algorithm {
        Algorithm::Bcd => solve_bcd(d, cfg, observer),
        Algorithm::AcceleratedBcd => solve_accelerated(d, cfg, observer),
        Algorithm::Aar => solve_aar(d, cfg, observer),
    }
}
