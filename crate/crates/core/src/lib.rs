//! Minimization of decomposable submodular functions `F = Σ F_i` using only
//! a discrete minimization oracle per summand.
//!
//! The continuous problem solved is `min f(w) + ½‖w‖²` over the box
//! `[-ε, ε]^n`, whose box-restricted proximal steps need few oracle calls
//! (see [`prox::constrained_tv`]). Dual block coordinate ascent, its
//! accelerated two-block variant and an averaged alternating reflections
//! baseline live in [`solvers`]; grid-cut problem builders in [`instances`].

// `!(x >= 0)` rejects NaN along with negatives
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
pub mod brute;
pub mod cut;
pub mod error;
pub mod instances;
pub mod lovasz;
pub mod maxflow;
pub mod oracle;
pub mod prox;
pub mod scalar;
pub mod set;
pub mod solvers;

pub use cut::{Arc, CutFunction};
pub use error::{Error, Result};
pub use lovasz::{discrete_gap, greedy_lovasz, psi, psi_conj, EpsilonBox};
pub use oracle::{BasePoint, DiscreteMinimum, Provenance, SetFunctionOracle};
pub use prox::{constrained_tv, divide_and_conquer, restrict_contract, ProxResult, RestrictedFunction};
pub use scalar::Scalar;
pub use set::Subset;

pub type CutFunction64 = CutFunction<f64>;
pub type CutFunction32 = CutFunction<f32>;
pub type BasePoint64 = BasePoint<f64>;
pub type EpsilonBox64 = EpsilonBox<f64>;
