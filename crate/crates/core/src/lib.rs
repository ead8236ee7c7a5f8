//! Sparse signal reconstruction from compressive measurements, guided by any
//! number of side information vectors.
//!
//! The solver minimizes
//!
//! ```text
//! H(x) = 1/2 ||Phi x - y||_2^2
//!        + lambda * sum_j beta_j * sum_i w_ji |x_i - z_ji|
//! ```
//!
//! where `z_0 = 0` (the classical sparsity prior) and `z_1 .. z_J` are side
//! information vectors of varying, unknown quality. Both weight levels are
//! re-estimated from the current iterate at every iteration: the intra-vector
//! weights `w_ji` emphasize coordinates where a side information vector agrees
//! with the iterate, and the inter-vector weights `beta_j` shift mass toward
//! the side information vectors that agree best overall. Poor side information
//! is driven toward zero weight instead of poisoning the reconstruction.
//!
//! The minimization itself is a fast proximal gradient (FISTA-style) loop; the
//! proximal step of the weighted n-l1 penalty is evaluated exactly per
//! coordinate by a piecewise closed form, see [`prox`].
//!
//! Three solver variants are exposed through [`model::Variant`]:
//!
//! * `PlainL1`: weights frozen at initialization, no side information used;
//!   this is plain l1 minimization.
//! * `L1L1`: unit weights on `z_0` and `z_1`, frozen; the classical l1-l1
//!   formulation.
//! * `Ramsia`: full adaptive reweighting over all provided side information.
//!
//! The crate is `no_std` (with `alloc`) so the solver can be embedded in
//! constrained targets; file formats, experiment drivers, and the CLI live in
//! the companion `ramsia-harness` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod linop;
pub mod model;
pub mod prox;
pub mod solver;
pub mod weights;

pub use error::CoreError;
pub use linop::{apply, apply_transpose, estimate_lipschitz, gradient, OperatorStats};
pub use model::{
    objective_value, Lipschitz, Matrix, ProblemInstance, SolverConfig, SolverResult, Termination,
    TrialReport, Variant, WeightState,
};
pub use prox::{prox_coordinate, prox_vector, ProxCoordinateInput};
pub use solver::{solve, solve_trace, SolverTrace};
pub use weights::{update_inter, update_intra};
