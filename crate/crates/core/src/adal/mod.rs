//! ADAL: alternating direction augmented Lagrangian method on the dual.
//!
//! One iteration updates `y` in closed form using a cached factorization of
//! the shifted Gram matrix, then obtains `Z` and `X` from a single
//! eigendecomposition of `W = X/sigma - C + A^T y`. Inequality rows are
//! carried by slack vectors (`s` primal, `p` dual) instead of an enlarged
//! matrix variable. Problems with an entrywise nonnegativity mask switch to
//! a three-block scheme with an extra projection onto the nonnegative
//! orthant; that scheme has no convergence guarantee but behaves well on the
//! theta-type relaxations.
//!
//! The penalty `sigma` follows the primal/dual norm ratio after every
//! iteration unless [`SigmaRule::Fixed`] is selected.

mod config;
mod gram;
mod solver;
mod steps;

pub use config::{SigmaRule, SolverConfig};
pub use gram::{factorize_gram, GramFactor};
pub use solver::{
    solve, BestBound, BoundEvent, BoundHook, BoundRequest, IterRecord, SolveStatus, Solver,
    SolverResult,
};
pub use steps::{
    build_w, residuals, s_update_3block, sigma_update, slack_update, x_update_3block, y_update,
    z_update, zx_update, SolverState,
};
