//! First-order solver for semidefinite programs in general form.
//!
//! The crate implements the ADAL alternating direction method on the dual
//! augmented Lagrangian for problems
//!
//! ```text
//! min <C, X>  s.t.  <A_i, X> <= b_i (i < l),  <A_j, X> = b_j (j >= l),
//!                   X >= 0 entrywise on an optional mask,  X psd
//! ```
//!
//! Inequalities are handled through slack variables that are never
//! materialized as an enlarged matrix: the slack blocks live next to the
//! `n x n` iterates as plain vectors. Approximate dual iterates can be turned
//! into certified bounds by solving a small linear program
//! ([`dualbound::recover_bound`]).
//!
//! Module map:
//!
//! * [`sdp`] problem data, the constraint operator and its adjoint.
//! * [`adal`] the solver itself.
//! * [`dualbound`] bound recovery and the reference LP solver.
//! * [`relaxations`] DIMACS graphs and theta-type relaxations.
//! * [`randgen`] random instances with a known optimum.
//! * [`profile`] benchmark records and performance profiles.

pub mod adal;
pub mod dualbound;
mod error;
pub mod linalg;
pub mod profile;
pub mod randgen;
pub mod relaxations;
pub mod sdp;

pub use error::{Error, Result};
