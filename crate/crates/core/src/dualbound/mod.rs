//! Certified dual bounds from approximate dual iterates.
//!
//! Given an approximate dual matrix `Z`, the bound LP looks for multipliers
//! that make `Ẑ = psd_repair(Z)` exactly dual feasible:
//!
//! ```text
//! max  -b_ineq^T lambda + b_eq^T mu
//! s.t. C + A_ineq^T lambda - A_eq^T mu - S = Ẑ     (one row per position)
//!      lambda >= 0,  S >= 0 on the nonnegativity mask
//! ```
//!
//! Every feasible point gives a dual feasible `(y, Ẑ, S)` with
//! `y = (-lambda, mu)`, so by weak duality the LP value bounds the optimum of
//! the (internal, minimization) problem from below. For maximization problems
//! the reported value is therefore an upper bound.

mod lp;
mod mps;

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use lp::{solve_lp, LinearProgram, LpOutcome, LpRow, RowSense};
pub use mps::{parse_solution, write_mps, ExternalLp};

use crate::linalg::{eigh, min_eigenvalue};
use crate::sdp::{symmetrize_in_place, GeneralSdp, SymMat};
use crate::Result;

/// Default feasibility tolerance of the bound LP.
pub const DEFAULT_LP_TOL: f64 = 1e-5;

/// Something that can solve a [`LinearProgram`] under the contract of
/// [`solve_lp`].
pub trait LpBackend: Send + Sync {
    fn solve(&self, lp: &LinearProgram, tol: f64) -> Result<LpOutcome>;
}

/// The built-in presolve + simplex.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceLp;

impl LpBackend for ReferenceLp {
    fn solve(&self, lp: &LinearProgram, tol: f64) -> Result<LpOutcome> {
        Ok(solve_lp(lp, tol))
    }
}

/// Nearest psd matrix in Frobenius norm: negative eigenvalues are set to zero.
///
/// Returns `z` unchanged when it is already psd. Otherwise the clipped
/// reconstruction is checked once more and, if rounding left a negative
/// eigenvalue, shifted by twice its magnitude.
pub fn psd_repair(z: &SymMat) -> Result<SymMat> {
    let n = z.n();
    let eig = eigh(z.as_matrix())?;
    if eig.eigenvalues.min() >= 0.0 {
        return Ok(z.clone());
    }
    let lam = eig.eigenvalues.map(|l| l.max(0.0));
    let q = &eig.eigenvectors;
    let mut out = q * DMatrix::from_diagonal(&lam) * q.transpose();
    symmetrize_in_place(&mut out);
    let mut repaired = SymMat::symmetrized(out);
    // Rounding in the reconstruction can leave a tiny negative eigenvalue.
    // The diagonal shift must exceed the eigensolver's own error, which
    // scales with the norm, so it grows until the check passes.
    let floor = 4.0 * n as f64 * f64::EPSILON * (1.0 + repaired.fro_norm());
    let mut low = min_eigenvalue(&repaired)?;
    let mut shift = (2.0 * -low).max(floor);
    while low < 0.0 {
        let mut m = repaired.into_matrix();
        for i in 0..n {
            m[(i, i)] += shift;
        }
        repaired = SymMat::symmetrized(m);
        low = min_eigenvalue(&repaired)?;
        shift *= 2.0;
    }
    Ok(repaired)
}

/// The bound LP for a given `Ẑ`. Variables are ordered `lambda`, `mu`, `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundLp {
    pub num_lambda: usize,
    pub num_mu: usize,
    pub num_s: usize,
    /// Upper-triangle position of each row (0-based).
    pub positions: Vec<(usize, usize)>,
    /// Mask position of each `S` variable.
    pub s_positions: Vec<(usize, usize)>,
    pub lp: LinearProgram,
}

impl BoundLp {
    pub fn num_rows(&self) -> usize {
        self.positions.len()
    }
}

/// Builds the bound LP. Rows cover the union of the supports of `C`, all
/// constraint matrices, the mask and the nonzeros of `z_hat`; every other
/// position reads `0 = 0`.
pub fn build_bound_lp(sdp: &GeneralSdp, z_hat: &SymMat) -> BoundLp {
    let n = sdp.n();
    let l = sdp.num_ineq();
    let m = sdp.num_constraints();
    let mut lp = LinearProgram::default();
    for (k, con) in sdp.constraints().iter().enumerate() {
        if k < l {
            lp.add_nonneg(-con.rhs);
        } else {
            lp.add_free(con.rhs);
        }
    }
    let mask = sdp.nonneg_mask();
    for _ in mask {
        lp.add_nonneg(0.0);
    }

    // position -> (C value, coefficients)
    let mut rows: BTreeMap<(usize, usize), (f64, Vec<(usize, f64)>)> = BTreeMap::new();
    for &(i, j, v) in sdp.objective().entries() {
        rows.entry((i, j)).or_default().0 = v;
    }
    for (k, con) in sdp.constraints().iter().enumerate() {
        let sign = if k < l { 1.0 } else { -1.0 };
        for &(i, j, v) in con.matrix.entries() {
            rows.entry((i, j)).or_default().1.push((k, sign * v));
        }
    }
    for (t, &(i, j)) in mask.iter().enumerate() {
        rows.entry((i, j)).or_default().1.push((m + t, -1.0));
    }
    let zm = z_hat.as_matrix();
    for j in 0..n {
        for i in 0..=j {
            if zm[(i, j)] != 0.0 {
                rows.entry((i, j)).or_default();
            }
        }
    }

    let mut positions = Vec::with_capacity(rows.len());
    for ((i, j), (c, coeffs)) in rows {
        positions.push((i, j));
        lp.add_row(coeffs, RowSense::Eq, zm[(i, j)] - c);
    }
    BoundLp {
        num_lambda: l,
        num_mu: m - l,
        num_s: mask.len(),
        positions,
        s_positions: mask.to_vec(),
        lp,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundStatus {
    Certified,
    LpInfeasible,
    LpUnbounded,
}

/// Outcome of one bound-recovery attempt.
#[derive(Clone, Debug, Serialize)]
pub struct DualBound {
    pub status: BoundStatus,
    /// Bound in the user's sense (upper bound for maximization). `NaN`
    /// unless certified.
    pub value: f64,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// Duals of the entrywise bounds, in mask order.
    pub s_vals: Vec<f64>,
    pub z_hat: SymMat,
    pub wall_time_sec: f64,
    /// Largest row violation of the certificate (`inf` when there is none).
    pub feasibility_residual: f64,
}

impl DualBound {
    pub fn is_certified(&self) -> bool {
        self.status == BoundStatus::Certified
    }

    fn failed(status: BoundStatus, z_hat: SymMat, start: Instant) -> Self {
        Self {
            status,
            value: f64::NAN,
            lambda: Vec::new(),
            mu: Vec::new(),
            s_vals: Vec::new(),
            z_hat,
            wall_time_sec: start.elapsed().as_secs_f64(),
            feasibility_residual: f64::INFINITY,
        }
    }

    #[cfg(test)]
    pub(crate) fn certified_for_tests(value: f64) -> Self {
        Self {
            status: BoundStatus::Certified,
            value,
            lambda: Vec::new(),
            mu: Vec::new(),
            s_vals: Vec::new(),
            z_hat: SymMat::zeros(1),
            wall_time_sec: 0.0,
            feasibility_residual: 0.0,
        }
    }
}

/// Largest entry of `|C + A_ineq^T lambda - A_eq^T mu - S - Ẑ|` over all
/// positions, computed directly from the problem data.
pub fn certificate_residual(
    sdp: &GeneralSdp,
    lambda: &[f64],
    mu: &[f64],
    s_vals: &[f64],
    z_hat: &SymMat,
) -> f64 {
    let n = sdp.n();
    let mut r = DMatrix::zeros(n, n);
    sdp.objective().add_to(&mut r, 1.0);
    let y: Vec<f64> = lambda
        .iter()
        .map(|v| -v)
        .chain(mu.iter().copied())
        .collect();
    sdp.add_at_unchecked(&y, &mut r, -1.0);
    for (&(i, j), &s) in sdp.nonneg_mask().iter().zip(s_vals) {
        r[(i, j)] -= s;
        if i != j {
            r[(j, i)] -= s;
        }
    }
    r -= z_hat.as_matrix();
    r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Repairs `z`, builds and solves the bound LP with the reference solver.
pub fn recover_bound(sdp: &GeneralSdp, z: &SymMat, tol: f64) -> Result<DualBound> {
    recover_bound_with(sdp, z, tol, &ReferenceLp)
}

pub fn recover_bound_with(
    sdp: &GeneralSdp,
    z: &SymMat,
    tol: f64,
    backend: &dyn LpBackend,
) -> Result<DualBound> {
    let start = Instant::now();
    let z_hat = psd_repair(z)?;
    let blp = build_bound_lp(sdp, &z_hat);
    let (x, _) = match backend.solve(&blp.lp, tol)? {
        LpOutcome::Optimal { x, objective } => (x, objective),
        LpOutcome::Infeasible => {
            return Ok(DualBound::failed(BoundStatus::LpInfeasible, z_hat, start))
        }
        LpOutcome::Unbounded => {
            return Ok(DualBound::failed(BoundStatus::LpUnbounded, z_hat, start))
        }
    };
    let l = blp.num_lambda;
    let m = l + blp.num_mu;
    let lambda: Vec<f64> = x[..l].iter().map(|v| v.max(0.0)).collect();
    let mu = x[l..m].to_vec();
    let s_vals: Vec<f64> = x[m..].iter().map(|v| v.max(0.0)).collect();
    let residual = certificate_residual(sdp, &lambda, &mu, &s_vals, &z_hat);
    if !(residual <= tol) {
        let mut b = DualBound::failed(BoundStatus::LpInfeasible, z_hat, start);
        b.feasibility_residual = residual;
        return Ok(b);
    }
    let rhs = sdp.rhs();
    let internal: f64 = -lambda
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        + mu.iter()
            .zip(rhs.iter().skip(l))
            .map(|(a, b)| a * b)
            .sum::<f64>();
    Ok(DualBound {
        status: BoundStatus::Certified,
        value: sdp.report(internal),
        lambda,
        mu,
        s_vals,
        z_hat,
        wall_time_sec: start.elapsed().as_secs_f64(),
        feasibility_residual: residual,
    })
}
