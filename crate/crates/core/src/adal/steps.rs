//! The individual block updates of one ADAL iteration.
//!
//! The slack blocks of the enlarged matrices are kept as vectors: `s` next
//! to `X`, `p` next to `Z`. Their part of every formula is written out
//! explicitly, so no `(n + l) x (n + l)` matrix is ever formed.

use nalgebra::{DMatrix, DVector};

use super::GramFactor;
use crate::linalg::psd_split_matrix;
use crate::sdp::{GeneralSdp, SymMat};
use crate::Result;

const SIGMA_MIN: f64 = 1e-6;
const SIGMA_MAX: f64 = 1e6;

/// Iterates of the solver. `nonneg_dual` is the dual of the entrywise
/// bounds and stays zero when the problem has no mask.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: SymMat,
    /// Primal slacks of the inequality rows.
    pub s: DVector<f64>,
    pub y: DVector<f64>,
    pub z: SymMat,
    /// Dual slacks of the inequality rows.
    pub p: DVector<f64>,
    pub nonneg_dual: SymMat,
    pub sigma: f64,
    pub iter: usize,
}

impl SolverState {
    /// All blocks zero, `sigma = sigma0`.
    pub fn initial(sdp: &GeneralSdp, sigma0: f64) -> Self {
        let (n, m, l) = (sdp.n(), sdp.num_constraints(), sdp.num_ineq());
        Self {
            x: SymMat::zeros(n),
            s: DVector::zeros(l),
            y: DVector::zeros(m),
            z: SymMat::zeros(n),
            p: DVector::zeros(l),
            nonneg_dual: SymMat::zeros(n),
            sigma: sigma0,
            iter: 0,
        }
    }
}

/// `X / sigma - C`.
fn scaled_x_minus_c(state: &SolverState, sdp: &GeneralSdp) -> DMatrix<f64> {
    let mut m = state.x.as_matrix() / state.sigma;
    sdp.objective().add_to(&mut m, -1.0);
    m
}

/// Closed-form maximizer of the augmented Lagrangian in `y`:
///
/// `y = (A A^T + Diag(1_l, 0))^{-1} [ b/sigma - A(X/sigma - C + Z + S) - (s/sigma + p; 0) ]`
pub fn y_update(state: &SolverState, sdp: &GeneralSdp, factor: &GramFactor) -> DVector<f64> {
    let sigma = state.sigma;
    let mut m = scaled_x_minus_c(state, sdp);
    m += state.z.as_matrix();
    if sdp.has_mask() {
        m += state.nonneg_dual.as_matrix();
    }
    let mut rhs = sdp.rhs() / sigma - sdp.apply_a_unchecked(&m);
    for i in 0..sdp.num_ineq() {
        rhs[i] -= state.s[i] / sigma + state.p[i];
    }
    factor.solve(&rhs)
}

/// `W = X/sigma - C + A^T y (+ S)` and its slack part `s/sigma + y_ineq`.
pub fn build_w(state: &SolverState, sdp: &GeneralSdp, y: &DVector<f64>) -> (SymMat, DVector<f64>) {
    let mut w = scaled_x_minus_c(state, sdp);
    sdp.add_at_unchecked(y.as_slice(), &mut w, 1.0);
    if sdp.has_mask() {
        w += state.nonneg_dual.as_matrix();
    }
    let l = sdp.num_ineq();
    let w_slack = DVector::from_iterator(l, (0..l).map(|i| state.s[i] / state.sigma + y[i]));
    (SymMat::symmetrized(w), w_slack)
}

/// Projection of the slack part: `p = max(0, -w)`, `s = sigma * max(0, w)`.
pub fn slack_update(w_slack: &DVector<f64>, sigma: f64) -> (DVector<f64>, DVector<f64>) {
    let p = w_slack.map(|w| if w < 0.0 { -w } else { 0.0 });
    let s = w_slack.map(|w| if w > 0.0 { sigma * w } else { 0.0 });
    (p, s)
}

/// Two-block update `Z = -(W)_-`, `X = sigma (W)_+` with the slack blocks
/// projected alongside. Returns the seconds spent in the eigensolver.
pub fn zx_update(state: &mut SolverState, w_core: &SymMat, w_slack: &DVector<f64>) -> Result<f64> {
    let t = std::time::Instant::now();
    let (pos, neg) = psd_split_matrix(w_core.as_matrix())?;
    let eig_time = t.elapsed().as_secs_f64();
    let sigma = state.sigma;
    state.z = SymMat::symmetrized(-neg);
    state.x = SymMat::symmetrized(pos * sigma);
    let (p, s) = slack_update(w_slack, sigma);
    state.p = p;
    state.s = s;
    Ok(eig_time)
}

/// `Z = -(W)_-` for the three-block scheme.
pub fn z_update(w_core: &SymMat) -> Result<SymMat> {
    let (_, neg) = psd_split_matrix(w_core.as_matrix())?;
    Ok(SymMat::symmetrized(-neg))
}

/// Exact maximizer over `S >= 0` (on the mask) with the other blocks fixed:
/// `S = max(0, C - A^T y - Z - X/sigma)` on masked entries, zero elsewhere.
pub fn s_update_3block(
    state: &SolverState,
    sdp: &GeneralSdp,
    y: &DVector<f64>,
    z: &SymMat,
) -> SymMat {
    let n = sdp.n();
    let mut out = SymMat::zeros(n);
    if !sdp.has_mask() {
        return out;
    }
    let mut v = scaled_x_minus_c(state, sdp);
    sdp.add_at_unchecked(y.as_slice(), &mut v, 1.0);
    v += z.as_matrix();
    let m = out.matrix_mut();
    for &(i, j) in sdp.nonneg_mask() {
        let val = -v[(i, j)];
        if val > 0.0 {
            m[(i, j)] = val;
            m[(j, i)] = val;
        }
    }
    out
}

/// Multiplier step `X <- X + sigma (A^T y + Z + S - C)` of the three-block scheme.
pub fn x_update_3block(state: &SolverState, sdp: &GeneralSdp) -> SymMat {
    let sigma = state.sigma;
    let mut r = dual_residual_matrix(state, sdp);
    r *= sigma;
    r += state.x.as_matrix();
    SymMat::symmetrized(r)
}

/// `A^T y + Z + S - C`.
fn dual_residual_matrix(state: &SolverState, sdp: &GeneralSdp) -> DMatrix<f64> {
    let mut r = state.z.as_matrix().clone();
    if sdp.has_mask() {
        r += state.nonneg_dual.as_matrix();
    }
    sdp.add_at_unchecked(state.y.as_slice(), &mut r, 1.0);
    sdp.objective().add_to(&mut r, -1.0);
    r
}

/// Scaled primal and dual infeasibilities of the slack-expanded problem:
///
/// * `r_P = ||A(X) + (s; 0) - b|| / (1 + ||b||)`
/// * `r_D = sqrt(||A^T y + Z + S - C||^2 + sum_i (y_i + p_i)^2) / (1 + ||C||)`
pub fn residuals(state: &SolverState, sdp: &GeneralSdp) -> (f64, f64) {
    let b = sdp.rhs();
    let mut ax = sdp.apply_a_unchecked(state.x.as_matrix());
    for i in 0..sdp.num_ineq() {
        ax[i] += state.s[i];
    }
    ax -= b;
    let r_p = ax.norm() / (1.0 + b.norm());

    let core = dual_residual_matrix(state, sdp).norm_squared();
    let slack: f64 = (0..sdp.num_ineq())
        .map(|i| (state.y[i] + state.p[i]).powi(2))
        .sum();
    let r_d = (core + slack).sqrt() / (1.0 + sdp.objective().fro_norm());
    (r_p, r_d)
}

/// Balances primal and dual magnitudes: `||(X, s)|| / ||(Z, p)||`, clamped
/// to `[1e-6, 1e6]`. Keeps the current value when either norm vanishes.
pub fn sigma_update(state: &SolverState) -> f64 {
    let primal = (state.x.as_matrix().norm_squared() + state.s.norm_squared()).sqrt();
    let dual = (state.z.as_matrix().norm_squared() + state.p.norm_squared()).sqrt();
    if dual < 1e-12 || primal < 1e-12 {
        return state.sigma;
    }
    (primal / dual).clamp(SIGMA_MIN, SIGMA_MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adal::factorize_gram;
    use crate::sdp::{Sense, SparseSymMat};

    fn min_2x_eq_1() -> GeneralSdp {
        GeneralSdp::builder(1, Sense::Min)
            .objective(SparseSymMat::new(1, [(0, 0, 2.0)]).unwrap())
            .eq(SparseSymMat::identity(1), 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn y_update_hand_iteration() {
        // ||A||^2 = 1 for n = 1, so y = 1 - (1 - 2) = 2 at X = 1, Z = 0, sigma = 1
        let sdp = min_2x_eq_1();
        let f = factorize_gram(&sdp).unwrap();
        let mut st = SolverState::initial(&sdp, 1.0);
        st.x = SymMat::identity(1);
        let y = y_update(&st, &sdp, &f);
        assert!((y[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn y_update_from_zero_state_is_least_squares() {
        let sdp = min_2x_eq_1();
        let f = factorize_gram(&sdp).unwrap();
        let st = SolverState::initial(&sdp, 1.0);
        // (b - A(-C)) / 1 = 1 + 2 = 3, divided by ||A||^2 = 1
        assert!((y_update(&st, &sdp, &f)[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn y_update_fixed_point_at_optimum() {
        // optimum: X = 1, y = 2, Z = 0
        let sdp = min_2x_eq_1();
        let f = factorize_gram(&sdp).unwrap();
        let mut st = SolverState::initial(&sdp, 0.7);
        st.x = SymMat::identity(1);
        st.y = DVector::from_vec(vec![2.0]);
        assert!((y_update(&st, &sdp, &f)[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn build_w_examples() {
        let sdp0 = GeneralSdp::builder(2, Sense::Min).build().unwrap();
        let st0 = SolverState::initial(&sdp0, 1.0);
        let (w, ws) = build_w(&st0, &sdp0, &DVector::zeros(0));
        assert_eq!(w, SymMat::zeros(2));
        assert_eq!(ws.len(), 0);

        let sdp = GeneralSdp::builder(1, Sense::Min)
            .objective(SparseSymMat::identity(1))
            .eq(SparseSymMat::identity(1), 1.0)
            .build()
            .unwrap();
        let mut st = SolverState::initial(&sdp, 2.0);
        st.x = SymMat::from_diagonal(&[2.0]);
        let (w, _) = build_w(&st, &sdp, &DVector::from_vec(vec![1.0]));
        assert_eq!(w.get(0, 0), 1.0);

        let ineq = GeneralSdp::builder(1, Sense::Min)
            .le(SparseSymMat::identity(1), 1.0)
            .build()
            .unwrap();
        let mut st = SolverState::initial(&ineq, 2.0);
        st.s = DVector::from_vec(vec![4.0]);
        let (_, ws) = build_w(&st, &ineq, &DVector::from_vec(vec![-3.0]));
        assert_eq!(ws.as_slice(), &[-1.0]);
    }

    #[test]
    fn zx_update_examples() {
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .le(SparseSymMat::identity(2), 1.0)
            .le(SparseSymMat::identity(2), 2.0)
            .build()
            .unwrap();
        let mut st = SolverState::initial(&sdp, 2.0);
        let w = SymMat::from_diagonal(&[3.0, -2.0]);
        let ws = DVector::from_vec(vec![-1.0, 0.5]);
        zx_update(&mut st, &w, &ws).unwrap();
        assert!(st.z.max_abs_diff(&SymMat::from_diagonal(&[0.0, 2.0])) < 1e-14);
        assert!(st.x.max_abs_diff(&SymMat::from_diagonal(&[6.0, 0.0])) < 1e-14);
        assert_eq!(st.p.as_slice(), &[1.0, 0.0]);
        assert_eq!(st.s.as_slice(), &[0.0, 1.0]);

        let psd = SymMat::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        zx_update(&mut st, &psd, &DVector::zeros(2)).unwrap();
        assert_eq!(st.z, SymMat::zeros(2));
        assert_eq!(st.x, psd.scaled(2.0));
    }

    #[test]
    fn s_update_examples() {
        let plain = GeneralSdp::builder(1, Sense::Min).build().unwrap();
        let st = SolverState::initial(&plain, 1.0);
        assert_eq!(
            s_update_3block(&st, &plain, &DVector::zeros(0), &SymMat::zeros(1)),
            SymMat::zeros(1)
        );

        // C = 2, A^T y + Z + X/sigma = 0.5  =>  S = 1.5
        let masked = GeneralSdp::builder(1, Sense::Min)
            .objective(SparseSymMat::new(1, [(0, 0, 2.0)]).unwrap())
            .nonneg([(0, 0)])
            .build()
            .unwrap();
        let mut st = SolverState::initial(&masked, 1.0);
        st.x = SymMat::from_diagonal(&[0.5]);
        let s = s_update_3block(&st, &masked, &DVector::zeros(0), &SymMat::zeros(1));
        assert_eq!(s.get(0, 0), 1.5);

        st.x = SymMat::from_diagonal(&[3.0]);
        let s = s_update_3block(&st, &masked, &DVector::zeros(0), &SymMat::zeros(1));
        assert_eq!(s.get(0, 0), 0.0);
    }

    #[test]
    fn residual_examples() {
        let sdp = GeneralSdp::builder(1, Sense::Min)
            .eq(SparseSymMat::identity(1), 1.0)
            .build()
            .unwrap();
        let st = SolverState::initial(&sdp, 1.0);
        let (rp, _) = residuals(&st, &sdp);
        assert!((rp - 0.5).abs() < 1e-15);

        let c = SparseSymMat::new(2, [(0, 0, 1.0), (0, 1, -0.5)]).unwrap();
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .objective(c.clone())
            .le(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        let mut st = SolverState::initial(&sdp, 1.0);
        st.z = c.to_dense();
        let (_, rd) = residuals(&st, &sdp);
        assert_eq!(rd, 0.0);
    }

    #[test]
    fn sigma_examples() {
        let sdp = GeneralSdp::builder(2, Sense::Min).build().unwrap();
        let mut st = SolverState::initial(&sdp, 0.3);
        st.x = SymMat::from_diagonal(&[4.0, 0.0]);
        st.z = SymMat::from_diagonal(&[0.0, 2.0]);
        assert!((sigma_update(&st) - 2.0).abs() < 1e-15);
        st.z = SymMat::zeros(2);
        assert_eq!(sigma_update(&st), 0.3);
        st.z = st.x.clone();
        assert_eq!(sigma_update(&st), 1.0);
    }
}
