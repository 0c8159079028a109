//! The block-wise solver against plain two-block ADAL on the explicitly
//! slack-expanded standard form (one `(n + l) x (n + l)` matrix variable).

mod common;

use adal_sdp::adal::{SigmaRule, Solver, SolverConfig};
use common::{deviation, max_abs, Expanded};
use nalgebra::DMatrix;

#[test]
fn blockwise_iterates_match_expanded_form() {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let g = common::small_instance(seed);
        let sdp = &g.sdp;
        assert!(sdp.num_ineq() >= 1 && sdp.n() <= 8 && sdp.num_constraints() <= 12);
        let ex = Expanded::new(sdp);
        let nn = sdp.n() + sdp.num_ineq();
        let (mut x, mut z) = (DMatrix::zeros(nn, nn), DMatrix::zeros(nn, nn));
        let mut solver = Solver::new(sdp, SolverConfig::default()).unwrap();
        for it in 0..50 {
            let rec = solver.step().unwrap();
            let y = ex.step(&mut x, &mut z, rec.sigma);
            let d = deviation(sdp, &solver, &x, &z, &y);
            let scale = 1.0 + max_abs(&x).max(max_abs(&z)).max(y.amax());
            assert!(
                d <= 1e-8 * scale,
                "seed {seed} iteration {it}: deviation {d:e}"
            );
            worst = worst.max(d / scale);
        }
    }
    eprintln!("largest scaled deviation over 20 instances x 50 iterations: {worst:e}");
}

#[test]
fn printed_plus_sign_diverges() {
    // Replace the slack term of the y-update by `+(s/sigma + p)` and compare
    // the first iteration from a state with nonzero slacks.
    let g = common::small_instance(3);
    let sdp = &g.sdp;
    let (n, l) = (sdp.n(), sdp.num_ineq());
    let cfg = SolverConfig {
        sigma_rule: SigmaRule::Fixed,
        ..SolverConfig::default()
    };
    let mut solver = Solver::new(sdp, cfg).unwrap();
    for _ in 0..5 {
        solver.step().unwrap();
    }
    let st = solver.state().clone();
    assert!(st.s.iter().chain(st.p.iter()).any(|v| *v != 0.0));
    let sigma = st.sigma;

    let factor = adal_sdp::adal::factorize_gram(sdp).unwrap();
    let mut inner = st.x.as_matrix() / sigma + st.z.as_matrix();
    sdp.objective()
        .to_dense()
        .as_matrix()
        .iter()
        .enumerate()
        .for_each(|(k, c)| inner[k] -= c);
    let base = sdp.rhs() / sigma
        - sdp
            .apply_a(&adal_sdp::sdp::SymMat::symmetrized(inner))
            .unwrap();
    let mut plus = base.clone();
    for i in 0..l {
        plus[i] += st.s[i] / sigma + st.p[i];
    }
    let y_plus = factor.solve(&plus);

    let ex = Expanded::new(sdp);
    let mut x = DMatrix::zeros(n + l, n + l);
    let mut z = DMatrix::zeros(n + l, n + l);
    x.view_mut((0, 0), (n, n)).copy_from(st.x.as_matrix());
    z.view_mut((0, 0), (n, n)).copy_from(st.z.as_matrix());
    for i in 0..l {
        x[(n + i, n + i)] = st.s[i];
        z[(n + i, n + i)] = st.p[i];
    }
    let y_oracle = ex.step(&mut x, &mut z, sigma);
    let y_minus = adal_sdp::adal::y_update(&st, sdp, &factor);
    assert!((&y_minus - &y_oracle).amax() < 1e-10);
    assert!((&y_plus - &y_oracle).amax() > 1e-6);
}
