use std::collections::VecDeque;
use std::fs::File;
use std::io::BufWriter;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::steps::{
    build_w, residuals, s_update_3block, sigma_update, slack_update, x_update_3block, y_update,
    z_update, zx_update, SolverState,
};
use super::{factorize_gram, GramFactor, SigmaRule, SolverConfig};
use crate::dualbound::{BoundStatus, DualBound};
use crate::sdp::{GeneralSdp, Sense, SymMat};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterLimit,
    TimeLimit,
    Stalled,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::IterLimit => "IterLimit",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::Stalled => "Stalled",
        }
    }
}

/// Summary of one completed iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub r_p: f64,
    pub r_d: f64,
    /// Penalty used during this iteration.
    pub sigma: f64,
    /// Primal objective in the user's sense.
    pub obj: f64,
}

impl IterRecord {
    pub fn delta(&self) -> f64 {
        self.r_p.max(self.r_d)
    }
}

/// What the bound-recovery hook sees: a snapshot of the dual iterate.
pub struct BoundRequest<'a> {
    pub sdp: &'a GeneralSdp,
    pub iter: usize,
    pub z: &'a SymMat,
    pub y: &'a DVector<f64>,
}

/// Called every `postprocess_every` iterations and once at termination.
pub type BoundHook<'a> = dyn FnMut(&BoundRequest<'_>) -> Option<DualBound> + 'a;

/// One call of the bound-recovery hook.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundEvent {
    pub iter: usize,
    /// Wall-clock seconds since the start of the solve when the bound was available.
    pub elapsed_sec: f64,
    pub status: BoundStatus,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BestBound {
    pub bound: DualBound,
    pub iter: usize,
    pub elapsed_sec: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverResult {
    pub status: SolveStatus,
    pub iterations: usize,
    pub r_p: f64,
    pub r_d: f64,
    pub delta: f64,
    /// `<C, X>` in the user's sense, offset included.
    pub primal_obj: f64,
    /// `b^T y` in the user's sense, offset included.
    pub dual_obj: f64,
    pub sigma: f64,
    pub x: SymMat,
    pub z: SymMat,
    pub nonneg_dual: SymMat,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub history: Vec<IterRecord>,
    pub best_bound: Option<BestBound>,
    pub bound_log: Vec<BoundEvent>,
    pub factor_time: f64,
    pub eig_time: f64,
    /// Time spent inside the bound-recovery hook.
    pub postproc_time: f64,
    pub total_time: f64,
}

/// Stateful ADAL driver. [`Solver::step`] performs exactly one iteration,
/// [`Solver::run`] iterates until a stopping rule fires.
pub struct Solver<'a> {
    sdp: &'a GeneralSdp,
    config: SolverConfig,
    factor: GramFactor,
    state: SolverState,
    factor_time: f64,
    eig_time: f64,
}

impl<'a> Solver<'a> {
    pub fn new(sdp: &'a GeneralSdp, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let t = Instant::now();
        let factor = factorize_gram(sdp)?;
        let factor_time = t.elapsed().as_secs_f64();
        let state = SolverState::initial(sdp, config.sigma0);
        Ok(Self {
            sdp,
            config,
            factor,
            state,
            factor_time,
            eig_time: 0.0,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn three_block(&self) -> bool {
        self.sdp.has_mask()
    }

    /// Overrides the penalty for the next iteration.
    pub fn set_sigma(&mut self, sigma: f64) {
        assert!(sigma > 0.0, "sigma must be positive");
        self.state.sigma = sigma;
    }

    /// Primal objective `<C, X>` in the internal (minimization) sense.
    fn internal_primal(&self) -> f64 {
        self.sdp
            .objective()
            .inner_unchecked(self.state.x.as_matrix())
    }

    pub fn residuals(&self) -> (f64, f64) {
        residuals(&self.state, self.sdp)
    }

    /// Runs one iteration (block updates, residuals, penalty update).
    pub fn step(&mut self) -> Result<IterRecord> {
        let sdp = self.sdp;
        let sigma = self.state.sigma;
        let y = y_update(&self.state, sdp, &self.factor);
        let (w, w_slack) = build_w(&self.state, sdp, &y);
        if sdp.has_mask() {
            // y -> Z (previous S) -> S (new Z) -> X
            let t = Instant::now();
            let z = z_update(&w)?;
            self.eig_time += t.elapsed().as_secs_f64();
            let s_mat = s_update_3block(&self.state, sdp, &y, &z);
            self.state.y = y;
            self.state.z = z;
            self.state.nonneg_dual = s_mat;
            self.state.x = x_update_3block(&self.state, sdp);
            let (p, s) = slack_update(&w_slack, sigma);
            self.state.p = p;
            self.state.s = s;
        } else {
            self.state.y = y;
            self.eig_time += zx_update(&mut self.state, &w, &w_slack)?;
        }
        self.state.iter += 1;
        let (r_p, r_d) = self.residuals();
        if self.config.sigma_rule == SigmaRule::LorenzTranDinh {
            self.state.sigma = sigma_update(&self.state);
        }
        Ok(IterRecord {
            iter: self.state.iter,
            r_p,
            r_d,
            sigma,
            obj: sdp.report(self.internal_primal()),
        })
    }

    pub fn run(mut self, mut hook: Option<&mut BoundHook<'_>>) -> Result<SolverResult> {
        let start = Instant::now();
        let sdp = self.sdp;
        let mut log = match &self.config.log_path {
            Some(path) => {
                let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
                w.write_record(["iter", "r_p", "r_d", "sigma", "obj", "elapsed_sec"])?;
                Some(w)
            }
            None => None,
        };

        let mut history = Vec::new();
        let mut bound_log = Vec::new();
        let mut best: Option<BestBound> = None;
        let mut postproc_time = 0.0;
        let mut last_hook_iter = None;
        let mut stall = StallDetector::new(self.config.stall_window, self.config.stall_improvement);

        let (mut r_p, mut r_d) = self.residuals();
        let status = loop {
            if r_p.max(r_d) <= self.config.eps {
                break SolveStatus::Converged;
            }
            if self.state.iter >= self.config.max_iter {
                break SolveStatus::IterLimit;
            }
            if start.elapsed().as_secs_f64() >= self.config.time_limit_sec {
                break SolveStatus::TimeLimit;
            }
            let rec = self.step()?;
            (r_p, r_d) = (rec.r_p, rec.r_d);
            history.push(rec);
            if let Some(w) = log.as_mut() {
                w.serialize((
                    rec.iter,
                    rec.r_p,
                    rec.r_d,
                    rec.sigma,
                    rec.obj,
                    start.elapsed().as_secs_f64(),
                ))?;
            }
            if rec.delta() <= self.config.eps {
                continue;
            }
            if rec.iter % self.config.postprocess_every == 0 {
                if let Some(h) = hook.as_deref_mut() {
                    postproc_time += self.call_hook(h, &start, &mut best, &mut bound_log);
                    last_hook_iter = Some(rec.iter);
                }
            }
            if stall.observe(rec.delta()) {
                break SolveStatus::Stalled;
            }
        };
        if let Some(h) = hook.as_deref_mut() {
            if last_hook_iter != Some(self.state.iter) {
                postproc_time += self.call_hook(h, &start, &mut best, &mut bound_log);
            }
        }
        if let Some(mut w) = log {
            w.flush()?;
        }

        let state = self.state;
        Ok(SolverResult {
            status,
            iterations: state.iter,
            r_p,
            r_d,
            delta: r_p.max(r_d),
            primal_obj: sdp.report(sdp.objective().inner_unchecked(state.x.as_matrix())),
            dual_obj: sdp.report(sdp.rhs().dot(&state.y)),
            sigma: state.sigma,
            y: state.y.as_slice().to_vec(),
            s: state.s.as_slice().to_vec(),
            p: state.p.as_slice().to_vec(),
            x: state.x,
            z: state.z,
            nonneg_dual: state.nonneg_dual,
            history,
            best_bound: best,
            bound_log,
            factor_time: self.factor_time,
            eig_time: self.eig_time,
            postproc_time,
            total_time: start.elapsed().as_secs_f64(),
        })
    }

    /// Returns the seconds spent in the hook.
    fn call_hook(
        &self,
        hook: &mut BoundHook<'_>,
        start: &Instant,
        best: &mut Option<BestBound>,
        log: &mut Vec<BoundEvent>,
    ) -> f64 {
        let t = Instant::now();
        let z = self.state.z.clone();
        let req = BoundRequest {
            sdp: self.sdp,
            iter: self.state.iter,
            z: &z,
            y: &self.state.y,
        };
        let outcome = hook(&req);
        let spent = t.elapsed().as_secs_f64();
        let elapsed_sec = start.elapsed().as_secs_f64();
        if let Some(bound) = outcome {
            let certified = bound.status == BoundStatus::Certified;
            log.push(BoundEvent {
                iter: self.state.iter,
                elapsed_sec,
                status: bound.status,
                value: certified.then_some(bound.value),
            });
            if certified && improves(self.sdp.user_sense(), best.as_ref(), bound.value) {
                *best = Some(BestBound {
                    bound,
                    iter: self.state.iter,
                    elapsed_sec,
                });
            }
        }
        spent
    }
}

/// Upper bounds for maximization improve downwards, lower bounds for
/// minimization upwards.
fn improves(sense: Sense, best: Option<&BestBound>, value: f64) -> bool {
    match best {
        None => true,
        Some(b) => match sense {
            Sense::Max => value < b.bound.value,
            Sense::Min => value > b.bound.value,
        },
    }
}

/// Flags a run whose best `delta` has not improved by the required
/// relative amount over the last `window` iterations.
struct StallDetector {
    window: usize,
    improvement: f64,
    best: f64,
    past: VecDeque<f64>,
}

impl StallDetector {
    fn new(window: usize, improvement: f64) -> Self {
        Self {
            window,
            improvement,
            best: f64::INFINITY,
            past: VecDeque::with_capacity(window + 1),
        }
    }

    fn observe(&mut self, delta: f64) -> bool {
        self.best = self.best.min(delta);
        self.past.push_back(self.best);
        if self.past.len() <= self.window {
            return false;
        }
        let then = self.past.pop_front().unwrap_or(f64::INFINITY);
        self.best > (1.0 - self.improvement) * then
    }
}

/// Runs ADAL to completion, optionally with a bound-recovery hook.
pub fn solve(
    sdp: &GeneralSdp,
    config: &SolverConfig,
    hook: Option<&mut BoundHook<'_>>,
) -> Result<SolverResult> {
    Solver::new(sdp, config.clone())?.run(hook)
}
