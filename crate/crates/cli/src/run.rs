//! Shared run options and the single-instance pipeline used by every
//! subcommand.

use std::path::{Path, PathBuf};
use std::time::Instant;

use adal_sdp::adal::{
    BoundEvent, BoundRequest, SigmaRule, SolveStatus, SolverConfig, SolverResult,
};
use adal_sdp::dualbound::{recover_bound_with, ExternalLp, LpBackend, ReferenceLp, DEFAULT_LP_TOL};
use adal_sdp::profile::BenchRecord;
use adal_sdp::relaxations::{
    build_theta, build_theta_bar_plus_with_cuts, build_theta_plus, complement, read_dimacs,
    sample_triangle_cuts,
};
use adal_sdp::sdp::{read_json, GeneralSdp};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DATA_DIR_VAR: &str = "ADAL_DATA_DIR";

/// Solver and post-processing flags. Every field is optional so that bench
/// manifests can layer per-instance values over `[defaults]`.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SolveOpts {
    /// Stopping tolerance on max(r_P, r_D) [default: 1e-5 for solve, 1e-6 for graphs]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Iteration limit [default: 100000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Wall-clock limit in seconds, bound recovery included [default: 1800]
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Initial penalty parameter [default: 1]
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Keep sigma at sigma0 instead of rebalancing it every iteration
    #[arg(long)]
    pub fixed_sigma: bool,
    /// Iterations between bound recoveries [default: 200]
    #[arg(long)]
    pub postproc_every: Option<usize>,
    /// Feasibility tolerance of the bound LP [default: 1e-5]
    #[arg(long)]
    pub lp_tol: Option<f64>,
    /// Do not recover bounds during the run
    #[arg(long)]
    pub no_postproc: bool,
    /// External LP program; reads {mps}, writes {sol}
    #[arg(long)]
    pub lp_command: Option<PathBuf>,
    /// Argument for --lp-command, repeatable; {mps}, {sol} and {tol} are substituted
    #[arg(long = "lp-arg", allow_hyphen_values = true)]
    pub lp_args: Vec<String>,
    /// Solver label written to records [default: adal]
    #[arg(long)]
    pub label: Option<String>,
}

impl SolveOpts {
    /// `self` with unset fields taken from `base`.
    pub fn or(&self, base: &SolveOpts) -> SolveOpts {
        SolveOpts {
            eps: self.eps.or(base.eps),
            max_iter: self.max_iter.or(base.max_iter),
            time_limit: self.time_limit.or(base.time_limit),
            sigma0: self.sigma0.or(base.sigma0),
            fixed_sigma: self.fixed_sigma || base.fixed_sigma,
            postproc_every: self.postproc_every.or(base.postproc_every),
            lp_tol: self.lp_tol.or(base.lp_tol),
            no_postproc: self.no_postproc || base.no_postproc,
            lp_command: self.lp_command.clone().or_else(|| base.lp_command.clone()),
            lp_args: if self.lp_args.is_empty() {
                base.lp_args.clone()
            } else {
                self.lp_args.clone()
            },
            label: self.label.clone().or_else(|| base.label.clone()),
        }
    }

    pub fn config(&self, base: SolverConfig, log_path: Option<PathBuf>) -> SolverConfig {
        SolverConfig {
            eps: self.eps.unwrap_or(base.eps),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            time_limit_sec: self.time_limit.unwrap_or(base.time_limit_sec),
            sigma0: self.sigma0.unwrap_or(base.sigma0),
            sigma_rule: if self.fixed_sigma {
                SigmaRule::Fixed
            } else {
                base.sigma_rule
            },
            postprocess_every: self.postproc_every.unwrap_or(base.postprocess_every),
            log_path,
            ..base
        }
    }

    pub fn lp_tol(&self) -> f64 {
        self.lp_tol.unwrap_or(DEFAULT_LP_TOL)
    }

    pub fn backend(&self) -> Box<dyn LpBackend> {
        match &self.lp_command {
            Some(p) => Box::new(ExternalLp::new(p, self.lp_args.clone())),
            None => Box::new(ReferenceLp),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| "adal".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Relaxation {
    #[value(name = "theta")]
    #[serde(rename = "theta")]
    Theta,
    #[value(name = "theta+")]
    #[serde(rename = "theta+")]
    ThetaPlus,
    #[value(name = "thetabar+")]
    #[serde(rename = "thetabar+")]
    ThetaBarPlus,
}

/// How a graph is turned into an SDP.
#[derive(Args, Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphOpts {
    /// Relaxation to build
    #[arg(long, value_enum, default_value = "theta+")]
    pub relaxation: Relaxation,
    /// Complement the graph first (clique files become stable-set instances)
    #[arg(long)]
    #[serde(default)]
    pub complement: bool,
    /// Number of random triangle cuts added to thetabar+
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub cuts: usize,
    /// Seed for the cut sample
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub cut_seed: u64,
}

/// Failure class of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, bad flags.
    Input(String),
    /// The solver or the bound machinery gave up.
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<adal_sdp::Error> for Failure {
    fn from(e: adal_sdp::Error) -> Self {
        use adal_sdp::Error as E;
        match e {
            E::FactorizationFailed { .. }
            | E::EigFailed
            | E::ExternalSolver(_)
            | E::RankDeficient { .. } => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::IterLimit | SolveStatus::TimeLimit | SolveStatus::Stalled => 2,
    }
}

/// `path` as given if it exists, otherwise looked up under `$ADAL_DATA_DIR`.
pub fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) if Path::new(&dir).join(path).exists() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn load_instance(path: &Path) -> Result<GeneralSdp, Failure> {
    let p = resolve(path);
    read_json(&p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
}

pub fn load_graph(path: &Path, g: &GraphOpts) -> Result<GeneralSdp, Failure> {
    let p = resolve(path);
    let graph = read_dimacs(&p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    let graph = if g.complement {
        complement(&graph)
    } else {
        graph
    };
    if g.cuts > 0 && g.relaxation != Relaxation::ThetaBarPlus {
        return Err(Failure::Input("--cuts only applies to thetabar+".into()));
    }
    let sdp = match g.relaxation {
        Relaxation::Theta => build_theta(&graph)?,
        Relaxation::ThetaPlus => build_theta_plus(&graph)?,
        Relaxation::ThetaBarPlus => {
            let cuts = sample_triangle_cuts(&graph, g.cuts, g.cut_seed)?;
            build_theta_bar_plus_with_cuts(&graph, &cuts)?
        }
    };
    Ok(sdp)
}

/// Best bound summary for reports; the certificate itself is left out.
#[derive(Clone, Debug, Serialize)]
pub struct BoundSummary {
    pub value: f64,
    pub iter: usize,
    pub elapsed_sec: f64,
    pub feasibility_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    #[serde(skip)]
    pub status: SolveStatus,
    #[serde(flatten)]
    pub record: BenchRecord,
    pub dual_obj: f64,
    pub sigma: f64,
    pub best: Option<BoundSummary>,
    pub bound_log: Vec<BoundEvent>,
    /// Full solver output, present with `--full`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolverResult>,
}

pub fn record_of(instance: &str, solver: &str, r: &SolverResult) -> BenchRecord {
    BenchRecord {
        instance: instance.into(),
        solver: solver.into(),
        status: r.status.as_str().into(),
        objective: Some(r.primal_obj),
        best_bound: r.best_bound.as_ref().map(|b| b.bound.value),
        r_p: Some(r.r_p),
        r_d: Some(r.r_d),
        iters: Some(r.iterations),
        total_time_sec: Some(r.total_time),
        bound_time_sec: r.best_bound.as_ref().map(|b| b.elapsed_sec),
        postproc_time_sec: Some(r.postproc_time),
        error: None,
    }
}

/// Solves `sdp`, recovering bounds on the configured cadence.
pub fn run(
    instance: &str,
    sdp: &GeneralSdp,
    opts: &SolveOpts,
    base: SolverConfig,
    log_path: Option<PathBuf>,
    full: bool,
) -> Result<RunReport, Failure> {
    let config = opts.config(base, log_path);
    let backend = opts.backend();
    let tol = opts.lp_tol();
    let start = Instant::now();
    let mut hook =
        |req: &BoundRequest<'_>| match recover_bound_with(req.sdp, req.z, tol, backend.as_ref()) {
            Ok(b) => Some(b),
            Err(e) => {
                log::warn!(
                    "{instance}: bound recovery at iteration {} failed: {e}",
                    req.iter
                );
                None
            }
        };
    let hook_ref: Option<&mut adal_sdp::adal::BoundHook<'_>> = if opts.no_postproc {
        None
    } else {
        Some(&mut hook)
    };
    let r = adal_sdp::adal::solve(sdp, &config, hook_ref)?;
    log::info!(
        "{instance}: {} after {} iterations, {:.2}s",
        r.status.as_str(),
        r.iterations,
        start.elapsed().as_secs_f64()
    );
    let record = record_of(instance, &opts.label(), &r);
    let best = r.best_bound.as_ref().map(|b| BoundSummary {
        value: b.bound.value,
        iter: b.iter,
        elapsed_sec: b.elapsed_sec,
        feasibility_residual: b.bound.feasibility_residual,
    });
    Ok(RunReport {
        status: r.status,
        record,
        dual_obj: r.dual_obj,
        sigma: r.sigma,
        best,
        bound_log: r.bound_log.clone(),
        solution: full.then_some(r),
    })
}

/// Name used for an instance in records: the file stem.
pub fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
