mod bench;
mod run;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adal_sdp::adal::SolverConfig;
use adal_sdp::dualbound::recover_bound_with;
use adal_sdp::profile::{perf_profile, read_records, render_svg, time_matrix, write_records};
use adal_sdp::randgen::{generate, GenSpec, Sidecar};
use adal_sdp::sdp::{write_json, SymMat};
use clap::{Parser, Subcommand};
use serde::Serialize;

use run::{exit_code, instance_name, load_graph, load_instance, Failure, GraphOpts, SolveOpts};

/// ADAL solver for general-form SDPs with certified dual bounds.
///
/// Relative input paths that do not exist are looked up under $ADAL_DATA_DIR.
/// Exit codes: 0 converged, 2 iteration/time limit or stalled, 3 solver
/// failure, 1 unreadable input or bad arguments.
#[derive(Parser, Debug)]
#[command(name = "adal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an SDP instance file (JSON)
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Build a theta-family relaxation of a DIMACS graph and solve it
    Theta {
        graph: PathBuf,
        #[command(flatten)]
        graph_opts: GraphOpts,
        #[command(flatten)]
        opts: SolveOpts,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Recover a certified bound from a dual matrix Z
    Bound {
        instance: PathBuf,
        /// JSON file holding Z as {"n", "rows"}, or a `--full` report
        #[arg(long)]
        z: PathBuf,
        /// Feasibility tolerance of the bound LP
        #[arg(long, default_value_t = adal_sdp::dualbound::DEFAULT_LP_TOL)]
        lp_tol: f64,
        #[arg(long)]
        lp_command: Option<PathBuf>,
        #[arg(long = "lp-arg", allow_hyphen_values = true)]
        lp_args: Vec<String>,
        /// Write the LP in MPS format to this file as well
        #[arg(long)]
        mps: Option<PathBuf>,
        /// Report file; stdout when absent
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a random instance with a known optimum
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Fraction of inequality constraints
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Nonzeros per constraint matrix [default: min(3, n(n+1)/2)]
        #[arg(long)]
        density: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance file; the known optimum goes to <out>.opt.json
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run a TOML manifest and write one CSV row per instance
    Bench {
        manifest: PathBuf,
        /// Concurrent solves
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV file; stdout when absent
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Directory receiving one iteration log per run
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Performance profiles from bench CSV files
    Profile {
        /// One or more bench CSV files
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Solver labels to compare, in order [default: all, first-seen order]
        #[arg(long, value_delimiter = ',')]
        solvers: Vec<String>,
        /// Manifest whose `profile = false` entries are left out
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// SVG plot output
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Curve breakpoints as CSV; stdout when absent
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "Performance profile")]
        title: String,
    },
}

#[derive(clap::Args, Debug)]
struct OutOpts {
    /// Report file (JSON); stdout when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-iteration CSV log
    #[arg(long)]
    log: Option<PathBuf>,
    /// Include X, Z, y and the iteration history in the report
    #[arg(long)]
    full: bool,
}

fn input(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| input(p, e))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json(value: &impl Serialize, path: Option<&Path>) -> Result<(), Failure> {
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| Failure::Input(e.to_string()))
}

fn solve_and_report(
    name: &str,
    sdp: &adal_sdp::sdp::GeneralSdp,
    opts: &SolveOpts,
    base: SolverConfig,
    out: &OutOpts,
) -> Result<i32, Failure> {
    let report = run::run(name, sdp, opts, base, out.log.clone(), out.full)?;
    let code = exit_code(report.status);
    emit_json(&report, out.out.as_deref())?;
    Ok(code)
}

fn read_z(path: &Path) -> Result<SymMat, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path, e))?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| input(path, e))?;
    // a `--full` report keeps Z under solution.z
    if let Some(z) = v.pointer_mut("/solution/z") {
        v = z.take();
    } else if let Some(z) = v.get_mut("z") {
        v = z.take();
    }
    serde_json::from_value(v).map_err(|e| input(path, e))
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Solve {
            instance,
            opts,
            out,
        } => {
            let sdp = load_instance(&instance)?;
            solve_and_report(
                &instance_name(&instance),
                &sdp,
                &opts,
                SolverConfig::default(),
                &out,
            )
        }
        Command::Theta {
            graph,
            graph_opts,
            opts,
            out,
        } => {
            let sdp = load_graph(&graph, &graph_opts)?;
            solve_and_report(
                &instance_name(&graph),
                &sdp,
                &opts,
                SolverConfig::for_graphs(),
                &out,
            )
        }
        Command::Bound {
            instance,
            z,
            lp_tol,
            lp_command,
            lp_args,
            mps,
            out,
        } => {
            let sdp = load_instance(&instance)?;
            let z = read_z(&run::resolve(&z))?;
            if let Some(p) = &mps {
                let z_hat = adal_sdp::dualbound::psd_repair(&z)?;
                let blp = adal_sdp::dualbound::build_bound_lp(&sdp, &z_hat);
                std::fs::write(
                    p,
                    adal_sdp::dualbound::write_mps(&blp.lp, &instance_name(&instance)),
                )
                .map_err(|e| input(p, e))?;
            }
            let opts = SolveOpts {
                lp_command,
                lp_args,
                ..SolveOpts::default()
            };
            let b = recover_bound_with(&sdp, &z, lp_tol, opts.backend().as_ref())?;
            emit_json(&b, out.as_deref())?;
            Ok(if b.is_certified() { 0 } else { 3 })
        }
        Command::Gen {
            n,
            m,
            p,
            density,
            seed,
            out,
        } => {
            let mut spec = GenSpec::new(n, m, p, seed);
            if let Some(d) = density {
                spec.density = d;
            }
            spec.validate()?;
            let g = generate(&spec)?;
            write_json(&g.sdp, &out).map_err(|e| input(&out, e))?;
            let side = sidecar_path(&out);
            Sidecar::new(&spec, &g)
                .write(&side)
                .map_err(|e| input(&side, e))?;
            eprintln!("known optimum {:.10}", g.known_optimum);
            Ok(0)
        }
        Command::Bench {
            manifest,
            jobs,
            out,
            log_dir,
        } => {
            let m = bench::read_manifest(&manifest)?;
            if let Some(d) = &log_dir {
                std::fs::create_dir_all(d).map_err(|e| input(d, e))?;
            }
            let records = bench::run_manifest(&m, jobs, log_dir.as_deref())?;
            write_records(&records, writer(out.as_deref())?)?;
            Ok(0)
        }
        Command::Profile {
            csv,
            solvers,
            manifest,
            svg,
            out,
            title,
        } => {
            let mut records = Vec::new();
            for p in &csv {
                let f = File::open(p).map_err(|e| input(p, e))?;
                records.extend(read_records(f).map_err(|e| input(p, e))?);
            }
            if let Some(mp) = &manifest {
                let excluded: BTreeSet<String> = bench::read_manifest(mp)?
                    .instances
                    .iter()
                    .filter(|e| !e.profile)
                    .map(|e| e.name())
                    .collect();
                records.retain(|r| !excluded.contains(&r.instance));
            }
            let solvers = if solvers.is_empty() {
                let mut seen = Vec::new();
                for r in &records {
                    if !seen.contains(&r.solver) {
                        seen.push(r.solver.clone());
                    }
                }
                seen
            } else {
                solvers
            };
            let (_, times) = time_matrix(&records, &solvers);
            let curves = perf_profile(&times, &solvers)?;
            if let Some(p) = &svg {
                std::fs::write(p, render_svg(&curves, &title)).map_err(|e| input(p, e))?;
            }
            let mut w = csv_writer(out.as_deref())?;
            w.write_record(["solver", "tau", "rho"])
                .map_err(|e| Failure::Input(e.to_string()))?;
            for c in &curves {
                for &(tau, rho) in &c.breakpoints {
                    w.serialize((&c.solver, tau, rho))
                        .map_err(|e| Failure::Input(e.to_string()))?;
                }
            }
            w.flush().map_err(|e| Failure::Input(e.to_string()))?;
            Ok(0)
        }
    }
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    Ok(csv::Writer::from_writer(writer(path)?))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.opt.json"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap would exit with 2 on bad arguments, which is taken by "limit reached"
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
