//! Adapter for external LP engines.
//!
//! The LP is written in free MPS with `OBJSENSE MAX`. Columns are named
//! `x0, x1, ...` and rows `r0, r1, ...`. Free columns get an `FR` bound,
//! other bounds use `LO`/`UP` (`MI` for an infinite lower bound with a finite
//! upper one).
//!
//! The engine is expected to write a plain solution file:
//!
//! ```text
//! status optimal
//! x0 1.5
//! x3 -2
//! ```
//!
//! The first line is `status optimal`, `status infeasible` or
//! `status unbounded`; missing columns are read as zero, lines starting with
//! `#` are ignored.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::lp::{LinearProgram, LpOutcome, RowSense};
use super::LpBackend;
use crate::{Error, Result};

pub fn write_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("OBJSENSE\n    MAX\nROWS\n N obj\n");
    for (i, row) in lp.rows.iter().enumerate() {
        let t = match row.sense {
            RowSense::Eq => 'E',
            RowSense::Le => 'L',
            RowSense::Ge => 'G',
        };
        let _ = writeln!(out, " {t} r{i}");
    }
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            by_col[j].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, col) in by_col.iter().enumerate() {
        let c = lp.objective[j];
        if c != 0.0 || col.is_empty() {
            let _ = writeln!(out, "    x{j} obj {c:e}");
        }
        for &(i, a) in col {
            let _ = writeln!(out, "    x{j} r{i} {a:e}");
        }
    }
    out.push_str("RHS\n");
    for (i, row) in lp.rows.iter().enumerate() {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    rhs r{i} {:e}", row.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_vars() {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR bnd x{j}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI bnd x{j}");
                let _ = writeln!(out, " UP bnd x{j} {hi:e}");
            }
            (true, _) => {
                if lo != 0.0 {
                    let _ = writeln!(out, " LO bnd x{j} {lo:e}");
                }
                if hi.is_finite() {
                    let _ = writeln!(out, " UP bnd x{j} {hi:e}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Parses a solution file (format in the module docs).
pub fn parse_solution(text: &str, lp: &LinearProgram) -> Result<LpOutcome> {
    let bad = |msg: String| Error::ExternalSolver(msg);
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let status = lines
        .next()
        .and_then(|l| l.strip_prefix("status"))
        .map(str::trim)
        .ok_or_else(|| bad("missing status line".into()))?;
    match status {
        "infeasible" => return Ok(LpOutcome::Infeasible),
        "unbounded" => return Ok(LpOutcome::Unbounded),
        "optimal" => {}
        other => return Err(bad(format!("unknown status {other:?}"))),
    }
    let mut x = vec![0.0; lp.num_vars()];
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some(name), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(format!("malformed line {line:?}")));
        };
        let j: usize = name
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .filter(|&j| j < x.len())
            .ok_or_else(|| bad(format!("unknown column {name:?}")))?;
        x[j] = val
            .parse()
            .map_err(|_| bad(format!("bad value {val:?} for {name}")))?;
    }
    let objective = lp.objective_value(&x);
    Ok(LpOutcome::Optimal { x, objective })
}

/// Runs an external program on each LP. In `args`, `{mps}`, `{sol}` and
/// `{tol}` are replaced by the model path, the expected solution path and the
/// feasibility tolerance.
#[derive(Clone, Debug)]
pub struct ExternalLp {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub work_dir: PathBuf,
}

static COUNTER: AtomicUsize = AtomicUsize::new(0);

impl ExternalLp {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
            work_dir: std::env::temp_dir(),
        }
    }
}

impl LpBackend for ExternalLp {
    fn solve(&self, lp: &LinearProgram, tol: f64) -> Result<LpOutcome> {
        let id = COUNTER.fetch_add(1, Ordering::Relaxed);
        let stem = format!("adal-bound-{}-{id}", std::process::id());
        let mps = self.work_dir.join(format!("{stem}.mps"));
        let sol = self.work_dir.join(format!("{stem}.sol"));
        std::fs::write(&mps, write_mps(lp, &stem))?;
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| {
                a.replace("{mps}", &mps.to_string_lossy())
                    .replace("{sol}", &sol.to_string_lossy())
                    .replace("{tol}", &tol.to_string())
            })
            .collect();
        let status = Command::new(&self.program).args(&args).status();
        let outcome = match status {
            Ok(s) if s.success() => std::fs::read_to_string(&sol)
                .map_err(Error::from)
                .and_then(|text| parse_solution(&text, lp)),
            Ok(s) => Err(Error::ExternalSolver(format!(
                "{} exited with {s}",
                self.program.display()
            ))),
            Err(e) => Err(Error::ExternalSolver(format!(
                "{}: {e}",
                self.program.display()
            ))),
        };
        let _ = std::fs::remove_file(&mps);
        let _ = std::fs::remove_file(&sol);
        outcome
    }
}
