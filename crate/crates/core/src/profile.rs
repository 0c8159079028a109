//! Benchmark records and Dolan–Moré performance profiles.
//!
//! For a time matrix `t[p][s]` the ratio is `r = t[p][s] / min_s t[p][s]`;
//! failures (`None` or a non-finite time) get `r = inf`. A row where every
//! solver failed stays in the instance count, so it lowers every curve.
//! The profile of solver `s` is `rho_s(tau) = |{p : r[p][s] <= tau}| / |P|`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One row of a benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub solver: String,
    pub status: String,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub r_p: Option<f64>,
    pub r_d: Option<f64>,
    pub iters: Option<usize>,
    pub total_time_sec: Option<f64>,
    /// Wall-clock stamp at which the best bound was found.
    pub bound_time_sec: Option<f64>,
    pub postproc_time_sec: Option<f64>,
    pub error: Option<String>,
}

impl BenchRecord {
    /// A row for a run that could not be carried out.
    pub fn failed(
        instance: impl Into<String>,
        solver: impl Into<String>,
        error: impl Into<String>,
    ) -> Self {
        Self {
            instance: instance.into(),
            solver: solver.into(),
            status: "Error".into(),
            objective: None,
            best_bound: None,
            r_p: None,
            r_d: None,
            iters: None,
            total_time_sec: None,
            bound_time_sec: None,
            postproc_time_sec: None,
            error: Some(error.into()),
        }
    }

    pub fn solved(&self) -> bool {
        self.status == "Converged" && self.error.is_none()
    }
}

pub fn write_records<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record([
        "instance",
        "solver",
        "status",
        "objective",
        "best_bound",
        "r_p",
        "r_d",
        "iters",
        "total_time_sec",
        "bound_time_sec",
        "postproc_time_sec",
        "error",
    ])?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|rec| rec.map_err(Error::from))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// `(tau, rho(tau))` at every distinct finite ratio of this solver, `tau`
    /// increasing. `rho` is zero before the first breakpoint.
    pub breakpoints: Vec<(f64, f64)>,
}

impl ProfileCurve {
    pub fn rho(&self, tau: f64) -> f64 {
        self.breakpoints
            .iter()
            .take_while(|&&(t, _)| t <= tau)
            .last()
            .map_or(0.0, |&(_, r)| r)
    }

    /// `rho(inf)`, the fraction of instances this solver solved.
    pub fn solved_fraction(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |&(_, r)| r)
    }
}

fn usable(t: Option<f64>) -> Option<f64> {
    t.filter(|v| v.is_finite() && *v >= 0.0)
}

/// Performance ratios; `inf` marks failures.
pub fn ratios(times: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
    times
        .iter()
        .map(|row| {
            let best = row
                .iter()
                .filter_map(|&t| usable(t))
                .fold(f64::INFINITY, f64::min);
            row.iter()
                .map(|&t| match usable(t) {
                    Some(v) if best > 0.0 => v / best,
                    // zero best time: ties at zero count as ratio 1
                    Some(v) if v == 0.0 => 1.0,
                    Some(_) => f64::INFINITY,
                    None => f64::INFINITY,
                })
                .collect()
        })
        .collect()
}

/// One curve per solver (column of `times`).
pub fn perf_profile(times: &[Vec<Option<f64>>], labels: &[String]) -> Result<Vec<ProfileCurve>> {
    if times.is_empty() || labels.is_empty() {
        return Err(Error::InvalidConfig(
            "profile needs at least one instance and one solver".into(),
        ));
    }
    if let Some(row) = times.iter().find(|r| r.len() != labels.len()) {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: row.len(),
        });
    }
    let r = ratios(times);
    let np = times.len() as f64;
    Ok(labels
        .iter()
        .enumerate()
        .map(|(s, label)| {
            let mut finite: Vec<f64> = r
                .iter()
                .map(|row| row[s])
                .filter(|v| v.is_finite())
                .collect();
            finite.sort_by(f64::total_cmp);
            let mut breakpoints: Vec<(f64, f64)> = Vec::new();
            for (k, &tau) in finite.iter().enumerate() {
                let rho = (k + 1) as f64 / np;
                match breakpoints.last_mut() {
                    Some(last) if last.0 == tau => last.1 = rho,
                    _ => breakpoints.push((tau, rho)),
                }
            }
            ProfileCurve {
                solver: label.clone(),
                breakpoints,
            }
        })
        .collect())
}

/// Time matrix from bench records: instances in first-seen order, solvers in
/// `solvers` order. Unsolved runs and missing pairs are failures.
pub fn time_matrix(
    records: &[BenchRecord],
    solvers: &[String],
) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut order: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, String), Option<f64>> = BTreeMap::new();
    for r in records {
        if !order.contains(&r.instance) {
            order.push(r.instance.clone());
        }
        let t = if r.solved() { r.total_time_sec } else { None };
        cells.insert((r.instance.clone(), r.solver.clone()), t);
    }
    let rows = order
        .iter()
        .map(|inst| {
            solvers
                .iter()
                .map(|s| cells.get(&(inst.clone(), s.clone())).copied().flatten())
                .collect()
        })
        .collect();
    (order, rows)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Step plot of the curves with a log-scaled `tau` axis.
pub fn render_svg(curves: &[ProfileCurve], title: &str) -> String {
    let (w, h, margin) = (640.0, 420.0, 50.0);
    let tau_max = curves
        .iter()
        .flat_map(|c| c.breakpoints.iter().map(|b| b.0))
        .fold(2.0f64, f64::max)
        * 1.1;
    let lx = |tau: f64| margin + (tau.max(1.0).log10() / tau_max.log10()) * (w - 2.0 * margin);
    let ly = |rho: f64| h - margin - rho * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (lx(1.0), lx(tau_max), ly(0.0), ly(1.0));
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#
    );
    for rho in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = ly(rho);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{rho:.2}</text>"#,
            x0 - 4.0,
            y + 3.0
        );
    }
    let mut tick = 1.0;
    while tick <= tau_max {
        let x = lx(tick);
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{tick}</text>"#,
            y0 + 14.0
        );
        tick *= 10.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">tau (log scale)</text>"#,
        w / 2.0,
        h - 10.0
    );
    for (k, c) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = format!("M{},{}", lx(1.0), ly(0.0));
        let mut rho = 0.0;
        for &(tau, r) in &c.breakpoints {
            let _ = write!(d, " L{},{} L{},{}", lx(tau), ly(rho), lx(tau), ly(r));
            rho = r;
        }
        let _ = write!(d, " L{},{}", lx(tau_max), ly(rho));
        let _ = writeln!(
            s,
            r#"<path d="{d}" stroke="{color}" stroke-width="2" fill="none"/>"#
        );
        let ty = margin + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ty}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            w - margin - 120.0,
            escape(&c.solver)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
