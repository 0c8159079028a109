//! Batch runs from a TOML manifest.
//!
//! ```toml
//! [defaults]
//! eps = 1e-6
//! postproc-every = 200
//!
//! [[instance]]
//! path = "myciel4.col"
//! relaxation = "thetabar+"
//! cuts = 100
//! label = "cuts100"
//!
//! [[instance]]
//! path = "random.json"    # no relaxation: an SDP instance file
//! profile = false         # left out of performance profiles
//! ```
//!
//! Relative paths are resolved against the manifest's directory, then
//! against `$ADAL_DATA_DIR`.

use std::path::{Path, PathBuf};

use adal_sdp::adal::SolverConfig;
use adal_sdp::profile::BenchRecord;
use rayon::prelude::*;
use serde::Deserialize;

use crate::run::{
    instance_name, load_graph, load_instance, run, Failure, GraphOpts, Relaxation, SolveOpts,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: SolveOpts,
    #[serde(default, rename = "instance")]
    pub instances: Vec<Entry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Entry {
    pub path: PathBuf,
    /// Record name; the file stem when absent.
    pub name: Option<String>,
    pub relaxation: Option<Relaxation>,
    #[serde(default)]
    pub complement: bool,
    #[serde(default)]
    pub cuts: usize,
    #[serde(default)]
    pub cut_seed: u64,
    /// Include this instance in performance profiles.
    #[serde(default = "yes")]
    pub profile: bool,
    #[serde(flatten)]
    pub opts: SolveOpts,
}

fn yes() -> bool {
    true
}

impl Entry {
    pub fn name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| instance_name(&self.path))
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut m: Manifest =
        toml::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    for e in &mut m.instances {
        if e.path.is_relative() && dir.join(&e.path).exists() {
            e.path = dir.join(&e.path);
        }
    }
    Ok(m)
}

fn run_entry(e: &Entry, defaults: &SolveOpts, log_dir: Option<&Path>, index: usize) -> BenchRecord {
    let opts = e.opts.or(defaults);
    let name = e.name();
    let loaded = match e.relaxation {
        Some(relaxation) => {
            let g = GraphOpts {
                relaxation,
                complement: e.complement,
                cuts: e.cuts,
                cut_seed: e.cut_seed,
            };
            load_graph(&e.path, &g).map(|sdp| (sdp, SolverConfig::for_graphs()))
        }
        None => load_instance(&e.path).map(|sdp| (sdp, SolverConfig::default())),
    };
    // one log file per run so parallel workers never share a file
    let log_path = log_dir.map(|d| d.join(format!("{index:03}-{name}-{}.csv", opts.label())));
    match loaded.and_then(|(sdp, base)| run(&name, &sdp, &opts, base, log_path, false)) {
        Ok(report) => report.record,
        Err(f) => {
            log::error!("{name}: {}", f.message());
            BenchRecord::failed(name, opts.label(), f.message())
        }
    }
}

/// Runs every entry, at most `jobs` at a time. Rows follow manifest order.
pub fn run_manifest(
    m: &Manifest,
    jobs: usize,
    log_dir: Option<&Path>,
) -> Result<Vec<BenchRecord>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Failure::Input(e.to_string()))?;
    Ok(pool.install(|| {
        m.instances
            .par_iter()
            .enumerate()
            .map(|(i, e)| run_entry(e, &m.defaults, log_dir, i))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_layers_defaults() {
        let m: Manifest = toml::from_str(
            r#"
            [defaults]
            eps = 1e-4
            max-iter = 10

            [[instance]]
            path = "a.col"
            relaxation = "thetabar+"
            cuts = 5
            max-iter = 20
            profile = false
            "#,
        )
        .unwrap();
        let e = &m.instances[0];
        let opts = e.opts.or(&m.defaults);
        assert_eq!(opts.eps, Some(1e-4));
        assert_eq!(opts.max_iter, Some(20));
        assert_eq!(e.relaxation, Some(Relaxation::ThetaBarPlus));
        assert!(!e.profile);
        assert_eq!(e.name(), "a");
    }

    #[test]
    fn empty_manifest_is_valid() {
        let m: Manifest = toml::from_str("").unwrap();
        assert!(m.instances.is_empty());
    }
}
