//! JSON instance format.
//!
//! ```json
//! {
//!   "n": 2,
//!   "sense": "min",
//!   "offset": 0.0,
//!   "objective": [[1, 1, 2.0]],
//!   "constraints": [
//!     { "triplets": [[1, 1, 1.0], [2, 2, 1.0]], "rhs": 1.0, "sense": "eq" },
//!     { "triplets": [[1, 2, 0.5]], "rhs": 3.0, "sense": "le" }
//!   ],
//!   "nonneg_mask": [[1, 2]]
//! }
//! ```
//!
//! Indices are 1-based. Triplets list each symmetric position once (either
//! triangle) and the value applies to both `(i, j)` and `(j, i)`, so
//! `[1, 2, 0.5]` reads `<A, X> = X_12`. The objective is written in the
//! user's sense; `offset` is added to the reported objective value.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Constraint, ConstraintSense, GeneralSdp, Sense, SparseSymMat};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpFile {
    pub n: usize,
    pub sense: Sense,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub objective: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub constraints: Vec<ConstraintFile>,
    #[serde(default)]
    pub nonneg_mask: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: f64,
    pub sense: ConstraintSense,
}

fn to_zero_based(n: usize, (i, j, v): (usize, usize, f64)) -> Result<(usize, usize, f64)> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    Ok((i - 1, j - 1, v))
}

fn sparse(n: usize, triplets: &[(usize, usize, f64)]) -> Result<SparseSymMat> {
    let t = triplets
        .iter()
        .map(|&t| to_zero_based(n, t))
        .collect::<Result<Vec<_>>>()?;
    SparseSymMat::new(n, t)
}

fn one_based(m: &SparseSymMat) -> Vec<(usize, usize, f64)> {
    m.entries()
        .iter()
        .map(|&(i, j, v)| (i + 1, j + 1, v))
        .collect()
}

impl SdpFile {
    pub fn into_sdp(self) -> Result<GeneralSdp> {
        let n = self.n;
        let mut b = GeneralSdp::builder(n, self.sense)
            .objective(sparse(n, &self.objective)?)
            .offset(self.offset);
        for c in &self.constraints {
            b = b.constraint(Constraint {
                matrix: sparse(n, &c.triplets)?,
                rhs: c.rhs,
                sense: c.sense,
            });
        }
        let mask = self
            .nonneg_mask
            .iter()
            .map(|&(i, j)| to_zero_based(n, (i, j, 0.0)).map(|(i, j, _)| (i, j)))
            .collect::<Result<Vec<_>>>()?;
        b.nonneg(mask).build()
    }

    pub fn from_sdp(sdp: &GeneralSdp) -> Self {
        SdpFile {
            n: sdp.n(),
            sense: sdp.user_sense(),
            offset: sdp.offset(),
            objective: one_based(&sdp.user_objective()),
            constraints: sdp
                .constraints()
                .iter()
                .map(|c| ConstraintFile {
                    triplets: one_based(&c.matrix),
                    rhs: c.rhs,
                    sense: c.sense,
                })
                .collect(),
            nonneg_mask: sdp
                .nonneg_mask()
                .iter()
                .map(|&(i, j)| (i + 1, j + 1))
                .collect(),
        }
    }
}

pub fn read_json(path: impl AsRef<Path>) -> Result<GeneralSdp> {
    let file: SdpFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    file.into_sdp()
}

pub fn write_json(sdp: &GeneralSdp, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &SdpFile::from_sdp(sdp))?;
    w.flush()?;
    Ok(())
}
