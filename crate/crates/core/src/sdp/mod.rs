//! Problem data for general-form SDPs and the linear operator algebra.
//!
//! All algebra goes through trace inner products; no vectorized form of the
//! constraint operator is ever built.

mod io;
mod matrix;
mod problem;

use std::collections::HashMap;

pub use io::{read_json, write_json, SdpFile};
pub(crate) use matrix::symmetrize_in_place;
pub use matrix::{fro_norm, fro_norm_sparse, inner, InnerWith, SparseSymMat, SymMat};
pub use problem::{Constraint, ConstraintSense, GeneralSdp, SdpBuilder, Sense};

/// Nonzero entries `(i, k, <A_i, A_k>)` of the Gram matrix with `i <= k`,
/// sorted by `(i, k)`.
pub(crate) fn gram_entries(sdp: &GeneralSdp) -> Vec<(usize, usize, f64)> {
    let mut by_position: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
    for (row, c) in sdp.constraints().iter().enumerate() {
        for &(i, j, v) in c.matrix.entries() {
            by_position.entry((i, j)).or_default().push((row, v));
        }
    }
    let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
    for (&(i, j), rows) in &by_position {
        let weight = if i == j { 1.0 } else { 2.0 };
        for (a, &(ra, va)) in rows.iter().enumerate() {
            for &(rb, vb) in &rows[a..] {
                let key = if ra <= rb { (ra, rb) } else { (rb, ra) };
                *acc.entry(key).or_insert(0.0) += weight * va * vb;
            }
        }
    }
    let mut out: Vec<_> = acc.into_iter().map(|((a, b), v)| (a, b, v)).collect();
    out.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    out
}
