use nalgebra::{DMatrix, DVector};

use crate::linalg::DenseCholesky;
use crate::sdp::{gram_entries, GeneralSdp};
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;

/// Cached factorization of `A A^T + Diag(1_l, 0)`.
///
/// Constraints whose matrices share no position are independent in the Gram
/// matrix, so the matrix is split into connected blocks and each block is
/// factored densely. For the theta relaxations most blocks are 1x1.
#[derive(Clone, Debug)]
pub struct GramFactor {
    m: usize,
    blocks: Vec<GramBlock>,
}

#[derive(Clone, Debug)]
struct GramBlock {
    rows: Vec<usize>,
    chol: DenseCholesky,
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Factors the shifted Gram matrix once; fails if it is numerically singular.
pub fn factorize_gram(sdp: &GeneralSdp) -> Result<GramFactor> {
    let m = sdp.num_constraints();
    let l = sdp.num_ineq();
    let entries = gram_entries(sdp);

    let mut parent: Vec<usize> = (0..m).collect();
    for &(i, k, _) in &entries {
        if i != k {
            let (a, b) = (find(&mut parent, i), find(&mut parent, k));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut block_of = vec![usize::MAX; m];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for row in 0..m {
        let root = find(&mut parent, row);
        if block_of[root] == usize::MAX {
            block_of[root] = members.len();
            members.push(Vec::new());
        }
        let b = block_of[root];
        block_of[row] = b;
        members[b].push(row);
    }
    let mut local = vec![0usize; m];
    let mut dense: Vec<DMatrix<f64>> = members
        .iter()
        .map(|rows| {
            for (k, &r) in rows.iter().enumerate() {
                local[r] = k;
            }
            let mut g = DMatrix::zeros(rows.len(), rows.len());
            for (k, &r) in rows.iter().enumerate() {
                if r < l {
                    g[(k, k)] = 1.0;
                }
            }
            g
        })
        .collect();
    for &(i, k, v) in &entries {
        let g = &mut dense[block_of[i]];
        let (a, b) = (local[i], local[k]);
        g[(a, b)] += v;
        if a != b {
            g[(b, a)] += v;
        }
    }
    let blocks = members
        .into_iter()
        .zip(dense)
        .map(|(rows, g)| {
            DenseCholesky::factor(&g, PIVOT_TOL)
                .map(|chol| GramBlock {
                    rows: rows.clone(),
                    chol,
                })
                .map_err(|k| Error::FactorizationFailed { row: rows[k] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramFactor { m, blocks })
}

impl GramFactor {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.len()).max().unwrap_or(0)
    }

    /// Solves `(A A^T + Diag(1_l, 0)) y = rhs`.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.m, "right-hand side has the wrong length");
        let mut out = DVector::zeros(self.m);
        let mut buf = Vec::new();
        for block in &self.blocks {
            buf.clear();
            buf.extend(block.rows.iter().map(|&r| rhs[r]));
            block.chol.solve_in_place(&mut buf);
            for (&r, &v) in block.rows.iter().zip(&buf) {
                out[r] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{Sense, SparseSymMat};

    #[test]
    fn single_equality_trace() {
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        let f = factorize_gram(&sdp).unwrap();
        // [[2]] y = 4  =>  y = 2
        let y = f.solve(&DVector::from_vec(vec![4.0]));
        assert!((y[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_inequality_gets_unit_shift() {
        let sdp = GeneralSdp::builder(1, Sense::Min)
            .le(SparseSymMat::identity(1), 3.0)
            .build()
            .unwrap();
        let f = factorize_gram(&sdp).unwrap();
        let y = f.solve(&DVector::from_vec(vec![2.0]));
        assert!((y[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_equalities_fail() {
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        assert!(matches!(
            factorize_gram(&sdp),
            Err(Error::FactorizationFailed { row: 1 })
        ));
    }

    #[test]
    fn blocks_match_dense_solve() {
        let sdp = GeneralSdp::builder(3, Sense::Min)
            .le(
                SparseSymMat::new(3, [(0, 1, 1.0), (2, 2, 2.0)]).unwrap(),
                1.0,
            )
            .eq(SparseSymMat::new(3, [(0, 0, 1.0)]).unwrap(), 1.0)
            .eq(
                SparseSymMat::new(3, [(0, 1, -0.5), (1, 1, 1.0)]).unwrap(),
                1.0,
            )
            .eq(SparseSymMat::new(3, [(1, 2, 1.0)]).unwrap(), 0.0)
            .build()
            .unwrap();
        let f = factorize_gram(&sdp).unwrap();
        assert_eq!(f.num_blocks(), 3);
        let mut g = sdp.gram();
        g[(0, 0)] += 1.0;
        let rhs = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let y = f.solve(&rhs);
        assert!((&g * &y - &rhs).norm() < 1e-13);
    }
}
