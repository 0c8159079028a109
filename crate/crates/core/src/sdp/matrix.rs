use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Dense symmetric matrix. Both triangles are stored and kept equal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat {
    data: DMatrix<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    /// Builds the matrix from its upper triangle: `f(i, j)` is called for `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self { data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            data[(i, i)] = d;
        }
        Self { data }
    }

    /// Wraps a square matrix that must already be exactly symmetric.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        let n = data.nrows();
        for j in 0..n {
            for i in 0..j {
                if data[(i, j)] != data[(j, i)] {
                    return Err(Error::InvalidInstance(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { data })
    }

    /// Wraps a square matrix, replacing it by `(M + M^T) / 2`.
    pub fn symmetrized(mut data: DMatrix<f64>) -> Self {
        assert_eq!(data.nrows(), data.ncols(), "matrix must be square");
        symmetrize_in_place(&mut data);
        Self { data }
    }

    /// Builds a matrix from rows, e.g. `SymMat::from_rows(&[[0.0, 1.0], [1.0, 0.0]])`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                data[(i, j)] = v;
            }
        }
        Self::from_matrix(data)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[(i, j)] = value;
        self.data[(j, i)] = value;
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Mutable access for in-crate kernels that preserve symmetry.
    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.data
    }

    /// `trace(self * other)`.
    pub fn inner(&self, other: &SymMat) -> Result<f64> {
        self.check_dim(other.n())?;
        Ok(self.data.dot(&other.data))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scaled(&self, alpha: f64) -> SymMat {
        SymMat {
            data: &self.data * alpha,
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &SymMat) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

pub(crate) fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SymMatRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for SymMat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.data[(i, j)]).collect())
            .collect();
        SymMatRepr { n, rows }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SymMatRepr::deserialize(deserializer)?;
        if repr.rows.len() != repr.n {
            return Err(serde::de::Error::custom("row count does not match n"));
        }
        SymMat::from_rows(&repr.rows).map_err(serde::de::Error::custom)
    }
}

/// Sparse symmetric matrix stored as upper-triangle triplets `(i, j, v)`
/// with `i <= j`; the value also applies at `(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMat {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymMat {
    /// Positions may be given in either triangle; they are normalized to
    /// `i <= j`. Repeated positions are rejected.
    pub fn new(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance(
                "matrix dimension must be >= 1".into(),
            ));
        }
        let mut seen = BTreeMap::new();
        for (i, j, v) in triplets {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            if j >= n {
                return Err(Error::IndexOutOfRange { i, j, n });
            }
            if seen.insert((i, j), v).is_some() {
                return Err(Error::DuplicateEntry { i, j });
            }
        }
        let entries = seen.into_iter().map(|((i, j), v)| (i, j, v)).collect();
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: (0..n).map(|i| (i, i, 1.0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Upper-triangle entries sorted by position.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `(i, j)` in either triangle.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    pub fn scaled(&self, alpha: f64) -> SparseSymMat {
        SparseSymMat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|&(i, j, v)| (i, j, alpha * v))
                .collect(),
        }
    }

    /// `trace(self * x)`; off-diagonal entries count twice.
    pub fn inner(&self, x: &SymMat) -> Result<f64> {
        x.check_dim(self.n)?;
        Ok(self.inner_unchecked(x.as_matrix()))
    }

    pub(crate) fn inner_unchecked(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * x[(i, i)]
                } else {
                    2.0 * v * x[(i, j)]
                }
            })
            .sum()
    }

    /// Inner product of two sparse symmetric matrices.
    pub fn inner_sparse(&self, other: &SparseSymMat) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.entries.len() && b < other.entries.len() {
            let (i, j, u) = self.entries[a];
            let (k, l, v) = other.entries[b];
            match (i, j).cmp(&(k, l)) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += if i == j { u * v } else { 2.0 * u * v };
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn fro_norm(&self) -> f64 {
        self.inner_sparse(self).sqrt()
    }

    /// `m += alpha * self` on both triangles.
    pub(crate) fn add_to(&self, m: &mut DMatrix<f64>, alpha: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += alpha * v;
            if i != j {
                m[(j, i)] += alpha * v;
            }
        }
    }

    pub fn to_dense(&self) -> SymMat {
        let mut m = DMatrix::zeros(self.n, self.n);
        self.add_to(&mut m, 1.0);
        SymMat::symmetrized(m)
    }
}

/// `trace(a * x)` for a dense or sparse `a`.
pub fn inner(a: &impl InnerWith, x: &SymMat) -> Result<f64> {
    a.inner_with(x)
}

/// Frobenius norm `sqrt(<x, x>)`.
pub fn fro_norm(x: &SymMat) -> f64 {
    x.fro_norm()
}

pub fn fro_norm_sparse(a: &SparseSymMat) -> f64 {
    a.fro_norm()
}

/// Matrices that can be paired with a dense iterate through the trace inner product.
pub trait InnerWith {
    fn inner_with(&self, x: &SymMat) -> Result<f64>;
}

impl InnerWith for SymMat {
    fn inner_with(&self, x: &SymMat) -> Result<f64> {
        self.inner(x)
    }
}

impl InnerWith for SparseSymMat {
    fn inner_with(&self, x: &SymMat) -> Result<f64> {
        self.inner(x)
    }
}
