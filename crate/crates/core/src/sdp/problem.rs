use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{SparseSymMat, SymMat};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// `+1` for minimization, `-1` for maximization.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintSense {
    /// `<A, X> <= b`
    Le,
    /// `<A, X> = b`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub matrix: SparseSymMat,
    pub rhs: f64,
    pub sense: ConstraintSense,
}

impl Constraint {
    pub fn le(matrix: SparseSymMat, rhs: f64) -> Self {
        Self {
            matrix,
            rhs,
            sense: ConstraintSense::Le,
        }
    }

    pub fn eq(matrix: SparseSymMat, rhs: f64) -> Self {
        Self {
            matrix,
            rhs,
            sense: ConstraintSense::Eq,
        }
    }
}

/// A semidefinite program in general form, stored internally as a
/// minimization with all inequality rows ahead of the equality rows.
///
/// For a maximization problem the objective is stored negated; reported
/// values are `sense.sign() * internal + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralSdp {
    n: usize,
    objective: SparseSymMat,
    constraints: Vec<Constraint>,
    num_ineq: usize,
    nonneg_mask: Vec<(usize, usize)>,
    user_sense: Sense,
    offset: f64,
    rhs: DVector<f64>,
}

impl GeneralSdp {
    pub fn builder(n: usize, sense: Sense) -> SdpBuilder {
        SdpBuilder::new(n, sense)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Objective matrix in the internal (minimization) sense.
    pub fn objective(&self) -> &SparseSymMat {
        &self.objective
    }

    /// Objective matrix as the user wrote it.
    pub fn user_objective(&self) -> SparseSymMat {
        self.objective.scaled(self.user_sense.sign())
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Number of inequality rows `l`; rows `0..l` are inequalities.
    pub fn num_ineq(&self) -> usize {
        self.num_ineq
    }

    /// Total number of constraints `m`.
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// Upper-triangle positions `(i, j)`, `i <= j`, constrained to `X_ij >= 0`.
    pub fn nonneg_mask(&self) -> &[(usize, usize)] {
        &self.nonneg_mask
    }

    pub fn has_mask(&self) -> bool {
        !self.nonneg_mask.is_empty()
    }

    pub fn user_sense(&self) -> Sense {
        self.user_sense
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Converts an internal objective value to the user's sense and offset.
    pub fn report(&self, internal: f64) -> f64 {
        self.user_sense.sign() * internal + self.offset
    }

    /// `(A(X))_i = <A_i, X>` in constraint order.
    pub fn apply_a(&self, x: &SymMat) -> Result<DVector<f64>> {
        x.check_dim(self.n)?;
        Ok(self.apply_a_unchecked(x.as_matrix()))
    }

    pub(crate) fn apply_a_unchecked(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints.iter().map(|c| c.matrix.inner_unchecked(x)),
        )
    }

    /// `sum_i y_i A_i` as a dense matrix.
    pub fn apply_at(&self, y: &[f64]) -> Result<SymMat> {
        if y.len() != self.constraints.len() {
            return Err(Error::DimensionMismatch {
                expected: self.constraints.len(),
                found: y.len(),
            });
        }
        let mut m = DMatrix::zeros(self.n, self.n);
        self.add_at_unchecked(y, &mut m, 1.0);
        Ok(SymMat::symmetrized(m))
    }

    /// `m += alpha * sum_i y_i A_i`.
    pub(crate) fn add_at_unchecked(&self, y: &[f64], m: &mut DMatrix<f64>, alpha: f64) {
        for (c, &yi) in self.constraints.iter().zip(y) {
            if yi != 0.0 {
                c.matrix.add_to(m, alpha * yi);
            }
        }
    }

    /// Dense `A A^T`: entry `(i, k)` is `<A_i, A_k>`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.constraints.len();
        let mut g = DMatrix::zeros(m, m);
        for (i, k, v) in super::gram_entries(self) {
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
        g
    }
}

/// Collects the pieces of a [`GeneralSdp`] in any order and enforces the
/// internal conventions on [`SdpBuilder::build`].
#[derive(Clone, Debug)]
pub struct SdpBuilder {
    n: usize,
    sense: Sense,
    objective: Option<SparseSymMat>,
    constraints: Vec<Constraint>,
    mask: Vec<(usize, usize)>,
    offset: f64,
}

impl SdpBuilder {
    pub fn new(n: usize, sense: Sense) -> Self {
        Self {
            n,
            sense,
            objective: None,
            constraints: Vec::new(),
            mask: Vec::new(),
            offset: 0.0,
        }
    }

    /// Objective in the user's sense.
    pub fn objective(mut self, c: SparseSymMat) -> Self {
        self.objective = Some(c);
        self
    }

    pub fn constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn constraints(mut self, cs: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(cs);
        self
    }

    pub fn le(self, matrix: SparseSymMat, rhs: f64) -> Self {
        self.constraint(Constraint::le(matrix, rhs))
    }

    pub fn eq(self, matrix: SparseSymMat, rhs: f64) -> Self {
        self.constraint(Constraint::eq(matrix, rhs))
    }

    pub fn nonneg(mut self, positions: impl IntoIterator<Item = (usize, usize)>) -> Self {
        self.mask.extend(positions);
        self
    }

    pub fn offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn build(self) -> Result<GeneralSdp> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        let objective = self.objective.unwrap_or_else(|| SparseSymMat::zeros(n));
        if objective.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: objective.n(),
            });
        }
        for c in &self.constraints {
            if c.matrix.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.matrix.n(),
                });
            }
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInstance("non-finite right-hand side".into()));
            }
        }
        let (mut constraints, eqs): (Vec<_>, Vec<_>) = self
            .constraints
            .into_iter()
            .partition(|c| c.sense == ConstraintSense::Le);
        let num_ineq = constraints.len();
        constraints.extend(eqs);

        let mut mask: Vec<(usize, usize)> = self
            .mask
            .into_iter()
            .map(|(i, j)| if i <= j { (i, j) } else { (j, i) })
            .collect();
        if let Some(&(i, j)) = mask.iter().find(|&&(_, j)| j >= n) {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        mask.sort_unstable();
        mask.dedup();

        let rhs = DVector::from_iterator(constraints.len(), constraints.iter().map(|c| c.rhs));
        Ok(GeneralSdp {
            n,
            objective: objective.scaled(self.sense.sign()),
            constraints,
            num_ineq,
            nonneg_mask: mask,
            user_sense: self.sense,
            offset: self.offset,
            rhs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offdiag(n: usize, i: usize, j: usize, v: f64) -> SparseSymMat {
        SparseSymMat::new(n, [(i, j, v)]).unwrap()
    }

    #[test]
    fn apply_a_trace() {
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        let x = SymMat::identity(2).scaled(0.5);
        assert_eq!(sdp.apply_a(&x).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn apply_a_two_rows() {
        let sdp = GeneralSdp::builder(2, Sense::Min)
            .eq(offdiag(2, 0, 1, 0.5), 0.0)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        assert_eq!(
            sdp.apply_a(&SymMat::identity(2)).unwrap().as_slice(),
            &[0.0, 2.0]
        );
    }

    #[test]
    fn apply_a_empty() {
        let sdp = GeneralSdp::builder(3, Sense::Min).build().unwrap();
        assert_eq!(sdp.apply_a(&SymMat::identity(3)).unwrap().len(), 0);
        assert!(sdp.apply_a(&SymMat::identity(2)).is_err());
    }

    #[test]
    fn apply_at_examples() {
        let one = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        assert_eq!(
            one.apply_at(&[3.0]).unwrap(),
            SymMat::identity(2).scaled(3.0)
        );
        assert_eq!(one.apply_at(&[0.0]).unwrap(), SymMat::zeros(2));
        assert!(one.apply_at(&[1.0, 2.0]).is_err());

        let two = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .eq(offdiag(2, 0, 1, 1.0), 0.0)
            .build()
            .unwrap();
        let expect = SymMat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(two.apply_at(&[1.0, 1.0]).unwrap(), expect);
    }

    #[test]
    fn gram_examples() {
        let a = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .build()
            .unwrap();
        assert_eq!(a.gram(), DMatrix::from_row_slice(1, 1, &[2.0]));

        let b = GeneralSdp::builder(2, Sense::Min)
            .eq(SparseSymMat::identity(2), 1.0)
            .eq(SparseSymMat::new(2, [(0, 0, 1.0)]).unwrap(), 1.0)
            .build()
            .unwrap();
        assert_eq!(
            b.gram(),
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])
        );

        let c = GeneralSdp::builder(2, Sense::Min)
            .eq(offdiag(2, 0, 1, 1.0), 0.0)
            .build()
            .unwrap();
        assert_eq!(c.gram(), DMatrix::from_row_slice(1, 1, &[2.0]));
    }

    #[test]
    fn builder_orders_inequalities_first_and_negates_max() {
        let sdp = GeneralSdp::builder(2, Sense::Max)
            .objective(SparseSymMat::identity(2))
            .eq(SparseSymMat::identity(2), 1.0)
            .le(offdiag(2, 0, 1, 1.0), 5.0)
            .offset(2.0)
            .build()
            .unwrap();
        assert_eq!(sdp.num_ineq(), 1);
        assert_eq!(sdp.constraints()[0].rhs, 5.0);
        assert_eq!(sdp.rhs().as_slice(), &[5.0, 1.0]);
        assert_eq!(sdp.objective().get(0, 0), -1.0);
        assert_eq!(sdp.report(-3.0), 5.0);
    }
}
