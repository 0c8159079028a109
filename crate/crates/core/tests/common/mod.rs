//! Helpers shared by the integration tests.
#![allow(dead_code)]

use adal_sdp::adal::Solver;
use adal_sdp::randgen::{generate, GenSpec, Generated};
use adal_sdp::sdp::{Constraint, GeneralSdp, Sense, SparseSymMat};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// Small random instance with at least one inequality (known optimum).
pub fn small_instance(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.random_range(2..=8);
    let slots = n * (n + 1) / 2;
    let m = rng.random_range(2..=12.min(slots));
    let mut spec = GenSpec::new(n, m, rng.random_range(0.2..0.9), seed);
    if spec.num_ineq() == 0 {
        spec.p = 1.0;
    }
    spec.density = rng.random_range(1..=4.min(slots));
    generate(&spec).expect("generator")
}

/// Dense random symmetric matrix with standard normal entries.
pub fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v: f64 = rng.sample(rand_distr::StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Random operator without any structure guarantees (may be rank deficient).
pub fn random_operator(n: usize, m: usize, l: usize, rng: &mut ChaCha8Rng) -> GeneralSdp {
    let mut b = GeneralSdp::builder(n, Sense::Min);
    for k in 0..m {
        let nnz = rng.random_range(1..=n * (n + 1) / 2);
        let mut seen = std::collections::BTreeSet::new();
        let mut t = Vec::new();
        for _ in 0..nnz {
            let j = rng.random_range(0..n);
            let i = rng.random_range(0..=j);
            if seen.insert((i, j)) {
                t.push((i, j, rng.sample::<f64, _>(rand_distr::StandardNormal)));
            }
        }
        let a = SparseSymMat::new(n, t).unwrap();
        b = b.constraint(if k < l {
            Constraint::le(a, 1.0)
        } else {
            Constraint::eq(a, 1.0)
        });
    }
    b.build().unwrap()
}

/// Explicit standard form: `Ā_i = diag(A_i, e_i e_i^T)` for inequalities,
/// `diag(A_j, 0)` for equalities, `C̄ = diag(C, 0)`.
pub struct Expanded {
    a: Vec<DMatrix<f64>>,
    c: DMatrix<f64>,
    b: DVector<f64>,
    gram_inv: DMatrix<f64>,
}

impl Expanded {
    pub fn new(sdp: &GeneralSdp) -> Self {
        let (n, l) = (sdp.n(), sdp.num_ineq());
        let nn = n + l;
        let embed = |m: &DMatrix<f64>| {
            let mut big = DMatrix::zeros(nn, nn);
            big.view_mut((0, 0), (n, n)).copy_from(m);
            big
        };
        let a: Vec<DMatrix<f64>> = sdp
            .constraints()
            .iter()
            .enumerate()
            .map(|(k, con)| {
                let mut big = embed(con.matrix.to_dense().as_matrix());
                if k < l {
                    big[(n + k, n + k)] = 1.0;
                }
                big
            })
            .collect();
        let c = embed(sdp.objective().to_dense().as_matrix());
        let m = a.len();
        let gram = DMatrix::from_fn(m, m, |i, k| a[i].dot(&a[k]));
        Self {
            gram_inv: gram.try_inverse().expect("independent constraints"),
            b: sdp.rhs().clone(),
            a,
            c,
        }
    }

    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.dot(x)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let nn = self.c.nrows();
        self.a
            .iter()
            .zip(y.iter())
            .fold(DMatrix::zeros(nn, nn), |acc, (a, &v)| acc + a * v)
    }

    /// One iteration of Algorithm 1 on the expanded problem.
    pub fn step(&self, x: &mut DMatrix<f64>, z: &mut DMatrix<f64>, sigma: f64) -> DVector<f64> {
        let inner = &*x / sigma - &self.c + &*z;
        let y = &self.gram_inv * (&self.b / sigma - self.apply(&inner));
        let w = &*x / sigma - &self.c + self.adjoint(&y);
        let eig = SymmetricEigen::new(w.clone());
        let q = &eig.eigenvectors;
        let pos = q * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0))) * q.transpose();
        let neg = q * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.min(0.0))) * q.transpose();
        *z = -neg;
        *x = pos * sigma;
        y
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Largest deviation between the block-wise state and the expanded iterate.
pub fn deviation(
    sdp: &GeneralSdp,
    solver: &Solver<'_>,
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    y: &DVector<f64>,
) -> f64 {
    let (n, l) = (sdp.n(), sdp.num_ineq());
    let st = solver.state();
    let mut xb = DMatrix::zeros(n + l, n + l);
    let mut zb = DMatrix::zeros(n + l, n + l);
    xb.view_mut((0, 0), (n, n)).copy_from(st.x.as_matrix());
    zb.view_mut((0, 0), (n, n)).copy_from(st.z.as_matrix());
    for i in 0..l {
        xb[(n + i, n + i)] = st.s[i];
        zb[(n + i, n + i)] = st.p[i];
    }
    max_abs(&(xb - x))
        .max(max_abs(&(zb - z)))
        .max((&st.y - y).amax())
}

/// Runs 50 block-wise iterations next to the expanded oracle and returns the
/// largest deviation scaled by `1 + max|entry|`.
pub fn oracle_run(sdp: &GeneralSdp, iterations: usize) -> f64 {
    let ex = Expanded::new(sdp);
    let nn = sdp.n() + sdp.num_ineq();
    let (mut x, mut z) = (DMatrix::zeros(nn, nn), DMatrix::zeros(nn, nn));
    let mut solver = Solver::new(sdp, adal_sdp::adal::SolverConfig::default()).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..iterations {
        let rec = solver.step().unwrap();
        let y = ex.step(&mut x, &mut z, rec.sigma);
        let d = deviation(sdp, &solver, &x, &z, &y);
        let scale = 1.0 + max_abs(&x).max(max_abs(&z)).max(y.amax());
        worst = worst.max(d / scale);
    }
    worst
}
