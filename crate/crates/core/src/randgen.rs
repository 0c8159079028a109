//! Random general-form instances with a known optimal primal-dual pair.
//!
//! `X* = Q_1 D Q_1^T` and `Z* = Q_2 D' Q_2^T` live on complementary
//! eigenspaces of a random orthogonal `Q`, so `<X*, Z*> = 0`. Inequality rows
//! are split into an active part (zero slack, `y*_i < 0`) and an inactive
//! part (positive slack, `y*_i = 0`). With `b = A(X*) + slack` and
//! `C = A^T y* + Z*` all optimality conditions hold by construction and the
//! optimum is `<C, X*> = b^T y*`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adal::factorize_gram;
use crate::sdp::{Constraint, GeneralSdp, Sense, SparseSymMat, SymMat};
use crate::{Error, Result};

/// Redraws of a single constraint matrix before giving up.
const MAX_ATTEMPTS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    /// Fraction of inequality rows, `l = round(p * m)`.
    pub p: f64,
    /// Nonzeros per constraint matrix (upper triangle).
    pub density: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, m: usize, p: f64, seed: u64) -> Self {
        Self {
            n,
            m,
            p,
            density: 3.min(n * (n + 1) / 2),
            seed,
        }
    }

    pub fn num_ineq(&self) -> usize {
        (self.p * self.m as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let slots = self.n * (self.n + 1) / 2;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.n == 0 {
            return bad("n must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad("p must lie in [0, 1]");
        }
        if self.m > slots {
            return bad("m must not exceed n(n+1)/2");
        }
        if self.density == 0 || self.density > slots {
            return bad("density must lie in 1..=n(n+1)/2");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: SymMat,
    pub y: Vec<f64>,
    pub z: SymMat,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub sdp: GeneralSdp,
    pub known_optimum: f64,
    pub witness: Witness,
}

fn random_matrix(n: usize, density: usize, rng: &mut ChaCha8Rng) -> SparseSymMat {
    let slots = n * (n + 1) / 2;
    let picks = rand::seq::index::sample(rng, slots, density);
    let mut t = Vec::with_capacity(density);
    for k in picks.into_iter() {
        // k-th upper-triangle slot in column-major order
        let mut j = 0;
        while (j + 1) * (j + 2) / 2 <= k {
            j += 1;
        }
        let i = k - j * (j + 1) / 2;
        let v: f64 = rng.sample(StandardNormal);
        t.push((i, j, v));
    }
    SparseSymMat::new(n, t).expect("distinct slots")
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn lowrank(q: &DMatrix<f64>, cols: std::ops::Range<usize>, d: &[f64]) -> SymMat {
    let n = q.nrows();
    let mut m = DMatrix::zeros(n, n);
    for (c, &dv) in cols.zip(d) {
        let v = q.column(c);
        m += dv * &v * v.transpose();
    }
    SymMat::symmetrized(m)
}

/// Draws an instance for `spec`. Deterministic in the seed.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let (n, m, l) = (spec.n, spec.m, spec.num_ineq());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut mats: Vec<SparseSymMat> = Vec::with_capacity(m);
    let mut basis = Orthonormal::default();
    for _ in 0..m {
        let mut accepted = false;
        for _ in 0..MAX_ATTEMPTS {
            let a = random_matrix(n, spec.density, &mut rng);
            if basis.try_add(&a) {
                mats.push(a);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::RankDeficient {
                attempts: MAX_ATTEMPTS,
            });
        }
    }

    let q = random_orthogonal(n, &mut rng);
    let r = (n / 2).max(1).min(n);
    let dx: Vec<f64> = (0..r).map(|_| rng.random_range(0.5..2.0)).collect();
    let dz: Vec<f64> = (r..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let x = lowrank(&q, 0..r, &dx);
    let z = lowrank(&q, r..n, &dz);

    let mut y = vec![0.0; m];
    let mut slack = vec![0.0; m];
    for k in 0..m {
        if k < l {
            if rng.random_bool(0.5) {
                y[k] = -rng.random_range(0.5..2.0);
            } else {
                slack[k] = rng.random_range(0.5..1.5);
            }
        } else {
            y[k] = rng.sample(StandardNormal);
        }
    }

    let mut builder = GeneralSdp::builder(n, Sense::Min);
    for (k, a) in mats.iter().enumerate() {
        let rhs = a.inner_unchecked(x.as_matrix()) + slack[k];
        builder = builder.constraint(if k < l {
            Constraint::le(a.clone(), rhs)
        } else {
            Constraint::eq(a.clone(), rhs)
        });
    }
    // C = A^T y + Z, kept sparse where possible
    let mut c = z.as_matrix().clone();
    for (a, &yk) in mats.iter().zip(&y) {
        a.add_to(&mut c, yk);
    }
    let triplets = (0..n)
        .flat_map(|j| (0..=j).map(move |i| (i, j)))
        .filter_map(|(i, j)| {
            let v = c[(i, j)];
            (v != 0.0).then_some((i, j, v))
        });
    let sdp = builder.objective(SparseSymMat::new(n, triplets)?).build()?;
    factorize_gram(&sdp)?;
    let known_optimum = sdp.objective().inner_unchecked(x.as_matrix());
    Ok(Generated {
        sdp,
        known_optimum,
        witness: Witness { x, y, z },
    })
}

/// Incremental Gram-Schmidt over symmetric matrices (inner product
/// `<A, B>`), used to keep the drawn constraints linearly independent.
#[derive(Default)]
struct Orthonormal {
    vecs: Vec<std::collections::BTreeMap<(usize, usize), f64>>,
}

impl Orthonormal {
    fn try_add(&mut self, a: &SparseSymMat) -> bool {
        let weight = |i: usize, j: usize| if i == j { 1.0 } else { 2.0 };
        let mut v: std::collections::BTreeMap<(usize, usize), f64> =
            a.entries().iter().map(|&(i, j, x)| ((i, j), x)).collect();
        let norm0: f64 = v
            .iter()
            .map(|(&(i, j), x)| weight(i, j) * x * x)
            .sum::<f64>()
            .sqrt();
        for q in &self.vecs {
            let dot: f64 = v
                .iter()
                .filter_map(|(k, x)| q.get(k).map(|y| weight(k.0, k.1) * x * y))
                .sum();
            if dot != 0.0 {
                for (k, y) in q {
                    *v.entry(*k).or_insert(0.0) -= dot * y;
                }
            }
        }
        let norm: f64 = v
            .iter()
            .map(|(&(i, j), x)| weight(i, j) * x * x)
            .sum::<f64>()
            .sqrt();
        if norm <= 1e-6 * norm0 {
            return false;
        }
        v.values_mut().for_each(|x| *x /= norm);
        self.vecs.push(v);
        true
    }
}

fn digest(values: impl IntoIterator<Item = f64>) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar written next to a generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub spec: GenSpec,
    pub known_optimum: f64,
    /// SHA-256 over the little-endian bytes of the full `X*`, `y*`, `Z*`.
    pub x_sha256: String,
    pub y_sha256: String,
    pub z_sha256: String,
}

impl Sidecar {
    pub fn new(spec: &GenSpec, g: &Generated) -> Self {
        Self {
            spec: spec.clone(),
            known_optimum: g.known_optimum,
            x_sha256: digest(g.witness.x.as_matrix().iter().copied()),
            y_sha256: digest(g.witness.y.iter().copied()),
            z_sha256: digest(g.witness.z.as_matrix().iter().copied()),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

impl Witness {
    pub fn y_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.y.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_is_optimal() {
        let spec = GenSpec::new(6, 8, 0.5, 7);
        let g = generate(&spec).unwrap();
        let w = &g.witness;
        assert_eq!(g.sdp.num_ineq(), 4);
        assert!(w.x.inner(&w.z).unwrap().abs() < 1e-12);
        let dual = g.sdp.rhs().dot(&w.y_vector());
        assert!((g.known_optimum - dual).abs() <= 1e-10 * (1.0 + g.known_optimum.abs()));
        let ax = g.sdp.apply_a(&w.x).unwrap();
        for k in 0..g.sdp.num_ineq() {
            let slack = g.sdp.rhs()[k] - ax[k];
            assert!(slack >= -1e-12);
            assert!(w.y[k] <= 0.0);
            assert!(w.y[k] == 0.0 || slack.abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic() {
        let spec = GenSpec::new(5, 6, 0.25, 3);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.sdp, b.sdp);
        assert_eq!(a.known_optimum.to_bits(), b.known_optimum.to_bits());
        assert_eq!(Sidecar::new(&spec, &a), Sidecar::new(&spec, &b));
    }

    #[test]
    fn spec_validation() {
        assert!(GenSpec::new(2, 4, 0.5, 0).validate().is_err());
        assert!(GenSpec::new(3, 4, 1.5, 0).validate().is_err());
        assert!(GenSpec::new(3, 4, 0.5, 0).validate().is_ok());
    }

    #[test]
    fn slot_decoding_covers_upper_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(4, 10, &mut rng);
        assert_eq!(a.nnz(), 10);
    }
}
