//! DIMACS graphs and theta-type relaxations.
//!
//! * [`build_theta`]: `max <J, X>` with `trace X = 1` and `X_ij = 0` on edges.
//! * [`build_theta_plus`]: the same with `X >= 0` entrywise (three-block mode).
//! * [`build_theta_bar_plus`]: the coloring-side bound of the graph to be
//!   colored, `min t` with `X_ii = t - 1`, `X_ij = -1` on its edges and
//!   `X_ij >= -1` on its non-edges. `t` is eliminated through `t = X_11 + 1`,
//!   so the instance is a pure minimization with offset 1.
//!
//! For a graph `G`, `alpha(G) <= theta_plus(G) <= theta(G) <= theta_bar_plus(complement(G))`.
//! Clique instances therefore use the complement with the first two.

mod graph;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use graph::{complement, parse_dimacs, read_dimacs, Graph};

use crate::sdp::{Constraint, GeneralSdp, Sense, SparseSymMat};
use crate::{Error, Result};

fn entry(n: usize, i: usize, j: usize, v: f64) -> SparseSymMat {
    SparseSymMat::new(n, [(i, j, v)]).expect("valid position")
}

fn all_ones(n: usize) -> SparseSymMat {
    let t = (0..n).flat_map(|j| (0..=j).map(move |i| (i, j, 1.0)));
    SparseSymMat::new(n, t).expect("valid positions")
}

fn theta_builder(g: &Graph) -> crate::sdp::SdpBuilder {
    let n = g.n();
    let mut b = GeneralSdp::builder(n, Sense::Max)
        .objective(all_ones(n))
        .eq(SparseSymMat::identity(n), 1.0);
    for (i, j) in g.edges() {
        // coefficient 1/2 on the symmetric pair reads exactly X_ij
        b = b.eq(entry(n, i, j, 0.5), 0.0);
    }
    b
}

/// Lovász theta of `g` (stable-set side).
pub fn build_theta(g: &Graph) -> Result<GeneralSdp> {
    theta_builder(g).build()
}

/// Theta with entrywise nonnegativity on the whole matrix (the diagonal is
/// redundant but kept for uniformity).
pub fn build_theta_plus(g: &Graph) -> Result<GeneralSdp> {
    let n = g.n();
    let mask = (0..n).flat_map(|j| (0..=j).map(move |i| (i, j)));
    theta_builder(g).nonneg(mask).build()
}

/// Coloring bound of `g` (the graph to be colored).
pub fn build_theta_bar_plus(g: &Graph) -> Result<GeneralSdp> {
    build_theta_bar_plus_with_cuts(g, &[])
}

pub fn build_theta_bar_plus_with_cuts(g: &Graph, cuts: &[Constraint]) -> Result<GeneralSdp> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInstance(
            "coloring relaxation needs n >= 2".into(),
        ));
    }
    let mut b = GeneralSdp::builder(n, Sense::Min)
        .objective(entry(n, 0, 0, 1.0))
        .offset(1.0);
    for (i, j) in g.non_edges() {
        b = b.le(entry(n, i, j, -0.5), 1.0);
    }
    b = b.constraints(cuts.iter().cloned());
    for i in 1..n {
        b = b.eq(SparseSymMat::new(n, [(i, i, 1.0), (0, 0, -1.0)])?, 0.0);
    }
    for (i, j) in g.edges() {
        b = b.eq(entry(n, i, j, 0.5), -1.0);
    }
    b.build()
}

/// Number of triples `(i; j, k)` with `j < k` and `i` outside `{j, k}`.
pub fn triangle_population(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 2
    }
}

/// Decodes a population index into `(i, j, k)`.
fn decode_triple(n: usize, idx: usize) -> (usize, usize, usize) {
    let pairs = (n - 1) * (n - 2) / 2;
    let i = idx / pairs;
    let mut p = idx % pairs;
    // pair p over the n - 1 vertices other than i, lexicographic
    let m = n - 1;
    let mut a = 0;
    while p >= m - 1 - a {
        p -= m - 1 - a;
        a += 1;
    }
    let b = a + 1 + p;
    let lift = |v: usize| if v < i { v } else { v + 1 };
    (i, lift(a), lift(b))
}

/// `count` distinct triples drawn uniformly without replacement.
pub fn sample_triangle_triples(
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(usize, usize, usize)>> {
    let available = triangle_population(n);
    if count > available {
        return Err(Error::CountExceedsPopulation {
            requested: count,
            available,
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample(&mut rng, available, count)
        .into_iter()
        .map(|idx| decode_triple(n, idx))
        .collect())
}

/// Triangle cuts `X_ij + X_ik - X_jk <= t - 1` in eliminated form
/// `X_ij + X_ik - X_jk - X_11 <= 0`.
pub fn sample_triangle_cuts(g: &Graph, count: usize, seed: u64) -> Result<Vec<Constraint>> {
    let n = g.n();
    sample_triangle_triples(n, count, seed)?
        .into_iter()
        .map(|(i, j, k)| {
            let m = SparseSymMat::new(n, [(i, j, 0.5), (i, k, 0.5), (j, k, -0.5), (0, 0, -1.0)])?;
            Ok(Constraint::le(m, 0.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::SymMat;
    use std::collections::BTreeSet;

    #[test]
    fn theta_shape() {
        let g = Graph::cycle(5);
        let sdp = build_theta(&g).unwrap();
        assert_eq!(sdp.num_constraints(), 6);
        assert_eq!(sdp.num_ineq(), 0);
        assert!(!sdp.has_mask());
        assert_eq!(sdp.user_sense(), Sense::Max);
        let x = SymMat::from_upper_fn(5, |i, j| if i == j { 0.2 } else { 0.1 });
        let ax = sdp.apply_a(&x).unwrap();
        assert!((ax[0] - 1.0).abs() < 1e-15);
        assert!((ax[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn theta_plus_has_full_mask() {
        let sdp = build_theta_plus(&Graph::cycle(4)).unwrap();
        assert_eq!(sdp.nonneg_mask().len(), 10);
    }

    #[test]
    fn theta_bar_plus_shape() {
        let g = Graph::cycle(4);
        let sdp = build_theta_bar_plus(&g).unwrap();
        assert_eq!(sdp.num_ineq(), 2);
        assert_eq!(sdp.num_constraints(), 2 + 3 + 4);
        assert_eq!(sdp.offset(), 1.0);
        // -X_02 <= 1 reads exactly -X_02
        let x = SymMat::from_upper_fn(4, |i, j| if (i, j) == (0, 2) { 0.7 } else { 0.0 });
        assert!((sdp.apply_a(&x).unwrap()[0] + 0.7).abs() < 1e-15);
    }

    #[test]
    fn triple_population_small() {
        assert!(sample_triangle_triples(3, 0, 1).unwrap().is_empty());
        let all: BTreeSet<_> = sample_triangle_triples(3, 3, 9)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(all, BTreeSet::from([(0, 1, 2), (1, 0, 2), (2, 0, 1)]));
        assert!(matches!(
            sample_triangle_triples(3, 4, 0),
            Err(Error::CountExceedsPopulation {
                requested: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn decode_is_a_bijection() {
        let n = 7;
        let all: BTreeSet<_> = (0..triangle_population(n))
            .map(|k| decode_triple(n, k))
            .collect();
        assert_eq!(all.len(), triangle_population(n));
        assert!(all
            .iter()
            .all(|&(i, j, k)| j < k && i != j && i != k && k < n));
    }

    #[test]
    fn cuts_are_deterministic() {
        let g = Graph::cycle(6);
        let a = sample_triangle_cuts(&g, 10, 42).unwrap();
        let b = sample_triangle_cuts(&g, 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|c| c.rhs == 0.0 && c.matrix.get(0, 0) == -1.0 && c.matrix.nnz() == 4));
    }
}
