//! Sparsification of violated eigenvectors.
//!
//! Both variants walk a random permutation of the entries, tentatively zeroing
//! each one and keeping the change while the violation stays above
//! `pct_viol` times the starting violation. Every starting position of the
//! permutation is tried in turn; from start `s` the entry at position `s - 1`
//! (cyclically) is never zeroed. A vector is emitted when it has fewer than
//! `⌊len · pct_nz⌋` nonzeros.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vector_key;
use crate::error::{Error, Result};
use crate::linalg::{lift_vector, principal_minor, sym_eigen, Support};
use crate::model::XtildeView;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyParams {
    pub pct_viol: f64,
    pub pct_nz: f64,
    pub seed: u64,
}

impl SparsifyParams {
    pub fn new(pct_viol: f64, pct_nz: f64, seed: u64) -> Result<Self> {
        for (name, v) in [("pct_viol", pct_viol), ("pct_nz", pct_nz)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProblem(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self { pct_viol, pct_nz, seed })
    }

    pub fn sparse1_default(seed: u64) -> Self {
        Self { pct_viol: 0.6, pct_nz: 0.2, seed }
    }

    pub fn sparse2_default(seed: u64) -> Self {
        Self { pct_viol: 0.6, pct_nz: 0.4, seed }
    }

    pub fn min_viol<T: Scalar>(&self, violation: T) -> T {
        violation * T::c(self.pct_viol)
    }

    pub fn max_nz(&self, len: usize) -> usize {
        // the small offset keeps products like 0.29 * 100 from flooring to 28
        (len as f64 * self.pct_nz + 1e-9).floor() as usize
    }

    /// Independent generator for `stream`; the same `(seed, stream)` always
    /// yields the same permutations.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// `m_j = w_j Σ_i w_i X̃_ij`, so that `Σ_j m_j = wᵀX̃w`.
pub fn initial_m<T: Scalar>(w: &[T], xt: &XtildeView<T>) -> Vec<T> {
    let mx = xt.matrix().mul_vec(w);
    w.iter().zip(mx).map(|(&a, b)| a * b).collect()
}

/// Violation `-wᵀX̃w` and vector `m` after setting `w_ℓ` to zero, in O(len).
///
/// `d` must be `-wᵀX̃w` and `m` must match `w` as in [`initial_m`].
pub fn violation_update<T: Scalar>(d: T, m: &[T], w: &[T], l: usize, xt: &XtildeView<T>) -> (T, Vec<T>) {
    let mut m = m.to_vec();
    let d = zero_entry(d, &mut m, w, l, xt);
    (d, m)
}

fn removal_gain<T: Scalar>(m: &[T], w: &[T], l: usize, xt: &XtildeView<T>) -> T {
    T::c(2.0) * m[l] - w[l] * w[l] * xt.get(l, l)
}

fn zero_entry<T: Scalar>(d: T, m: &mut [T], w: &[T], l: usize, xt: &XtildeView<T>) -> T {
    let wl = w[l];
    if wl == T::zero() {
        return d;
    }
    let d = d + removal_gain(m, w, l, xt);
    for (j, mj) in m.iter_mut().enumerate() {
        if j != l && w[j] != T::zero() {
            *mj = *mj - w[j] * wl * xt.get(j, l);
        }
    }
    m[l] = T::zero();
    d
}

fn start_violation<T: Scalar>(v: &[T], xt: &XtildeView<T>) -> Result<T> {
    if v.len() != xt.dim() {
        return Err(Error::DimensionMismatch {
            expected: xt.dim(),
            got: v.len(),
        });
    }
    let d = -xt.quad_form(v);
    if d > T::zero() {
        Ok(d)
    } else {
        Err(Error::NotViolated(d.to_f64_lossy()))
    }
}

fn nnz<T: Scalar>(w: &[T]) -> usize {
    w.iter().filter(|x| **x != T::zero()).count()
}

struct Emitter<T> {
    min_viol: T,
    max_nz: usize,
    seen: HashSet<Vec<i64>>,
    out: Vec<Vec<T>>,
}

impl<T: Scalar> Emitter<T> {
    fn offer(&mut self, w: Vec<T>, xt: &XtildeView<T>) {
        // the violation check is repeated densely so that drift in the
        // incremental updates can never let a weak vector through
        if nnz(&w) < self.max_nz && -xt.quad_form(&w) > self.min_viol && self.seen.insert(vector_key(&w)) {
            self.out.push(w);
        }
    }
}

/// Cyclic sparsification by zeroing entries of `v`.
pub fn sparsify1<T: Scalar, R: Rng>(
    v: &[T],
    xt: &XtildeView<T>,
    params: &SparsifyParams,
    rng: &mut R,
) -> Result<Vec<Vec<T>>> {
    let d0 = start_violation(v, xt)?;
    let len = v.len();
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(rng);
    let mut emit = Emitter {
        min_viol: params.min_viol(d0),
        max_nz: params.max_nz(len),
        seen: HashSet::new(),
        out: Vec::new(),
    };
    if emit.max_nz == 0 {
        return Ok(Vec::new());
    }
    let m0 = initial_m(v, xt);
    for s in 0..len {
        let mut w = v.to_vec();
        let mut m = m0.clone();
        let mut d = d0;
        for k in 0..len - 1 {
            let l = perm[(s + k) % len];
            if w[l] == T::zero() {
                continue;
            }
            if d + removal_gain(&m, &w, l, xt) > emit.min_viol {
                d = zero_entry(d, &mut m, &w, l, xt);
                w[l] = T::zero();
            }
        }
        emit.offer(w, xt);
    }
    Ok(emit.out)
}

/// Most negative eigenvector of the minor on `supp(w)`, lifted to full length.
fn minor_direction<T: Scalar>(w: &[T], xt: &XtildeView<T>) -> Result<Vec<T>> {
    let support = Support::of_nonzeros(w);
    let minor = principal_minor(xt.matrix(), &support)?;
    let pairs = sym_eigen(&minor, T::tol(super::EIG_TOL))?;
    lift_vector(&pairs[0].vector, &support, xt.dim())
}

/// Cyclic sparsification where each candidate is the leading negative
/// eigenvector of the current support's minor with one more entry removed.
pub fn sparsify2<T: Scalar, R: Rng>(
    v: &[T],
    xt: &XtildeView<T>,
    params: &SparsifyParams,
    rng: &mut R,
) -> Result<Vec<Vec<T>>> {
    let d0 = start_violation(v, xt)?;
    let len = v.len();
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(rng);
    let mut emit = Emitter {
        min_viol: params.min_viol(d0),
        max_nz: params.max_nz(len),
        seen: HashSet::new(),
        out: Vec::new(),
    };
    if emit.max_nz == 0 {
        return Ok(Vec::new());
    }
    // every start begins from v, so the first minor is shared
    let first = minor_direction(v, xt)?;
    for s in 0..len {
        let mut w = v.to_vec();
        let mut cached: Option<Vec<T>> = Some(first.clone());
        for k in 0..len - 1 {
            let l = perm[(s + k) % len];
            let mut z = match cached.take() {
                Some(z) => z,
                None => minor_direction(&w, xt)?,
            };
            let zbar = z.clone();
            z[l] = T::zero();
            if nnz(&z) > 0 && -xt.quad_form(&z) > emit.min_viol {
                if Support::of_nonzeros(&z) == Support::of_nonzeros(&w) {
                    // same minor, same leading eigenvector
                    cached = Some(zbar);
                }
                w = z;
            } else {
                cached = Some(zbar);
            }
        }
        emit.offer(w, xt);
    }
    Ok(emit.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::model::assemble_xtilde;
    use rand::Rng;

    fn xt(rows: &[Vec<f64>]) -> XtildeView<f64> {
        XtildeView::from_matrix(SymMatrix::from_rows(rows).unwrap()).unwrap()
    }

    /// A moment matrix with a unit corner and a random, generally indefinite body.
    fn random_xtilde(rng: &mut ChaCha8Rng, dim: usize) -> XtildeView<f64> {
        let x: Vec<f64> = (0..dim - 1).map(|_| rng.random_range(0.0..1.0)).collect();
        let xx = SymMatrix::from_fn(dim - 1, |i, j| {
            let base = x[i] * x[j];
            base + rng.random_range(-0.3..0.3)
        });
        assemble_xtilde(&x, &xx).unwrap()
    }

    fn dense_violation(w: &[f64], xt: &XtildeView<f64>) -> f64 {
        let mut q = 0.0;
        for i in 0..w.len() {
            for j in 0..w.len() {
                q += w[i] * w[j] * xt.get(i, j);
            }
        }
        -q
    }

    #[test]
    fn update_is_noop_on_zero_entry() {
        let p = xt(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let w = [1.0, 0.0];
        let m = initial_m(&w, &p);
        assert_eq!(m[1], 0.0);
        let (d, m2) = violation_update(-1.0, &m, &w, 1, &p);
        assert_eq!(d, -1.0);
        assert_eq!(m2, m);
    }

    #[test]
    fn update_worked_example() {
        let p = xt(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let w = [1.0, -1.0];
        let d = dense_violation(&w, &p);
        assert_eq!(d, 2.0);
        let m = initial_m(&w, &p);
        assert_eq!(m, vec![-1.0, -1.0]);
        let (d2, m2) = violation_update(d, &m, &w, 1, &p);
        assert_eq!(d2, dense_violation(&[1.0, 0.0], &p));
        assert_eq!(d2, -1.0);
        assert_eq!(m2, initial_m(&[1.0, 0.0], &p));
    }

    #[test]
    fn update_matches_dense_on_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let dim = rng.random_range(2..9);
            let p = random_xtilde(&mut rng, dim);
            let mut w: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut m = initial_m(&w, &p);
            let mut d = dense_violation(&w, &p);
            for _ in 0..dim {
                let l = rng.random_range(0..dim);
                let (d2, m2) = violation_update(d, &m, &w, l, &p);
                w[l] = 0.0;
                assert!((d2 - dense_violation(&w, &p)).abs() < 1e-12);
                let fresh = initial_m(&w, &p);
                for (a, b) in m2.iter().zip(&fresh) {
                    assert!((a - b).abs() < 1e-12);
                }
                d = d2;
                m = m2;
            }
        }
    }

    fn violated(rng: &mut ChaCha8Rng, dim: usize) -> (XtildeView<f64>, Vec<f64>) {
        loop {
            let p = random_xtilde(rng, dim);
            let pairs = sym_eigen(p.matrix(), 1e-8).unwrap();
            if pairs[0].value < -1e-3 {
                return (p, pairs[0].vector.clone());
            }
        }
    }

    #[test]
    fn rejects_non_violated_vector() {
        let p = xt(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let params = SparsifyParams::sparse1_default(0);
        let mut rng = params.rng(0);
        assert!(matches!(sparsify1(&[1.0, 1.0], &p, &params, &mut rng), Err(Error::NotViolated(_))));
        assert!(matches!(sparsify2(&[1.0, 1.0], &p, &params, &mut rng), Err(Error::NotViolated(_))));
    }

    #[test]
    fn zero_nz_budget_emits_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, v) = violated(&mut rng, 6);
        let params = SparsifyParams::new(0.5, 0.0, 1).unwrap();
        assert!(sparsify1(&v, &p, &params, &mut params.rng(0)).unwrap().is_empty());
        assert!(sparsify2(&v, &p, &params, &mut params.rng(0)).unwrap().is_empty());
    }

    #[test]
    fn full_parameters_emit_nothing_stronger_than_the_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let (p, v) = violated(&mut rng, 5);
            let params = SparsifyParams::new(1.0, 1.0, 2).unwrap();
            let d0 = dense_violation(&v, &p);
            for w in sparsify1(&v, &p, &params, &mut params.rng(0)).unwrap() {
                assert!(dense_violation(&w, &p) > d0);
                assert!(w.iter().filter(|x| **x != 0.0).count() < 5);
            }
        }
    }

    #[test]
    fn emitted_vectors_meet_budget_n9() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for round in 0..30 {
            let (p, v) = violated(&mut rng, 10);
            let d0 = dense_violation(&v, &p);
            let p1 = SparsifyParams::sparse1_default(round);
            let p2 = SparsifyParams::sparse2_default(round);
            let out1 = sparsify1(&v, &p, &p1, &mut p1.rng(0)).unwrap();
            let out2 = sparsify2(&v, &p, &p2, &mut p2.rng(0)).unwrap();
            for (w, max_nz) in out1.iter().map(|w| (w, 2)).chain(out2.iter().map(|w| (w, 4))) {
                assert!(w.iter().filter(|x| **x != 0.0).count() < max_nz);
                assert!(dense_violation(w, &p) > 0.6 * d0);
            }
        }
    }

    #[test]
    fn sparse2_scalar_minor_with_nonnegative_diagonal_rejects() {
        // only one entry can survive below the budget, and every diagonal entry is nonnegative
        let p = xt(&[vec![1.0, -0.9, 0.9], vec![-0.9, 1.0, 0.0], vec![0.9, 0.0, 1.0]]);
        let v = sym_eigen(p.matrix(), 1e-8).unwrap()[0].vector.clone();
        let params = SparsifyParams::new(0.1, 0.67, 0).unwrap();
        assert_eq!(params.max_nz(3), 2);
        assert!(sparsify2(&v, &p, &params, &mut params.rng(0)).unwrap().is_empty());
    }

    #[test]
    fn results_are_seed_deterministic_and_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (p, v) = violated(&mut rng, 12);
        let params = SparsifyParams::new(0.3, 0.5, 77).unwrap();
        let a = sparsify1(&v, &p, &params, &mut params.rng(3)).unwrap();
        let b = sparsify1(&v, &p, &params, &mut params.rng(3)).unwrap();
        assert_eq!(a, b);
        let keys: HashSet<_> = a.iter().map(|w| vector_key(w)).collect();
        assert_eq!(keys.len(), a.len());
    }

    #[test]
    fn params_validate_and_round() {
        assert!(SparsifyParams::new(1.1, 0.2, 0).is_err());
        assert!(SparsifyParams::new(0.5, -0.1, 0).is_err());
        let p = SparsifyParams::new(0.6, 0.29, 0).unwrap();
        assert_eq!(p.max_nz(100), 29);
        assert_eq!(SparsifyParams::sparse1_default(0).max_nz(21), 4);
        assert_eq!(SparsifyParams::sparse2_default(0).max_nz(21), 8);
    }
}
