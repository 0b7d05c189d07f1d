//! PSD cuts `vᵀX̃v ≥ 0` and their generators.
//!
//! A cut is stored by its generating vector `v` (length `n + 1`). Expanding the
//! quadratic form over the lifted variables gives
//! `v₀² + Σ 2v₀vᵢ xᵢ + Σ vᵢ² Xᵢᵢ + Σ_{i<j} 2vᵢvⱼ Xᵢⱼ ≥ 0`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{lift_vector, principal_minor, sym_eigen, EigenPair, Support, SymMatrix};
use crate::model::{ColumnMap, LinearRow, Sense, XtildeView};
use crate::scalar::Scalar;

mod pool;
mod sparsify;

pub use pool::{CutPool, PooledCut, PURGE_EPS, SLACK_TOL};
pub use sparsify::{initial_m, sparsify1, sparsify2, violation_update, SparsifyParams};

/// Eigenvalues below `-EIG_TOL` count as negative.
pub const EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    PsdCut,
    Sparse1,
    Sparse2,
    Minor,
}

impl Provenance {
    pub const ALL: [Provenance; 4] = [Self::PsdCut, Self::Sparse1, Self::Sparse2, Self::Minor];

    pub fn name(self) -> &'static str {
        match self {
            Self::PsdCut => "PSDCUT",
            Self::Sparse1 => "SPARSE1",
            Self::Sparse2 => "SPARSE2",
            Self::Minor => "MINOR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cut<T> {
    vector: Vec<T>,
    provenance: Provenance,
    violation: T,
}

impl<T: Scalar> Cut<T> {
    pub fn vector(&self) -> &[T] {
        &self.vector
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `-vᵀX̃v` at the point the cut was generated from.
    pub fn violation(&self) -> T {
        self.violation
    }

    pub fn nnz(&self) -> usize {
        self.vector.iter().filter(|v| **v != T::zero()).count()
    }

    pub fn constant(&self) -> T {
        self.vector[0] * self.vector[0]
    }

    /// Coefficients on `x_i` and on `X_ij` (`i <= j`), 0-based, zeros skipped.
    pub fn terms(&self) -> (Vec<(usize, T)>, Vec<(usize, usize, T)>) {
        let v = &self.vector;
        let two = T::c(2.0);
        let nz: Vec<usize> = (1..v.len()).filter(|&i| v[i] != T::zero()).collect();
        let linear = if v[0] == T::zero() {
            Vec::new()
        } else {
            nz.iter().map(|&i| (i - 1, two * v[0] * v[i])).collect()
        };
        let mut quad = Vec::with_capacity(nz.len() * (nz.len() + 1) / 2);
        for (a, &i) in nz.iter().enumerate() {
            quad.push((i - 1, i - 1, v[i] * v[i]));
            for &j in &nz[a + 1..] {
                quad.push((i - 1, j - 1, two * v[i] * v[j]));
            }
        }
        (linear, quad)
    }

    /// Left-hand side of the cut evaluated term by term at `(x, X)`.
    pub fn evaluate(&self, x: &[T], xx: &SymMatrix<T>) -> T {
        let (linear, quad) = self.terms();
        let lin: T = linear.iter().map(|&(i, c)| c * x[i]).sum();
        let q: T = quad.iter().map(|&(i, j, c)| c * xx.get(i, j)).sum();
        self.constant() + lin + q
    }

    pub fn evaluate_xtilde(&self, xt: &XtildeView<T>) -> T {
        let n = xt.n();
        let x: Vec<T> = (1..=n).map(|i| xt.get(0, i)).collect();
        let xx = SymMatrix::from_fn(n, |i, j| xt.get(i + 1, j + 1));
        self.evaluate(&x, &xx)
    }

    /// LP row over the lifted columns: `Σ coef·z ≥ -v₀²`.
    pub fn to_row(&self, map: &ColumnMap) -> LinearRow<T> {
        let (linear, quad) = self.terms();
        let coeffs = linear
            .into_iter()
            .map(|(i, c)| (map.x(i), c))
            .chain(quad.into_iter().map(|(i, j, c)| (map.xx(i, j), c)))
            .collect();
        LinearRow::new(coeffs, Sense::Ge, -self.constant())
    }

    pub fn key(&self) -> Vec<i64> {
        vector_key(&self.vector)
    }
}

/// Builds the cut from `v` and records its violation at `xt`.
pub fn cut_from_vector<T: Scalar>(v: Vec<T>, provenance: Provenance, xt: &XtildeView<T>) -> Result<Cut<T>> {
    if v.len() != xt.dim() {
        return Err(Error::DimensionMismatch {
            expected: xt.dim(),
            got: v.len(),
        });
    }
    if v.iter().all(|x| *x == T::zero()) {
        return Err(Error::ZeroVector);
    }
    let violation = -xt.quad_form(&v);
    Ok(Cut {
        vector: v,
        provenance,
        violation,
    })
}

/// Direction-only fingerprint: unit norm, canonical sign, rounded to 1e-12.
pub fn vector_key<T: Scalar>(v: &[T]) -> Vec<i64> {
    let norm = crate::scalar::norm2(v).to_f64_lossy();
    if norm == 0.0 {
        return vec![0; v.len()];
    }
    let first = v.iter().map(|x| x.to_f64_lossy() / norm).find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    let sign = if first < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|x| (sign * x.to_f64_lossy() / norm * 1e12).round() as i64).collect()
}

/// Keeps the first cut of every direction.
pub fn dedupe<T: Scalar>(cuts: Vec<Cut<T>>) -> Vec<Cut<T>> {
    let mut seen = HashSet::new();
    cuts.into_iter().filter(|c| seen.insert(c.key())).collect()
}

/// Eigendecomposition of a moment matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pairs: Vec<EigenPair<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn of(xt: &XtildeView<T>) -> Result<Self> {
        Ok(Self {
            pairs: sym_eigen(xt.matrix(), T::tol(EIG_TOL))?,
        })
    }

    pub fn pairs(&self) -> &[EigenPair<T>] {
        &self.pairs
    }

    pub fn min_eigenvalue(&self) -> T {
        self.pairs[0].value
    }

    pub fn negative(&self, eig_tol: T) -> impl Iterator<Item = &EigenPair<T>> {
        self.pairs.iter().take_while(move |p| p.value < -eig_tol)
    }
}

/// One dense cut per eigenvalue below `-eig_tol`.
pub fn separate_psd<T: Scalar>(xt: &XtildeView<T>, eig_tol: T) -> Result<Vec<Cut<T>>> {
    let spectrum = Spectrum::of(xt)?;
    spectrum
        .negative(eig_tol)
        .map(|p| cut_from_vector(p.vector.clone(), Provenance::PsdCut, xt))
        .collect()
}

/// Cuts from the negative eigenpairs of the principal minor on `supp(w)`.
pub fn minor_cuts<T: Scalar>(w: &[T], xt: &XtildeView<T>, eig_tol: T) -> Result<Vec<Cut<T>>> {
    let support = Support::of_nonzeros(w);
    let minor = principal_minor(xt.matrix(), &support)?;
    let pairs = sym_eigen(&minor, T::tol(EIG_TOL))?;
    pairs
        .iter()
        .take_while(|p| p.value < -eig_tol)
        .map(|p| {
            let v = lift_vector(&p.vector, &support, xt.dim())?;
            cut_from_vector(v, Provenance::Minor, xt)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::assemble_xtilde;
    use proptest::prelude::*;

    fn xt(rows: &[Vec<f64>]) -> XtildeView<f64> {
        XtildeView::from_matrix(SymMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn rank_one(x: &[f64]) -> XtildeView<f64> {
        let xx = SymMatrix::from_fn(x.len(), |i, j| x[i] * x[j]);
        assemble_xtilde(x, &xx).unwrap()
    }

    #[test]
    fn unit_first_vector_gives_constant_cut() {
        let c = cut_from_vector(vec![1.0, 0.0, 0.0], Provenance::PsdCut, &rank_one(&[0.3, 0.4])).unwrap();
        let (lin, quad) = c.terms();
        assert!(lin.is_empty() && quad.is_empty());
        assert_eq!(c.constant(), 1.0);
        assert_eq!(c.violation(), -1.0);
    }

    #[test]
    fn one_minus_one_expands() {
        let p = xt(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let c = cut_from_vector(vec![1.0, -1.0], Provenance::PsdCut, &p).unwrap();
        let (lin, quad) = c.terms();
        assert_eq!(c.constant(), 1.0);
        assert_eq!(lin, vec![(0, -2.0)]);
        assert_eq!(quad, vec![(0, 0, 1.0)]);
        assert_eq!(c.evaluate_xtilde(&p), -2.0);
        assert_eq!(c.violation(), 2.0);

        let map = ColumnMap::new(1, 0);
        let row = c.to_row(&map);
        assert_eq!(row.coeffs, vec![(map.x(0), -2.0), (map.xx(0, 0), 1.0)]);
        assert_eq!(row.lower, -1.0);
        assert!(row.upper.is_infinite());
    }

    #[test]
    fn rejects_zero_and_wrong_length() {
        let p = rank_one(&[0.5]);
        assert_eq!(cut_from_vector(vec![0.0, 0.0], Provenance::Minor, &p), Err(Error::ZeroVector));
        assert!(matches!(
            cut_from_vector(vec![1.0], Provenance::Minor, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn separate_examples() {
        assert!(separate_psd(&xt(&[vec![1.0, 0.0], vec![0.0, 0.0]]), 1e-8).unwrap().is_empty());

        let cuts = separate_psd(&xt(&[vec![1.0, 2.0], vec![2.0, 1.0]]), 1e-8).unwrap();
        assert_eq!(cuts.len(), 1);
        let r = 0.5f64.sqrt();
        assert!((cuts[0].vector()[0] - r).abs() < 1e-12 && (cuts[0].vector()[1] + r).abs() < 1e-12);
        assert!((cuts[0].violation() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minor_on_full_support_matches_dense() {
        let p = xt(&[vec![1.0, 0.9, -0.8], vec![0.9, 0.5, 0.7], vec![-0.8, 0.7, 0.2]]);
        let dense = separate_psd(&p, 1e-8).unwrap();
        let minor = minor_cuts(&[1.0, 1.0, 1.0], &p, 1e-8).unwrap();
        assert_eq!(dense.len(), minor.len());
        for (a, b) in dense.iter().zip(&minor) {
            assert_eq!(a.vector(), b.vector());
            assert_eq!(b.provenance(), Provenance::Minor);
        }
    }

    #[test]
    fn minor_of_psd_block_is_empty() {
        // the {0,1} block is PSD, the full matrix is not
        let p = xt(&[vec![1.0, 0.5, 0.9], vec![0.5, 1.0, -0.9], vec![0.9, -0.9, 1.0]]);
        assert!(!separate_psd(&p, 1e-8).unwrap().is_empty());
        assert!(minor_cuts(&[1.0, 1.0, 0.0], &p, 1e-8).unwrap().is_empty());
    }

    #[test]
    fn minor_violation_is_minor_eigenvalue() {
        // n=2; the {1,2} block [[0.1, 0.9], [0.9, 0.1]] has eigenvalues -0.8 and 1.0
        let p = xt(&[vec![1.0, 0.3, 0.3], vec![0.3, 0.1, 0.9], vec![0.3, 0.9, 0.1]]);
        let cuts = minor_cuts(&[0.0, 2.0, -1.0], &p, 1e-8).unwrap();
        assert_eq!(cuts.len(), 1);
        let v = cuts[0].vector();
        assert_eq!(v[0], 0.0);
        let dense = -p.quad_form(v);
        assert!((dense - 0.8).abs() < 1e-12);
        assert!((cuts[0].violation() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn dedupe_ignores_scale_and_sign() {
        let p = rank_one(&[0.1, 0.2]);
        let a = cut_from_vector(vec![1.0, -2.0, 0.5], Provenance::PsdCut, &p).unwrap();
        let b = cut_from_vector(vec![-2.0, 4.0, -1.0], Provenance::Sparse1, &p).unwrap();
        let c = cut_from_vector(vec![1.0, -2.0, 0.6], Provenance::Sparse1, &p).unwrap();
        let kept = dedupe(vec![a.clone(), b, c.clone()]);
        assert_eq!(kept, vec![a, c]);
    }

    #[test]
    fn rank_one_points_give_no_cuts() {
        let x = [0.2, 0.7, 0.0, 1.0];
        assert!(separate_psd(&rank_one(&x), 1e-8).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn row_value_equals_quadratic_form(
            v in proptest::collection::vec(-3.0f64..3.0, 4),
            x in proptest::collection::vec(-2.0f64..2.0, 3),
            noise in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            prop_assume!(v.iter().any(|a| *a != 0.0));
            let mut k = 0;
            let xx = SymMatrix::from_fn(3, |i, j| {
                k += 1;
                x[i] * x[j] + noise[k - 1]
            });
            let p = assemble_xtilde(&x, &xx).unwrap();
            let c = cut_from_vector(v.clone(), Provenance::PsdCut, &p).unwrap();
            let by_terms = c.evaluate_xtilde(&p);
            prop_assert!((by_terms - p.quad_form(&v)).abs() <= 1e-9 * (1.0 + by_terms.abs()));

            let map = ColumnMap::new(3, 0);
            let mut z = vec![0.0; map.len()];
            for i in 0..3 {
                z[map.x(i)] = x[i];
                for j in i..3 {
                    z[map.xx(i, j)] = xx.get(i, j);
                }
            }
            let row = c.to_row(&map);
            prop_assert!((row.activity(&z) - row.lower - by_terms).abs() <= 1e-9 * (1.0 + by_terms.abs()));
        }

        #[test]
        fn any_vector_cut_is_valid_on_rank_one(
            v in proptest::collection::vec(-3.0f64..3.0, 4),
            x in proptest::collection::vec(-2.0f64..2.0, 3),
        ) {
            prop_assume!(v.iter().any(|a| *a != 0.0));
            let p = rank_one(&x);
            let c = cut_from_vector(v, Provenance::Sparse2, &p).unwrap();
            prop_assert!(c.evaluate_xtilde(&p) >= -1e-9);
        }
    }
}
