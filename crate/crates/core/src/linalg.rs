//! Dense symmetric matrices, eigendecomposition and principal-minor helpers.
//!
//! Everything here is dense; the matrices seen by the separators are at most
//! `(n+1) x (n+1)` with `n` in the low hundreds.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense square matrix stored row-major. Callers keep it symmetric; `set`
/// writes both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = T::one();
        }
        m
    }

    /// Builds `(M + Mᵀ)/2` from a list of rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        let half = T::c(0.5);
        Ok(Self::from_fn(dim, |i, j| (rows[i][j] + rows[j][i]) * half))
    }

    /// `f` is only evaluated for `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// `vᵀ M v`, skipping zero entries of `v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc = T::zero();
        for (i, &vi) in v.iter().enumerate() {
            if vi == T::zero() {
                continue;
            }
            let row = self.row(i);
            let mut s = T::zero();
            for (j, &vj) in v.iter().enumerate() {
                s = s + row[j] * vj;
            }
            acc = acc + vi * s;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |a, (&x, &y)| a + x * y))
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.dim)
            .map(|i| self.row(i).iter().fold(T::zero(), |a, &x| a + x.abs()))
            .fold(T::zero(), T::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Unit norm; first nonzero entry positive.
    pub vector: Vec<T>,
}

/// Sorted set of indices selecting rows/columns of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support(Vec<usize>);

impl Support {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Unsupported(format!(
                    "support indices must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::IndexOutOfRange { index: last, dim });
            }
        }
        Ok(Self(indices))
    }

    pub fn full(dim: usize) -> Self {
        Self((0..dim).collect())
    }

    /// Indices of the nonzero entries of `w`.
    pub fn of_nonzeros<T: Scalar>(w: &[T]) -> Self {
        Self(
            w.iter()
                .enumerate()
                .filter(|(_, &x)| x != T::zero())
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Rotations continue until the off-diagonal mass reaches machine precision;
/// `tol` is the acceptance bound checked if the sweep cap is hit first,
/// relative to `max(1, ‖M‖∞)`. Pairs come back sorted by ascending eigenvalue.
pub fn sym_eigen<T: Scalar>(m: &SymMatrix<T>, tol: T) -> Result<Vec<EigenPair<T>>> {
    let d = m.dim();
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let mut a = m.data.clone();
    let mut v = SymMatrix::<T>::identity(d).data;
    let scale = m.norm_inf().max(T::one());
    let frob = a.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let target = T::epsilon() * frob * T::c(d as f64);

    let off_norm = |a: &[T]| {
        let mut s = T::zero();
        for p in 0..d {
            for q in p + 1..d {
                s = s + a[p * d + q] * a[p * d + q];
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_norm(&a);
        if off <= target || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                // negligible relative to both diagonal entries
                let small = T::epsilon() * T::c(0.01);
                if apq.abs() <= small * app.abs() && apq.abs() <= small * aqq.abs() {
                    a[p * d + q] = T::zero();
                    a[q * d + p] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (T::c(2.0) * apq);
                let t = if theta.is_infinite() {
                    T::zero()
                } else {
                    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                    sgn / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                a[p * d + p] = app - t * apq;
                a[q * d + q] = aqq + t * apq;
                a[p * d + q] = T::zero();
                a[q * d + p] = T::zero();
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    let nkp = c * akp - s * akq;
                    let nkq = s * akp + c * akq;
                    a[k * d + p] = nkp;
                    a[p * d + k] = nkp;
                    a[k * d + q] = nkq;
                    a[q * d + k] = nkq;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > tol * scale {
            return Err(Error::EigenNoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off.to_f64_lossy(),
            });
        }
    }

    let mut pairs: Vec<EigenPair<T>> = (0..d)
        .map(|k| {
            let mut vec: Vec<T> = (0..d).map(|i| v[i * d + k]).collect();
            canonicalize(&mut vec);
            EigenPair {
                value: a[k * d + k],
                vector: vec,
            }
        })
        .collect();
    pairs.sort_by(|x, y| x.value.partial_cmp(&y.value).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pairs)
}

/// Normalizes to unit length and flips so the first non-negligible entry is positive.
pub(crate) fn canonicalize<T: Scalar>(v: &mut [T]) {
    let norm = crate::scalar::norm2(v);
    if norm > T::zero() {
        v.iter_mut().for_each(|x| *x = *x / norm);
    }
    let thresh = T::epsilon() * T::c(16.0);
    if let Some(first) = v.iter().find(|x| x.abs() > thresh) {
        if *first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Submatrix `M[s][s]`.
pub fn principal_minor<T: Scalar>(m: &SymMatrix<T>, s: &Support) -> Result<SymMatrix<T>> {
    if s.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some(&last) = s.indices().last() {
        if last >= m.dim() {
            return Err(Error::IndexOutOfRange {
                index: last,
                dim: m.dim(),
            });
        }
    }
    let idx = s.indices();
    Ok(SymMatrix::from_fn(idx.len(), |a, b| m.get(idx[a], idx[b])))
}

/// Embeds a vector indexed by `s` into `R^dim`, zero outside the support.
pub fn lift_vector<T: Scalar>(w_minor: &[T], s: &Support, dim: usize) -> Result<Vec<T>> {
    if w_minor.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            got: w_minor.len(),
        });
    }
    let mut out = vec![T::zero(); dim];
    for (&i, &w) in s.indices().iter().zip(w_minor) {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        out[i] = w;
    }
    Ok(out)
}
