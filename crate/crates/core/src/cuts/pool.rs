use super::Cut;
use crate::scalar::Scalar;

/// Relative objective change below which the loop purges slack cuts.
pub const PURGE_EPS: f64 = 1e-4;
/// A cut whose slack exceeds this is not considered tight.
pub const SLACK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct PooledCut<T, H> {
    pub cut: Cut<T>,
    pub handle: H,
}

/// Cuts currently present in the LP, keyed by their row handle.
///
/// Only cuts ever enter the pool; the permanent rows of the relaxation are
/// owned by the engine and cannot be purged.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPool<T, H> {
    entries: Vec<PooledCut<T, H>>,
    purge_eps: f64,
    slack_tol: f64,
}

impl<T: Scalar, H: Clone> Default for CutPool<T, H> {
    fn default() -> Self {
        Self::new(PURGE_EPS, SLACK_TOL)
    }
}

impl<T: Scalar, H: Clone> CutPool<T, H> {
    pub fn new(purge_eps: f64, slack_tol: f64) -> Self {
        Self {
            entries: Vec::new(),
            purge_eps,
            slack_tol,
        }
    }

    pub fn push(&mut self, cut: Cut<T>, handle: H) {
        self.entries.push(PooledCut { cut, handle });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PooledCut<T, H>> {
        self.entries.iter()
    }

    pub fn handles(&self) -> Vec<H> {
        self.entries.iter().map(|e| e.handle.clone()).collect()
    }

    /// `z_t ≥ (1 − eps)·z_prev`: the bound barely moved.
    pub fn should_purge(&self, z_t: T, z_prev: T) -> bool {
        z_t >= (T::one() - T::c(self.purge_eps)) * z_prev
    }

    /// Drops every cut with slack above the tolerance when the trigger holds.
    ///
    /// `slacks[k]` belongs to the k-th pooled cut in insertion order. Returns
    /// the handles of the removed cuts.
    pub fn purge(&mut self, slacks: &[T], z_t: T, z_prev: T) -> Vec<H> {
        assert_eq!(slacks.len(), self.entries.len(), "one slack per pooled cut");
        if !self.should_purge(z_t, z_prev) {
            return Vec::new();
        }
        let tol = T::c(self.slack_tol);
        let mut removed = Vec::new();
        let mut k = 0;
        self.entries.retain(|e| {
            let keep = slacks[k] <= tol;
            k += 1;
            if !keep {
                removed.push(e.handle.clone());
            }
            keep
        });
        removed
    }
}

#[cfg(test)]
mod tests {
    use super::super::{cut_from_vector, Provenance};
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::model::assemble_xtilde;

    fn pool_of(k: usize) -> CutPool<f64, usize> {
        let p = assemble_xtilde(&[0.5], &SymMatrix::from_fn(1, |_, _| 0.5)).unwrap();
        let mut pool = CutPool::default();
        for h in 0..k {
            let cut = cut_from_vector(vec![1.0, -(h as f64 + 1.0)], Provenance::PsdCut, &p).unwrap();
            pool.push(cut, h);
        }
        pool
    }

    #[test]
    fn tight_cuts_survive() {
        let mut pool = pool_of(4);
        let removed = pool.purge(&[0.0, 1e-8, 5e-8, 1e-7], 10.0, 10.0);
        assert!(removed.is_empty());
        assert_eq!(pool.len(), 4);
    }

    #[test]
    fn gate_blocks_purge_when_bound_drops() {
        let mut pool = pool_of(3);
        // 9.99 < (1 - 1e-4) * 10 = 9.999
        let removed = pool.purge(&[1.0, 1.0, 1.0], 9.99, 10.0);
        assert!(removed.is_empty());
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn two_slack_of_five_removed() {
        let mut pool = pool_of(5);
        let removed = pool.purge(&[0.0, 0.3, 0.0, 2.0, 1e-9], 9.9995, 10.0);
        assert_eq!(removed, vec![1, 3]);
        assert_eq!(pool.handles(), vec![0, 2, 4]);
    }

    #[test]
    fn trigger_threshold() {
        let pool = pool_of(0);
        assert!(pool.should_purge(99.99, 100.0));
        assert!(!pool.should_purge(99.9899, 100.0));
        assert!(pool.should_purge(100.0, 100.0));
    }
}
