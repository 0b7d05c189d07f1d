//! Dense bounded dual simplex.
//!
//! Every column is boxed, so the all-slack basis with each column parked at the
//! bound favoured by its objective coefficient is dual feasible. Rows are
//! carried as bounded "row variables" `r_i = a_i·z`; adding a row appends a
//! basic row variable, which keeps the basis dual feasible and lets the next
//! solve start where the previous one stopped.
//!
//! The tableau is stored explicitly: one dense row per basic variable over the
//! `ncols` nonbasic positions. It is rebuilt from scratch ("refactored") every
//! few dozen pivots and whenever rows are removed.

use std::collections::HashMap;

use super::{LpBackend, LpError, LpSolution, RowHandle};
use crate::model::LinearRow;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub refactor_every: usize,
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            refactor_every: 100,
            primal_tol: 1e-9,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct DualSimplex<T> {
    opts: SimplexOptions,
    ncols: usize,
    obj: Vec<T>,
    /// Bounds of every variable: columns first, then one row variable per row.
    lower: Vec<T>,
    upper: Vec<T>,
    rows: Vec<LinearRow<T>>,
    handles: Vec<RowHandle>,
    index_of: HashMap<RowHandle, usize>,
    next_handle: u64,
    state: Vec<State>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    /// `basis.len() x ncols`, row-major.
    tab: Vec<T>,
    dj: Vec<T>,
    value: Vec<T>,
    needs_refactor: bool,
    since_refactor: usize,
}

impl<T: Scalar> Default for DualSimplex<T> {
    fn default() -> Self {
        Self::new(SimplexOptions::default())
    }
}

impl<T: Scalar> DualSimplex<T> {
    pub fn new(opts: SimplexOptions) -> Self {
        Self {
            opts,
            ncols: 0,
            obj: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            rows: Vec::new(),
            handles: Vec::new(),
            index_of: HashMap::new(),
            next_handle: 0,
            state: Vec::new(),
            basis: Vec::new(),
            nonbasic: Vec::new(),
            tab: Vec::new(),
            dj: Vec::new(),
            value: Vec::new(),
            needs_refactor: false,
            since_refactor: 0,
        }
    }

    fn nvars(&self) -> usize {
        self.ncols + self.rows.len()
    }

    fn is_fixed(&self, v: usize) -> bool {
        self.lower[v] == self.upper[v]
    }

    fn bound_value(&self, v: usize, s: State) -> T {
        match s {
            State::Lower => self.lower[v],
            State::Upper => self.upper[v],
            State::Basic(_) => self.value[v],
        }
    }

    /// All rows basic; each column at the bound its objective coefficient prefers.
    fn reset_slack_basis(&mut self) {
        let (nc, nr) = (self.ncols, self.rows.len());
        self.state = (0..nc)
            .map(|j| if self.obj[j] > T::zero() { State::Upper } else { State::Lower })
            .chain((0..nr).map(State::Basic))
            .collect();
        self.basis = (nc..nc + nr).collect();
        self.nonbasic = (0..nc).collect();
        self.tab = vec![T::zero(); nr * nc];
        for (k, row) in self.rows.iter().enumerate() {
            for &(c, v) in &row.coeffs {
                self.tab[k * nc + c] = self.tab[k * nc + c] + v;
            }
        }
        self.dj = self.obj.clone();
        self.needs_refactor = false;
        self.since_refactor = 0;
    }

    /// Rebuilds tableau and reduced costs for the current basic/nonbasic split.
    /// Falls back to the slack basis if the basis matrix is singular.
    fn refactor(&mut self) {
        let nc = self.ncols;
        let basic_cols: Vec<usize> = (0..nc).filter(|&j| matches!(self.state[j], State::Basic(_))).collect();
        let tight_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&r| !matches!(self.state[nc + r], State::Basic(_)))
            .collect();
        let q = basic_cols.len();
        if q != tight_rows.len() {
            self.reset_slack_basis();
            return;
        }
        let mut pos_in_basic = vec![usize::MAX; nc];
        for (b, &j) in basic_cols.iter().enumerate() {
            pos_in_basic[j] = b;
        }
        let mut nb_pos = vec![usize::MAX; self.nvars()];
        for (p, &v) in self.nonbasic.iter().enumerate() {
            nb_pos[v] = p;
        }

        // B · sol = rhs, where row a of B holds the basic-column coefficients of
        // tight row a and rhs expresses the remaining terms by nonbasic position.
        let mut bmat = vec![T::zero(); q * q];
        let mut sol = vec![T::zero(); q * nc];
        for (a, &r) in tight_rows.iter().enumerate() {
            for &(c, v) in &self.rows[r].coeffs {
                let b = pos_in_basic[c];
                if b != usize::MAX {
                    bmat[a * q + b] = bmat[a * q + b] + v;
                } else {
                    let p = nb_pos[c];
                    sol[a * nc + p] = sol[a * nc + p] - v;
                }
            }
            let p = nb_pos[nc + r];
            sol[a * nc + p] = sol[a * nc + p] + T::one();
        }
        if !lu_solve_in_place(&mut bmat, q, &mut sol, nc) {
            log::debug!("singular basis during refactor; restarting from slack basis");
            self.reset_slack_basis();
            return;
        }

        let nb = self.basis.len();
        let mut tab = vec![T::zero(); nb * nc];
        for (k, &v) in self.basis.iter().enumerate() {
            let out = &mut tab[k * nc..(k + 1) * nc];
            if v < nc {
                let b = pos_in_basic[v];
                out.copy_from_slice(&sol[b * nc..(b + 1) * nc]);
            } else {
                for &(c, a) in &self.rows[v - nc].coeffs {
                    let b = pos_in_basic[c];
                    if b != usize::MAX {
                        axpy(out, a, &sol[b * nc..(b + 1) * nc]);
                    } else {
                        let p = nb_pos[c];
                        out[p] = out[p] + a;
                    }
                }
            }
        }
        let mut dj = vec![T::zero(); nc];
        for (j, &c) in self.obj.iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let b = pos_in_basic[j];
            if b != usize::MAX {
                axpy(&mut dj, c, &sol[b * nc..(b + 1) * nc]);
            } else {
                dj[nb_pos[j]] = dj[nb_pos[j]] + c;
            }
        }
        self.tab = tab;
        self.dj = dj;
        self.needs_refactor = false;
        self.since_refactor = 0;
    }

    fn compute_values(&mut self) {
        let nc = self.ncols;
        let mut xn = vec![T::zero(); nc];
        for (p, &v) in self.nonbasic.iter().enumerate() {
            xn[p] = self.bound_value(v, self.state[v]);
            self.value[v] = xn[p];
        }
        for (k, &v) in self.basis.iter().enumerate() {
            self.value[v] = crate::scalar::dot(&self.tab[k * nc..(k + 1) * nc], &xn);
        }
    }

    /// Restores dual feasibility by flipping boxed nonbasics; returns false if
    /// some nonbasic row variable has the wrong sign.
    fn repair_dual(&mut self) -> bool {
        let tol = T::tol(self.opts.dual_tol);
        for p in 0..self.ncols {
            let v = self.nonbasic[p];
            if self.is_fixed(v) {
                continue;
            }
            let d = self.dj[p];
            let wrong = match self.state[v] {
                State::Lower => d > tol,
                State::Upper => d < -tol,
                State::Basic(_) => unreachable!(),
            };
            if wrong {
                if v >= self.ncols {
                    return false;
                }
                self.state[v] = if d > T::zero() { State::Upper } else { State::Lower };
            }
        }
        true
    }

    /// Exchanges basic position `k` with nonbasic position `p`.
    fn pivot(&mut self, k: usize, p: usize, leave_state: State) {
        let nc = self.ncols;
        let alpha = self.tab[k * nc + p];
        let inv = T::one() / alpha;
        let mut pivot_row: Vec<T> = self.tab[k * nc..(k + 1) * nc].iter().map(|&a| -a * inv).collect();
        pivot_row[p] = inv;
        for i in 0..self.basis.len() {
            if i == k {
                continue;
            }
            let row = &mut self.tab[i * nc..(i + 1) * nc];
            let f = row[p];
            if f == T::zero() {
                continue;
            }
            axpy(row, f, &pivot_row);
            row[p] = f * inv;
        }
        let f = self.dj[p];
        if f != T::zero() {
            axpy(&mut self.dj, f, &pivot_row);
            self.dj[p] = f * inv;
        }
        self.tab[k * nc..(k + 1) * nc].copy_from_slice(&pivot_row);

        let entering = self.nonbasic[p];
        let leaving = self.basis[k];
        self.basis[k] = entering;
        self.nonbasic[p] = leaving;
        self.state[entering] = State::Basic(k);
        self.state[leaving] = leave_state;
        self.since_refactor += 1;
    }

    fn run_dual(&mut self) -> Result<usize, LpError> {
        let nc = self.ncols;
        let ptol = T::tol(self.opts.primal_tol);
        let dtol = T::tol(self.opts.dual_tol);
        let pivtol = T::tol(self.opts.pivot_tol);
        let mut iterations = 0;
        let mut rescued = false;
        loop {
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor();
                if !self.repair_dual() {
                    self.reset_slack_basis();
                }
            }
            self.compute_values();

            // leaving variable: largest bound violation
            let mut leave: Option<(usize, bool, T)> = None;
            for (k, &v) in self.basis.iter().enumerate() {
                let x = self.value[v];
                let below = self.lower[v] - x;
                let above = x - self.upper[v];
                let (viol, up) = if below > above { (below, true) } else { (above, false) };
                let scale = T::one() + if up { self.lower[v].abs() } else { self.upper[v].abs() };
                if viol > ptol * scale && leave.is_none_or(|(_, _, best)| viol > best) {
                    leave = Some((k, up, viol));
                }
            }
            let Some((k, increase, _)) = leave else {
                if self.since_refactor > 0 && !rescued {
                    // confirm optimality on a fresh tableau
                    self.refactor();
                    rescued = true;
                    if !self.repair_dual() {
                        self.reset_slack_basis();
                    }
                    continue;
                }
                return Ok(iterations);
            };
            rescued = false;
            iterations += 1;
            if iterations > self.opts.max_iterations {
                return Err(LpError::IterationLimit(self.opts.max_iterations));
            }

            // Harris two-pass ratio test
            let row = &self.tab[k * nc..(k + 1) * nc];
            let dir = if increase { T::one() } else { -T::one() };
            let mut bound = T::infinity();
            let mut cands: Vec<(usize, T, T)> = Vec::new();
            for (p, &alpha) in row.iter().enumerate() {
                if alpha.abs() <= pivtol {
                    continue;
                }
                let v = self.nonbasic[p];
                if self.is_fixed(v) {
                    continue;
                }
                let s = match self.state[v] {
                    State::Lower => T::one(),
                    State::Upper => -T::one(),
                    State::Basic(_) => unreachable!(),
                };
                if alpha * s * dir <= T::zero() {
                    continue;
                }
                let slack = (-self.dj[p] * s).max(T::zero());
                let a = alpha.abs();
                bound = bound.min((slack + dtol) / a);
                cands.push((p, slack / a, a));
            }
            if cands.is_empty() {
                return Err(LpError::Infeasible);
            }
            let (p, _, _) = cands
                .iter()
                .filter(|c| c.1 <= bound)
                .fold(None::<(usize, T, T)>, |best, &c| match best {
                    Some(b) if b.2 >= c.2 => Some(b),
                    _ => Some(c),
                })
                .expect("at least one candidate within the Harris bound");
            let leave_state = if increase { State::Lower } else { State::Upper };
            self.pivot(k, p, leave_state);
            // keep the duals consistent with the chosen bound after Harris slack
            self.repair_dual();
        }
    }

    fn structural_values(&self) -> Vec<T> {
        self.value[..self.ncols].to_vec()
    }

    fn remove_one(&mut self, r: usize) -> Result<(), LpError> {
        let nc = self.ncols;
        let v = nc + r;
        if !matches!(self.state[v], State::Basic(_)) {
            // bring the row variable into the basis first
            let p = self.nonbasic.iter().position(|&x| x == v).expect("nonbasic var has a position");
            let k = (0..self.basis.len())
                .max_by(|&a, &b| {
                    self.tab[a * nc + p]
                        .abs()
                        .partial_cmp(&self.tab[b * nc + p].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| LpError::Numerical("no basic variable to exchange".into()))?;
            if self.tab[k * nc + p].abs() <= T::tol(self.opts.pivot_tol) {
                self.reset_slack_basis();
                return self.remove_one(r);
            }
            let leaving = self.basis[k];
            let x = self.value[leaving];
            let st = if (x - self.lower[leaving]).abs() <= (self.upper[leaving] - x).abs() {
                State::Lower
            } else {
                State::Upper
            };
            let st = if self.lower[leaving].is_infinite() {
                State::Upper
            } else if self.upper[leaving].is_infinite() {
                State::Lower
            } else {
                st
            };
            self.pivot(k, p, st);
        }
        let State::Basic(k) = self.state[v] else { unreachable!() };
        // drop tableau row k and variable v, renumbering later variables
        let nb = self.basis.len();
        self.tab.drain(k * nc..(k + 1) * nc);
        self.basis.remove(k);
        debug_assert_eq!(self.basis.len(), nb - 1);
        self.state.remove(v);
        self.lower.remove(v);
        self.upper.remove(v);
        self.value.remove(v);
        self.rows.remove(r);
        let h = self.handles.remove(r);
        self.index_of.remove(&h);
        for b in self.basis.iter_mut() {
            if *b > v {
                *b -= 1;
            }
        }
        for b in self.nonbasic.iter_mut() {
            if *b > v {
                *b -= 1;
            }
        }
        for (pos, &bv) in self.basis.iter().enumerate() {
            self.state[bv] = State::Basic(pos);
        }
        for (i, h) in self.handles.iter().enumerate().skip(r) {
            self.index_of.insert(*h, i);
        }
        Ok(())
    }
}

impl<T: Scalar> LpBackend<T> for DualSimplex<T> {
    fn load_columns(&mut self, objective: &[T], col_lower: &[T], col_upper: &[T]) {
        self.ncols = objective.len();
        self.obj = objective.to_vec();
        self.lower = col_lower.to_vec();
        self.upper = col_upper.to_vec();
        self.rows.clear();
        self.handles.clear();
        self.index_of.clear();
        self.value = vec![T::zero(); self.ncols];
        self.reset_slack_basis();
    }

    fn add_rows(&mut self, rows: &[LinearRow<T>]) -> Vec<RowHandle> {
        let nc = self.ncols;
        let mut nb_pos = vec![usize::MAX; nc];
        for (p, &v) in self.nonbasic.iter().enumerate() {
            if v < nc {
                nb_pos[v] = p;
            }
        }
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut trow = vec![T::zero(); nc];
            for &(c, a) in &row.coeffs {
                match self.state[c] {
                    State::Basic(k) => axpy(&mut trow, a, &self.tab[k * nc..(k + 1) * nc]),
                    _ => trow[nb_pos[c]] = trow[nb_pos[c]] + a,
                }
            }
            let v = self.nvars();
            self.tab.extend_from_slice(&trow);
            self.basis.push(v);
            self.state.push(State::Basic(self.basis.len() - 1));
            self.lower.push(row.lower);
            self.upper.push(row.upper);
            self.value.push(T::zero());
            self.rows.push(row.clone());
            let h = RowHandle(self.next_handle);
            self.next_handle += 1;
            self.index_of.insert(h, self.handles.len());
            self.handles.push(h);
            out.push(h);
        }
        out
    }

    fn remove_rows(&mut self, handles: &[RowHandle]) -> Result<(), LpError> {
        let mut idx = Vec::with_capacity(handles.len());
        for h in handles {
            idx.push(*self.index_of.get(h).ok_or(LpError::UnknownRow(*h))?);
        }
        idx.sort_unstable();
        idx.dedup();
        for &r in idx.iter().rev() {
            self.remove_one(r)?;
        }
        if !handles.is_empty() {
            self.needs_refactor = true;
        }
        Ok(())
    }

    fn solve(&mut self) -> Result<LpSolution<T>, LpError> {
        if self.needs_refactor || self.since_refactor > self.opts.refactor_every / 2 {
            self.refactor();
        }
        if !self.repair_dual() {
            self.reset_slack_basis();
        }
        let iterations = self.run_dual()?;
        let primal = self.structural_values();
        let worst = self
            .rows
            .iter()
            .map(|r| r.violation(&primal) / (T::one() + r.lower.abs().min(r.upper.abs())))
            .fold(T::zero(), T::max);
        if worst > T::tol(1e-6) {
            return Err(LpError::Numerical(format!("row violation {worst:e} at reported optimum")));
        }
        Ok(LpSolution {
            objective: crate::scalar::dot(&self.obj, &primal),
            primal,
            iterations,
        })
    }

    fn row_activity(&self, handle: RowHandle) -> Option<T> {
        self.index_of.get(&handle).map(|&r| self.value[self.ncols + r])
    }

    fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

#[inline]
fn axpy<T: Scalar>(y: &mut [T], a: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

/// Solves `A X = B` in place (`A` is `q x q`, `B` is `q x w`, both row-major)
/// by Gaussian elimination with partial pivoting. Returns false when singular.
fn lu_solve_in_place<T: Scalar>(a: &mut [T], q: usize, b: &mut [T], w: usize) -> bool {
    let scale = a.iter().fold(T::zero(), |s, x| s.max(x.abs())).max(T::one());
    for col in 0..q {
        let piv = (col..q)
            .max_by(|&i, &j| a[i * q + col].abs().partial_cmp(&a[j * q + col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if a[piv * q + col].abs() <= T::epsilon() * scale * T::c(q as f64) {
            return false;
        }
        if piv != col {
            for k in 0..q {
                a.swap(piv * q + k, col * q + k);
            }
            for k in 0..w {
                b.swap(piv * w + k, col * w + k);
            }
        }
        let d = a[col * q + col];
        for i in col + 1..q {
            let f = a[i * q + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..q {
                a[i * q + k] = a[i * q + k] - f * a[col * q + k];
            }
            let (top, bottom) = b.split_at_mut(i * w);
            axpy(&mut bottom[..w], -f, &top[col * w..(col + 1) * w]);
        }
    }
    for col in (0..q).rev() {
        let d = a[col * q + col];
        for k in 0..w {
            b[col * w + k] = b[col * w + k] / d;
        }
        for i in 0..col {
            let f = a[i * q + col];
            if f == T::zero() {
                continue;
            }
            let (top, bottom) = b.split_at_mut(col * w);
            axpy(&mut top[i * w..(i + 1) * w], -f, &bottom[..w]);
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(obj: &[f64], lo: &[f64], hi: &[f64]) -> DualSimplex<f64> {
        let mut s = DualSimplex::default();
        s.load_columns(obj, lo, hi);
        s
    }

    #[test]
    fn box_only() {
        let mut s = lp(&[1.0, -2.0, 0.0], &[0.0, -1.0, 2.0], &[3.0, 4.0, 5.0]);
        let sol = s.solve().unwrap();
        assert_eq!(sol.primal[0], 3.0);
        assert_eq!(sol.primal[1], -1.0);
        assert_eq!(sol.objective, 5.0);
    }

    #[test]
    fn small_lp() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, 0 <= x <= 3, 0 <= y <= 10
        let mut s = lp(&[3.0, 2.0], &[0.0, 0.0], &[3.0, 10.0]);
        s.add_rows(&[
            LinearRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Le, 4.0),
            LinearRow::new(vec![(0, 1.0), (1, 3.0)], Sense::Le, 6.0),
        ]);
        let sol = s.solve().unwrap();
        assert!((sol.objective - 11.0).abs() < 1e-9);
        assert!((sol.primal[0] - 3.0).abs() < 1e-9 && (sol.primal[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut s = lp(&[1.0], &[0.0], &[1.0]);
        s.add_rows(&[LinearRow::new(vec![(0, 1.0)], Sense::Ge, 2.0)]);
        assert_eq!(s.solve(), Err(LpError::Infeasible));
    }

    #[test]
    fn warm_start_and_removal() {
        let mut s = lp(&[1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0]);
        let first = s.solve().unwrap();
        assert_eq!(first.objective, 2.0);
        let h = s.add_rows(&[LinearRow::new(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.5)]);
        let second = s.solve().unwrap();
        assert!((second.objective - 1.5).abs() < 1e-12);
        assert!((s.row_activity(h[0]).unwrap() - 1.5).abs() < 1e-12);
        s.remove_rows(&h).unwrap();
        assert_eq!(s.num_rows(), 0);
        assert_eq!(s.solve().unwrap().objective, 2.0);
        assert!(s.row_activity(h[0]).is_none());
        assert_eq!(s.remove_rows(&h), Err(LpError::UnknownRow(h[0])));
    }

    /// Brute-force vertex enumeration oracle for tiny LPs in two columns.
    fn enumerate_2d(obj: [f64; 2], lo: [f64; 2], hi: [f64; 2], rows: &[([f64; 2], f64)]) -> Option<f64> {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        for j in 0..2 {
            let mut e = [0.0; 2];
            e[j] = 1.0;
            lines.push((e, lo[j]));
            lines.push((e, hi[j]));
        }
        let feasible = |x: [f64; 2]| {
            (0..2).all(|j| x[j] >= lo[j] - 1e-9 && x[j] <= hi[j] + 1e-9)
                && rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= b + 1e-9)
        };
        let mut best: Option<f64> = None;
        for a in 0..lines.len() {
            for b in a + 1..lines.len() {
                let (p, q) = (lines[a], lines[b]);
                let det = p.0[0] * q.0[1] - p.0[1] * q.0[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = [(p.1 * q.0[1] - p.0[1] * q.1) / det, (p.0[0] * q.1 - p.1 * q.0[0]) / det];
                if feasible(x) {
                    let v = obj[0] * x[0] + obj[1] * x[1];
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
        }
        best
    }

    #[test]
    fn matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let obj = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let lo = [rng.random_range(-2.0..0.0), rng.random_range(-2.0..0.0)];
            let hi = [rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)];
            let rows: Vec<([f64; 2], f64)> = (0..rng.random_range(0..6))
                .map(|_| ([rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], rng.random_range(-1.0..2.0)))
                .collect();
            let mut s = lp(&obj, &lo, &hi);
            // add rows in two batches to exercise warm starts
            let (a, b) = rows.split_at(rows.len() / 2);
            let to_rows = |rs: &[([f64; 2], f64)]| {
                rs.iter().map(|(a, b)| LinearRow::new(vec![(0, a[0]), (1, a[1])], Sense::Le, *b)).collect::<Vec<_>>()
            };
            s.add_rows(&to_rows(a));
            let _ = s.solve();
            s.add_rows(&to_rows(b));
            let got = s.solve();
            match enumerate_2d(obj, lo, hi, &rows) {
                Some(v) => assert!((got.unwrap().objective - v).abs() < 1e-7),
                None => assert_eq!(got, Err(LpError::Infeasible)),
            }
        }
    }

    #[test]
    fn resolve_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 12;
        let obj: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut s = lp(&obj, &vec![-1.0; n], &vec![1.0; n]);
        // every row is satisfied at the origin
        let rows: Vec<_> = (0..40)
            .map(|_| {
                let coeffs = (0..n).map(|j| (j, rng.random_range(-1.0..1.0))).collect();
                let slack = rng.random_range(0.0..0.5);
                if rng.random_bool(0.5) {
                    LinearRow::new(coeffs, Sense::Le, slack)
                } else {
                    LinearRow::new(coeffs, Sense::Ge, -slack)
                }
            })
            .collect();
        let handles = s.add_rows(&rows);
        let a = s.solve().unwrap();
        let b = s.solve().unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
        assert!(a.objective >= -1e-12);
        // dropping half the rows can only raise the optimum
        s.remove_rows(&handles[..20]).unwrap();
        let after = s.solve().unwrap().objective;
        assert!(after >= a.objective - 1e-9);
        let mut fresh = lp(&obj, &vec![-1.0; n], &vec![1.0; n]);
        fresh.add_rows(&rows[20..]);
        assert!((fresh.solve().unwrap().objective - after).abs() < 1e-8);
    }

    #[test]
    fn lu_solves() {
        let mut a: Vec<f64> = vec![2.0, 1.0, 1.0, 3.0];
        let mut b: Vec<f64> = vec![3.0, 5.0, 4.0, 7.0];
        assert!(lu_solve_in_place(&mut a, 2, &mut b, 2));
        // [[2,1],[1,3]]^{-1} [[3,5],[4,7]]
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[2] - 1.0).abs() < 1e-12);
        assert!((b[1] - 1.6).abs() < 1e-12 && (b[3] - 1.8).abs() < 1e-12);
        let mut singular: Vec<f64> = vec![1.0, 2.0, 2.0, 4.0];
        assert!(!lu_solve_in_place(&mut singular, 2, &mut [0.0f64, 0.0], 1));
    }
}
