//! Problem data and the lifted linear relaxation.
//!
//! A [`QcqpProblem`] is maximized. [`lift`] replaces every product `x_i x_j`
//! by a column `X_ij` (one column per unordered pair), keeps the linearized
//! constraints, and adds the four McCormick rows per pair together with the
//! product bounds from [`x_bounds`].

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::Scalar;

/// `xᵀ Q x + aᵀ x + bᵀ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<T> {
    pub q: SymMatrix<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            q: SymMatrix::zeros(n),
            a: vec![T::zero(); n],
            b: vec![T::zero(); m],
        }
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> T {
        self.q.quad_form(x) + crate::scalar::dot(&self.a, x) + crate::scalar::dot(&self.b, y)
    }
}

/// `form(x, y) <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConstraint<T> {
    pub form: QuadraticForm<T>,
    pub rhs: T,
}

/// `max xᵀQ₀x + a₀ᵀx + b₀ᵀy` subject to quadratic `<=` constraints and finite boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpProblem<T> {
    n: usize,
    m: usize,
    objective: QuadraticForm<T>,
    constraints: Vec<QuadConstraint<T>>,
    x_lower: Vec<T>,
    x_upper: Vec<T>,
    y_lower: Vec<T>,
    y_upper: Vec<T>,
}

impl<T: Scalar> QcqpProblem<T> {
    pub fn new(
        objective: QuadraticForm<T>,
        constraints: Vec<QuadConstraint<T>>,
        x_bounds: (Vec<T>, Vec<T>),
        y_bounds: (Vec<T>, Vec<T>),
    ) -> Result<Self> {
        let n = x_bounds.0.len();
        let m = y_bounds.0.len();
        let invalid = |msg: String| Err(Error::InvalidProblem(msg));
        if x_bounds.1.len() != n || y_bounds.1.len() != m {
            return invalid("lower and upper bound vectors differ in length".into());
        }
        let check_form = |f: &QuadraticForm<T>, what: &str| -> Result<()> {
            if f.q.dim() != n || f.a.len() != n || f.b.len() != m {
                return Err(Error::InvalidProblem(format!("{what}: dimensions do not match n={n}, m={m}")));
            }
            if !f.q.is_symmetric() {
                return Err(Error::InvalidProblem(format!("{what}: Q is not symmetric")));
            }
            Ok(())
        };
        check_form(&objective, "objective")?;
        for (k, c) in constraints.iter().enumerate() {
            check_form(&c.form, &format!("constraint {}", k + 1))?;
            if !c.rhs.is_finite() {
                return invalid(format!("constraint {}: non-finite right-hand side", k + 1));
            }
        }
        for (name, lo, hi) in [("x", &x_bounds.0, &x_bounds.1), ("y", &y_bounds.0, &y_bounds.1)] {
            for (i, (&l, &u)) in lo.iter().zip(hi.iter()).enumerate() {
                if !l.is_finite() || !u.is_finite() {
                    return invalid(format!("{name}_{}: non-finite bound", i + 1));
                }
                if l > u {
                    return invalid(format!("{name}_{}: lower bound {l} exceeds upper bound {u}", i + 1));
                }
            }
        }
        Ok(Self {
            n,
            m,
            objective,
            constraints,
            x_lower: x_bounds.0,
            x_upper: x_bounds.1,
            y_lower: y_bounds.0,
            y_upper: y_bounds.1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> usize {
        self.constraints.len()
    }
    pub fn objective(&self) -> &QuadraticForm<T> {
        &self.objective
    }
    pub fn constraints(&self) -> &[QuadConstraint<T>] {
        &self.constraints
    }
    pub fn x_lower(&self) -> &[T] {
        &self.x_lower
    }
    pub fn x_upper(&self) -> &[T] {
        &self.x_upper
    }
    pub fn y_lower(&self) -> &[T] {
        &self.y_lower
    }
    pub fn y_upper(&self) -> &[T] {
        &self.y_upper
    }

    pub fn objective_value(&self, x: &[T], y: &[T]) -> T {
        self.objective.eval(x, y)
    }

    /// True when every constraint holds at `(x, y)` within `tol`.
    pub fn is_feasible(&self, x: &[T], y: &[T], tol: T) -> bool {
        self.constraints.iter().all(|c| c.form.eval(x, y) <= c.rhs + tol)
    }
}

/// Column layout of the lifted LP: `x`, then `y`, then the upper triangle of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnMap {
    n: usize,
    m: usize,
}

impl ColumnMap {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn y(&self, j: usize) -> usize {
        self.n + j
    }

    /// Column of `X_ij`; `X_ji` maps to the same column.
    pub fn xx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // packed upper triangle, row-major: row i starts at i*n - i(i-1)/2
        let row_start = i * self.n - i * i.saturating_sub(1) / 2;
        self.n + self.m + row_start + (j - i)
    }

    /// `n(n+3)/2 + m`.
    pub fn len(&self) -> usize {
        self.n * (self.n + 3) / 2 + self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Ge,
    Le,
}

/// `lower <= Σ coeffs·z <= upper`, with infinite entries for absent sides.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> LinearRow<T> {
    pub fn new(mut coeffs: Vec<(usize, T)>, sense: Sense, rhs: T) -> Self {
        coeffs.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(coeffs.len());
        for (c, v) in coeffs {
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv = *lv + v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(_, v)| v != T::zero());
        // normalizes -0.0
        let rhs = rhs + T::zero();
        let (lower, upper) = match sense {
            Sense::Ge => (rhs, T::infinity()),
            Sense::Le => (T::neg_infinity(), rhs),
        };
        Self {
            coeffs: merged,
            lower,
            upper,
        }
    }

    pub fn activity(&self, z: &[T]) -> T {
        self.coeffs.iter().fold(T::zero(), |s, &(c, v)| s + v * z[c])
    }

    /// Amount by which `z` violates the row (zero when satisfied).
    pub fn violation(&self, z: &[T]) -> T {
        let a = self.activity(z);
        (self.lower - a).max(a - self.upper).max(T::zero())
    }

    fn key(&self) -> Vec<u64> {
        let mut k: Vec<u64> = self
            .coeffs
            .iter()
            .flat_map(|&(c, v)| [c as u64, v.to_f64_lossy().to_bits()])
            .collect();
        k.push(self.lower.to_f64_lossy().to_bits());
        k.push(self.upper.to_f64_lossy().to_bits());
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Linearized quadratic constraint `k` (0-based).
    Constraint(usize),
    /// McCormick row from the bounds of `x_i` and `x_j`.
    Rlt { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow<T> {
    pub row: LinearRow<T>,
    pub kind: RowKind,
}

/// One McCormick inequality `X_ij + coef_i·x_i + coef_j·x_j (sense) rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RltInequality<T> {
    pub i: usize,
    pub j: usize,
    pub coef_i: T,
    pub coef_j: T,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> RltInequality<T> {
    pub fn lhs(&self, xi: T, xj: T, xij: T) -> T {
        xij + self.coef_i * xi + self.coef_j * xj
    }

    pub fn is_satisfied(&self, xi: T, xj: T, xij: T, tol: T) -> bool {
        let lhs = self.lhs(xi, xj, xij);
        match self.sense {
            Sense::Ge => lhs >= self.rhs - tol,
            Sense::Le => lhs <= self.rhs + tol,
        }
    }

    pub fn to_row(&self, map: &ColumnMap) -> LinearRow<T> {
        LinearRow::new(
            vec![
                (map.xx(self.i, self.j), T::one()),
                (map.x(self.i), self.coef_i),
                (map.x(self.j), self.coef_j),
            ],
            self.sense,
            self.rhs,
        )
    }
}

/// The four bound-product inequalities for the pair `(i, j)`, in the order
/// (l·l, u·u) lower estimators then (l·u, u·l) upper estimators.
pub fn rlt_bound_cuts<T: Scalar>(i: usize, j: usize, l: &[T], u: &[T]) -> [RltInequality<T>; 4] {
    let (li, lj, ui, uj) = (l[i], l[j], u[i], u[j]);
    let row = |coef_i: T, coef_j: T, sense, rhs| RltInequality {
        i,
        j,
        coef_i,
        coef_j,
        sense,
        rhs,
    };
    [
        row(-lj, -li, Sense::Ge, -(li * lj)),
        row(-uj, -ui, Sense::Ge, -(ui * uj)),
        row(-uj, -li, Sense::Le, -(li * uj)),
        row(-lj, -ui, Sense::Le, -(ui * lj)),
    ]
}

/// Bounds on `x_i x_j` over the box: min and max of the four corner products,
/// with the diagonal lower bound clamped at zero.
pub fn x_bounds<T: Scalar>(l: &[T], u: &[T]) -> (SymMatrix<T>, SymMatrix<T>) {
    let n = l.len();
    let corners = |i: usize, j: usize| [l[i] * l[j], l[i] * u[j], u[i] * l[j], u[i] * u[j]];
    let mut lo = SymMatrix::from_fn(n, |i, j| corners(i, j).into_iter().fold(T::infinity(), T::min));
    let hi = SymMatrix::from_fn(n, |i, j| corners(i, j).into_iter().fold(T::neg_infinity(), T::max));
    for i in 0..n {
        lo.set(i, i, lo.get(i, i).max(T::zero()));
    }
    (lo, hi)
}

/// Symmetric `(n+1) x (n+1)` matrix `[[1, xᵀ], [x, X]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct XtildeView<T> {
    matrix: SymMatrix<T>,
}

impl<T: Scalar> XtildeView<T> {
    /// Wraps a full moment matrix; its `(0, 0)` entry must be exactly one.
    pub fn from_matrix(matrix: SymMatrix<T>) -> Result<Self> {
        if matrix.dim() == 0 || matrix.get(0, 0) != T::one() {
            return Err(Error::InvalidProblem("moment matrix needs a unit top-left entry".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    /// Number of original `x` variables.
    pub fn n(&self) -> usize {
        self.matrix.dim() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.matrix.get(i, j)
    }

    pub fn quad_form(&self, v: &[T]) -> T {
        self.matrix.quad_form(v)
    }
}

pub fn assemble_xtilde<T: Scalar>(x_star: &[T], xx_star: &SymMatrix<T>) -> Result<XtildeView<T>> {
    let n = x_star.len();
    if xx_star.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xx_star.dim(),
        });
    }
    let matrix = SymMatrix::from_fn(n + 1, |i, j| match (i, j) {
        (0, 0) => T::one(),
        (0, j) => x_star[j - 1],
        (i, j) => xx_star.get(i - 1, j - 1),
    });
    Ok(XtildeView { matrix })
}

/// The EXT formulation with McCormick rows: the initial LP relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedModel<T> {
    map: ColumnMap,
    objective: Vec<T>,
    col_lower: Vec<T>,
    col_upper: Vec<T>,
    rows: Vec<ModelRow<T>>,
    xx_lower: SymMatrix<T>,
    xx_upper: SymMatrix<T>,
    rlt_generated: usize,
}

impl<T: Scalar> ExtendedModel<T> {
    pub fn columns(&self) -> &ColumnMap {
        &self.map
    }

    pub fn num_columns(&self) -> usize {
        self.map.len()
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn col_lower(&self) -> &[T] {
        &self.col_lower
    }

    pub fn col_upper(&self) -> &[T] {
        &self.col_upper
    }

    /// All permanent rows: linearized constraints first, then McCormick rows.
    pub fn rows(&self) -> &[ModelRow<T>] {
        &self.rows
    }

    pub fn num_constraint_rows(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.kind, RowKind::Constraint(_))).count()
    }

    pub fn num_rlt_rows(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.kind, RowKind::Rlt { .. })).count()
    }

    /// McCormick rows before duplicate removal (four per pair).
    pub fn num_rlt_generated(&self) -> usize {
        self.rlt_generated
    }

    pub fn xx_bounds(&self) -> (&SymMatrix<T>, &SymMatrix<T>) {
        (&self.xx_lower, &self.xx_upper)
    }

    pub fn objective_value(&self, z: &[T]) -> T {
        crate::scalar::dot(&self.objective, z)
    }

    /// Lifted point `(x, y, X = xxᵀ)`.
    pub fn point(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut z = vec![T::zero(); self.num_columns()];
        let n = self.map.n();
        for i in 0..n {
            z[self.map.x(i)] = x[i];
            for j in i..n {
                z[self.map.xx(i, j)] = x[i] * x[j];
            }
        }
        for (j, &v) in y.iter().enumerate() {
            z[self.map.y(j)] = v;
        }
        z
    }

    pub fn x_part(&self, z: &[T]) -> Vec<T> {
        (0..self.map.n()).map(|i| z[self.map.x(i)]).collect()
    }

    pub fn xx_part(&self, z: &[T]) -> SymMatrix<T> {
        SymMatrix::from_fn(self.map.n(), |i, j| z[self.map.xx(i, j)])
    }

    pub fn xtilde(&self, z: &[T]) -> XtildeView<T> {
        assemble_xtilde(&self.x_part(z), &self.xx_part(z)).expect("consistent dimensions")
    }

    /// Largest violation of any permanent row or column bound at `z`.
    pub fn max_violation(&self, z: &[T]) -> T {
        let rows = self.rows.iter().map(|r| r.row.violation(z));
        let cols = z
            .iter()
            .zip(self.col_lower.iter().zip(&self.col_upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(T::zero()));
        rows.chain(cols).fold(T::zero(), T::max)
    }
}

pub fn lift<T: Scalar>(problem: &QcqpProblem<T>) -> Result<ExtendedModel<T>> {
    let (n, m) = (problem.n(), problem.m());
    for (i, (&l, &u)) in problem.x_lower().iter().zip(problem.x_upper()).enumerate() {
        if !l.is_finite() || !u.is_finite() || l > u {
            return Err(Error::InvalidProblem(format!("x_{}: bad bounds [{l}, {u}]", i + 1)));
        }
    }
    let map = ColumnMap::new(n, m);
    let linearize = |f: &QuadraticForm<T>| -> Vec<(usize, T)> {
        let mut c = Vec::new();
        for i in 0..n {
            c.push((map.x(i), f.a[i]));
            c.push((map.xx(i, i), f.q.get(i, i)));
            for j in i + 1..n {
                c.push((map.xx(i, j), T::c(2.0) * f.q.get(i, j)));
            }
        }
        for j in 0..m {
            c.push((map.y(j), f.b[j]));
        }
        c
    };

    let mut objective = vec![T::zero(); map.len()];
    for (c, v) in linearize(problem.objective()) {
        objective[c] = objective[c] + v;
    }

    let (xx_lower, xx_upper) = x_bounds(problem.x_lower(), problem.x_upper());
    let mut col_lower = vec![T::zero(); map.len()];
    let mut col_upper = vec![T::zero(); map.len()];
    for i in 0..n {
        col_lower[map.x(i)] = problem.x_lower()[i];
        col_upper[map.x(i)] = problem.x_upper()[i];
        for j in i..n {
            col_lower[map.xx(i, j)] = xx_lower.get(i, j);
            col_upper[map.xx(i, j)] = xx_upper.get(i, j);
        }
    }
    for j in 0..m {
        col_lower[map.y(j)] = problem.y_lower()[j];
        col_upper[map.y(j)] = problem.y_upper()[j];
    }

    let mut rows: Vec<ModelRow<T>> = problem
        .constraints()
        .iter()
        .enumerate()
        .map(|(k, c)| ModelRow {
            row: LinearRow::new(linearize(&c.form), Sense::Le, c.rhs),
            kind: RowKind::Constraint(k),
        })
        .collect();

    let mut seen = HashSet::new();
    let mut rlt_generated = 0;
    for i in 0..n {
        for j in i..n {
            for ineq in rlt_bound_cuts(i, j, problem.x_lower(), problem.x_upper()) {
                rlt_generated += 1;
                let row = ineq.to_row(&map);
                if seen.insert(row.key()) {
                    rows.push(ModelRow {
                        row,
                        kind: RowKind::Rlt { i, j },
                    });
                }
            }
        }
    }

    Ok(ExtendedModel {
        map,
        objective,
        col_lower,
        col_upper,
        rows,
        xx_lower,
        xx_upper,
        rlt_generated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn parabola() -> QcqpProblem<f64> {
        let mut obj = QuadraticForm::zero(1, 0);
        obj.q.set(0, 0, -1.0);
        obj.a[0] = 1.0;
        QcqpProblem::new(obj, vec![], (vec![0.0], vec![1.0]), (vec![], vec![])).unwrap()
    }

    fn random_problem(n: usize, m: usize, p: usize, rng: &mut ChaCha8Rng) -> QcqpProblem<f64> {
        let form = |rng: &mut ChaCha8Rng| QuadraticForm {
            q: SymMatrix::from_fn(n, |_, _| rng.random_range(-5.0..5.0)),
            a: (0..n).map(|_| rng.random_range(-5.0..5.0)).collect(),
            b: (0..m).map(|_| rng.random_range(-5.0..5.0)).collect(),
        };
        let obj = form(rng);
        let cons = (0..p)
            .map(|_| QuadConstraint {
                form: form(rng),
                rhs: rng.random_range(0.0..10.0),
            })
            .collect();
        let bounds = |k: usize, rng: &mut ChaCha8Rng| {
            let lo: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..4.0)).collect();
            (lo, hi)
        };
        let xb = bounds(n, rng);
        let yb = bounds(m, rng);
        QcqpProblem::new(obj, cons, xb, yb).unwrap()
    }

    fn sample_box(lo: &[f64], hi: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        lo.iter().zip(hi).map(|(&l, &u)| if l == u { l } else { rng.random_range(l..=u) }).collect()
    }

    #[test]
    fn column_map_is_a_bijection() {
        for (n, m) in [(1, 0), (2, 0), (4, 3), (7, 1)] {
            let map = ColumnMap::new(n, m);
            let mut seen = HashSet::new();
            for i in 0..n {
                assert!(seen.insert(map.x(i)));
                for j in i..n {
                    assert_eq!(map.xx(i, j), map.xx(j, i));
                    assert!(seen.insert(map.xx(i, j)));
                }
            }
            for j in 0..m {
                assert!(seen.insert(map.y(j)));
            }
            assert_eq!(seen.len(), map.len());
            assert_eq!(*seen.iter().max().unwrap(), map.len() - 1);
        }
    }

    #[test]
    fn lift_parabola() {
        let model = lift(&parabola()).unwrap();
        let map = model.columns();
        assert_eq!(model.num_columns(), 2);
        assert_eq!(model.objective()[map.x(0)], 1.0);
        assert_eq!(model.objective()[map.xx(0, 0)], -1.0);
        // X ≥ 0, X ≥ 2x − 1, X ≤ x (twice, collapsed)
        assert_eq!(model.num_rlt_generated(), 4);
        assert_eq!(model.num_rlt_rows(), 3);
        let rows: Vec<_> = model.rows().iter().map(|r| r.row.clone()).collect();
        let x = map.x(0);
        let xx = map.xx(0, 0);
        assert!(rows.contains(&LinearRow::new(vec![(xx, 1.0)], Sense::Ge, 0.0)));
        assert!(rows.contains(&LinearRow::new(vec![(xx, 1.0), (x, -2.0)], Sense::Ge, -1.0)));
        assert!(rows.contains(&LinearRow::new(vec![(xx, 1.0), (x, -1.0)], Sense::Le, 0.0)));
        assert!(rows.iter().any(|r| r.coeffs.len() == 1 && r.lower == 0.0));
    }

    #[test]
    fn lift_counts_unit_box_pairs() {
        let mut obj = QuadraticForm::zero(2, 0);
        obj.q.set(0, 1, 1.0);
        let p = QcqpProblem::new(obj, vec![], (vec![0.0; 2], vec![1.0; 2]), (vec![], vec![])).unwrap();
        let model = lift(&p).unwrap();
        assert_eq!(model.num_columns(), 5);
        assert_eq!(model.num_rlt_generated(), 12);
        // the two upper estimators coincide on each diagonal pair
        assert_eq!(model.num_rlt_rows(), 10);
        assert_eq!(model.num_constraint_rows(), 0);
        assert_eq!(model.rows().len(), model.num_rlt_rows());
    }

    #[test]
    fn lift_counts_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_problem(4, 2, 3, &mut rng);
        let model = lift(&p).unwrap();
        assert_eq!(model.num_columns(), 4 * 7 / 2 + 2);
        assert_eq!(model.num_constraint_rows(), 3);
        assert_eq!(model.num_rlt_generated(), 4 * 10);
    }

    #[test]
    fn rejects_bad_bounds() {
        let obj = QuadraticForm::<f64>::zero(1, 0);
        assert!(QcqpProblem::new(obj.clone(), vec![], (vec![1.0], vec![0.0]), (vec![], vec![])).is_err());
        assert!(QcqpProblem::new(obj.clone(), vec![], (vec![f64::NEG_INFINITY], vec![0.0]), (vec![], vec![])).is_err());
        assert!(QcqpProblem::new(obj, vec![], (vec![0.0], vec![f64::NAN]), (vec![], vec![])).is_err());
    }

    #[test]
    fn x_bounds_examples() {
        let (lo, hi) = x_bounds(&[0.0, 0.0], &[1.0, 1.0]);
        assert!((0..2).all(|i| (0..2).all(|j| lo.get(i, j) == 0.0 && hi.get(i, j) == 1.0)));
        let (lo, hi) = x_bounds(&[-1.0, 2.0], &[2.0, 3.0]);
        assert_eq!(lo.get(0, 1), -3.0);
        assert_eq!(hi.get(0, 1), 6.0);
        // raw min{1, −2, 4} = −2 clamped
        assert_eq!(lo.get(0, 0), 0.0);
        assert_eq!(hi.get(0, 0), 4.0);
    }

    #[test]
    fn rlt_degenerate_bounds_force_zero() {
        let rows = rlt_bound_cuts(0, 1, &[0.0, 0.0], &[0.0, 0.0]);
        for r in &rows {
            assert_eq!((r.coef_i, r.coef_j, r.rhs), (0.0, 0.0, 0.0));
        }
        assert_eq!(rows.iter().filter(|r| r.sense == Sense::Ge).count(), 2);
    }

    #[test]
    fn rlt_unit_box() {
        let [r1, r2, r3, r4] = rlt_bound_cuts(0, 1, &[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!((r1.coef_i, r1.coef_j, r1.sense, r1.rhs), (0.0, 0.0, Sense::Ge, 0.0));
        assert_eq!((r2.coef_i, r2.coef_j, r2.sense, r2.rhs), (-1.0, -1.0, Sense::Ge, -1.0));
        assert_eq!((r3.coef_i, r3.coef_j, r3.sense, r3.rhs), (-1.0, 0.0, Sense::Le, 0.0));
        assert_eq!((r4.coef_i, r4.coef_j, r4.sense, r4.rhs), (0.0, -1.0, Sense::Le, 0.0));
    }

    #[test]
    fn rlt_general_box_holds_on_products() {
        let (l, u) = ([-1.0, 2.0], [2.0, 3.0]);
        let rows = rlt_bound_cuts(0, 1, &l, &u);
        assert_eq!((rows[0].coef_i, rows[0].coef_j, rows[0].rhs), (-2.0, 1.0, 2.0));
        assert_eq!((rows[1].coef_i, rows[1].coef_j, rows[1].rhs), (-3.0, -2.0, -6.0));
        assert_eq!((rows[2].coef_i, rows[2].coef_j, rows[2].rhs), (-3.0, 1.0, 3.0));
        assert_eq!((rows[3].coef_i, rows[3].coef_j, rows[3].rhs), (-2.0, -2.0, -4.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let xi = rng.random_range(l[0]..=u[0]);
            let xj = rng.random_range(l[1]..=u[1]);
            assert!(rows.iter().all(|r| r.is_satisfied(xi, xj, xi * xj, 1e-9)));
        }
    }

    #[test]
    fn lifted_rows_valid_on_rank_one_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let p = random_problem(5, 2, 0, &mut rng);
            let model = lift(&p).unwrap();
            for _ in 0..1000 {
                let x = sample_box(p.x_lower(), p.x_upper(), &mut rng);
                let y = sample_box(p.y_lower(), p.y_upper(), &mut rng);
                let z = model.point(&x, &y);
                assert!(model.max_violation(&z) <= 1e-9);
                let lifted = model.objective_value(&z);
                let direct = p.objective_value(&x, &y);
                assert!((lifted - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
                let (lo, hi) = model.xx_bounds();
                for i in 0..5 {
                    for j in 0..5 {
                        assert!(lo.get(i, j) <= x[i] * x[j] + 1e-12 && x[i] * x[j] <= hi.get(i, j) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn constraint_rows_match_quadratic_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = random_problem(3, 1, 2, &mut rng);
        let model = lift(&p).unwrap();
        let x = sample_box(p.x_lower(), p.x_upper(), &mut rng);
        let y = sample_box(p.y_lower(), p.y_upper(), &mut rng);
        let z = model.point(&x, &y);
        for r in model.rows() {
            if let RowKind::Constraint(k) = r.kind {
                let c = &p.constraints()[k];
                assert!((r.row.activity(&z) - c.form.eval(&x, &y)).abs() < 1e-9);
                assert_eq!(r.row.upper, c.rhs);
            }
        }
    }

    #[test]
    fn xtilde_examples() {
        let xt = assemble_xtilde(&[0.0], &SymMatrix::zeros(1)).unwrap();
        assert_eq!(xt.matrix(), &SymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap());
        let xt = assemble_xtilde(&[2.0], &SymMatrix::from_rows(&[vec![1.0]]).unwrap()).unwrap();
        assert_eq!(xt.matrix(), &SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap());
    }

    #[test]
    fn rank_one_xtilde_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let n = rng.random_range(1..8);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let xx = SymMatrix::from_fn(n, |i, j| x[i] * x[j]);
            let xt = assemble_xtilde(&x, &xx).unwrap();
            let pairs = crate::linalg::sym_eigen(xt.matrix(), 1e-8).unwrap();
            assert!(pairs[0].value >= -1e-9);
        }
    }
}
