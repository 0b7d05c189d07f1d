//! Box-constrained QP instances and reference optima.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{QcqpProblem, QuadraticForm};
use crate::scalar::Scalar;

/// `max xᵀQx + aᵀx` over `[0, 1]ⁿ` with integer entries in `[-50, 50] \ {0}`.
///
/// Each diagonal entry, each off-diagonal pair and each linear coefficient is
/// present independently with probability `density`.
pub fn gen_boxqp<T: Scalar>(n: usize, density: f64, seed: u64) -> Result<QcqpProblem<T>> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("BoxQP needs n >= 2, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidProblem(format!("density {density} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entry = |rng: &mut ChaCha8Rng| -> T {
        if rng.random_bool(density) {
            let mag = rng.random_range(1..=50);
            T::c(if rng.random_bool(0.5) { mag as f64 } else { -(mag as f64) })
        } else {
            T::zero()
        }
    };
    let mut q = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            q.set(i, j, entry(&mut rng));
        }
    }
    let a = (0..n).map(|_| entry(&mut rng)).collect();
    QcqpProblem::new(
        QuadraticForm { q, a, b: Vec::new() },
        Vec::new(),
        (vec![T::zero(); n], vec![T::one(); n]),
        (Vec::new(), Vec::new()),
    )
}

fn require_box<T: Scalar>(problem: &QcqpProblem<T>) -> Result<()> {
    if problem.p() != 0 {
        return Err(Error::Unsupported("reference optimum needs a problem without quadratic constraints".into()));
    }
    Ok(())
}

/// The `y` part of a box problem is linear and separable.
fn best_y<T: Scalar>(problem: &QcqpProblem<T>) -> Vec<T> {
    let b = &problem.objective().b;
    (0..problem.m())
        .map(|j| {
            let (l, u) = (problem.y_lower()[j], problem.y_upper()[j]);
            if b[j] * u >= b[j] * l {
                u
            } else {
                l
            }
        })
        .collect()
}

/// Maximizes the objective in coordinate `i` with all others fixed.
fn best_coordinate<T: Scalar>(q: &SymMatrix<T>, a: &[T], x: &[T], i: usize, l: T, u: T) -> T {
    // f(t) = q_ii t² + (a_i + 2 Σ_{j≠i} q_ij x_j) t + const
    let lin = a[i]
        + T::c(2.0)
            * (0..x.len())
                .filter(|&j| j != i)
                .map(|j| q.get(i, j) * x[j])
                .sum::<T>();
    let qi = q.get(i, i);
    let f = |t: T| qi * t * t + lin * t;
    let mut best = if f(u) >= f(l) { u } else { l };
    if qi < T::zero() {
        let t = (-lin / (T::c(2.0) * qi)).max(l).min(u);
        if f(t) > f(best) {
            best = t;
        }
    }
    best
}

fn coordinate_ascent<T: Scalar>(problem: &QcqpProblem<T>, x: &mut [T]) -> T {
    let obj = problem.objective();
    let eval = |x: &[T]| obj.q.quad_form(x) + crate::scalar::dot(&obj.a, x);
    let mut value = eval(x);
    for _ in 0..1000 {
        for i in 0..x.len() {
            x[i] = best_coordinate(&obj.q, &obj.a, x, i, problem.x_lower()[i], problem.x_upper()[i]);
        }
        let next = eval(x);
        if next <= value + T::epsilon() * (T::one() + value.abs()) {
            return next.max(value);
        }
        value = next;
    }
    value
}

/// Every stationary point of every face of the box: each coordinate sits at a
/// bound or solves its gradient equation. The global maximum is among them.
fn enumerate_faces<T: Scalar>(problem: &QcqpProblem<T>) -> T {
    let n = problem.n();
    let obj = problem.objective();
    let (lo, hi) = (problem.x_lower(), problem.x_upper());
    let mut best = T::neg_infinity();
    let mut code = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| code[i] == 2).collect();
        let mut x: Vec<T> = (0..n).map(|i| if code[i] == 1 { hi[i] } else { lo[i] }).collect();
        // 2 Q_FF x_F = -(a_F + 2 Q_FB x_B)
        let k = free.len();
        let mut mat = vec![T::zero(); k * k];
        let mut rhs = vec![T::zero(); k];
        for (r, &i) in free.iter().enumerate() {
            rhs[r] = -obj.a[i];
            for j in 0..n {
                if code[j] != 2 {
                    rhs[r] = rhs[r] - T::c(2.0) * obj.q.get(i, j) * x[j];
                }
            }
            for (c, &j) in free.iter().enumerate() {
                mat[r * k + c] = T::c(2.0) * obj.q.get(i, j);
            }
        }
        if let Some(sol) = solve_small(&mut mat, &mut rhs, k) {
            let tol = T::tol(1e-12);
            if free.iter().zip(&sol).all(|(&i, &v)| v >= lo[i] - tol && v <= hi[i] + tol) {
                for (&i, &v) in free.iter().zip(&sol) {
                    x[i] = v.max(lo[i]).min(hi[i]);
                }
                best = best.max(obj.q.quad_form(&x) + crate::scalar::dot(&obj.a, &x));
            }
        }
        let mut pos = 0;
        while pos < n && code[pos] == 2 {
            code[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return best;
        }
        code[pos] += 1;
    }
}

fn solve_small<T: Scalar>(a: &mut [T], b: &mut [T], k: usize) -> Option<Vec<T>> {
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i * k + col].abs().partial_cmp(&a[j * k + col].abs()).unwrap())?;
        if a[piv * k + col].abs() <= T::tol(1e-12) {
            return None;
        }
        for c in 0..k {
            a.swap(piv * k + c, col * k + c);
        }
        b.swap(piv, col);
        for r in 0..k {
            if r != col {
                let f = a[r * k + col] / a[col * k + col];
                for c in col..k {
                    a[r * k + c] = a[r * k + c] - f * a[col * k + c];
                }
                b[r] = b[r] - f * b[col];
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i * k + i]).collect())
}

/// Global optimum of a box-constrained problem with `n <= 3`.
///
/// Scans a grid of spacing `grid_step`, polishes the best grid points by
/// exact coordinate ascent, and compares with the stationary points of every
/// face of the box.
pub fn brute_force_opt<T: Scalar>(problem: &QcqpProblem<T>, grid_step: f64) -> Result<T> {
    require_box(problem)?;
    let n = problem.n();
    if n > 3 {
        return Err(Error::Unsupported(format!("brute force needs n <= 3, got {n}")));
    }
    if grid_step.is_nan() || grid_step <= 0.0 {
        return Err(Error::InvalidProblem(format!("grid step {grid_step} must be positive")));
    }
    let y = best_y(problem);
    let y_part = crate::scalar::dot(&problem.objective().b, &y);
    if n == 0 {
        return Ok(y_part);
    }
    let obj = problem.objective();
    let axes: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let (l, u) = (problem.x_lower()[i], problem.x_upper()[i]);
            let steps = ((u - l).to_f64_lossy() / grid_step).ceil().max(0.0) as usize;
            (0..=steps).map(|k| (l + T::c(k as f64 * grid_step)).min(u)).collect()
        })
        .collect();
    let mut best_pts: Vec<(T, Vec<T>)> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<T> = (0..n).map(|i| axes[i][idx[i]]).collect();
        let v = obj.q.quad_form(&x) + crate::scalar::dot(&obj.a, &x);
        best_pts.push((v, x));
        if best_pts.len() > 64 {
            best_pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            best_pts.truncate(8);
        }
        let mut pos = 0;
        while pos < n && idx[pos] + 1 == axes[pos].len() {
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
        idx[pos] += 1;
    }
    let mut best = T::neg_infinity();
    for (_, mut x) in best_pts {
        best = best.max(coordinate_ascent(problem, &mut x));
    }
    Ok(best.max(enumerate_faces(problem)) + y_part)
}

/// Best value found by coordinate ascent from `starts` seeded starting points.
/// A lower bound on the optimum, usable as a best-known value.
pub fn local_search_opt<T: Scalar>(problem: &QcqpProblem<T>, starts: usize, seed: u64) -> Result<T> {
    require_box(problem)?;
    let y = best_y(problem);
    let y_part = crate::scalar::dot(&problem.objective().b, &y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (problem.x_lower(), problem.x_upper());
    let mut best = T::neg_infinity();
    for s in 0..starts.max(1) {
        let mut x: Vec<T> = (0..problem.n())
            .map(|i| {
                let t: f64 = if s % 2 == 0 {
                    rng.random_range(0.0..1.0)
                } else if rng.random_bool(0.5) {
                    1.0
                } else {
                    0.0
                };
                lo[i] + (hi[i] - lo[i]) * T::c(t)
            })
            .collect();
        best = best.max(coordinate_ascent(problem, &mut x));
    }
    Ok(best + y_part)
}
