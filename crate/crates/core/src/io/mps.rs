//! Free-format MPS export of the lifted LP, for cross-checking the root bound
//! with an external LP solver.
//!
//! Columns are named `x<i>`, `y<j>` and `X<i>_<j>` (1-based, `i <= j`). Rows
//! are `con<k>` for linearized constraints and `rlt<i>_<j>_<r>` for McCormick
//! rows. The objective row is `obj` with `OBJSENSE MAX`.

use std::fmt::Write as _;

use super::instance::format_number;
use crate::model::{ExtendedModel, RowKind};
use crate::scalar::Scalar;

fn column_names<T: Scalar>(model: &ExtendedModel<T>) -> Vec<String> {
    let map = model.columns();
    let mut names = vec![String::new(); map.len()];
    for i in 0..map.n() {
        names[map.x(i)] = format!("x{}", i + 1);
        for j in i..map.n() {
            names[map.xx(i, j)] = format!("X{}_{}", i + 1, j + 1);
        }
    }
    for j in 0..map.m() {
        names[map.y(j)] = format!("y{}", j + 1);
    }
    names
}

pub fn write_mps<T: Scalar>(model: &ExtendedModel<T>, name: &str) -> String {
    let cols = column_names(model);
    let mut row_names = Vec::with_capacity(model.rows().len());
    let mut rlt_seq = std::collections::HashMap::new();
    for r in model.rows() {
        row_names.push(match r.kind {
            RowKind::Constraint(k) => format!("con{}", k + 1),
            RowKind::Rlt { i, j } => {
                let s = rlt_seq.entry((i, j)).or_insert(0);
                *s += 1;
                format!("rlt{}_{}_{}", i + 1, j + 1, s)
            }
        });
    }

    // column-major coefficient lists
    let mut entries: Vec<Vec<(usize, T)>> = vec![Vec::new(); cols.len()];
    for (ri, r) in model.rows().iter().enumerate() {
        for &(c, v) in &r.row.coeffs {
            entries[c].push((ri, v));
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    let _ = writeln!(out, "OBJSENSE\n    MAX");
    let _ = writeln!(out, "ROWS\n N  obj");
    for (r, rn) in model.rows().iter().zip(&row_names) {
        let (lo, hi) = (r.row.lower, r.row.upper);
        let tag = match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => "E",
            (true, _) => "G",
            (false, true) => "L",
            (false, false) => "N",
        };
        let _ = writeln!(out, " {tag}  {rn}");
    }
    let _ = writeln!(out, "COLUMNS");
    for (c, cname) in cols.iter().enumerate() {
        let obj = model.objective()[c];
        if obj != T::zero() {
            let _ = writeln!(out, "    {cname}  obj  {}", format_number(obj));
        }
        for &(ri, v) in &entries[c] {
            let _ = writeln!(out, "    {cname}  {}  {}", row_names[ri], format_number(v));
        }
    }
    let _ = writeln!(out, "RHS");
    let mut ranges = String::new();
    for (r, rn) in model.rows().iter().zip(&row_names) {
        let (lo, hi) = (r.row.lower, r.row.upper);
        let rhs = if lo.is_finite() { lo } else { hi };
        if rhs.is_finite() && rhs != T::zero() {
            let _ = writeln!(out, "    rhs  {rn}  {}", format_number(rhs));
        }
        if lo.is_finite() && hi.is_finite() && lo != hi {
            let _ = writeln!(ranges, "    rng  {rn}  {}", format_number(hi - lo));
        }
    }
    if !ranges.is_empty() {
        let _ = writeln!(out, "RANGES");
        out.push_str(&ranges);
    }
    let _ = writeln!(out, "BOUNDS");
    for (c, cname) in cols.iter().enumerate() {
        let (l, u) = (model.col_lower()[c], model.col_upper()[c]);
        if l == u {
            let _ = writeln!(out, " FX bnd  {cname}  {}", format_number(l));
        } else {
            let _ = writeln!(out, " LO bnd  {cname}  {}", format_number(l));
            let _ = writeln!(out, " UP bnd  {cname}  {}", format_number(u));
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}
