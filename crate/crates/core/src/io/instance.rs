//! Line-oriented text format for [`QcqpProblem`].
//!
//! ```text
//! # max x - x^2 on [0, 1]
//! QCQP 1 0 0
//! BOUNDS X
//! 1 0 1
//! BOUNDS Y
//! OBJ Q
//! 1 1 -1
//! OBJ A
//! 1 1
//! OBJ B
//! ```
//!
//! Indices are 1-based. `Q` lines give the upper triangle (`i <= j`) and set
//! both `Q_ij` and `Q_ji`; repeated entries are summed. A constraint block
//! `CON k c` holds `Q`, `A` and `B` subsections for `form_k(x, y) <= c`.
//! Anything after `#` is ignored, and data may follow a header on the same
//! line (`OBJ A 1 1`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{QcqpProblem, QuadConstraint, QuadraticForm};
use crate::scalar::Scalar;

/// Shortest text that parses back to exactly `v`.
///
/// Integral values print without a fractional part; magnitudes outside
/// `[1e-5, 1e16)` use exponent notation.
pub fn format_number<T: Scalar>(v: T) -> String {
    let v = v + T::zero();
    let a = v.abs();
    if v.is_nan() || a == T::zero() || (a >= T::c(1e-5) && a < T::c(1e16)) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Q,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Header,
    BoundsX,
    BoundsY,
    Obj(Part),
    /// Constraint `k` (0-based), before any subsection.
    Con(usize),
    ConPart(usize, Part),
}

struct Builder<T> {
    n: usize,
    m: usize,
    bounds_x: Vec<Option<(T, T)>>,
    bounds_y: Vec<Option<(T, T)>>,
    objective: QuadraticForm<T>,
    constraints: Vec<Option<QuadConstraint<T>>>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: Scalar>(line: usize, tok: &str) -> Result<T> {
    let v: T = tok.parse().map_err(|_| err(line, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

/// 1-based index in `1..=dim`, returned 0-based.
fn index(line: usize, tok: &str, dim: usize, what: &str) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| err(line, format!("`{tok}` is not a valid {what} index")))?;
    if i == 0 || i > dim {
        return Err(err(line, format!("{what} index {i} out of range 1..={dim}")));
    }
    Ok(i - 1)
}

fn arity(line: usize, toks: &[&str], want: usize, what: &str) -> Result<()> {
    if toks.len() != want {
        return Err(err(
            line,
            format!("{what} line needs {want} fields, found {}", toks.len()),
        ));
    }
    Ok(())
}

impl<T: Scalar> Builder<T> {
    fn form_part(&mut self, section: Section) -> (&mut QuadraticForm<T>, Part) {
        match section {
            Section::Obj(p) => (&mut self.objective, p),
            Section::ConPart(k, p) => (
                &mut self.constraints[k].as_mut().expect("block opened before its parts").form,
                p,
            ),
            _ => unreachable!("not a form section"),
        }
    }

    fn data(&mut self, section: Section, line: usize, toks: &[&str]) -> Result<()> {
        match section {
            Section::Start => Err(err(line, "data before the `QCQP` header")),
            Section::Header => Err(err(line, "data outside any section")),
            Section::Con(k) => Err(err(line, format!("data in CON {} before a Q, A or B subsection", k + 1))),
            Section::BoundsX | Section::BoundsY => {
                arity(line, toks, 3, "bound")?;
                let (slots, what) = if section == Section::BoundsX {
                    (&mut self.bounds_x, "x")
                } else {
                    (&mut self.bounds_y, "y")
                };
                let i = index(line, toks[0], slots.len(), what)?;
                let (l, u) = (number::<T>(line, toks[1])?, number::<T>(line, toks[2])?);
                if l > u {
                    return Err(err(line, format!("{what}_{}: lower bound {l} exceeds upper bound {u}", i + 1)));
                }
                if slots[i].replace((l, u)).is_some() {
                    return Err(err(line, format!("{what}_{} bounded twice", i + 1)));
                }
                Ok(())
            }
            Section::Obj(_) | Section::ConPart(..) => {
                let (n, m) = (self.n, self.m);
                let (form, part) = self.form_part(section);
                match part {
                    Part::Q => {
                        arity(line, toks, 3, "Q")?;
                        let i = index(line, toks[0], n, "x")?;
                        let j = index(line, toks[1], n, "x")?;
                        if i > j {
                            return Err(err(line, format!("Q entry ({}, {}) below the diagonal", i + 1, j + 1)));
                        }
                        let v = number::<T>(line, toks[2])?;
                        form.q.set(i, j, form.q.get(i, j) + v);
                    }
                    Part::A => {
                        arity(line, toks, 2, "A")?;
                        let i = index(line, toks[0], n, "x")?;
                        form.a[i] = form.a[i] + number::<T>(line, toks[1])?;
                    }
                    Part::B => {
                        arity(line, toks, 2, "B")?;
                        let j = index(line, toks[0], m, "y")?;
                        form.b[j] = form.b[j] + number::<T>(line, toks[1])?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn count(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| err(line, format!("`{tok}` is not a valid {what}")))
}

/// Parses an instance. Errors carry the 1-based line number.
pub fn parse_instance<T: Scalar>(text: &str) -> Result<QcqpProblem<T>> {
    let mut section = Section::Start;
    let mut b: Option<Builder<T>> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };

        if head == "QCQP" {
            if b.is_some() {
                return Err(err(line, "second `QCQP` header"));
            }
            if toks.len() != 4 {
                return Err(err(line, "expected `QCQP <n> <m> <p>`"));
            }
            let (n, m, p) = (count(line, toks[1], "n")?, count(line, toks[2], "m")?, count(line, toks[3], "p")?);
            b = Some(Builder {
                n,
                m,
                bounds_x: vec![None; n],
                bounds_y: vec![None; m],
                objective: QuadraticForm::zero(n, m),
                constraints: vec![None; p],
            });
            section = Section::Header;
            continue;
        }
        if head.starts_with(|c: char| c.is_ascii_alphabetic()) {
            let Some(builder) = b.as_mut() else {
                return Err(err(line, format!("`{head}` before the `QCQP` header")));
            };
            let (next, rest) = match (head, toks.get(1).copied()) {
                ("BOUNDS", Some("X")) => (Section::BoundsX, &toks[2..]),
                ("BOUNDS", Some("Y")) => (Section::BoundsY, &toks[2..]),
                ("OBJ", Some("Q")) => (Section::Obj(Part::Q), &toks[2..]),
                ("OBJ", Some("A")) => (Section::Obj(Part::A), &toks[2..]),
                ("OBJ", Some("B")) => (Section::Obj(Part::B), &toks[2..]),
                ("CON", _) => {
                    if toks.len() != 3 {
                        return Err(err(line, "expected `CON <k> <c>`"));
                    }
                    let k = index(line, toks[1], builder.constraints.len(), "constraint")?;
                    let rhs = number::<T>(line, toks[2])?;
                    if builder.constraints[k].is_some() {
                        return Err(err(line, format!("constraint {} defined twice", k + 1)));
                    }
                    builder.constraints[k] = Some(QuadConstraint {
                        form: QuadraticForm::zero(builder.n, builder.m),
                        rhs,
                    });
                    section = Section::Con(k);
                    continue;
                }
                ("Q" | "A" | "B", _) => {
                    let k = match section {
                        Section::Con(k) | Section::ConPart(k, _) => k,
                        _ => return Err(err(line, format!("`{head}` subsection outside a CON block"))),
                    };
                    let part = match head {
                        "Q" => Part::Q,
                        "A" => Part::A,
                        _ => Part::B,
                    };
                    (Section::ConPart(k, part), &toks[1..])
                }
                _ => {
                    let name = toks.iter().take(2).copied().collect::<Vec<_>>().join(" ");
                    return Err(err(line, format!("unknown section `{name}`")));
                }
            };
            section = next;
            if !rest.is_empty() {
                builder.data(section, line, rest)?;
            }
            continue;
        }
        match b.as_mut() {
            Some(builder) => builder.data(section, line, &toks)?,
            None => return Err(err(line, "data before the `QCQP` header")),
        }
    }

    let b = b.ok_or_else(|| err(last_line.max(1), "missing `QCQP` header"))?;
    let unpack = |slots: Vec<Option<(T, T)>>, what: &str| -> Result<(Vec<T>, Vec<T>)> {
        let mut lo = Vec::with_capacity(slots.len());
        let mut hi = Vec::with_capacity(slots.len());
        for (i, s) in slots.into_iter().enumerate() {
            let (l, u) = s.ok_or_else(|| err(last_line, format!("no bounds given for {what}_{}", i + 1)))?;
            lo.push(l);
            hi.push(u);
        }
        Ok((lo, hi))
    };
    let xb = unpack(b.bounds_x, "x")?;
    let yb = unpack(b.bounds_y, "y")?;
    let constraints = b
        .constraints
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.ok_or_else(|| err(last_line, format!("constraint {} never defined", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    QcqpProblem::new(b.objective, constraints, xb, yb).map_err(|e| err(last_line, e.to_string()))
}

fn write_form<T: Scalar>(out: &mut String, f: &QuadraticForm<T>, headers: [&str; 3]) {
    let n = f.a.len();
    let _ = writeln!(out, "{}", headers[0]);
    for i in 0..n {
        for j in i..n {
            let v = f.q.get(i, j);
            if v != T::zero() {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, format_number(v));
            }
        }
    }
    let _ = writeln!(out, "{}", headers[1]);
    for (i, &v) in f.a.iter().enumerate().filter(|(_, v)| **v != T::zero()) {
        let _ = writeln!(out, "{} {}", i + 1, format_number(v));
    }
    let _ = writeln!(out, "{}", headers[2]);
    for (j, &v) in f.b.iter().enumerate().filter(|(_, v)| **v != T::zero()) {
        let _ = writeln!(out, "{} {}", j + 1, format_number(v));
    }
}

/// Canonical text of `problem`: every header present, zero coefficients
/// omitted, entries in index order.
pub fn serialize_instance<T: Scalar>(problem: &QcqpProblem<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "QCQP {} {} {}", problem.n(), problem.m(), problem.p());
    for (header, lo, hi) in [
        ("BOUNDS X", problem.x_lower(), problem.x_upper()),
        ("BOUNDS Y", problem.y_lower(), problem.y_upper()),
    ] {
        let _ = writeln!(out, "{header}");
        for (i, (&l, &u)) in lo.iter().zip(hi).enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, format_number(l), format_number(u));
        }
    }
    write_form(&mut out, problem.objective(), ["OBJ Q", "OBJ A", "OBJ B"]);
    for (k, c) in problem.constraints().iter().enumerate() {
        let _ = writeln!(out, "CON {} {}", k + 1, format_number(c.rhs));
        write_form(&mut out, &c.form, ["Q", "A", "B"]);
    }
    out
}
