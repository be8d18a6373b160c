//! MPS export.
//!
//! Fields sit at the fixed-format column positions whenever names fit in
//! eight characters. The fleet naming scheme is longer than that, so those
//! lines spill over; every field stays whitespace-separated and the file reads
//! back in free-MPS mode (HiGHS, CBC, GLPK `--freemps`, SCIP).

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::instance::{MilpInstance, Sense};
use crate::scalar::Scalar;

const OBJ_ROW: &str = "obj";

fn num<S: Scalar>(v: S) -> String {
    // Shortest representation that parses back to the same f64.
    let v = v.as_f64();
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Render `instance` as an MPS document (minimisation).
pub fn to_mps_string<S: Scalar>(instance: &MilpInstance<S>) -> String {
    let mut out = String::new();
    let n = instance.num_cols();
    let _ = writeln!(out, "NAME          {}", instance.name);
    let _ = writeln!(out, "OBJSENSE\n    MIN");
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for r in &instance.rows {
        let code = match r.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {code}  {}", r.name);
    }

    let mut by_col: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    for (i, r) in instance.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            by_col[j].push((i, a));
        }
    }

    let _ = writeln!(out, "COLUMNS");
    let mut in_int = false;
    let mut markers = 0;
    for j in 0..n {
        let name = &instance.col_names[j];
        if instance.integer[j] != in_int {
            let tag = if instance.integer[j] { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    MARKER{markers:<4}  'MARKER'                 '{tag}'");
            markers += 1;
            in_int = instance.integer[j];
        }
        let obj = instance.objective[j];
        // Emit an objective entry even when zero so every column is declared.
        if obj != S::zero() || by_col[j].is_empty() {
            let _ = writeln!(out, "    {name:<8}  {OBJ_ROW:<8}  {:>12}", num(obj));
        }
        for &(i, a) in &by_col[j] {
            let _ = writeln!(out, "    {name:<8}  {:<8}  {:>12}", instance.rows[i].name, num(a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    MARKER{markers:<4}  'MARKER'                 'INTEND'");
    }

    let _ = writeln!(out, "RHS");
    for r in &instance.rows {
        if r.rhs != S::zero() {
            let _ = writeln!(out, "    RHS       {:<8}  {:>12}", r.name, num(r.rhs));
        }
    }

    let _ = writeln!(out, "BOUNDS");
    for j in 0..n {
        let name = &instance.col_names[j];
        let (lo, hi) = (instance.lower[j], instance.upper[j]);
        if lo == hi {
            let _ = writeln!(out, " FX BND       {name:<8}  {:>12}", num(lo));
            continue;
        }
        if lo == S::neg_infinity() && hi == S::infinity() {
            let _ = writeln!(out, " FR BND       {name}");
            continue;
        }
        if lo == S::neg_infinity() {
            let _ = writeln!(out, " MI BND       {name}");
        } else if lo != S::zero() {
            let _ = writeln!(out, " LO BND       {name:<8}  {:>12}", num(lo));
        }
        if hi != S::infinity() {
            let _ = writeln!(out, " UP BND       {name:<8}  {:>12}", num(hi));
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}

pub fn write_mps<S: Scalar, W: Write>(instance: &MilpInstance<S>, mut out: W) -> std::io::Result<()> {
    out.write_all(to_mps_string(instance).as_bytes())
}

pub fn export_mps<S: Scalar>(instance: &MilpInstance<S>, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_mps_string(instance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_small_instance() {
        let mut m = MilpInstance::<f64>::new("golden");
        let x = m.add_col("x", 0.0, 4.0, -1.0, false);
        let y = m.add_col("y", 0.0, 1.0, 2.5, true);
        let z = m.add_col("z", -1.0, 3.0, 0.0, false);
        m.add_row("r1", vec![(x, 1.0), (y, -4.0)], Sense::Le, 0.0);
        m.add_row("r2", vec![(x, 1.0), (z, 1.0)], Sense::Ge, 1.5);
        m.add_row("r3", vec![(z, 2.0)], Sense::Eq, 2.0);
        let expected = "\
NAME          golden
OBJSENSE
    MIN
ROWS
 N  obj
 L  r1
 G  r2
 E  r3
COLUMNS
    x         obj                 -1
    x         r1                   1
    x         r2                   1
    MARKER0     'MARKER'                 'INTORG'
    y         obj                2.5
    y         r1                  -4
    MARKER1     'MARKER'                 'INTEND'
    z         r2                   1
    z         r3                   2
RHS
    RHS       r2                 1.5
    RHS       r3                   2
BOUNDS
 UP BND       x                    4
 UP BND       y                    1
 LO BND       z                   -1
 UP BND       z                    3
ENDATA
";
        assert_eq!(to_mps_string(&m), expected);
    }
}
