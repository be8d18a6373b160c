//! Exhaustive reference solver for small instances.
//!
//! Enumerates every assignment of the free integer columns depth-first,
//! skipping partial assignments that already violate a row whose columns are
//! all integer and assigned, and solves the residual LP at each leaf.

use super::bnb::{MilpSolution, MilpStatus};
use super::simplex::{LpModel, LpStatus};
use crate::error::SolveError;
use crate::model::{MilpInstance, Row};
use crate::scalar::Scalar;

/// Largest number of free integer columns [`oracle_solve`] accepts.
pub const MAX_ORACLE_BINARIES: usize = 24;

struct Enum<'a, S: Scalar> {
    inst: &'a MilpInstance<S>,
    lp: LpModel<S>,
    free: Vec<usize>,
    /// Rows that only touch integer columns, indexed by the depth at which
    /// their last free column is assigned.
    checks: Vec<Vec<&'a Row<S>>>,
    lower: Vec<S>,
    upper: Vec<S>,
    best: Option<(S, Vec<S>)>,
    leaves: usize,
}

impl<S: Scalar> Enum<'_, S> {
    fn rows_hold(&self, depth: usize) -> bool {
        self.checks[depth].iter().all(|r| r.violation(&self.lower) <= S::feas_tol())
    }

    fn go(&mut self, depth: usize) -> Result<(), SolveError> {
        if depth == self.free.len() {
            self.leaves += 1;
            let run = self.lp.solve(&self.lower, &self.upper, None)?;
            match run.status {
                LpStatus::Optimal => {
                    if self.best.as_ref().is_none_or(|(b, _)| run.objective < *b) {
                        let mut x = run.x;
                        x.truncate(self.inst.num_cols());
                        self.best = Some((run.objective, x));
                    }
                }
                LpStatus::Infeasible => {}
                LpStatus::Unbounded => return Err(SolveError::Numerical("LP relaxation is unbounded".into())),
            }
            return Ok(());
        }
        let j = self.free[depth];
        let lo = self.inst.lower[j].ceil().to_i64().unwrap_or(0);
        let hi = self.inst.upper[j].floor().to_i64().unwrap_or(-1);
        for v in lo..=hi {
            let v = S::of(v as f64);
            self.lower[j] = v;
            self.upper[j] = v;
            if self.rows_hold(depth) {
                self.go(depth + 1)?;
            }
        }
        self.lower[j] = self.inst.lower[j];
        self.upper[j] = self.inst.upper[j];
        Ok(())
    }
}

/// Solve by enumeration. Errors when more than `max_binaries` integer columns
/// (capped at [`MAX_ORACLE_BINARIES`]) are free or any has a domain wider than
/// a binary.
pub fn oracle_solve<S: Scalar>(instance: &MilpInstance<S>, max_binaries: usize) -> Result<MilpSolution<S>, SolveError> {
    let free = instance.free_integer_cols();
    let max = max_binaries.min(MAX_ORACLE_BINARIES);
    if free.len() > max {
        return Err(SolveError::TooManyBinaries { found: free.len(), max });
    }
    if free.iter().any(|&j| instance.upper[j] - instance.lower[j] > S::one() + S::int_tol()) {
        return Err(SolveError::Numerical("oracle only enumerates binary domains".into()));
    }
    let mut lower = instance.lower.clone();
    let mut upper = instance.upper.clone();
    for j in 0..instance.num_cols() {
        if instance.integer[j] && lower[j] == upper[j] {
            lower[j] = lower[j].round();
            upper[j] = lower[j];
        }
    }
    let mut depth_of = vec![usize::MAX; instance.num_cols()];
    for (d, &j) in free.iter().enumerate() {
        depth_of[j] = d;
    }
    let mut checks = vec![Vec::new(); free.len()];
    for row in &instance.rows {
        if !row.coeffs.iter().all(|&(j, _)| instance.integer[j]) {
            continue;
        }
        let last = row.coeffs.iter().map(|&(j, _)| depth_of[j]).filter(|&d| d != usize::MAX).max();
        if let Some(d) = last {
            checks[d].push(row);
        }
    }
    let mut e = Enum {
        inst: instance,
        lp: LpModel::new(instance),
        free,
        checks,
        lower,
        upper,
        best: None,
        leaves: 0,
    };
    e.go(0)?;
    Ok(match e.best {
        Some((obj, x)) => MilpSolution {
            status: MilpStatus::Optimal,
            x,
            objective: obj,
            bound: obj,
            gap: S::zero(),
            nodes: e.leaves,
            limit_reached: false,
        },
        None => MilpSolution {
            status: MilpStatus::Infeasible,
            x: Vec::new(),
            objective: S::infinity(),
            bound: S::infinity(),
            gap: S::infinity(),
            nodes: e.leaves,
            limit_reached: false,
        },
    })
}
